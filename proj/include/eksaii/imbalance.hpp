#pragma once

// Density-weighted class entropy and the entropy-imbalance gain used to rank
// pool classifiers, plus the Gini impurity that triggers cascading.
//
//   lambda(x) = mean over the K nearest same-class neighbours of 1/dist
//   gamma(x)  = lambda(x) / sum of lambda over the class
//   theta_r   = -sum gamma log2 gamma
//   eta       = max_r theta_r - mean_r theta_r
//   EIG(M)    = eta(raw features) - eta(M's score vectors)

#include "eksaii/canonical.hpp"
#include "eksaii/dataset.hpp"

#include <map>
#include <span>
#include <string>
#include <vector>

namespace eksaii::pool {
class TrainedClassifier;
}

namespace eksaii::imbalance {

// Distances are clamped to this floor before inversion.
inline constexpr double kDistanceFloor = 1e-9;
inline constexpr int kDefaultNeighbors = 5;

using Point = std::vector<double>;

double euclidean(std::span<const double> a, std::span<const double> b);

// `members` must not contain x itself. Throws EmptyNeighborhood.
double local_density(std::span<const double> x, std::span<const Point> members, int k);

struct ClassEntropy {
    double theta = 0.0;
    std::vector<double> gamma;  // parallel to the members
};

// Throws EmptyClass.
ClassEntropy class_entropy(std::span<const Point> members, int k);

struct RepresentationView {
    std::vector<std::string> ids;
    std::vector<Point> points;
    std::vector<std::string> labels;
};

struct ImbalanceDetail {
    double eta = 0.0;
    std::map<std::string, double> theta;
};

// Throws NoClasses, SchemaMismatch (ragged dimensions).
ImbalanceDetail entropy_imbalance_detail(const RepresentationView& view, int k);
double entropy_imbalance(const RepresentationView& view, int k);

// Raw feature vectors of the labeled rows.
RepresentationView raw_view(const Dataset& data);
// The classifier's per-class score vectors (label-set order) for the labeled rows.
RepresentationView score_view(const pool::TrainedClassifier& model, const Dataset& data);

struct EIGReport {
    std::string classifier_id;
    double eta_raw = 0.0;
    double eta_model = 0.0;
    double eig = 0.0;
    std::map<std::string, double> theta_raw;
    std::map<std::string, double> theta_model;
};

// Throws UntrainedClassifier, NoClasses.
EIGReport eig(const pool::TrainedClassifier& model, const Dataset& sample, int k);
// Same, with eta_raw already known for `sample`.
EIGReport eig(const pool::TrainedClassifier& model, const Dataset& sample, int k, const ImbalanceDetail& raw);

Json to_json(const EIGReport& report);
EIGReport eig_report_from_json(const Json& doc);

// 1 - sum p_i^2 over label frequencies. Throws EmptyPartition.
double gini(std::span<const std::string> labels);

}  // namespace eksaii::imbalance
