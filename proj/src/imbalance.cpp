#include "eksaii/imbalance.hpp"

#include "eksaii/errors.hpp"
#include "eksaii/pool.hpp"

#include <algorithm>
#include <cmath>

namespace eksaii::imbalance {

double euclidean(std::span<const double> a, std::span<const double> b)
{
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        sum += d * d;
    }
    return std::sqrt(sum);
}

namespace {

// Mean inverse distance over the k smallest entries of `dist` (clamped).
double density_from_distances(std::vector<double>& dist, int k)
{
    const std::size_t q = std::min<std::size_t>(static_cast<std::size_t>(std::max(k, 1)), dist.size());
    std::nth_element(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(q - 1), dist.end());
    // After nth_element the first q entries are the q nearest (unordered).
    std::sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(q));
    double sum = 0.0;
    for (std::size_t j = 0; j < q; ++j) sum += 1.0 / std::max(dist[j], kDistanceFloor);
    return sum / static_cast<double>(q);
}

}  // namespace

double local_density(std::span<const double> x, std::span<const Point> members, int k)
{
    if (members.empty()) throw Error(Errc::EmptyNeighborhood, "local density of a point with no class neighbours");
    std::vector<double> dist;
    dist.reserve(members.size());
    for (const auto& m : members) dist.push_back(euclidean(x, m));
    return density_from_distances(dist, k);
}

ClassEntropy class_entropy(std::span<const Point> members, int k)
{
    if (members.empty()) throw Error(Errc::EmptyClass, "class entropy of an empty class");
    ClassEntropy out;
    const std::size_t n = members.size();
    if (n == 1) {
        out.gamma = {1.0};
        return out;
    }
    std::vector<double> lambda(n);
    std::vector<double> dist;
    dist.reserve(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        dist.clear();
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) dist.push_back(euclidean(members[i], members[j]));
        lambda[i] = density_from_distances(dist, k);
    }
    double total = 0.0;
    for (double l : lambda) total += l;
    out.gamma.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double g = lambda[i] / total;
        out.gamma[i] = g;
        if (g > 0) out.theta -= g * std::log2(g);
    }
    return out;
}

ImbalanceDetail entropy_imbalance_detail(const RepresentationView& view, int k)
{
    if (view.points.size() != view.labels.size())
        throw Error(Errc::SchemaMismatch, "representation has unlabeled points");
    if (view.points.empty()) throw Error(Errc::NoClasses, "entropy imbalance of an empty representation");
    const auto dim = view.points.front().size();
    std::map<std::string, std::vector<Point>> by_class;
    for (std::size_t i = 0; i < view.points.size(); ++i) {
        if (view.points[i].size() != dim || dim == 0)
            throw Error(Errc::SchemaMismatch, "representation vectors must share one non-zero dimension");
        by_class[view.labels[i]].push_back(view.points[i]);
    }
    ImbalanceDetail out;
    double max_theta = 0.0;
    double sum_theta = 0.0;
    for (const auto& [label, members] : by_class) {
        const double theta = class_entropy(members, k).theta;
        out.theta[label] = theta;
        max_theta = std::max(max_theta, theta);
        sum_theta += theta;
    }
    out.eta = std::max(0.0, max_theta - sum_theta / static_cast<double>(by_class.size()));
    return out;
}

double entropy_imbalance(const RepresentationView& view, int k)
{
    return entropy_imbalance_detail(view, k).eta;
}

RepresentationView raw_view(const Dataset& data)
{
    RepresentationView view;
    for (const auto& row : data) {
        if (!row.label) continue;
        view.ids.push_back(row.id);
        view.points.push_back(row.features);
        view.labels.push_back(*row.label);
    }
    return view;
}

RepresentationView score_view(const pool::TrainedClassifier& model, const Dataset& data)
{
    RepresentationView view;
    for (const auto& row : data) {
        if (!row.label) continue;
        const auto pred = model.predict(data.schema(), row);
        Point p;
        p.reserve(pred.scores.size());
        for (const auto& [label, score] : pred.scores) p.push_back(score);
        view.ids.push_back(row.id);
        view.points.push_back(std::move(p));
        view.labels.push_back(*row.label);
    }
    return view;
}

EIGReport eig(const pool::TrainedClassifier& model, const Dataset& sample, int k, const ImbalanceDetail& raw)
{
    if (!model.trained()) throw Error(Errc::UntrainedClassifier, "EIG needs a trained classifier");
    const auto mod = entropy_imbalance_detail(score_view(model, sample), k);
    EIGReport r;
    r.classifier_id = model.spec().id;
    r.eta_raw = raw.eta;
    r.eta_model = mod.eta;
    r.eig = raw.eta - mod.eta;
    r.theta_raw = raw.theta;
    r.theta_model = mod.theta;
    return r;
}

EIGReport eig(const pool::TrainedClassifier& model, const Dataset& sample, int k)
{
    if (!model.trained()) throw Error(Errc::UntrainedClassifier, "EIG needs a trained classifier");
    return eig(model, sample, k, entropy_imbalance_detail(raw_view(sample), k));
}

Json to_json(const EIGReport& r)
{
    return Json{{"classifier", r.classifier_id}, {"eta_raw", r.eta_raw},         {"eta_model", r.eta_model},
                {"eig", r.eig},                  {"theta_raw", r.theta_raw},     {"theta_model", r.theta_model}};
}

EIGReport eig_report_from_json(const Json& doc)
{
    EIGReport r;
    r.classifier_id = doc.at("classifier").get<std::string>();
    r.eta_raw = doc.at("eta_raw").get<double>();
    r.eta_model = doc.at("eta_model").get<double>();
    r.eig = doc.at("eig").get<double>();
    r.theta_raw = doc.at("theta_raw").get<std::map<std::string, double>>();
    r.theta_model = doc.at("theta_model").get<std::map<std::string, double>>();
    return r;
}

double gini(std::span<const std::string> labels)
{
    if (labels.empty()) throw Error(Errc::EmptyPartition, "Gini impurity of an empty partition");
    std::map<std::string_view, std::size_t> counts;
    for (const auto& l : labels) ++counts[l];
    const double n = static_cast<double>(labels.size());
    double sum_sq = 0.0;
    for (const auto& [label, c] : counts) {
        const double p = static_cast<double>(c) / n;
        sum_sq += p * p;
    }
    return std::max(0.0, 1.0 - sum_sq);
}

}  // namespace eksaii::imbalance
