#pragma once

#include "eksaii/dataset.hpp"
#include "eksaii/rule_dsl.hpp"

#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace eksaii::knowledge {

enum class Semantics { Goedel, Product };
enum class ScoreMode { WeightedSum, Fuzzy };

std::string_view semantics_name(Semantics s) noexcept;
std::string_view score_mode_name(ScoreMode m) noexcept;
Semantics parse_semantics(std::string_view text);
ScoreMode parse_score_mode(std::string_view text);

// Degrees of satisfaction s_i in [0, 1], in proposition declaration order.
class SatisfactionVector {
public:
    SatisfactionVector() = default;
    explicit SatisfactionVector(std::vector<std::pair<std::string, double>> entries);

    // Throws UnknownAtom.
    double at(std::string_view proposition) const;
    const double* find(std::string_view proposition) const;
    const std::vector<std::pair<std::string, double>>& entries() const noexcept { return entries_; }
    std::size_t size() const noexcept { return entries_.size(); }

private:
    std::vector<std::pair<std::string, double>> entries_;
};

struct Contribution {
    std::string proposition;
    double weight;
    double satisfaction;
    double product;
};

// S_c and its per-proposition ledger. In weighted-sum mode `score` is the sum
// of the products; in fuzzy mode it is the rule's fuzzy truth value and the
// ledger weights are uniform (informational only).
struct ClassScore {
    std::string label;
    double score = 0.0;
    ScoreMode mode = ScoreMode::WeightedSum;
    std::vector<Contribution> contributions;
};

// Throws MissingFeature when the declared column is absent from `schema`.
double extract_satisfaction(const rules::ExtractorDecl& decl, const FeatureSchema& schema,
                            std::span<const double> features);

SatisfactionVector satisfactions(const rules::RuleSet& rules, const FeatureSchema& schema,
                                 std::span<const double> features);

// Throws UnknownAtom.
double eval_expr(const rules::Expr& expr, const SatisfactionVector& sat, Semantics semantics);

// Throws WeightsNotFitted (weighted-sum mode without weights for `label`).
ClassScore class_score(const rules::RuleSet& rules, std::string_view label, const SatisfactionVector& sat,
                       ScoreMode mode, Semantics semantics = Semantics::Goedel);

struct WeightFitOptions {
    int iterations = 500;
    double step = 0.1;
};

// Euclidean projection onto the probability simplex.
std::vector<double> project_to_simplex(std::span<const double> v);

// Per class, least-squares fit of sum(w_i s_i) to the one-vs-rest indicator
// over the simplex, by projected gradient descent from the uniform point.
// `classes` restricts which class rules are fitted (empty = all).
// Throws EmptyDataset.
rules::RuleSet fit_weights(rules::RuleSet rules, const Dataset& data, std::span<const std::string> classes = {},
                           WeightFitOptions options = {});

struct RulePrediction {
    std::string label;
    double confidence = 0.0;
    std::vector<std::pair<std::string, double>> scores;  // normalized, sorted by label
    std::vector<ClassScore> class_scores;                // raw, sorted by label
};

// argmax S_c with lexicographic tie-break; confidence is the score share.
RulePrediction rule_classifier_predict(const rules::RuleSet& rules, const FeatureSchema& schema,
                                       std::span<const double> features, ScoreMode mode = ScoreMode::WeightedSum,
                                       Semantics semantics = Semantics::Goedel);

// Shared argmax/normalization over raw non-negative class scores.
RulePrediction normalize_scores(std::vector<ClassScore> class_scores);

}  // namespace eksaii::knowledge
