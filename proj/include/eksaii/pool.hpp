#pragma once

// Heterogeneous experts behind one interface. Every classifier declares a
// label set; a set containing "rest" is one-vs-rest and maps every label
// not listed explicitly onto "rest".

#include "eksaii/canonical.hpp"
#include "eksaii/dataset.hpp"
#include "eksaii/knowledge.hpp"
#include "eksaii/rule_dsl.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace eksaii::pool {

inline constexpr std::string_view kRest = "rest";

enum class Kind { Rule, Knn, Logistic, External };

std::string_view kind_name(Kind kind) noexcept;
Kind parse_kind(std::string_view text);

struct ClassifierSpec {
    std::string id;
    Kind kind = Kind::Knn;
    std::vector<std::string> label_set;  // kept sorted and unique

    int k = 5;  // knn

    int iterations = 500;  // logistic
    double step = 0.1;
    std::uint64_t seed = 0;

    std::shared_ptr<const rules::RuleSet> rules;  // rule
    knowledge::ScoreMode mode = knowledge::ScoreMode::WeightedSum;
    knowledge::Semantics semantics = knowledge::Semantics::Goedel;

    std::string score_file;  // external

    bool one_vs_rest() const;
    bool has_label(std::string_view label) const;
    // The label-set entry an instance label belongs to. Throws UnknownLabel.
    std::string group_of(std::string_view label) const;
};

// Sorts/dedups the label set and checks kind-specific parameters.
// Throws InvalidConfig.
ClassifierSpec normalized(ClassifierSpec spec);

Json to_json(const ClassifierSpec& spec);
ClassifierSpec spec_from_json(const Json& doc);

struct Prediction {
    std::string label;
    double confidence = 0.0;
    std::vector<std::pair<std::string, double>> scores;  // label-set order, sums to 1

    double score(std::string_view label) const;
};

// argmax with lexicographic (label-set order) tie-break; renormalizes.
Prediction make_prediction(std::vector<std::pair<std::string, double>> raw_scores);

class Model {
public:
    virtual ~Model() = default;
    virtual Prediction predict(const Instance& inst) const = 0;
    virtual Json state() const = 0;
    // Knowledge ledger; only rule models have one.
    virtual std::optional<knowledge::RulePrediction> knowledge(const FeatureSchema&, const Instance&) const
    {
        return std::nullopt;
    }
};

// Immutable after training; copies share the fitted state.
class TrainedClassifier {
public:
    TrainedClassifier() = default;
    TrainedClassifier(ClassifierSpec spec, FeatureSchema schema, std::string fingerprint,
                      std::shared_ptr<const Model> model);

    bool trained() const noexcept { return model_ != nullptr; }
    const ClassifierSpec& spec() const noexcept { return spec_; }
    const std::string& fingerprint() const noexcept { return fingerprint_; }
    const FeatureSchema& schema() const noexcept { return schema_; }

    // Throws SchemaMismatch, UntrainedClassifier, UnknownInstance (external).
    Prediction predict(const FeatureSchema& schema, const Instance& inst) const;
    std::optional<knowledge::RulePrediction> knowledge(const FeatureSchema& schema, const Instance& inst) const;

    Json to_json() const;
    // Relative external score paths resolve against `base_dir`.
    static TrainedClassifier from_json(const Json& doc, const std::filesystem::path& base_dir = {});

private:
    void check(const FeatureSchema& schema) const;

    ClassifierSpec spec_;
    FeatureSchema schema_;
    std::string fingerprint_;
    std::shared_ptr<const Model> model_;
};

// Content hash of (spec, training partition).
std::string fingerprint(const ClassifierSpec& spec, const Dataset& partition);

// Throws EmptyPartition, ExternalScoreMissing, UnknownLabel, UnlabeledData.
TrainedClassifier train(const ClassifierSpec& spec, const Dataset& partition,
                        const std::filesystem::path& base_dir = {});

// Disjoint cover of `data` keyed by predicted label; empty groups omitted.
std::map<std::string, Dataset> partition_by_prediction(const TrainedClassifier& model, const Dataset& data);

// Mean prediction confidence over `data`.
double mean_confidence(const TrainedClassifier& model, const Dataset& data);

class Pool {
public:
    // Throws DuplicateId, InvalidConfig. Registration order is preserved.
    void add(ClassifierSpec spec);

    const std::vector<ClassifierSpec>& specs() const noexcept { return specs_; }
    const ClassifierSpec* find(std::string_view id) const;
    std::size_t size() const noexcept { return specs_.size(); }
    bool empty() const noexcept { return specs_.empty(); }

    // Directory that relative external score paths resolve against.
    std::filesystem::path base_dir;

private:
    std::vector<ClassifierSpec> specs_;
};

// External score CSV: header `id,<label...>`, non-negative scores.
struct ScoreTable {
    std::vector<std::string> labels;  // header order
    std::map<std::string, std::vector<double>> rows;
};
ScoreTable load_score_table(const std::filesystem::path& path);
void save_score_table(const std::filesystem::path& path, const ScoreTable& table);

// Pool config (JSON):
//   {"classifiers": [{"id": "kb", "kind": "rule", "rules": "dr.ekr",
//                     "mode": "weighted_sum", "label_set": ["A", "B"]}, ...]}
// Relative paths resolve against the config's directory. Missing label sets
// default to `default_labels` (external: the score file header).
Pool load_pool(const std::filesystem::path& path, const std::vector<std::string>& default_labels);
Pool pool_from_json(const Json& doc, const std::filesystem::path& base_dir,
                    const std::vector<std::string>& default_labels);

}  // namespace eksaii::pool
