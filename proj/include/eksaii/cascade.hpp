#pragma once

// Knowledge-guided tree of experts.
//
// Starting from the full training set, each step trains every pool member on
// the current sample set, ranks them by entropy-imbalance gain, resolves
// near-ties by mean confidence against a dependability threshold, and
// installs the winner as a node whose children are the prediction
// partitions. The partition holding the rare class is grown further while
// its Gini impurity exceeds tau_g (or unconditionally when the rare class is
// only reachable through a "rest" group); every other partition becomes a
// majority-label leaf. Growth also stops on depth, sample-size and
// validation macro-F1 guards.

#include "eksaii/canonical.hpp"
#include "eksaii/dataset.hpp"
#include "eksaii/imbalance.hpp"
#include "eksaii/pool.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace eksaii::cascade {

inline constexpr int kTreeFormatVersion = 1;

struct CascadeConfig {
    std::string rare_class;
    double tau_m = 0.05;  // EIG tie margin
    double tau_g = 0.1;   // Gini cascade threshold
    double d_th = 0.5;    // dependability threshold
    int k = imbalance::kDefaultNeighbors;
    int max_depth = 8;
    double eps_stop = 0.005;  // minimum validation macro-F1 gain per accepted node
    std::optional<int> min_samples;
    std::uint64_t seed = 0;

    int effective_min_samples() const { return min_samples.value_or(2 * k + 2); }
};

// Throws InvalidConfig.
void validate(const CascadeConfig& config);

struct Node;

struct Child {
    std::string leaf;            // label when this child is a leaf
    std::shared_ptr<Node> node;  // set when this child is an inner node

    bool is_leaf() const noexcept { return node == nullptr; }
};

struct Node {
    std::string id;
    int depth = 1;
    pool::TrainedClassifier model;
    imbalance::EIGReport eig;
    std::map<std::string, double> gini;      // per non-empty training partition
    std::map<std::string, Child> children;   // one per label-set entry
};

struct LogEntry {
    int step = 0;
    std::string node_id;
    int depth = 1;
    std::size_t sample_size = 0;
    std::vector<imbalance::EIGReport> candidates;  // registration order
    std::vector<std::string> fingerprints;         // parallel to candidates
    std::string best;
    std::optional<std::string> runner_up;
    bool tie = false;
    std::map<std::string, double> tie_confidence;
    std::string tie_resolution;
    std::string selected;
    std::string rare_group;
    bool rare_explicit = false;
    std::optional<double> rare_gini;
    std::size_t rare_size = 0;
    double validation_macro_f1 = 0.0;
    bool accepted = true;
    // cascade | descend | stop_gini | stop_rare_empty | stop_max_depth |
    // stop_min_samples | stop_no_validation_gain | no_progress
    std::string action;
};

struct CascadeTree {
    std::shared_ptr<const Node> root;
    CascadeConfig config;
    FeatureSchema schema;
    std::vector<std::string> classes;
    std::vector<pool::TrainedClassifier> pool;  // members trained on the full training set
    std::vector<LogEntry> log;
};

// Overrides the EIG computation (scripted scenarios, experiments).
using EigFunction =
    std::function<imbalance::EIGReport(const pool::TrainedClassifier&, const Dataset& sample, int k, int depth)>;

struct BuildOptions {
    EigFunction eig;  // empty: imbalance::eig
};

// Throws PoolEmpty, RareClassAbsent, SchemaMismatch, UnlabeledData, InvalidConfig.
CascadeTree build_cascade(const pool::Pool& pool, const Dataset& train, const Dataset& validation,
                          const CascadeConfig& config, const BuildOptions& options = {});

// Re-executes a build log against the same pool and data: selections, EIG
// reports and stop decisions come from the log, models are retrained and
// their fingerprints checked. Throws FingerprintMismatch on divergence.
CascadeTree replay_cascade(const pool::Pool& pool, const Dataset& train, const Dataset& validation,
                           const CascadeConfig& config, const std::vector<LogEntry>& log);

struct PathStep {
    std::string node_id;
    std::string classifier_id;
    pool::Prediction prediction;
};

struct Inference {
    std::string label;
    std::vector<PathStep> path;
};

// Throws SchemaMismatch.
Inference infer(const CascadeTree& tree, const FeatureSchema& schema, const Instance& inst);

// Follows the recorded labels from the root; nullopt if the path leaves the tree.
std::optional<std::string> replay_path(const CascadeTree& tree, const std::vector<PathStep>& path);

// Number of inner nodes along the longest chain.
int depth(const CascadeTree& tree);
std::size_t node_count(const CascadeTree& tree);

// ---------------------------------------------------------------------------
// Fusion of symbolic and neural score vectors

using ScoreVector = std::vector<std::pair<std::string, double>>;  // sorted by label

struct FusionConfig {
    enum class Mode { Unweighted, Weighted };
    Mode mode = Mode::Unweighted;
    std::optional<double> alpha;  // weight of the neural vector (weighted mode)
};

// Throws LabelSetMismatch, InvalidConfig (weighted without alpha, alpha out of range).
ScoreVector fuse(const ScoreVector& symbolic, const ScoreVector& neural, const FusionConfig& config);

std::string argmax_label(const ScoreVector& scores);

// Grid {0, 0.05, ..., 1} maximizing macro-F1 of the fused argmax; ties keep the smaller alpha.
double learn_alpha(const std::vector<ScoreVector>& symbolic, const std::vector<ScoreVector>& neural,
                   const std::vector<std::string>& truth);

// ---------------------------------------------------------------------------
// Serialization: versioned canonical JSON.

using PoolSnapshot = std::vector<std::pair<std::string, std::string>>;  // (id, fingerprint)

PoolSnapshot snapshot(const CascadeTree& tree);
PoolSnapshot snapshot(const std::vector<pool::TrainedClassifier>& members);

Json export_tree(const CascadeTree& tree);
std::string export_tree_text(const CascadeTree& tree);

// Throws VersionMismatch, and FingerprintMismatch when `expected` differs
// from the stored pool snapshot.
CascadeTree import_tree(const Json& doc, const std::filesystem::path& base_dir = {},
                        const PoolSnapshot* expected = nullptr);

Json to_json(const CascadeConfig& config);
CascadeConfig config_from_json(const Json& doc);
Json to_json(const LogEntry& entry);
LogEntry log_entry_from_json(const Json& doc);

}  // namespace eksaii::cascade
