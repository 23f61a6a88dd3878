#pragma once

// Scoring a tree (optionally with a symbolic/neural fusion stage) against a
// labeled dataset, and structured per-instance explanations.

#include "eksaii/canonical.hpp"
#include "eksaii/cascade.hpp"
#include "eksaii/dataset.hpp"
#include "eksaii/knowledge.hpp"
#include "eksaii/metrics.hpp"
#include "eksaii/pool.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace eksaii::evaluation {

// Late fusion of two branches over the tree's classes. The symbolic branch is
// the first rule member of the tree's pool; the neural branch is an external
// score table when given, otherwise the first non-rule member.
struct FusionStage {
    cascade::FusionConfig config;
    std::vector<std::string> classes;
    pool::TrainedClassifier symbolic;
    std::optional<pool::TrainedClassifier> neural;
    std::optional<pool::ScoreTable> external;
};

// Throws InvalidConfig (no suitable branch), LabelSetMismatch.
FusionStage make_fusion_stage(const cascade::CascadeTree& tree, const cascade::FusionConfig& config,
                              std::optional<pool::ScoreTable> external = std::nullopt);

// Spreads a "rest" share evenly over the classes the label set leaves implicit.
cascade::ScoreVector class_vector(const pool::Prediction& prediction, const std::vector<std::string>& classes);

struct FusionTrace {
    cascade::FusionConfig config;
    cascade::ScoreVector symbolic;
    cascade::ScoreVector neural;
    cascade::ScoreVector fused;
};

// Throws UnknownInstance when the external table lacks the instance.
FusionTrace fuse_instance(const FusionStage& stage, const FeatureSchema& schema, const Instance& inst);

// Fits alpha on a labeled dataset and returns the stage in weighted mode.
FusionStage with_learned_alpha(FusionStage stage, const Dataset& data);

struct Outcome {
    std::string label;
    std::vector<cascade::PathStep> path;
    std::optional<FusionTrace> fusion;  // when set, `label` is the fused argmax
};

Outcome predict(const cascade::CascadeTree& tree, const FeatureSchema& schema, const Instance& inst,
                const FusionStage* fusion = nullptr);

// Throws UnlabeledData, SchemaMismatch.
metrics::MetricsReport evaluate(const cascade::CascadeTree& tree, const Dataset& data,
                                const FusionStage* fusion = nullptr);
metrics::MetricsReport evaluate(const pool::TrainedClassifier& model, const Dataset& data,
                                std::optional<std::string> rare = std::nullopt);

struct KnowledgeNode {
    std::string node_id;  // "fusion" for the symbolic fusion branch
    std::string classifier_id;
    knowledge::ScoreMode mode = knowledge::ScoreMode::WeightedSum;
    knowledge::Semantics semantics = knowledge::Semantics::Goedel;
    knowledge::RulePrediction result;
};

struct ExplanationRecord {
    std::string instance_id;
    std::string y_final;
    std::vector<cascade::PathStep> path;
    std::vector<KnowledgeNode> knowledge;
    std::optional<FusionTrace> fusion;
};

// Throws SchemaMismatch.
ExplanationRecord explain(const cascade::CascadeTree& tree, const FeatureSchema& schema, const Instance& inst,
                          const FusionStage* fusion = nullptr);

// Largest |sum of ledger products - class score| over weighted-sum nodes.
double ledger_residual(const ExplanationRecord& record);

Json to_json(const ExplanationRecord& record);
Json to_json(const FusionTrace& trace);

}  // namespace eksaii::evaluation
