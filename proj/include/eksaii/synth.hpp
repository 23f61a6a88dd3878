#pragma once

// Synthetic imbalanced benchmark with domain shift.
//
// Config (JSON):
// {
//   "seed": 42,
//   "features": ["f1", "f2", "f3"],
//   "classes": [
//     {"label": "A", "prior": 0.6,
//      "components": [{"weight": 1, "mean": [0, 0, 0], "std": [1, 1, 1]}]},
//     ...
//   ],
//   "rare": {"label": "R", "rule": [{"feature": "f1", "op": ">", "value": 2}, ...]},
//   "exclusive_rule": true,          // non-rare draws satisfying the rule are redrawn
//   "sizes": {"train": 2000, "val": 500, "test": 500},   // per domain
//   "stratified": true,
//   "domains": [
//     {"name": "source"},                                  // identity
//     {"name": "site_b", "a": [1.1, 0.9, 1], "b": [0.3, -0.2, 0]},
//     {"name": "site_c", "random_shift": {"a": [0.8, 1.2], "b": [-0.5, 0.5]}}
//   ]
// }
//
// Rare instances satisfy the rule before the domain's affine map x -> a x + b
// is applied.

#include "eksaii/canonical.hpp"
#include "eksaii/dataset.hpp"
#include "eksaii/rule_dsl.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace eksaii::synth {

struct Component {
    double weight = 1.0;
    std::vector<double> mean;
    std::vector<double> stddev;
};

struct ClassSpec {
    std::string label;
    double prior = 0.0;
    std::vector<Component> components;
};

struct Condition {
    std::string feature;
    rules::CompareOp op = rules::CompareOp::Greater;
    double value = 0.0;
};

struct DomainSpec {
    std::string name;
    std::vector<double> a;  // empty: identity
    std::vector<double> b;
    bool random_shift = false;
    double a_low = 1.0, a_high = 1.0, b_low = 0.0, b_high = 0.0;
};

struct SynthConfig {
    std::uint64_t seed = 0;
    std::vector<std::string> features;
    std::vector<ClassSpec> classes;
    std::string rare_label;
    std::vector<Condition> rare_rule;
    bool exclusive_rule = false;
    std::size_t train = 0, val = 0, test = 0;
    bool stratified = true;
    std::vector<DomainSpec> domains;
    int max_attempts = 100000;
};

// Throws InvalidConfig.
SynthConfig config_from_json(const Json& doc);
SynthConfig load_config(const std::filesystem::path& path);
void validate(const SynthConfig& config);

struct Shift {
    std::string domain;
    std::vector<double> a, b;
};

struct Splits {
    Dataset train, val, test;
    std::vector<Shift> shifts;  // as realized, one per domain
};

bool satisfies(const std::vector<Condition>& rule, const FeatureSchema& schema, std::span<const double> x);

// Deterministic under config.seed.
Splits generate(const SynthConfig& config);

// Stratified class counts by largest remainder.
std::vector<std::size_t> stratified_counts(const std::vector<double>& priors, std::size_t n);

}  // namespace eksaii::synth
