#pragma once

#include "eksaii/dataset.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace eksaii::resample {

struct SmoteConfig {
    int k_neighbors = 5;
    // Balance-to-majority when `count` is unset: generate majority_size - |minority|.
    std::optional<std::size_t> count;
    std::size_t majority_size = 0;
    std::uint64_t seed = 0;
};

struct SmoteResult {
    std::vector<std::vector<double>> points;
    int effective_k = 0;
    bool k_clamped = false;  // k was >= |minority| and was lowered to |minority| - 1
    // Parents of each synthetic point (indices into the minority set).
    std::vector<std::pair<std::size_t, std::size_t>> parents;
};

// Classic SMOTE: x + u (x_nn - x), u ~ U[0, 1], x_nn among the k nearest
// minority neighbours of x. Every minority point seeds floor(n / m) samples;
// the remaining n mod m bases are drawn without replacement.
// Throws TooFewSamples (|minority| < 2), InvalidConfig.
SmoteResult smote(const std::vector<std::vector<double>>& minority, const SmoteConfig& config);

// Appends synthetic `label` rows to a copy of `train` until the label matches
// the largest class. Synthetic ids are `smote-<n>`; their domain is the base row's.
Dataset oversample(const Dataset& train, const std::string& label, int k_neighbors, std::uint64_t seed);

}  // namespace eksaii::resample
