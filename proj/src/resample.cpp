#include "eksaii/resample.hpp"

#include "eksaii/errors.hpp"
#include "eksaii/imbalance.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <random>

namespace eksaii::resample {

SmoteResult smote(const std::vector<std::vector<double>>& minority, const SmoteConfig& config)
{
    const std::size_t m = minority.size();
    if (m < 2) throw Error(Errc::TooFewSamples, "SMOTE needs at least 2 minority samples");
    if (config.k_neighbors < 1) throw Error(Errc::InvalidConfig, "SMOTE k_neighbors must be >= 1");
    for (const auto& p : minority)
        if (p.size() != minority.front().size())
            throw Error(Errc::SchemaMismatch, "SMOTE points must share one dimension");

    SmoteResult out;
    out.effective_k = config.k_neighbors;
    if (static_cast<std::size_t>(config.k_neighbors) >= m) {
        out.effective_k = static_cast<int>(m - 1);
        out.k_clamped = true;
    }
    std::size_t n = 0;
    if (config.count) n = *config.count;
    else if (config.majority_size > m) n = config.majority_size - m;

    // k nearest neighbours of every minority point, ties by index.
    const auto k = static_cast<std::size_t>(out.effective_k);
    std::vector<std::vector<std::size_t>> neighbours(m);
    std::vector<std::pair<double, std::size_t>> dist;
    for (std::size_t i = 0; i < m; ++i) {
        dist.clear();
        for (std::size_t j = 0; j < m; ++j)
            if (j != i) dist.emplace_back(imbalance::euclidean(minority[i], minority[j]), j);
        std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
        for (std::size_t j = 0; j < k; ++j) neighbours[i].push_back(dist[j].second);
    }

    std::mt19937_64 rng(config.seed);
    std::vector<std::size_t> bases;
    bases.reserve(n);
    for (std::size_t round = 0; round < n / m; ++round)
        for (std::size_t i = 0; i < m; ++i) bases.push_back(i);
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t i = 0; i < n % m; ++i) bases.push_back(order[i]);

    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<std::size_t> pick(0, k - 1);
    out.points.reserve(n);
    for (auto b : bases) {
        const auto nn = neighbours[b][pick(rng)];
        const double u = unit(rng);
        std::vector<double> p(minority[b].size());
        for (std::size_t d = 0; d < p.size(); ++d) p[d] = minority[b][d] + u * (minority[nn][d] - minority[b][d]);
        out.points.push_back(std::move(p));
        out.parents.emplace_back(b, nn);
    }
    return out;
}

Dataset oversample(const Dataset& train, const std::string& label, int k_neighbors, std::uint64_t seed)
{
    std::map<std::string, std::size_t> counts;
    std::vector<const Instance*> minority_rows;
    for (const auto& row : train) {
        if (!row.label) continue;
        ++counts[*row.label];
        if (*row.label == label) minority_rows.push_back(&row);
    }
    std::size_t majority = 0;
    for (const auto& [l, c] : counts) majority = std::max(majority, c);

    std::vector<std::vector<double>> minority;
    for (const auto* r : minority_rows) minority.push_back(r->features);
    SmoteConfig cfg;
    cfg.k_neighbors = k_neighbors;
    cfg.majority_size = majority;
    cfg.seed = seed;
    const auto result = smote(minority, cfg);

    Dataset out = train;
    for (std::size_t i = 0; i < result.points.size(); ++i) {
        Instance inst;
        inst.id = "smote-" + std::to_string(i);
        inst.domain = minority_rows[result.parents[i].first]->domain;
        inst.label = label;
        inst.features = result.points[i];
        out.add(std::move(inst));
    }
    return out;
}

}  // namespace eksaii::resample
