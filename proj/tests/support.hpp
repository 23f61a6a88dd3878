#pragma once

// Shared fixtures: temp directories, dataset builders, random generators and
// brute-force reference implementations of the imbalance metrics.

#include "eksaii/dataset.hpp"
#include "eksaii/imbalance.hpp"
#include "eksaii/pool.hpp"
#include "eksaii/rule_dsl.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#ifndef EKSAII_SOURCE_DIR
#define EKSAII_SOURCE_DIR "."
#endif

inline std::filesystem::path fs_root()
{
    return EKSAII_SOURCE_DIR;
}

namespace support {

namespace fs = std::filesystem;

class TempDir {
public:
    TempDir()
    {
        static int counter = 0;
        std::random_device rd;
        path_ = fs::temp_directory_path() /
                ("eksaii-test-" + std::to_string(rd()) + "-" + std::to_string(counter++));
        fs::create_directories(path_);
    }
    ~TempDir()
    {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const fs::path& path() const { return path_; }
    fs::path operator/(const std::string& name) const { return path_ / name; }

private:
    fs::path path_;
};

inline void write_file(const fs::path& path, const std::string& text)
{
    std::ofstream o(path, std::ios::binary);
    o << text;
}

inline std::string read_file(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline eksaii::FeatureSchema schema_of(std::size_t dim)
{
    eksaii::FeatureSchema s;
    for (std::size_t i = 0; i < dim; ++i) s.push_back("x" + std::to_string(i + 1));
    return s;
}

inline eksaii::Dataset make_dataset(const std::vector<std::vector<double>>& points,
                                    const std::vector<std::string>& labels, const std::string& domain = "d0",
                                    const std::string& prefix = "i")
{
    eksaii::Dataset d(schema_of(points.empty() ? 1 : points.front().size()));
    for (std::size_t i = 0; i < points.size(); ++i)
        d.add({prefix + std::to_string(i), domain, labels[i], points[i]});
    return d;
}

// Clustered random data: class c centred at c * spread along every axis.
inline eksaii::Dataset random_dataset(std::mt19937_64& rng, std::size_t n, std::size_t dim, std::size_t classes,
                                      double spread = 1.5, const std::string& prefix = "i")
{
    std::normal_distribution<double> noise(0.0, 1.0);
    std::uniform_int_distribution<std::size_t> pick(0, classes - 1);
    std::vector<std::vector<double>> pts;
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < n; ++i) {
        const auto c = i < classes ? i : pick(rng);
        std::vector<double> p(dim);
        for (auto& v : p) v = spread * static_cast<double>(c) + noise(rng);
        pts.push_back(std::move(p));
        labels.push_back("c" + std::to_string(c));
    }
    return make_dataset(pts, labels, "d0", prefix);
}

// Random boolean expression over atoms p1..p<atoms>, depth <= max_depth.
inline eksaii::rules::ExprPtr random_expr(std::mt19937_64& rng, int max_depth, int atoms)
{
    using eksaii::rules::Expr;
    std::uniform_int_distribution<int> atom(1, atoms);
    std::uniform_int_distribution<int> kind(0, 3);
    if (max_depth <= 1) return Expr::atom("p" + std::to_string(atom(rng)));
    switch (kind(rng)) {
    case 0: return Expr::atom("p" + std::to_string(atom(rng)));
    case 1: return Expr::negate(random_expr(rng, max_depth - 1, atoms));
    case 2: return Expr::conj(random_expr(rng, max_depth - 1, atoms), random_expr(rng, max_depth - 1, atoms));
    default: return Expr::disj(random_expr(rng, max_depth - 1, atoms), random_expr(rng, max_depth - 1, atoms));
    }
}

// Classical two-valued evaluation, written independently of the engine.
inline bool classical(const eksaii::rules::Expr& e, const std::map<std::string, bool>& v)
{
    using K = eksaii::rules::Expr::Kind;
    switch (e.kind()) {
    case K::Atom: return v.at(e.name());
    case K::Not: return !classical(e.operand(), v);
    case K::And: return classical(e.lhs(), v) && classical(e.rhs(), v);
    case K::Or: return classical(e.lhs(), v) || classical(e.rhs(), v);
    }
    return false;
}

// ---------------------------------------------------------------------------
// Scripted classifiers: external score tables computed by a callback.

using ScoreFn = std::function<std::vector<double>(const eksaii::Instance&)>;

inline eksaii::pool::ClassifierSpec scripted(const TempDir& dir, const eksaii::Dataset& data, const std::string& id,
                                             std::vector<std::string> labels, const ScoreFn& fn)
{
    std::sort(labels.begin(), labels.end());
    std::string csv = "id";
    for (const auto& l : labels) csv += "," + l;
    csv += "\n";
    for (const auto& row : data) {
        csv += row.id;
        for (double v : fn(row)) csv += "," + eksaii::format_real(v);
        csv += "\n";
    }
    const auto file = dir / (id + ".csv");
    write_file(file, csv);
    eksaii::pool::ClassifierSpec s;
    s.id = id;
    s.kind = eksaii::pool::Kind::External;
    s.label_set = std::move(labels);
    s.score_file = file.string();
    return s;
}

// One-hot scores over sorted `labels` for the given label.
inline std::vector<double> one_hot(const std::vector<std::string>& labels, const std::string& label)
{
    std::vector<std::string> sorted = labels;
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> out(sorted.size(), 0.0);
    for (std::size_t i = 0; i < sorted.size(); ++i)
        if (sorted[i] == label) out[i] = 1.0;
    return out;
}

// ---------------------------------------------------------------------------
// Engineered representations with a prescribed EIG.
//
// Raw data: three 1-d classes, A and B with 40 evenly spaced points, R with 10.
// A scripted classifier keeps every class on a short segment near its vertex
// of the simplex; A and B points are spaced geometrically with ratio r. r = 1
// reproduces the raw geometry (EIG 0); growing r makes A and B heterogeneous,
// lowering their entropy towards R's and raising the gain.

struct EngineeredCase {
    eksaii::Dataset data;
    std::vector<std::string> labels{"A", "B", "R"};
};

inline EngineeredCase engineered_data()
{
    EngineeredCase c;
    std::vector<std::vector<double>> pts;
    std::vector<std::string> labels;
    for (int j = 0; j < 40; ++j) {
        pts.push_back({static_cast<double>(j)});
        labels.push_back("A");
        pts.push_back({1000.0 + j});
        labels.push_back("B");
    }
    for (int j = 0; j < 10; ++j) {
        pts.push_back({2000.0 + j});
        labels.push_back("R");
    }
    c.data = make_dataset(pts, labels);
    return c;
}

inline ScoreFn geometric_scores(double ratio)
{
    return [ratio](const eksaii::Instance& inst) {
        const double x = inst.features[0];
        const int cls = x < 500 ? 0 : x < 1500 ? 1 : 2;
        const int j = static_cast<int>(x - (cls == 0 ? 0 : cls == 1 ? 1000 : 2000));
        double u;
        if (cls == 2) {
            u = 0.3 * j / 9.0;
        } else {
            const int n = 40;
            const double last = ratio == 1.0 ? n - 1.0 : (std::pow(ratio, n - 1) - 1) / (ratio - 1);
            const double pos = ratio == 1.0 ? j : (std::pow(ratio, j) - 1) / (ratio - 1);
            u = 0.3 * pos / last;
        }
        std::vector<double> s(3, u / 2);
        s[static_cast<std::size_t>(cls)] = 1.0 - u;
        return s;
    };
}

// Smallest ratio whose EIG lands within tol of target (bisection on r).
inline double engineer_ratio(const TempDir& dir, const EngineeredCase& c, double target, int k)
{
    auto eig_at = [&](double r) {
        auto spec = scripted(dir, c.data, "probe", c.labels, geometric_scores(r));
        return eksaii::imbalance::eig(eksaii::pool::train(spec, c.data), c.data, k).eig;
    };
    double lo = 1.0, hi = 1.05;
    while (eig_at(hi) < target && hi < 2.0) hi = 1.0 + (hi - 1.0) * 2;
    for (int i = 0; i < 60; ++i) {
        const double mid = (lo + hi) / 2;
        (eig_at(mid) < target ? lo : hi) = mid;
    }
    return (lo + hi) / 2;
}

// ---------------------------------------------------------------------------
// Brute-force oracle: full pairwise distance matrix, direct transcription.

namespace oracle {

inline double dist(const std::vector<double>& a, const std::vector<double>& b)
{
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

inline std::vector<double> densities(const std::vector<std::vector<double>>& pts, int k)
{
    const std::size_t n = pts.size();
    std::vector<std::vector<double>> matrix(n, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) matrix[i][j] = dist(pts[i], pts[j]);
    std::vector<double> lambda(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> row;
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) row.push_back(matrix[i][j]);
        std::sort(row.begin(), row.end());
        const std::size_t q = std::min<std::size_t>(static_cast<std::size_t>(k), row.size());
        double s = 0;
        for (std::size_t j = 0; j < q; ++j) s += 1.0 / std::max(row[j], 1e-9);
        lambda[i] = s / static_cast<double>(q);
    }
    return lambda;
}

struct Entropy {
    double theta = 0;
    std::vector<double> gamma;
};

inline Entropy entropy(const std::vector<std::vector<double>>& pts, int k)
{
    if (pts.size() == 1) return {0.0, {1.0}};
    const auto lambda = densities(pts, k);
    double total = 0;
    for (double l : lambda) total += l;
    Entropy e;
    for (double l : lambda) {
        const double g = l / total;
        e.gamma.push_back(g);
        if (g > 0) e.theta += -g * std::log(g) / std::log(2.0);
    }
    return e;
}

inline double eta(const std::vector<std::vector<double>>& pts, const std::vector<std::string>& labels, int k)
{
    std::map<std::string, std::vector<std::vector<double>>> groups;
    for (std::size_t i = 0; i < pts.size(); ++i) groups[labels[i]].push_back(pts[i]);
    double mx = -1e300, sum = 0;
    for (const auto& [l, g] : groups) {
        const double t = entropy(g, k).theta;
        mx = std::max(mx, t);
        sum += t;
    }
    return mx - sum / static_cast<double>(groups.size());
}

inline double eig(const eksaii::pool::TrainedClassifier& model, const eksaii::Dataset& data, int k)
{
    std::vector<std::vector<double>> raw, rep;
    std::vector<std::string> labels;
    for (const auto& row : data) {
        raw.push_back(row.features);
        std::vector<double> s;
        for (const auto& kv : model.predict(data.schema(), row).scores) s.push_back(kv.second);
        rep.push_back(s);
        labels.push_back(*row.label);
    }
    return eta(raw, labels, k) - eta(rep, labels, k);
}

inline double gini(const std::vector<std::string>& labels)
{
    std::map<std::string, double> c;
    for (const auto& l : labels) c[l] += 1;
    double s = 0;
    for (const auto& kv : c) s += (kv.second / labels.size()) * (kv.second / labels.size());
    return 1 - s;
}

}  // namespace oracle

}  // namespace support
