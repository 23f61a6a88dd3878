#include "eksaii/knowledge.hpp"

#include "eksaii/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace eksaii::knowledge {

using rules::Expr;
using rules::ExtractorDecl;
using rules::RuleSet;

std::string_view semantics_name(Semantics s) noexcept
{
    return s == Semantics::Goedel ? "goedel" : "product";
}

std::string_view score_mode_name(ScoreMode m) noexcept
{
    return m == ScoreMode::WeightedSum ? "weighted_sum" : "fuzzy";
}

Semantics parse_semantics(std::string_view text)
{
    if (text == "goedel") return Semantics::Goedel;
    if (text == "product") return Semantics::Product;
    throw Error(Errc::InvalidConfig, "unknown semantics '" + std::string(text) + "' (goedel|product)");
}

ScoreMode parse_score_mode(std::string_view text)
{
    if (text == "weighted_sum") return ScoreMode::WeightedSum;
    if (text == "fuzzy") return ScoreMode::Fuzzy;
    throw Error(Errc::InvalidConfig, "unknown scoring mode '" + std::string(text) + "' (weighted_sum|fuzzy)");
}

SatisfactionVector::SatisfactionVector(std::vector<std::pair<std::string, double>> entries)
    : entries_(std::move(entries))
{
}

const double* SatisfactionVector::find(std::string_view proposition) const
{
    for (const auto& [name, value] : entries_)
        if (name == proposition) return &value;
    return nullptr;
}

double SatisfactionVector::at(std::string_view proposition) const
{
    if (const double* v = find(proposition)) return *v;
    throw Error(Errc::UnknownAtom, "no satisfaction for proposition '" + std::string(proposition) + "'");
}

double extract_satisfaction(const ExtractorDecl& decl, const FeatureSchema& schema, std::span<const double> features)
{
    auto it = std::find(schema.begin(), schema.end(), decl.feature);
    if (it == schema.end() || static_cast<std::size_t>(it - schema.begin()) >= features.size())
        throw Error(Errc::MissingFeature, "missing feature column '" + decl.feature + "' for proposition '" +
                                              decl.proposition + "'");
    const double x = features[static_cast<std::size_t>(it - schema.begin())];
    if (decl.kind == ExtractorDecl::Kind::Threshold) {
        bool holds = false;
        switch (decl.op) {
        case rules::CompareOp::Less: holds = x < decl.value; break;
        case rules::CompareOp::LessEqual: holds = x <= decl.value; break;
        case rules::CompareOp::Greater: holds = x > decl.value; break;
        case rules::CompareOp::GreaterEqual: holds = x >= decl.value; break;
        }
        return holds ? 1.0 : 0.0;
    }
    const double z = decl.direction * (x - decl.center) / decl.scale;
    return 1.0 / (1.0 + std::exp(-z));
}

SatisfactionVector satisfactions(const RuleSet& rules, const FeatureSchema& schema, std::span<const double> features)
{
    std::vector<std::pair<std::string, double>> out;
    out.reserve(rules.extractors.size());
    for (const auto& d : rules.extractors) out.emplace_back(d.proposition, extract_satisfaction(d, schema, features));
    return SatisfactionVector(std::move(out));
}

double eval_expr(const Expr& expr, const SatisfactionVector& sat, Semantics semantics)
{
    switch (expr.kind()) {
    case Expr::Kind::Atom: return sat.at(expr.name());
    case Expr::Kind::Not: return 1.0 - eval_expr(expr.operand(), sat, semantics);
    case Expr::Kind::And: {
        const double a = eval_expr(expr.lhs(), sat, semantics);
        const double b = eval_expr(expr.rhs(), sat, semantics);
        return semantics == Semantics::Goedel ? std::min(a, b) : a * b;
    }
    case Expr::Kind::Or: {
        const double a = eval_expr(expr.lhs(), sat, semantics);
        const double b = eval_expr(expr.rhs(), sat, semantics);
        return semantics == Semantics::Goedel ? std::max(a, b) : a + b - a * b;
    }
    }
    return 0.0;
}

ClassScore class_score(const RuleSet& rules, std::string_view label, const SatisfactionVector& sat, ScoreMode mode,
                       Semantics semantics)
{
    const auto* rule = rules.rule(label);
    if (!rule) throw Error(Errc::UnknownLabel, "no rule for class '" + std::string(label) + "'");
    const auto props = rules::atoms(*rule->rule);

    ClassScore out;
    out.label = std::string(label);
    out.mode = mode;
    out.contributions.reserve(props.size());
    if (mode == ScoreMode::Fuzzy) {
        const double w = 1.0 / static_cast<double>(props.size());
        for (const auto& p : props) {
            const double s = sat.at(p);
            out.contributions.push_back({p, w, s, w * s});
        }
        out.score = eval_expr(*rule->rule, sat, semantics);
        return out;
    }
    auto wit = rules.weights.find(out.label);
    if (wit == rules.weights.end())
        throw Error(Errc::WeightsNotFitted, "weights not fitted for class '" + out.label + "'");
    for (const auto& p : props) {
        auto w = wit->second.find(p);
        if (w == wit->second.end())
            throw Error(Errc::WeightsNotFitted, "no weight for '" + p + "' in class '" + out.label + "'");
        const double s = sat.at(p);
        out.contributions.push_back({p, w->second, s, w->second * s});
        out.score += w->second * s;
    }
    return out;
}

std::vector<double> project_to_simplex(std::span<const double> v)
{
    std::vector<double> u(v.begin(), v.end());
    std::sort(u.begin(), u.end(), std::greater<>());
    double cumulative = 0.0;
    double theta = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j) {
        cumulative += u[j];
        const double t = (cumulative - 1.0) / static_cast<double>(j + 1);
        if (u[j] - t > 0) theta = t;
    }
    std::vector<double> w(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) w[i] = std::max(v[i] - theta, 0.0);
    return w;
}

RuleSet fit_weights(RuleSet rules, const Dataset& data, std::span<const std::string> classes, WeightFitOptions options)
{
    if (data.empty()) throw Error(Errc::EmptyDataset, "cannot fit rule weights on an empty dataset");
    if (!data.fully_labeled()) throw Error(Errc::UnlabeledData, "weight fitting needs labeled instances");

    std::vector<std::string> targets(classes.begin(), classes.end());
    if (targets.empty()) targets = rules.class_labels();

    // Satisfactions are shared by all classes; compute once.
    std::vector<SatisfactionVector> sats;
    sats.reserve(data.size());
    for (const auto& row : data) sats.push_back(satisfactions(rules, data.schema(), row.features));

    const double n = static_cast<double>(data.size());
    for (const auto& label : targets) {
        const auto props = rules.class_propositions(label);
        if (props.empty()) throw Error(Errc::UnknownLabel, "no rule for class '" + label + "'");
        const std::size_t dim = props.size();

        std::vector<double> s(data.size() * dim);
        std::vector<double> target(data.size());
        for (std::size_t i = 0; i < data.size(); ++i) {
            for (std::size_t j = 0; j < dim; ++j) s[i * dim + j] = sats[i].at(props[j]);
            target[i] = data[i].label == label ? 1.0 : 0.0;
        }

        std::vector<double> w(dim, 1.0 / static_cast<double>(dim));
        if (dim > 1) {
            std::vector<double> grad(dim);
            for (int it = 0; it < options.iterations; ++it) {
                std::fill(grad.begin(), grad.end(), 0.0);
                for (std::size_t i = 0; i < data.size(); ++i) {
                    const double* row = &s[i * dim];
                    const double residual = std::inner_product(w.begin(), w.end(), row, 0.0) - target[i];
                    for (std::size_t j = 0; j < dim; ++j) grad[j] += residual * row[j];
                }
                for (std::size_t j = 0; j < dim; ++j) w[j] -= options.step * 2.0 * grad[j] / n;
                w = project_to_simplex(w);
            }
        }
        auto& out = rules.weights[label];
        out.clear();
        for (std::size_t j = 0; j < dim; ++j) out[props[j]] = w[j];
    }
    return rules;
}

RulePrediction normalize_scores(std::vector<ClassScore> class_scores)
{
    std::sort(class_scores.begin(), class_scores.end(),
              [](const ClassScore& a, const ClassScore& b) { return a.label < b.label; });
    RulePrediction out;
    double total = 0.0;
    std::size_t best = 0;
    for (std::size_t i = 0; i < class_scores.size(); ++i) {
        total += class_scores[i].score;
        if (class_scores[i].score > class_scores[best].score) best = i;  // strict: earliest label wins ties
    }
    const double k = static_cast<double>(class_scores.size());
    for (const auto& cs : class_scores)
        out.scores.emplace_back(cs.label, total > 0 ? cs.score / total : 1.0 / k);
    if (!class_scores.empty()) {
        out.label = class_scores[best].label;
        out.confidence = out.scores[best].second;
    }
    out.class_scores = std::move(class_scores);
    return out;
}

RulePrediction rule_classifier_predict(const RuleSet& rules, const FeatureSchema& schema,
                                       std::span<const double> features, ScoreMode mode, Semantics semantics)
{
    const auto sat = satisfactions(rules, schema, features);
    std::vector<ClassScore> scores;
    for (const auto& r : rules.rules) scores.push_back(class_score(rules, r.label, sat, mode, semantics));
    return normalize_scores(std::move(scores));
}

}  // namespace eksaii::knowledge
