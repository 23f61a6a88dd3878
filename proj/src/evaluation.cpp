#include "eksaii/evaluation.hpp"

#include "eksaii/errors.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace eksaii::evaluation {

using cascade::FusionConfig;
using cascade::ScoreVector;

namespace {

ScoreVector external_vector(const pool::ScoreTable& table, const std::vector<std::string>& classes,
                            const std::string& id)
{
    auto row = table.rows.find(id);
    if (row == table.rows.end()) throw Error(Errc::UnknownInstance, "external scores have no row for '" + id + "'");
    ScoreVector out;
    double total = 0.0;
    for (const auto& c : classes) {
        auto col = std::find(table.labels.begin(), table.labels.end(), c) - table.labels.begin();
        const double v = std::max(0.0, row->second[static_cast<std::size_t>(col)]);
        out.emplace_back(c, v);
        total += v;
    }
    for (auto& [l, v] : out) v = total > 0 ? v / total : 1.0 / static_cast<double>(out.size());
    return out;
}

Json prediction_json(const pool::Prediction& p)
{
    Json scores = Json::object();
    for (const auto& [l, v] : p.scores) scores[l] = v;
    return Json{{"label", p.label}, {"confidence", p.confidence}, {"scores", std::move(scores)}};
}

Json vector_json(const ScoreVector& v)
{
    Json out = Json::object();
    for (const auto& [l, s] : v) out[l] = s;
    return out;
}

std::vector<std::string> truth_of(const Dataset& data)
{
    if (!data.fully_labeled()) throw Error(Errc::UnlabeledData, "evaluation data contains unlabeled rows");
    std::vector<std::string> truth;
    truth.reserve(data.size());
    for (const auto& row : data) truth.push_back(*row.label);
    return truth;
}

metrics::MetricsReport report(const Dataset& data, const std::vector<std::string>& truth,
                              const std::vector<std::string>& pred, std::vector<std::string> classes,
                              std::optional<std::string> rare)
{
    for (const auto& l : truth) classes.push_back(l);
    std::sort(classes.begin(), classes.end());
    classes.erase(std::unique(classes.begin(), classes.end()), classes.end());

    metrics::MetricsReport out;
    out.overall = metrics::summarize(truth, pred, classes, rare);
    std::set<std::string> domains;
    for (const auto& row : data) domains.insert(row.domain);
    if (domains.size() > 1) {
        for (const auto& d : domains) {
            std::vector<std::string> t, p;
            for (std::size_t i = 0; i < data.size(); ++i)
                if (data[i].domain == d) {
                    t.push_back(truth[i]);
                    p.push_back(pred[i]);
                }
            out.per_domain[d] = metrics::summarize(t, p, classes, rare);
        }
    }
    return out;
}

}  // namespace

ScoreVector class_vector(const pool::Prediction& prediction, const std::vector<std::string>& classes)
{
    std::vector<std::string> implicit;
    for (const auto& c : classes)
        if (std::none_of(prediction.scores.begin(), prediction.scores.end(),
                         [&](const auto& s) { return s.first == c; }))
            implicit.push_back(c);
    const double rest = prediction.score(pool::kRest);
    ScoreVector out;
    for (const auto& c : classes) {
        const bool spread = std::find(implicit.begin(), implicit.end(), c) != implicit.end();
        out.emplace_back(c, spread ? rest / static_cast<double>(implicit.size()) : prediction.score(c));
    }
    return out;
}

FusionStage make_fusion_stage(const cascade::CascadeTree& tree, const FusionConfig& config,
                              std::optional<pool::ScoreTable> external)
{
    FusionStage stage;
    stage.config = config;
    stage.classes = tree.classes;
    auto is_rule = [](const pool::TrainedClassifier& m) { return m.spec().kind == pool::Kind::Rule; };
    auto sym = std::find_if(tree.pool.begin(), tree.pool.end(), is_rule);
    if (sym == tree.pool.end()) throw Error(Errc::InvalidConfig, "fusion needs a rule classifier in the pool");
    stage.symbolic = *sym;
    if (external) {
        for (const auto& c : tree.classes)
            if (std::find(external->labels.begin(), external->labels.end(), c) == external->labels.end())
                throw Error(Errc::LabelSetMismatch, "external scores lack class '" + c + "'");
        stage.external = std::move(external);
    } else {
        auto neural = std::find_if(tree.pool.begin(), tree.pool.end(), [&](const auto& m) { return !is_rule(m); });
        if (neural == tree.pool.end())
            throw Error(Errc::InvalidConfig, "fusion needs external scores or a non-rule classifier in the pool");
        stage.neural = *neural;
    }
    return stage;
}

FusionTrace fuse_instance(const FusionStage& stage, const FeatureSchema& schema, const Instance& inst)
{
    FusionTrace t;
    t.config = stage.config;
    t.symbolic = class_vector(stage.symbolic.predict(schema, inst), stage.classes);
    t.neural = stage.external ? external_vector(*stage.external, stage.classes, inst.id)
                              : class_vector(stage.neural->predict(schema, inst), stage.classes);
    t.fused = cascade::fuse(t.symbolic, t.neural, stage.config);
    return t;
}

FusionStage with_learned_alpha(FusionStage stage, const Dataset& data)
{
    const auto truth = truth_of(data);
    std::vector<ScoreVector> sym, neu;
    FusionStage probe = stage;
    probe.config = FusionConfig{};
    for (const auto& row : data) {
        auto t = fuse_instance(probe, data.schema(), row);
        sym.push_back(std::move(t.symbolic));
        neu.push_back(std::move(t.neural));
    }
    stage.config = FusionConfig{FusionConfig::Mode::Weighted, cascade::learn_alpha(sym, neu, truth)};
    return stage;
}

Outcome predict(const cascade::CascadeTree& tree, const FeatureSchema& schema, const Instance& inst,
                const FusionStage* fusion)
{
    auto inf = cascade::infer(tree, schema, inst);
    Outcome out{std::move(inf.label), std::move(inf.path), std::nullopt};
    if (fusion) {
        out.fusion = fuse_instance(*fusion, schema, inst);
        out.label = cascade::argmax_label(out.fusion->fused);
    }
    return out;
}

metrics::MetricsReport evaluate(const cascade::CascadeTree& tree, const Dataset& data, const FusionStage* fusion)
{
    const auto truth = truth_of(data);
    std::vector<std::string> pred;
    pred.reserve(data.size());
    std::size_t review = 0;
    for (const auto& row : data) {
        auto o = predict(tree, data.schema(), row, fusion);
        const bool knowledge_node = std::any_of(o.path.begin(), o.path.end(), [&](const cascade::PathStep& s) {
            const auto* spec = &s.classifier_id;
            return std::any_of(tree.pool.begin(), tree.pool.end(), [&](const auto& m) {
                return m.spec().id == *spec && m.spec().kind == pool::Kind::Rule;
            });
        });
        if (knowledge_node) ++review;
        pred.push_back(std::move(o.label));
    }
    auto out = report(data, truth, pred, tree.classes, tree.config.rare_class);
    out.knowledge_review = review;
    return out;
}

metrics::MetricsReport evaluate(const pool::TrainedClassifier& model, const Dataset& data,
                                std::optional<std::string> rare)
{
    const auto truth = truth_of(data);
    std::vector<std::string> pred;
    pred.reserve(data.size());
    for (const auto& row : data) pred.push_back(model.predict(data.schema(), row).label);
    auto out = report(data, truth, pred, {}, rare);
    if (model.spec().kind == pool::Kind::Rule) out.knowledge_review = data.size();
    return out;
}

ExplanationRecord explain(const cascade::CascadeTree& tree, const FeatureSchema& schema, const Instance& inst,
                          const FusionStage* fusion)
{
    auto o = predict(tree, schema, inst, fusion);
    ExplanationRecord rec;
    rec.instance_id = inst.id;
    rec.y_final = o.label;
    rec.fusion = o.fusion;

    auto add_knowledge = [&](const std::string& node_id, const pool::TrainedClassifier& m) {
        auto k = m.knowledge(schema, inst);
        if (!k) return;
        rec.knowledge.push_back({node_id, m.spec().id, m.spec().mode, m.spec().semantics, std::move(*k)});
    };
    const cascade::Node* node = tree.root.get();
    for (const auto& step : o.path) {
        if (!node) break;
        add_knowledge(step.node_id, node->model);
        auto child = node->children.find(step.prediction.label);
        node = child == node->children.end() || child->second.is_leaf() ? nullptr : child->second.node.get();
    }
    if (fusion && fusion->symbolic.trained()) add_knowledge("fusion", fusion->symbolic);
    rec.path = std::move(o.path);
    return rec;
}

double ledger_residual(const ExplanationRecord& record)
{
    double worst = 0.0;
    for (const auto& node : record.knowledge) {
        if (node.mode != knowledge::ScoreMode::WeightedSum) continue;
        for (const auto& cs : node.result.class_scores) {
            double sum = 0.0;
            for (const auto& c : cs.contributions) sum += c.product;
            worst = std::max(worst, std::abs(sum - cs.score));
        }
    }
    return worst;
}

Json to_json(const FusionTrace& t)
{
    Json j{{"mode", t.config.mode == FusionConfig::Mode::Unweighted ? "unweighted" : "weighted"},
           {"symbolic", vector_json(t.symbolic)},
           {"neural", vector_json(t.neural)},
           {"fused", vector_json(t.fused)}};
    if (t.config.mode == FusionConfig::Mode::Weighted && t.config.alpha) j["alpha"] = *t.config.alpha;
    return j;
}

Json to_json(const ExplanationRecord& r)
{
    Json path = Json::array();
    for (const auto& s : r.path)
        path.push_back(Json{{"node", s.node_id}, {"classifier", s.classifier_id},
                            {"prediction", prediction_json(s.prediction)}});
    Json nodes = Json::array();
    for (const auto& n : r.knowledge) {
        Json classes = Json::object();
        for (const auto& cs : n.result.class_scores) {
            Json ledger = Json::array();
            for (const auto& c : cs.contributions)
                ledger.push_back(Json{{"proposition", c.proposition},
                                      {"weight", c.weight},
                                      {"satisfaction", c.satisfaction},
                                      {"contribution", c.product}});
            classes[cs.label] = Json{{"score", cs.score}, {"ledger", std::move(ledger)}};
        }
        nodes.push_back(Json{{"node", n.node_id},
                             {"classifier", n.classifier_id},
                             {"mode", knowledge::score_mode_name(n.mode)},
                             {"semantics", knowledge::semantics_name(n.semantics)},
                             {"label", n.result.label},
                             {"confidence", n.result.confidence},
                             {"class_scores", std::move(classes)}});
    }
    Json j{{"id", r.instance_id}, {"y_final", r.y_final}, {"path", std::move(path)}, {"knowledge", std::move(nodes)}};
    if (r.fusion) j["fusion"] = to_json(*r.fusion);
    return j;
}

}  // namespace eksaii::evaluation
