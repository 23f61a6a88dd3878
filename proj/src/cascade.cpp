#include "eksaii/cascade.hpp"

#include "eksaii/errors.hpp"
#include "eksaii/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace eksaii::cascade {

void validate(const CascadeConfig& c)
{
    if (c.rare_class.empty()) throw Error(Errc::InvalidConfig, "rare class must be named");
    if (!(c.tau_m >= 0)) throw Error(Errc::InvalidConfig, "tau_m must be >= 0");
    if (!(c.tau_g >= 0 && c.tau_g < 1)) throw Error(Errc::InvalidConfig, "tau_g must lie in [0, 1)");
    if (!(c.d_th >= 0 && c.d_th <= 1)) throw Error(Errc::InvalidConfig, "d_th must lie in [0, 1]");
    if (c.k < 1) throw Error(Errc::InvalidConfig, "K must be >= 1");
    if (c.max_depth < 1) throw Error(Errc::InvalidConfig, "max_depth must be >= 1");
    if (!std::isfinite(c.eps_stop)) throw Error(Errc::InvalidConfig, "eps_stop must be finite");
    if (c.min_samples && *c.min_samples < 1) throw Error(Errc::InvalidConfig, "min_samples must be >= 1");
}

namespace {

std::string majority_label(const Dataset& data)
{
    std::map<std::string, std::size_t> counts;
    for (const auto& row : data) ++counts[*row.label];
    std::string best;
    std::size_t best_count = 0;
    for (const auto& [label, n] : counts)  // map order: ties keep the smaller label
        if (n > best_count) {
            best = label;
            best_count = n;
        }
    return best;
}

std::vector<std::string> labels_of(const Dataset& data)
{
    std::vector<std::string> out;
    out.reserve(data.size());
    for (const auto& row : data) out.push_back(*row.label);
    return out;
}

struct Grown {
    std::shared_ptr<Node> node;
    std::map<std::string, Dataset> partitions;
};

Grown make_node(const pool::TrainedClassifier& model, const Dataset& sample, std::string id, int depth,
                imbalance::EIGReport report)
{
    Grown g;
    g.node = std::make_shared<Node>();
    g.node->id = std::move(id);
    g.node->depth = depth;
    g.node->model = model;
    g.node->eig = std::move(report);
    g.partitions = pool::partition_by_prediction(model, sample);
    const auto fallback = majority_label(sample);
    for (const auto& entry : model.spec().label_set) {
        Child child;
        auto it = g.partitions.find(entry);
        if (it != g.partitions.end()) {
            child.leaf = majority_label(it->second);
            const auto labels = labels_of(it->second);
            g.node->gini[entry] = imbalance::gini(labels);
        } else {
            child.leaf = entry == pool::kRest ? fallback : entry;
        }
        g.node->children.emplace(entry, std::move(child));
    }
    return g;
}

const Child& route(const Node& node, const pool::Prediction& p)
{
    auto it = node.children.find(p.label);
    if (it == node.children.end())
        throw std::logic_error("cascade node '" + node.id + "' has no child for label '" + p.label + "'");
    return it->second;
}

std::string infer_label(const Node& root, const FeatureSchema& schema, const Instance& inst)
{
    const Node* node = &root;
    while (true) {
        const auto& child = route(*node, node->model.predict(schema, inst));
        if (child.is_leaf()) return child.leaf;
        node = child.node.get();
    }
}

double validation_f1(const Node& root, const Dataset& val, const std::vector<std::string>& classes)
{
    std::vector<std::string> truth, pred;
    truth.reserve(val.size());
    pred.reserve(val.size());
    for (const auto& row : val) {
        truth.push_back(*row.label);
        pred.push_back(infer_label(root, val.schema(), row));
    }
    return metrics::macro_f1(truth, pred, classes);
}

std::string child_id(const std::string& parent, const std::string& group)
{
    return parent + "/" + group;
}

void check_inputs(const pool::Pool& pool, const Dataset& train, const Dataset& val, const CascadeConfig& config)
{
    validate(config);
    if (pool.empty()) throw Error(Errc::PoolEmpty, "classifier pool is empty");
    if (train.empty()) throw Error(Errc::EmptyDataset, "training set is empty");
    if (!train.fully_labeled() || !val.fully_labeled())
        throw Error(Errc::UnlabeledData, "training and validation sets must be labeled");
    if (train.schema() != val.schema()) throw Error(Errc::SchemaMismatch, "training and validation schemas differ");
    const auto present = train.labels();
    if (!std::binary_search(present.begin(), present.end(), config.rare_class))
        throw Error(Errc::RareClassAbsent, "rare class '" + config.rare_class + "' is absent from the training set");
}

std::vector<std::string> class_universe(const Dataset& train, const Dataset& val)
{
    std::set<std::string> all;
    for (const auto& l : train.labels()) all.insert(l);
    for (const auto& l : val.labels()) all.insert(l);
    return {all.begin(), all.end()};
}

std::vector<pool::TrainedClassifier> train_all(const pool::Pool& pool, const Dataset& sample)
{
    std::vector<pool::TrainedClassifier> out;
    out.reserve(pool.size());
    for (const auto& spec : pool.specs()) out.push_back(pool::train(spec, sample, pool.base_dir));
    return out;
}

// Decides what follows an accepted node; fills the rare-partition fields.
void plan_next(LogEntry& e, const Node& node, const std::map<std::string, Dataset>& partitions,
               const CascadeConfig& config)
{
    const auto& spec = node.model.spec();
    e.rare_explicit = spec.has_label(config.rare_class) && config.rare_class != pool::kRest;
    e.rare_group = spec.group_of(config.rare_class);
    auto it = partitions.find(e.rare_group);
    e.rare_size = it == partitions.end() ? 0 : it->second.size();
    if (it != partitions.end()) e.rare_gini = node.gini.at(e.rare_group);
    if (e.rare_size == 0) {
        e.action = "stop_rare_empty";
    } else if (e.rare_explicit && !(*e.rare_gini > config.tau_g)) {
        e.action = "stop_gini";
    } else if (node.depth + 1 > config.max_depth) {
        e.action = "stop_max_depth";
    } else if (e.rare_size < static_cast<std::size_t>(config.effective_min_samples())) {
        e.action = "stop_min_samples";
    } else {
        e.action = e.rare_explicit ? "cascade" : "descend";
    }
}

}  // namespace

CascadeTree build_cascade(const pool::Pool& pool, const Dataset& train, const Dataset& val,
                          const CascadeConfig& config, const BuildOptions& options)
{
    check_inputs(pool, train, val, config);
    CascadeTree tree;
    tree.config = config;
    tree.config.min_samples = config.effective_min_samples();
    tree.schema = train.schema();
    tree.classes = class_universe(train, val);
    tree.pool = train_all(pool, train);

    const auto eig_of = [&](const pool::TrainedClassifier& m, const Dataset& sample, int k, int depth,
                            const imbalance::ImbalanceDetail& raw) {
        if (options.eig) return options.eig(m, sample, k, depth);
        return imbalance::eig(m, sample, k, raw);
    };

    std::shared_ptr<Node> root;
    Child* slot = nullptr;  // leaf being replaced; null for the root
    Dataset sample = train;
    double previous_f1 = 0.0;
    std::string parent_id;
    for (int depth = 1;; ++depth) {
        LogEntry e;
        e.step = depth - 1;
        e.depth = depth;
        e.node_id = slot ? child_id(parent_id, tree.log.back().rare_group) : "n0";
        e.sample_size = sample.size();

        auto models = depth == 1 ? tree.pool : train_all(pool, sample);
        const auto raw = options.eig ? imbalance::ImbalanceDetail{}
                                     : imbalance::entropy_imbalance_detail(imbalance::raw_view(sample), config.k);
        for (const auto& m : models) {
            e.candidates.push_back(eig_of(m, sample, config.k, depth, raw));
            e.candidates.back().classifier_id = m.spec().id;
            e.fingerprints.push_back(m.fingerprint());
        }

        // Registration order breaks exact EIG ties.
        std::size_t best = 0;
        for (std::size_t i = 1; i < models.size(); ++i)
            if (e.candidates[i].eig > e.candidates[best].eig) best = i;
        std::optional<std::size_t> runner;
        for (std::size_t i = 0; i < models.size(); ++i)
            if (i != best && (!runner || e.candidates[i].eig > e.candidates[*runner].eig)) runner = i;
        e.best = models[best].spec().id;
        std::size_t chosen = best;
        if (runner) {
            e.runner_up = models[*runner].spec().id;
            e.tie = e.candidates[best].eig - e.candidates[*runner].eig <= config.tau_m;
        }
        if (e.tie) {
            const double cb = pool::mean_confidence(models[best], sample);
            const double cr = pool::mean_confidence(models[*runner], sample);
            e.tie_confidence[e.best] = cb;
            e.tie_confidence[*e.runner_up] = cr;
            const bool best_ok = cb > config.d_th, runner_ok = cr > config.d_th;
            if (best_ok != runner_ok) {
                chosen = best_ok ? best : *runner;
                e.tie_resolution = "dependability";
            } else {
                e.tie_resolution = best_ok ? "both_dependable_higher_eig" : "none_dependable_higher_eig";
            }
        }
        e.selected = models[chosen].spec().id;

        auto grown = make_node(models[chosen], sample, e.node_id, depth, e.candidates[chosen]);
        std::string displaced;
        if (slot) {
            displaced = slot->leaf;
            slot->node = grown.node;
        } else {
            root = grown.node;
        }
        e.validation_macro_f1 = validation_f1(*root, val, tree.classes);

        if (slot && e.validation_macro_f1 - previous_f1 < config.eps_stop) {
            slot->node.reset();
            slot->leaf = displaced;
            e.accepted = false;
            e.action = "stop_no_validation_gain";
            tree.log.push_back(std::move(e));
            break;
        }
        previous_f1 = e.validation_macro_f1;
        plan_next(e, *grown.node, grown.partitions, config);
        if (!slot && !(e.candidates[best].eig > 0)) e.action = "no_progress";

        const bool grow = e.action == "cascade" || e.action == "descend";
        const auto group = e.rare_group;
        tree.log.push_back(std::move(e));
        if (!grow) break;
        parent_id = grown.node->id;
        slot = &grown.node->children.at(group);
        sample = std::move(grown.partitions.at(group));
    }
    tree.root = root;
    return tree;
}

CascadeTree replay_cascade(const pool::Pool& pool, const Dataset& train, const Dataset& val,
                           const CascadeConfig& config, const std::vector<LogEntry>& log)
{
    check_inputs(pool, train, val, config);
    if (log.empty()) throw Error(Errc::InvalidConfig, "cannot replay an empty build log");
    CascadeTree tree;
    tree.config = config;
    tree.config.min_samples = config.effective_min_samples();
    tree.schema = train.schema();
    tree.classes = class_universe(train, val);
    tree.pool = train_all(pool, train);
    tree.log = log;

    std::shared_ptr<Node> root;
    Child* slot = nullptr;
    Dataset sample = train;
    for (const auto& e : log) {
        auto models = e.depth == 1 ? tree.pool : train_all(pool, sample);
        if (models.size() != e.fingerprints.size())
            throw Error(Errc::FingerprintMismatch, "pool size differs from the build log at " + e.node_id);
        const pool::TrainedClassifier* chosen = nullptr;
        const imbalance::EIGReport* report = nullptr;
        for (std::size_t i = 0; i < models.size(); ++i) {
            if (models[i].fingerprint() != e.fingerprints[i])
                throw Error(Errc::FingerprintMismatch,
                            "classifier '" + models[i].spec().id + "' diverges from the build log at " + e.node_id);
            if (models[i].spec().id == e.selected) {
                chosen = &models[i];
                report = &e.candidates.at(i);
            }
        }
        if (!chosen) throw Error(Errc::FingerprintMismatch, "logged selection '" + e.selected + "' not in pool");
        if (!e.accepted) break;
        auto grown = make_node(*chosen, sample, e.node_id, e.depth, *report);
        if (slot) slot->node = grown.node;
        else root = grown.node;
        if (e.action != "cascade" && e.action != "descend") break;
        auto part = grown.partitions.find(e.rare_group);
        if (part == grown.partitions.end() || part->second.size() != e.rare_size)
            throw Error(Errc::FingerprintMismatch, "rare partition diverges from the build log at " + e.node_id);
        slot = &grown.node->children.at(e.rare_group);
        sample = std::move(part->second);
    }
    tree.root = root;
    return tree;
}

Inference infer(const CascadeTree& tree, const FeatureSchema& schema, const Instance& inst)
{
    if (schema != tree.schema) throw Error(Errc::SchemaMismatch, "instance schema differs from the tree schema");
    Inference out;
    const Node* node = tree.root.get();
    while (node) {
        auto p = node->model.predict(schema, inst);
        const auto& child = route(*node, p);
        out.path.push_back({node->id, node->model.spec().id, std::move(p)});
        if (child.is_leaf()) {
            out.label = child.leaf;
            break;
        }
        node = child.node.get();
    }
    return out;
}

std::optional<std::string> replay_path(const CascadeTree& tree, const std::vector<PathStep>& path)
{
    const Node* node = tree.root.get();
    for (std::size_t i = 0; i < path.size(); ++i) {
        if (!node || node->id != path[i].node_id) return std::nullopt;
        auto it = node->children.find(path[i].prediction.label);
        if (it == node->children.end()) return std::nullopt;
        if (it->second.is_leaf()) return i + 1 == path.size() ? std::optional(it->second.leaf) : std::nullopt;
        node = it->second.node.get();
    }
    return std::nullopt;
}

namespace {

int depth_of(const Node& n)
{
    int deepest = 0;
    for (const auto& [g, c] : n.children)
        if (!c.is_leaf()) deepest = std::max(deepest, depth_of(*c.node));
    return 1 + deepest;
}

std::size_t count_of(const Node& n)
{
    std::size_t total = 1;
    for (const auto& [g, c] : n.children)
        if (!c.is_leaf()) total += count_of(*c.node);
    return total;
}

}  // namespace

int depth(const CascadeTree& tree)
{
    return tree.root ? depth_of(*tree.root) : 0;
}

std::size_t node_count(const CascadeTree& tree)
{
    return tree.root ? count_of(*tree.root) : 0;
}

// ---------------------------------------------------------------------------
// Fusion

ScoreVector fuse(const ScoreVector& symbolic, const ScoreVector& neural, const FusionConfig& config)
{
    if (symbolic.size() != neural.size())
        throw Error(Errc::LabelSetMismatch, "fusion inputs cover different label sets");
    for (std::size_t i = 0; i < symbolic.size(); ++i)
        if (symbolic[i].first != neural[i].first)
            throw Error(Errc::LabelSetMismatch, "fusion inputs cover different label sets");
    double alpha = 0.5;
    if (config.mode == FusionConfig::Mode::Weighted) {
        if (!config.alpha) throw Error(Errc::InvalidConfig, "weighted fusion needs alpha");
        alpha = *config.alpha;
        if (!(alpha >= 0 && alpha <= 1)) throw Error(Errc::InvalidConfig, "fusion alpha must lie in [0, 1]");
    }
    ScoreVector out(symbolic.size());
    double total = 0.0;
    for (std::size_t i = 0; i < symbolic.size(); ++i) {
        const double v = config.mode == FusionConfig::Mode::Unweighted
                             ? (symbolic[i].second + neural[i].second) / 2.0
                             : alpha * neural[i].second + (1.0 - alpha) * symbolic[i].second;
        out[i] = {symbolic[i].first, v};
        total += v;
    }
    // Normalized inputs give a normalized mix up to rounding; leave those bits alone.
    if (total > 0 && std::abs(total - 1.0) > 1e-12)
        for (auto& [l, v] : out) v /= total;
    return out;
}

std::string argmax_label(const ScoreVector& scores)
{
    std::size_t best = 0;
    for (std::size_t i = 1; i < scores.size(); ++i)
        if (scores[i].second > scores[best].second) best = i;
    return scores.empty() ? std::string() : scores[best].first;
}

double learn_alpha(const std::vector<ScoreVector>& symbolic, const std::vector<ScoreVector>& neural,
                   const std::vector<std::string>& truth)
{
    if (symbolic.size() != neural.size() || symbolic.size() != truth.size())
        throw Error(Errc::InvalidConfig, "alpha search inputs differ in length");
    double best_alpha = 0.0;
    double best_f1 = -1.0;
    std::vector<std::string> pred(truth.size());
    for (int step = 0; step <= 20; ++step) {
        const double alpha = step / 20.0;
        const FusionConfig cfg{FusionConfig::Mode::Weighted, alpha};
        for (std::size_t i = 0; i < truth.size(); ++i) pred[i] = argmax_label(fuse(symbolic[i], neural[i], cfg));
        const double f1 = metrics::macro_f1(truth, pred);
        if (f1 > best_f1) {
            best_f1 = f1;
            best_alpha = alpha;
        }
    }
    return best_alpha;
}

// ---------------------------------------------------------------------------
// Serialization

Json to_json(const CascadeConfig& c)
{
    return Json{{"rare_class", c.rare_class}, {"tau_m", c.tau_m},
                {"tau_g", c.tau_g},           {"d_th", c.d_th},
                {"k", c.k},                   {"max_depth", c.max_depth},
                {"eps_stop", c.eps_stop},     {"min_samples", c.effective_min_samples()},
                {"seed", c.seed}};
}

CascadeConfig config_from_json(const Json& d)
{
    CascadeConfig c;
    c.rare_class = d.at("rare_class").get<std::string>();
    c.tau_m = d.at("tau_m").get<double>();
    c.tau_g = d.at("tau_g").get<double>();
    c.d_th = d.at("d_th").get<double>();
    c.k = d.at("k").get<int>();
    c.max_depth = d.at("max_depth").get<int>();
    c.eps_stop = d.at("eps_stop").get<double>();
    c.min_samples = d.at("min_samples").get<int>();
    c.seed = d.at("seed").get<std::uint64_t>();
    validate(c);
    return c;
}

Json to_json(const LogEntry& e)
{
    Json candidates = Json::array();
    for (std::size_t i = 0; i < e.candidates.size(); ++i) {
        auto j = imbalance::to_json(e.candidates[i]);
        j["fingerprint"] = e.fingerprints.at(i);
        candidates.push_back(std::move(j));
    }
    return Json{{"step", e.step},
                {"node", e.node_id},
                {"depth", e.depth},
                {"sample_size", e.sample_size},
                {"candidates", std::move(candidates)},
                {"best", e.best},
                {"runner_up", e.runner_up ? Json(*e.runner_up) : Json()},
                {"tie", e.tie},
                {"tie_confidence", e.tie_confidence},
                {"tie_resolution", e.tie_resolution},
                {"selected", e.selected},
                {"rare_group", e.rare_group},
                {"rare_explicit", e.rare_explicit},
                {"rare_gini", e.rare_gini ? Json(*e.rare_gini) : Json()},
                {"rare_size", e.rare_size},
                {"validation_macro_f1", e.validation_macro_f1},
                {"accepted", e.accepted},
                {"action", e.action}};
}

LogEntry log_entry_from_json(const Json& d)
{
    LogEntry e;
    e.step = d.at("step").get<int>();
    e.node_id = d.at("node").get<std::string>();
    e.depth = d.at("depth").get<int>();
    e.sample_size = d.at("sample_size").get<std::size_t>();
    for (const auto& c : d.at("candidates")) {
        e.candidates.push_back(imbalance::eig_report_from_json(c));
        e.fingerprints.push_back(c.at("fingerprint").get<std::string>());
    }
    e.best = d.at("best").get<std::string>();
    if (!d.at("runner_up").is_null()) e.runner_up = d.at("runner_up").get<std::string>();
    e.tie = d.at("tie").get<bool>();
    e.tie_confidence = d.at("tie_confidence").get<std::map<std::string, double>>();
    e.tie_resolution = d.at("tie_resolution").get<std::string>();
    e.selected = d.at("selected").get<std::string>();
    e.rare_group = d.at("rare_group").get<std::string>();
    e.rare_explicit = d.at("rare_explicit").get<bool>();
    if (!d.at("rare_gini").is_null()) e.rare_gini = d.at("rare_gini").get<double>();
    e.rare_size = d.at("rare_size").get<std::size_t>();
    e.validation_macro_f1 = d.at("validation_macro_f1").get<double>();
    e.accepted = d.at("accepted").get<bool>();
    e.action = d.at("action").get<std::string>();
    return e;
}

namespace {

std::string model_key(const pool::TrainedClassifier& m)
{
    return m.spec().id + "@" + m.fingerprint();
}

Json node_to_json(const Node& n, Json& models)
{
    const auto key = model_key(n.model);
    if (!models.contains(key)) models[key] = n.model.to_json();
    Json children = Json::object();
    for (const auto& [group, c] : n.children)
        children[group] = c.is_leaf() ? Json{{"leaf", c.leaf}} : Json{{"node", node_to_json(*c.node, models)}};
    return Json{{"id", n.id},
                {"depth", n.depth},
                {"classifier", key},
                {"eig", imbalance::to_json(n.eig)},
                {"gini", n.gini},
                {"children", std::move(children)}};
}

std::shared_ptr<Node> node_from_json(const Json& d, const std::map<std::string, pool::TrainedClassifier>& models)
{
    auto n = std::make_shared<Node>();
    n->id = d.at("id").get<std::string>();
    n->depth = d.at("depth").get<int>();
    const auto key = d.at("classifier").get<std::string>();
    auto it = models.find(key);
    if (it == models.end()) throw Error(Errc::InvalidConfig, "tree node '" + n->id + "' references unknown model");
    n->model = it->second;
    n->eig = imbalance::eig_report_from_json(d.at("eig"));
    n->gini = d.at("gini").get<std::map<std::string, double>>();
    for (const auto& [group, c] : d.at("children").items()) {
        Child child;
        if (c.contains("leaf")) child.leaf = c.at("leaf").get<std::string>();
        else child.node = node_from_json(c.at("node"), models);
        n->children.emplace(group, std::move(child));
    }
    std::set<std::string> keys;
    for (const auto& [g, c] : n->children) keys.insert(g);
    const auto& ls = n->model.spec().label_set;
    if (keys != std::set<std::string>(ls.begin(), ls.end()))
        throw Error(Errc::InvalidConfig, "tree node '" + n->id + "' children do not match its label set");
    return n;
}

}  // namespace

PoolSnapshot snapshot(const std::vector<pool::TrainedClassifier>& members)
{
    PoolSnapshot out;
    for (const auto& m : members) out.emplace_back(m.spec().id, m.fingerprint());
    return out;
}

PoolSnapshot snapshot(const CascadeTree& tree)
{
    return snapshot(tree.pool);
}

Json export_tree(const CascadeTree& tree)
{
    if (!tree.root) throw Error(Errc::InvalidConfig, "cannot export an empty tree");
    Json models = Json::object();
    Json pool = Json::array();
    for (const auto& m : tree.pool) {
        const auto key = model_key(m);
        models[key] = m.to_json();
        pool.push_back(Json{{"id", m.spec().id}, {"fingerprint", m.fingerprint()}, {"model", key}});
    }
    Json root = node_to_json(*tree.root, models);
    Json log = Json::array();
    for (const auto& e : tree.log) log.push_back(to_json(e));
    return Json{{"format", "eksaii-tree"},
                {"version", kTreeFormatVersion},
                {"config", to_json(tree.config)},
                {"schema", tree.schema},
                {"classes", tree.classes},
                {"pool", std::move(pool)},
                {"models", std::move(models)},
                {"root", std::move(root)},
                {"build_log", std::move(log)}};
}

std::string export_tree_text(const CascadeTree& tree)
{
    return canonical_dump(export_tree(tree)) + "\n";
}

CascadeTree import_tree(const Json& doc, const std::filesystem::path& base_dir, const PoolSnapshot* expected)
{
    if (!doc.is_object() || doc.value("format", std::string()) != "eksaii-tree")
        throw Error(Errc::VersionMismatch, "not an eksaii tree document");
    const auto version = doc.at("version").get<int>();
    if (version != kTreeFormatVersion)
        throw Error(Errc::VersionMismatch, "tree format version " + std::to_string(version) + ", expected " +
                                               std::to_string(kTreeFormatVersion));
    CascadeTree tree;
    tree.config = config_from_json(doc.at("config"));
    tree.schema = doc.at("schema").get<FeatureSchema>();
    tree.classes = doc.at("classes").get<std::vector<std::string>>();

    std::map<std::string, pool::TrainedClassifier> models;
    for (const auto& [key, m] : doc.at("models").items()) {
        auto model = pool::TrainedClassifier::from_json(m, base_dir);
        if (key != model_key(model))
            throw Error(Errc::FingerprintMismatch, "model entry '" + key + "' does not match its fingerprint");
        models.emplace(key, std::move(model));
    }
    for (const auto& p : doc.at("pool")) {
        const auto key = p.at("model").get<std::string>();
        auto it = models.find(key);
        if (it == models.end() || it->second.spec().id != p.at("id").get<std::string>() ||
            it->second.fingerprint() != p.at("fingerprint").get<std::string>())
            throw Error(Errc::FingerprintMismatch, "pool entry '" + key + "' is inconsistent with its model");
        tree.pool.push_back(it->second);
    }
    if (expected && snapshot(tree) != *expected)
        throw Error(Errc::FingerprintMismatch, "tree was built against a different classifier pool");
    tree.root = node_from_json(doc.at("root"), models);
    for (const auto& e : doc.at("build_log")) tree.log.push_back(log_entry_from_json(e));
    return tree;
}

}  // namespace eksaii::cascade
