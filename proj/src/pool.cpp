#include "eksaii/pool.hpp"

#include "eksaii/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

namespace eksaii::pool {

std::string_view kind_name(Kind kind) noexcept
{
    switch (kind) {
    case Kind::Rule: return "rule";
    case Kind::Knn: return "knn";
    case Kind::Logistic: return "logistic";
    case Kind::External: return "external";
    }
    return "?";
}

Kind parse_kind(std::string_view text)
{
    for (Kind k : {Kind::Rule, Kind::Knn, Kind::Logistic, Kind::External})
        if (kind_name(k) == text) return k;
    throw Error(Errc::InvalidConfig, "unknown classifier kind '" + std::string(text) + "'");
}

bool ClassifierSpec::one_vs_rest() const
{
    return has_label(kRest);
}

bool ClassifierSpec::has_label(std::string_view label) const
{
    return std::binary_search(label_set.begin(), label_set.end(), label, std::less<>());
}

std::string ClassifierSpec::group_of(std::string_view label) const
{
    if (label != kRest && has_label(label)) return std::string(label);
    if (one_vs_rest()) return std::string(kRest);
    throw Error(Errc::UnknownLabel, "label '" + std::string(label) + "' is outside the label set of '" + id + "'");
}

ClassifierSpec normalized(ClassifierSpec spec)
{
    std::sort(spec.label_set.begin(), spec.label_set.end());
    spec.label_set.erase(std::unique(spec.label_set.begin(), spec.label_set.end()), spec.label_set.end());
    if (spec.id.empty()) throw Error(Errc::InvalidConfig, "classifier id must be non-empty");
    if (spec.label_set.size() < 2)
        throw Error(Errc::InvalidConfig, "classifier '" + spec.id + "' needs a label set of at least 2 entries");
    switch (spec.kind) {
    case Kind::Knn:
        if (spec.k < 1) throw Error(Errc::InvalidConfig, "knn '" + spec.id + "': k must be >= 1");
        break;
    case Kind::Logistic:
        if (spec.iterations < 0 || !(spec.step > 0))
            throw Error(Errc::InvalidConfig, "logistic '" + spec.id + "': iterations >= 0 and step > 0 required");
        break;
    case Kind::Rule:
        if (!spec.rules) throw Error(Errc::InvalidConfig, "rule classifier '" + spec.id + "' has no rule set");
        for (const auto& l : spec.label_set)
            if (l != kRest && !spec.rules->rule(l))
                throw Error(Errc::InvalidConfig, "rule classifier '" + spec.id + "' has no rule for '" + l + "'");
        break;
    case Kind::External:
        if (spec.score_file.empty())
            throw Error(Errc::InvalidConfig, "external classifier '" + spec.id + "' has no score file");
        break;
    }
    return spec;
}

Json to_json(const ClassifierSpec& spec)
{
    Json j{{"id", spec.id}, {"kind", kind_name(spec.kind)}, {"label_set", spec.label_set}};
    switch (spec.kind) {
    case Kind::Knn: j["k"] = spec.k; break;
    case Kind::Logistic:
        j["iterations"] = spec.iterations;
        j["step"] = spec.step;
        j["seed"] = spec.seed;
        break;
    case Kind::Rule:
        j["rules_text"] = rules::format_ruleset(*spec.rules);
        j["mode"] = knowledge::score_mode_name(spec.mode);
        j["semantics"] = knowledge::semantics_name(spec.semantics);
        break;
    case Kind::External: j["score_file"] = spec.score_file; break;
    }
    return j;
}

ClassifierSpec spec_from_json(const Json& doc)
{
    ClassifierSpec s;
    s.id = doc.at("id").get<std::string>();
    s.kind = parse_kind(doc.at("kind").get<std::string>());
    s.label_set = doc.at("label_set").get<std::vector<std::string>>();
    switch (s.kind) {
    case Kind::Knn: s.k = doc.at("k").get<int>(); break;
    case Kind::Logistic:
        s.iterations = doc.at("iterations").get<int>();
        s.step = doc.at("step").get<double>();
        s.seed = doc.at("seed").get<std::uint64_t>();
        break;
    case Kind::Rule:
        s.rules = std::make_shared<const rules::RuleSet>(rules::parse_ruleset(doc.at("rules_text").get<std::string>()));
        s.mode = knowledge::parse_score_mode(doc.at("mode").get<std::string>());
        s.semantics = knowledge::parse_semantics(doc.at("semantics").get<std::string>());
        break;
    case Kind::External: s.score_file = doc.at("score_file").get<std::string>(); break;
    }
    return normalized(std::move(s));
}

double Prediction::score(std::string_view label) const
{
    for (const auto& [l, v] : scores)
        if (l == label) return v;
    return 0.0;
}

Prediction make_prediction(std::vector<std::pair<std::string, double>> raw)
{
    std::sort(raw.begin(), raw.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    double total = 0.0;
    for (auto& [l, v] : raw) {
        v = std::max(v, 0.0);
        total += v;
    }
    const double k = static_cast<double>(raw.size());
    for (auto& [l, v] : raw) v = total > 0 ? v / total : 1.0 / k;
    Prediction p;
    std::size_t best = 0;
    for (std::size_t i = 1; i < raw.size(); ++i)
        if (raw[i].second > raw[best].second) best = i;
    if (!raw.empty()) {
        p.label = raw[best].first;
        p.confidence = raw[best].second;
    }
    p.scores = std::move(raw);
    return p;
}

// ---------------------------------------------------------------------------
// Models

namespace {

std::vector<std::pair<std::string, double>> zero_scores(const std::vector<std::string>& labels)
{
    std::vector<std::pair<std::string, double>> out;
    out.reserve(labels.size());
    for (const auto& l : labels) out.emplace_back(l, 0.0);
    return out;
}

class KnnModel final : public Model {
public:
    KnnModel(std::vector<std::string> labels, int k, std::vector<std::string> ids, std::vector<std::vector<double>> points,
             std::vector<std::string> groups)
        : labels_(std::move(labels)), k_(k), ids_(std::move(ids)), points_(std::move(points)), groups_(std::move(groups))
    {
    }

    Prediction predict(const Instance& inst) const override
    {
        const std::size_t q = std::min<std::size_t>(static_cast<std::size_t>(k_), points_.size());
        std::vector<std::pair<double, std::size_t>> dist;
        dist.reserve(points_.size());
        for (std::size_t i = 0; i < points_.size(); ++i) {
            double d = 0.0;
            for (std::size_t c = 0; c < inst.features.size(); ++c) {
                const double diff = inst.features[c] - points_[i][c];
                d += diff * diff;
            }
            dist.emplace_back(d, i);
        }
        // Pairs compare by (distance, training index): stable neighbour choice.
        std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(q), dist.end());
        auto scores = zero_scores(labels_);
        for (std::size_t j = 0; j < q; ++j) {
            const auto& g = groups_[dist[j].second];
            for (auto& [l, v] : scores)
                if (l == g) v += 1.0;
        }
        return make_prediction(std::move(scores));
    }

    Json state() const override
    {
        Json rows = Json::array();
        for (std::size_t i = 0; i < ids_.size(); ++i) rows.push_back(Json{ids_[i], groups_[i], points_[i]});
        return Json{{"rows", std::move(rows)}};
    }

    static std::shared_ptr<const Model> from_state(const ClassifierSpec& spec, const Json& state)
    {
        std::vector<std::string> ids, groups;
        std::vector<std::vector<double>> points;
        for (const auto& row : state.at("rows")) {
            ids.push_back(row.at(0).get<std::string>());
            groups.push_back(row.at(1).get<std::string>());
            points.push_back(row.at(2).get<std::vector<double>>());
        }
        return std::make_shared<KnnModel>(spec.label_set, spec.k, std::move(ids), std::move(points), std::move(groups));
    }

private:
    std::vector<std::string> labels_;
    int k_;
    std::vector<std::string> ids_;
    std::vector<std::vector<double>> points_;
    std::vector<std::string> groups_;
};

// Multinomial logistic regression on standardized features.
class LogisticModel final : public Model {
public:
    LogisticModel(std::vector<std::string> labels, std::vector<double> mean, std::vector<double> scale,
                  std::vector<std::vector<double>> weights)
        : labels_(std::move(labels)), mean_(std::move(mean)), scale_(std::move(scale)), weights_(std::move(weights))
    {
    }

    static std::vector<double> softmax(const std::vector<std::vector<double>>& w, std::span<const double> z)
    {
        std::vector<double> logits(w.size());
        for (std::size_t c = 0; c < w.size(); ++c) {
            double a = w[c].back();  // bias
            for (std::size_t f = 0; f < z.size(); ++f) a += w[c][f] * z[f];
            logits[c] = a;
        }
        const double top = *std::max_element(logits.begin(), logits.end());
        double total = 0.0;
        for (double& l : logits) {
            l = std::exp(l - top);
            total += l;
        }
        for (double& l : logits) l /= total;
        return logits;
    }

    std::vector<double> standardize(std::span<const double> x) const
    {
        std::vector<double> z(x.size());
        for (std::size_t f = 0; f < x.size(); ++f) z[f] = (x[f] - mean_[f]) / scale_[f];
        return z;
    }

    Prediction predict(const Instance& inst) const override
    {
        const auto p = softmax(weights_, standardize(inst.features));
        std::vector<std::pair<std::string, double>> scores;
        for (std::size_t c = 0; c < labels_.size(); ++c) scores.emplace_back(labels_[c], p[c]);
        return make_prediction(std::move(scores));
    }

    Json state() const override { return Json{{"mean", mean_}, {"scale", scale_}, {"weights", weights_}}; }

    static std::shared_ptr<const Model> from_state(const ClassifierSpec& spec, const Json& state)
    {
        return std::make_shared<LogisticModel>(spec.label_set, state.at("mean").get<std::vector<double>>(),
                                               state.at("scale").get<std::vector<double>>(),
                                               state.at("weights").get<std::vector<std::vector<double>>>());
    }

    static std::shared_ptr<const Model> fit(const ClassifierSpec& spec, const Dataset& data)
    {
        const std::size_t n = data.size(), d = data.dimension(), classes = spec.label_set.size();
        std::vector<double> mean(d, 0.0), scale(d, 0.0);
        for (const auto& row : data)
            for (std::size_t f = 0; f < d; ++f) mean[f] += row.features[f];
        for (auto& m : mean) m /= static_cast<double>(n);
        for (const auto& row : data)
            for (std::size_t f = 0; f < d; ++f) scale[f] += (row.features[f] - mean[f]) * (row.features[f] - mean[f]);
        for (auto& s : scale) {
            s = std::sqrt(s / static_cast<double>(n));
            if (!(s > 1e-12)) s = 1.0;
        }
        LogisticModel proto(spec.label_set, mean, scale, {});
        std::vector<std::vector<double>> z;
        std::vector<std::size_t> y;
        z.reserve(n);
        for (const auto& row : data) {
            z.push_back(proto.standardize(row.features));
            const auto g = spec.group_of(*row.label);
            y.push_back(static_cast<std::size_t>(
                std::lower_bound(spec.label_set.begin(), spec.label_set.end(), g) - spec.label_set.begin()));
        }
        // Full-batch gradient descent from zero weights; deterministic.
        std::vector<std::vector<double>> w(classes, std::vector<double>(d + 1, 0.0));
        std::vector<std::vector<double>> grad(classes, std::vector<double>(d + 1, 0.0));
        for (int it = 0; it < spec.iterations; ++it) {
            for (auto& g : grad) std::fill(g.begin(), g.end(), 0.0);
            for (std::size_t i = 0; i < n; ++i) {
                const auto p = softmax(w, z[i]);
                for (std::size_t c = 0; c < classes; ++c) {
                    const double r = p[c] - (y[i] == c ? 1.0 : 0.0);
                    for (std::size_t f = 0; f < d; ++f) grad[c][f] += r * z[i][f];
                    grad[c][d] += r;
                }
            }
            for (std::size_t c = 0; c < classes; ++c)
                for (std::size_t f = 0; f <= d; ++f) w[c][f] -= spec.step * grad[c][f] / static_cast<double>(n);
        }
        return std::make_shared<LogisticModel>(spec.label_set, std::move(mean), std::move(scale), std::move(w));
    }

private:
    std::vector<std::string> labels_;
    std::vector<double> mean_;
    std::vector<double> scale_;
    std::vector<std::vector<double>> weights_;
};

class RuleModel final : public Model {
public:
    RuleModel(ClassifierSpec spec, FeatureSchema schema, rules::RuleSet fitted)
        : spec_(std::move(spec)), schema_(std::move(schema)), rules_(std::move(fitted))
    {
    }

    std::optional<knowledge::RulePrediction> knowledge(const FeatureSchema& schema, const Instance& inst) const override
    {
        const auto sat = knowledge::satisfactions(rules_, schema, inst.features);
        std::vector<knowledge::ClassScore> scores;
        for (const auto& l : spec_.label_set)
            if (l != kRest) scores.push_back(knowledge::class_score(rules_, l, sat, spec_.mode, spec_.semantics));
        return knowledge::normalize_scores(std::move(scores));
    }

    Prediction predict(const Instance& inst) const override
    {
        const auto k = *knowledge(schema_, inst);
        std::vector<std::pair<std::string, double>> raw;
        double top = 0.0;
        for (const auto& cs : k.class_scores) {
            raw.emplace_back(cs.label, cs.score);
            top = std::max(top, cs.score);
        }
        if (spec_.one_vs_rest()) raw.emplace_back(std::string(kRest), std::max(0.0, 1.0 - top));
        return make_prediction(std::move(raw));
    }

    Json state() const override { return Json{{"weights", rules_.weights}}; }

    static std::shared_ptr<const Model> from_state(const ClassifierSpec& spec, const FeatureSchema& schema,
                                                   const Json& state)
    {
        rules::RuleSet rs = *spec.rules;
        rs.weights = state.at("weights").get<std::map<std::string, std::map<std::string, double>>>();
        rules::validate(rs);
        return std::make_shared<RuleModel>(spec, schema, std::move(rs));
    }

private:
    ClassifierSpec spec_;
    FeatureSchema schema_;
    rules::RuleSet rules_;
};

class ExternalModel final : public Model {
public:
    ExternalModel(std::vector<std::string> labels, std::shared_ptr<const ScoreTable> table)
        : labels_(std::move(labels)), table_(std::move(table))
    {
    }

    Prediction predict(const Instance& inst) const override
    {
        auto it = table_->rows.find(inst.id);
        if (it == table_->rows.end())
            throw Error(Errc::UnknownInstance, "no external scores for instance '" + inst.id + "'");
        std::vector<std::pair<std::string, double>> raw;
        for (std::size_t c = 0; c < table_->labels.size(); ++c) raw.emplace_back(table_->labels[c], it->second[c]);
        return make_prediction(std::move(raw));
    }

    Json state() const override { return Json::object(); }

private:
    std::vector<std::string> labels_;
    std::shared_ptr<const ScoreTable> table_;
};

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& file)
{
    std::filesystem::path p(file);
    return p.is_relative() && !base.empty() ? base / p : p;
}

std::shared_ptr<const ScoreTable> external_table(const ClassifierSpec& spec, const std::filesystem::path& base)
{
    auto table = std::make_shared<ScoreTable>(load_score_table(resolve(base, spec.score_file)));
    std::vector<std::string> header = table->labels;
    std::sort(header.begin(), header.end());
    if (header != spec.label_set)
        throw Error(Errc::LabelSetMismatch, "score file columns of '" + spec.id + "' differ from its label set");
    return table;
}

}  // namespace

// ---------------------------------------------------------------------------

TrainedClassifier::TrainedClassifier(ClassifierSpec spec, FeatureSchema schema, std::string fingerprint,
                                     std::shared_ptr<const Model> model)
    : spec_(std::move(spec)), schema_(std::move(schema)), fingerprint_(std::move(fingerprint)), model_(std::move(model))
{
}

void TrainedClassifier::check(const FeatureSchema& schema) const
{
    if (!model_) throw Error(Errc::UntrainedClassifier, "classifier is not trained");
    if (schema != schema_)
        throw Error(Errc::SchemaMismatch, "instance schema differs from the training schema of '" + spec_.id + "'");
}

Prediction TrainedClassifier::predict(const FeatureSchema& schema, const Instance& inst) const
{
    check(schema);
    return model_->predict(inst);
}

std::optional<knowledge::RulePrediction> TrainedClassifier::knowledge(const FeatureSchema& schema,
                                                                      const Instance& inst) const
{
    check(schema);
    return model_->knowledge(schema, inst);
}

Json TrainedClassifier::to_json() const
{
    if (!model_) throw Error(Errc::UntrainedClassifier, "cannot serialize an untrained classifier");
    return Json{{"spec", pool::to_json(spec_)},
                {"schema", schema_},
                {"fingerprint", fingerprint_},
                {"state", model_->state()}};
}

TrainedClassifier TrainedClassifier::from_json(const Json& doc, const std::filesystem::path& base_dir)
{
    auto spec = spec_from_json(doc.at("spec"));
    auto schema = doc.at("schema").get<FeatureSchema>();
    const auto& state = doc.at("state");
    std::shared_ptr<const Model> model;
    switch (spec.kind) {
    case Kind::Knn: model = KnnModel::from_state(spec, state); break;
    case Kind::Logistic: model = LogisticModel::from_state(spec, state); break;
    case Kind::Rule: model = RuleModel::from_state(spec, schema, state); break;
    case Kind::External: model = std::make_shared<ExternalModel>(spec.label_set, external_table(spec, base_dir)); break;
    }
    auto fp = doc.at("fingerprint").get<std::string>();
    return TrainedClassifier(std::move(spec), std::move(schema), std::move(fp), std::move(model));
}

std::string fingerprint(const ClassifierSpec& spec, const Dataset& partition)
{
    std::uint64_t h = fnv1a64(canonical_dump(to_json(spec)));
    for (const auto& name : partition.schema()) h = fnv1a64(name + '\x1f', h);
    for (const auto& row : partition) {
        std::string line = row.id + '\x1f' + row.label.value_or("") + '\x1f';
        for (double v : row.features) line += format_real(v) + '\x1f';
        h = fnv1a64(line + '\x1e', h);
    }
    return hex64(h);
}

TrainedClassifier train(const ClassifierSpec& raw_spec, const Dataset& partition, const std::filesystem::path& base_dir)
{
    auto spec = normalized(raw_spec);
    if (partition.empty()) throw Error(Errc::EmptyPartition, "cannot train '" + spec.id + "' on an empty partition");
    if (!partition.fully_labeled()) throw Error(Errc::UnlabeledData, "training partition has unlabeled rows");

    std::shared_ptr<const Model> model;
    switch (spec.kind) {
    case Kind::Knn: {
        std::vector<std::string> ids, groups;
        std::vector<std::vector<double>> points;
        for (const auto& row : partition) {
            ids.push_back(row.id);
            groups.push_back(spec.group_of(*row.label));
            points.push_back(row.features);
        }
        model = std::make_shared<KnnModel>(spec.label_set, spec.k, std::move(ids), std::move(points), std::move(groups));
        break;
    }
    case Kind::Logistic: model = LogisticModel::fit(spec, partition); break;
    case Kind::Rule: {
        for (const auto& row : partition) spec.group_of(*row.label);  // label closure
        std::vector<std::string> classes;
        for (const auto& l : spec.label_set)
            if (l != kRest) classes.push_back(l);
        auto fitted = knowledge::fit_weights(*spec.rules, partition, classes);
        model = std::make_shared<RuleModel>(spec, partition.schema(), std::move(fitted));
        break;
    }
    case Kind::External: {
        auto table = external_table(spec, base_dir);
        std::vector<std::string> missing;
        for (const auto& row : partition)
            if (!table->rows.count(row.id)) missing.push_back(row.id);
        if (!missing.empty()) {
            std::string list;
            for (std::size_t i = 0; i < missing.size() && i < 10; ++i) list += (i ? ", " : "") + missing[i];
            if (missing.size() > 10) list += ", ...";
            throw Error(Errc::ExternalScoreMissing, "score file of '" + spec.id + "' lacks " +
                                                        std::to_string(missing.size()) + " id(s): " + list);
        }
        model = std::make_shared<ExternalModel>(spec.label_set, std::move(table));
        break;
    }
    }
    auto fp = fingerprint(spec, partition);
    return TrainedClassifier(std::move(spec), partition.schema(), std::move(fp), std::move(model));
}

std::map<std::string, Dataset> partition_by_prediction(const TrainedClassifier& model, const Dataset& data)
{
    std::map<std::string, Dataset> out;
    for (const auto& row : data) {
        const auto p = model.predict(data.schema(), row);
        auto it = out.try_emplace(p.label, data.schema()).first;
        it->second.add(row);
    }
    return out;
}

double mean_confidence(const TrainedClassifier& model, const Dataset& data)
{
    if (data.empty()) return 0.0;
    double total = 0.0;
    for (const auto& row : data) total += model.predict(data.schema(), row).confidence;
    return total / static_cast<double>(data.size());
}

void Pool::add(ClassifierSpec spec)
{
    if (find(spec.id)) throw Error(Errc::DuplicateId, "classifier id '" + spec.id + "' already registered");
    specs_.push_back(normalized(std::move(spec)));
}

const ClassifierSpec* Pool::find(std::string_view id) const
{
    for (const auto& s : specs_)
        if (s.id == id) return &s;
    return nullptr;
}

ScoreTable load_score_table(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::IoError, "cannot open score file '" + path.string() + "'");
    auto records = read_csv(in);
    if (records.empty() || records[0].size() < 3 || records[0][0] != "id")
        throw ParseError({1, 1}, "header 'id,<label1>,<label2>,...'", "'" + path.string() + "'");
    ScoreTable t;
    t.labels.assign(records[0].begin() + 1, records[0].end());
    std::set<std::string> unique(t.labels.begin(), t.labels.end());
    if (unique.size() != t.labels.size()) throw ParseError({1, 2}, "distinct label columns", "duplicates");
    for (std::size_t r = 1; r < records.size(); ++r) {
        const auto& rec = records[r];
        const int row = static_cast<int>(r) + 1;
        if (rec.size() != records[0].size())
            throw ParseError({row, 1}, std::to_string(records[0].size()) + " fields", std::to_string(rec.size()));
        std::vector<double> scores;
        for (std::size_t c = 1; c < rec.size(); ++c) {
            auto v = parse_real(rec[c]);
            if (!v || *v < 0) throw ParseError({row, static_cast<int>(c) + 1}, "a non-negative score", "'" + rec[c] + "'");
            scores.push_back(*v);
        }
        if (!t.rows.emplace(rec[0], std::move(scores)).second)
            throw Error(Errc::DuplicateId, "duplicate id '" + rec[0] + "' in score file at row " + std::to_string(row));
    }
    return t;
}

void save_score_table(const std::filesystem::path& path, const ScoreTable& table)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(Errc::IoError, "cannot write '" + path.string() + "'");
    out << "id";
    for (const auto& l : table.labels) out << ',' << csv_escape(l);
    out << '\n';
    for (const auto& [id, scores] : table.rows) {
        out << csv_escape(id);
        for (double v : scores) out << ',' << format_real(v);
        out << '\n';
    }
}

Pool pool_from_json(const Json& doc, const std::filesystem::path& base_dir,
                    const std::vector<std::string>& default_labels)
{
    Pool pool;
    pool.base_dir = base_dir;
    for (const auto& c : doc.at("classifiers")) {
        ClassifierSpec s;
        s.id = c.at("id").get<std::string>();
        s.kind = parse_kind(c.at("kind").get<std::string>());
        if (c.contains("label_set")) s.label_set = c.at("label_set").get<std::vector<std::string>>();
        switch (s.kind) {
        case Kind::Knn: s.k = c.value("k", 5); break;
        case Kind::Logistic:
            s.iterations = c.value("iterations", 500);
            s.step = c.value("step", 0.1);
            s.seed = c.value("seed", std::uint64_t{0});
            break;
        case Kind::Rule: {
            const auto file = resolve(base_dir, c.at("rules").get<std::string>());
            std::ifstream in(file, std::ios::binary);
            if (!in) throw Error(Errc::IoError, "cannot open rule file '" + file.string() + "'");
            std::stringstream text;
            text << in.rdbuf();
            s.rules = std::make_shared<const rules::RuleSet>(rules::parse_ruleset(text.str()));
            s.mode = knowledge::parse_score_mode(c.value("mode", std::string("weighted_sum")));
            s.semantics = knowledge::parse_semantics(c.value("semantics", std::string("goedel")));
            break;
        }
        case Kind::External:
            // Stored absolute so exported trees can reload it from anywhere.
            s.score_file = std::filesystem::absolute(resolve(base_dir, c.at("scores").get<std::string>()))
                               .lexically_normal()
                               .string();
            if (s.label_set.empty()) {
                // Registration stays lazy: an unreadable file fails at train time.
                try {
                    s.label_set = load_score_table(resolve(base_dir, s.score_file)).labels;
                } catch (const Error&) {
                    s.label_set = default_labels;
                }
            }
            break;
        }
        if (s.label_set.empty()) s.label_set = default_labels;
        pool.add(std::move(s));
    }
    return pool;
}

Pool load_pool(const std::filesystem::path& path, const std::vector<std::string>& default_labels)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::IoError, "cannot open pool config '" + path.string() + "'");
    Json doc;
    try {
        doc = Json::parse(in);
    } catch (const Json::exception& e) {
        throw Error(Errc::InvalidConfig, "pool config '" + path.string() + "': " + e.what());
    }
    return pool_from_json(doc, path.parent_path(), default_labels);
}

}  // namespace eksaii::pool
