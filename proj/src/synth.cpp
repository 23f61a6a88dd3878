#include "eksaii/synth.hpp"

#include "eksaii/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <set>

namespace eksaii::synth {

namespace {

rules::CompareOp parse_op(const std::string& op)
{
    if (op == "<") return rules::CompareOp::Less;
    if (op == "<=") return rules::CompareOp::LessEqual;
    if (op == ">") return rules::CompareOp::Greater;
    if (op == ">=") return rules::CompareOp::GreaterEqual;
    throw Error(Errc::InvalidConfig, "unknown comparison '" + op + "'");
}

[[noreturn]] void invalid(const std::string& what)
{
    throw Error(Errc::InvalidConfig, "synth config: " + what);
}

}  // namespace

SynthConfig config_from_json(const Json& d)
{
    SynthConfig c;
    try {
        c.seed = d.value("seed", std::uint64_t{0});
        c.features = d.at("features").get<std::vector<std::string>>();
        for (const auto& cls : d.at("classes")) {
            ClassSpec s;
            s.label = cls.at("label").get<std::string>();
            s.prior = cls.at("prior").get<double>();
            for (const auto& comp : cls.at("components")) {
                Component k;
                k.weight = comp.value("weight", 1.0);
                k.mean = comp.at("mean").get<std::vector<double>>();
                k.stddev = comp.at("std").get<std::vector<double>>();
                s.components.push_back(std::move(k));
            }
            c.classes.push_back(std::move(s));
        }
        if (d.contains("rare")) {
            const auto& r = d.at("rare");
            c.rare_label = r.at("label").get<std::string>();
            for (const auto& cond : r.value("rule", Json::array()))
                c.rare_rule.push_back({cond.at("feature").get<std::string>(), parse_op(cond.at("op").get<std::string>()),
                                       cond.at("value").get<double>()});
        }
        c.exclusive_rule = d.value("exclusive_rule", false);
        const auto& sizes = d.at("sizes");
        c.train = sizes.value("train", std::size_t{0});
        c.val = sizes.value("val", std::size_t{0});
        c.test = sizes.value("test", std::size_t{0});
        c.stratified = d.value("stratified", true);
        c.max_attempts = d.value("max_attempts", 100000);
        for (const auto& dom : d.value("domains", Json::array({Json{{"name", "source"}}}))) {
            DomainSpec s;
            s.name = dom.at("name").get<std::string>();
            if (dom.contains("a")) s.a = dom.at("a").get<std::vector<double>>();
            if (dom.contains("b")) s.b = dom.at("b").get<std::vector<double>>();
            if (dom.contains("random_shift")) {
                const auto& rs = dom.at("random_shift");
                s.random_shift = true;
                s.a_low = rs.at("a").at(0).get<double>();
                s.a_high = rs.at("a").at(1).get<double>();
                s.b_low = rs.at("b").at(0).get<double>();
                s.b_high = rs.at("b").at(1).get<double>();
            }
            c.domains.push_back(std::move(s));
        }
    } catch (const Json::exception& e) {
        invalid(e.what());
    }
    validate(c);
    return c;
}

SynthConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::IoError, "cannot open synth config '" + path.string() + "'");
    try {
        return config_from_json(Json::parse(in));
    } catch (const Json::parse_error& e) {
        invalid(e.what());
    }
}

void validate(const SynthConfig& c)
{
    const auto dim = c.features.size();
    if (dim == 0) invalid("no features");
    if (std::set<std::string>(c.features.begin(), c.features.end()).size() != dim) invalid("duplicate feature names");
    if (c.classes.size() < 2) invalid("at least two classes required");
    double total = 0;
    std::set<std::string> labels;
    for (const auto& cls : c.classes) {
        if (!labels.insert(cls.label).second) invalid("duplicate class '" + cls.label + "'");
        if (!(cls.prior >= 0)) invalid("negative prior for '" + cls.label + "'");
        total += cls.prior;
        if (cls.components.empty()) invalid("class '" + cls.label + "' has no mixture components");
        for (const auto& k : cls.components) {
            if (k.mean.size() != dim || k.stddev.size() != dim) invalid("component dimension mismatch");
            if (!(k.weight > 0)) invalid("component weights must be > 0");
            for (double s : k.stddev)
                if (!(s >= 0)) invalid("standard deviations must be >= 0");
        }
    }
    if (std::abs(total - 1.0) > 1e-9) invalid("class priors must sum to 1");
    if (!c.rare_label.empty() && !labels.count(c.rare_label)) invalid("rare label is not a class");
    for (const auto& cond : c.rare_rule)
        if (std::find(c.features.begin(), c.features.end(), cond.feature) == c.features.end())
            invalid("rule feature '" + cond.feature + "' is not declared");
    if (c.domains.empty()) invalid("at least one domain required");
    std::set<std::string> names;
    for (const auto& d : c.domains) {
        if (!names.insert(d.name).second) invalid("duplicate domain '" + d.name + "'");
        if (!d.a.empty() && d.a.size() != dim) invalid("shift 'a' dimension mismatch in '" + d.name + "'");
        if (!d.b.empty() && d.b.size() != dim) invalid("shift 'b' dimension mismatch in '" + d.name + "'");
        for (double a : d.a)
            if (a == 0) invalid("shift scale a must be non-zero");
        if (d.random_shift && (d.a_low > d.a_high || d.b_low > d.b_high || (d.a_low <= 0 && d.a_high >= 0)))
            invalid("random shift ranges must be ordered and exclude a = 0");
    }
    if (c.max_attempts < 1) invalid("max_attempts must be >= 1");
}

bool satisfies(const std::vector<Condition>& rule, const FeatureSchema& schema, std::span<const double> x)
{
    for (const auto& cond : rule) {
        const auto col = static_cast<std::size_t>(std::find(schema.begin(), schema.end(), cond.feature) - schema.begin());
        const double v = x[col];
        bool ok = false;
        switch (cond.op) {
        case rules::CompareOp::Less: ok = v < cond.value; break;
        case rules::CompareOp::LessEqual: ok = v <= cond.value; break;
        case rules::CompareOp::Greater: ok = v > cond.value; break;
        case rules::CompareOp::GreaterEqual: ok = v >= cond.value; break;
        }
        if (!ok) return false;
    }
    return true;
}

std::vector<std::size_t> stratified_counts(const std::vector<double>& priors, std::size_t n)
{
    std::vector<std::size_t> counts(priors.size());
    std::vector<std::pair<double, std::size_t>> remainders;
    std::size_t assigned = 0;
    for (std::size_t i = 0; i < priors.size(); ++i) {
        const double exact = priors[i] * static_cast<double>(n);
        counts[i] = static_cast<std::size_t>(std::floor(exact + 1e-9));
        assigned += counts[i];
        remainders.emplace_back(exact - static_cast<double>(counts[i]), i);
    }
    // Largest remainder first; lower class index wins ties.
    std::stable_sort(remainders.begin(), remainders.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t j = 0; assigned < n && j < remainders.size(); ++j, ++assigned) ++counts[remainders[j].second];
    return counts;
}

Splits generate(const SynthConfig& config)
{
    validate(config);
    const auto dim = config.features.size();
    std::mt19937_64 rng(config.seed);
    std::normal_distribution<double> normal(0.0, 1.0);

    std::vector<double> priors;
    for (const auto& c : config.classes) priors.push_back(c.prior);
    std::vector<std::discrete_distribution<std::size_t>> component_pick;
    for (const auto& c : config.classes) {
        std::vector<double> w;
        for (const auto& k : c.components) w.push_back(k.weight);
        component_pick.emplace_back(w.begin(), w.end());
    }

    Splits out{Dataset(config.features), Dataset(config.features), Dataset(config.features), {}};
    auto draw = [&](std::size_t cls) {
        const auto& spec = config.classes[cls];
        const bool rare = spec.label == config.rare_label;
        for (int attempt = 0; attempt < config.max_attempts; ++attempt) {
            const auto& k = spec.components[component_pick[cls](rng)];
            std::vector<double> x(dim);
            for (std::size_t f = 0; f < dim; ++f) x[f] = k.mean[f] + k.stddev[f] * normal(rng);
            if (config.rare_rule.empty()) return x;
            const bool holds = satisfies(config.rare_rule, config.features, x);
            if (rare ? holds : (!config.exclusive_rule || !holds)) return x;
        }
        throw Error(Errc::InvalidConfig, "synth config: class '" + spec.label + "' cannot meet the rare rule constraint");
    };

    for (const auto& dom : config.domains) {
        Shift shift{dom.name, dom.a, dom.b};
        if (dom.random_shift) {
            std::uniform_real_distribution<double> ua(dom.a_low, dom.a_high), ub(dom.b_low, dom.b_high);
            shift.a.assign(dim, 1.0);
            shift.b.assign(dim, 0.0);
            for (std::size_t f = 0; f < dim; ++f) {
                shift.a[f] = ua(rng);
                shift.b[f] = ub(rng);
            }
        }
        if (shift.a.empty()) shift.a.assign(dim, 1.0);
        if (shift.b.empty()) shift.b.assign(dim, 0.0);

        const std::pair<const char*, std::size_t> splits[] = {
            {"train", config.train}, {"val", config.val}, {"test", config.test}};
        for (const auto& [split, n] : splits) {
            std::vector<std::size_t> classes;
            classes.reserve(n);
            if (config.stratified) {
                const auto counts = stratified_counts(priors, n);
                for (std::size_t c = 0; c < counts.size(); ++c) classes.insert(classes.end(), counts[c], c);
                std::shuffle(classes.begin(), classes.end(), rng);
            } else {
                std::discrete_distribution<std::size_t> pick(priors.begin(), priors.end());
                for (std::size_t i = 0; i < n; ++i) classes.push_back(pick(rng));
            }
            Dataset& target = split[0] == 't' && split[1] == 'r' ? out.train : split[0] == 'v' ? out.val : out.test;
            for (std::size_t i = 0; i < n; ++i) {
                auto x = draw(classes[i]);
                for (std::size_t f = 0; f < dim; ++f) x[f] = shift.a[f] * x[f] + shift.b[f];
                Instance inst;
                inst.id = dom.name + "-" + split + "-" + std::to_string(i);
                inst.domain = dom.name;
                inst.label = config.classes[classes[i]].label;
                inst.features = std::move(x);
                target.add(std::move(inst));
            }
        }
        out.shifts.push_back(std::move(shift));
    }
    return out;
}

}  // namespace eksaii::synth
