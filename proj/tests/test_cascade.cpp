#include "support.hpp"

#include "eksaii/cascade.hpp"
#include "eksaii/errors.hpp"

#include <doctest.h>

using namespace eksaii;
using namespace eksaii::cascade;

namespace {

const std::vector<std::string> kLabels{"A", "B", "R"};

// 15 A, 9 B, 6 R on a line.
Dataset toy()
{
    std::vector<std::vector<double>> pts;
    std::vector<std::string> labels;
    for (int i = 0; i < 30; ++i) {
        pts.push_back({static_cast<double>(i)});
        labels.push_back(i < 15 ? "A" : i < 24 ? "B" : "R");
    }
    return support::make_dataset(pts, labels);
}

support::ScoreFn perfect()
{
    return [](const Instance& i) { return support::one_hot(kLabels, *i.label); };
}

// Predicts R for every R and the first four B instances.
support::ScoreFn leaky()
{
    return [](const Instance& i) {
        const double x = i.features[0];
        return support::one_hot(kLabels, x >= 15 && x < 19 ? "R" : *i.label);
    };
}

// Low-confidence but correct.
support::ScoreFn timid()
{
    return [](const Instance& i) {
        auto s = support::one_hot(kLabels, *i.label);
        for (auto& v : s) v = v > 0 ? 0.4 : 0.3;
        return s;
    };
}

BuildOptions fixed_eig(std::map<std::string, double> values)
{
    BuildOptions o;
    o.eig = [values](const pool::TrainedClassifier& m, const Dataset&, int, int) {
        imbalance::EIGReport r;
        r.classifier_id = m.spec().id;
        r.eig = values.at(m.spec().id);
        return r;
    };
    return o;
}

CascadeConfig base_config()
{
    CascadeConfig c;
    c.rare_class = "R";
    c.min_samples = 2;
    c.eps_stop = -1.0;
    return c;
}

Errc code_of(const std::function<void()>& f)
{
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("no error thrown");
    return Errc::IoError;
}

}  // namespace

TEST_SUITE("cascade")
{
    TEST_CASE("no tie: higher EIG is selected and a pure rare partition stops")
    {
        support::TempDir dir;
        const auto data = toy();
        pool::Pool p;
        p.add(support::scripted(dir, data, "m1", kLabels, perfect()));
        p.add(support::scripted(dir, data, "m2", kLabels, perfect()));
        const auto tree = build_cascade(p, data, data, base_config(), fixed_eig({{"m1", 0.3}, {"m2", 0.1}}));
        REQUIRE(tree.log.size() == 1);
        CHECK_FALSE(tree.log[0].tie);
        CHECK(tree.log[0].selected == "m1");
        CHECK(tree.log[0].action == "stop_gini");
        CHECK(tree.log[0].rare_gini == doctest::Approx(0.0));
        CHECK(depth(tree) == 1);
        for (const auto& [g, c] : tree.root->children) {
            CHECK(c.is_leaf());
            CHECK(c.leaf == g);
        }
    }

    TEST_CASE("tie is settled by dependability")
    {
        support::TempDir dir;
        const auto data = toy();
        pool::Pool p;
        p.add(support::scripted(dir, data, "timid", kLabels, timid()));
        p.add(support::scripted(dir, data, "sure", kLabels, perfect()));
        const auto tree = build_cascade(p, data, data, base_config(), fixed_eig({{"timid", 0.30}, {"sure", 0.28}}));
        const auto& e = tree.log[0];
        CHECK(e.tie);
        CHECK(e.best == "timid");
        CHECK(e.selected == "sure");
        CHECK(e.tie_resolution == "dependability");
        CHECK(e.tie_confidence.at("timid") == doctest::Approx(0.4));
        CHECK(e.tie_confidence.at("sure") == doctest::Approx(1.0));
    }

    TEST_CASE("tie with both dependable keeps the higher EIG")
    {
        support::TempDir dir;
        const auto data = toy();
        pool::Pool p;
        p.add(support::scripted(dir, data, "a", kLabels, perfect()));
        p.add(support::scripted(dir, data, "b", kLabels, perfect()));
        auto tree = build_cascade(p, data, data, base_config(), fixed_eig({{"a", 0.28}, {"b", 0.30}}));
        CHECK(tree.log[0].selected == "b");
        CHECK(tree.log[0].tie_resolution == "both_dependable_higher_eig");
        // Exact EIG tie: registration order.
        tree = build_cascade(p, data, data, base_config(), fixed_eig({{"a", 0.3}, {"b", 0.3}}));
        CHECK(tree.log[0].selected == "a");
    }

    TEST_CASE("impure rare partition cascades to a second node")
    {
        support::TempDir dir;
        const auto data = toy();
        pool::Pool p;
        p.add(support::scripted(dir, data, "leaky", kLabels, leaky()));
        p.add(support::scripted(dir, data, "perfect", kLabels, perfect()));
        // leaky wins at the root, perfect below.
        BuildOptions o;
        o.eig = [](const pool::TrainedClassifier& m, const Dataset&, int, int depth) {
            imbalance::EIGReport r;
            r.classifier_id = m.spec().id;
            r.eig = (m.spec().id == "leaky") == (depth == 1) ? 0.5 : 0.1;
            return r;
        };
        auto cfg = base_config();
        cfg.eps_stop = 0.005;
        const auto tree = build_cascade(p, data, data, cfg, o);
        REQUIRE(tree.log.size() == 2);
        CHECK(tree.log[0].action == "cascade");
        CHECK(tree.log[0].rare_explicit);
        CHECK(tree.log[0].rare_size == 10);
        CHECK(*tree.log[0].rare_gini == doctest::Approx(1 - 0.36 - 0.16));
        CHECK(tree.log[1].node_id == "n0/R");
        CHECK(tree.log[1].selected == "perfect");
        CHECK(tree.log[1].sample_size == 10);
        CHECK(tree.log[1].accepted);
        CHECK(tree.log[1].action == "stop_gini");
        CHECK(depth(tree) == 2);
        CHECK(node_count(tree) == 2);
        for (const auto& row : data) {
            const auto inf = infer(tree, data.schema(), row);
            CHECK(inf.label == *row.label);
            CHECK(replay_path(tree, inf.path) == inf.label);
        }
    }

    TEST_CASE("rare class behind 'rest' descends without a Gini check")
    {
        support::TempDir dir;
        const auto data = toy();
        pool::Pool p;
        p.add(support::scripted(dir, data, "a_vs_rest", {"A", "rest"}, [](const Instance& i) {
            return support::one_hot({"A", "rest"}, *i.label == "A" ? "A" : "rest");
        }));
        p.add(support::scripted(dir, data, "full", kLabels, perfect()));
        BuildOptions o;
        o.eig = [](const pool::TrainedClassifier& m, const Dataset&, int, int depth) {
            imbalance::EIGReport r;
            r.classifier_id = m.spec().id;
            r.eig = (m.spec().id == "a_vs_rest") == (depth == 1) ? 0.5 : 0.1;
            return r;
        };
        const auto tree = build_cascade(p, data, data, base_config(), o);
        REQUIRE(tree.log.size() == 2);
        CHECK_FALSE(tree.log[0].rare_explicit);
        CHECK(tree.log[0].rare_group == "rest");
        CHECK(tree.log[0].action == "descend");
        CHECK(tree.log[1].node_id == "n0/rest");
        CHECK(tree.log[1].sample_size == 15);
        CHECK(tree.root->children.at("A").leaf == "A");
    }

    TEST_CASE("growth guards")
    {
        support::TempDir dir;
        const auto data = toy();
        pool::Pool p;
        p.add(support::scripted(dir, data, "leaky", kLabels, leaky()));
        const auto eig = fixed_eig({{"leaky", 0.5}});

        auto cfg = base_config();
        cfg.max_depth = 1;
        CHECK(build_cascade(p, data, data, cfg, eig).log.back().action == "stop_max_depth");

        cfg = base_config();
        cfg.min_samples = 11;
        CHECK(build_cascade(p, data, data, cfg, eig).log.back().action == "stop_min_samples");

        // Re-selecting the same leaky model cannot improve validation F1.
        cfg = base_config();
        cfg.eps_stop = 0.005;
        const auto tree = build_cascade(p, data, data, cfg, eig);
        REQUIRE(tree.log.size() == 2);
        CHECK_FALSE(tree.log[1].accepted);
        CHECK(tree.log[1].action == "stop_no_validation_gain");
        CHECK(depth(tree) == 1);
        CHECK(tree.root->children.at("R").is_leaf());

        CHECK(build_cascade(p, data, data, base_config(), fixed_eig({{"leaky", -0.1}})).log[0].action ==
              "no_progress");
    }

    TEST_CASE("single classifier pool gives a depth-1 tree")
    {
        support::TempDir dir;
        const auto data = toy();
        pool::Pool p;
        p.add(support::scripted(dir, data, "only", kLabels, perfect()));
        const auto tree = build_cascade(p, data, data, base_config());
        CHECK(depth(tree) == 1);
        for (const auto& [g, c] : tree.root->children) CHECK(c.is_leaf());
        const auto inf = infer(tree, data.schema(), data[0]);
        CHECK(inf.path.size() == 1);
        CHECK(inf.label == "A");
    }

    TEST_CASE("engineered EIG pair selects the knowledge branch")
    {
        support::TempDir dir;
        const auto c = support::engineered_data();
        const double r_k = support::engineer_ratio(dir, c, 0.22, 5);
        const double r_d = support::engineer_ratio(dir, c, 0.027, 5);
        pool::Pool p;
        p.add(support::scripted(dir, c.data, "dl", c.labels, support::geometric_scores(r_d)));
        p.add(support::scripted(dir, c.data, "ekie", c.labels, support::geometric_scores(r_k)));
        CascadeConfig cfg;
        cfg.rare_class = "R";
        cfg.tau_m = 0.05;
        const auto tree = build_cascade(p, c.data, c.data, cfg);
        const auto& e = tree.log[0];
        CHECK(std::abs(e.candidates[0].eig - 0.027) <= 0.02);
        CHECK(std::abs(e.candidates[1].eig - 0.22) <= 0.02);
        CHECK_FALSE(e.tie);
        CHECK(e.selected == "ekie");
        CHECK(tree.root->model.spec().id == "ekie");
    }

    TEST_CASE("input errors")
    {
        support::TempDir dir;
        const auto data = toy();
        pool::Pool empty;
        CHECK(code_of([&] { build_cascade(empty, data, data, base_config()); }) == Errc::PoolEmpty);
        pool::Pool p;
        p.add(support::scripted(dir, data, "m", kLabels, perfect()));
        auto cfg = base_config();
        cfg.rare_class = "Z";
        CHECK(code_of([&] { build_cascade(p, data, data, cfg); }) == Errc::RareClassAbsent);
        cfg = base_config();
        cfg.tau_g = 2;
        CHECK(code_of([&] { build_cascade(p, data, data, cfg); }) == Errc::InvalidConfig);
    }

    TEST_CASE("termination within max_depth on random configurations")
    {
        std::mt19937_64 rng(21);
        std::uniform_int_distribution<int> n(20, 60), cls(2, 4), md(1, 4), kk(1, 5);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        for (int t = 0; t < 30; ++t) {
            const auto data = support::random_dataset(rng, static_cast<std::size_t>(n(rng)), 2,
                                                      static_cast<std::size_t>(cls(rng)), 0.8);
            pool::Pool p;
            pool::ClassifierSpec k;
            k.id = "knn";
            k.kind = pool::Kind::Knn;
            k.k = kk(rng);
            k.label_set = unit(rng) < 0.5 ? std::vector<std::string>{"c1", "rest"} : data.labels();
            p.add(k);
            pool::ClassifierSpec l;
            l.id = "lr";
            l.kind = pool::Kind::Logistic;
            l.iterations = 50;
            l.label_set = data.labels();
            p.add(l);
            CascadeConfig cfg;
            cfg.rare_class = "c1";
            cfg.max_depth = md(rng);
            cfg.k = kk(rng);
            cfg.tau_g = unit(rng) * 0.5;
            cfg.eps_stop = -1;
            cfg.min_samples = 2;
            const auto tree = build_cascade(p, data, data, cfg);
            REQUIRE(depth(tree) <= cfg.max_depth);
            REQUIRE(static_cast<int>(tree.log.size()) <= cfg.max_depth);
            for (std::size_t i = 1; i < tree.log.size(); ++i) REQUIRE(tree.log[i].depth == tree.log[i - 1].depth + 1);
        }
    }

    TEST_CASE("export/import round-trip and fingerprint check")
    {
        std::mt19937_64 rng(30);
        const auto data = support::random_dataset(rng, 40, 2, 3, 1.0);
        pool::Pool p;
        pool::ClassifierSpec k;
        k.id = "knn";
        k.kind = pool::Kind::Knn;
        k.label_set = data.labels();
        p.add(k);
        CascadeConfig cfg;
        cfg.rare_class = "c2";
        cfg.eps_stop = -1;
        cfg.min_samples = 2;
        const auto tree = build_cascade(p, data, data, cfg);
        const auto text = export_tree_text(tree);
        const auto back = import_tree(Json::parse(text));
        CHECK(export_tree_text(back) == text);
        CHECK(node_count(back) == node_count(tree));
        for (const auto& row : data) CHECK(infer(back, data.schema(), row).label == infer(tree, data.schema(), row).label);

        // Same inputs, same bytes.
        CHECK(export_tree_text(build_cascade(p, data, data, cfg)) == text);

        auto snap = snapshot(tree);
        CHECK_NOTHROW(import_tree(Json::parse(text), {}, &snap));
        snap[0].second = "0000000000000000";
        CHECK(code_of([&] { import_tree(Json::parse(text), {}, &snap); }) == Errc::FingerprintMismatch);
        auto doc = Json::parse(text);
        doc["version"] = 99;
        CHECK(code_of([&] { import_tree(doc); }) == Errc::VersionMismatch);
    }

    TEST_CASE("replay follows the log")
    {
        std::mt19937_64 rng(31);
        const auto data = support::random_dataset(rng, 50, 2, 3, 0.7);
        pool::Pool p;
        pool::ClassifierSpec k;
        k.id = "knn";
        k.kind = pool::Kind::Knn;
        k.label_set = {"c1", "rest"};
        p.add(k);
        pool::ClassifierSpec l;
        l.id = "lr";
        l.kind = pool::Kind::Logistic;
        l.label_set = data.labels();
        p.add(l);
        CascadeConfig cfg;
        cfg.rare_class = "c1";
        cfg.eps_stop = -1;
        cfg.min_samples = 2;
        const auto tree = build_cascade(p, data, data, cfg);
        const auto again = replay_cascade(p, data, data, cfg, tree.log);
        CHECK(export_tree_text(again) == export_tree_text(tree));
        auto smaller = data.subset(std::vector<std::size_t>{0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15});
        CHECK_THROWS_AS(replay_cascade(p, smaller, smaller, cfg, tree.log), Error);
    }

    TEST_CASE("fusion")
    {
        const ScoreVector sym{{"A", 0.8}, {"B", 0.2}}, neu{{"A", 0.4}, {"B", 0.6}};
        const auto u = fuse(sym, neu, {});
        CHECK(u[0].second == doctest::Approx(0.6));
        CHECK(u[1].second == doctest::Approx(0.4));
        CHECK(fuse(sym, neu, {FusionConfig::Mode::Weighted, 0.0}) == sym);
        CHECK(fuse(sym, neu, {FusionConfig::Mode::Weighted, 1.0}) == neu);
        CHECK(code_of([&] { fuse(sym, ScoreVector{{"A", 1.0}}, {}); }) == Errc::LabelSetMismatch);
        CHECK(code_of([&] { fuse(sym, neu, {FusionConfig::Mode::Weighted, std::nullopt}); }) == Errc::InvalidConfig);
        CHECK(argmax_label(u) == "A");
    }

    TEST_CASE("learned alpha prefers the informative branch")
    {
        std::vector<ScoreVector> sym, neu;
        std::vector<std::string> truth;
        for (int i = 0; i < 20; ++i) {
            const bool a = i % 2 == 0;
            truth.push_back(a ? "A" : "B");
            sym.push_back({{"A", 0.5}, {"B", 0.5}});
            neu.push_back(a ? ScoreVector{{"A", 0.9}, {"B", 0.1}} : ScoreVector{{"A", 0.1}, {"B", 0.9}});
        }
        // Any alpha > 0 is perfect; ties keep the smaller one.
        CHECK(learn_alpha(sym, neu, truth) == doctest::Approx(0.05));
    }

    TEST_CASE("config and log JSON round-trip")
    {
        CascadeConfig c;
        c.rare_class = "R";
        c.tau_m = 0.07;
        const auto back = config_from_json(to_json(c));
        CHECK(back.tau_m == 0.07);
        CHECK(back.effective_min_samples() == c.effective_min_samples());
        LogEntry e;
        e.node_id = "n0";
        e.rare_gini = 0.25;
        e.runner_up = "x";
        e.action = "stop_gini";
        const auto le = log_entry_from_json(to_json(e));
        CHECK(le.rare_gini == 0.25);
        CHECK(le.runner_up == "x");
        CHECK(canonical_dump(to_json(le)) == canonical_dump(to_json(e)));
    }
}
