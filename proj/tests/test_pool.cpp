#include "support.hpp"

#include "eksaii/errors.hpp"
#include "eksaii/pool.hpp"

#include <doctest.h>

#include <set>

using namespace eksaii;
using namespace eksaii::pool;

namespace {

ClassifierSpec knn(const std::string& id, int k, std::vector<std::string> labels)
{
    ClassifierSpec s;
    s.id = id;
    s.kind = Kind::Knn;
    s.k = k;
    s.label_set = std::move(labels);
    return s;
}

ClassifierSpec external(const std::string& id, const std::string& file, std::vector<std::string> labels)
{
    ClassifierSpec s;
    s.id = id;
    s.kind = Kind::External;
    s.score_file = file;
    s.label_set = std::move(labels);
    return s;
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

TEST_SUITE("pool")
{
    TEST_CASE("registration order and duplicate ids")
    {
        Pool p;
        p.add(knn("knn", 3, {"A", "B"}));
        ClassifierSpec r;
        r.id = "rule";
        r.kind = Kind::Rule;
        r.label_set = {"A", "B"};
        r.rules = std::make_shared<const rules::RuleSet>(rules::parse_ruleset(
            "prop p := threshold(feature \"x1\", >, 0)\nprop q := threshold(feature \"x1\", <=, 0)\n"
            "rule A := p\nrule B := q"));
        p.add(r);
        REQUIRE(p.size() == 2);
        CHECK(p.specs()[0].id == "knn");
        CHECK(p.specs()[1].id == "rule");
        CHECK(code_of([&] { p.add(knn("knn", 1, {"A", "B"})); }) == Errc::DuplicateId);
    }

    TEST_CASE("external file is checked lazily")
    {
        Pool p;
        CHECK_NOTHROW(p.add(external("ext", "/nonexistent/scores.csv", {"A", "B"})));
        const auto data = support::make_dataset({{0.0}, {1.0}}, {"A", "B"});
        CHECK_THROWS_AS(train(p.specs()[0], data), Error);
    }

    TEST_CASE("label set semantics")
    {
        auto s = normalized(knn("m", 3, {"grade3", "rest", "grade3"}));
        CHECK(s.label_set == std::vector<std::string>{"grade3", "rest"});
        CHECK(s.one_vs_rest());
        CHECK(s.group_of("grade3") == "grade3");
        CHECK(s.group_of("grade1") == "rest");
        const auto closed = normalized(knn("m", 3, {"A", "B"}));
        CHECK(code_of([&] { (void)closed.group_of("C"); }) == Errc::UnknownLabel);
        CHECK(code_of([&] { normalized(knn("m", 3, {"A"})); }) == Errc::InvalidConfig);
    }

    TEST_CASE("knn vote fractions")
    {
        const auto data = support::make_dataset({{0.0}, {0.1}, {0.2}, {5.0}}, {"A", "A", "B", "B"});
        const auto m = train(knn("knn", 3, {"A", "B"}), data);
        const Instance q{"q", "d0", std::nullopt, {0.05}};
        const auto p = m.predict(data.schema(), q);
        CHECK(p.label == "A");
        CHECK(p.confidence == doctest::Approx(2.0 / 3));
    }

    TEST_CASE("fingerprint is stable and content-sensitive")
    {
        std::mt19937_64 rng(1);
        const auto data = support::random_dataset(rng, 10, 2, 2);
        const auto a = train(knn("knn", 3, {"c0", "c1"}), data);
        const auto b = train(knn("knn", 3, {"c0", "c1"}), data);
        CHECK(a.fingerprint() == b.fingerprint());
        CHECK(a.to_json().dump() == b.to_json().dump());
        const auto c = train(knn("knn", 4, {"c0", "c1"}), data);
        CHECK(a.fingerprint() != c.fingerprint());
        const auto d = train(knn("knn", 3, {"c0", "c1"}), data.subset(std::vector<std::size_t>{0, 1, 2}));
        CHECK(a.fingerprint() != d.fingerprint());
    }

    TEST_CASE("logistic separates a 4-point toy")
    {
        const auto data = support::make_dataset({{-1.0, 0.0}, {-1.0, 0.0}, {1.0, 0.0}, {1.0, 0.0}}, {"A", "A", "B", "B"});
        ClassifierSpec s;
        s.id = "lr";
        s.kind = Kind::Logistic;
        s.label_set = {"A", "B"};
        const auto m = train(s, data);
        for (const auto& row : data) CHECK(m.predict(data.schema(), row).label == *row.label);
    }

    TEST_CASE("logistic with zero iterations is uniform")
    {
        std::mt19937_64 rng(4);
        const auto data = support::random_dataset(rng, 20, 2, 4);
        ClassifierSpec s;
        s.id = "lr";
        s.kind = Kind::Logistic;
        s.iterations = 0;
        s.label_set = {"c0", "c1", "c2", "c3"};
        const auto p = train(s, data).predict(data.schema(), data[0]);
        for (const auto& [l, v] : p.scores) CHECK(v == doctest::Approx(0.25));
    }

    TEST_CASE("external scores")
    {
        support::TempDir dir;
        support::write_file(dir / "s.csv", "id,A,B,C\ni0,0.2,0.6,0.2\ni1,1,1,2\n");
        const auto data = support::make_dataset({{0.0}, {1.0}}, {"A", "B"});
        const auto m = train(external("ext", (dir / "s.csv").string(), {"A", "B", "C"}), data);
        auto p = m.predict(data.schema(), data[0]);
        CHECK(p.label == "B");
        CHECK(p.confidence == doctest::Approx(0.6));
        p = m.predict(data.schema(), data[1]);
        CHECK(p.label == "C");
        CHECK(p.confidence == doctest::Approx(0.5));
        const Instance stranger{"zz", "d0", std::nullopt, {0.0}};
        CHECK(code_of([&] { (void)m.predict(data.schema(), stranger); }) == Errc::UnknownInstance);
    }

    TEST_CASE("external file missing a training id")
    {
        support::TempDir dir;
        support::write_file(dir / "s.csv", "id,A,B\ni0,0.2,0.8\n");
        const auto data = support::make_dataset({{0.0}, {1.0}}, {"A", "B"});
        CHECK(code_of([&] { train(external("ext", (dir / "s.csv").string(), {"A", "B"}), data); }) ==
              Errc::ExternalScoreMissing);
    }

    TEST_CASE("training errors")
    {
        const Dataset empty(FeatureSchema{"x1"});
        CHECK(code_of([&] { train(knn("k", 3, {"A", "B"}), empty); }) == Errc::EmptyPartition);
        Dataset unlabeled(FeatureSchema{"x1"});
        unlabeled.add({"u", "d0", std::nullopt, {1.0}});
        CHECK(code_of([&] { train(knn("k", 3, {"A", "B"}), unlabeled); }) == Errc::UnlabeledData);
        const auto data = support::make_dataset({{0.0}, {1.0}}, {"A", "C"});
        CHECK_THROWS_AS(train(knn("k", 3, {"A", "B"}), data), Error);
    }

    TEST_CASE("partitions cover the sample disjointly")
    {
        std::mt19937_64 rng(8);
        for (int t = 0; t < 50; ++t) {
            const auto data = support::random_dataset(rng, 40, 2, 3);
            const auto m = train(knn("k", 3, {"c0", "rest"}), data);
            const auto parts = partition_by_prediction(m, data);
            std::set<std::string> seen;
            std::size_t total = 0;
            for (const auto& [label, part] : parts) {
                CHECK((label == "c0" || label == "rest"));
                CHECK_FALSE(part.empty());
                for (const auto& row : part) {
                    REQUIRE(seen.insert(row.id).second);
                    ++total;
                }
            }
            CHECK(total == data.size());
        }
    }

    TEST_CASE("perfect and constant classifiers partition as expected")
    {
        support::TempDir dir;
        std::vector<std::vector<double>> pts;
        std::vector<std::string> labels;
        std::string perfect = "id,A,B\n", constant = "id,A,B\n";
        for (int i = 0; i < 8; ++i) {
            const bool a = i < 6;
            pts.push_back({static_cast<double>(i)});
            labels.push_back(a ? "A" : "B");
            perfect += "i" + std::to_string(i) + (a ? ",1,0\n" : ",0,1\n");
            constant += "i" + std::to_string(i) + ",0.9,0.1\n";
        }
        support::write_file(dir / "p.csv", perfect);
        support::write_file(dir / "c.csv", constant);
        const auto data = support::make_dataset(pts, labels);
        auto parts = partition_by_prediction(train(external("p", (dir / "p.csv").string(), {"A", "B"}), data), data);
        CHECK(parts.at("A").size() == 6);
        CHECK(parts.at("B").size() == 2);
        parts = partition_by_prediction(train(external("c", (dir / "c.csv").string(), {"A", "B"}), data), data);
        REQUIRE(parts.size() == 1);
        CHECK(parts.at("A").size() == 8);
    }

    TEST_CASE("one-vs-rest rule classifier")
    {
        ClassifierSpec s;
        s.id = "kb";
        s.kind = Kind::Rule;
        s.label_set = {"grade3", "rest"};
        s.rules = std::make_shared<const rules::RuleSet>(
            rules::parse_ruleset("prop hi := threshold(feature \"x1\", >, 2)\nrule grade3 := hi"));
        const auto data = support::make_dataset({{0.0}, {1.0}, {3.0}, {4.0}}, {"grade0", "grade1", "grade3", "grade3"});
        const auto m = train(s, data);
        const auto parts = partition_by_prediction(m, data);
        CHECK(parts.at("grade3").size() == 2);
        CHECK(parts.at("rest").size() == 2);
        const auto k = m.knowledge(data.schema(), data[2]);
        REQUIRE(k.has_value());
        CHECK(k->label == "grade3");
    }

    TEST_CASE("trained classifier JSON round-trip")
    {
        std::mt19937_64 rng(12);
        const auto data = support::random_dataset(rng, 25, 3, 3);
        ClassifierSpec s;
        s.id = "lr";
        s.kind = Kind::Logistic;
        s.label_set = {"c0", "c1", "c2"};
        const auto m = train(s, data);
        const auto back = TrainedClassifier::from_json(Json::parse(canonical_dump(m.to_json())));
        CHECK(canonical_dump(back.to_json()) == canonical_dump(m.to_json()));
        for (const auto& row : data) CHECK(back.predict(data.schema(), row).label == m.predict(data.schema(), row).label);
        CHECK(code_of([&] { (void)m.predict(FeatureSchema{"other", "x2", "x3"}, data[0]); }) == Errc::SchemaMismatch);
    }

    TEST_CASE("pool config loading")
    {
        support::TempDir dir;
        support::write_file(dir / "r.ekr", "prop p := threshold(feature \"x1\", >, 0)\nrule A := p");
        support::write_file(dir / "pool.json", R"({"classifiers": [
            {"id": "kb", "kind": "rule", "rules": "r.ekr", "label_set": ["A", "rest"]},
            {"id": "knn", "kind": "knn", "k": 3},
            {"id": "ext", "kind": "external", "scores": "missing.csv"}]})");
        const auto p = load_pool(dir / "pool.json", {"A", "B"});
        REQUIRE(p.size() == 3);
        CHECK(p.specs()[0].one_vs_rest());
        CHECK(p.specs()[1].label_set == std::vector<std::string>{"A", "B"});
        CHECK(p.specs()[2].label_set == std::vector<std::string>{"A", "B"});
        CHECK(p.specs()[2].score_file.find("missing.csv") != std::string::npos);
    }
}
