#include "eksaii/metrics.hpp"

#include "eksaii/errors.hpp"

#include <algorithm>
#include <set>

namespace eksaii::metrics {

Summary summarize(std::span<const std::string> truth, std::span<const std::string> predicted,
                  std::span<const std::string> classes, std::optional<std::string> rare)
{
    if (truth.size() != predicted.size())
        throw Error(Errc::SchemaMismatch, "truth and prediction counts differ");
    std::set<std::string> all(classes.begin(), classes.end());
    all.insert(truth.begin(), truth.end());
    all.insert(predicted.begin(), predicted.end());
    if (rare) all.insert(*rare);

    Summary s;
    s.classes.assign(all.begin(), all.end());
    const std::size_t c = s.classes.size();
    auto index = [&s](const std::string& l) {
        return static_cast<std::size_t>(std::lower_bound(s.classes.begin(), s.classes.end(), l) - s.classes.begin());
    };
    s.confusion.assign(c, std::vector<std::size_t>(c, 0));
    for (std::size_t i = 0; i < truth.size(); ++i) ++s.confusion[index(truth[i])][index(predicted[i])];
    s.total = truth.size();

    std::size_t correct = 0;
    double f1_sum = 0.0;
    std::size_t counted = 0;
    for (std::size_t k = 0; k < c; ++k) {
        ClassMetrics m;
        m.label = s.classes[k];
        m.true_positive = s.confusion[k][k];
        for (std::size_t j = 0; j < c; ++j) {
            m.support += s.confusion[k][j];
            m.predicted += s.confusion[j][k];
        }
        correct += m.true_positive;
        m.precision = m.predicted ? static_cast<double>(m.true_positive) / static_cast<double>(m.predicted) : 0.0;
        m.recall = m.support ? static_cast<double>(m.true_positive) / static_cast<double>(m.support) : 0.0;
        m.f1 = m.precision + m.recall > 0 ? 2 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
        m.absent = m.support == 0;
        if (m.support > 0 || m.predicted > 0) {
            f1_sum += m.f1;
            ++counted;
        }
        if (rare && m.label == *rare) {
            s.sensitivity = m.recall;
            s.rare_f1 = m.f1;
        }
        s.per_class.push_back(std::move(m));
    }
    s.accuracy = s.total ? static_cast<double>(correct) / static_cast<double>(s.total) : 0.0;
    s.macro_f1 = counted ? f1_sum / static_cast<double>(counted) : 0.0;
    s.rare_class = std::move(rare);
    return s;
}

double macro_f1(std::span<const std::string> truth, std::span<const std::string> predicted,
                std::span<const std::string> classes)
{
    return summarize(truth, predicted, classes).macro_f1;
}

Json to_json(const Summary& s)
{
    Json per_class = Json::object();
    for (const auto& m : s.per_class) {
        per_class[m.label] = Json{{"support", m.support},     {"predicted", m.predicted}, {"precision", m.precision},
                                  {"recall", m.recall},       {"f1", m.f1},               {"absent", m.absent}};
    }
    Json j{{"classes", s.classes},   {"confusion", s.confusion}, {"total", s.total},
           {"accuracy", s.accuracy}, {"macro_f1", s.macro_f1},   {"per_class", std::move(per_class)}};
    if (s.rare_class) {
        j["rare_class"] = *s.rare_class;
        j["sensitivity"] = s.sensitivity;
        j["rare_f1"] = s.rare_f1;
    }
    return j;
}

Json to_json(const MetricsReport& r)
{
    Json j = to_json(r.overall);
    Json domains = Json::object();
    for (const auto& [d, s] : r.per_domain) domains[d] = to_json(s);
    j["per_domain"] = std::move(domains);
    j["knowledge_review"] = r.knowledge_review;
    return j;
}

}  // namespace eksaii::metrics
