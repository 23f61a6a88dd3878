#pragma once

#include "eksaii/canonical.hpp"

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace eksaii::metrics {

struct ClassMetrics {
    std::string label;
    std::size_t support = 0;
    std::size_t predicted = 0;
    std::size_t true_positive = 0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    bool absent = false;  // no true instances; F1 reported as 0
};

struct Summary {
    std::vector<std::string> classes;
    std::vector<std::vector<std::size_t>> confusion;  // rows: truth, columns: prediction
    std::size_t total = 0;
    double accuracy = 0.0;
    double macro_f1 = 0.0;
    std::vector<ClassMetrics> per_class;
    std::optional<std::string> rare_class;
    double sensitivity = 0.0;  // recall of the rare class
    double rare_f1 = 0.0;
};

// Classes are the sorted union of `classes`, truth and predictions. The
// macro average runs over classes that occur in truth or predictions.
Summary summarize(std::span<const std::string> truth, std::span<const std::string> predicted,
                  std::span<const std::string> classes = {}, std::optional<std::string> rare = std::nullopt);

double macro_f1(std::span<const std::string> truth, std::span<const std::string> predicted,
                std::span<const std::string> classes = {});

struct MetricsReport {
    Summary overall;
    std::map<std::string, Summary> per_domain;  // only when several domains are present
    std::size_t knowledge_review = 0;           // instances routed through a knowledge node
};

Json to_json(const Summary& summary);
Json to_json(const MetricsReport& report);

}  // namespace eksaii::metrics
