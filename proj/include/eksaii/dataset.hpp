#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace eksaii {

using FeatureSchema = std::vector<std::string>;

struct Instance {
    std::string id;
    std::string domain;
    std::optional<std::string> label;
    std::vector<double> features;  // ordered as the owning dataset's schema
};

// A set of instances sharing one feature schema. Ids are unique.
class Dataset {
public:
    Dataset() = default;
    explicit Dataset(FeatureSchema schema);

    const FeatureSchema& schema() const noexcept { return schema_; }
    std::size_t size() const noexcept { return rows_.size(); }
    bool empty() const noexcept { return rows_.empty(); }
    std::size_t dimension() const noexcept { return schema_.size(); }

    const Instance& operator[](std::size_t i) const { return rows_[i]; }
    const std::vector<Instance>& instances() const noexcept { return rows_; }
    auto begin() const noexcept { return rows_.begin(); }
    auto end() const noexcept { return rows_.end(); }

    // Throws DuplicateId or SchemaMismatch (wrong feature count).
    void add(Instance inst);

    const Instance* find(std::string_view id) const;
    std::optional<std::size_t> column(std::string_view name) const;

    bool fully_labeled() const;
    // Sorted distinct labels of labeled rows.
    std::vector<std::string> labels() const;

    // Same schema, only the rows selected by `keep`.
    template <typename Pred>
    Dataset filter(Pred keep) const
    {
        Dataset out(schema_);
        for (const auto& row : rows_)
            if (keep(row)) out.add(row);
        return out;
    }
    Dataset subset(std::span<const std::size_t> rows) const;

private:
    FeatureSchema schema_;
    std::vector<Instance> rows_;
    std::unordered_map<std::string, std::size_t> by_id_;
};

// CSV with header `id,domain,label,<features...>`. Empty label cells mean unlabeled.
Dataset read_dataset(std::istream& in);
Dataset load_dataset(const std::filesystem::path& path);
void write_dataset(std::ostream& out, const Dataset& data);
void save_dataset(const std::filesystem::path& path, const Dataset& data);

// Minimal RFC 4180 reader: quoted fields, doubled quotes, CRLF tolerated.
std::vector<std::vector<std::string>> read_csv(std::istream& in);
std::string csv_escape(std::string_view field);

// Fixed `%.12g` rendering shared by every serializer.
std::string format_real(double value);
// Strict full-string parse; nullopt on junk or non-finite input.
std::optional<double> parse_real(std::string_view text);

}  // namespace eksaii
