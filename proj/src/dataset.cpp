#include "eksaii/dataset.hpp"

#include "eksaii/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace eksaii {

Dataset::Dataset(FeatureSchema schema) : schema_(std::move(schema)) {}

void Dataset::add(Instance inst)
{
    if (inst.features.size() != schema_.size())
        throw Error(Errc::SchemaMismatch,
                    "instance '" + inst.id + "' has " + std::to_string(inst.features.size()) +
                        " features, schema has " + std::to_string(schema_.size()));
    if (by_id_.count(inst.id))
        throw Error(Errc::DuplicateId, "duplicate instance id '" + inst.id + "'");
    by_id_.emplace(inst.id, rows_.size());
    rows_.push_back(std::move(inst));
}

const Instance* Dataset::find(std::string_view id) const
{
    auto it = by_id_.find(std::string(id));
    return it == by_id_.end() ? nullptr : &rows_[it->second];
}

std::optional<std::size_t> Dataset::column(std::string_view name) const
{
    auto it = std::find(schema_.begin(), schema_.end(), name);
    if (it == schema_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - schema_.begin());
}

bool Dataset::fully_labeled() const
{
    return std::all_of(rows_.begin(), rows_.end(), [](const Instance& r) { return r.label.has_value(); });
}

std::vector<std::string> Dataset::labels() const
{
    std::set<std::string> seen;
    for (const auto& r : rows_)
        if (r.label) seen.insert(*r.label);
    return {seen.begin(), seen.end()};
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const
{
    Dataset out(schema_);
    for (auto i : rows) out.add(rows_.at(i));
    return out;
}

std::vector<std::vector<std::string>> read_csv(std::istream& in)
{
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> record;
    std::string field;
    bool quoted = false;
    bool field_started = false;
    char c;
    auto end_field = [&] {
        record.push_back(std::move(field));
        field.clear();
        field_started = false;
    };
    auto end_record = [&] {
        end_field();
        if (!(record.size() == 1 && record[0].empty())) records.push_back(std::move(record));
        record.clear();
    };
    while (in.get(c)) {
        if (quoted) {
            if (c == '"') {
                if (in.peek() == '"') {
                    in.get(c);
                    field.push_back('"');
                } else {
                    quoted = false;
                }
            } else {
                field.push_back(c);
            }
            continue;
        }
        switch (c) {
        case '"':
            if (!field_started) quoted = true;
            else field.push_back(c);
            field_started = true;
            break;
        case ',': end_field(); break;
        case '\r': break;
        case '\n': end_record(); break;
        default:
            field.push_back(c);
            field_started = true;
        }
    }
    if (field_started || !field.empty() || !record.empty()) end_record();
    return records;
}

std::string csv_escape(std::string_view field)
{
    if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

std::string format_real(double value)
{
    if (value == 0.0) return "0";  // folds -0
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", value);
    return buf;
}

std::optional<double> parse_real(std::string_view text)
{
    while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
    while (!text.empty() && (text.back() == ' ' || text.back() == '\t')) text.remove_suffix(1);
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    if (text.empty()) return std::nullopt;
    double v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

Dataset read_dataset(std::istream& in)
{
    auto records = read_csv(in);
    if (records.empty()) throw ParseError({1, 1}, "header 'id,domain,label,...'", "empty file");
    const auto& header = records[0];
    const char* required[] = {"id", "domain", "label"};
    for (int c = 0; c < 3; ++c) {
        if (static_cast<int>(header.size()) <= c || header[c] != required[c])
            throw ParseError({1, c + 1}, std::string("column '") + required[c] + "'",
                             header.size() > static_cast<std::size_t>(c) ? "'" + header[c] + "'" : "end of header");
    }
    FeatureSchema schema(header.begin() + 3, header.end());
    {
        std::set<std::string> names;
        for (std::size_t c = 0; c < schema.size(); ++c)
            if (schema[c].empty() || !names.insert(schema[c]).second)
                throw ParseError({1, static_cast<int>(c) + 4}, "unique non-empty feature name", "'" + schema[c] + "'");
    }
    Dataset data(schema);
    std::unordered_map<std::string, int> first_row;
    for (std::size_t r = 1; r < records.size(); ++r) {
        const auto& rec = records[r];
        const int row = static_cast<int>(r) + 1;
        if (rec.size() != header.size())
            throw ParseError({row, static_cast<int>(std::min(rec.size(), header.size())) + 1},
                             std::to_string(header.size()) + " fields", std::to_string(rec.size()) + " fields");
        if (rec[0].empty()) throw ParseError({row, 1}, "non-empty id", "empty cell");
        if (auto it = first_row.find(rec[0]); it != first_row.end())
            throw Error(Errc::DuplicateId, "duplicate id '" + rec[0] + "' at rows " + std::to_string(it->second) +
                                               " and " + std::to_string(row));
        first_row.emplace(rec[0], row);
        Instance inst;
        inst.id = rec[0];
        inst.domain = rec[1];
        if (!rec[2].empty()) inst.label = rec[2];
        inst.features.reserve(schema.size());
        for (std::size_t c = 3; c < rec.size(); ++c) {
            auto v = parse_real(rec[c]);
            if (!v)
                throw ParseError({row, static_cast<int>(c) + 1}, "a finite number in column '" + header[c] + "'",
                                 "'" + rec[c] + "'");
            inst.features.push_back(*v);
        }
        data.add(std::move(inst));
    }
    return data;
}

Dataset load_dataset(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::IoError, "cannot open '" + path.string() + "'");
    return read_dataset(in);
}

void write_dataset(std::ostream& out, const Dataset& data)
{
    out << "id,domain,label";
    for (const auto& name : data.schema()) out << ',' << csv_escape(name);
    out << '\n';
    for (const auto& row : data) {
        out << csv_escape(row.id) << ',' << csv_escape(row.domain) << ',' << csv_escape(row.label.value_or(""));
        for (double v : row.features) out << ',' << format_real(v);
        out << '\n';
    }
}

void save_dataset(const std::filesystem::path& path, const Dataset& data)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(Errc::IoError, "cannot write '" + path.string() + "'");
    write_dataset(out, data);
}

}  // namespace eksaii
