#include "eksaii/canonical.hpp"

#include "eksaii/dataset.hpp"
#include "eksaii/errors.hpp"

#include <cmath>
#include <cstdio>

namespace eksaii {

namespace {

void dump_string(std::string& out, const std::string& s)
{
    // nlohmann's escaping is already deterministic.
    out += Json(s).dump();
}

void dump(std::string& out, const Json& v)
{
    switch (v.type()) {
    case Json::value_t::null: out += "null"; break;
    case Json::value_t::boolean: out += v.get<bool>() ? "true" : "false"; break;
    case Json::value_t::number_integer: out += std::to_string(v.get<std::int64_t>()); break;
    case Json::value_t::number_unsigned: out += std::to_string(v.get<std::uint64_t>()); break;
    case Json::value_t::number_float: {
        const double d = v.get<double>();
        if (!std::isfinite(d)) throw Error(Errc::InvalidConfig, "non-finite number in JSON output");
        out += format_real(d);
        break;
    }
    case Json::value_t::string: dump_string(out, v.get_ref<const std::string&>()); break;
    case Json::value_t::array: {
        out += '[';
        bool first = true;
        for (const auto& e : v) {
            if (!first) out += ',';
            first = false;
            dump(out, e);
        }
        out += ']';
        break;
    }
    case Json::value_t::object: {
        // nlohmann::json stores objects in a std::map, so iteration is sorted.
        out += '{';
        bool first = true;
        for (auto it = v.begin(); it != v.end(); ++it) {
            if (!first) out += ',';
            first = false;
            dump_string(out, it.key());
            out += ':';
            dump(out, it.value());
        }
        out += '}';
        break;
    }
    case Json::value_t::binary:
    case Json::value_t::discarded: throw Error(Errc::InvalidConfig, "unsupported JSON value");
    }
}

}  // namespace

std::string canonical_dump(const Json& value)
{
    std::string out;
    dump(out, value);
    return out;
}

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed)
{
    std::uint64_t h = seed;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t value)
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
    return buf;
}

}  // namespace eksaii
