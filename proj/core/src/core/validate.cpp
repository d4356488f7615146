#include "psc/core/validate.hpp"

#include <cmath>
#include <string_view>

#include <json.hpp>

#include "psc/errors.hpp"

namespace psc {

using nlohmann::json;

TokenTrace validate_trace(TokenTrace trace) {
    const std::size_t n_src = trace.source.size();
    if (trace.generated_from && *trace.generated_from > n_src) {
        throw OffsetError("generated_from " + std::to_string(*trace.generated_from) +
                          " beyond source length " + std::to_string(n_src));
    }

    std::size_t prev_end = 0;
    for (std::size_t k = 0; k < trace.tokens.size(); ++k) {
        const auto& t = trace.tokens[k];
        if (!std::isfinite(t.logprob) || t.logprob > 0.0) {
            throw SchemaError("token " + std::to_string(k) + ": logprob must be finite and <= 0");
        }
        if (t.byte_start > t.byte_end || t.byte_end > n_src) {
            throw OffsetError("token " + std::to_string(k) + ": span [" +
                              std::to_string(t.byte_start) + ", " + std::to_string(t.byte_end) +
                              ") invalid for source of " + std::to_string(n_src) + " bytes");
        }
        if (t.byte_start < prev_end) {
            throw OffsetError("token " + std::to_string(k) + " overlaps or precedes token " +
                              std::to_string(k - 1));
        }
        if (!t.zero_width()) prev_end = t.byte_end;
    }

    // Offsets are sound; now every spanned token must reproduce its bytes and
    // consecutive spans must abut so the concatenation is a source substring.
    std::optional<std::size_t> last_end;
    for (std::size_t k = 0; k < trace.tokens.size(); ++k) {
        const auto& t = trace.tokens[k];
        if (t.zero_width()) continue;
        std::string_view covered(trace.source.data() + t.byte_start, t.byte_end - t.byte_start);
        if (covered != t.text) {
            throw ReconstructionError("token " + std::to_string(k) + " text does not match source bytes [" +
                                      std::to_string(t.byte_start) + ", " + std::to_string(t.byte_end) + ")");
        }
        if (last_end && *last_end != t.byte_start) {
            throw ReconstructionError("gap before token " + std::to_string(k) +
                                      ": token texts do not concatenate to a source substring");
        }
        last_end = t.byte_end;
    }
    return trace;
}

namespace {

template <class T>
T required(const json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end()) throw SchemaError(std::string("missing field '") + key + "'");
    try {
        return it->get<T>();
    } catch (const json::exception&) {
        throw SchemaError(std::string("field '") + key + "' has the wrong type");
    }
}

std::size_t non_negative(const json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end()) throw SchemaError(std::string("missing field '") + key + "'");
    if (!it->is_number_integer() || it->get<long long>() < 0) {
        throw SchemaError(std::string("field '") + key + "' must be a non-negative integer");
    }
    return it->get<std::size_t>();
}

}  // namespace

TokenTrace parse_trace_record(const std::string& json_line) {
    json obj;
    try {
        obj = json::parse(json_line);
    } catch (const json::parse_error& e) {
        throw SchemaError(std::string("malformed JSON: ") + e.what());
    }
    if (!obj.is_object()) throw SchemaError("trace record must be a JSON object");

    TokenTrace trace;
    trace.sample_id = required<std::string>(obj, "sample_id");
    trace.source = required<std::string>(obj, "source");
    if (auto it = obj.find("generated_from"); it != obj.end() && !it->is_null()) {
        trace.generated_from = non_negative(obj, "generated_from");
    }
    if (auto it = obj.find("meta"); it != obj.end() && !it->is_null()) {
        if (!it->is_object()) throw SchemaError("field 'meta' must be an object");
        for (const auto& [k, v] : it->items()) {
            if (!v.is_string()) throw SchemaError("meta value for '" + k + "' must be a string");
            trace.meta.emplace(k, v.get<std::string>());
        }
    }
    auto tokens = obj.find("tokens");
    if (tokens == obj.end()) throw SchemaError("missing field 'tokens'");
    if (!tokens->is_array()) throw SchemaError("field 'tokens' must be an array");
    trace.tokens.reserve(tokens->size());
    for (const auto& t : *tokens) {
        if (!t.is_object()) throw SchemaError("token must be an object");
        TokenRecord rec;
        rec.text = required<std::string>(t, "text");
        rec.byte_start = non_negative(t, "byte_start");
        rec.byte_end = non_negative(t, "byte_end");
        auto lp = t.find("logprob");
        if (lp == t.end()) throw SchemaError("missing field 'logprob'");
        if (!lp->is_number()) throw SchemaError("field 'logprob' must be a number");
        rec.logprob = lp->get<double>();
        trace.tokens.push_back(std::move(rec));
    }
    return validate_trace(std::move(trace));
}

std::string serialize_trace(const TokenTrace& trace) {
    json obj;
    obj["sample_id"] = trace.sample_id;
    obj["source"] = trace.source;
    obj["generated_from"] = trace.generated_from ? json(*trace.generated_from) : json(nullptr);
    obj["meta"] = json::object();
    for (const auto& [k, v] : trace.meta) obj["meta"][k] = v;
    json tokens = json::array();
    for (const auto& t : trace.tokens) {
        tokens.push_back({{"text", t.text},
                          {"byte_start", t.byte_start},
                          {"byte_end", t.byte_end},
                          {"logprob", t.logprob}});
    }
    obj["tokens"] = std::move(tokens);
    return obj.dump(-1, ' ', false, json::error_handler_t::strict);
}

std::size_t covered_bytes(const TokenTrace& trace) noexcept {
    std::size_t total = 0;
    for (const auto& t : trace.tokens) total += t.byte_end - t.byte_start;
    return total;
}

}  // namespace psc
