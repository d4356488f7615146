#include "psc/smells/diagnostics_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "psc/errors.hpp"

namespace psc::smells {

using nlohmann::json;

namespace {

std::optional<int> opt_int(const json& j, const char* key) {
    if (!j.contains(key) || j[key].is_null()) return std::nullopt;
    if (!j[key].is_number_integer()) throw SchemaError(std::string("field '") + key + "' must be an integer");
    return j[key].get<int>();
}

int req_int(const json& j, const char* key) {
    if (!j.contains(key)) throw SchemaError(std::string("missing field '") + key + "'");
    auto v = opt_int(j, key);
    if (!v) throw SchemaError(std::string("field '") + key + "' must not be null");
    return *v;
}

std::string req_str(const json& j, const char* key) {
    if (!j.contains(key)) throw SchemaError(std::string("missing field '") + key + "'");
    if (!j[key].is_string()) throw SchemaError(std::string("field '") + key + "' must be a string");
    return j[key].get<std::string>();
}

std::string opt_str(const json& j, const char* key) {
    if (!j.contains(key) || j[key].is_null()) return {};
    if (!j[key].is_string()) throw SchemaError(std::string("field '") + key + "' must be a string");
    return j[key].get<std::string>();
}

DiagnosticsRecord parse_record(const json& j) {
    if (!j.is_object()) throw SchemaError("diagnostics record must be an object");
    DiagnosticsRecord rec;
    rec.sample_id = req_str(j, "sample_id");
    if (j.contains("linter_version") && !j["linter_version"].is_null()) {
        rec.linter_version = req_str(j, "linter_version");
    }
    if (!j.contains("smells") || !j["smells"].is_array()) throw SchemaError("missing array 'smells'");
    for (const auto& s : j["smells"]) {
        if (!s.is_object()) throw SchemaError("smell entry must be an object");
        SmellDiagnostic d;
        d.sample_id = rec.sample_id;
        d.rule_id = req_str(s, "rule_id");
        d.symbol = opt_str(s, "symbol");
        d.message = opt_str(s, "message");
        d.start_line = req_int(s, "start_line");
        d.start_col = req_int(s, "start_col");
        d.end_line = opt_int(s, "end_line");
        d.end_col = opt_int(s, "end_col");
        if (d.start_line < 1) throw SchemaError("start_line must be >= 1");
        if (d.start_col < 0) throw SchemaError("start_col must be >= 0");
        if (d.end_line.has_value() != d.end_col.has_value()) {
            throw SchemaError("end_line and end_col must be both present or both null");
        }
        if (d.has_end() && std::pair(*d.end_line, *d.end_col) < std::pair(d.start_line, d.start_col)) {
            throw SchemaError("end position precedes start position");
        }
        rec.smells.push_back(std::move(d));
    }
    sort_diagnostics(rec.smells);
    return rec;
}

}  // namespace

std::vector<DiagnosticsRecord> parse_diagnostics(const std::string& text) {
    std::vector<DiagnosticsRecord> out;
    json doc = json::parse(text, nullptr, false);
    if (!doc.is_discarded()) {
        if (doc.is_array()) {
            for (const auto& r : doc) out.push_back(parse_record(r));
        } else {
            out.push_back(parse_record(doc));
        }
        return out;
    }
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded()) throw schema_error_at(line_no, "invalid JSON");
        try {
            out.push_back(parse_record(j));
        } catch (const SchemaError& e) {
            throw schema_error_at(line_no, e.what());
        }
    }
    return out;
}

std::vector<SmellDiagnostic> ingest_diagnostics(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    std::vector<SmellDiagnostic> out;
    for (auto& rec : parse_diagnostics(ss.str())) {
        for (auto& d : rec.smells) out.push_back(std::move(d));
    }
    std::stable_sort(out.begin(), out.end(), [](const SmellDiagnostic& a, const SmellDiagnostic& b) {
        if (a.sample_id != b.sample_id) return a.sample_id < b.sample_id;
        return diagnostic_less(a, b);
    });
    return out;
}

std::string to_json(const DiagnosticsRecord& record, int indent) {
    json smells = json::array();
    for (const auto& d : record.smells) {
        smells.push_back({{"rule_id", d.rule_id},
                          {"symbol", d.symbol},
                          {"start_line", d.start_line},
                          {"start_col", d.start_col},
                          {"end_line", d.end_line ? json(*d.end_line) : json(nullptr)},
                          {"end_col", d.end_col ? json(*d.end_col) : json(nullptr)},
                          {"message", d.message}});
    }
    json j = {{"sample_id", record.sample_id}, {"smells", smells}};
    if (record.linter_version) j["linter_version"] = *record.linter_version;
    return j.dump(indent, ' ', false, json::error_handler_t::replace);
}

}  // namespace psc::smells
