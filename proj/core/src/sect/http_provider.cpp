#include <httplib.h>

#include <json.hpp>

#include "psc/errors.hpp"
#include "psc/sect/transform.hpp"
#include "psc/util/url.hpp"

namespace psc::sect {

HttpSubstituteProvider::HttpSubstituteProvider(std::string base_url, int timeout_seconds)
    : base_url_(std::move(base_url)), timeout_seconds_(timeout_seconds) {
    (void)util::split_url(base_url_);
}

std::vector<std::string> HttpSubstituteProvider::substitutes(const std::string& name, std::string_view snippet) const {
    auto url = util::split_url(base_url_);
    httplib::Client cli(url.origin);
    cli.set_connection_timeout(timeout_seconds_);
    cli.set_read_timeout(timeout_seconds_);
    nlohmann::json body = {{"name", name}, {"context", std::string(snippet)}};
    auto res = cli.Post(url.prefix + "/substitute", body.dump(), "application/json");
    std::vector<std::string> out;
    if (res && res->status == 200) {
        try {
            auto j = nlohmann::json::parse(res->body);
            for (const auto& s : j.at("substitutes")) out.push_back(s.get<std::string>());
        } catch (const nlohmann::json::exception&) {
            out.clear();
        }
    }
    auto table = fallback_.substitutes(name, snippet);
    out.insert(out.end(), table.begin(), table.end());
    return out;
}

}  // namespace psc::sect
