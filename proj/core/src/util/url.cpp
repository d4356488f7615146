#include "psc/util/url.hpp"

#include "psc/errors.hpp"

namespace psc::util {

HttpUrl split_url(const std::string& url) {
    auto scheme = url.find("://");
    if (scheme == std::string::npos || (url.compare(0, scheme, "http") != 0 && url.compare(0, scheme, "https") != 0)) {
        throw ConfigError("endpoint url must start with http:// or https://: " + url);
    }
    auto slash = url.find('/', scheme + 3);
    HttpUrl out;
    out.origin = url.substr(0, slash);
    if (slash != std::string::npos) out.prefix = url.substr(slash);
    while (!out.prefix.empty() && out.prefix.back() == '/') out.prefix.pop_back();
    return out;
}

}  // namespace psc::util
