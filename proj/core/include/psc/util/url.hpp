#pragma once

#include <string>

namespace psc::util {

/// "http://host:port/prefix" split into the part httplib connects to and the path prefix.
struct HttpUrl {
    std::string origin;  // scheme://host[:port]
    std::string prefix;  // no trailing slash, may be empty
};

/// Throws ConfigError unless the URL starts with http:// or https://.
HttpUrl split_url(const std::string& url);

}  // namespace psc::util
