#pragma once

#include <chrono>
#include <map>
#include <memory>
#include <string>

#include "claimguard/core/errors.hpp"

namespace claimguard::net {

struct HttpRequest {
    std::string method = "GET";
    std::string url;  // scheme://host[:port]/path[?query]
    std::map<std::string, std::string> headers;
    std::string body;
    std::string content_type = "application/json";
    std::chrono::milliseconds timeout{30000};
};

struct HttpResponse {
    int status = 0;
    std::string body;
};

class TransportError : public Error {
public:
    enum class Kind { Timeout, Connection, BadUrl };

    TransportError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}

    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

/// Minimal blocking HTTP client seam. Providers take one of these so tests
/// can swap in fakes or talk to a local server.
class HttpTransport {
public:
    virtual ~HttpTransport() = default;
    virtual HttpResponse send(const HttpRequest& request) = 0;
};

/// cpp-httplib backed transport; a fresh connection per request.
std::shared_ptr<HttpTransport> make_default_transport();

/// Percent-encodes a query parameter value.
std::string url_encode(std::string_view value);

std::string url_decode(std::string_view value);

/// Decoded key/value pairs of the query part of a URL.
std::map<std::string, std::string> query_params(std::string_view url);

} // namespace claimguard::net
