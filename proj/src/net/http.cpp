#include "claimguard/net/http.hpp"

#include <httplib.h>

#include <fmt/format.h>

namespace claimguard::net {

namespace {

struct SplitUrl {
    std::string origin;  // scheme://host:port
    std::string path;
};

SplitUrl split_url(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) {
        throw TransportError(TransportError::Kind::BadUrl, "malformed URL: " + url);
    }
    const auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {url, "/"};
    return {url.substr(0, path_start), url.substr(path_start)};
}

class HttplibTransport final : public HttpTransport {
public:
    HttpResponse send(const HttpRequest& request) override {
        const auto [origin, path] = split_url(request.url);
        httplib::Client client(origin);
        if (!client.is_valid()) {
            throw TransportError(TransportError::Kind::BadUrl, "unsupported URL: " + origin);
        }
        client.set_connection_timeout(request.timeout);
        client.set_read_timeout(request.timeout);
        client.set_write_timeout(request.timeout);

        httplib::Headers headers(request.headers.begin(), request.headers.end());
        httplib::Result result = request.method == "POST"
                                     ? client.Post(path, headers, request.body, request.content_type)
                                     : client.Get(path, headers);
        if (!result) {
            const auto err = result.error();
            const auto kind = (err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read)
                                  ? TransportError::Kind::Timeout
                                  : TransportError::Kind::Connection;
            throw TransportError(kind, fmt::format("{} {} failed: {}", request.method, origin,
                                                   httplib::to_string(err)));
        }
        return {result->status, result->body};
    }
};

} // namespace

std::shared_ptr<HttpTransport> make_default_transport() {
    return std::make_shared<HttplibTransport>();
}

std::string url_encode(std::string_view value) {
    std::string out;
    out.reserve(value.size() * 3);
    for (unsigned char c : value) {
        if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
            out.push_back(static_cast<char>(c));
        } else {
            out += fmt::format("%{:02X}", c);
        }
    }
    return out;
}

std::string url_decode(std::string_view value) {
    std::string out;
    out.reserve(value.size());
    for (std::size_t i = 0; i < value.size(); ++i) {
        if (value[i] == '+') {
            out.push_back(' ');
        } else if (value[i] == '%' && i + 2 < value.size() && std::isxdigit(static_cast<unsigned char>(value[i + 1])) &&
                   std::isxdigit(static_cast<unsigned char>(value[i + 2]))) {
            out.push_back(static_cast<char>(std::stoi(std::string(value.substr(i + 1, 2)), nullptr, 16)));
            i += 2;
        } else {
            out.push_back(value[i]);
        }
    }
    return out;
}

std::map<std::string, std::string> query_params(std::string_view url) {
    std::map<std::string, std::string> params;
    const auto q = url.find('?');
    if (q == std::string_view::npos) return params;
    auto rest = url.substr(q + 1);
    while (!rest.empty()) {
        const auto amp = rest.find('&');
        const auto pair = rest.substr(0, amp);
        const auto eq = pair.find('=');
        if (eq == std::string_view::npos) {
            params[url_decode(pair)] = "";
        } else {
            params[url_decode(pair.substr(0, eq))] = url_decode(pair.substr(eq + 1));
        }
        if (amp == std::string_view::npos) break;
        rest.remove_prefix(amp + 1);
    }
    return params;
}

} // namespace claimguard::net
