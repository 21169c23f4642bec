#include <httplib.h>

#include "mifc/error.hpp"
#include "mifc/http.hpp"

namespace mifc {
namespace {

struct SplitUrl {
    std::string origin;  // scheme://host[:port]
    std::string path;
};

SplitUrl split_url(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw ConfigError("URL without scheme: '" + url + "'");
    const auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {url, "/"};
    return {url.substr(0, path_start), url.substr(path_start)};
}

class HttplibTransport final : public HttpTransport {
public:
    HttpResponse post(const std::string& url, const std::string& body, const HttpHeaders& headers,
                      std::chrono::milliseconds timeout) override {
        const SplitUrl parts = split_url(url);
        httplib::Client client(parts.origin);
        client.set_connection_timeout(timeout);
        client.set_read_timeout(timeout);
        client.set_write_timeout(timeout);
        httplib::Headers h;
        for (const auto& [k, v] : headers) h.emplace(k, v);
        auto result = client.Post(parts.path, h, body, "application/json");
        if (!result) {
            throw TransportError("HTTP request to " + parts.origin + " failed: " +
                                 httplib::to_string(result.error()));
        }
        return {result->status, result->body};
    }
};

}  // namespace

std::shared_ptr<HttpTransport> make_default_transport() { return std::make_shared<HttplibTransport>(); }

}  // namespace mifc
