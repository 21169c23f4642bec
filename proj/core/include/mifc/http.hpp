#pragma once

#include <chrono>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace mifc {

using HttpHeaders = std::vector<std::pair<std::string, std::string>>;

struct HttpResponse {
    int status = 0;
    std::string body;
};

/// Minimal POST-only transport. Connection failures and timeouts are thrown as
/// TransportError with status 0; any HTTP status is returned, not thrown.
class HttpTransport {
public:
    virtual ~HttpTransport() = default;
    virtual HttpResponse post(const std::string& url, const std::string& body, const HttpHeaders& headers,
                              std::chrono::milliseconds timeout) = 0;
};

/// cpp-httplib backed transport (http:// and https://).
std::shared_ptr<HttpTransport> make_default_transport();

}  // namespace mifc
