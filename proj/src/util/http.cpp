#include "automesc/util/http.hpp"

#include <httplib.h>

#include "automesc/util/error.hpp"
#include "automesc/util/strings.hpp"

namespace automesc::util {

Url parse_url(const std::string& url)
{
    Url u;
    auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos)
        throw Error(ErrorCode::NetworkError, "malformed url: " + url);
    u.scheme = to_lower(url.substr(0, scheme_end));
    if (u.scheme != "http" && u.scheme != "https")
        throw Error(ErrorCode::NetworkError, "unsupported scheme: " + url);
    auto rest = url.substr(scheme_end + 3);
    auto slash = rest.find('/');
    std::string authority = rest.substr(0, slash);
    u.path_and_query = slash == std::string::npos ? "/" : rest.substr(slash);
    auto colon = authority.rfind(':');
    if (colon != std::string::npos) {
        auto port = parse_int(authority.substr(colon + 1));
        if (!port)
            throw Error(ErrorCode::NetworkError, "malformed port: " + url);
        u.port = static_cast<int>(*port);
        u.host = authority.substr(0, colon);
    } else {
        u.host = authority;
        u.port = u.scheme == "https" ? 443 : 80;
    }
    if (u.host.empty())
        throw Error(ErrorCode::NetworkError, "missing host: " + url);
    return u;
}

HttpResponse http_get(const std::string& url,
                      const std::map<std::string, std::string>& headers,
                      std::chrono::seconds timeout)
{
    const Url u = parse_url(url);
    httplib::Headers hs;
    for (const auto& [k, v] : headers)
        hs.emplace(k, v);

    auto perform = [&](auto& client) {
        client.set_connection_timeout(timeout);
        client.set_read_timeout(timeout);
        client.set_follow_location(true);
        return client.Get(u.path_and_query, hs);
    };

    httplib::Result res;
    if (u.scheme == "https") {
        httplib::SSLClient client(u.host, u.port);
        res = perform(client);
    } else {
        httplib::Client client(u.host, u.port);
        res = perform(client);
    }
    if (!res)
        throw Error(ErrorCode::NetworkError, "GET " + url + ": " + httplib::to_string(res.error()));

    HttpResponse out;
    out.status = res->status;
    out.body = res->body;
    for (const auto& [k, v] : res->headers)
        out.headers[to_lower(k)] = v;
    return out;
}

} // namespace automesc::util
