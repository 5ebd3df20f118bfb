#pragma once

#include <chrono>
#include <map>
#include <string>

namespace automesc::util {

struct HttpResponse {
    int status = 0;
    std::map<std::string, std::string> headers; // keys lowercased
    std::string body;

    std::string header(const std::string& lowercase_name) const
    {
        auto it = headers.find(lowercase_name);
        return it == headers.end() ? std::string{} : it->second;
    }
};

struct Url {
    std::string scheme; // http | https
    std::string host;
    int port = 0;
    std::string path_and_query;
};

// Throws Error(NetworkError) on malformed input.
Url parse_url(const std::string& url);

// Plain GET. Transport failures throw Error(NetworkError); HTTP error statuses
// are returned to the caller.
HttpResponse http_get(const std::string& url,
                      const std::map<std::string, std::string>& headers = {},
                      std::chrono::seconds timeout = std::chrono::seconds(60));

} // namespace automesc::util
