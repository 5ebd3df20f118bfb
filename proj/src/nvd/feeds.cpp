#include "automesc/nvd/feeds.hpp"

#include <cctype>
#include <filesystem>
#include <future>

#include "automesc/util/error.hpp"
#include "automesc/util/gzip.hpp"
#include "automesc/util/hash.hpp"
#include "automesc/util/http.hpp"
#include "automesc/util/strings.hpp"

namespace automesc::nvd {

namespace fs = std::filesystem;

std::string DirectoryFeedSource::fetch_gz(const std::string& name)
{
    const auto path = fs::path(dir_) / ("nvdcve-1.1-" + name + ".json.gz");
    if (!fs::exists(path))
        throw Error(ErrorCode::NetworkError, "feed not found: " + path.string());
    return util::read_file(path.string());
}

std::optional<std::string> DirectoryFeedSource::fetch_meta(const std::string& name)
{
    const auto path = fs::path(dir_) / ("nvdcve-1.1-" + name + ".meta");
    if (!fs::exists(path))
        return std::nullopt;
    return util::read_file(path.string());
}

std::string HttpFeedSource::url_for(const std::string& name, const std::string& suffix) const
{
    std::string url = url_template_;
    auto pos = url.find("{name}");
    if (pos == std::string::npos)
        throw Error(ErrorCode::ConfigError, "feed url template lacks {name}: " + url_template_);
    url.replace(pos, 6, name);
    if (!suffix.empty() && util::ends_with(url, ".json.gz"))
        url = url.substr(0, url.size() - 8) + suffix;
    return url;
}

std::string HttpFeedSource::fetch_gz(const std::string& name)
{
    auto res = util::http_get(url_for(name, ""));
    if (res.status != 200)
        throw Error(ErrorCode::NetworkError, "feed " + name + ": HTTP " + std::to_string(res.status));
    return res.body;
}

std::optional<std::string> HttpFeedSource::fetch_meta(const std::string& name)
{
    auto res = util::http_get(url_for(name, ".meta"));
    if (res.status == 404)
        return std::nullopt;
    if (res.status != 200)
        throw Error(ErrorCode::NetworkError, "feed meta " + name + ": HTTP " + std::to_string(res.status));
    return res.body;
}

std::optional<std::string> meta_sha256(const std::string& meta)
{
    for (const auto& line : util::split_lines(meta)) {
        auto l = util::trim(line);
        if (l.rfind("sha256:", 0) == 0) {
            std::string digest(util::trim(l.substr(7)));
            for (auto& c : digest)
                c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
            return digest;
        }
    }
    return std::nullopt;
}

FeedDocument fetch_feed(FeedSource& source, const std::string& name)
{
    const std::string gz = source.fetch_gz(name);
    std::string json = util::gunzip(gz);
    if (auto meta = source.fetch_meta(name)) {
        if (auto expected = meta_sha256(*meta)) {
            std::string actual = util::sha256_hex(json);
            for (auto& c : actual)
                c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
            if (actual != *expected)
                throw Error(ErrorCode::ChecksumMismatch, "feed " + name + ": sha256 " + actual + " != published " + *expected);
        }
    }
    return {name, std::move(json)};
}

std::vector<FeedDocument> fetch_feeds(FeedSource& source, int first_year, int last_year, bool include_modified)
{
    if (first_year < 2016)
        throw Error(ErrorCode::ConfigError, "feed years start at 2016, got " + std::to_string(first_year));
    std::vector<std::string> names;
    for (int y = first_year; y <= last_year; ++y)
        names.push_back(std::to_string(y));
    if (include_modified)
        names.push_back("modified");

    std::vector<std::future<FeedDocument>> pending;
    for (const auto& n : names)
        pending.push_back(std::async(std::launch::async, [&source, n] { return fetch_feed(source, n); }));
    std::vector<FeedDocument> docs;
    for (auto& f : pending)
        docs.push_back(f.get());
    return docs;
}

} // namespace automesc::nvd
