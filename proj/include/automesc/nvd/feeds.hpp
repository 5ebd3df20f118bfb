#pragma once

#include <optional>
#include <string>
#include <vector>

namespace automesc::nvd {

struct FeedDocument {
    std::string name; // "2016" ... or "modified"
    std::string json;
};

/// Source of gzipped NVD JSON 1.1 feeds and their .meta companions.
class FeedSource {
public:
    virtual ~FeedSource() = default;
    virtual std::string fetch_gz(const std::string& name) = 0;
    // nullopt when the source publishes no checksum for the feed.
    virtual std::optional<std::string> fetch_meta(const std::string& name) = 0;
};

/// nvdcve-1.1-<name>.json.gz (+ .meta) files in one directory.
class DirectoryFeedSource : public FeedSource {
public:
    explicit DirectoryFeedSource(std::string dir) : dir_(std::move(dir)) {}
    std::string fetch_gz(const std::string& name) override;
    std::optional<std::string> fetch_meta(const std::string& name) override;

private:
    std::string dir_;
};

/// HTTPS download; `url_template` contains "{name}", e.g.
/// https://nvd.nist.gov/feeds/json/cve/1.1/nvdcve-1.1-{name}.json.gz
class HttpFeedSource : public FeedSource {
public:
    explicit HttpFeedSource(std::string url_template) : url_template_(std::move(url_template)) {}
    std::string fetch_gz(const std::string& name) override;
    std::optional<std::string> fetch_meta(const std::string& name) override;

private:
    std::string url_for(const std::string& name, const std::string& suffix) const;
    std::string url_template_;
};

// The "sha256:" line of a .meta document, uppercased; nullopt if absent.
std::optional<std::string> meta_sha256(const std::string& meta);

// One decompressed, checksum-verified feed ("2016", ..., "modified").
FeedDocument fetch_feed(FeedSource& source, const std::string& name);

// Downloads one document per year in [first_year, last_year] plus the
// "modified" feed, decompressing and checking the published SHA-256 of the
// uncompressed JSON. Years are fetched concurrently. Throws
// Error(ChecksumMismatch) on a corrupt payload or digest mismatch,
// Error(NetworkError) on transport failure, Error(ConfigError) for years
// before 2016.
std::vector<FeedDocument> fetch_feeds(FeedSource& source, int first_year, int last_year, bool include_modified = true);

} // namespace automesc::nvd
