#include "automesc/nvd/cve.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <map>

#include "automesc/util/error.hpp"
#include "automesc/util/strings.hpp"

namespace automesc::nvd {

using nlohmann::json;

SeverityLevel severity_from_score(double score)
{
    score = std::clamp(score, 0.0, 10.0);
    if (score >= 7.0)
        return SeverityLevel::High;
    if (score >= 4.0)
        return SeverityLevel::Medium;
    return SeverityLevel::Low;
}

SeverityLevel derive_severity(const std::optional<Cvss>& v3, const std::optional<Cvss>& v2)
{
    if (v3)
        return severity_from_score(v3->base_score);
    if (v2)
        return severity_from_score(v2->base_score);
    return SeverityLevel::Low;
}

bool is_cve_id(std::string_view id)
{
    // CVE-YYYY-NNNN with four or more digits in the sequence part.
    if (id.size() < 13 || id.substr(0, 4) != "CVE-" || id[8] != '-')
        return false;
    auto digits = [](std::string_view s) {
        return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
    };
    return digits(id.substr(4, 4)) && digits(id.substr(9)) && id.size() - 9 >= 4;
}

std::vector<std::string> default_filter_terms()
{
    return {"smart contract", "Solidity", "Vyper", "Ethereum"};
}

namespace {

std::vector<std::string> descriptions(const json& cve)
{
    std::vector<std::string> out;
    auto d = cve.find("description");
    if (d == cve.end() || !d->is_object())
        return out;
    auto data = d->find("description_data");
    if (data == d->end() || !data->is_array())
        return out;
    for (const auto& item : *data)
        if (item.is_object() && item.contains("value") && item["value"].is_string())
            out.push_back(item["value"].get<std::string>());
    return out;
}

std::vector<std::string> reference_urls(const json& cve)
{
    std::vector<std::string> out;
    auto r = cve.find("references");
    if (r == cve.end() || !r->is_object())
        return out;
    auto data = r->find("reference_data");
    if (data == r->end() || !data->is_array())
        return out;
    for (const auto& item : *data)
        if (item.is_object() && item.contains("url") && item["url"].is_string())
            out.push_back(item["url"].get<std::string>());
    return out;
}

bool matches_terms(const std::vector<std::string>& texts, const std::vector<std::string>& terms)
{
    for (const auto& t : texts) {
        const auto lower = util::to_lower(t);
        for (const auto& term : terms)
            if (lower.find(util::to_lower(term)) != std::string::npos)
                return true;
    }
    return false;
}

const json& require(const json& j, const char* key, const std::string& ctx)
{
    auto it = j.find(key);
    if (it == j.end() || it->is_null())
        throw Error(ErrorCode::SchemaMismatch, ctx + ": missing '" + key + "'");
    return *it;
}

std::string require_string(const json& j, const char* key, const std::string& ctx)
{
    const auto& v = require(j, key, ctx);
    if (!v.is_string())
        throw Error(ErrorCode::SchemaMismatch, ctx + ": '" + key + "' is not a string");
    return v.get<std::string>();
}

std::optional<Cvss> read_cvss(const json& impact, const char* metric, const char* inner, const std::string& ctx)
{
    auto m = impact.find(metric);
    if (m == impact.end() || !m->is_object())
        return std::nullopt;
    const auto& c = require(*m, inner, ctx);
    Cvss out;
    out.vector = require_string(c, "vectorString", ctx);
    const auto& score = require(c, "baseScore", ctx);
    if (!score.is_number())
        throw Error(ErrorCode::SchemaMismatch, ctx + ": baseScore is not a number");
    out.base_score = score.get<double>();
    if (out.base_score < 0.0 || out.base_score > 10.0)
        throw Error(ErrorCode::SchemaMismatch, ctx + ": baseScore out of range");
    return out;
}

CveRecord extract(const json& item)
{
    if (!item.is_object())
        throw Error(ErrorCode::SchemaMismatch, "entry is not an object");
    const auto& cve = require(item, "cve", "entry");
    const auto& meta = require(cve, "CVE_data_meta", "entry");
    CveRecord r;
    r.cve_id = require_string(meta, "ID", "entry");
    if (!is_cve_id(r.cve_id))
        throw Error(ErrorCode::SchemaMismatch, "malformed CVE id '" + r.cve_id + "'");
    const std::string ctx = r.cve_id;
    r.published_date = require_string(item, "publishedDate", ctx);
    r.last_modified_date = require_string(item, "lastModifiedDate", ctx);
    r.description = util::join(descriptions(cve), "\n");
    r.reference_urls = reference_urls(cve);

    if (auto pt = cve.find("problemtype"); pt != cve.end() && pt->is_object()) {
        for (const auto& p : pt->value("problemtype_data", json::array()))
            for (const auto& d : p.value("description", json::array()))
                if (d.contains("value") && d["value"].is_string()) {
                    auto id = d["value"].get<std::string>();
                    if (std::find(r.cwe_ids.begin(), r.cwe_ids.end(), id) == r.cwe_ids.end())
                        r.cwe_ids.push_back(id);
                }
    }

    if (auto impact = item.find("impact"); impact != item.end() && impact->is_object()) {
        r.cvss_v3 = read_cvss(*impact, "baseMetricV3", "cvssV3", ctx);
        r.cvss_v2 = read_cvss(*impact, "baseMetricV2", "cvssV2", ctx);
        if (auto v3 = impact->find("baseMetricV3"); v3 != impact->end() && v3->is_object()) {
            const auto& c = (*v3)["cvssV3"];
            if (c.contains("privilegesRequired") && c["privilegesRequired"].is_string())
                r.user_privilege = c["privilegesRequired"].get<std::string>();
            if (c.contains("userInteraction") && c["userInteraction"].is_string())
                r.user_interaction = c["userInteraction"].get<std::string>();
        }
        if (auto v2 = impact->find("baseMetricV2"); v2 != impact->end() && v2->is_object()) {
            if (!r.user_privilege) {
                for (const char* k : {"obtainAllPrivilege", "obtainUserPrivilege", "obtainOtherPrivilege"})
                    if (v2->contains(k) && (*v2)[k].is_boolean() && (*v2)[k].get<bool>()) {
                        r.user_privilege = k;
                        break;
                    }
            }
            if (!r.user_interaction && v2->contains("userInteractionRequired") && (*v2)["userInteractionRequired"].is_boolean())
                r.user_interaction = (*v2)["userInteractionRequired"].get<bool>() ? "REQUIRED" : "NONE";
        }
    }
    r.severity = derive_severity(r.cvss_v3, r.cvss_v2);
    return r;
}

} // namespace

FilterResult parse_and_filter(std::string_view feed_json, const std::vector<std::string>& filter_terms)
{
    json doc;
    try {
        doc = json::parse(feed_json);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::SchemaMismatch, std::string("feed is not JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("CVE_Items") || !doc["CVE_Items"].is_array())
        throw Error(ErrorCode::SchemaMismatch, "feed has no CVE_Items array");

    FilterResult out;
    for (const auto& item : doc["CVE_Items"]) {
        ++out.total_entries;
        std::vector<std::string> texts;
        if (item.is_object() && item.contains("cve") && item["cve"].is_object()) {
            texts = descriptions(item["cve"]);
            auto refs = reference_urls(item["cve"]);
            texts.insert(texts.end(), refs.begin(), refs.end());
        }
        if (!matches_terms(texts, filter_terms))
            continue;
        ++out.matching_entries;
        try {
            out.records.push_back(extract(item));
        } catch (const Error& e) {
            out.warnings.push_back(std::string(e.what()) + " (entry " + std::to_string(out.total_entries) + ")");
        }
    }
    return out;
}

std::vector<CveRecord> dedupe(std::vector<CveRecord> records)
{
    std::map<std::string, CveRecord> latest;
    for (auto& r : records) {
        auto it = latest.find(r.cve_id);
        if (it == latest.end())
            latest.emplace(r.cve_id, std::move(r));
        else if (r.last_modified_date > it->second.last_modified_date)
            it->second = std::move(r);
    }
    std::vector<CveRecord> out;
    out.reserve(latest.size());
    for (auto& [_, r] : latest)
        out.push_back(std::move(r));
    return out;
}

std::vector<CveCommitLink> link_references(const CveRecord& record)
{
    std::vector<CveCommitLink> out;
    for (const auto& url : record.reference_urls) {
        auto scheme = url.find("://");
        if (scheme == std::string::npos)
            continue;
        const std::string rest = url.substr(scheme + 3);
        auto parts = util::split(rest, '/');
        if (parts.size() < 3)
            continue;
        std::string host = util::to_lower(parts[0]);
        if (host.rfind("www.", 0) == 0)
            host = host.substr(4);
        if (host != "github.com" && host != "gitlab.com" && host != "bitbucket.org")
            continue;
        std::string owner = parts[1], repo = parts[2];
        for (auto* s : {&owner, &repo}) {
            auto q = s->find_first_of("?#");
            if (q != std::string::npos)
                s->resize(q);
        }
        if (util::ends_with(repo, ".git"))
            repo.resize(repo.size() - 4);
        if (owner.empty() || repo.empty())
            continue;

        CveCommitLink link{record.cve_id, "https://" + host + "/" + owner + "/" + repo, std::nullopt};
        // github: /commit/<h>; gitlab: /-/commit/<h>; bitbucket: /commits/<h>
        for (std::size_t i = 3; i + 1 < parts.size(); ++i) {
            if (parts[i] == "commit" || parts[i] == "commits") {
                std::string h = parts[i + 1];
                auto q = h.find_first_of("?#.");
                if (q != std::string::npos)
                    h.resize(q);
                if (util::is_hex40(h))
                    link.commit_hash = util::to_lower(h);
                break;
            }
        }
        bool duplicate = std::any_of(out.begin(), out.end(), [&](const CveCommitLink& l) {
            return l.repo_url == link.repo_url && l.commit_hash == link.commit_hash;
        });
        if (!duplicate)
            out.push_back(std::move(link));
    }
    return out;
}

std::vector<CweType> cwe_types_for(const CveRecord& record)
{
    std::vector<CweType> out;
    for (const auto& id : record.cwe_ids) {
        CweType t;
        t.cwe_id = id;
        if (id.rfind("CWE-", 0) == 0) {
            t.url = "https://cwe.mitre.org/data/definitions/" + id.substr(4) + ".html";
            t.is_category = false;
        } else {
            t.url = "https://nvd.nist.gov/vuln/categories";
            t.is_category = true;
            t.name = id == "NVD-CWE-noinfo" ? "Insufficient Information" : id == "NVD-CWE-Other" ? "Other" : id;
        }
        out.push_back(std::move(t));
    }
    return out;
}

} // namespace automesc::nvd
