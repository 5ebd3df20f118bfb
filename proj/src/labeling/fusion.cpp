#include "automesc/labeling/fusion.hpp"

#include <algorithm>
#include <map>

#include "automesc/util/error.hpp"

namespace automesc::labeling {

std::string_view to_string(Verdict verdict)
{
    return verdict == Verdict::Noise ? "noise" : "genuine_fix";
}

std::optional<Verdict> parse_verdict(std::string_view s)
{
    if (s == "noise")
        return Verdict::Noise;
    if (s == "genuine_fix")
        return Verdict::GenuineFix;
    return std::nullopt;
}

std::vector<LabeledFinding> fuse(const std::vector<tools::RawFinding>& findings, const Taxonomy& taxonomy,
                                 const FuseOptions& options)
{
    // canonical -> line -> tools reporting it there
    std::map<std::string, std::map<std::size_t, std::set<ToolId>>> votes;
    std::string path;
    for (const auto& f : findings) {
        auto canonical = taxonomy.unify_label(f.tool, f.raw_label);
        if (!canonical)
            continue;
        if (!taxonomy.contains(*canonical))
            throw Error(ErrorCode::UnknownCanonicalId, *canonical);
        votes[*canonical][f.line].insert(f.tool);
        if (path.empty())
            path = f.path;
    }

    std::vector<LabeledFinding> out;
    for (const auto& [canonical, by_line] : votes) {
        const auto& row = taxonomy.matrix().row(canonical);
        for (const auto& [line, tools_here] : by_line) {
            std::set<ToolId> support;
            if (line == 0 || options.position_window == 0) {
                support = tools_here;
            } else {
                const std::size_t lo = line > options.position_window ? line - options.position_window : 1;
                for (auto it = by_line.lower_bound(lo); it != by_line.end() && it->first <= line + options.position_window; ++it)
                    support.insert(it->second.begin(), it->second.end());
            }
            // A tool outside the capability row cannot map to the type, so
            // this only guards a hand-built taxonomy.
            std::erase_if(support, [&](ToolId t) { return !row.supporting_tools.count(t); });
            const int count = static_cast<int>(support.size());
            if (count >= row.threshold)
                out.push_back({canonical, path, line, std::move(support), count, row.threshold, std::nullopt});
        }
    }
    std::sort(out.begin(), out.end(), [](const LabeledFinding& a, const LabeledFinding& b) {
        return std::tie(a.line, a.canonical) < std::tie(b.line, b.canonical);
    });
    return out;
}

NoiseVerdict filter_noise(const std::string& commit_hash, const std::string& path,
                          const std::vector<LabeledFinding>& pre_fix_labels,
                          const std::vector<tools::RawFinding>& post_fix_findings, const Taxonomy& taxonomy,
                          const FuseOptions& options)
{
    std::set<std::string> pre_types;
    for (const auto& l : pre_fix_labels)
        pre_types.insert(l.canonical);

    NoiseVerdict v{commit_hash, path, Verdict::GenuineFix, {}, {}};
    for (auto& l : fuse(post_fix_findings, taxonomy, options)) {
        if (l.path.empty())
            l.path = path;
        (pre_types.count(l.canonical) ? v.evidence : v.residual).push_back(std::move(l));
    }
    if (!v.evidence.empty())
        v.verdict = Verdict::Noise;
    return v;
}

LabeledFinding attach_severity(LabeledFinding label, std::optional<SeverityLevel> cve_severity, const Taxonomy& taxonomy)
{
    if (cve_severity)
        label.severity = cve_severity;
    else
        label.severity = taxonomy.default_severity(label.canonical).value_or(SeverityLevel::Low);
    return label;
}

} // namespace automesc::labeling
