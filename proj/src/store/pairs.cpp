#include "automesc/store/pairs.hpp"

#include <algorithm>
#include <map>

#include "automesc/util/strings.hpp"

namespace automesc::store {

std::string_view to_string(Granularity g)
{
    switch (g) {
    case Granularity::File: return "file";
    case Granularity::Method: return "method";
    case Granularity::Line: return "line";
    }
    return "?";
}

std::optional<Granularity> parse_granularity(std::string_view s)
{
    if (s == "file")
        return Granularity::File;
    if (s == "method")
        return Granularity::Method;
    if (s == "line")
        return Granularity::Line;
    return std::nullopt;
}

std::string make_pair_id(const std::string& commit_hash, const std::string& path, Granularity g,
                         const std::optional<LineSpan>& before)
{
    std::string id = commit_hash.substr(0, 12) + ":" + path + ":" + std::string(to_string(g));
    if (before)
        id += ":" + std::to_string(before->start) + "-" + std::to_string(before->end);
    return id;
}

namespace {

// Lines [start, end] joined with '\n'.
std::string slice(const std::vector<std::string>& lines, LineSpan span)
{
    std::string out;
    for (std::size_t i = span.start; i <= span.end && i <= lines.size(); ++i) {
        if (i > span.start)
            out += '\n';
        out += lines[i - 1];
    }
    return out;
}

// Position of `span` among the methods sharing its name and kind.
std::size_t occurrence(const std::vector<lexing::MethodSpan>& spans, std::size_t index)
{
    std::size_t n = 0;
    for (std::size_t i = 0; i < index; ++i)
        if (spans[i].name == spans[index].name && spans[i].kind == spans[index].kind)
            ++n;
    return n;
}

const lexing::MethodSpan* find_counterpart(const std::vector<lexing::MethodSpan>& after, const lexing::MethodSpan& m,
                                           std::size_t nth)
{
    std::size_t seen = 0;
    for (const auto& a : after) {
        if (a.name != m.name || a.kind != m.kind)
            continue;
        if (seen++ == nth)
            return &a;
    }
    return nullptr;
}

void add_file_pairs(const std::string& commit_hash, const LabeledFile& f, PairBuild& out)
{
    const auto& change = f.change;
    const auto& labels = f.pre_labels;
    const std::string where = commit_hash.substr(0, 12) + ":" + change.path;

    if (!change.code_before || !change.code_after || change.code_before->empty() || change.code_after->empty()) {
        out.warnings.push_back(where + ": file pair skipped, one side is empty");
        return;
    }
    out.pairs.push_back({make_pair_id(commit_hash, change.path, Granularity::File, std::nullopt), commit_hash,
                         Granularity::File, change.path, std::nullopt, *change.code_before, *change.code_after, labels,
                         std::nullopt, std::nullopt});

    const auto before_file = lexing::SourceFile::from_path(change.path, *change.code_before);
    const auto after_file = lexing::SourceFile::from_path(change.path, *change.code_after);
    const auto before_lines = util::split_lines(*change.code_before);
    const auto after_lines = util::split_lines(*change.code_after);

    // Method pairs. Nested spans each get a pair when they hold a label.
    const auto before_methods = lexing::extract_methods(before_file).spans;
    const auto after_methods = lexing::extract_methods(after_file).spans;
    std::vector<bool> placed(labels.size(), false);
    for (std::size_t i = 0; i < before_methods.size(); ++i) {
        const auto& m = before_methods[i];
        std::vector<labeling::LabeledFinding> inside;
        for (std::size_t k = 0; k < labels.size(); ++k) {
            if (labels[k].line != 0 && m.contains(labels[k].line)) {
                inside.push_back(labels[k]);
                placed[k] = true;
            }
        }
        if (inside.empty())
            continue;
        const auto* counterpart = find_counterpart(after_methods, m, occurrence(before_methods, i));
        if (!counterpart) {
            out.warnings.push_back(where + ": method " + m.name + " has no counterpart in the fixed version");
            continue;
        }
        LineSpan b{m.start_line, m.end_line}, a{counterpart->start_line, counterpart->end_line};
        out.pairs.push_back({make_pair_id(commit_hash, change.path, Granularity::Method, b), commit_hash,
                             Granularity::Method, change.path, m.name, slice(before_lines, b), slice(after_lines, a),
                             std::move(inside), b, a});
    }
    for (std::size_t k = 0; k < labels.size(); ++k)
        if (labels[k].line != 0 && !placed[k])
            out.warnings.push_back(where + ": SpanResolutionFailure: line " + std::to_string(labels[k].line) +
                                   " is outside every method");

    // Line pairs, one per hunk whose old range holds a label.
    for (const auto& h : miner::parse_diff(change.diff)) {
        std::vector<labeling::LabeledFinding> inside;
        for (const auto& l : labels)
            if (l.line != 0 && h.old_range_contains(l.line))
                inside.push_back(l);
        if (inside.empty())
            continue;
        if (h.removed_lines.empty() || h.added_lines.empty()) {
            out.warnings.push_back(where + ": hunk at line " + std::to_string(h.old_start) +
                                   " skipped, it only adds or only removes lines");
            continue;
        }
        // Spans cover the changed lines only, not the surrounding context.
        std::optional<LineSpan> b, a;
        std::size_t old_no = h.old_start, new_no = h.new_start;
        for (const auto& hl : h.lines) {
            if (hl.kind == miner::HunkLineKind::Removed) {
                b = b ? LineSpan{b->start, old_no} : LineSpan{old_no, old_no};
                ++old_no;
            } else if (hl.kind == miner::HunkLineKind::Added) {
                a = a ? LineSpan{a->start, new_no} : LineSpan{new_no, new_no};
                ++new_no;
            } else {
                ++old_no;
                ++new_no;
            }
        }
        out.pairs.push_back({make_pair_id(commit_hash, change.path, Granularity::Line, *b), commit_hash,
                             Granularity::Line, change.path, std::nullopt, util::join(h.removed_lines, "\n"),
                             util::join(h.added_lines, "\n"), std::move(inside), b, a});
    }
}

} // namespace

PairBuild build_pairs(const std::string& commit_hash, const std::vector<LabeledFile>& files)
{
    PairBuild out;
    for (const auto& f : files) {
        if (f.verdict != labeling::Verdict::GenuineFix || f.pre_labels.empty())
            continue;
        if (f.change.change_type != miner::ChangeType::Modified && f.change.change_type != miner::ChangeType::Renamed)
            continue;
        add_file_pairs(commit_hash, f, out);
    }
    std::sort(out.pairs.begin(), out.pairs.end(),
              [](const VulnFixPair& a, const VulnFixPair& b) { return a.pair_id < b.pair_id; });
    return out;
}

} // namespace automesc::store
