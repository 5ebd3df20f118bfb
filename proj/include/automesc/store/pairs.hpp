#pragma once

#include <optional>
#include <string>
#include <vector>

#include "automesc/labeling/fusion.hpp"
#include "automesc/lexing/source.hpp"
#include "automesc/miner/diff.hpp"
#include "automesc/miner/model.hpp"

namespace automesc::store {

enum class Granularity { File, Method, Line };

std::string_view to_string(Granularity g);
std::optional<Granularity> parse_granularity(std::string_view s);

struct LineSpan {
    std::size_t start = 0; // 1-based, inclusive
    std::size_t end = 0;
    friend bool operator==(const LineSpan&, const LineSpan&) = default;
};

struct VulnFixPair {
    std::string pair_id;
    std::string commit_hash;
    Granularity granularity = Granularity::File;
    std::string path;
    std::optional<std::string> method_name;
    std::string vulnerable_excerpt;
    std::string fixed_excerpt;
    std::vector<labeling::LabeledFinding> labels;
    std::optional<LineSpan> before; // method and line pairs
    std::optional<LineSpan> after;
};

// Everything known about one changed file once labeling has run.
struct LabeledFile {
    miner::FileChange change;
    std::vector<labeling::LabeledFinding> pre_labels;
    labeling::Verdict verdict = labeling::Verdict::GenuineFix;
};

struct PairBuild {
    std::vector<VulnFixPair> pairs; // ordered by pair_id
    std::vector<std::string> warnings;
};

// For each genuine-fix file with at least one label: a file pair over the
// original before/after contents; a method pair for every method of the
// vulnerable version holding a labeled line, matched to the method of the
// same name, kind and occurrence in the fixed version; a line pair for every
// hunk whose old range holds a labeled line. File-scoped labels attach only to
// the file pair. Candidates with an empty side are skipped with a warning.
PairBuild build_pairs(const std::string& commit_hash, const std::vector<LabeledFile>& files);

std::string make_pair_id(const std::string& commit_hash, const std::string& path, Granularity g,
                         const std::optional<LineSpan>& before);

} // namespace automesc::store
