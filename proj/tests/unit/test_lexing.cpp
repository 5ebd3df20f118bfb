#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "automesc/lexing/source.hpp"
#include "automesc/util/error.hpp"
#include "automesc/util/strings.hpp"
#include "support.hpp"

using namespace automesc;

namespace automesc {
void PrintTo(Language language, std::ostream* os)
{
    *os << to_string(language);
}
} // namespace automesc
using lexing::SegmentKind;

namespace {

lexing::SourceFile load(const std::string& name)
{
    return lexing::SourceFile::from_path(name, util::read_file(testsupport::fixture("lexing/" + name).string()));
}

std::string squeeze(std::string_view s)
{
    std::string out;
    for (char c : s)
        if (!std::isspace(static_cast<unsigned char>(c)))
            out += c;
    return out;
}

SegmentKind kind_at(const lexing::LexResult& lexed, std::size_t offset)
{
    for (const auto& s : lexed.segments)
        if (offset >= s.begin && offset < s.end)
            return s.kind;
    ADD_FAILURE() << "offset " << offset << " not covered";
    return SegmentKind::Code;
}

struct Fragment {
    SegmentKind kind;
    std::string text;
};

// Random source made of fragments whose classification is known up front.
// Separators keep adjacent fragments from merging ("a /" + "/* */").
std::vector<Fragment> random_fragments(std::mt19937& rng, Language lang)
{
    static const std::vector<std::string> code{"uint256 x = a / b;", "x = 1;", "{", "}", "a * b", "return c;",
                                               "emit E(x);", "y -= 2;"};
    static const std::vector<std::string> sol_strings{R"("plain")", R"("has // slashes")", R"('it\'s')",
                                                      R"("/* fake */")", R"("esc \" quote")", R"("")"};
    static const std::vector<std::string> sol_line{"// note", "/// natspec", "// \"quoted\" 'x'", "//"};
    static const std::vector<std::string> sol_block{"/* c */", "/** doc\n  more */", "/* a // b */", "/**/",
                                                    "/* \"str\" */"};
    static const std::vector<std::string> vy_strings{R"("plain")", R"('single # hash')", R"("esc \" q")", R"('')"};
    static const std::vector<std::string> vy_line{"# note", "# 'quoted'", "#"};

    std::vector<Fragment> out;
    const int n = std::uniform_int_distribution<int>(1, 30)(rng);
    auto pick = [&](const std::vector<std::string>& v) { return v[rng() % v.size()]; };
    for (int i = 0; i < n; ++i) {
        switch (rng() % 4) {
        case 0: out.push_back({SegmentKind::Code, pick(code)}); break;
        case 1: out.push_back({SegmentKind::String, pick(lang == Language::Solidity ? sol_strings : vy_strings)}); break;
        case 2: out.push_back({SegmentKind::LineComment, pick(lang == Language::Solidity ? sol_line : vy_line)}); break;
        default:
            if (lang == Language::Solidity)
                out.push_back({SegmentKind::BlockComment, pick(sol_block)});
            else
                out.push_back({SegmentKind::Code, pick(code)});
        }
    }
    return out;
}

} // namespace

TEST(Strip, SolidityGolden)
{
    auto file = load("Golden.sol");
    auto stripped = lexing::strip(file);
    EXPECT_EQ(stripped.content, util::read_file(testsupport::fixture("lexing/Golden.sol.stripped").string()));
    const std::vector<std::size_t> expected_map{2,  7,  8,  9,  10, 11, 12, 16, 17, 18, 20, 21, 22,
                                                24, 25, 26, 28, 29, 30, 31, 33, 35, 36, 38, 39, 40};
    EXPECT_EQ(stripped.line_map, expected_map);
    EXPECT_TRUE(stripped.warnings.empty());
}

TEST(Strip, VyperGolden)
{
    auto file = load("golden.vy");
    ASSERT_EQ(file.language, Language::Vyper);
    auto stripped = lexing::strip(file);
    EXPECT_EQ(stripped.content, util::read_file(testsupport::fixture("lexing/golden.vy.stripped").string()));
    const std::vector<std::size_t> expected_map{7,  8,  9,  10, 11, 12, 15, 16, 20, 23, 24,
                                                25, 27, 28, 30, 33, 34, 35, 38, 39, 40};
    EXPECT_EQ(stripped.line_map, expected_map);
}

TEST(Strip, UnterminatedBlockCommentWarnsAndStripsToEnd)
{
    auto file = lexing::SourceFile::from_path("A.sol", "uint x;\n/* open\nuint y;\n");
    auto stripped = lexing::strip(file);
    EXPECT_EQ(stripped.content, "uint x;\n");
    EXPECT_EQ(stripped.warnings.size(), 1u);
}

TEST(Strip, RejectsUnknownExtensions)
{
    EXPECT_THROW(lexing::SourceFile::from_path("README.md", "x"), Error);
}

class RandomInterleavings : public ::testing::TestWithParam<Language> {};

TEST_P(RandomInterleavings, ClassifiesEveryByteAndPreservesCode)
{
    const Language lang = GetParam();
    std::mt19937 rng(lang == Language::Solidity ? 7 : 11);
    for (int iter = 0; iter < 1000; ++iter) {
        auto frags = random_fragments(rng, lang);
        std::string src;
        std::vector<std::size_t> offsets;
        std::string kept;
        for (const auto& f : frags) {
            offsets.push_back(src.size());
            src += f.text;
            // Line comments must end their line; other fragments get a random separator.
            src += (f.kind == SegmentKind::LineComment || rng() % 3 == 0) ? "\n" : " ";
            if (f.kind == SegmentKind::Code || f.kind == SegmentKind::String)
                kept += f.text;
        }
        auto lexed = lexing::lex(src, lang);
        for (std::size_t i = 0; i < frags.size(); ++i) {
            for (std::size_t b = 0; b < frags[i].text.size(); ++b) {
                if (frags[i].text[b] == '\n')
                    continue;
                ASSERT_EQ(kind_at(lexed, offsets[i] + b), frags[i].kind)
                    << "iteration " << iter << " fragment " << i << " byte " << b << "\n" << src;
            }
        }

        auto file = lexing::SourceFile::from_path(lang == Language::Solidity ? "R.sol" : "r.vy", src);
        auto once = lexing::strip(file);
        EXPECT_EQ(squeeze(once.content), squeeze(kept)) << src;
        auto twice = lexing::strip(lexing::SourceFile::from_path(file.path, once.content));
        EXPECT_EQ(twice.content, once.content);
        EXPECT_EQ(once.line_map.size(), static_cast<std::size_t>(std::count(once.content.begin(), once.content.end(), '\n')));
    }
}

INSTANTIATE_TEST_SUITE_P(Languages, RandomInterleavings, ::testing::Values(Language::Solidity, Language::Vyper),
                         [](const ::testing::TestParamInfo<Language>& info) {
                             return std::string(to_string(info.param));
                         });

TEST(Mask, BlanksCommentsAndStringsButKeepsLayout)
{
    const std::string src = "a = \"x{\"; // }\nb /* { */ c";
    auto masked = lexing::mask_non_code(src, lexing::lex(src, Language::Solidity));
    ASSERT_EQ(masked.size(), src.size());
    EXPECT_EQ(masked.find('{'), std::string::npos);
    EXPECT_EQ(masked.find('}'), std::string::npos);
    EXPECT_EQ(masked.find('\n'), src.find('\n'));
    EXPECT_EQ(masked.substr(0, 4), "a = ");
}

TEST(Methods, SolidityGoldenSpans)
{
    using lexing::MethodKind;
    auto got = lexing::extract_methods(load("Golden.sol"));
    const std::vector<lexing::MethodSpan> expected{
        {"constructor", 16, 18, MethodKind::Constructor}, {"deposit", 20, 22, MethodKind::Function},
        {"ratio", 24, 26, MethodKind::Function},          {"onlyOwner", 28, 31, MethodKind::Modifier},
        {"release", 33, 36, MethodKind::Function},        {"fallback", 38, 38, MethodKind::Fallback},
        {"receive", 39, 39, MethodKind::Fallback},
    };
    EXPECT_EQ(got.spans, expected);
    EXPECT_TRUE(got.warnings.empty());
}

TEST(Methods, VyperGoldenSpans)
{
    using lexing::MethodKind;
    auto got = lexing::extract_methods(load("golden.vy"));
    const std::vector<lexing::MethodSpan> expected{
        {"__init__", 16, 20, MethodKind::Def},
        {"bid", 25, 30, MethodKind::Def},
        {"_helper", 34, 35, MethodKind::Def},
        {"total", 40, 40, MethodKind::Def},
    };
    EXPECT_EQ(got.spans, expected);
}

TEST(Methods, InterfaceDeclarationsAndUnbalancedBodies)
{
    auto iface = lexing::SourceFile::from_path("I.sol", "interface I {\n  function f() external;\n  function g(\n    uint a\n  ) external view returns (uint);\n}\n");
    auto spans = lexing::extract_methods(iface).spans;
    ASSERT_EQ(spans.size(), 2u);
    EXPECT_EQ(spans[0], (lexing::MethodSpan{"f", 2, 2, lexing::MethodKind::Function}));
    EXPECT_EQ(spans[1].start_line, 3u);

    auto broken = lexing::SourceFile::from_path("B.sol", "contract B {\n  function f() public {\n    if (x) {\n  }\n");
    auto r = lexing::extract_methods(broken);
    EXPECT_TRUE(r.spans.empty());
    ASSERT_FALSE(r.warnings.empty());
    EXPECT_NE(r.warnings[0].find("UnbalancedBraces"), std::string::npos);
}
