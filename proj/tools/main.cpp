// automesc: mine security commits and CVEs, label them and export
// vulnerability-fix pairs.
//
// Exit codes: 0 success, 1 user error (bad arguments, configuration, input
// files, a second instance), 2 internal error.

#include <CLI11.hpp>

#include <atomic>
#include <csignal>
#include <iomanip>
#include <iostream>
#include <json.hpp>

#include "automesc/pipeline/pipeline.hpp"
#include "automesc/quality/quality.hpp"
#include "automesc/store/export.hpp"
#include "automesc/util/error.hpp"
#include "automesc/util/log.hpp"
#include "automesc/util/strings.hpp"

using namespace automesc;

namespace {

constexpr int kOk = 0;
constexpr int kUserError = 1;
constexpr int kInternalError = 2;

std::atomic<bool> g_stop{false};

extern "C" void on_signal(int)
{
    g_stop = true;
}

bool is_user_error(ErrorCode code)
{
    switch (code) {
    case ErrorCode::ConfigError:
    case ErrorCode::AlreadyRunning:
    case ErrorCode::UnsupportedFormat:
    case ErrorCode::UnknownField:
    case ErrorCode::UnknownTool:
    case ErrorCode::IoError:
    case ErrorCode::ParseError: return true;
    default: return false;
    }
}

struct UserError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string report_line(const pipeline::CycleReport& r)
{
    std::ostringstream out;
    out << "cycle done: repos=" << r.repos << " commits=" << r.commits_ingested << " skipped=" << r.commits_skipped
        << " files=" << r.files << " noise=" << r.noise_files << " labels=" << r.labels << " pairs=" << r.pairs
        << " cves=" << r.cves << " warnings=" << r.warnings.size();
    return out.str();
}

int cmd_mine(const pipeline::PipelineConfig& config, bool daemon, const std::string& source_name,
             std::optional<std::size_t> max_cycles)
{
    auto source = pipeline::parse_source(source_name);
    if (!source)
        throw UserError("--source must be github, nvd or all");
    pipeline::LedgerLock lock(config.ledger_path);
    store::Store store(config.store_path);
    pipeline::Pipeline pipe(config);

    auto cycle = [&] {
        auto ledger = pipeline::RunLedger::load(config.ledger_path);
        ledger.in_progress = true;
        ledger.save(config.ledger_path);
        auto report = pipe.run_cycle(store, ledger, *source);
        ledger.in_progress = false;
        ledger.save(config.ledger_path);
        util::log_info(report_line(report));
    };

    if (!daemon) {
        cycle();
        return kOk;
    }
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    pipeline::ScheduleHooks hooks;
    hooks.stop_requested = [] { return g_stop.load(); };
    pipeline::run_schedule(config.poll_interval, cycle, hooks, max_cycles);
    return kOk;
}

int cmd_label(const pipeline::PipelineConfig& config, const std::string& hash)
{
    store::Store store(config.store_path);
    if (!store.has_commit(hash))
        throw UserError("commit " + hash + " is not in the store");
    pipeline::Pipeline pipe(config);
    for (const auto& l : pipe.relabel_commit(store, hash)) {
        std::vector<std::string> tools;
        for (auto t : l.supporting_tools)
            tools.emplace_back(to_string(t));
        nlohmann::ordered_json j{{"path", l.path},
                                 {"line", l.line},
                                 {"canonical", l.canonical},
                                 {"tools", tools},
                                 {"votes", l.vote_count},
                                 {"threshold", l.threshold_used},
                                 {"severity", l.severity ? std::string(to_string(*l.severity)) : std::string()}};
        std::cout << j.dump() << '\n';
    }
    return kOk;
}

int cmd_export(const pipeline::PipelineConfig& config, const std::string& format_name, const std::string& out_path,
               const std::string& table_name, const std::string& granularity, bool include_unlinked)
{
    const auto format = store::parse_export_format(format_name);
    const auto table = store::parse_export_table(table_name);
    if (!table)
        throw UserError("--table must be pairs or labels");
    store::Selection sel;
    sel.include_unlinked_cves = include_unlinked;
    if (!granularity.empty()) {
        sel.granularity = store::parse_granularity(granularity);
        if (!sel.granularity)
            throw UserError("--granularity must be file, method or line");
    }
    store::Store store(config.store_path);
    const auto data = *table == store::ExportTable::Pairs ? store::query_pairs(store, sel) : store::query_labels(store, sel);
    util::write_file(out_path, store::render(data, format));
    util::log_info("exported " + std::to_string(data.rows.size()) + " rows to " + out_path);
    return kOk;
}

int cmd_quality(const std::string& in_path, const std::string& format_name, const std::vector<std::string>& key,
                const std::string& label_field, const std::vector<std::string>& required)
{
    const auto format = format_name.empty() ? store::format_for_path(in_path) : store::parse_export_format(format_name);
    const auto data = store::parse_dataset(util::read_file(in_path), format);
    quality::AssessOptions options;
    if (!key.empty())
        options.key_fields = key;
    if (!label_field.empty())
        options.label_field = label_field;
    if (!required.empty())
        options.required_fields = required;
    std::cout << quality::format_report(quality::assess(data, options));
    return kOk;
}

int cmd_stats(const pipeline::PipelineConfig& config, bool as_json)
{
    store::Store store(config.store_path);
    const auto st = store.stats();
    if (as_json) {
        nlohmann::ordered_json sev = nlohmann::ordered_json::object();
        for (auto level : {SeverityLevel::Low, SeverityLevel::Medium, SeverityLevel::High}) {
            auto it = st.severity_histogram.find(level);
            sev[std::string(to_string(level))] = it == st.severity_histogram.end() ? 0 : it->second;
        }
        nlohmann::ordered_json j{{"repos", st.repo_count},         {"commits", st.commit_count},
                                 {"files", st.file_count},         {"contracts", st.contract_count},
                                 {"methods", st.method_count},     {"lines", st.line_count},
                                 {"cves", st.cve_count},           {"vulnerabilities", st.vulnerability_count},
                                 {"pairs", st.pair_count},         {"severity", sev},
                                 {"types", st.type_histogram}};
        std::cout << j.dump(2) << '\n';
        return kOk;
    }
    std::cout << std::left;
    auto row = [](const std::string& name, std::int64_t v) { std::cout << std::setw(18) << name << v << '\n'; };
    row("repositories", st.repo_count);
    row("commits", st.commit_count);
    row("files", st.file_count);
    row("contracts", st.contract_count);
    row("methods", st.method_count);
    row("lines", st.line_count);
    row("cves", st.cve_count);
    row("vulnerabilities", st.vulnerability_count);
    row("pairs", st.pair_count);
    std::cout << "severity\n" << std::fixed << std::setprecision(1);
    for (auto level : {SeverityLevel::Low, SeverityLevel::Medium, SeverityLevel::High}) {
        auto it = st.severity_histogram.find(level);
        std::cout << "  " << std::setw(16) << to_string(level) << (it == st.severity_histogram.end() ? 0 : it->second)
                  << "  (" << 100.0 * st.severity_share(level) << "%)\n";
    }
    if (!st.type_histogram.empty()) {
        std::cout << "types\n";
        for (const auto& [type, n] : st.type_histogram)
            std::cout << "  " << std::setw(36) << type << n << '\n';
    }
    return kOk;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Mine smart-contract vulnerability fixes and export labeled vulnerability-fix pairs"};
    app.require_subcommand(1);
    std::optional<std::string> config_path;
    app.add_option("--config", config_path, "JSON configuration file");

    auto* mine = app.add_subcommand("mine", "Collect, label and store new data");
    bool once = false, daemon = false;
    std::string source = "all";
    std::optional<std::size_t> max_cycles;
    auto* once_opt = mine->add_flag("--once", once, "Run a single cycle (default)");
    auto* daemon_opt = mine->add_flag("--daemon", daemon, "Repeat every poll interval");
    once_opt->excludes(daemon_opt);
    mine->add_option("--source", source, "github, nvd or all")->capture_default_str();
    mine->add_option("--max-cycles", max_cycles)->group("");

    auto* label = app.add_subcommand("label", "Relabel one stored commit");
    std::string commit;
    label->add_option("--commit", commit, "Commit hash")->required();

    auto* exp = app.add_subcommand("export", "Write the dataset");
    std::string format, out, table = "pairs", granularity;
    bool include_unlinked = false;
    exp->add_option("--format", format, "csv or jsonl")->required();
    exp->add_option("--out", out, "Output file")->required();
    exp->add_option("--table", table, "pairs or labels")->capture_default_str();
    exp->add_option("--granularity", granularity, "Only file, method or line pairs");
    exp->add_flag("--include-unlinked-cves", include_unlinked, "Also report CVEs not tied to a stored commit");

    auto* qual = app.add_subcommand("quality", "Incompleteness, redundancy and inconsistency of an export");
    std::string in, qformat, label_field;
    std::vector<std::string> key, required;
    qual->add_option("--in", in, "Exported csv or jsonl file")->required();
    qual->add_option("--format", qformat, "csv or jsonl (default: from the extension)");
    qual->add_option("--key", key, "Fields locating a record")->delimiter(',');
    qual->add_option("--label-field", label_field, "Field holding the final label");
    qual->add_option("--required", required, "Fields that must be present")->delimiter(',');

    auto* stats = app.add_subcommand("stats", "Summary counts of the store");
    bool stats_json = false;
    stats->add_flag("--json", stats_json, "Machine-readable output");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kOk : kUserError;
    }

    try {
        if (qual->parsed())
            return cmd_quality(in, qformat, key, label_field, required);
        const auto config = pipeline::load_config(config_path);
        if (mine->parsed())
            return cmd_mine(config, daemon, source, max_cycles);
        if (label->parsed())
            return cmd_label(config, commit);
        if (exp->parsed())
            return cmd_export(config, format, out, table, granularity, include_unlinked);
        if (stats->parsed())
            return cmd_stats(config, stats_json);
    } catch (const UserError& e) {
        util::log_error(e.what());
        return kUserError;
    } catch (const Error& e) {
        util::log_error(e.what());
        return is_user_error(e.code()) ? kUserError : kInternalError;
    } catch (const std::exception& e) {
        util::log_error(std::string("internal error: ") + e.what());
        return kInternalError;
    }
    return kInternalError;
}
