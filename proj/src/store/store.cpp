#include "automesc/store/store.hpp"

#include <sqlite3.h>

#include <csignal>
#include <cstdlib>
#include <json.hpp>

#include "automesc/lexing/source.hpp"
#include "automesc/util/error.hpp"
#include "automesc/util/strings.hpp"

namespace automesc::store {

namespace {

const char* kSchema = R"sql(
CREATE TABLE IF NOT EXISTS cve (
  cve_id             TEXT PRIMARY KEY,
  published_date     TEXT NOT NULL,
  last_modified_date TEXT NOT NULL,
  description        TEXT NOT NULL,
  user_privilege     TEXT,
  user_interaction   TEXT,
  cvss2_vector       TEXT,
  cvss2_score        REAL CHECK (cvss2_score BETWEEN 0 AND 10),
  cvss3_vector       TEXT,
  cvss3_score        REAL CHECK (cvss3_score BETWEEN 0 AND 10),
  severity           INTEGER NOT NULL CHECK (severity BETWEEN 1 AND 3),
  code_linked        INTEGER NOT NULL DEFAULT 0
);
CREATE TABLE IF NOT EXISTS cwe (
  cwe_id      TEXT PRIMARY KEY,
  name        TEXT NOT NULL,
  description TEXT NOT NULL,
  url         TEXT NOT NULL,
  is_category INTEGER NOT NULL
);
CREATE TABLE IF NOT EXISTS cve_cwe (
  cve_id TEXT NOT NULL REFERENCES cve(cve_id) ON DELETE CASCADE,
  cwe_id TEXT NOT NULL REFERENCES cwe(cwe_id),
  PRIMARY KEY (cve_id, cwe_id)
);
CREATE TABLE IF NOT EXISTS cve_reference (
  cve_id TEXT NOT NULL REFERENCES cve(cve_id) ON DELETE CASCADE,
  url    TEXT NOT NULL,
  PRIMARY KEY (cve_id, url)
);
CREATE TABLE IF NOT EXISTS cve_commit_link (
  cve_id      TEXT NOT NULL REFERENCES cve(cve_id) ON DELETE CASCADE,
  repo_url    TEXT NOT NULL,
  commit_hash TEXT
);
CREATE UNIQUE INDEX IF NOT EXISTS cve_commit_link_key
  ON cve_commit_link (cve_id, repo_url, ifnull(commit_hash, ''));
CREATE TABLE IF NOT EXISTS repository (
  repo_id        INTEGER PRIMARY KEY,
  name           TEXT NOT NULL,
  full_name      TEXT NOT NULL,
  description    TEXT NOT NULL,
  homepage       TEXT NOT NULL,
  date_created   TEXT NOT NULL,
  owner          TEXT NOT NULL,
  date_last_push TEXT NOT NULL,
  repo_language  TEXT NOT NULL CHECK (repo_language IN ('Solidity', 'Vyper')),
  fork_count     INTEGER NOT NULL,
  clone_url      TEXT NOT NULL,
  cve_id         TEXT REFERENCES cve(cve_id)
);
CREATE TABLE IF NOT EXISTS commits (
  hash               TEXT PRIMARY KEY CHECK (length(hash) = 40),
  repo_id            INTEGER NOT NULL REFERENCES repository(repo_id),
  author             TEXT NOT NULL,
  author_date        TEXT NOT NULL,
  author_timezone    TEXT NOT NULL,
  committer          TEXT NOT NULL,
  committer_date     TEXT NOT NULL,
  committer_timezone TEXT NOT NULL,
  committer_epoch    INTEGER NOT NULL,
  msg                TEXT NOT NULL,
  dmm_unit_size      REAL,
  is_merge           INTEGER NOT NULL,
  matched_keywords   TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS file_change (
  file_change_id INTEGER PRIMARY KEY,
  commit_hash    TEXT NOT NULL REFERENCES commits(hash),
  path           TEXT NOT NULL,
  old_path       TEXT,
  change_type    TEXT NOT NULL CHECK (change_type IN ('added', 'modified', 'deleted', 'renamed')),
  code_before    TEXT,
  code_after     TEXT,
  stripped_before TEXT,
  stripped_after TEXT,
  diff           TEXT NOT NULL,
  verdict        TEXT CHECK (verdict IN ('genuine_fix', 'noise')),
  noise_evidence TEXT,
  residual       TEXT,
  UNIQUE (commit_hash, path)
);
CREATE TABLE IF NOT EXISTS line_change (
  file_change_id INTEGER NOT NULL REFERENCES file_change(file_change_id) ON DELETE CASCADE,
  hunk_index     INTEGER NOT NULL,
  old_start      INTEGER NOT NULL,
  old_len        INTEGER NOT NULL,
  new_start      INTEGER NOT NULL,
  new_len        INTEGER NOT NULL,
  removed_lines  TEXT NOT NULL,
  added_lines    TEXT NOT NULL,
  PRIMARY KEY (file_change_id, hunk_index)
);
CREATE TABLE IF NOT EXISTS tool_run (
  tool             TEXT NOT NULL,
  content_hash     TEXT NOT NULL,
  target_path      TEXT NOT NULL,
  started_at       TEXT NOT NULL,
  duration_seconds REAL NOT NULL CHECK (duration_seconds >= 0),
  exit_status      TEXT NOT NULL,
  raw_output       TEXT NOT NULL,
  PRIMARY KEY (tool, content_hash)
);
CREATE TABLE IF NOT EXISTS labeled_finding (
  label_id         INTEGER PRIMARY KEY,
  file_change_id   INTEGER NOT NULL REFERENCES file_change(file_change_id) ON DELETE CASCADE,
  canonical        TEXT NOT NULL,
  line             INTEGER NOT NULL CHECK (line >= 0),
  supporting_tools TEXT NOT NULL,
  vote_count       INTEGER NOT NULL,
  threshold_used   INTEGER NOT NULL CHECK (vote_count >= threshold_used),
  severity         INTEGER NOT NULL CHECK (severity BETWEEN 1 AND 3),
  UNIQUE (file_change_id, canonical, line)
);
CREATE TABLE IF NOT EXISTS vuln_fix_pair (
  pair_id            TEXT PRIMARY KEY,
  file_change_id     INTEGER NOT NULL REFERENCES file_change(file_change_id) ON DELETE CASCADE,
  commit_hash        TEXT NOT NULL REFERENCES commits(hash),
  granularity        TEXT NOT NULL CHECK (granularity IN ('file', 'method', 'line')),
  path               TEXT NOT NULL,
  method_name        TEXT CHECK (granularity <> 'method' OR method_name IS NOT NULL),
  before_start       INTEGER,
  before_end         INTEGER,
  after_start        INTEGER,
  after_end          INTEGER,
  vulnerable_excerpt TEXT NOT NULL CHECK (length(vulnerable_excerpt) > 0),
  fixed_excerpt      TEXT NOT NULL CHECK (length(fixed_excerpt) > 0)
);
CREATE TABLE IF NOT EXISTS pair_label (
  pair_id  TEXT NOT NULL REFERENCES vuln_fix_pair(pair_id) ON DELETE CASCADE,
  label_id INTEGER NOT NULL REFERENCES labeled_finding(label_id) ON DELETE CASCADE,
  PRIMARY KEY (pair_id, label_id)
);
)sql";

class Stmt {
public:
    Stmt(sqlite3* db, const char* sql) : db_(db)
    {
        if (sqlite3_prepare_v2(db, sql, -1, &stmt_, nullptr) != SQLITE_OK)
            throw Error(ErrorCode::StoreError, std::string("prepare: ") + sqlite3_errmsg(db) + " in: " + sql);
    }
    ~Stmt() { sqlite3_finalize(stmt_); }
    Stmt(const Stmt&) = delete;
    Stmt& operator=(const Stmt&) = delete;

    Stmt& bind(int i, const std::string& v)
    {
        sqlite3_bind_text(stmt_, i, v.data(), static_cast<int>(v.size()), SQLITE_TRANSIENT);
        return *this;
    }
    Stmt& bind(int i, const char* v) { return bind(i, std::string(v)); }
    Stmt& bind(int i, std::string_view v) { return bind(i, std::string(v)); }
    Stmt& bind(int i, std::int64_t v)
    {
        sqlite3_bind_int64(stmt_, i, v);
        return *this;
    }
    Stmt& bind(int i, int v) { return bind(i, static_cast<std::int64_t>(v)); }
    Stmt& bind(int i, std::size_t v) { return bind(i, static_cast<std::int64_t>(v)); }
    Stmt& bind(int i, bool v) { return bind(i, static_cast<std::int64_t>(v ? 1 : 0)); }
    Stmt& bind(int i, double v)
    {
        sqlite3_bind_double(stmt_, i, v);
        return *this;
    }
    template <typename T>
    Stmt& bind(int i, const std::optional<T>& v)
    {
        if (!v) {
            sqlite3_bind_null(stmt_, i);
            return *this;
        }
        return bind(i, *v);
    }

    // True while a row is available.
    bool step()
    {
        int rc = sqlite3_step(stmt_);
        if (rc == SQLITE_ROW)
            return true;
        if (rc == SQLITE_DONE)
            return false;
        const int ext = sqlite3_extended_errcode(db_);
        std::string msg = sqlite3_errmsg(db_);
        if ((ext & 0xff) == SQLITE_CONSTRAINT)
            throw Error(ErrorCode::IntegrityViolation, msg);
        throw Error(ErrorCode::StoreError, msg);
    }
    void run()
    {
        while (step()) {
        }
    }

    bool is_null(int col) const { return sqlite3_column_type(stmt_, col) == SQLITE_NULL; }
    std::string text(int col) const
    {
        auto p = sqlite3_column_text(stmt_, col);
        return p ? std::string(reinterpret_cast<const char*>(p), static_cast<std::size_t>(sqlite3_column_bytes(stmt_, col)))
                 : std::string{};
    }
    std::optional<std::string> opt_text(int col) const
    {
        if (is_null(col))
            return std::nullopt;
        return text(col);
    }
    std::int64_t integer(int col) const { return sqlite3_column_int64(stmt_, col); }
    double real(int col) const { return sqlite3_column_double(stmt_, col); }

private:
    sqlite3* db_;
    sqlite3_stmt* stmt_ = nullptr;
};

std::string tools_text(const std::set<ToolId>& tools)
{
    std::vector<std::string> names;
    for (auto t : tools)
        names.emplace_back(to_string(t));
    return util::join(names, ";");
}

std::string labels_json(const std::vector<labeling::LabeledFinding>& labels)
{
    auto arr = nlohmann::json::array();
    for (const auto& l : labels)
        arr.push_back({{"canonical", l.canonical}, {"line", l.line}, {"tools", tools_text(l.supporting_tools)}});
    return arr.dump();
}

} // namespace

const std::vector<std::string>& Store::table_names()
{
    static const std::vector<std::string> names{"repository", "commits",         "file_change",     "line_change",
                                                 "cve",        "cwe",             "cve_cwe",         "cve_reference",
                                                 "cve_commit_link", "tool_run",   "labeled_finding", "vuln_fix_pair",
                                                 "pair_label"};
    return names;
}

double Stats::severity_share(SeverityLevel level) const
{
    if (vulnerability_count == 0)
        return 0.0;
    auto it = severity_histogram.find(level);
    return it == severity_histogram.end() ? 0.0 : static_cast<double>(it->second) / static_cast<double>(vulnerability_count);
}

Store::Store(const std::string& path)
{
    if (sqlite3_open_v2(path.c_str(), &db_, SQLITE_OPEN_READWRITE | SQLITE_OPEN_CREATE, nullptr) != SQLITE_OK) {
        std::string msg = db_ ? sqlite3_errmsg(db_) : "out of memory";
        sqlite3_close(db_);
        throw Error(ErrorCode::StoreError, "cannot open " + path + ": " + msg);
    }
    sqlite3_busy_timeout(db_, 10000);
    exec("PRAGMA foreign_keys = ON");
    exec("PRAGMA journal_mode = WAL");
    exec("PRAGMA synchronous = NORMAL");
    exec(kSchema);
    if (const char* fault = std::getenv("AUTOMESC_FAULT_AFTER_WRITES")) {
        if (auto n = util::parse_int(fault); n && *n > 0)
            fault_after_ = *n;
    }
}

Store::~Store()
{
    sqlite3_close(db_);
}

void Store::exec(const std::string& sql)
{
    char* err = nullptr;
    if (sqlite3_exec(db_, sql.c_str(), nullptr, nullptr, &err) != SQLITE_OK) {
        std::string msg = err ? err : "unknown error";
        sqlite3_free(err);
        throw Error(ErrorCode::StoreError, msg);
    }
}

// Fault injection for crash-tolerance tests: the process is killed outright
// after the configured number of write statements, as a power cut would.
void Store::note_write()
{
    if (fault_after_ > 0 && ++writes_ >= fault_after_)
        std::raise(SIGKILL);
}

Store::Transaction::Transaction(Store& store) : store_(store)
{
    store_.exec("BEGIN IMMEDIATE");
}

Store::Transaction::~Transaction()
{
    if (!done_) {
        try {
            store_.exec("ROLLBACK");
        } catch (...) {
        }
    }
}

void Store::Transaction::commit()
{
    store_.exec("COMMIT");
    done_ = true;
}

void Store::upsert_repository(const miner::Repository& r)
{
    Stmt s(db_, R"sql(
INSERT INTO repository (repo_id, name, full_name, description, homepage, date_created, owner, date_last_push,
                        repo_language, fork_count, clone_url)
VALUES (?1, ?2, ?3, ?4, ?5, ?6, ?7, ?8, ?9, ?10, ?11)
ON CONFLICT (repo_id) DO UPDATE SET
  name = excluded.name, full_name = excluded.full_name, description = excluded.description,
  homepage = excluded.homepage, date_created = excluded.date_created, owner = excluded.owner,
  date_last_push = excluded.date_last_push, repo_language = excluded.repo_language,
  fork_count = excluded.fork_count, clone_url = excluded.clone_url)sql");
    s.bind(1, r.repo_id).bind(2, r.name).bind(3, r.full_name).bind(4, r.description).bind(5, r.homepage);
    s.bind(6, r.date_created).bind(7, r.owner).bind(8, r.date_last_push).bind(9, to_string(r.repo_language));
    s.bind(10, r.fork_count).bind(11, r.clone_url);
    s.run();
    note_write();
}

void Store::upsert_commit(const miner::Commit& c)
{
    if (!util::is_hex40(c.hash))
        throw Error(ErrorCode::IntegrityViolation, "malformed commit hash '" + c.hash + "'");
    Stmt s(db_, R"sql(
INSERT INTO commits (hash, repo_id, author, author_date, author_timezone, committer, committer_date,
                     committer_timezone, committer_epoch, msg, dmm_unit_size, is_merge, matched_keywords)
VALUES (?1, ?2, ?3, ?4, ?5, ?6, ?7, ?8, ?9, ?10, ?11, ?12, ?13)
ON CONFLICT (hash) DO UPDATE SET
  repo_id = excluded.repo_id, author = excluded.author, author_date = excluded.author_date,
  author_timezone = excluded.author_timezone, committer = excluded.committer,
  committer_date = excluded.committer_date, committer_timezone = excluded.committer_timezone,
  committer_epoch = excluded.committer_epoch, msg = excluded.msg, dmm_unit_size = excluded.dmm_unit_size,
  is_merge = excluded.is_merge, matched_keywords = excluded.matched_keywords)sql");
    s.bind(1, c.hash).bind(2, c.repo_id).bind(3, c.author).bind(4, c.author_date).bind(5, c.author_timezone);
    s.bind(6, c.committer).bind(7, c.committer_date).bind(8, c.committer_timezone).bind(9, c.committer_epoch);
    s.bind(10, c.msg).bind(11, c.dmm_unit_size).bind(12, c.is_merge).bind(13, util::join(c.matched_keywords, ";"));
    s.run();
    note_write();
}

std::int64_t Store::upsert_file_change(const miner::FileChange& fc, const std::optional<std::string>& stripped_before,
                                       const std::optional<std::string>& stripped_after)
{
    if ((fc.change_type == miner::ChangeType::Added) != !fc.code_before)
        throw Error(ErrorCode::IntegrityViolation, fc.path + ": code_before must be absent exactly for added files");
    if ((fc.change_type == miner::ChangeType::Deleted) != !fc.code_after)
        throw Error(ErrorCode::IntegrityViolation, fc.path + ": code_after must be absent exactly for deleted files");
    {
        Stmt s(db_, R"sql(
INSERT INTO file_change (commit_hash, path, old_path, change_type, code_before, code_after, stripped_before,
                         stripped_after, diff)
VALUES (?1, ?2, ?3, ?4, ?5, ?6, ?7, ?8, ?9)
ON CONFLICT (commit_hash, path) DO UPDATE SET
  old_path = excluded.old_path, change_type = excluded.change_type, code_before = excluded.code_before,
  code_after = excluded.code_after, stripped_before = excluded.stripped_before,
  stripped_after = excluded.stripped_after, diff = excluded.diff)sql");
        s.bind(1, fc.commit_hash).bind(2, fc.path).bind(3, fc.old_path).bind(4, miner::to_string(fc.change_type));
        s.bind(5, fc.code_before).bind(6, fc.code_after).bind(7, stripped_before).bind(8, stripped_after);
        s.bind(9, fc.diff);
        s.run();
        note_write();
    }
    Stmt q(db_, "SELECT file_change_id FROM file_change WHERE commit_hash = ?1 AND path = ?2");
    q.bind(1, fc.commit_hash).bind(2, fc.path);
    if (!q.step())
        throw Error(ErrorCode::StoreError, "file change vanished after upsert");
    return q.integer(0);
}

void Store::set_verdict(std::int64_t file_change_id, const labeling::NoiseVerdict& v)
{
    Stmt s(db_, "UPDATE file_change SET verdict = ?2, noise_evidence = ?3, residual = ?4 WHERE file_change_id = ?1");
    s.bind(1, file_change_id).bind(2, labeling::to_string(v.verdict)).bind(3, labels_json(v.evidence));
    s.bind(4, labels_json(v.residual));
    s.run();
    note_write();
}

void Store::replace_line_changes(std::int64_t file_change_id, const std::vector<miner::Hunk>& hunks)
{
    Stmt del(db_, "DELETE FROM line_change WHERE file_change_id = ?1");
    del.bind(1, file_change_id).run();
    for (std::size_t i = 0; i < hunks.size(); ++i) {
        const auto& h = hunks[i];
        Stmt s(db_, R"sql(
INSERT INTO line_change (file_change_id, hunk_index, old_start, old_len, new_start, new_len, removed_lines, added_lines)
VALUES (?1, ?2, ?3, ?4, ?5, ?6, ?7, ?8))sql");
        s.bind(1, file_change_id).bind(2, i).bind(3, h.old_start).bind(4, h.old_len).bind(5, h.new_start);
        s.bind(6, h.new_len).bind(7, util::join(h.removed_lines, "\n")).bind(8, util::join(h.added_lines, "\n"));
        s.run();
        note_write();
    }
}

void Store::upsert_cve(const nvd::CveRecord& r)
{
    {
        // On conflict the later last_modified_date wins; code_linked is derived and kept.
        Stmt s(db_, R"sql(
INSERT INTO cve (cve_id, published_date, last_modified_date, description, user_privilege, user_interaction,
                 cvss2_vector, cvss2_score, cvss3_vector, cvss3_score, severity)
VALUES (?1, ?2, ?3, ?4, ?5, ?6, ?7, ?8, ?9, ?10, ?11)
ON CONFLICT (cve_id) DO UPDATE SET
  published_date = excluded.published_date, last_modified_date = excluded.last_modified_date,
  description = excluded.description, user_privilege = excluded.user_privilege,
  user_interaction = excluded.user_interaction, cvss2_vector = excluded.cvss2_vector,
  cvss2_score = excluded.cvss2_score, cvss3_vector = excluded.cvss3_vector, cvss3_score = excluded.cvss3_score,
  severity = excluded.severity
WHERE excluded.last_modified_date >= cve.last_modified_date)sql");
        s.bind(1, r.cve_id).bind(2, r.published_date).bind(3, r.last_modified_date).bind(4, r.description);
        s.bind(5, r.user_privilege).bind(6, r.user_interaction);
        std::optional<std::string> v2v, v3v;
        std::optional<double> v2s, v3s;
        if (r.cvss_v2) {
            v2v = r.cvss_v2->vector;
            v2s = r.cvss_v2->base_score;
        }
        if (r.cvss_v3) {
            v3v = r.cvss_v3->vector;
            v3s = r.cvss_v3->base_score;
        }
        s.bind(7, v2v).bind(8, v2s).bind(9, v3v).bind(10, v3s).bind(11, static_cast<int>(r.severity));
        s.run();
        note_write();
    }
    for (const auto& cwe : nvd::cwe_types_for(r)) {
        upsert_cwe(cwe);
        Stmt s(db_, "INSERT OR IGNORE INTO cve_cwe (cve_id, cwe_id) VALUES (?1, ?2)");
        s.bind(1, r.cve_id).bind(2, cwe.cwe_id).run();
        note_write();
    }
    for (const auto& url : r.reference_urls) {
        Stmt s(db_, "INSERT OR IGNORE INTO cve_reference (cve_id, url) VALUES (?1, ?2)");
        s.bind(1, r.cve_id).bind(2, url).run();
        note_write();
    }
}

void Store::upsert_cwe(const nvd::CweType& c)
{
    // A CWE seen first through a bare id keeps any richer name added later.
    Stmt s(db_, R"sql(
INSERT INTO cwe (cwe_id, name, description, url, is_category) VALUES (?1, ?2, ?3, ?4, ?5)
ON CONFLICT (cwe_id) DO UPDATE SET
  name = CASE WHEN excluded.name <> '' THEN excluded.name ELSE cwe.name END,
  description = CASE WHEN excluded.description <> '' THEN excluded.description ELSE cwe.description END,
  url = excluded.url, is_category = excluded.is_category)sql");
    s.bind(1, c.cwe_id).bind(2, c.name).bind(3, c.description).bind(4, c.url).bind(5, c.is_category);
    s.run();
    note_write();
}

void Store::upsert_cve_commit_link(const nvd::CveCommitLink& l)
{
    Stmt s(db_, "INSERT OR IGNORE INTO cve_commit_link (cve_id, repo_url, commit_hash) VALUES (?1, ?2, ?3)");
    s.bind(1, l.cve_id).bind(2, l.repo_url).bind(3, l.commit_hash);
    s.run();
    note_write();
}

void Store::resolve_cve_links()
{
    exec(R"sql(
UPDATE cve SET code_linked = EXISTS (
  SELECT 1 FROM cve_commit_link l JOIN commits m ON m.hash = l.commit_hash WHERE l.cve_id = cve.cve_id)
  OR EXISTS (
  SELECT 1 FROM cve_commit_link l JOIN repository r ON lower(l.repo_url) LIKE '%/' || lower(r.full_name)
  WHERE l.cve_id = cve.cve_id AND l.commit_hash IS NULL);
UPDATE repository SET cve_id = coalesce((
  SELECT min(l.cve_id) FROM cve_commit_link l
  WHERE lower(l.repo_url) LIKE '%/' || lower(repository.full_name)), cve_id);
)sql");
    note_write();
}

void Store::upsert_tool_run(const tools::ToolRun& r)
{
    Stmt s(db_, R"sql(
INSERT INTO tool_run (tool, content_hash, target_path, started_at, duration_seconds, exit_status, raw_output)
VALUES (?1, ?2, ?3, ?4, ?5, ?6, ?7)
ON CONFLICT (tool, content_hash) DO NOTHING)sql");
    s.bind(1, to_string(r.tool)).bind(2, r.content_hash).bind(3, r.target_path).bind(4, r.started_at);
    s.bind(5, r.duration_seconds).bind(6, tools::to_string(r.exit_status)).bind(7, r.raw_output);
    s.run();
    note_write();
}

std::optional<tools::ToolRun> Store::find_tool_run(ToolId tool, const std::string& content_hash) const
{
    Stmt s(db_, R"sql(
SELECT target_path, started_at, duration_seconds, exit_status, raw_output FROM tool_run
WHERE tool = ?1 AND content_hash = ?2)sql");
    s.bind(1, to_string(tool)).bind(2, content_hash);
    if (!s.step())
        return std::nullopt;
    tools::ToolRun r;
    r.tool = tool;
    r.content_hash = content_hash;
    r.target_path = s.text(0);
    r.started_at = s.text(1);
    r.duration_seconds = s.real(2);
    r.exit_status = tools::parse_exit_status(s.text(3)).value_or(tools::ExitStatus::ToolError);
    r.raw_output = s.text(4);
    return r;
}

void Store::replace_labels(std::int64_t file_change_id, const std::vector<labeling::LabeledFinding>& labels)
{
    Stmt del_pairs(db_, "DELETE FROM vuln_fix_pair WHERE file_change_id = ?1");
    del_pairs.bind(1, file_change_id).run();
    Stmt del(db_, "DELETE FROM labeled_finding WHERE file_change_id = ?1");
    del.bind(1, file_change_id).run();
    for (const auto& l : labels) {
        Stmt s(db_, R"sql(
INSERT INTO labeled_finding (file_change_id, canonical, line, supporting_tools, vote_count, threshold_used, severity)
VALUES (?1, ?2, ?3, ?4, ?5, ?6, ?7))sql");
        s.bind(1, file_change_id).bind(2, l.canonical).bind(3, l.line).bind(4, tools_text(l.supporting_tools));
        s.bind(5, l.vote_count).bind(6, l.threshold_used);
        s.bind(7, static_cast<int>(l.severity.value_or(SeverityLevel::Low)));
        s.run();
        note_write();
    }
}

void Store::replace_pairs(std::int64_t file_change_id, const std::vector<VulnFixPair>& pairs)
{
    Stmt del(db_, "DELETE FROM vuln_fix_pair WHERE file_change_id = ?1");
    del.bind(1, file_change_id).run();
    for (const auto& p : pairs) {
        if (p.labels.empty())
            throw Error(ErrorCode::IntegrityViolation, p.pair_id + ": a pair needs at least one label");
        Stmt s(db_, R"sql(
INSERT INTO vuln_fix_pair (pair_id, file_change_id, commit_hash, granularity, path, method_name, before_start,
                           before_end, after_start, after_end, vulnerable_excerpt, fixed_excerpt)
VALUES (?1, ?2, ?3, ?4, ?5, ?6, ?7, ?8, ?9, ?10, ?11, ?12))sql");
        s.bind(1, p.pair_id).bind(2, file_change_id).bind(3, p.commit_hash).bind(4, to_string(p.granularity));
        s.bind(5, p.path).bind(6, p.method_name);
        std::optional<std::size_t> bs, be, as, ae;
        if (p.before) {
            bs = p.before->start;
            be = p.before->end;
        }
        if (p.after) {
            as = p.after->start;
            ae = p.after->end;
        }
        s.bind(7, bs).bind(8, be).bind(9, as).bind(10, ae).bind(11, p.vulnerable_excerpt).bind(12, p.fixed_excerpt);
        s.run();
        note_write();
        for (const auto& l : p.labels) {
            Stmt link(db_, R"sql(
INSERT INTO pair_label (pair_id, label_id)
SELECT ?1, label_id FROM labeled_finding WHERE file_change_id = ?2 AND canonical = ?3 AND line = ?4)sql");
            link.bind(1, p.pair_id).bind(2, file_change_id).bind(3, l.canonical).bind(4, l.line);
            link.run();
            if (sqlite3_changes(db_) != 1)
                throw Error(ErrorCode::IntegrityViolation, p.pair_id + ": label " + l.canonical + "@" +
                                                               std::to_string(l.line) + " is not stored");
            note_write();
        }
    }
}

bool Store::has_commit(const std::string& hash) const
{
    Stmt s(db_, "SELECT 1 FROM commits WHERE hash = ?1");
    s.bind(1, hash);
    return s.step();
}

std::optional<miner::Commit> Store::find_commit(const std::string& hash) const
{
    Stmt s(db_, R"sql(
SELECT hash, repo_id, author, author_date, author_timezone, committer, committer_date, committer_timezone,
       committer_epoch, msg, dmm_unit_size, is_merge, matched_keywords
FROM commits WHERE hash = ?1)sql");
    s.bind(1, hash);
    if (!s.step())
        return std::nullopt;
    miner::Commit c;
    c.hash = s.text(0);
    c.repo_id = s.integer(1);
    c.author = s.text(2);
    c.author_date = s.text(3);
    c.author_timezone = s.text(4);
    c.committer = s.text(5);
    c.committer_date = s.text(6);
    c.committer_timezone = s.text(7);
    c.committer_epoch = s.integer(8);
    c.msg = s.text(9);
    if (!s.is_null(10))
        c.dmm_unit_size = s.real(10);
    c.is_merge = s.integer(11) != 0;
    auto kw = s.text(12);
    if (!kw.empty())
        c.matched_keywords = util::split(kw, ';');
    return c;
}

std::vector<StoredFileChange> Store::file_changes(const std::string& commit_hash) const
{
    Stmt s(db_, R"sql(
SELECT file_change_id, commit_hash, path, old_path, change_type, code_before, code_after, stripped_before,
       stripped_after, diff, verdict
FROM file_change WHERE commit_hash = ?1 ORDER BY path)sql");
    s.bind(1, commit_hash);
    std::vector<StoredFileChange> out;
    while (s.step()) {
        StoredFileChange f;
        f.id = s.integer(0);
        f.change.commit_hash = s.text(1);
        f.change.path = s.text(2);
        f.change.old_path = s.opt_text(3);
        f.change.change_type = miner::parse_change_type(s.text(4)).value_or(miner::ChangeType::Modified);
        f.change.code_before = s.opt_text(5);
        f.change.code_after = s.opt_text(6);
        f.stripped_before = s.opt_text(7);
        f.stripped_after = s.opt_text(8);
        f.change.diff = s.text(9);
        if (auto v = s.opt_text(10))
            f.verdict = labeling::parse_verdict(*v);
        out.push_back(std::move(f));
    }
    return out;
}

std::optional<SeverityLevel> Store::cve_severity_for_commit(const std::string& commit_hash) const
{
    Stmt s(db_, R"sql(
SELECT max(c.severity) FROM cve_commit_link l JOIN cve c ON c.cve_id = l.cve_id WHERE l.commit_hash = ?1)sql");
    s.bind(1, commit_hash);
    if (!s.step() || s.is_null(0))
        return std::nullopt;
    return static_cast<SeverityLevel>(s.integer(0));
}

std::vector<std::string> Store::repository_urls() const
{
    Stmt s(db_, "SELECT DISTINCT repo_url FROM cve_commit_link ORDER BY repo_url");
    std::vector<std::string> out;
    while (s.step())
        out.push_back(s.text(0));
    return out;
}

std::vector<miner::Repository> Store::repositories(Language language) const
{
    Stmt s(db_, R"sql(
SELECT repo_id, name, full_name, description, homepage, date_created, owner, date_last_push, fork_count, clone_url,
       cve_id
FROM repository WHERE repo_language = ?1 ORDER BY repo_id)sql");
    s.bind(1, to_string(language));
    std::vector<miner::Repository> out;
    while (s.step()) {
        miner::Repository r;
        r.repo_id = s.integer(0);
        r.name = s.text(1);
        r.full_name = s.text(2);
        r.description = s.text(3);
        r.homepage = s.text(4);
        r.date_created = s.text(5);
        r.owner = s.text(6);
        r.date_last_push = s.text(7);
        r.repo_language = language;
        r.fork_count = s.integer(8);
        r.clone_url = s.text(9);
        r.cve_id = s.opt_text(10);
        out.push_back(std::move(r));
    }
    return out;
}

std::map<std::string, std::int64_t> Store::row_counts() const
{
    std::map<std::string, std::int64_t> out;
    for (const auto& t : table_names()) {
        Stmt s(db_, ("SELECT count(*) FROM " + t).c_str());
        s.step();
        out[t] = s.integer(0);
    }
    return out;
}

std::size_t count_contracts(const std::string& source)
{
    const auto masked = lexing::mask_non_code(source, lexing::lex(source, Language::Solidity));
    std::size_t count = 0;
    int depth = 0;
    std::size_t i = 0;
    while (i < masked.size()) {
        const char c = masked[i];
        if (c == '{') {
            ++depth;
        } else if (c == '}') {
            if (depth > 0)
                --depth;
        } else if (util::is_word_char(c)) {
            std::size_t j = i;
            while (j < masked.size() && util::is_word_char(masked[j]))
                ++j;
            if (depth == 0 && std::string_view(masked).substr(i, j - i) == "contract")
                ++count;
            i = j;
            continue;
        }
        ++i;
    }
    return count;
}

Stats Store::stats() const
{
    Stats st;
    auto scalar = [&](const char* sql) {
        Stmt s(db_, sql);
        s.step();
        return s.integer(0);
    };
    st.repo_count = scalar("SELECT count(*) FROM repository");
    st.commit_count = scalar("SELECT count(*) FROM commits");
    st.file_count = scalar("SELECT count(*) FROM file_change");
    st.method_count = scalar("SELECT count(*) FROM vuln_fix_pair WHERE granularity = 'method'");
    st.line_count = scalar("SELECT count(*) FROM vuln_fix_pair WHERE granularity = 'line'");
    st.pair_count = scalar("SELECT count(*) FROM vuln_fix_pair");
    st.cve_count = scalar("SELECT count(*) FROM cve");
    st.vulnerability_count = scalar("SELECT count(*) FROM labeled_finding");

    Stmt files(db_, "SELECT path, coalesce(code_after, code_before) FROM file_change");
    while (files.step()) {
        auto lang = language_for_path(files.text(0));
        if (lang == Language::Vyper)
            st.contract_count += 1;
        else if (lang == Language::Solidity)
            st.contract_count += static_cast<std::int64_t>(count_contracts(files.text(1)));
    }

    Stmt sev(db_, "SELECT severity, count(*) FROM labeled_finding GROUP BY severity");
    while (sev.step())
        st.severity_histogram[static_cast<SeverityLevel>(sev.integer(0))] = sev.integer(1);
    Stmt types(db_, "SELECT canonical, count(*) FROM labeled_finding GROUP BY canonical ORDER BY canonical");
    while (types.step())
        st.type_histogram[types.text(0)] = types.integer(1);
    return st;
}

} // namespace automesc::store
