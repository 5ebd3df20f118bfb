#include "automesc/store/export.hpp"

#include <sqlite3.h>

#include <algorithm>
#include <json.hpp>
#include <map>

#include "automesc/util/error.hpp"
#include "automesc/util/strings.hpp"

namespace automesc::store {

using ordered_json = nlohmann::ordered_json;

ExportFormat parse_export_format(std::string_view name)
{
    if (name == "csv")
        return ExportFormat::Csv;
    if (name == "jsonl")
        return ExportFormat::Jsonl;
    throw Error(ErrorCode::UnsupportedFormat, "export format '" + std::string(name) + "' (expected csv or jsonl)");
}

std::string_view to_string(ExportFormat format)
{
    return format == ExportFormat::Csv ? "csv" : "jsonl";
}

std::optional<ExportTable> parse_export_table(std::string_view name)
{
    if (name == "pairs")
        return ExportTable::Pairs;
    if (name == "labels")
        return ExportTable::Labels;
    return std::nullopt;
}

ExportFormat format_for_path(const std::string& path)
{
    const std::string lower = util::to_lower(path);
    if (util::ends_with(lower, ".csv"))
        return ExportFormat::Csv;
    if (util::ends_with(lower, ".jsonl") || util::ends_with(lower, ".json"))
        return ExportFormat::Jsonl;
    throw Error(ErrorCode::UnsupportedFormat, "cannot infer a format from '" + path + "'");
}

std::optional<std::size_t> Dataset::index_of(std::string_view column) const
{
    auto it = std::find(columns.begin(), columns.end(), column);
    if (it == columns.end())
        return std::nullopt;
    return static_cast<std::size_t>(it - columns.begin());
}

namespace {

// Minimal statement helper; store.cpp keeps its own richer one private.
struct Query {
    Query(sqlite3* db, const std::string& sql) : db_(db)
    {
        if (sqlite3_prepare_v2(db, sql.c_str(), -1, &stmt, nullptr) != SQLITE_OK)
            throw Error(ErrorCode::StoreError, sqlite3_errmsg(db));
    }
    ~Query() { sqlite3_finalize(stmt); }
    bool step()
    {
        int rc = sqlite3_step(stmt);
        if (rc == SQLITE_ROW)
            return true;
        if (rc != SQLITE_DONE)
            throw Error(ErrorCode::StoreError, sqlite3_errmsg(db_));
        return false;
    }
    void bind(int i, const std::string& v) { sqlite3_bind_text(stmt, i, v.data(), static_cast<int>(v.size()), SQLITE_TRANSIENT); }
    util::CsvField cell(int col) const
    {
        if (sqlite3_column_type(stmt, col) == SQLITE_NULL)
            return std::nullopt;
        auto p = sqlite3_column_text(stmt, col);
        return std::string(reinterpret_cast<const char*>(p), static_cast<std::size_t>(sqlite3_column_bytes(stmt, col)));
    }

    sqlite3* db_;
    sqlite3_stmt* stmt = nullptr;
};

const char* severity_name_sql = "CASE max(f.severity) WHEN 1 THEN 'Low' WHEN 2 THEN 'Medium' WHEN 3 THEN 'High' END";

std::string where_clause(const Selection& sel, const std::string& commit_col, const std::string& granularity_col)
{
    std::vector<std::string> parts;
    if (sel.commit_hash)
        parts.push_back(commit_col + " = :commit");
    if (sel.granularity && !granularity_col.empty())
        parts.push_back(granularity_col + " = :granularity");
    return parts.empty() ? std::string{} : " WHERE " + util::join(parts, " AND ");
}

void bind_selection(Query& q, const Selection& sel)
{
    if (sel.commit_hash)
        q.bind(sqlite3_bind_parameter_index(q.stmt, ":commit"), *sel.commit_hash);
    if (sel.granularity) {
        int idx = sqlite3_bind_parameter_index(q.stmt, ":granularity");
        if (idx)
            q.bind(idx, std::string(to_string(*sel.granularity)));
    }
}

} // namespace

Dataset query_pairs(const Store& store, const Selection& sel)
{
    Dataset d;
    d.columns = {"pair_id",      "commit_hash", "repo_id",   "granularity", "path",       "method_name",
                 "line",         "before_start", "before_end", "after_start", "after_end", "labels",
                 "severity",     "cve_id",      "vulnerable_excerpt", "fixed_excerpt"};
    d.integer_columns = {"repo_id", "line", "before_start", "before_end", "after_start", "after_end"};

    const std::string linked = sel.include_unlinked_cves ? "1" : "c.code_linked = 1";
    const std::string sql = std::string(R"sql(
SELECT p.pair_id, p.commit_hash, m.repo_id, p.granularity, p.path, p.method_name,
       CASE WHEN p.granularity = 'line' THEN p.before_start END,
       p.before_start, p.before_end, p.after_start, p.after_end,
       (SELECT group_concat(canonical, ';') FROM (
          SELECT DISTINCT f.canonical FROM pair_label pl JOIN labeled_finding f ON f.label_id = pl.label_id
          WHERE pl.pair_id = p.pair_id ORDER BY f.canonical)),
       (SELECT )sql") + severity_name_sql + R"sql( FROM pair_label pl JOIN labeled_finding f ON f.label_id = pl.label_id
          WHERE pl.pair_id = p.pair_id),
       coalesce(
         (SELECT min(l.cve_id) FROM cve_commit_link l JOIN cve c ON c.cve_id = l.cve_id
          WHERE l.commit_hash = p.commit_hash AND )sql" + linked + R"sql(),
         (SELECT min(l.cve_id) FROM repository r
            JOIN cve_commit_link l ON l.commit_hash IS NULL AND lower(l.repo_url) LIKE '%/' || lower(r.full_name)
            JOIN cve c ON c.cve_id = l.cve_id
          WHERE r.repo_id = m.repo_id AND )sql" + linked + R"sql()),
       p.vulnerable_excerpt, p.fixed_excerpt
FROM vuln_fix_pair p JOIN commits m ON m.hash = p.commit_hash)sql" +
                            where_clause(sel, "p.commit_hash", "p.granularity") + " ORDER BY p.pair_id";
    Query q(store.handle(), sql);
    bind_selection(q, sel);
    while (q.step()) {
        util::CsvRow row;
        for (int i = 0; i < static_cast<int>(d.columns.size()); ++i)
            row.push_back(q.cell(i));
        d.rows.push_back(std::move(row));
    }
    return d;
}

Dataset query_labels(const Store& store, const Selection& sel)
{
    Dataset d;
    d.columns = {"commit_hash", "repo_id", "path", "line", "labels", "severity", "supporting_tools"};
    d.integer_columns = {"repo_id", "line"};
    const std::string sql = std::string(R"sql(
SELECT fc.commit_hash, m.repo_id, fc.path, f.line,
       group_concat(f.canonical, ';'), )sql") + severity_name_sql + R"sql(,
       group_concat(f.canonical || '=' || replace(f.supporting_tools, ';', '+'), ';')
FROM (SELECT * FROM labeled_finding ORDER BY canonical) f
JOIN file_change fc ON fc.file_change_id = f.file_change_id
JOIN commits m ON m.hash = fc.commit_hash)sql" +
                            where_clause(sel, "fc.commit_hash", "") +
                            " GROUP BY fc.file_change_id, f.line ORDER BY fc.commit_hash, fc.path, f.line";
    Query q(store.handle(), sql);
    bind_selection(q, sel);
    while (q.step()) {
        util::CsvRow row;
        for (int i = 0; i < static_cast<int>(d.columns.size()); ++i)
            row.push_back(q.cell(i));
        d.rows.push_back(std::move(row));
    }
    return d;
}

std::string render(const Dataset& data, ExportFormat format)
{
    std::string out;
    if (format == ExportFormat::Csv) {
        util::CsvRow header(data.columns.begin(), data.columns.end());
        out += util::csv_encode_row(header);
        for (const auto& row : data.rows)
            out += util::csv_encode_row(row);
        return out;
    }
    for (const auto& row : data.rows) {
        ordered_json obj = ordered_json::object();
        for (std::size_t i = 0; i < data.columns.size(); ++i) {
            const auto& col = data.columns[i];
            const auto& cell = i < row.size() ? row[i] : util::CsvField{};
            if (!cell)
                obj[col] = nullptr;
            else if (data.integer_columns.count(col) && util::parse_int(*cell))
                obj[col] = *util::parse_int(*cell);
            else
                obj[col] = *cell;
        }
        out += obj.dump();
        out += '\n';
    }
    return out;
}

Dataset parse_dataset(std::string_view text, ExportFormat format)
{
    Dataset d;
    if (format == ExportFormat::Csv) {
        auto rows = util::csv_parse(text);
        if (rows.empty())
            return d;
        for (const auto& h : rows.front())
            d.columns.push_back(h.value_or(""));
        for (std::size_t r = 1; r < rows.size(); ++r) {
            if (rows[r].size() != d.columns.size())
                throw Error(ErrorCode::ParseError, "csv row " + std::to_string(r + 1) + " has " +
                                                       std::to_string(rows[r].size()) + " fields, header has " +
                                                       std::to_string(d.columns.size()));
            d.rows.push_back(std::move(rows[r]));
        }
        return d;
    }
    std::size_t lineno = 0;
    for (const auto& line : util::split_lines(text)) {
        ++lineno;
        if (util::trim(line).empty())
            continue;
        ordered_json obj;
        try {
            obj = ordered_json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCode::ParseError, "jsonl line " + std::to_string(lineno) + ": " + e.what());
        }
        if (!obj.is_object())
            throw Error(ErrorCode::ParseError, "jsonl line " + std::to_string(lineno) + " is not an object");
        if (d.columns.empty() && d.rows.empty()) {
            for (const auto& [k, v] : obj.items()) {
                d.columns.push_back(k);
                if (v.is_number_integer())
                    d.integer_columns.insert(k);
            }
        }
        util::CsvRow row;
        for (const auto& col : d.columns) {
            auto it = obj.find(col);
            if (it == obj.end() || it->is_null())
                row.push_back(std::nullopt);
            else if (it->is_string())
                row.push_back(it->get<std::string>());
            else {
                if (it->is_number_integer())
                    d.integer_columns.insert(col);
                row.push_back(it->dump());
            }
        }
        for (const auto& [k, v] : obj.items())
            if (!d.index_of(k))
                throw Error(ErrorCode::ParseError, "jsonl line " + std::to_string(lineno) + " has unknown key '" + k + "'");
        d.rows.push_back(std::move(row));
    }
    return d;
}

} // namespace automesc::store
