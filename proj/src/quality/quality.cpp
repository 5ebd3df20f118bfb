#include "automesc/quality/quality.hpp"

#include <json.hpp>
#include <map>
#include <set>
#include <sstream>

#include "automesc/util/error.hpp"

namespace automesc::quality {

namespace {

std::vector<std::size_t> resolve(const store::Dataset& data, const std::vector<std::string>& fields)
{
    std::vector<std::size_t> idx;
    for (const auto& f : fields) {
        auto i = data.index_of(f);
        if (!i)
            throw Error(ErrorCode::UnknownField, "'" + f + "' is not a column of the dataset");
        idx.push_back(*i);
    }
    return idx;
}

double fraction(std::size_t count, std::size_t n)
{
    return n == 0 ? 0.0 : static_cast<double>(count) / static_cast<double>(n);
}

} // namespace

QualityReport assess(const store::Dataset& data, const AssessOptions& options)
{
    QualityReport r;
    r.n = data.rows.size();
    if (data.columns.empty() && r.n == 0)
        return r;
    const auto required = resolve(data, options.required_fields);
    const auto key = resolve(data, options.key_fields);
    const auto label = resolve(data, {options.label_field}).front();

    std::set<util::CsvRow> seen;
    std::map<util::CsvRow, std::set<util::CsvField>> labels_by_key;
    for (std::size_t i = 0; i < r.n; ++i) {
        const auto& row = data.rows[i];
        bool missing = false;
        for (auto c : required)
            missing = missing || !row[c] || row[c]->empty();
        if (missing)
            r.missing.push_back(i);
        if (!seen.insert(row).second)
            r.duplicates.push_back(i);

        util::CsvRow k;
        bool located = true;
        for (auto c : key) {
            located = located && row[c].has_value();
            k.push_back(row[c]);
        }
        if (located)
            labels_by_key[k].insert(row[label]);
    }
    for (std::size_t i = 0; i < r.n; ++i) {
        const auto& row = data.rows[i];
        util::CsvRow k;
        bool located = true;
        for (auto c : key) {
            located = located && row[c].has_value();
            k.push_back(row[c]);
        }
        if (located && labels_by_key[k].size() > 1)
            r.conflicting.push_back(i);
    }
    r.incompleteness = fraction(r.missing.size(), r.n);
    r.redundancy = fraction(r.duplicates.size(), r.n);
    r.inconsistency = fraction(r.conflicting.size(), r.n);
    return r;
}

std::string format_report(const QualityReport& r)
{
    std::ostringstream out;
    out.setf(std::ios::fixed);
    out.precision(6);
    out << "records         " << r.n << '\n'
        << "incompleteness  " << r.incompleteness << "  (" << r.missing.size() << " with missing data)\n"
        << "redundancy      " << r.redundancy << "  (" << r.duplicates.size() << " duplicates)\n"
        << "inconsistency   " << r.inconsistency << "  (" << r.conflicting.size() << " conflicting)\n";
    nlohmann::ordered_json j{{"n", r.n},
                             {"incompleteness", r.incompleteness},
                             {"redundancy", r.redundancy},
                             {"inconsistency", r.inconsistency},
                             {"missing", r.missing},
                             {"duplicates", r.duplicates},
                             {"conflicting", r.conflicting}};
    out << j.dump() << '\n';
    return out.str();
}

} // namespace automesc::quality
