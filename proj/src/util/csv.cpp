#include "automesc/util/csv.hpp"

#include "automesc/util/error.hpp"

namespace automesc::util {

std::string csv_encode_row(const CsvRow& row)
{
    std::string out;
    for (std::size_t i = 0; i < row.size(); ++i) {
        if (i)
            out += ',';
        if (!row[i])
            continue;
        const std::string& v = *row[i];
        bool quote = v.empty() || v.find_first_of(",\"\r\n") != std::string::npos;
        if (!quote) {
            out += v;
            continue;
        }
        out += '"';
        for (char c : v) {
            if (c == '"')
                out += '"';
            out += c;
        }
        out += '"';
    }
    out += '\n';
    return out;
}

std::vector<CsvRow> csv_parse(std::string_view text)
{
    std::vector<CsvRow> rows;
    CsvRow row;
    std::string field;
    bool quoted = false;    // current field was quoted
    bool in_quotes = false;
    bool field_started = false;
    std::size_t line = 1;

    auto end_field = [&] {
        if (quoted || !field.empty())
            row.emplace_back(field);
        else
            row.emplace_back(std::nullopt);
        field.clear();
        quoted = false;
        field_started = false;
    };
    auto end_row = [&] {
        end_field();
        rows.push_back(std::move(row));
        row.clear();
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                if (c == '\n')
                    ++line;
                field += c;
            }
            continue;
        }
        switch (c) {
        case '"':
            if (field_started && !field.empty())
                throw Error(ErrorCode::ParseError, "stray quote on line " + std::to_string(line));
            in_quotes = true;
            quoted = true;
            field_started = true;
            break;
        case ',':
            end_field();
            break;
        case '\r':
            if (i + 1 < text.size() && text[i + 1] == '\n')
                break;
            field += c;
            break;
        case '\n':
            end_row();
            ++line;
            break;
        default:
            field += c;
            field_started = true;
        }
    }
    if (in_quotes)
        throw Error(ErrorCode::ParseError, "unterminated quoted field starting before line " + std::to_string(line));
    if (field_started || quoted || !row.empty())
        end_row();
    return rows;
}

} // namespace automesc::util
