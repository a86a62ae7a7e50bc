#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace hashspread {

// Minimal RFC 4180 CSV support: quoted fields, escaped quotes, CRLF line
// endings, and newlines embedded in quoted fields.
class CsvReader {
public:
    explicit CsvReader(std::istream& in) : in_(in) {}

    // Reads the next record into `fields`. Returns false at end of input.
    bool next(std::vector<std::string>& fields);

    // 1-based line number where the last record started.
    std::size_t line() const { return record_line_; }

private:
    std::istream& in_;
    std::size_t current_line_ = 1;
    std::size_t record_line_ = 1;
};

std::string csv_escape(std::string_view field);
void write_csv_row(std::ostream& out, const std::vector<std::string>& fields);

}  // namespace hashspread
