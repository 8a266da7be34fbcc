#pragma once
// Reading (id, p) tables from CSV/TSV text.
//
// The delimiter is a tab if the first data line contains one, a comma
// otherwise. A first line whose second field is not a number is taken as a
// header. Decimal point only; scientific notation is accepted. Blank lines
// and lines starting with '#' are skipped. Extra columns are ignored.

#include <cstddef>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include "fdplens/study.hpp"

namespace fdplens {

class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& what)
        : std::runtime_error(line == 0 ? what : "line " + std::to_string(line) + ": " + what), line_(line) {}

    // 1-based line of the offending row; 0 when not tied to a line.
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

PValueStudy parse_table(std::string_view text);
PValueStudy read_table_file(const std::filesystem::path& path);

// Strict decimal parse of the whole field, or nothing.
bool parse_number(std::string_view field, double& out);

} // namespace fdplens
