#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace bssplan::csv {

struct Table {
    std::filesystem::path path;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<int> line_of_row;

    /// Column index, or -1.
    int find(const std::string& name) const;
    /// Column index; throws InputError naming the file when absent.
    int require(const std::string& name) const;

    const std::string& cell(std::size_t row, int col) const { return rows[row][static_cast<std::size_t>(col)]; }
    double number(std::size_t row, int col) const;
    /// Empty cells give `fallback`.
    double number_or(std::size_t row, int col, double fallback) const;
    bool flag(std::size_t row, int col) const;
    [[noreturn]] void fail(std::size_t row, const std::string& what) const;
};

/// Comma separated, first line is the header, blank lines and lines starting
/// with '#' are skipped, cells are trimmed. No quoting.
Table read(const std::filesystem::path& path);

std::vector<std::string> split(const std::string& line, char sep);
std::string trim(std::string s);
/// Parses a full decimal number, accepting "inf"/"-inf".
std::optional<double> parse_double(const std::string& s);

} // namespace bssplan::csv
