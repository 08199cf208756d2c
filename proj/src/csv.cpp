#include "csv.hpp"

#include "bssplan/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <limits>

namespace bssplan::csv {

std::string trim(std::string s) {
    auto space = [](unsigned char c) { return std::isspace(c) != 0; };
    s.erase(s.begin(), std::find_if_not(s.begin(), s.end(), space));
    s.erase(std::find_if_not(s.rbegin(), s.rend(), space).base(), s.end());
    return s;
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t pos = line.find(sep, start);
        out.push_back(trim(line.substr(start, pos == std::string::npos ? std::string::npos : pos - start)));
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    return out;
}

std::optional<double> parse_double(const std::string& raw) {
    const std::string s = trim(raw);
    if (s == "inf" || s == "+inf" || s == "Infinity") return std::numeric_limits<double>::infinity();
    if (s == "-inf" || s == "-Infinity") return -std::numeric_limits<double>::infinity();
    double v = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    if (!s.empty() && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last || s.empty()) return std::nullopt;
    return v;
}

Table read(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError(fmt::format("cannot open '{}'", path.string()));
    Table t;
    t.path = path;
    std::string line;
    int line_no = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        auto cells = split(line, ',');
        if (!have_header) {
            t.header = std::move(cells);
            have_header = true;
            continue;
        }
        if (cells.size() != t.header.size())
            throw InputError(fmt::format("{}:{}: expected {} fields, found {}", path.string(), line_no, t.header.size(),
                                         cells.size()));
        t.rows.push_back(std::move(cells));
        t.line_of_row.push_back(line_no);
    }
    if (!have_header) throw InputError(fmt::format("'{}' is empty", path.string()));
    return t;
}

int Table::find(const std::string& name) const {
    auto it = std::find(header.begin(), header.end(), name);
    return it == header.end() ? -1 : static_cast<int>(it - header.begin());
}

int Table::require(const std::string& name) const {
    const int c = find(name);
    if (c < 0) throw InputError(fmt::format("{}: missing column '{}'", path.string(), name));
    return c;
}

void Table::fail(std::size_t row, const std::string& what) const {
    throw InputError(fmt::format("{}:{}: {}", path.string(), line_of_row[row], what));
}

double Table::number(std::size_t row, int col) const {
    auto v = parse_double(cell(row, col));
    if (!v) fail(row, fmt::format("column '{}': '{}' is not a number", header[col], cell(row, col)));
    return *v;
}

double Table::number_or(std::size_t row, int col, double fallback) const {
    if (col < 0 || cell(row, col).empty()) return fallback;
    return number(row, col);
}

bool Table::flag(std::size_t row, int col) const {
    if (col < 0) return false;
    std::string v = cell(row, col);
    std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (v == "1" || v == "true" || v == "yes") return true;
    if (v.empty() || v == "0" || v == "false" || v == "no") return false;
    fail(row, fmt::format("column '{}': '{}' is not a boolean", header[col], cell(row, col)));
}

} // namespace bssplan::csv
