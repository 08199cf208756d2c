#include "bssplan/lp.hpp"

#include "bssplan/errors.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <unordered_map>

namespace bssplan::lp {
namespace {

constexpr std::size_t kMaxName = 61;

std::string default_column_name(int j) { return fmt::format("C{:07d}", j); }
std::string default_row_name(int i) { return fmt::format("R{:07d}", i); }

// Names must be unique, space-free and short enough for common readers.
std::string sanitize(std::string name, const std::string& fallback) {
    if (name.empty() || name.size() > kMaxName || name.find_first_of(" \t\r\n$*") != std::string::npos)
        return fallback;
    return name;
}

void field_line(std::ostream& out, const std::string& a, const std::string& b, double v) {
    // fields at columns 5, 15 and 25 when names are short; wider names push right
    fmt::print(out, "    {:<8}  {:<8}  {:.17g}\n", a, b, v);
}

} // namespace

void write_mps(const LpInstance& lp, std::ostream& out, const ColumnNamer& namer) {
    const int n = lp.num_cols();
    const int m = lp.num_rows();

    std::vector<std::string> cols(n);
    std::vector<std::string> rows(m);
    for (int j = 0; j < n; ++j) cols[j] = sanitize(namer ? namer(j) : std::string{}, default_column_name(j));
    for (int i = 0; i < m; ++i)
        rows[i] = sanitize(i < static_cast<int>(lp.row_names.size()) ? lp.row_names[i] : std::string{}, default_row_name(i));

    // column-wise view of the rows
    std::vector<std::vector<std::pair<int, double>>> by_col(n);
    for (int i = 0; i < m; ++i)
        for (std::size_t k = lp.row_start[i]; k < lp.row_start[i + 1]; ++k)
            by_col[lp.row_index[k]].emplace_back(i, lp.row_value[k]);

    fmt::print(out, "NAME          {}\n", lp.name);
    fmt::print(out, "ROWS\n");
    fmt::print(out, " N  COST\n");
    for (int i = 0; i < m; ++i) {
        const char type = lp.sense[i] == Sense::Le ? 'L' : lp.sense[i] == Sense::Ge ? 'G' : 'E';
        fmt::print(out, " {}  {}\n", type, rows[i]);
    }

    fmt::print(out, "COLUMNS\n");
    for (int j = 0; j < n; ++j) {
        bool wrote = false;
        if (lp.cost[j] != 0.0) {
            field_line(out, cols[j], "COST", lp.cost[j]);
            wrote = true;
        }
        for (const auto& [i, v] : by_col[j]) {
            field_line(out, cols[j], rows[i], v);
            wrote = true;
        }
        // keep columns that appear nowhere so bounds stay attached to a known name
        if (!wrote) field_line(out, cols[j], "COST", 0.0);
    }

    fmt::print(out, "RHS\n");
    for (int i = 0; i < m; ++i)
        if (lp.rhs[i] != 0.0) field_line(out, "RHS", rows[i], lp.rhs[i]);

    bool any_range = false;
    for (int i = 0; i < m && !lp.range.empty(); ++i) any_range = any_range || lp.range[i] != 0.0;
    if (any_range) {
        fmt::print(out, "RANGES\n");
        for (int i = 0; i < m; ++i)
            if (lp.range[i] != 0.0) field_line(out, "RNG", rows[i], lp.range[i]);
    }

    fmt::print(out, "BOUNDS\n");
    for (int j = 0; j < n; ++j) {
        const double lo = lp.col_lower[j];
        const double hi = lp.col_upper[j];
        if (lo == hi) {
            fmt::print(out, " FX BND       {:<8}  {:.17g}\n", cols[j], lo);
            continue;
        }
        if (lo == -kInf && hi == kInf) {
            fmt::print(out, " FR BND       {}\n", cols[j]);
            continue;
        }
        if (lo == -kInf) fmt::print(out, " MI BND       {}\n", cols[j]);
        else if (lo != 0.0 || hi < 0.0) fmt::print(out, " LO BND       {:<8}  {:.17g}\n", cols[j], lo);
        if (hi != kInf) fmt::print(out, " UP BND       {:<8}  {:.17g}\n", cols[j], hi);
    }
    fmt::print(out, "ENDATA\n");
}

MpsModel read_mps(std::istream& in) {
    MpsModel model;
    LpInstance& lp = model.lp;

    enum class Section { None, Rows, Columns, Rhs, Ranges, Bounds, End };
    Section section = Section::None;

    std::string objective_row;
    std::unordered_map<std::string, int> row_id;
    std::unordered_map<std::string, int> col_id;
    std::vector<std::map<int, double>> entries;   // per row: column -> value
    std::vector<Sense> senses;
    std::vector<std::string> row_names;
    std::vector<double> rhs;
    std::vector<double> ranges;
    double objective_offset = 0.0;

    auto fail = [](int line_no, const std::string& what) {
        throw InputError(fmt::format("MPS line {}: {}", line_no, what));
    };
    auto column = [&](const std::string& name) {
        auto [it, inserted] = col_id.try_emplace(name, static_cast<int>(model.col_names.size()));
        if (inserted) {
            model.col_names.push_back(name);
            lp.add_column(0.0, 0.0, kInf);
        }
        return it->second;
    };
    auto to_double = [&](const std::string& s, int line_no) {
        try {
            std::size_t used = 0;
            const double v = std::stod(s, &used);
            if (used != s.size()) fail(line_no, "bad number '" + s + "'");
            return v;
        } catch (const std::logic_error&) {
            fail(line_no, "bad number '" + s + "'");
        }
        return 0.0;
    };

    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '*') continue;
        std::istringstream ls(line);
        std::vector<std::string> f;
        for (std::string tok; ls >> tok;) f.push_back(tok);
        if (f.empty()) continue;

        if (line[0] != ' ' && line[0] != '\t') {
            const std::string& key = f[0];
            if (key == "NAME") lp.name = f.size() > 1 ? f[1] : "";
            else if (key == "ROWS") section = Section::Rows;
            else if (key == "COLUMNS") section = Section::Columns;
            else if (key == "RHS") section = Section::Rhs;
            else if (key == "RANGES") section = Section::Ranges;
            else if (key == "BOUNDS") section = Section::Bounds;
            else if (key == "ENDATA") section = Section::End;
            else if (key == "OBJSENSE" || key == "OBJSENSE MIN") continue;
            else fail(line_no, "unknown section '" + key + "'");
            continue;
        }

        switch (section) {
        case Section::Rows: {
            if (f.size() < 2) fail(line_no, "row needs type and name");
            const std::string& type = f[0];
            if (type == "N") {
                if (objective_row.empty()) objective_row = f[1];
                continue;
            }
            const Sense s = type == "L" ? Sense::Le : type == "G" ? Sense::Ge : type == "E" ? Sense::Eq
                                                                                        : (fail(line_no, "bad row type"), Sense::Eq);
            row_id[f[1]] = static_cast<int>(senses.size());
            senses.push_back(s);
            row_names.push_back(f[1]);
            entries.emplace_back();
            rhs.push_back(0.0);
            ranges.push_back(0.0);
            break;
        }
        case Section::Columns: {
            if (f.size() >= 3 && f[1] == "'MARKER'") fail(line_no, "integer markers are not supported");
            if (f.size() != 3 && f.size() != 5) fail(line_no, "COLUMNS entry needs 3 or 5 fields");
            const int j = column(f[0]);
            for (std::size_t k = 1; k + 1 < f.size(); k += 2) {
                const double v = to_double(f[k + 1], line_no);
                if (f[k] == objective_row) {
                    lp.cost[j] += v;
                } else {
                    auto it = row_id.find(f[k]);
                    if (it == row_id.end()) fail(line_no, "unknown row '" + f[k] + "'");
                    entries[it->second][j] += v;
                }
            }
            break;
        }
        case Section::Rhs:
        case Section::Ranges: {
            // the set name is optional
            const std::size_t first = (f.size() % 2 == 1) ? 1 : 0;
            for (std::size_t k = first; k + 1 < f.size(); k += 2) {
                const double v = to_double(f[k + 1], line_no);
                if (f[k] == objective_row) {
                    if (section == Section::Rhs) objective_offset = -v;
                    continue;
                }
                auto it = row_id.find(f[k]);
                if (it == row_id.end()) fail(line_no, "unknown row '" + f[k] + "'");
                (section == Section::Rhs ? rhs : ranges)[it->second] = v;
            }
            break;
        }
        case Section::Bounds: {
            if (f.size() < 3) fail(line_no, "bound needs type, set and column");
            const std::string& type = f[0];
            auto it = col_id.find(f[2]);
            const int j = it == col_id.end() ? column(f[2]) : it->second;
            const double v = f.size() > 3 ? to_double(f[3], line_no) : 0.0;
            if (type == "UP") {
                lp.col_upper[j] = v;
                if (v < 0.0 && lp.col_lower[j] == 0.0) lp.col_lower[j] = -kInf;
            } else if (type == "LO") lp.col_lower[j] = v;
            else if (type == "FX") lp.col_lower[j] = lp.col_upper[j] = v;
            else if (type == "FR") {
                lp.col_lower[j] = -kInf;
                lp.col_upper[j] = kInf;
            } else if (type == "MI") lp.col_lower[j] = -kInf;
            else if (type == "PL") lp.col_upper[j] = kInf;
            else fail(line_no, "unsupported bound type '" + type + "'");
            break;
        }
        case Section::None:
        case Section::End:
            fail(line_no, "data outside a section");
        }
    }
    if (objective_offset != 0.0) fail(line_no, "objective constants are not supported");

    for (std::size_t i = 0; i < senses.size(); ++i) {
        std::vector<int> idx;
        std::vector<double> val;
        for (const auto& [j, v] : entries[i]) {
            idx.push_back(j);
            val.push_back(v);
        }
        lp.add_row(idx, val, senses[i], rhs[i], row_names[i], ranges[i]);
    }
    return model;
}

} // namespace bssplan::lp
