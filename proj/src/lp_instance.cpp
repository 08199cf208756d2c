#include "bssplan/lp.hpp"

#include <cmath>
#include <sstream>

namespace bssplan::lp {

int LpInstance::add_column(double c, double lower, double upper) {
    cost.push_back(c);
    col_lower.push_back(lower);
    col_upper.push_back(upper);
    return num_cols() - 1;
}

int LpInstance::add_row(std::span<const int> index, std::span<const double> value, Sense s, double b,
                        std::string row_name, double row_range) {
    for (std::size_t k = 0; k < index.size(); ++k) {
        if (value[k] == 0.0) continue;
        row_index.push_back(index[k]);
        row_value.push_back(value[k]);
    }
    row_start.push_back(row_index.size());
    sense.push_back(s);
    rhs.push_back(b);
    range.push_back(row_range);
    row_names.push_back(std::move(row_name));
    return num_rows() - 1;
}

std::pair<double, double> LpInstance::row_bounds(int i) const {
    const double b = rhs[i];
    const double r = range.empty() ? 0.0 : range[i];
    switch (sense[i]) {
    case Sense::Le:
        return {r != 0.0 ? b - std::abs(r) : -kInf, b};
    case Sense::Ge:
        return {b, r != 0.0 ? b + std::abs(r) : kInf};
    case Sense::Eq:
        if (r > 0.0) return {b, b + r};
        if (r < 0.0) return {b + r, b};
        return {b, b};
    }
    return {b, b};
}

std::vector<std::string> LpInstance::check() const {
    std::vector<std::string> issues;
    const int n = num_cols();
    const int m = num_rows();
    auto note = [&](auto&&... parts) {
        std::ostringstream os;
        (os << ... << parts);
        issues.push_back(os.str());
    };
    if (col_lower.size() != cost.size() || col_upper.size() != cost.size())
        note("column arrays have inconsistent lengths");
    if (row_start.size() != static_cast<std::size_t>(m) + 1 || sense.size() != rhs.size() ||
        (!range.empty() && range.size() != rhs.size()))
        note("row arrays have inconsistent lengths");
    if (!issues.empty()) return issues;
    for (int j = 0; j < n; ++j) {
        if (!std::isfinite(cost[j])) note("column ", j, ": non-finite cost");
        if (std::isnan(col_lower[j]) || std::isnan(col_upper[j]) || col_lower[j] > col_upper[j] ||
            col_lower[j] == kInf || col_upper[j] == -kInf)
            note("column ", j, ": invalid bounds [", col_lower[j], ", ", col_upper[j], "]");
    }
    for (int i = 0; i < m; ++i) {
        if (!std::isfinite(rhs[i]) || (!range.empty() && !std::isfinite(range[i])))
            note("row ", i, ": non-finite rhs or range");
        for (std::size_t k = row_start[i]; k < row_start[i + 1]; ++k) {
            if (row_index[k] < 0 || row_index[k] >= n) note("row ", i, ": column index ", row_index[k], " out of range");
            if (!std::isfinite(row_value[k])) note("row ", i, ": non-finite coefficient");
        }
    }
    return issues;
}

double LpInstance::objective_value(std::span<const double> x) const {
    double z = 0.0;
    for (int j = 0; j < num_cols(); ++j) z += cost[j] * x[j];
    return z;
}

const char* to_string(Status s) {
    switch (s) {
    case Status::Optimal: return "Optimal";
    case Status::Infeasible: return "Infeasible";
    case Status::Unbounded: return "Unbounded";
    case Status::IterationLimit: return "IterationLimit";
    }
    return "Unknown";
}

} // namespace bssplan::lp
