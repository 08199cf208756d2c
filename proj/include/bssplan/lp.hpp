#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace bssplan::lp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Sense : std::uint8_t { Le, Eq, Ge };

/// Minimisation LP with sparse rows and bounded columns.
///
/// A row is `lo <= a.x <= hi` where (lo, hi) follows from sense, rhs and an
/// optional MPS-style range: a nonzero range R turns `a.x <= rhs` into
/// `rhs - |R| <= a.x <= rhs`, `a.x >= rhs` into `rhs <= a.x <= rhs + |R|`, and
/// an equality into `[rhs, rhs + R]` or `[rhs + R, rhs]` depending on sign.
struct LpInstance {
    std::string name = "BSSPLAN";

    std::vector<double> cost;
    std::vector<double> col_lower;
    std::vector<double> col_upper;

    // compressed row storage
    std::vector<std::size_t> row_start{0};
    std::vector<int> row_index;
    std::vector<double> row_value;
    std::vector<Sense> sense;
    std::vector<double> rhs;
    std::vector<double> range;
    std::vector<std::string> row_names;

    int num_cols() const { return static_cast<int>(cost.size()); }
    int num_rows() const { return static_cast<int>(rhs.size()); }
    std::size_t num_nonzeros() const { return row_index.size(); }

    int add_column(double c, double lower, double upper);
    int add_row(std::span<const int> index, std::span<const double> value, Sense s, double b,
                std::string row_name = {}, double row_range = 0.0);

    /// Lower and upper activity bounds of row i, after applying sense and range.
    std::pair<double, double> row_bounds(int i) const;

    /// Structural problems (bad indices, NaN, inverted bounds). Empty if well formed.
    std::vector<std::string> check() const;

    double objective_value(std::span<const double> x) const;
};

enum class Status : std::uint8_t { Optimal, Infeasible, Unbounded, IterationLimit };

const char* to_string(Status s);

struct SolverConfig {
    double feas_tol = 1e-7;
    double opt_tol = 1e-7;
    long max_iterations = 2'000'000;
    bool scaling = true;
    /// Nonzero seeds a random choice of starting bound for every boxed column,
    /// which yields a different starting basis.
    std::uint64_t start_perturbation = 0;
    int refactor_interval = 80;
    /// Consecutive degenerate pivots before switching to Bland's rule.
    int degenerate_limit = 400;
};

struct SolveResult {
    Status status = Status::IterationLimit;
    std::vector<double> x;
    double objective = 0.0;
    double max_infeasibility = 0.0;
    long iterations = 0;
};

/// Bounded-variable revised primal simplex. Throws std::invalid_argument on a
/// malformed instance.
SolveResult solve(const LpInstance& lp, const SolverConfig& cfg = {});

using ColumnNamer = std::function<std::string(int)>;

/// Fixed-format MPS. Column names come from `namer` when given, else C<index>.
void write_mps(const LpInstance& lp, std::ostream& out, const ColumnNamer& namer = {});

struct MpsModel {
    LpInstance lp;
    std::vector<std::string> col_names;
};

/// Reads fixed or free MPS (whitespace separated fields, names without spaces).
MpsModel read_mps(std::istream& in);

} // namespace bssplan::lp
