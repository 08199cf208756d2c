#pragma once

#include <utility>
#include <vector>

namespace bssplan::lp {

/// Sparse LU of a square basis, P B Q = L U, left-looking with threshold
/// partial pivoting. Solves skip zero entries, so a sparse right-hand side
/// only touches the part of the factors it reaches.
class BasisLu {
public:
    using Column = std::vector<std::pair<int, double>>;

    /// Factorizes the m columns. Returns the positions whose column depends
    /// on the others (empty on success); the factors are unusable then.
    std::vector<int> factorize(int m, const std::vector<Column>& cols);

    /// In: right-hand side indexed by row. Out: solution indexed by position.
    void ftran(double* v) const;
    /// In: right-hand side indexed by position. Out: solution indexed by row.
    void btran(double* v) const;

    std::size_t nonzeros() const { return l_idx_.size() + u_idx_.size() + static_cast<std::size_t>(m_); }

private:
    int m_ = 0;
    std::vector<int> perm_row_;  // step -> pivot row
    std::vector<int> perm_col_;  // step -> basis position

    // columns of L and U by step, indices in step space
    std::vector<int> l_start_, l_idx_;
    std::vector<double> l_val_;
    std::vector<int> u_start_, u_idx_;
    std::vector<double> u_val_;
    std::vector<double> u_diag_;
    // rows of L and U by step
    std::vector<int> lr_start_, lr_idx_;
    std::vector<double> lr_val_;
    std::vector<int> ur_start_, ur_idx_;
    std::vector<double> ur_val_;

    mutable std::vector<double> work_;
};

} // namespace bssplan::lp
