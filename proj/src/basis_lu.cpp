#include "basis_lu.hpp"

#include <Eigen/OrderingMethods>
#include <Eigen/SparseCore>

#include <algorithm>
#include <cmath>

namespace bssplan::lp {
namespace {

constexpr double kSingular = 1e-11;
constexpr double kThreshold = 0.1;
constexpr double kDrop = 1e-14;

// Transposes step-indexed columns into step-indexed rows.
void transpose(int m, const std::vector<int>& start, const std::vector<int>& idx, const std::vector<double>& val,
               std::vector<int>& t_start, std::vector<int>& t_idx, std::vector<double>& t_val) {
    t_start.assign(m + 1, 0);
    for (int i : idx) ++t_start[i + 1];
    for (int i = 0; i < m; ++i) t_start[i + 1] += t_start[i];
    t_idx.resize(idx.size());
    t_val.resize(idx.size());
    std::vector<int> fill(t_start.begin(), t_start.end() - 1);
    for (int j = 0; j < m; ++j)
        for (int p = start[j]; p < start[j + 1]; ++p) {
            const int q = fill[idx[p]]++;
            t_idx[q] = j;
            t_val[q] = val[p];
        }
}

} // namespace

std::vector<int> BasisLu::factorize(int m, const std::vector<Column>& cols) {
    m_ = m;
    std::vector<int> dependent;

    // singletons first, each on a distinct row; COLAMD orders the rest on the
    // rows they leave free
    std::vector<int> order;
    order.reserve(m);
    std::vector<char> claimed(m, 0);
    std::vector<int> rest;
    for (int c = 0; c < m; ++c) {
        if (cols[c].size() == 1 && !claimed[cols[c][0].first]) {
            claimed[cols[c][0].first] = 1;
            order.push_back(c);
        } else {
            rest.push_back(c);
        }
    }
    std::vector<int> row_count(m, 0);
    if (!rest.empty()) {
        std::vector<int> sub_row(m, -1);
        int rows = 0;
        for (int i = 0; i < m; ++i)
            if (!claimed[i]) sub_row[i] = rows++;
        std::vector<Eigen::Triplet<double>> trips;
        for (int k = 0; k < static_cast<int>(rest.size()); ++k)
            for (const auto& [i, a] : cols[rest[k]])
                if (sub_row[i] >= 0) {
                    trips.emplace_back(sub_row[i], k, a);
                    ++row_count[i];
                }
        Eigen::SparseMatrix<double> sub(std::max(rows, 1), static_cast<int>(rest.size()));
        sub.setFromTriplets(trips.begin(), trips.end());
        sub.makeCompressed();
        Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic, int> perm;
        Eigen::COLAMDOrdering<int>()(sub, perm);
        std::vector<int> by_rank(rest.size());
        for (int k = 0; k < static_cast<int>(rest.size()); ++k) by_rank[perm.indices()[k]] = rest[k];
        order.insert(order.end(), by_rank.begin(), by_rank.end());
    }

    perm_row_.clear();
    perm_col_.clear();
    l_start_.assign(1, 0);
    l_idx_.clear();
    l_val_.clear();
    u_start_.assign(1, 0);
    u_idx_.clear();
    u_val_.clear();
    u_diag_.clear();

    std::vector<int> pinv(m, -1);
    std::vector<double> x(m, 0.0);
    std::vector<int> mark(m, -1);
    std::vector<int> resume(m, 0);
    std::vector<int> stack;
    std::vector<int> topo;

    for (int stamp = 0; stamp < m; ++stamp) {
        const int c = order[stamp];
        const Column& col = cols[c];

        // rows reachable through L from the column pattern, in postorder
        topo.clear();
        for (const auto& entry : col) {
            if (mark[entry.first] == stamp) continue;
            stack.push_back(entry.first);
            while (!stack.empty()) {
                const int i = stack.back();
                const int j = pinv[i];
                if (mark[i] != stamp) {
                    mark[i] = stamp;
                    resume[i] = j >= 0 ? l_start_[j] : 0;
                }
                bool done = true;
                if (j >= 0) {
                    for (int p = resume[i]; p < l_start_[j + 1]; ++p) {
                        const int r = l_idx_[p];
                        if (mark[r] == stamp) continue;
                        resume[i] = p + 1;
                        stack.push_back(r);
                        done = false;
                        break;
                    }
                }
                if (done) {
                    stack.pop_back();
                    topo.push_back(i);
                }
            }
        }

        for (int i : topo) x[i] = 0.0;
        double norm = 0.0;
        for (const auto& [i, a] : col) {
            x[i] += a;
            norm = std::max(norm, std::abs(a));
        }
        for (std::size_t k = topo.size(); k-- > 0;) {
            const int i = topo[k];
            const int j = pinv[i];
            if (j < 0 || x[i] == 0.0) continue;
            const double xi = x[i];
            for (int p = l_start_[j]; p < l_start_[j + 1]; ++p) x[l_idx_[p]] -= l_val_[p] * xi;
        }

        double biggest = 0.0;
        for (int i : topo)
            if (pinv[i] < 0) biggest = std::max(biggest, std::abs(x[i]));
        if (biggest <= kSingular * std::max(norm, 1.0)) {
            dependent.push_back(c);
            continue;
        }
        int piv = -1;
        for (int i : topo) {
            if (pinv[i] >= 0 || std::abs(x[i]) < kThreshold * biggest) continue;
            if (piv < 0 || row_count[i] < row_count[piv] ||
                (row_count[i] == row_count[piv] && std::abs(x[i]) > std::abs(x[piv])))
                piv = i;
        }

        const int step = static_cast<int>(perm_row_.size());
        const double diag = x[piv];
        for (int i : topo) {
            const double v = x[i];
            if (i == piv || std::abs(v) <= kDrop) continue;
            if (pinv[i] >= 0) {
                u_idx_.push_back(pinv[i]);
                u_val_.push_back(v);
            } else {
                l_idx_.push_back(i);
                l_val_.push_back(v / diag);
            }
        }
        pinv[piv] = step;
        perm_row_.push_back(piv);
        perm_col_.push_back(c);
        u_diag_.push_back(diag);
        u_start_.push_back(static_cast<int>(u_idx_.size()));
        l_start_.push_back(static_cast<int>(l_idx_.size()));
    }
    if (!dependent.empty()) return dependent;

    for (int& i : l_idx_) i = pinv[i];
    transpose(m, l_start_, l_idx_, l_val_, lr_start_, lr_idx_, lr_val_);
    transpose(m, u_start_, u_idx_, u_val_, ur_start_, ur_idx_, ur_val_);
    work_.assign(m, 0.0);
    return dependent;
}

void BasisLu::ftran(double* v) const {
    double* z = work_.data();
    for (int t = 0; t < m_; ++t) z[t] = v[perm_row_[t]];
    for (int t = 0; t < m_; ++t) {
        const double zt = z[t];
        if (zt == 0.0) continue;
        for (int p = l_start_[t]; p < l_start_[t + 1]; ++p) z[l_idx_[p]] -= l_val_[p] * zt;
    }
    for (int k = m_; k-- > 0;) {
        if (z[k] == 0.0) continue;
        const double zk = z[k] / u_diag_[k];
        z[k] = zk;
        for (int p = u_start_[k]; p < u_start_[k + 1]; ++p) z[u_idx_[p]] -= u_val_[p] * zk;
    }
    for (int k = 0; k < m_; ++k) v[perm_col_[k]] = z[k];
}

void BasisLu::btran(double* v) const {
    double* s = work_.data();
    for (int k = 0; k < m_; ++k) s[k] = v[perm_col_[k]];
    for (int k = 0; k < m_; ++k) {
        if (s[k] == 0.0) continue;
        const double sk = s[k] / u_diag_[k];
        s[k] = sk;
        for (int p = ur_start_[k]; p < ur_start_[k + 1]; ++p) s[ur_idx_[p]] -= ur_val_[p] * sk;
    }
    for (int t = m_; t-- > 0;) {
        const double st = s[t];
        if (st == 0.0) continue;
        for (int p = lr_start_[t]; p < lr_start_[t + 1]; ++p) s[lr_idx_[p]] -= lr_val_[p] * st;
    }
    for (int t = 0; t < m_; ++t) v[perm_row_[t]] = s[t];
}

} // namespace bssplan::lp
