#include "bssplan/lp.hpp"

#include "basis_lu.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace bssplan::lp {
namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kDropTol = 1e-14;

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double power_of_two(double v) { return std::exp2(std::round(std::log2(v))); }

// Problem left after presolve, scaled, in both column and row storage.
struct Reduced {
    int m = 0;
    int n = 0;
    std::vector<int> col_start{0};
    std::vector<int> col_row;
    std::vector<double> col_val;
    std::vector<int> row_start;
    std::vector<int> row_col;
    std::vector<double> row_val;
    std::vector<double> cost;
    std::vector<double> lower;
    std::vector<double> upper;
    std::vector<double> row_lower;
    std::vector<double> row_upper;
    std::vector<double> col_scale;
    std::vector<double> row_scale;
    double cost_scale = 1.0;

    void build_rows() {
        row_start.assign(m + 1, 0);
        for (int r : col_row) ++row_start[r + 1];
        for (int i = 0; i < m; ++i) row_start[i + 1] += row_start[i];
        row_col.resize(col_row.size());
        row_val.resize(col_row.size());
        std::vector<int> fill(row_start.begin(), row_start.end() - 1);
        for (int j = 0; j < n; ++j)
            for (int k = col_start[j]; k < col_start[j + 1]; ++k) {
                const int pos = fill[col_row[k]]++;
                row_col[pos] = j;
                row_val[pos] = col_val[k];
            }
    }
};

struct Presolve {
    std::vector<int> col_of;       // reduced column -> original
    std::vector<double> value;     // original values of removed columns
    std::vector<char> removed;
    bool infeasible = false;
    bool unbounded_ray = false;    // an empty column improves without limit
};

Presolve presolve(const LpInstance& lp, const SolverConfig& cfg, Reduced& out) {
    const int n = lp.num_cols();
    const int m = lp.num_rows();
    Presolve pre;
    pre.value.assign(n, 0.0);
    pre.removed.assign(n, 0);

    std::vector<int> col_count(n, 0);
    for (std::size_t k = 0; k < lp.row_index.size(); ++k) ++col_count[lp.row_index[k]];

    std::vector<double> offset(m, 0.0);
    std::vector<int> row_count(m, 0);
    for (int i = 0; i < m; ++i) {
        for (std::size_t k = lp.row_start[i]; k < lp.row_start[i + 1]; ++k) {
            const int j = lp.row_index[k];
            if (lp.col_lower[j] == lp.col_upper[j])
                offset[i] += lp.row_value[k] * lp.col_lower[j];
            else
                ++row_count[i];
        }
    }

    for (int j = 0; j < n; ++j) {
        if (lp.col_lower[j] == lp.col_upper[j]) {
            pre.removed[j] = 1;
            pre.value[j] = lp.col_lower[j];
        } else if (col_count[j] == 0) {
            pre.removed[j] = 1;
            const double c = lp.cost[j];
            const double lo = lp.col_lower[j];
            const double hi = lp.col_upper[j];
            double v = std::clamp(0.0, lo, hi);
            if (c > 0.0) {
                if (lo == -kInf) pre.unbounded_ray = true;
                else v = lo;
            } else if (c < 0.0) {
                if (hi == kInf) pre.unbounded_ray = true;
                else v = hi;
            }
            pre.value[j] = v;
        }
    }

    std::vector<int> row_map(m, -1);
    std::vector<double> rl;
    std::vector<double> ru;
    for (int i = 0; i < m; ++i) {
        auto [lo, hi] = lp.row_bounds(i);
        lo -= offset[i];
        hi -= offset[i];
        if (row_count[i] == 0) {
            const double tol_lo = cfg.feas_tol * std::max(1.0, std::abs(lo));
            const double tol_hi = cfg.feas_tol * std::max(1.0, std::abs(hi));
            if (lo > tol_lo || hi < -tol_hi) pre.infeasible = true;
            continue;
        }
        if (lo == -kInf && hi == kInf) continue;
        row_map[i] = static_cast<int>(rl.size());
        rl.push_back(lo);
        ru.push_back(hi);
    }

    out.m = static_cast<int>(rl.size());
    out.row_lower = std::move(rl);
    out.row_upper = std::move(ru);

    // column-major copy of the surviving block
    std::vector<std::vector<std::pair<int, double>>> cols;
    std::vector<int> reduced_index(n, -1);
    for (int j = 0; j < n; ++j) {
        if (pre.removed[j]) continue;
        reduced_index[j] = static_cast<int>(pre.col_of.size());
        pre.col_of.push_back(j);
    }
    cols.resize(pre.col_of.size());
    for (int i = 0; i < m; ++i) {
        if (row_map[i] < 0) continue;
        for (std::size_t k = lp.row_start[i]; k < lp.row_start[i + 1]; ++k) {
            const int rj = reduced_index[lp.row_index[k]];
            if (rj >= 0) cols[rj].emplace_back(row_map[i], lp.row_value[k]);
        }
    }
    out.n = static_cast<int>(pre.col_of.size());
    for (int rj = 0; rj < out.n; ++rj) {
        const int j = pre.col_of[rj];
        // duplicate entries in one row are summed
        auto& col = cols[rj];
        std::sort(col.begin(), col.end());
        for (std::size_t k = 0; k < col.size(); ++k) {
            if (!out.col_row.empty() && out.col_start.back() < static_cast<int>(out.col_row.size()) &&
                out.col_row.back() == col[k].first) {
                out.col_val.back() += col[k].second;
            } else {
                out.col_row.push_back(col[k].first);
                out.col_val.push_back(col[k].second);
            }
        }
        out.col_start.push_back(static_cast<int>(out.col_row.size()));
        out.cost.push_back(lp.cost[j]);
        out.lower.push_back(lp.col_lower[j]);
        out.upper.push_back(lp.col_upper[j]);
    }
    out.col_scale.assign(out.n, 1.0);
    out.row_scale.assign(out.m, 1.0);
    return pre;
}

// Geometric-mean equilibration with power-of-two factors, then objective
// normalisation so the largest cost is O(1).
void scale(Reduced& p, bool matrix) {
    if (matrix && p.n > 0 && p.m > 0) {
        for (int pass = 0; pass < 6; ++pass) {
            std::vector<double> rmin(p.m, kInf);
            std::vector<double> rmax(p.m, 0.0);
            for (int j = 0; j < p.n; ++j)
                for (int k = p.col_start[j]; k < p.col_start[j + 1]; ++k) {
                    const double a = std::abs(p.col_val[k] * p.row_scale[p.col_row[k]] * p.col_scale[j]);
                    if (a == 0.0) continue;
                    rmin[p.col_row[k]] = std::min(rmin[p.col_row[k]], a);
                    rmax[p.col_row[k]] = std::max(rmax[p.col_row[k]], a);
                }
            for (int i = 0; i < p.m; ++i)
                if (rmax[i] > 0.0) p.row_scale[i] = power_of_two(p.row_scale[i] / std::sqrt(rmin[i] * rmax[i]));
            for (int j = 0; j < p.n; ++j) {
                double cmin = kInf;
                double cmax = 0.0;
                for (int k = p.col_start[j]; k < p.col_start[j + 1]; ++k) {
                    const double a = std::abs(p.col_val[k] * p.row_scale[p.col_row[k]] * p.col_scale[j]);
                    if (a == 0.0) continue;
                    cmin = std::min(cmin, a);
                    cmax = std::max(cmax, a);
                }
                if (cmax > 0.0) p.col_scale[j] = power_of_two(p.col_scale[j] / std::sqrt(cmin * cmax));
            }
        }
        for (int j = 0; j < p.n; ++j) {
            const double s = p.col_scale[j];
            for (int k = p.col_start[j]; k < p.col_start[j + 1]; ++k) p.col_val[k] *= p.row_scale[p.col_row[k]] * s;
            p.cost[j] *= s;
            p.lower[j] /= s;
            p.upper[j] /= s;
        }
        for (int i = 0; i < p.m; ++i) {
            p.row_lower[i] *= p.row_scale[i];
            p.row_upper[i] *= p.row_scale[i];
        }
    }
    double cmax = 0.0;
    for (double c : p.cost) cmax = std::max(cmax, std::abs(c));
    if (cmax > 0.0) {
        p.cost_scale = power_of_two(1.0 / cmax);
        for (double& c : p.cost) c *= p.cost_scale;
    }
}

class Simplex {
public:
    Simplex(const Reduced& p, const SolverConfig& cfg)
        : p_(p), cfg_(cfg), m_(p.m), n_(p.n) {}

    Status run();
    long iterations() const { return iter_; }
    double value(int j) const { return x_[j]; }

private:
    enum class State : std::uint8_t { Basic, Lower, Upper, Free };

    struct Ratio {
        int row = -1;
        double theta = 0.0;
        bool flip = false;
        bool unbounded = false;
        bool to_upper = false;
    };

    template <class F>
    void for_column(int j, F&& f) const {
        if (j < n_) {
            for (int k = p_.col_start[j]; k < p_.col_start[j + 1]; ++k) f(p_.col_row[k], p_.col_val[k]);
        } else if (j < n_ + m_) {
            f(j - n_, -1.0);
        } else {
            const int a = j - n_ - m_;
            f(art_row_[a], art_sign_[a]);
        }
    }

    double column_dot(int j, const Eigen::VectorXd& v) const {
        double s = 0.0;
        for_column(j, [&](int i, double a) { s += a * v[i]; });
        return s;
    }

    void initialise();
    void refactor();
    void compute_primal();
    void compute_duals();
    Eigen::VectorXd ftran(int j) const;
    Eigen::VectorXd btran(Eigen::VectorXd v) const;
    int direction(int j) const;
    int price() const;
    Ratio ratio_test(int q, int dir, const Eigen::VectorXd& alpha) const;
    void pivot_row(const Eigen::VectorXd& rho);
    void update(int q, int dir, const Eigen::VectorXd& alpha, const Ratio& rt);
    void add_eta(const Eigen::VectorXd& alpha, int r);
    void drive_out_artificials();
    double max_artificial() const;

    const Reduced& p_;
    const SolverConfig& cfg_;
    int m_;
    int n_;
    int nvar_ = 0;
    std::vector<int> art_row_;
    std::vector<double> art_sign_;

    std::vector<double> lo_, up_, c_, x_, d_, w_;
    std::vector<State> state_;
    std::vector<int> head_;

    BasisLu lu_;
    // last basis that factorized cleanly
    std::vector<int> good_head_;
    std::vector<State> good_state_;
    std::vector<double> good_x_;
    int restores_ = 0;
    double pivot_floor_ = 1e-11;
    std::vector<int> eta_row_;
    std::vector<double> eta_pivot_;
    std::vector<std::size_t> eta_start_{0};
    std::vector<int> eta_idx_;
    std::vector<double> eta_val_;

    // scratch for the pivot row
    std::vector<double> row_acc_;
    std::vector<int> row_touched_;
    std::vector<char> row_mark_;

    long iter_ = 0;
    bool bland_ = false;
    int degenerate_run_ = 0;
    int phase_ = 2;
};

void Simplex::initialise() {
    nvar_ = n_ + m_;
    lo_.resize(nvar_);
    up_.resize(nvar_);
    x_.assign(nvar_, 0.0);
    state_.assign(nvar_, State::Lower);
    std::uint64_t rng = cfg_.start_perturbation;

    for (int j = 0; j < n_; ++j) {
        lo_[j] = p_.lower[j];
        up_[j] = p_.upper[j];
        if (lo_[j] > -kInf && up_[j] < kInf && cfg_.start_perturbation != 0 && (splitmix64(rng) & 1U)) {
            state_[j] = State::Upper;
            x_[j] = up_[j];
        } else if (lo_[j] > -kInf) {
            state_[j] = State::Lower;
            x_[j] = lo_[j];
        } else if (up_[j] < kInf) {
            state_[j] = State::Upper;
            x_[j] = up_[j];
        } else {
            state_[j] = State::Free;
            x_[j] = 0.0;
        }
    }

    std::vector<double> activity(m_, 0.0);
    for (int j = 0; j < n_; ++j)
        if (x_[j] != 0.0)
            for (int k = p_.col_start[j]; k < p_.col_start[j + 1]; ++k) activity[p_.col_row[k]] += p_.col_val[k] * x_[j];

    head_.assign(m_, -1);
    for (int i = 0; i < m_; ++i) {
        const int s = n_ + i;
        lo_[s] = p_.row_lower[i];
        up_[s] = p_.row_upper[i];
        const double r = activity[i];
        if (r >= lo_[s] - cfg_.feas_tol && r <= up_[s] + cfg_.feas_tol) {
            head_[i] = s;
            state_[s] = State::Basic;
            x_[s] = r;
            continue;
        }
        // logical parks at the violated bound; an artificial absorbs the gap
        const double bound = r < lo_[s] ? lo_[s] : up_[s];
        state_[s] = r < lo_[s] ? State::Lower : State::Upper;
        x_[s] = bound;
        // a.x - r_i + sign * art = 0  =>  art = (bound - a.x) / sign
        const double sign = bound - r > 0.0 ? 1.0 : -1.0;
        art_row_.push_back(i);
        art_sign_.push_back(sign);
        const int a = static_cast<int>(art_row_.size()) - 1;
        head_[i] = n_ + m_ + a;
        lo_.push_back(0.0);
        up_.push_back(kInf);
        x_.push_back(std::abs(bound - r));
        state_.push_back(State::Basic);
    }
    nvar_ = n_ + m_ + static_cast<int>(art_row_.size());
    d_.assign(nvar_, 0.0);
    w_.assign(nvar_, 1.0);
    c_.assign(nvar_, 0.0);
    row_acc_.assign(n_, 0.0);
    row_mark_.assign(n_, 0);

    phase_ = art_row_.empty() ? 2 : 1;
    if (phase_ == 1) {
        for (int j = n_ + m_; j < nvar_; ++j) c_[j] = 1.0;
    } else {
        for (int j = 0; j < n_; ++j) c_[j] = p_.cost[j];
    }
}

// A basis that turns out singular is replaced by the last good one, and
// later pivots must be larger.
void Simplex::refactor() {
    std::vector<BasisLu::Column> cols(m_);
    for (int r = 0; r < m_; ++r) for_column(head_[r], [&](int i, double a) { cols[r].emplace_back(i, a); });
    if (!lu_.factorize(m_, cols).empty()) {
        if (good_head_.empty() || ++restores_ > 8) throw std::runtime_error("simplex: singular basis");
        head_ = good_head_;
        state_ = good_state_;
        x_ = good_x_;
        pivot_floor_ = std::min(pivot_floor_ * 100.0, 1e-6);
        bland_ = false;
        degenerate_run_ = 0;
        std::fill(w_.begin(), w_.end(), 1.0);
        for (int r = 0; r < m_; ++r) {
            cols[r].clear();
            for_column(head_[r], [&](int i, double a) { cols[r].emplace_back(i, a); });
        }
        if (!lu_.factorize(m_, cols).empty()) throw std::runtime_error("simplex: singular basis");
    }
    good_head_ = head_;
    good_state_ = state_;
    good_x_ = x_;
    eta_row_.clear();
    eta_pivot_.clear();
    eta_start_.assign(1, 0);
    eta_idx_.clear();
    eta_val_.clear();
}

Eigen::VectorXd Simplex::ftran(int j) const {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(m_);
    for_column(j, [&](int i, double a) { v[i] += a; });
    lu_.ftran(v.data());
    for (std::size_t e = 0; e < eta_row_.size(); ++e) {
        const int r = eta_row_[e];
        const double xr = v[r] / eta_pivot_[e];
        if (xr != 0.0)
            for (std::size_t k = eta_start_[e]; k < eta_start_[e + 1]; ++k) v[eta_idx_[k]] -= eta_val_[k] * xr;
        v[r] = xr;
    }
    return v;
}

Eigen::VectorXd Simplex::btran(Eigen::VectorXd v) const {
    for (std::size_t e = eta_row_.size(); e-- > 0;) {
        const int r = eta_row_[e];
        double s = v[r];
        for (std::size_t k = eta_start_[e]; k < eta_start_[e + 1]; ++k) s -= eta_val_[k] * v[eta_idx_[k]];
        v[r] = s / eta_pivot_[e];
    }
    lu_.btran(v.data());
    return v;
}

void Simplex::add_eta(const Eigen::VectorXd& alpha, int r) {
    eta_row_.push_back(r);
    eta_pivot_.push_back(alpha[r]);
    for (int i = 0; i < m_; ++i) {
        if (i == r || std::abs(alpha[i]) <= kDropTol) continue;
        eta_idx_.push_back(i);
        eta_val_.push_back(alpha[i]);
    }
    eta_start_.push_back(eta_idx_.size());
}

void Simplex::compute_primal() {
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m_);
    for (int j = 0; j < nvar_; ++j) {
        if (state_[j] == State::Basic || x_[j] == 0.0) continue;
        const double xj = x_[j];
        for_column(j, [&](int i, double a) { rhs[i] -= a * xj; });
    }
    lu_.ftran(rhs.data());
    for (int r = 0; r < m_; ++r) x_[head_[r]] = rhs[r];
}

void Simplex::compute_duals() {
    Eigen::VectorXd cb(m_);
    for (int r = 0; r < m_; ++r) cb[r] = c_[head_[r]];
    const Eigen::VectorXd y = btran(cb);
    for (int j = 0; j < nvar_; ++j) d_[j] = state_[j] == State::Basic ? 0.0 : c_[j] - column_dot(j, y);
}

int Simplex::direction(int j) const {
    const double tol = cfg_.opt_tol;
    switch (state_[j]) {
    case State::Basic: return 0;
    case State::Lower: return (d_[j] < -tol && up_[j] > lo_[j]) ? 1 : 0;
    case State::Upper: return (d_[j] > tol && up_[j] > lo_[j]) ? -1 : 0;
    case State::Free: return d_[j] < -tol ? 1 : (d_[j] > tol ? -1 : 0);
    }
    return 0;
}

int Simplex::price() const {
    int best = -1;
    double best_score = 0.0;
    for (int j = 0; j < nvar_; ++j) {
        if (direction(j) == 0) continue;
        if (bland_) return j;
        const double score = d_[j] * d_[j] / w_[j];
        if (score > best_score) {
            best_score = score;
            best = j;
        }
    }
    return best;
}

Simplex::Ratio Simplex::ratio_test(int q, int dir, const Eigen::VectorXd& alpha) const {
    Ratio rt;
    const double tol = cfg_.feas_tol;
    const double flip = (lo_[q] > -kInf && up_[q] < kInf) ? up_[q] - lo_[q] : kInf;

    if (bland_) {
        double best = kInf;
        int best_var = -1;
        for (int r = 0; r < m_; ++r) {
            const double a = alpha[r];
            if (std::abs(a) < kPivotTol) continue;
            const double g = -dir * a;
            const int j = head_[r];
            double t;
            if (g < 0.0 && lo_[j] > -kInf) t = (x_[j] - lo_[j]) / -g;
            else if (g > 0.0 && up_[j] < kInf) t = (up_[j] - x_[j]) / g;
            else continue;
            t = std::max(t, 0.0);
            if (t < best - 1e-12 || (t <= best + 1e-12 && j < best_var)) {
                best = t;
                best_var = j;
                rt.row = r;
                rt.to_upper = g > 0.0;
            }
        }
        if (flip <= best) {
            rt.flip = true;
            rt.theta = flip;
            rt.row = -1;
        } else if (rt.row < 0) {
            rt.unbounded = true;
        } else {
            rt.theta = best;
        }
        return rt;
    }

    // Harris two-pass test: relaxed bound in pass one, largest pivot in pass two
    double theta_max = kInf;
    for (int r = 0; r < m_; ++r) {
        const double a = alpha[r];
        if (std::abs(a) < kPivotTol) continue;
        const double g = -dir * a;
        const int j = head_[r];
        if (g < 0.0 && lo_[j] > -kInf) theta_max = std::min(theta_max, (x_[j] - lo_[j] + tol) / -g);
        else if (g > 0.0 && up_[j] < kInf) theta_max = std::min(theta_max, (up_[j] + tol - x_[j]) / g);
    }
    if (flip <= theta_max && flip < kInf) {
        rt.flip = true;
        rt.theta = flip;
        return rt;
    }
    if (theta_max == kInf) {
        rt.unbounded = true;
        return rt;
    }
    double best_pivot = 0.0;
    for (int r = 0; r < m_; ++r) {
        const double a = alpha[r];
        if (std::abs(a) < kPivotTol) continue;
        const double g = -dir * a;
        const int j = head_[r];
        double t;
        if (g < 0.0 && lo_[j] > -kInf) t = (x_[j] - lo_[j]) / -g;
        else if (g > 0.0 && up_[j] < kInf) t = (up_[j] - x_[j]) / g;
        else continue;
        if (t <= theta_max && std::abs(a) > best_pivot) {
            best_pivot = std::abs(a);
            rt.row = r;
            rt.theta = std::max(t, 0.0);
            rt.to_upper = g > 0.0;
        }
    }
    return rt;
}

// Row r of B^-1 N, scattered into row_acc_ (structurals) for the touched set.
void Simplex::pivot_row(const Eigen::VectorXd& rho) {
    for (int j : row_touched_) {
        row_acc_[j] = 0.0;
        row_mark_[j] = 0;
    }
    row_touched_.clear();
    for (int i = 0; i < m_; ++i) {
        const double ri = rho[i];
        if (std::abs(ri) <= kDropTol) continue;
        for (int k = p_.row_start[i]; k < p_.row_start[i + 1]; ++k) {
            const int j = p_.row_col[k];
            if (!row_mark_[j]) {
                row_mark_[j] = 1;
                row_touched_.push_back(j);
            }
            row_acc_[j] += ri * p_.row_val[k];
        }
    }
}

void Simplex::update(int q, int dir, const Eigen::VectorXd& alpha, const Ratio& rt) {
    const double step = dir * rt.theta;
    if (step != 0.0)
        for (int r = 0; r < m_; ++r)
            if (alpha[r] != 0.0) x_[head_[r]] -= step * alpha[r];

    if (rt.flip) {
        x_[q] = dir > 0 ? up_[q] : lo_[q];
        state_[q] = dir > 0 ? State::Upper : State::Lower;
        return;
    }
    x_[q] += step;

    const int r = rt.row;
    const int leaving = head_[r];
    const double alpha_r = alpha[r];

    // reduced-cost and Devex updates use the pivot row
    Eigen::VectorXd er = Eigen::VectorXd::Zero(m_);
    er[r] = 1.0;
    const Eigen::VectorXd rho = btran(er);
    pivot_row(rho);
    const double theta_d = d_[q] / alpha_r;
    const double wq = w_[q];
    auto touch = [&](int j, double arj) {
        if (state_[j] == State::Basic || j == q || arj == 0.0) return;
        d_[j] -= theta_d * arj;
        const double ratio = arj / alpha_r;
        w_[j] = std::max(w_[j], ratio * ratio * wq);
    };
    for (int j : row_touched_) touch(j, row_acc_[j]);
    for (int i = 0; i < m_; ++i) {
        if (std::abs(rho[i]) <= kDropTol) continue;
        touch(n_ + i, -rho[i]);
    }
    for (int a = 0; a < static_cast<int>(art_row_.size()); ++a) {
        const double rv = rho[art_row_[a]];
        if (std::abs(rv) > kDropTol) touch(n_ + m_ + a, art_sign_[a] * rv);
    }

    x_[leaving] = rt.to_upper ? up_[leaving] : lo_[leaving];
    state_[leaving] = rt.to_upper ? State::Upper : State::Lower;
    if (lo_[leaving] == -kInf && up_[leaving] == kInf) state_[leaving] = State::Free;
    d_[leaving] = -theta_d;
    w_[leaving] = std::max(wq / (alpha_r * alpha_r), 1.0);
    d_[q] = 0.0;
    state_[q] = State::Basic;
    head_[r] = q;
    add_eta(alpha, r);

    if (w_[leaving] > 1e8) std::fill(w_.begin(), w_.end(), 1.0);
}

double Simplex::max_artificial() const {
    double worst = 0.0;
    for (int j = n_ + m_; j < nvar_; ++j) worst = std::max(worst, std::abs(x_[j]));
    return worst;
}

void Simplex::drive_out_artificials() {
    for (int r = 0; r < m_; ++r) {
        if (head_[r] < n_ + m_) continue;
        Eigen::VectorXd er = Eigen::VectorXd::Zero(m_);
        er[r] = 1.0;
        const Eigen::VectorXd rho = btran(er);
        pivot_row(rho);
        int best = -1;
        double best_abs = 1e-7;
        for (int j : row_touched_) {
            if (state_[j] == State::Basic) continue;
            if (std::abs(row_acc_[j]) > best_abs) {
                best_abs = std::abs(row_acc_[j]);
                best = j;
            }
        }
        for (int i = 0; i < m_; ++i) {
            const int j = n_ + i;
            if (state_[j] == State::Basic) continue;
            if (std::abs(rho[i]) > best_abs) {
                best_abs = std::abs(rho[i]);
                best = j;
            }
        }
        if (best < 0) continue; // redundant row: the artificial stays basic at zero
        const Eigen::VectorXd alpha = ftran(best);
        const int leaving = head_[r];
        x_[leaving] = 0.0;
        state_[leaving] = State::Lower;
        state_[best] = State::Basic;
        head_[r] = best;
        add_eta(alpha, r);
        if (static_cast<int>(eta_row_.size()) >= cfg_.refactor_interval) {
            refactor();
            compute_primal();
        }
    }
}

Status Simplex::run() {
    initialise();
    if (m_ == 0) return Status::Optimal;
    refactor();
    compute_primal();
    compute_duals();

    for (;;) {
        if (iter_ >= cfg_.max_iterations) return Status::IterationLimit;
        if (static_cast<int>(eta_row_.size()) >= cfg_.refactor_interval) {
            refactor();
            compute_primal();
            compute_duals();
        }
        int q = price();
        if (q < 0) {
            refactor();
            compute_primal();
            compute_duals();
            q = price();
        }
        if (q < 0) {
            if (phase_ == 2) return Status::Optimal;
            if (max_artificial() > cfg_.feas_tol) return Status::Infeasible;
            drive_out_artificials();
            for (int j = n_ + m_; j < nvar_; ++j) {
                up_[j] = 0.0;
                c_[j] = 0.0;
                if (state_[j] != State::Basic) x_[j] = 0.0;
            }
            for (int j = 0; j < n_; ++j) c_[j] = p_.cost[j];
            phase_ = 2;
            bland_ = false;
            degenerate_run_ = 0;
            std::fill(w_.begin(), w_.end(), 1.0);
            refactor();
            compute_primal();
            compute_duals();
            continue;
        }

        const int dir = direction(q);
        const Eigen::VectorXd alpha = ftran(q);
        const Ratio rt = ratio_test(q, dir, alpha);
        if (rt.unbounded) {
            if (phase_ == 2) return Status::Unbounded;
            throw std::runtime_error("simplex: unbounded ray in phase one");
        }
        ++iter_;
        if (!rt.flip && std::abs(alpha[rt.row]) < pivot_floor_) {
            // numerically unusable pivot: refresh and try again
            refactor();
            compute_primal();
            compute_duals();
            continue;
        }
        update(q, dir, alpha, rt);

        if (rt.theta <= 1e-12) {
            if (++degenerate_run_ > cfg_.degenerate_limit) bland_ = true;
        } else {
            degenerate_run_ = 0;
            bland_ = false;
        }
    }
}

} // namespace

SolveResult solve(const LpInstance& lp, const SolverConfig& cfg) {
    if (auto issues = lp.check(); !issues.empty())
        throw std::invalid_argument("malformed LP: " + issues.front());
    if (!(cfg.feas_tol > 0.0) || !(cfg.opt_tol > 0.0))
        throw std::invalid_argument("solver tolerances must be positive");

    SolveResult result;
    Reduced reduced;
    Presolve pre = presolve(lp, cfg, reduced);
    if (pre.infeasible) {
        result.status = Status::Infeasible;
        return result;
    }
    scale(reduced, cfg.scaling);
    reduced.build_rows();

    Simplex simplex(reduced, cfg);
    result.status = simplex.run();
    result.iterations = simplex.iterations();
    if (result.status == Status::Optimal && pre.unbounded_ray) result.status = Status::Unbounded;
    if (result.status != Status::Optimal) return result;

    result.x = pre.value;
    for (int rj = 0; rj < reduced.n; ++rj)
        result.x[pre.col_of[rj]] = simplex.value(rj) * reduced.col_scale[rj];
    // snap to bounds within tolerance
    for (int j = 0; j < lp.num_cols(); ++j) {
        double& v = result.x[j];
        if (v < lp.col_lower[j]) v = lp.col_lower[j];
        if (v > lp.col_upper[j]) v = lp.col_upper[j];
    }
    result.objective = lp.objective_value(result.x);
    double worst = 0.0;
    for (int i = 0; i < lp.num_rows(); ++i) {
        double act = 0.0;
        for (std::size_t k = lp.row_start[i]; k < lp.row_start[i + 1]; ++k) act += lp.row_value[k] * result.x[lp.row_index[k]];
        const auto [lo, hi] = lp.row_bounds(i);
        worst = std::max({worst, lo - act, act - hi});
    }
    result.max_infeasibility = worst;
    return result;
}

} // namespace bssplan::lp
