#include "fogran/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace fogran::lp {

namespace {

constexpr double kFeasTol = 1e-9;
constexpr double kOptTol = 1e-11;
constexpr double kPivotTol = 1e-9;
constexpr double kTieTol = 1e-12;
constexpr int kDegenerateStreak = 50;

}  // namespace

IncrementalSimplex::IncrementalSimplex(std::vector<double> objective)
    : n_(objective.size()), objective_(std::move(objective)) {
    if (n_ == 0) throw std::invalid_argument("linear program needs at least one variable");
    reduced_ = objective_;
    nonbasic_.resize(n_);
    row_of_.assign(n_, -1);
    col_of_.resize(n_);
    for (std::size_t j = 0; j < n_; ++j) {
        nonbasic_[j] = j;
        col_of_[j] = static_cast<std::ptrdiff_t>(j);
    }
}

void IncrementalSimplex::add_row(std::span<const double> dense, double rhs) {
    if (dense.size() != n_) throw std::invalid_argument("row length does not match variable count");
    append_row(std::vector<double>(dense.begin(), dense.end()), rhs);
}

void IncrementalSimplex::add_sparse_row(std::span<const int> index, std::span<const double> coeff,
                                        double rhs) {
    if (index.size() != coeff.size()) throw std::invalid_argument("sparse row size mismatch");
    std::vector<double> dense(n_, 0.0);
    for (std::size_t e = 0; e < index.size(); ++e) {
        const auto k = static_cast<std::size_t>(index[e]);
        if (k >= n_) throw std::out_of_range("sparse row names unknown variable");
        dense[k] += coeff[e];
    }
    append_row(std::move(dense), rhs);
}

void IncrementalSimplex::append_row(std::vector<double> coeff_by_var, double rhs) {
    if (!std::isfinite(rhs)) throw std::invalid_argument("row bound must be finite");
    std::vector<std::pair<std::size_t, double>> sparse;
    for (std::size_t k = 0; k < n_; ++k) {
        if (coeff_by_var[k] != 0.0) sparse.emplace_back(k, coeff_by_var[k]);
    }

    // Express the new slack in terms of the current nonbasic variables.
    std::vector<double> row(n_, 0.0);
    double beta = rhs;
    for (const auto& [k, a] : sparse) {
        if (col_of_[k] >= 0) {
            row[static_cast<std::size_t>(col_of_[k])] += a;
        } else {
            const auto r = static_cast<std::size_t>(row_of_[k]);
            beta -= a * beta_[r];
            const double* src = &tab_[r * n_];
            for (std::size_t j = 0; j < n_; ++j) row[j] -= a * src[j];
        }
    }
    const std::size_t slack = n_ + basic_.size();
    tab_.insert(tab_.end(), row.begin(), row.end());
    beta_.push_back(beta);
    basic_.push_back(slack);
    row_of_.push_back(static_cast<std::ptrdiff_t>(basic_.size() - 1));
    col_of_.push_back(-1);
    original_rows_.push_back(std::move(sparse));
    original_rhs_.push_back(rhs);
}

void IncrementalSimplex::pivot(std::size_t r, std::size_t j) {
    const double a = at(r, j);
    min_pivot_ = pivots_ == 0 ? std::abs(a) : std::min(min_pivot_, std::abs(a));
    ++pivots_;

    double* prow = &tab_[r * n_];
    for (std::size_t k = 0; k < n_; ++k) prow[k] /= a;
    prow[j] = 1.0 / a;
    beta_[r] /= a;

    const std::size_t m = basic_.size();
    for (std::size_t i = 0; i < m; ++i) {
        if (i == r) continue;
        double* irow = &tab_[i * n_];
        const double f = irow[j];
        if (f == 0.0) continue;
        for (std::size_t k = 0; k < n_; ++k) irow[k] -= f * prow[k];
        irow[j] = -f * prow[j];
        beta_[i] -= f * beta_[r];
    }
    const double dj = reduced_[j];
    if (dj != 0.0) {
        for (std::size_t k = 0; k < n_; ++k) reduced_[k] -= dj * prow[k];
        reduced_[j] = -dj * prow[j];
        z0_ += dj * beta_[r];
    }

    const std::size_t entering = nonbasic_[j];
    const std::size_t leaving = basic_[r];
    basic_[r] = entering;
    nonbasic_[j] = leaving;
    row_of_[entering] = static_cast<std::ptrdiff_t>(r);
    col_of_[entering] = -1;
    row_of_[leaving] = -1;
    col_of_[leaving] = static_cast<std::ptrdiff_t>(j);
}

void IncrementalSimplex::primal() {
    const std::size_t limit = 200 * (basic_.size() + n_) + 1000;
    int degenerate = 0;
    for (std::size_t iter = 0;; ++iter) {
        if (iter > limit) throw LpError("primal simplex exceeded its iteration limit");
        const bool bland = degenerate > kDegenerateStreak;
        std::size_t enter = n_;
        for (std::size_t j = 0; j < n_; ++j) {
            if (reduced_[j] <= kOptTol) continue;
            if (enter == n_) {
                enter = j;
            } else if (bland) {
                if (nonbasic_[j] < nonbasic_[enter]) enter = j;
            } else if (reduced_[j] > reduced_[enter] + kTieTol ||
                       (std::abs(reduced_[j] - reduced_[enter]) <= kTieTol &&
                        nonbasic_[j] < nonbasic_[enter])) {
                enter = j;
            }
        }
        if (enter == n_) return;

        std::size_t leave = basic_.size();
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t r = 0; r < basic_.size(); ++r) {
            const double a = at(r, enter);
            if (a <= kPivotTol) continue;
            const double ratio = std::max(beta_[r], 0.0) / a;
            if (ratio < best - kTieTol ||
                (std::abs(ratio - best) <= kTieTol && basic_[r] < basic_[leave])) {
                best = ratio;
                leave = r;
            }
        }
        if (leave == basic_.size()) {
            std::ostringstream os;
            os << "linear program is unbounded along variable " << nonbasic_[enter];
            throw LpError(os.str());
        }
        degenerate = best <= kTieTol ? degenerate + 1 : 0;
        pivot(leave, enter);
    }
}

void IncrementalSimplex::dual() {
    const std::size_t limit = 200 * (basic_.size() + n_) + 1000;
    int degenerate = 0;
    for (std::size_t iter = 0;; ++iter) {
        if (iter > limit) throw LpError("dual simplex exceeded its iteration limit");
        const bool bland = degenerate > kDegenerateStreak;
        std::size_t leave = basic_.size();
        for (std::size_t r = 0; r < basic_.size(); ++r) {
            if (beta_[r] >= -kFeasTol) continue;
            if (leave == basic_.size()) {
                leave = r;
            } else if (bland) {
                if (basic_[r] < basic_[leave]) leave = r;
            } else if (beta_[r] < beta_[leave] - kTieTol ||
                       (std::abs(beta_[r] - beta_[leave]) <= kTieTol && basic_[r] < basic_[leave])) {
                leave = r;
            }
        }
        if (leave == basic_.size()) return;

        std::size_t enter = n_;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < n_; ++j) {
            const double a = at(leave, j);
            if (a >= -kPivotTol) continue;
            const double ratio = std::max(-reduced_[j], 0.0) / -a;
            if (ratio < best - kTieTol ||
                (std::abs(ratio - best) <= kTieTol && nonbasic_[j] < nonbasic_[enter])) {
                best = ratio;
                enter = j;
            }
        }
        if (enter == n_) throw LpError("linear program is infeasible");
        degenerate = best <= kTieTol ? degenerate + 1 : 0;
        pivot(leave, enter);
    }
}

Solution IncrementalSimplex::solve() {
    const bool primal_feasible =
        std::all_of(beta_.begin(), beta_.end(), [](double b) { return b >= -kFeasTol; });
    if (!primal_feasible) {
        const bool dual_feasible =
            std::all_of(reduced_.begin(), reduced_.end(), [](double d) { return d <= kOptTol; });
        if (!dual_feasible) {
            throw LpError("origin infeasible and basis not dual feasible; phase-1 is not supported");
        }
        dual();
    }
    primal();
    return extract();
}

Solution IncrementalSimplex::extract() {
    Solution sol;
    sol.x.assign(n_, 0.0);
    for (std::size_t r = 0; r < basic_.size(); ++r) {
        if (basic_[r] < n_) sol.x[basic_[r]] = std::max(0.0, beta_[r]);
    }
    for (std::size_t k = 0; k < n_; ++k) sol.value += objective_[k] * sol.x[k];
    sol.duals.assign(basic_.size(), 0.0);
    for (std::size_t i = 0; i < basic_.size(); ++i) {
        const std::ptrdiff_t col = col_of_[n_ + i];
        if (col >= 0) sol.duals[i] = std::max(0.0, -reduced_[static_cast<std::size_t>(col)]);
    }
    for (std::size_t i = 0; i < original_rows_.size(); ++i) {
        double lhs = 0.0;
        for (const auto& [k, a] : original_rows_[i]) lhs += a * sol.x[k];
        const double slack_tol = 1e-9 * std::max(1.0, std::abs(original_rhs_[i]));
        if (lhs > original_rhs_[i] + slack_tol) {
            std::ostringstream os;
            os << "simplex result violates row " << i << " by " << lhs - original_rhs_[i]
               << " (smallest pivot " << min_pivot_ << "); basis is numerically singular";
            throw LpError(os.str());
        }
    }
    sol.pivots = pivots_;
    sol.min_pivot = min_pivot_;
    return sol;
}

Solution solve_max(const LinearProgram& lp) {
    if (lp.rows.size() != lp.rhs.size()) throw std::invalid_argument("row and bound counts differ");
    IncrementalSimplex simplex(lp.objective);
    for (std::size_t i = 0; i < lp.rows.size(); ++i) {
        if (lp.rhs[i] < 0.0) {
            throw LpError("origin is infeasible (negative bound); phase-1 is not supported");
        }
        simplex.add_row(lp.rows[i], lp.rhs[i]);
    }
    return simplex.solve();
}

}  // namespace fogran::lp
