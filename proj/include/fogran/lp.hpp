// Dense simplex for max c^T x s.t. A x <= b, x >= 0.

#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace fogran::lp {

class LpError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct LinearProgram {
    std::vector<double> objective;         ///< c, length n
    std::vector<std::vector<double>> rows;  ///< A, m rows of length n
    std::vector<double> rhs;                ///< b, length m
};

struct Solution {
    double value = 0.0;
    std::vector<double> x;
    std::vector<double> duals;  ///< one per row, >= 0
    std::size_t pivots = 0;
    double min_pivot = 0.0;     ///< smallest |pivot| used; a conditioning hint
};

/// Solves a feasible, bounded LP whose origin is feasible (b >= 0).
/// Throws LpError on unboundedness, infeasibility or when the final
/// point violates a constraint beyond tolerance.
Solution solve_max(const LinearProgram& lp);

/// Simplex dictionary that accepts new rows after an optimal solve and
/// re-optimizes from the previous basis with the dual simplex.
///
/// Entering/leaving choices are deterministic: largest improvement with
/// lowest-index ties, switching to Bland's rule after a run of
/// degenerate pivots.
class IncrementalSimplex {
public:
    explicit IncrementalSimplex(std::vector<double> objective);

    std::size_t variables() const { return n_; }
    std::size_t rows() const { return basic_.size(); }

    void add_row(std::span<const double> dense, double rhs);
    void add_sparse_row(std::span<const int> index, std::span<const double> coeff, double rhs);

    Solution solve();

private:
    double& at(std::size_t r, std::size_t j) { return tab_[r * n_ + j]; }
    double at(std::size_t r, std::size_t j) const { return tab_[r * n_ + j]; }
    void append_row(std::vector<double> coeff_by_var, double rhs);
    void pivot(std::size_t r, std::size_t j);
    void primal();
    void dual();
    Solution extract();

    std::size_t n_;
    std::vector<double> objective_;
    std::vector<double> tab_;       // rows x n_: x_B(r) = beta_r - sum_j tab(r,j) x_N(j)
    std::vector<double> beta_;
    std::vector<double> reduced_;   // z = z0 + sum_j reduced_j x_N(j)
    double z0_ = 0.0;
    std::vector<std::size_t> basic_;     // variable id per row
    std::vector<std::size_t> nonbasic_;  // variable id per column
    std::vector<std::ptrdiff_t> row_of_; // variable id -> row, or -1
    std::vector<std::ptrdiff_t> col_of_; // variable id -> column, or -1
    std::vector<std::vector<std::pair<std::size_t, double>>> original_rows_;
    std::vector<double> original_rhs_;
    std::size_t pivots_ = 0;
    double min_pivot_ = 0.0;
};

}  // namespace fogran::lp
