#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

namespace ddm {

class LinalgError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionMismatch : public LinalgError {
public:
    using LinalgError::LinalgError;
};

class ZeroPivot : public LinalgError {
public:
    using LinalgError::LinalgError;
};

class SingularMatrix : public LinalgError {
public:
    using LinalgError::LinalgError;
};

/// Square sparse matrix in compressed-row form, column indices sorted per row.
class SparseMatrix {
public:
    /// Accumulates (i, j, v) contributions; duplicates are summed.
    class Builder {
    public:
        explicit Builder(std::size_t n) : n_(n) {}
        void add(std::size_t i, std::size_t j, double v);
        SparseMatrix build() &&;

    private:
        struct Entry {
            std::size_t row;
            std::size_t col;
            double value;
        };
        std::size_t n_;
        std::vector<Entry> entries_;
    };

    SparseMatrix() = default;

    std::size_t size() const { return n_; }
    std::size_t nonzeros() const { return values_.size(); }

    void multiply(std::span<const double> x, std::span<double> y) const;
    std::vector<double> operator*(std::span<const double> x) const;

    /// A(i, j); zero when the entry is not stored.
    double at(std::size_t i, std::size_t j) const;
    std::vector<double> diagonal() const;

    std::span<const std::size_t> row_columns(std::size_t i) const;
    std::span<const double> row_values(std::size_t i) const;

    double max_abs() const;
    /// max|A_ij − A_ji| / max|A_ij|.
    double symmetry_defect() const;
    /// Positive diagonal and A_ii > Σ_{j≠i} |A_ij| on every row.
    bool strictly_diagonally_dominant() const;

    /// ½ xᵀAx − bᵀx.
    double quadratic_form(std::span<const double> x, std::span<const double> b) const;

private:
    std::size_t n_ = 0;
    std::vector<std::size_t> row_start_{0};
    std::vector<std::size_t> cols_;
    std::vector<double> values_;
};

struct SolveReport {
    int iterations = 0;
    /// ‖Ax − b‖₂ / ‖b‖₂, recomputed from scratch at exit.
    double relative_residual = 0.0;
    bool converged = false;
};

enum class Preconditioner { None, Jacobi };

struct CgOptions {
    double tol = 1e-10;
    int max_iter = 50000;
    Preconditioner preconditioner = Preconditioner::Jacobi;
    /// Called after every iteration with the current iterate.
    std::function<void(int, std::span<const double>)> on_iterate;
};

struct CgResult {
    std::vector<double> x;
    SolveReport report;
};

/// Preconditioned conjugate gradients from a zero initial guess. When the
/// tolerance is not met, returns the iterate with the smallest residual seen
/// and `report.converged == false`.
CgResult cg_solve(const SparseMatrix& A, std::span<const double> b, const CgOptions& options = {});

struct Tridiagonal {
    std::vector<double> lower;  // n − 1 sub-diagonal entries
    std::vector<double> diag;   // n
    std::vector<double> upper;  // n − 1 super-diagonal entries

    /// Throws DimensionMismatch if A has entries off the three diagonals.
    static Tridiagonal from_sparse(const SparseMatrix& A);
};

/// Thomas algorithm. Throws ZeroPivot on a vanishing pivot.
std::vector<double> thomas_solve(const Tridiagonal& tri, std::span<const double> b);

/// Thomas algorithm for an M-matrix given by its off-diagonals (≤ 0) and row
/// sums (≥ 0). The diagonal is never formed, so a constant solution is
/// reproduced exactly when b equals the row sums.
std::vector<double> thomas_solve_row_sums(std::span<const double> lower, std::span<const double> upper,
                                          std::span<const double> row_sums, std::span<const double> b);

/// Gaussian elimination with partial pivoting on a dense row-major n×n matrix.
std::vector<double> dense_solve(std::vector<double> a, std::vector<double> b);

/// ‖Ax − b‖₂ / ‖b‖₂ (or ‖Ax‖₂ when b = 0). If `row_sums` is given, the stored
/// diagonal is ignored and Ax is evaluated as s_i x_i + Σ_{j≠i} A_ij (x_j − x_i).
double relative_residual(const SparseMatrix& A, std::span<const double> x, std::span<const double> b,
                         std::span<const double> row_sums = {});

/// Normwise backward error ‖Ax − b‖∞ / (‖A‖∞‖x‖∞ + ‖b‖∞).
double backward_error(const SparseMatrix& A, std::span<const double> x, std::span<const double> b,
                      std::span<const double> row_sums = {});

/// Backward error below which a direct solve counts as converged even when
/// the relative residual sits above `tol` at the rounding floor.
inline constexpr double kDirectBackwardError = 1e-13;

}  // namespace ddm
