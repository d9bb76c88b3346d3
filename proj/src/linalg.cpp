#include "ddm/linalg.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "ddm/summation.hpp"

namespace ddm {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

}  // namespace

void SparseMatrix::Builder::add(std::size_t i, std::size_t j, double v) {
    if (i >= n_ || j >= n_) {
        throw DimensionMismatch(fmt::format("entry ({}, {}) outside a {}x{} matrix", i, j, n_, n_));
    }
    entries_.push_back({i, j, v});
}

SparseMatrix SparseMatrix::Builder::build() && {
    std::sort(entries_.begin(), entries_.end(), [](const Entry& a, const Entry& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    SparseMatrix m;
    m.n_ = n_;
    m.row_start_.assign(n_ + 1, 0);
    for (std::size_t k = 0; k < entries_.size();) {
        const std::size_t row = entries_[k].row;
        const std::size_t col = entries_[k].col;
        double v = 0.0;
        while (k < entries_.size() && entries_[k].row == row && entries_[k].col == col) v += entries_[k++].value;
        m.cols_.push_back(col);
        m.values_.push_back(v);
        ++m.row_start_[row + 1];
    }
    for (std::size_t i = 0; i < n_; ++i) m.row_start_[i + 1] += m.row_start_[i];
    entries_.clear();
    return m;
}

void SparseMatrix::multiply(std::span<const double> x, std::span<double> y) const {
    if (x.size() != n_ || y.size() != n_) throw DimensionMismatch("matrix-vector size mismatch");
    for (std::size_t i = 0; i < n_; ++i) {
        double s = 0.0;
        for (std::size_t k = row_start_[i]; k < row_start_[i + 1]; ++k) s += values_[k] * x[cols_[k]];
        y[i] = s;
    }
}

std::vector<double> SparseMatrix::operator*(std::span<const double> x) const {
    std::vector<double> y(n_);
    multiply(x, y);
    return y;
}

double SparseMatrix::at(std::size_t i, std::size_t j) const {
    const auto cols = row_columns(i);
    const auto it = std::lower_bound(cols.begin(), cols.end(), j);
    if (it == cols.end() || *it != j) return 0.0;
    return values_[row_start_[i] + static_cast<std::size_t>(it - cols.begin())];
}

std::vector<double> SparseMatrix::diagonal() const {
    std::vector<double> d(n_);
    for (std::size_t i = 0; i < n_; ++i) d[i] = at(i, i);
    return d;
}

std::span<const std::size_t> SparseMatrix::row_columns(std::size_t i) const {
    return {cols_.data() + row_start_[i], row_start_[i + 1] - row_start_[i]};
}

std::span<const double> SparseMatrix::row_values(std::size_t i) const {
    return {values_.data() + row_start_[i], row_start_[i + 1] - row_start_[i]};
}

double SparseMatrix::max_abs() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

double SparseMatrix::symmetry_defect() const {
    const double scale = max_abs();
    if (scale == 0.0) return 0.0;
    double worst = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
        const auto cols = row_columns(i);
        const auto vals = row_values(i);
        for (std::size_t k = 0; k < cols.size(); ++k) worst = std::max(worst, std::abs(vals[k] - at(cols[k], i)));
    }
    return worst / scale;
}

bool SparseMatrix::strictly_diagonally_dominant() const {
    for (std::size_t i = 0; i < n_; ++i) {
        const auto cols = row_columns(i);
        const auto vals = row_values(i);
        double diag = 0.0;
        double off = 0.0;
        for (std::size_t k = 0; k < cols.size(); ++k) {
            if (cols[k] == i) {
                diag = vals[k];
            } else {
                off += std::abs(vals[k]);
            }
        }
        if (!(diag > 0.0) || !(diag > off)) return false;
    }
    return true;
}

double SparseMatrix::quadratic_form(std::span<const double> x, std::span<const double> b) const {
    if (b.size() != n_) throw DimensionMismatch("right-hand side size mismatch");
    const auto ax = *this * x;
    CompensatedSum s;
    for (std::size_t i = 0; i < n_; ++i) s += 0.5 * x[i] * ax[i] - b[i] * x[i];
    return s.value();
}

namespace {

// Residual rows accumulated in extended precision. With row sums s, the
// diagonal is taken implicitly: (Ax)_i = s_i x_i + Σ_{j≠i} A_ij (x_j − x_i).
std::vector<double> residual(const SparseMatrix& A, std::span<const double> x, std::span<const double> b,
                             std::span<const double> row_sums) {
    if (x.size() != A.size() || b.size() != A.size()) throw DimensionMismatch("residual: size mismatch");
    const bool split = !row_sums.empty();
    if (split && row_sums.size() != A.size()) throw DimensionMismatch("residual: row sums size mismatch");
    std::vector<double> r(A.size());
    for (std::size_t i = 0; i < A.size(); ++i) {
        const auto cols = A.row_columns(i);
        const auto vals = A.row_values(i);
        long double s = -static_cast<long double>(b[i]);
        if (split) {
            s += static_cast<long double>(row_sums[i]) * x[i];
            for (std::size_t k = 0; k < cols.size(); ++k) {
                if (cols[k] != i) s += static_cast<long double>(vals[k]) * (static_cast<long double>(x[cols[k]]) - x[i]);
            }
        } else {
            for (std::size_t k = 0; k < cols.size(); ++k) s += static_cast<long double>(vals[k]) * x[cols[k]];
        }
        r[i] = static_cast<double>(s);
    }
    return r;
}

}  // namespace

double relative_residual(const SparseMatrix& A, std::span<const double> x, std::span<const double> b,
                         std::span<const double> row_sums) {
    const auto r = residual(A, x, b, row_sums);
    const double bn = norm2(b);
    return bn > 0.0 ? norm2(r) / bn : norm2(r);
}

double backward_error(const SparseMatrix& A, std::span<const double> x, std::span<const double> b,
                      std::span<const double> row_sums) {
    const auto r = residual(A, x, b, row_sums);
    double rn = 0.0, xn = 0.0, bn = 0.0, an = 0.0;
    for (std::size_t i = 0; i < A.size(); ++i) {
        rn = std::max(rn, std::abs(r[i]));
        xn = std::max(xn, std::abs(x[i]));
        bn = std::max(bn, std::abs(b[i]));
        double row = 0.0;
        for (double v : A.row_values(i)) row += std::abs(v);
        an = std::max(an, row);
    }
    const double denom = an * xn + bn;
    return denom > 0.0 ? rn / denom : 0.0;
}

CgResult cg_solve(const SparseMatrix& A, std::span<const double> b, const CgOptions& options) {
    const std::size_t n = A.size();
    if (b.size() != n) {
        throw DimensionMismatch(fmt::format("cg_solve: matrix is {}x{} but rhs has {} entries", n, n, b.size()));
    }
    CgResult out;
    out.x.assign(n, 0.0);
    const double bnorm = norm2(b);
    if (bnorm == 0.0) {
        out.report = {0, 0.0, true};
        return out;
    }

    std::vector<double> inv_diag(n, 1.0);
    if (options.preconditioner == Preconditioner::Jacobi) {
        const auto d = A.diagonal();
        for (std::size_t i = 0; i < n; ++i) {
            if (!(d[i] > 0.0)) throw LinalgError("Jacobi preconditioner needs a positive diagonal");
            inv_diag[i] = 1.0 / d[i];
        }
    }

    std::vector<double> r(b.begin(), b.end());
    std::vector<double> z(n), p(n), ap(n);
    for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
    p = z;
    double rz = dot(r, z);
    double best_res = 1.0;
    std::vector<double> best = out.x;

    int it = 0;
    bool met = false;
    while (it < options.max_iter) {
        A.multiply(p, ap);
        const double pap = dot(p, ap);
        if (!(pap > 0.0)) break;  // not SPD, or exact breakdown
        const double step = rz / pap;
        for (std::size_t i = 0; i < n; ++i) {
            out.x[i] += step * p[i];
            r[i] -= step * ap[i];
        }
        ++it;
        if (options.on_iterate) options.on_iterate(it, out.x);
        const double res = norm2(r) / bnorm;
        if (res < best_res) {
            best_res = res;
            if (res <= options.tol) {
                met = true;
                break;
            }
            best = out.x;
        }
        for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
        const double rz_next = dot(r, z);
        const double beta = rz_next / rz;
        rz = rz_next;
        for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
    if (!met) out.x = std::move(best);
    out.report.iterations = it;
    out.report.relative_residual = relative_residual(A, out.x, b);
    // The recursive residual can drift from the true one; trust the recomputed value.
    out.report.converged = out.report.relative_residual <= options.tol * 10.0 && met;
    return out;
}

Tridiagonal Tridiagonal::from_sparse(const SparseMatrix& A) {
    const std::size_t n = A.size();
    Tridiagonal t;
    t.diag.resize(n);
    t.lower.resize(n > 0 ? n - 1 : 0);
    t.upper.resize(n > 0 ? n - 1 : 0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto cols = A.row_columns(i);
        const auto vals = A.row_values(i);
        for (std::size_t k = 0; k < cols.size(); ++k) {
            const std::size_t j = cols[k];
            if (j == i) {
                t.diag[i] = vals[k];
            } else if (j + 1 == i) {
                t.lower[j] = vals[k];
            } else if (j == i + 1) {
                t.upper[i] = vals[k];
            } else if (vals[k] != 0.0) {
                throw DimensionMismatch(fmt::format("matrix is not tridiagonal: entry ({}, {})", i, j));
            }
        }
    }
    return t;
}

std::vector<double> thomas_solve(const Tridiagonal& tri, std::span<const double> b) {
    const std::size_t n = tri.diag.size();
    if (b.size() != n || (n > 0 && (tri.lower.size() != n - 1 || tri.upper.size() != n - 1))) {
        throw DimensionMismatch("thomas_solve: inconsistent tridiagonal sizes");
    }
    if (n == 0) return {};
    std::vector<double> c(n, 0.0);
    std::vector<double> x(b.begin(), b.end());
    double pivot = tri.diag[0];
    if (pivot == 0.0) throw ZeroPivot("thomas_solve: zero pivot at row 0");
    if (n > 1) c[0] = tri.upper[0] / pivot;
    x[0] /= pivot;
    for (std::size_t i = 1; i < n; ++i) {
        pivot = tri.diag[i] - tri.lower[i - 1] * c[i - 1];
        if (pivot == 0.0 || !std::isfinite(pivot)) throw ZeroPivot(fmt::format("thomas_solve: zero pivot at row {}", i));
        if (i + 1 < n) c[i] = tri.upper[i] / pivot;
        x[i] = (x[i] - tri.lower[i - 1] * x[i - 1]) / pivot;
    }
    for (std::size_t i = n - 1; i-- > 0;) x[i] -= c[i] * x[i + 1];
    return x;
}

std::vector<double> thomas_solve_row_sums(std::span<const double> lower, std::span<const double> upper,
                                          std::span<const double> row_sums, std::span<const double> b) {
    const std::size_t n = row_sums.size();
    if (b.size() != n || (n > 0 && (lower.size() != n - 1 || upper.size() != n - 1))) {
        throw DimensionMismatch("thomas_solve_row_sums: inconsistent sizes");
    }
    if (n == 0) return {};
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (lower[i] > 0.0 || upper[i] > 0.0) throw LinalgError("thomas_solve_row_sums: positive off-diagonal");
    }
    for (double v : row_sums) {
        if (!(v >= 0.0)) throw LinalgError("thomas_solve_row_sums: negative row sum");
    }
    // Row i after elimination: pivot p_i, super-diagonal upper[i], row sum s_i = p_i + upper[i].
    // Every update adds non-negative terms.
    std::vector<double> pivot(n);
    std::vector<double> y(b.begin(), b.end());
    double s = row_sums[0];
    pivot[0] = s - (n > 1 ? upper[0] : 0.0);
    for (std::size_t i = 1; i < n; ++i) {
        if (!(pivot[i - 1] > 0.0)) throw ZeroPivot(fmt::format("thomas_solve_row_sums: zero pivot at row {}", i - 1));
        const double m = lower[i - 1] / pivot[i - 1];
        s = row_sums[i] - m * s;
        pivot[i] = s - (i + 1 < n ? upper[i] : 0.0);
        y[i] -= m * y[i - 1];
    }
    if (!(pivot[n - 1] > 0.0)) throw ZeroPivot(fmt::format("thomas_solve_row_sums: zero pivot at row {}", n - 1));
    std::vector<double> x(n);
    x[n - 1] = y[n - 1] / pivot[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) x[i] = (y[i] - upper[i] * x[i + 1]) / pivot[i];
    return x;
}

std::vector<double> dense_solve(std::vector<double> a, std::vector<double> b) {
    const std::size_t n = b.size();
    if (a.size() != n * n) throw DimensionMismatch("dense_solve: matrix is not n x n");
    double scale = 0.0;
    for (double v : a) scale = std::max(scale, std::abs(v));
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r) {
            if (std::abs(a[r * n + col]) > std::abs(a[piv * n + col])) piv = r;
        }
        if (std::abs(a[piv * n + col]) <= 1e-14 * scale) throw SingularMatrix("dense_solve: matrix is singular");
        if (piv != col) {
            for (std::size_t k = 0; k < n; ++k) std::swap(a[piv * n + k], a[col * n + k]);
            std::swap(b[piv], b[col]);
        }
        for (std::size_t r = col + 1; r < n; ++r) {
            const double m = a[r * n + col] / a[col * n + col];
            if (m == 0.0) continue;
            for (std::size_t k = col; k < n; ++k) a[r * n + k] -= m * a[col * n + k];
            b[r] -= m * b[col];
        }
    }
    std::vector<double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t k = i + 1; k < n; ++k) s -= a[i * n + k] * x[k];
        x[i] = s / a[i * n + i];
    }
    return x;
}

}  // namespace ddm
