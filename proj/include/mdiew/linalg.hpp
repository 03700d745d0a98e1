#pragma once

// Subsystem index bookkeeping (partial transpose/trace, operator embedding),
// a cyclic-Jacobi eigensolver for complex Hermitian matrices, the real
// vectorization of Hermitian matrices and the least-squares solver used for
// basis expansions.
//
// Conventions fixed here and relied on everywhere else:
//  - subsystem indices follow Kronecker factor order, left to right;
//  - hermitian_to_real_vector lists diagonal entries, then real parts of the
//    upper triangle (row-major), then the matching imaginary parts taken from
//    the lower triangle, so sigma_y maps to (0, 0, 0, +1).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

#include "mdiew/complex_matrix.hpp"
#include "mdiew/errors.hpp"
#include "mdiew/tolerances.hpp"

namespace mdiew {

namespace detail {

inline std::size_t product(const std::vector<std::size_t>& dims) {
    std::size_t p = 1;
    for (std::size_t d : dims) p *= d;
    return p;
}

inline void decompose_index(std::size_t index, const std::vector<std::size_t>& dims,
                            std::vector<std::size_t>& digits) {
    digits.resize(dims.size());
    for (std::size_t k = dims.size(); k-- > 0;) {
        digits[k] = index % dims[k];
        index /= dims[k];
    }
}

inline std::size_t compose_index(const std::vector<std::size_t>& digits,
                                 const std::vector<std::size_t>& dims) {
    std::size_t index = 0;
    for (std::size_t k = 0; k < dims.size(); ++k) index = index * dims[k] + digits[k];
    return index;
}

inline void require_dims_match(const ComplexMatrix& a, const std::vector<std::size_t>& dims) {
    if (dims.empty()) throw DimensionError("subsystem dimension list is empty");
    for (std::size_t d : dims)
        if (d == 0) throw DimensionError("subsystem dimension must be positive");
    if (product(dims) != a.dim())
        throw DimensionError("product of subsystem dimensions does not match matrix dimension");
}

}  // namespace detail

inline double hermiticity_deviation(const ComplexMatrix& a) {
    double dev = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i)
        for (std::size_t j = i; j < a.dim(); ++j)
            dev = std::max(dev, std::abs(a(i, j) - std::conj(a(j, i))));
    return dev;
}

inline bool is_hermitian(const ComplexMatrix& a, double tol = kHermitianTol) {
    return hermiticity_deviation(a) <= tol;
}

inline void require_hermitian(const ComplexMatrix& a, double tol = kHermitianTol) {
    const double dev = hermiticity_deviation(a);
    if (dev > tol)
        throw DomainError("matrix is not Hermitian (deviation " + std::to_string(dev) + ")");
}

// Transposes the indices of one subsystem, leaving the others untouched.
inline ComplexMatrix partial_transpose(const ComplexMatrix& rho,
                                       const std::vector<std::size_t>& dims,
                                       std::size_t subsystem) {
    detail::require_dims_match(rho, dims);
    if (subsystem >= dims.size()) throw DimensionError("partial_transpose: subsystem out of range");
    ComplexMatrix out(rho.dim());
    std::vector<std::size_t> ri, ci;
    for (std::size_t r = 0; r < rho.dim(); ++r) {
        detail::decompose_index(r, dims, ri);
        for (std::size_t c = 0; c < rho.dim(); ++c) {
            detail::decompose_index(c, dims, ci);
            std::swap(ri[subsystem], ci[subsystem]);
            out(detail::compose_index(ri, dims), detail::compose_index(ci, dims)) = rho(r, c);
            std::swap(ri[subsystem], ci[subsystem]);
        }
    }
    return out;
}

// Traces out every subsystem not listed in `keep`; kept factors stay in their
// original relative order.
inline ComplexMatrix partial_trace(const ComplexMatrix& rho,
                                   const std::vector<std::size_t>& dims,
                                   const std::vector<std::size_t>& keep) {
    detail::require_dims_match(rho, dims);
    if (keep.empty()) throw DimensionError("partial_trace: keep set is empty");
    std::vector<std::size_t> kept = keep;
    std::sort(kept.begin(), kept.end());
    kept.erase(std::unique(kept.begin(), kept.end()), kept.end());
    if (kept.back() >= dims.size()) throw DimensionError("partial_trace: subsystem out of range");

    std::vector<std::size_t> traced;
    for (std::size_t k = 0; k < dims.size(); ++k)
        if (!std::binary_search(kept.begin(), kept.end(), k)) traced.push_back(k);

    std::vector<std::size_t> kept_dims, traced_dims;
    for (std::size_t k : kept) kept_dims.push_back(dims[k]);
    for (std::size_t k : traced) traced_dims.push_back(dims[k]);

    const std::size_t dk = detail::product(kept_dims);
    const std::size_t dt = detail::product(traced_dims);
    ComplexMatrix out(dk);

    std::vector<std::size_t> kr, kc, td, full_r(dims.size()), full_c(dims.size());
    for (std::size_t r = 0; r < dk; ++r) {
        detail::decompose_index(r, kept_dims, kr);
        for (std::size_t c = 0; c < dk; ++c) {
            detail::decompose_index(c, kept_dims, kc);
            Complex sum{};
            for (std::size_t t = 0; t < dt; ++t) {
                detail::decompose_index(t, traced_dims, td);
                for (std::size_t k = 0; k < kept.size(); ++k) {
                    full_r[kept[k]] = kr[k];
                    full_c[kept[k]] = kc[k];
                }
                for (std::size_t k = 0; k < traced.size(); ++k) {
                    full_r[traced[k]] = td[k];
                    full_c[traced[k]] = td[k];
                }
                sum += rho(detail::compose_index(full_r, dims), detail::compose_index(full_c, dims));
            }
            out(r, c) = sum;
        }
    }
    return out;
}

// Places `op` on the listed tensor factors of a space with factor dimensions
// `dims`, acting as identity on the rest. `targets` gives, in op's own factor
// order, which global factor each op factor lands on.
inline ComplexMatrix embed(const ComplexMatrix& op, const std::vector<std::size_t>& dims,
                           const std::vector<std::size_t>& targets) {
    if (dims.empty()) throw DimensionError("embed: empty dimension list");
    std::vector<bool> used(dims.size(), false);
    std::vector<std::size_t> op_dims;
    for (std::size_t t : targets) {
        if (t >= dims.size()) throw DimensionError("embed: target factor out of range");
        if (used[t]) throw DimensionError("embed: repeated target factor");
        used[t] = true;
        op_dims.push_back(dims[t]);
    }
    if (detail::product(op_dims) != op.dim())
        throw DimensionError("embed: operator dimension does not match target factors");

    std::vector<std::size_t> spectators, spec_dims;
    for (std::size_t k = 0; k < dims.size(); ++k)
        if (!used[k]) {
            spectators.push_back(k);
            spec_dims.push_back(dims[k]);
        }
    const std::size_t ds = detail::product(spec_dims);

    ComplexMatrix out(detail::product(dims));
    std::vector<std::size_t> oi, oj, sd, full_r(dims.size()), full_c(dims.size());
    for (std::size_t i = 0; i < op.dim(); ++i) {
        detail::decompose_index(i, op_dims, oi);
        for (std::size_t j = 0; j < op.dim(); ++j) {
            const Complex v = op(i, j);
            if (v == Complex{}) continue;
            detail::decompose_index(j, op_dims, oj);
            for (std::size_t s = 0; s < ds; ++s) {
                detail::decompose_index(s, spec_dims, sd);
                for (std::size_t k = 0; k < targets.size(); ++k) {
                    full_r[targets[k]] = oi[k];
                    full_c[targets[k]] = oj[k];
                }
                for (std::size_t k = 0; k < spectators.size(); ++k) {
                    full_r[spectators[k]] = sd[k];
                    full_c[spectators[k]] = sd[k];
                }
                out(detail::compose_index(full_r, dims), detail::compose_index(full_c, dims)) = v;
            }
        }
    }
    return out;
}

struct EigenDecomposition {
    RealVector eigenvalues;      // ascending
    ComplexMatrix eigenvectors;  // columns, orthonormal
};

// Cyclic Jacobi for complex Hermitian matrices. Converges when the
// off-diagonal Frobenius norm drops below kJacobiOffTol, capped at
// kJacobiMaxSweeps sweeps; fine for the dimensions (<= 64) used here.
inline EigenDecomposition hermitian_eigen(const ComplexMatrix& a) {
    require_hermitian(a);
    const std::size_t d = a.dim();
    ComplexMatrix m(d);
    for (std::size_t i = 0; i < d; ++i) {
        m(i, i) = a(i, i).real();
        for (std::size_t j = i + 1; j < d; ++j) {
            const Complex avg = (a(i, j) + std::conj(a(j, i))) / 2.0;
            m(i, j) = avg;
            m(j, i) = std::conj(avg);
        }
    }
    ComplexMatrix v = ComplexMatrix::identity(d);

    for (int sweep = 0; sweep < kJacobiMaxSweeps; ++sweep) {
        double off2 = 0.0;
        for (std::size_t p = 0; p < d; ++p)
            for (std::size_t q = p + 1; q < d; ++q) off2 += 2.0 * std::norm(m(p, q));
        if (std::sqrt(off2) < kJacobiOffTol) break;

        for (std::size_t p = 0; p + 1 < d; ++p) {
            for (std::size_t q = p + 1; q < d; ++q) {
                const double ab = std::abs(m(p, q));
                if (ab == 0.0) continue;
                const Complex w = m(p, q) / ab;
                const double tau = (m(q, q).real() - m(p, p).real()) / (2.0 * ab);
                const double t = tau >= 0.0 ? 1.0 / (tau + std::sqrt(1.0 + tau * tau))
                                            : 1.0 / (tau - std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const Complex sigma = (t * c) * w;

                // m <- J^dagger m J, v <- v J with the rotation in the (p,q) plane
                for (std::size_t k = 0; k < d; ++k) {
                    const Complex mp = m(k, p), mq = m(k, q);
                    m(k, p) = mp * c - mq * std::conj(sigma);
                    m(k, q) = mp * sigma + mq * c;
                    const Complex vp = v(k, p), vq = v(k, q);
                    v(k, p) = vp * c - vq * std::conj(sigma);
                    v(k, q) = vp * sigma + vq * c;
                }
                for (std::size_t k = 0; k < d; ++k) {
                    const Complex rp = m(p, k), rq = m(q, k);
                    m(p, k) = c * rp - sigma * rq;
                    m(q, k) = std::conj(sigma) * rp + c * rq;
                }
                m(p, q) = 0.0;
                m(q, p) = 0.0;
                m(p, p) = m(p, p).real();
                m(q, q) = m(q, q).real();
            }
        }
    }

    std::vector<std::size_t> order(d);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t x, std::size_t y) { return m(x, x).real() < m(y, y).real(); });

    EigenDecomposition out;
    out.eigenvalues.resize(d);
    out.eigenvectors = ComplexMatrix(d);
    for (std::size_t k = 0; k < d; ++k) {
        out.eigenvalues[k] = m(order[k], order[k]).real();
        for (std::size_t i = 0; i < d; ++i) out.eigenvectors(i, k) = v(i, order[k]);
    }
    return out;
}

inline double min_eigenvalue(const ComplexMatrix& a) { return hermitian_eigen(a).eigenvalues.front(); }

// Real coordinates of a Hermitian matrix: diagonal, Re(upper triangle),
// Im(lower triangle), each block row-major over i < j.
inline RealVector hermitian_to_real_vector(const ComplexMatrix& a) {
    require_hermitian(a);
    const std::size_t d = a.dim();
    RealVector v;
    v.reserve(d * d);
    for (std::size_t i = 0; i < d; ++i) v.push_back(a(i, i).real());
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = i + 1; j < d; ++j) v.push_back(a(i, j).real());
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = i + 1; j < d; ++j) v.push_back(a(j, i).imag());
    return v;
}

enum class SolveMethod { automatic, normal_equations, pivoted_elimination };

struct LinearSolution {
    RealVector coefficients;
    double residual;  // Euclidean norm of (A x - b)
};

namespace detail {

// Gaussian elimination with full pivoting on the normal equations; reports
// rank deficiency when no pivot above kPivotTol remains.
inline RealVector solve_pivoted(std::vector<RealVector> g, RealVector c) {
    const std::size_t n = c.size();
    std::vector<std::size_t> col_of(n);
    std::iota(col_of.begin(), col_of.end(), std::size_t{0});

    for (std::size_t step = 0; step < n; ++step) {
        std::size_t pr = step, pc = step;
        double best = 0.0;
        for (std::size_t i = step; i < n; ++i)
            for (std::size_t j = step; j < n; ++j)
                if (std::abs(g[i][j]) > best) {
                    best = std::abs(g[i][j]);
                    pr = i;
                    pc = j;
                }
        if (best < kPivotTol)
            throw RankDeficiencyError("basis expansion is degenerate (rank-deficient columns)");
        std::swap(g[step], g[pr]);
        std::swap(c[step], c[pr]);
        if (pc != step) {
            for (std::size_t i = 0; i < n; ++i) std::swap(g[i][step], g[i][pc]);
            std::swap(col_of[step], col_of[pc]);
        }
        for (std::size_t i = step + 1; i < n; ++i) {
            const double f = g[i][step] / g[step][step];
            if (f == 0.0) continue;
            for (std::size_t j = step; j < n; ++j) g[i][j] -= f * g[step][j];
            c[i] -= f * c[step];
        }
    }
    RealVector y(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = c[i];
        for (std::size_t j = i + 1; j < n; ++j) s -= g[i][j] * y[j];
        y[i] = s / g[i][i];
    }
    RealVector x(n);
    for (std::size_t k = 0; k < n; ++k) x[col_of[k]] = y[k];
    return x;
}

// Cholesky on the Gram matrix; returns false when a pivot signals poor
// conditioning so the caller can fall back to pivoted elimination.
inline bool solve_cholesky(std::vector<RealVector> g, RealVector c, RealVector& x) {
    const std::size_t n = c.size();
    double max_diag = 0.0;
    for (std::size_t i = 0; i < n; ++i) max_diag = std::max(max_diag, g[i][i]);
    const double pivot_floor = std::max(kPivotTol * max_diag, kPivotTol * kPivotTol);

    for (std::size_t k = 0; k < n; ++k) {
        double d = g[k][k];
        for (std::size_t j = 0; j < k; ++j) d -= g[k][j] * g[k][j];
        if (!(d > pivot_floor)) return false;
        g[k][k] = std::sqrt(d);
        for (std::size_t i = k + 1; i < n; ++i) {
            double s = g[i][k];
            for (std::size_t j = 0; j < k; ++j) s -= g[i][j] * g[k][j];
            g[i][k] = s / g[k][k];
        }
    }
    RealVector y(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = c[i];
        for (std::size_t j = 0; j < i; ++j) s -= g[i][j] * y[j];
        y[i] = s / g[i][i];
    }
    x.assign(n, 0.0);
    for (std::size_t i = n; i-- > 0;) {
        double s = y[i];
        for (std::size_t j = i + 1; j < n; ++j) s -= g[j][i] * x[j];
        x[i] = s / g[i][i];
    }
    return true;
}

}  // namespace detail

// Least-squares solve of (columns) x = target over the reals via the normal
// equations, falling back to fully pivoted elimination when conditioning is
// poor. Throws RankDeficiencyError for degenerate column sets and
// ResidualError when the target is outside the span (residual > kResidualTol).
inline LinearSolution solve_real_linear(const std::vector<RealVector>& columns,
                                        const RealVector& target,
                                        SolveMethod method = SolveMethod::automatic) {
    if (columns.empty()) throw DimensionError("solve_real_linear: no columns");
    const std::size_t rows = target.size();
    const std::size_t n = columns.size();
    if (rows == 0) throw DimensionError("solve_real_linear: empty target");
    for (const auto& col : columns)
        if (col.size() != rows) throw DimensionError("solve_real_linear: column length mismatch");
    if (n > rows) throw DimensionError("solve_real_linear: more columns than rows");

    std::vector<RealVector> gram(n, RealVector(n, 0.0));
    RealVector rhs(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            double s = 0.0;
            for (std::size_t r = 0; r < rows; ++r) s += columns[i][r] * columns[j][r];
            gram[i][j] = gram[j][i] = s;
        }
        double s = 0.0;
        for (std::size_t r = 0; r < rows; ++r) s += columns[i][r] * target[r];
        rhs[i] = s;
    }

    RealVector x;
    switch (method) {
        case SolveMethod::normal_equations:
            if (!detail::solve_cholesky(gram, rhs, x))
                throw RankDeficiencyError("basis expansion is degenerate (Gram matrix not SPD)");
            break;
        case SolveMethod::pivoted_elimination:
            x = detail::solve_pivoted(gram, rhs);
            break;
        case SolveMethod::automatic:
            if (!detail::solve_cholesky(gram, rhs, x)) x = detail::solve_pivoted(gram, rhs);
            break;
    }

    double res2 = 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
        double e = -target[r];
        for (std::size_t j = 0; j < n; ++j) e += columns[j][r] * x[j];
        res2 += e * e;
    }
    const double residual = std::sqrt(res2);
    if (residual > kResidualTol) throw ResidualError(residual);
    return LinearSolution{std::move(x), residual};
}

}  // namespace mdiew
