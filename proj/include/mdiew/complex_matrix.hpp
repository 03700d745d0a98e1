#pragma once

// Dense square complex matrices, the workhorse for states, witnesses and
// measurement effects. Row-major storage, value semantics, dimensions are
// small (<= 64) so everything is O(d^3) naive.

#include <algorithm>
#include <cassert>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <vector>

#include "mdiew/errors.hpp"

namespace mdiew {

using Complex = std::complex<double>;
using RealVector = std::vector<double>;

class ComplexMatrix {
  public:
    ComplexMatrix() = default;

    explicit ComplexMatrix(std::size_t dim) : dim_(dim), entries_(dim * dim) {
        if (dim == 0) throw DomainError("matrix dimension must be at least 1");
    }

    static ComplexMatrix identity(std::size_t dim) {
        ComplexMatrix m(dim);
        for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
        return m;
    }

    static ComplexMatrix from_rows(std::initializer_list<std::initializer_list<Complex>> rows) {
        ComplexMatrix m(rows.size());
        std::size_t r = 0;
        for (const auto& row : rows) {
            if (row.size() != m.dim_) throw DimensionError("from_rows: matrix must be square");
            std::size_t c = 0;
            for (const Complex& v : row) m(r, c++) = v;
            ++r;
        }
        return m;
    }

    std::size_t dim() const { return dim_; }

    Complex& operator()(std::size_t r, std::size_t c) {
        assert(r < dim_ && c < dim_);
        return entries_[r * dim_ + c];
    }
    const Complex& operator()(std::size_t r, std::size_t c) const {
        assert(r < dim_ && c < dim_);
        return entries_[r * dim_ + c];
    }

    ComplexMatrix& operator+=(const ComplexMatrix& o) {
        require_same_dim(o);
        for (std::size_t k = 0; k < entries_.size(); ++k) entries_[k] += o.entries_[k];
        return *this;
    }
    ComplexMatrix& operator-=(const ComplexMatrix& o) {
        require_same_dim(o);
        for (std::size_t k = 0; k < entries_.size(); ++k) entries_[k] -= o.entries_[k];
        return *this;
    }
    ComplexMatrix& operator*=(Complex s) {
        for (auto& e : entries_) e *= s;
        return *this;
    }

    friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
    friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
    friend ComplexMatrix operator*(ComplexMatrix a, Complex s) { return a *= s; }
    friend ComplexMatrix operator*(Complex s, ComplexMatrix a) { return a *= s; }
    friend ComplexMatrix operator*(ComplexMatrix a, double s) { return a *= Complex(s); }
    friend ComplexMatrix operator*(double s, ComplexMatrix a) { return a *= Complex(s); }
    friend ComplexMatrix operator-(ComplexMatrix a) { return a *= Complex(-1.0); }

    friend ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
        a.require_same_dim(b);
        const std::size_t d = a.dim_;
        ComplexMatrix out(d);
        for (std::size_t i = 0; i < d; ++i) {
            for (std::size_t k = 0; k < d; ++k) {
                const Complex aik = a(i, k);
                if (aik == Complex{}) continue;
                for (std::size_t j = 0; j < d; ++j) out(i, j) += aik * b(k, j);
            }
        }
        return out;
    }

  private:
    void require_same_dim(const ComplexMatrix& o) const {
        if (dim_ != o.dim_) throw DimensionError("matrix dimensions differ");
    }

    std::size_t dim_ = 0;
    std::vector<Complex> entries_;
};

inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    const std::size_t da = a.dim(), db = b.dim();
    ComplexMatrix out(da * db);
    for (std::size_t i = 0; i < da; ++i)
        for (std::size_t j = 0; j < da; ++j) {
            const Complex aij = a(i, j);
            if (aij == Complex{}) continue;
            for (std::size_t k = 0; k < db; ++k)
                for (std::size_t l = 0; l < db; ++l)
                    out(i * db + k, j * db + l) = aij * b(k, l);
        }
    return out;
}

inline ComplexMatrix dagger(const ComplexMatrix& a) {
    ComplexMatrix out(a.dim());
    for (std::size_t i = 0; i < a.dim(); ++i)
        for (std::size_t j = 0; j < a.dim(); ++j) out(j, i) = std::conj(a(i, j));
    return out;
}

inline ComplexMatrix transpose(const ComplexMatrix& a) {
    ComplexMatrix out(a.dim());
    for (std::size_t i = 0; i < a.dim(); ++i)
        for (std::size_t j = 0; j < a.dim(); ++j) out(j, i) = a(i, j);
    return out;
}

inline Complex trace(const ComplexMatrix& a) {
    Complex t{};
    for (std::size_t i = 0; i < a.dim(); ++i) t += a(i, i);
    return t;
}

// tr(a * b) without forming the product.
inline Complex trace_product(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.dim() != b.dim()) throw DimensionError("trace_product: dimensions differ");
    Complex t{};
    for (std::size_t i = 0; i < a.dim(); ++i)
        for (std::size_t j = 0; j < a.dim(); ++j) t += a(i, j) * b(j, i);
    return t;
}

inline double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.dim() != b.dim()) throw DimensionError("max_abs_diff: dimensions differ");
    double m = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i)
        for (std::size_t j = 0; j < a.dim(); ++j) m = std::max(m, std::abs(a(i, j) - b(i, j)));
    return m;
}

inline bool approx_equal(const ComplexMatrix& a, const ComplexMatrix& b, double tol) {
    return max_abs_diff(a, b) <= tol;
}

}  // namespace mdiew
