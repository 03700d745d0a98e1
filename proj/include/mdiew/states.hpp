#pragma once

// State constructors and validators: Werner and noisy GHZ families, the
// maximally entangled state, the tetrahedral qubit basis and seeded random
// states for property tests.
//
// Computational basis convention: |0> = (1, 0), qubit ordering left to right
// matches Kronecker factor order.

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "mdiew/complex_matrix.hpp"
#include "mdiew/errors.hpp"
#include "mdiew/linalg.hpp"
#include "mdiew/rng.hpp"
#include "mdiew/tolerances.hpp"

namespace mdiew {

inline ComplexMatrix pauli(int k) {
    switch (k) {
        case 0: return ComplexMatrix::identity(2);
        case 1: return ComplexMatrix::from_rows({{0, 1}, {1, 0}});
        case 2: return ComplexMatrix::from_rows({{0, Complex(0, -1)}, {Complex(0, 1), 0}});
        case 3: return ComplexMatrix::from_rows({{1, 0}, {0, -1}});
        default: throw DomainError("pauli index must be 0..3");
    }
}

// Structured result of the density-matrix invariant checks.
struct DensityReport {
    bool dims_match = true;
    double hermiticity_deviation = 0.0;
    double trace_deviation = 0.0;
    double min_eigenvalue = 0.0;

    bool hermitian() const { return hermiticity_deviation <= kHermitianTol; }
    bool unit_trace() const { return trace_deviation <= kTraceTol; }
    bool positive() const { return min_eigenvalue >= kPsdTol; }
    bool ok() const { return dims_match && hermitian() && unit_trace() && positive(); }

    std::string describe() const {
        if (ok()) return "valid density matrix";
        std::string s = "density matrix invariant violated:";
        if (!dims_match) s += " subsystem dimensions do not match matrix dimension;";
        if (!hermitian())
            s += " non-Hermitian by " + std::to_string(hermiticity_deviation) + ";";
        if (!unit_trace()) s += " trace off by " + std::to_string(trace_deviation) + ";";
        if (!positive())
            s += " negative eigenvalue " + std::to_string(min_eigenvalue) + ";";
        return s;
    }
};

inline DensityReport check_density(const ComplexMatrix& m, const std::vector<std::size_t>& dims) {
    DensityReport r;
    r.dims_match = !dims.empty() && detail::product(dims) == m.dim();
    r.hermiticity_deviation = hermiticity_deviation(m);
    if (!r.hermitian()) return r;  // eigensolver needs a Hermitian input
    r.trace_deviation = std::abs(trace(m) - Complex(1.0));
    r.min_eigenvalue = min_eigenvalue(m);
    return r;
}

// Validated quantum state: Hermitian, unit trace, positive semidefinite,
// with its subsystem dimension list.
class DensityMatrix {
  public:
    DensityMatrix(ComplexMatrix m, std::vector<std::size_t> dims)
        : matrix_(std::move(m)), dims_(std::move(dims)) {
        const DensityReport r = check_density(matrix_, dims_);
        if (!r.ok()) throw ValidationError(r.describe());
    }

    const ComplexMatrix& matrix() const { return matrix_; }
    const std::vector<std::size_t>& dims() const { return dims_; }
    std::size_t dim() const { return matrix_.dim(); }
    std::size_t n_parties() const { return dims_.size(); }

  private:
    ComplexMatrix matrix_;
    std::vector<std::size_t> dims_;
};

inline DensityMatrix validate_density(const ComplexMatrix& m, const std::vector<std::size_t>& dims) {
    return DensityMatrix(m, dims);
}

// Complete set of d^2 states whose vectorizations span the Hermitian matrices
// on C^d over the reals.
class StateBasis {
  public:
    explicit StateBasis(std::vector<DensityMatrix> states) : states_(std::move(states)) {
        if (states_.empty()) throw DimensionError("state basis is empty");
        const std::size_t d = states_[0].dim();
        for (const auto& s : states_)
            if (s.dim() != d) throw DimensionError("state basis mixes dimensions");
        if (states_.size() != d * d)
            throw DimensionError("state basis must contain exactly d^2 states");
        // full-rank check on the vectorizations
        std::vector<RealVector> cols;
        for (const auto& s : states_) cols.push_back(hermitian_to_real_vector(s.matrix()));
        RealVector zero(d * d, 0.0);
        try {
            solve_real_linear(cols, zero);
        } catch (const RankDeficiencyError&) {
            throw ValidationError("state basis vectorizations are linearly dependent");
        }
    }

    std::size_t size() const { return states_.size(); }
    std::size_t local_dim() const { return states_[0].dim(); }
    const DensityMatrix& operator[](std::size_t i) const { return states_[i]; }

  private:
    std::vector<DensityMatrix> states_;
};

// rho_p = p |psi-><psi-| + (1-p)/4 I, entangled iff p > 1/3.
inline DensityMatrix werner(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("werner: p must lie in [0, 1]");
    ComplexMatrix m = ComplexMatrix::identity(4) * ((1.0 - p) / 4.0);
    // |psi-> = (|01> - |10>)/sqrt(2)
    m(1, 1) += p / 2.0;
    m(2, 2) += p / 2.0;
    m(1, 2) -= p / 2.0;
    m(2, 1) -= p / 2.0;
    return DensityMatrix(std::move(m), {2, 2});
}

// rho_q = q |GHZ><GHZ| + (1-q)/8 I on three qubits.
inline DensityMatrix noisy_ghz(double q) {
    if (!(q >= 0.0 && q <= 1.0)) throw DomainError("noisy_ghz: q must lie in [0, 1]");
    ComplexMatrix m = ComplexMatrix::identity(8) * ((1.0 - q) / 8.0);
    m(0, 0) += q / 2.0;
    m(7, 7) += q / 2.0;
    m(0, 7) += q / 2.0;
    m(7, 0) += q / 2.0;
    return DensityMatrix(std::move(m), {2, 2, 2});
}

// |Phi+><Phi+| with |Phi+> = (1/sqrt(d)) sum_i |ii>.
inline DensityMatrix max_entangled(std::size_t d) {
    if (d < 2) throw DomainError("max_entangled: local dimension must be at least 2");
    ComplexMatrix m(d * d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) m(i * d + i, j * d + j) = 1.0 / static_cast<double>(d);
    return DensityMatrix(std::move(m), {d, d});
}

inline ComplexMatrix bell_projector(std::size_t d) { return max_entangled(d).matrix(); }

// Four pure qubit states tau_r = sigma_r (I + n.sigma)/2 sigma_r with
// n = (1,1,1)/sqrt(3); their Bloch vectors form a regular tetrahedron.
inline StateBasis tetrahedral_basis() {
    const double inv = 1.0 / std::sqrt(3.0);
    ComplexMatrix base = (ComplexMatrix::identity(2) + (pauli(1) + pauli(2) + pauli(3)) * inv) * 0.5;
    std::vector<DensityMatrix> states;
    for (int r = 0; r < 4; ++r) {
        const ComplexMatrix s = pauli(r);
        states.emplace_back(s * base * s, std::vector<std::size_t>{2});
    }
    return StateBasis(std::move(states));
}

namespace detail {

// Haar-random pure state as a column vector of normalized complex normals.
inline std::vector<Complex> haar_ket(std::size_t d, Rng& rng) {
    std::vector<Complex> v(d);
    double n2 = 0.0;
    for (auto& a : v) {
        a = Complex(rng.normal(), rng.normal());
        n2 += std::norm(a);
    }
    const double inv = 1.0 / std::sqrt(n2);
    for (auto& a : v) a *= inv;
    return v;
}

inline ComplexMatrix projector(const std::vector<Complex>& ket) {
    ComplexMatrix m(ket.size());
    for (std::size_t i = 0; i < ket.size(); ++i)
        for (std::size_t j = 0; j < ket.size(); ++j) m(i, j) = ket[i] * std::conj(ket[j]);
    return m;
}

}  // namespace detail

// Convex mixture of n_terms random product states (each factor Haar random);
// deterministic for a fixed seed.
inline DensityMatrix random_separable(const std::vector<std::size_t>& dims, std::size_t n_terms,
                                      std::uint64_t seed) {
    if (dims.empty()) throw DimensionError("random_separable: empty dimension list");
    if (n_terms < 1) throw DomainError("random_separable: n_terms must be at least 1");
    Rng rng(seed);
    std::vector<double> weights(n_terms);
    double wsum = 0.0;
    for (auto& w : weights) {
        w = -std::log(1.0 - rng.uniform());
        wsum += w;
    }
    ComplexMatrix m(detail::product(dims));
    for (std::size_t t = 0; t < n_terms; ++t) {
        ComplexMatrix term = detail::projector(detail::haar_ket(dims[0], rng));
        for (std::size_t k = 1; k < dims.size(); ++k)
            term = kron(term, detail::projector(detail::haar_ket(dims[k], rng)));
        m += term * (weights[t] / wsum);
    }
    return DensityMatrix(std::move(m), dims);
}

// Mixture of n_terms Haar-random pure states on the full space; generic
// (generally entangled) test states.
inline DensityMatrix random_density(const std::vector<std::size_t>& dims, std::size_t n_terms,
                                    std::uint64_t seed) {
    if (dims.empty()) throw DimensionError("random_density: empty dimension list");
    if (n_terms < 1) throw DomainError("random_density: n_terms must be at least 1");
    Rng rng(seed);
    const std::size_t d = detail::product(dims);
    std::vector<double> weights(n_terms);
    double wsum = 0.0;
    for (auto& w : weights) {
        w = -std::log(1.0 - rng.uniform());
        wsum += w;
    }
    ComplexMatrix m(d);
    for (std::size_t t = 0; t < n_terms; ++t)
        m += detail::projector(detail::haar_ket(d, rng)) * (weights[t] / wsum);
    return DensityMatrix(std::move(m), dims);
}

}  // namespace mdiew
