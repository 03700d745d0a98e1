#pragma once

// Standard entanglement witnesses, their identity + traceless-product
// decomposition, and the measured/true expectation maps for detectors with
// lost events (efficiency eta_minus) and additional counts (eta_plus).
//
// The general measured/true relation is derived from the counts model with
// per-outcome losses and additions equal across bins and traceless product
// operators:
//   <W>_m = C0 (1 - 1/D) + <W>_t / D,   D = eta_minus + 1/eta_plus - 1.
// The unit-efficiency branches below evaluate the one-sided closed forms so
// the reductions are exact, not merely within rounding.

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "mdiew/complex_matrix.hpp"
#include "mdiew/errors.hpp"
#include "mdiew/linalg.hpp"
#include "mdiew/states.hpp"
#include "mdiew/tolerances.hpp"

namespace mdiew {

// Hermitian observable with non-negative trace; expectation < 0 on a state
// flags entanglement.
class Witness {
  public:
    Witness(ComplexMatrix m, std::vector<std::size_t> dims)
        : matrix_(std::move(m)), dims_(std::move(dims)) {
        detail::require_dims_match(matrix_, dims_);
        require_hermitian(matrix_);
        if (trace(matrix_).real() < -kTraceTol)
            throw ValidationError("witness trace must be non-negative");
    }

    const ComplexMatrix& matrix() const { return matrix_; }
    const std::vector<std::size_t>& dims() const { return dims_; }
    std::size_t dim() const { return matrix_.dim(); }
    std::size_t n_parties() const { return dims_.size(); }
    double trace_value() const { return trace(matrix_).real(); }

  private:
    ComplexMatrix matrix_;
    std::vector<std::size_t> dims_;
};

// W = |phi+><phi+|^{T_B}; detects Werner states with p > 1/3.
inline Witness werner_witness() {
    const ComplexMatrix proj = max_entangled(2).matrix();
    return Witness(partial_transpose(proj, {2, 2}, 1), {2, 2});
}

// W = I/2 - |GHZ><GHZ|; detects genuine tripartite entanglement of noisy GHZ
// states with q > 3/7.
inline Witness ghz_witness() {
    ComplexMatrix m = ComplexMatrix::identity(8) * 0.5;
    m(0, 0) -= 0.5;
    m(7, 7) -= 0.5;
    m(0, 7) -= 0.5;
    m(7, 0) -= 0.5;
    return Witness(std::move(m), {2, 2, 2});
}

inline double expectation(const Witness& w, const DensityMatrix& rho) {
    if (w.dim() != rho.dim()) throw DimensionError("expectation: dimensions differ");
    const Complex t = trace_product(w.matrix(), rho.matrix());
    if (std::abs(t.imag()) > kHermitianTol)
        throw NumericalError("expectation has a non-real residue");
    return t.real();
}

// W = c0 I + sum_alpha c_alpha S_alpha with S_alpha traceless products of
// local Pauli operators; c0 = tr(W)/D.
struct PauliDecomposition {
    struct Term {
        double coefficient;
        std::vector<int> factors;  // Pauli index 0..3 per qubit, not all zero
    };
    double c0;
    std::size_t n_qubits;
    std::vector<Term> terms;
};

inline PauliDecomposition pauli_decompose(const Witness& w) {
    for (std::size_t d : w.dims())
        if (d != 2) throw DimensionError("pauli_decompose: all subsystems must be qubits");
    const std::size_t n = w.n_parties();
    const std::size_t total = w.dim();

    PauliDecomposition out;
    out.n_qubits = n;
    out.c0 = 0.0;

    std::vector<int> idx(n, 0);
    const std::size_t combos = detail::product(std::vector<std::size_t>(n, 4));
    for (std::size_t code = 0; code < combos; ++code) {
        std::size_t rest = code;
        bool all_zero = true;
        for (std::size_t k = n; k-- > 0;) {
            idx[k] = static_cast<int>(rest % 4);
            rest /= 4;
            all_zero &= idx[k] == 0;
        }
        ComplexMatrix s = pauli(idx[0]);
        for (std::size_t k = 1; k < n; ++k) s = kron(s, pauli(idx[k]));
        const double c = trace_product(w.matrix(), s).real() / static_cast<double>(total);
        if (all_zero)
            out.c0 = c;
        else if (std::abs(c) > 1e-13)
            out.terms.push_back({c, idx});
    }

    // recombination must reproduce the witness
    ComplexMatrix recon = ComplexMatrix::identity(total) * out.c0;
    for (const auto& term : out.terms) {
        ComplexMatrix s = pauli(term.factors[0]);
        for (std::size_t k = 1; k < n; ++k) s = kron(s, pauli(term.factors[k]));
        recon += s * term.coefficient;
    }
    if (max_abs_diff(recon, w.matrix()) > 1e-10)
        throw NumericalError("pauli_decompose: recombination residual above 1e-10");
    return out;
}

// Lost-event efficiency eta_minus and additional-event efficiency eta_plus,
// both in (0, 1].
struct EwEfficiencies {
    double eta_minus;
    double eta_plus;

    EwEfficiencies(double minus, double plus) : eta_minus(minus), eta_plus(plus) {
        if (!(minus > 0.0 && minus <= 1.0) || !(plus > 0.0 && plus <= 1.0))
            throw UnphysicalRegimeError("event efficiencies must lie in (0, 1]");
    }

    double denominator() const { return eta_minus + 1.0 / eta_plus - 1.0; }
};

namespace detail {
inline void require_physical(double denominator) {
    if (!(denominator > 0.0))
        throw UnphysicalRegimeError(
            "eta_minus + 1/eta_plus - 1 is not positive; the count relation has no meaning here");
}
}  // namespace detail

// Measured expectation value produced by ideal-value `true_val` under the
// counts model; c0 is the witness identity coefficient.
inline double ew_measured_from_true(double true_val, double c0, const EwEfficiencies& eff) {
    if (c0 < 0.0) throw DomainError("ew_measured_from_true: c0 must be non-negative");
    if (eff.eta_plus == 1.0) return c0 * (1.0 - 1.0 / eff.eta_minus) + true_val / eff.eta_minus;
    if (eff.eta_minus == 1.0) return c0 * (1.0 - eff.eta_plus) + eff.eta_plus * true_val;
    const double den = eff.denominator();
    detail::require_physical(den);
    return (true_val + c0 * ((1.0 / eff.eta_plus - 1.0) - (1.0 - eff.eta_minus))) / den;
}

// Inverse of ew_measured_from_true.
inline double ew_true_from_measured(double measured, double c0, const EwEfficiencies& eff) {
    if (c0 < 0.0) throw DomainError("ew_true_from_measured: c0 must be non-negative");
    if (eff.eta_plus == 1.0) return (measured - c0 * (1.0 - 1.0 / eff.eta_minus)) * eff.eta_minus;
    if (eff.eta_minus == 1.0) return (measured - c0 * (1.0 - eff.eta_plus)) / eff.eta_plus;
    const double den = eff.denominator();
    detail::require_physical(den);
    return measured * den - c0 * ((1.0 / eff.eta_plus - 1.0) - (1.0 - eff.eta_minus));
}

// Threshold below which a measured value certifies entanglement despite the
// detector inefficiencies.
inline double ew_bound(double c0, const EwEfficiencies& eff) {
    if (c0 < 0.0) throw DomainError("ew_bound: c0 must be non-negative");
    if (eff.eta_plus == 1.0) return c0 * (1.0 - 1.0 / eff.eta_minus);
    if (eff.eta_minus == 1.0) return c0 * (1.0 - eff.eta_plus);
    const double den = eff.denominator();
    detail::require_physical(den);
    return c0 * (1.0 - 1.0 / den);
}

inline bool ew_certifies(double measured, double c0, const EwEfficiencies& eff) {
    return measured < ew_bound(c0, eff) - kCertifyTol;
}

}  // namespace mdiew
