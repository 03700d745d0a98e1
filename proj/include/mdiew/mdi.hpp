#pragma once

// Measurement-device-independent witnessing: expansion of a witness over
// products of local state bases, the Bell-projector protocol probabilities
// and the MDI witness function evaluated from them.
//
// Register ordering: the global space for n parties is laid out as
//   (input_0, share_0, share_1, ..., share_{n-1}, input_1, ..., input_{n-1}),
// so the two-party case is the contiguous (input_A, share_A, share_B,
// input_B) and larger party counts use explicit factor embedding. Every
// party measures the dichotomic POVM {B, I - B} on its (input, share) pair,
// where B projects onto the maximally entangled state.

#include <cmath>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "mdiew/complex_matrix.hpp"
#include "mdiew/errors.hpp"
#include "mdiew/linalg.hpp"
#include "mdiew/states.hpp"
#include "mdiew/tolerances.hpp"
#include "mdiew/witness.hpp"

namespace mdiew {

// Expansion coefficients of a witness over transposed product states, one
// basis index per party; beta is flat row-major over the per-party indices.
struct WitnessDecomposition {
    std::vector<double> beta;
    std::vector<StateBasis> bases;
    double residual = 0.0;  // max-entry deviation of the reconstruction

    std::size_t n_parties() const { return bases.size(); }

    std::vector<std::size_t> shape() const {
        std::vector<std::size_t> s;
        for (const auto& b : bases) s.push_back(b.size());
        return s;
    }

    double beta_sum() const {
        double s = 0.0;
        for (double b : beta) s += b;
        return s;
    }

    double beta_abs_sum() const {
        double s = 0.0;
        for (double b : beta) s += std::abs(b);
        return s;
    }
};

namespace detail {

inline ComplexMatrix transposed_product_state(const std::vector<StateBasis>& bases,
                                              const std::vector<std::size_t>& setting) {
    ComplexMatrix m = transpose(bases[0][setting[0]].matrix());
    for (std::size_t k = 1; k < bases.size(); ++k)
        m = kron(m, transpose(bases[k][setting[k]].matrix()));
    return m;
}

}  // namespace detail

// Solves W = sum beta (x)_k basis_k[r_k]^T over the reals. For exactly
// complete bases (d^2 states per party) the expansion is unique.
inline WitnessDecomposition decompose_witness(const Witness& w,
                                              const std::vector<StateBasis>& bases,
                                              SolveMethod method = SolveMethod::automatic) {
    if (bases.size() != w.n_parties())
        throw DimensionError("decompose_witness: need one basis per subsystem");
    for (std::size_t k = 0; k < bases.size(); ++k)
        if (bases[k].local_dim() != w.dims()[k])
            throw DimensionError("decompose_witness: basis dimension does not match subsystem");

    std::vector<std::size_t> shape;
    for (const auto& b : bases) shape.push_back(b.size());
    const std::size_t n_settings = detail::product(shape);

    std::vector<RealVector> columns;
    columns.reserve(n_settings);
    std::vector<std::size_t> setting;
    for (std::size_t s = 0; s < n_settings; ++s) {
        detail::decompose_index(s, shape, setting);
        columns.push_back(hermitian_to_real_vector(detail::transposed_product_state(bases, setting)));
    }

    const LinearSolution sol = solve_real_linear(columns, hermitian_to_real_vector(w.matrix()), method);

    WitnessDecomposition dec;
    dec.beta = sol.coefficients;
    dec.bases = bases;

    ComplexMatrix recon(w.dim());
    for (std::size_t s = 0; s < n_settings; ++s) {
        detail::decompose_index(s, shape, setting);
        recon += detail::transposed_product_state(bases, setting) * dec.beta[s];
    }
    dec.residual = max_abs_diff(recon, w.matrix());
    if (dec.residual > kResidualTol)
        throw NumericalError("decompose_witness: reconstruction residual above tolerance");
    if (std::abs(dec.beta_sum() - w.trace_value()) > kResidualTol)
        throw NumericalError("decompose_witness: coefficient sum does not match tr(W)");
    return dec;
}

inline Witness reconstruct_witness(const WitnessDecomposition& dec) {
    if (dec.bases.empty()) throw DimensionError("reconstruct_witness: no bases");
    const std::vector<std::size_t> shape = dec.shape();
    std::size_t total = 1;
    for (const auto& b : dec.bases) total *= b.local_dim();
    if (dec.beta.size() != detail::product(shape))
        throw DimensionError("reconstruct_witness: coefficient count does not match bases");

    ComplexMatrix m(total);
    std::vector<std::size_t> setting;
    for (std::size_t s = 0; s < dec.beta.size(); ++s) {
        if (dec.beta[s] == 0.0) continue;
        detail::decompose_index(s, shape, setting);
        m += detail::transposed_product_state(dec.bases, setting) * dec.beta[s];
    }
    std::vector<std::size_t> dims;
    for (const auto& b : dec.bases) dims.push_back(b.local_dim());
    return Witness(std::move(m), std::move(dims));
}

namespace detail {

// Factor layout of the protocol's global space, see the header comment.
inline std::vector<std::size_t> protocol_global_dims(const std::vector<std::size_t>& dims) {
    std::vector<std::size_t> g;
    g.push_back(dims[0]);
    for (std::size_t d : dims) g.push_back(d);
    for (std::size_t k = 1; k < dims.size(); ++k) g.push_back(dims[k]);
    return g;
}

// Party-major (input_k, share_k) factor indices into the global layout.
inline std::vector<std::size_t> protocol_targets(std::size_t n) {
    std::vector<std::size_t> t;
    for (std::size_t k = 0; k < n; ++k) {
        t.push_back(k == 0 ? 0 : n + k);
        t.push_back(1 + k);
    }
    return t;
}

inline ComplexMatrix protocol_global_state(const DensityMatrix& rho,
                                           const std::vector<const ComplexMatrix*>& inputs) {
    ComplexMatrix tail = rho.matrix();
    for (std::size_t k = 1; k < inputs.size(); ++k) tail = kron(tail, *inputs[k]);
    return kron(*inputs[0], tail);
}

// Embedded joint effect for one outcome pattern; bit (n-1-k) of `outcome`
// holds party k's result, 1 meaning the maximally-entangled click.
inline ComplexMatrix embedded_outcome_effect(const std::vector<std::size_t>& dims,
                                             const std::vector<ComplexMatrix>& click_effects,
                                             std::size_t outcome) {
    const std::size_t n = dims.size();
    ComplexMatrix op(1);
    op(0, 0) = 1.0;
    for (std::size_t k = 0; k < n; ++k) {
        const bool click = (outcome >> (n - 1 - k)) & 1u;
        if (click) {
            op = kron(op, click_effects[k]);
        } else {
            op = kron(op, ComplexMatrix::identity(dims[k] * dims[k]) - click_effects[k]);
        }
    }
    return embed(op, protocol_global_dims(dims), protocol_targets(n));
}

inline double real_trace_product(const ComplexMatrix& a, const ComplexMatrix& b) {
    const Complex t = trace_product(a, b);
    if (std::abs(t.imag()) > 1e-9) throw NumericalError("probability has a non-real residue");
    return t.real();
}

inline void require_protocol_inputs(const DensityMatrix& rho,
                                    const std::vector<DensityMatrix>& inputs) {
    if (inputs.size() != rho.n_parties())
        throw DimensionError("need one input state per party");
    if (inputs.size() < 2) throw DimensionError("the protocol needs at least two parties");
    for (std::size_t k = 0; k < inputs.size(); ++k)
        if (inputs[k].dim() != rho.dims()[k])
            throw DimensionError("input state dimension does not match the party's share");
}

}  // namespace detail

// P(1, 1, ..., 1 | inputs): every party's maximally-entangled projector
// clicks on its (input, share) pair of the global state.
inline double joint_prob_full(const DensityMatrix& rho, const std::vector<DensityMatrix>& inputs) {
    detail::require_protocol_inputs(rho, inputs);
    const std::size_t n = inputs.size();
    std::vector<ComplexMatrix> clicks;
    for (std::size_t k = 0; k < n; ++k) clicks.push_back(bell_projector(rho.dims()[k]));
    const ComplexMatrix effect =
        detail::embedded_outcome_effect(rho.dims(), clicks, (std::size_t{1} << n) - 1);
    std::vector<const ComplexMatrix*> ins;
    for (const auto& i : inputs) ins.push_back(&i.matrix());
    const double p = detail::real_trace_product(effect, detail::protocol_global_state(rho, ins));
    if (p < -1e-9 || p > 1.0 + 1e-9) throw NumericalError("probability outside [0, 1]");
    return p;
}

// Same quantity through the algebraic shortcut tr((x)_k input_k^T rho) / prod d_k.
inline double joint_prob_reduced(const DensityMatrix& rho, const std::vector<DensityMatrix>& inputs) {
    detail::require_protocol_inputs(rho, inputs);
    ComplexMatrix m = transpose(inputs[0].matrix());
    for (std::size_t k = 1; k < inputs.size(); ++k) m = kron(m, transpose(inputs[k].matrix()));
    const double denom = static_cast<double>(rho.dim());
    return detail::real_trace_product(m, rho.matrix()) / denom;
}

// Full outcome distribution for every party's dichotomic measurement, all
// 2^n outcomes per input tuple; outcome bit (n-1-k) belongs to party k.
inline std::vector<double> protocol_outcome_probabilities(const DensityMatrix& rho,
                                                          const std::vector<DensityMatrix>& inputs) {
    detail::require_protocol_inputs(rho, inputs);
    const std::size_t n = inputs.size();
    std::vector<ComplexMatrix> clicks;
    for (std::size_t k = 0; k < n; ++k) clicks.push_back(bell_projector(rho.dims()[k]));
    std::vector<const ComplexMatrix*> ins;
    for (const auto& i : inputs) ins.push_back(&i.matrix());
    const ComplexMatrix global = detail::protocol_global_state(rho, ins);

    std::vector<double> out;
    const std::size_t n_outcomes = std::size_t{1} << n;
    for (std::size_t o = 0; o < n_outcomes; ++o) {
        const ComplexMatrix effect = detail::embedded_outcome_effect(rho.dims(), clicks, o);
        out.push_back(detail::real_trace_product(effect, global));
    }
    return out;
}

// Joint click probabilities, one row of 2^n outcomes per setting tuple.
class ProbabilityTable {
  public:
    ProbabilityTable(std::size_t n_parties, std::vector<std::size_t> settings_shape,
                     std::vector<double> values,
                     std::optional<long long> counts_per_setting = std::nullopt)
        : n_parties_(n_parties),
          settings_shape_(std::move(settings_shape)),
          values_(std::move(values)),
          counts_per_setting_(counts_per_setting) {
        if (n_parties_ < 2) throw DimensionError("probability table needs at least two parties");
        if (settings_shape_.size() != n_parties_)
            throw DimensionError("probability table shape does not match party count");
        if (values_.size() != detail::product(settings_shape_) * n_outcomes())
            throw DimensionError("probability table has the wrong number of entries");
        for (double v : values_)
            if (v < -1e-9 || v > 1.0 + 1e-9)
                throw ValidationError("probability table entry outside [0, 1]");
        for (std::size_t s = 0; s < n_settings(); ++s) {
            double sum = 0.0;
            for (std::size_t o = 0; o < n_outcomes(); ++o) sum += value(s, o);
            if (std::abs(sum - 1.0) > 1e-9)
                throw ValidationError("probability table row does not sum to 1");
        }
    }

    std::size_t n_parties() const { return n_parties_; }
    const std::vector<std::size_t>& settings_shape() const { return settings_shape_; }
    std::size_t n_settings() const { return detail::product(settings_shape_); }
    std::size_t n_outcomes() const { return std::size_t{1} << n_parties_; }

    double value(std::size_t setting, std::size_t outcome) const {
        return values_[setting * n_outcomes() + outcome];
    }
    // P(1, 1, ..., 1 | setting), the entry the MDI function consumes.
    double all_ones(std::size_t setting) const { return value(setting, n_outcomes() - 1); }

    std::optional<long long> counts_per_setting() const { return counts_per_setting_; }

  private:
    std::size_t n_parties_;
    std::vector<std::size_t> settings_shape_;
    std::vector<double> values_;
    std::optional<long long> counts_per_setting_;
};

// True outcome distributions of the Bell-projector protocol for every basis
// setting of the decomposition.
inline ProbabilityTable protocol_probabilities(const DensityMatrix& rho,
                                               const std::vector<StateBasis>& bases) {
    if (bases.size() != rho.n_parties())
        throw DimensionError("protocol_probabilities: need one basis per party");
    const std::size_t n = bases.size();
    std::vector<std::size_t> shape;
    for (const auto& b : bases) shape.push_back(b.size());

    std::vector<ComplexMatrix> clicks;
    for (std::size_t k = 0; k < n; ++k) {
        if (bases[k].local_dim() != rho.dims()[k])
            throw DimensionError("protocol_probabilities: basis does not match the party's share");
        clicks.push_back(bell_projector(rho.dims()[k]));
    }

    const std::size_t n_outcomes = std::size_t{1} << n;
    std::vector<ComplexMatrix> effects;
    for (std::size_t o = 0; o < n_outcomes; ++o)
        effects.push_back(detail::embedded_outcome_effect(rho.dims(), clicks, o));

    const std::size_t n_settings = detail::product(shape);
    std::vector<double> values(n_settings * n_outcomes);
    std::vector<std::size_t> setting;
    for (std::size_t s = 0; s < n_settings; ++s) {
        detail::decompose_index(s, shape, setting);
        std::vector<const ComplexMatrix*> ins;
        for (std::size_t k = 0; k < n; ++k) ins.push_back(&bases[k][setting[k]].matrix());
        const ComplexMatrix global = detail::protocol_global_state(rho, ins);
        for (std::size_t o = 0; o < n_outcomes; ++o)
            values[s * n_outcomes + o] = detail::real_trace_product(effects[o], global);
    }
    return ProbabilityTable(n, shape, std::move(values));
}

namespace detail {

inline void require_decomposition_matches(const DensityMatrix& rho,
                                          const WitnessDecomposition& dec) {
    if (dec.n_parties() != rho.n_parties())
        throw DimensionError("decomposition party count does not match the state");
    for (std::size_t k = 0; k < dec.bases.size(); ++k)
        if (dec.bases[k].local_dim() != rho.dims()[k])
            throw DimensionError("decomposition basis does not match the party's share");
}

// sum_settings beta * P(1,...,1) with the supplied per-party click effects.
inline double mdi_value_with_effects(const DensityMatrix& rho, const WitnessDecomposition& dec,
                                     const std::vector<ComplexMatrix>& clicks) {
    const std::vector<std::size_t> shape = dec.shape();
    const std::size_t n = dec.n_parties();
    const ComplexMatrix effect =
        embedded_outcome_effect(rho.dims(), clicks, (std::size_t{1} << n) - 1);
    double value = 0.0;
    std::vector<std::size_t> setting;
    for (std::size_t s = 0; s < dec.beta.size(); ++s) {
        if (dec.beta[s] == 0.0) continue;
        detail::decompose_index(s, shape, setting);
        std::vector<const ComplexMatrix*> ins;
        for (std::size_t k = 0; k < n; ++k) ins.push_back(&dec.bases[k][setting[k]].matrix());
        value += dec.beta[s] * real_trace_product(effect, protocol_global_state(rho, ins));
    }
    return value;
}

}  // namespace detail

// The MDI witness function I(rho) = sum beta P(1,...,1 | settings); equals
// tr(W rho) / prod d_k for the decomposed witness W.
inline double mdi_value(const DensityMatrix& rho, const WitnessDecomposition& dec) {
    detail::require_decomposition_matches(rho, dec);
    std::vector<ComplexMatrix> clicks;
    for (std::size_t k = 0; k < rho.n_parties(); ++k)
        clicks.push_back(bell_projector(rho.dims()[k]));
    return detail::mdi_value_with_effects(rho, dec, clicks);
}

// Same functional with arbitrary two-outcome POVMs: effects[k] is party k's
// "1" effect on its (input, share) pair and must satisfy 0 <= E <= I.
inline double mdi_value_arbitrary_povm(const DensityMatrix& rho, const WitnessDecomposition& dec,
                                       const std::vector<ComplexMatrix>& effects) {
    detail::require_decomposition_matches(rho, dec);
    if (effects.size() != rho.n_parties())
        throw DimensionError("need one POVM effect per party");
    for (std::size_t k = 0; k < effects.size(); ++k) {
        const std::size_t want = rho.dims()[k] * rho.dims()[k];
        if (effects[k].dim() != want)
            throw DimensionError("effect dimension does not match the (input, share) pair");
        if (!is_hermitian(effects[k], kEffectTol))
            throw DomainError("POVM effect is not Hermitian");
        const EigenDecomposition eig = hermitian_eigen(effects[k]);
        if (eig.eigenvalues.front() < -kEffectTol || eig.eigenvalues.back() > 1.0 + kEffectTol)
            throw DomainError("POVM effect has an eigenvalue outside [0, 1]");
    }
    return detail::mdi_value_with_effects(rho, dec, effects);
}

}  // namespace mdiew
