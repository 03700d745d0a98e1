#pragma once

// Detector-inefficiency model for the MDI protocol: the measured/true
// probability map under lost events (xi_minus) and additional counts
// (xi_plus), the certification bounds, the critical efficiency surface, and
// a count-level simulation in two modes.
//
//  - paper-exact mode shifts every outcome bin of every setting by the same
//    lost/additional quota. The shifts are idealized, so bins may go
//    negative when a quota exceeds a bin's ideal count (the record keeps a
//    tally in negative_bins); the estimated MDI value still reproduces the
//    closed-form measured/true map.
//  - stochastic mode keeps each ideal event independently with probability
//    xi_minus and draws dark counts Poisson per bin. This is a fluctuating
//    extension; its mean matches paper-exact mode when xi_minus = 1.
//
// Unit efficiencies are branched to the one-sided closed forms so the
// lost-only / additional-only reductions are exact rather than rounded.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mdiew/errors.hpp"
#include "mdiew/mdi.hpp"
#include "mdiew/rng.hpp"
#include "mdiew/tolerances.hpp"

namespace mdiew {

// Lost-event efficiency xi_minus = (N_ideal - lost) / N_ideal and
// additional-event efficiency xi_plus = N_ideal / (N_ideal + added), both in
// (0, 1]; n_parties fixes the outcome-bin count 2^n.
struct EfficiencyParams {
    double xi_minus;
    double xi_plus;
    int n_parties;

    EfficiencyParams(double minus, double plus, int parties)
        : xi_minus(minus), xi_plus(plus), n_parties(parties) {
        if (!(minus > 0.0 && minus <= 1.0) || !(plus > 0.0 && plus <= 1.0))
            throw UnphysicalRegimeError("event efficiencies must lie in (0, 1]");
        if (parties < 2) throw DomainError("the protocol needs at least two parties");
    }

    int n_bins() const { return 1 << n_parties; }
    double denominator() const { return xi_minus + 1.0 / xi_plus - 1.0; }
    bool ideal() const { return xi_minus == 1.0 && xi_plus == 1.0; }
};

struct MeasuredProbability {
    double value;
    bool in_range;  // false when the equal-per-bin count model left [0, 1]
};

// Measured click probability produced by a true probability under the
// equal-per-bin count shifts.
inline MeasuredProbability measured_prob(double true_p, const EfficiencyParams& eff) {
    if (!(true_p >= 0.0 && true_p <= 1.0))
        throw DomainError("measured_prob: true probability must lie in [0, 1]");
    const double bins = static_cast<double>(eff.n_bins());
    double v;
    if (eff.xi_plus == 1.0) {
        v = true_p / eff.xi_minus - (1.0 - eff.xi_minus) / (bins * eff.xi_minus);
    } else if (eff.xi_minus == 1.0) {
        v = eff.xi_plus * true_p + (1.0 - eff.xi_plus) / bins;
    } else {
        const double den = eff.denominator();
        detail::require_physical(den);
        v = (true_p - (1.0 - eff.xi_minus) / bins + (1.0 / eff.xi_plus - 1.0) / bins) / den;
    }
    return MeasuredProbability{v, v >= 0.0 && v <= 1.0};
}

// Measured MDI value from the true one; trace_w = sum of the expansion
// coefficients = tr(W).
inline double measured_mdi_from_true(double i_true, double trace_w, const EfficiencyParams& eff) {
    const double bins = static_cast<double>(eff.n_bins());
    if (eff.xi_plus == 1.0)
        return i_true / eff.xi_minus - (1.0 - eff.xi_minus) / (bins * eff.xi_minus) * trace_w;
    if (eff.xi_minus == 1.0) return eff.xi_plus * i_true + (1.0 - eff.xi_plus) / bins * trace_w;
    const double den = eff.denominator();
    detail::require_physical(den);
    return (i_true + trace_w * ((1.0 / eff.xi_plus - 1.0) - (1.0 - eff.xi_minus)) / bins) / den;
}

// Threshold on the measured MDI value below which entanglement is certified
// despite the detector inefficiencies.
inline double mdi_bound(double trace_w, const EfficiencyParams& eff) {
    if (trace_w < 0.0) throw DomainError("mdi_bound: tr(W) must be non-negative");
    const double bins = static_cast<double>(eff.n_bins());
    if (eff.xi_plus == 1.0) return trace_w / bins * (1.0 - 1.0 / eff.xi_minus);
    if (eff.xi_minus == 1.0) return trace_w / bins * (1.0 - eff.xi_plus);
    const double den = eff.denominator();
    detail::require_physical(den);
    return trace_w / bins * (1.0 - 1.0 / den);
}

inline bool certifies_mdi(double i_measured, double trace_w, const EfficiencyParams& eff) {
    return i_measured < mdi_bound(trace_w, eff) - kCertifyTol;
}

// The additional-event efficiency at which the certification bound crosses
// zero for a given lost-event efficiency: xi_minus + 1/xi_plus = 2.
inline double critical_xi_plus(double xi_minus) {
    if (!(xi_minus > 0.0 && xi_minus <= 1.0))
        throw UnphysicalRegimeError("critical_xi_plus: xi_minus must lie in (0, 1]");
    return 1.0 / (2.0 - xi_minus);
}

enum class SimulationMode { paper_exact, stochastic };

inline std::string to_string(SimulationMode m) {
    return m == SimulationMode::paper_exact ? "paper-exact" : "stochastic";
}

// Per-setting outcome counts produced by the detector model. Counts are
// signed: paper-exact mode can push a bin below zero (see header comment).
struct CountsRecord {
    std::vector<std::size_t> settings_shape;
    int n_parties = 0;
    std::vector<long long> counts;  // [setting][outcome]
    long long n_per_setting = 0;    // ideal events per setting
    SimulationMode mode = SimulationMode::paper_exact;
    std::uint64_t seed = 0;
    EfficiencyParams eff{1.0, 1.0, 2};
    int negative_bins = 0;

    std::size_t n_settings() const { return detail::product(settings_shape); }
    std::size_t n_outcomes() const { return std::size_t{1} << n_parties; }

    long long count(std::size_t setting, std::size_t outcome) const {
        return counts[setting * n_outcomes() + outcome];
    }
    long long total(std::size_t setting) const {
        long long t = 0;
        for (std::size_t o = 0; o < n_outcomes(); ++o) t += count(setting, o);
        return t;
    }
};

namespace detail {

// Integer counts from real targets, floor + largest remainder so the total
// is exact; ties resolved toward lower bin index.
inline std::vector<long long> largest_remainder(const std::vector<double>& targets,
                                                long long total) {
    const std::size_t n = targets.size();
    std::vector<long long> counts(n);
    std::vector<std::pair<double, std::size_t>> fractions(n);
    long long assigned = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = std::max(0.0, targets[i]);
        counts[i] = static_cast<long long>(std::floor(t));
        fractions[i] = {t - std::floor(t), i};
        assigned += counts[i];
    }
    long long leftover = total - assigned;
    std::sort(fractions.begin(), fractions.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    for (std::size_t k = 0; leftover > 0; k = (k + 1) % n, --leftover) counts[fractions[k].second] += 1;
    return counts;
}

// Equal split of `total` over `bins`, first (total mod bins) bins get one more.
inline std::vector<long long> equal_apportion(long long total, std::size_t bins) {
    std::vector<long long> q(bins, total / static_cast<long long>(bins));
    const long long rem = total % static_cast<long long>(bins);
    for (long long i = 0; i < rem; ++i) q[static_cast<std::size_t>(i)] += 1;
    return q;
}

inline long long draw_binomial(long long n, double p, Rng& rng) {
    if (n <= 0 || p <= 0.0) return 0;
    if (p >= 1.0) return n;
    if (n <= 256) {
        long long k = 0;
        for (long long i = 0; i < n; ++i)
            if (rng.uniform() < p) ++k;
        return k;
    }
    const double mean = static_cast<double>(n) * p;
    const double sd = std::sqrt(mean * (1.0 - p));
    const long long k = std::llround(mean + rng.normal() * sd);
    return std::clamp(k, 0ll, n);
}

inline long long draw_poisson(double mean, Rng& rng) {
    if (mean <= 0.0) return 0;
    if (mean < 64.0) {
        const double limit = std::exp(-mean);
        long long k = 0;
        double prod = rng.uniform();
        while (prod > limit) {
            ++k;
            prod *= rng.uniform();
        }
        return k;
    }
    return std::max(0ll, std::llround(mean + rng.normal() * std::sqrt(mean)));
}

// Multinomial via sequential conditional binomials; the last bin absorbs the
// remainder so totals are exact.
inline std::vector<long long> draw_multinomial(long long n, const std::vector<double>& p, Rng& rng) {
    std::vector<long long> counts(p.size(), 0);
    long long remaining = n;
    double rest = 1.0;
    for (std::size_t b = 0; b + 1 < p.size(); ++b) {
        if (remaining == 0) break;
        const double cond = rest > 0.0 ? std::clamp(p[b] / rest, 0.0, 1.0) : 0.0;
        counts[b] = draw_binomial(remaining, cond, rng);
        remaining -= counts[b];
        rest -= p[b];
    }
    counts.back() += remaining;
    return counts;
}

}  // namespace detail

// Applies the detector model to a table of true outcome probabilities.
// Deterministic for a fixed seed; every setting owns an independent stream.
inline CountsRecord simulate_counts(const ProbabilityTable& probs, long long n_per_setting,
                                    const EfficiencyParams& eff, SimulationMode mode,
                                    std::uint64_t seed) {
    if (n_per_setting < 1) throw DomainError("simulate_counts: n_per_setting must be at least 1");
    if (static_cast<std::size_t>(eff.n_parties) != probs.n_parties())
        throw DimensionError("simulate_counts: efficiency party count does not match the table");

    const std::size_t bins = probs.n_outcomes();
    const std::size_t n_settings = probs.n_settings();

    CountsRecord rec;
    rec.settings_shape = probs.settings_shape();
    rec.n_parties = eff.n_parties;
    rec.n_per_setting = n_per_setting;
    rec.mode = mode;
    rec.seed = seed;
    rec.eff = eff;
    rec.counts.assign(n_settings * bins, 0);

    const double added_total = static_cast<double>(n_per_setting) * (1.0 / eff.xi_plus - 1.0);

    if (mode == SimulationMode::paper_exact) {
        const long long removed = std::llround(static_cast<double>(n_per_setting) * (1.0 - eff.xi_minus));
        const long long added = std::llround(added_total);
        const std::vector<long long> rq = detail::equal_apportion(removed, bins);
        const std::vector<long long> aq = detail::equal_apportion(added, bins);
        std::vector<double> targets(bins);
        for (std::size_t s = 0; s < n_settings; ++s) {
            for (std::size_t o = 0; o < bins; ++o)
                targets[o] = static_cast<double>(n_per_setting) * probs.value(s, o);
            const std::vector<long long> ideal = detail::largest_remainder(targets, n_per_setting);
            for (std::size_t o = 0; o < bins; ++o) {
                const long long c = ideal[o] - rq[o] + aq[o];
                rec.counts[s * bins + o] = c;
                if (c < 0) ++rec.negative_bins;
            }
        }
    } else {
        const double dark_mean = added_total / static_cast<double>(bins);
        std::vector<double> p(bins);
        for (std::size_t s = 0; s < n_settings; ++s) {
            Rng rng = derived_rng(seed, s);
            for (std::size_t o = 0; o < bins; ++o) p[o] = std::max(0.0, probs.value(s, o));
            const std::vector<long long> ideal = detail::draw_multinomial(n_per_setting, p, rng);
            for (std::size_t o = 0; o < bins; ++o) {
                long long kept = eff.xi_minus == 1.0 ? ideal[o]
                                                     : detail::draw_binomial(ideal[o], eff.xi_minus, rng);
                rec.counts[s * bins + o] = kept + detail::draw_poisson(dark_mean, rng);
            }
        }
    }
    return rec;
}

// Estimated MDI run: measured value, certification bound and verdict.
struct MdiRunResult {
    double i_measured = 0.0;
    double i_true = std::numeric_limits<double>::quiet_NaN();  // NaN when unknown
    double bound = 0.0;
    bool certified = false;
    EfficiencyParams params{1.0, 1.0, 2};
    std::optional<double> statistical_error;
};

// MDI value from measured frequencies: I_m = sum beta * n_all-ones / N. In
// stochastic mode the propagated multinomial standard error is attached.
inline MdiRunResult estimate_mdi(const CountsRecord& counts, const WitnessDecomposition& dec,
                                 std::optional<double> i_true = std::nullopt) {
    if (counts.settings_shape != dec.shape())
        throw DimensionError("estimate_mdi: counts settings do not match the decomposition");

    const std::size_t all_ones = counts.n_outcomes() - 1;
    double i_m = 0.0;
    double var = 0.0;
    for (std::size_t s = 0; s < counts.n_settings(); ++s) {
        const long long total = counts.total(s);
        if (total <= 0) throw DomainError("estimate_mdi: zero total count in a setting");
        const double freq = static_cast<double>(counts.count(s, all_ones)) / static_cast<double>(total);
        i_m += dec.beta[s] * freq;
        const double p = std::clamp(freq, 0.0, 1.0);
        var += dec.beta[s] * dec.beta[s] * p * (1.0 - p) / static_cast<double>(total);
    }

    MdiRunResult res;
    res.i_measured = i_m;
    if (i_true) res.i_true = *i_true;
    res.params = counts.eff;
    res.bound = mdi_bound(std::max(0.0, dec.beta_sum()), counts.eff);
    res.certified = res.i_measured < res.bound - kCertifyTol;
    if (counts.mode == SimulationMode::stochastic) res.statistical_error = std::sqrt(var);
    return res;
}

// One grid point of the certification-bound surface.
struct SweepRow {
    double xi_minus;
    double xi_plus;
    double bound;    // NaN when excluded
    bool excluded;   // true where the count relation has no positive denominator
};

// Uniform inclusive grid of the bound over [lo, hi]^2 in both efficiencies.
// Rows in the excluded regime are flagged rather than dropped.
inline std::vector<SweepRow> sweep_surface(double trace_w, int n_parties, int grid_points,
                                           double lo = 0.02, double hi = 1.0) {
    if (trace_w < 0.0) throw DomainError("sweep_surface: tr(W) must be non-negative");
    if (grid_points < 2) throw DomainError("sweep_surface: need at least 2 grid points");
    if (!(lo > 0.0 && lo <= hi && hi <= 1.0))
        throw DomainError("sweep_surface: grid range must satisfy 0 < lo <= hi <= 1");
    if (n_parties < 2) throw DomainError("sweep_surface: need at least two parties");

    std::vector<double> grid(grid_points);
    for (int i = 0; i < grid_points; ++i)
        grid[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(grid_points - 1);
    grid.back() = hi;

    std::vector<SweepRow> rows;
    rows.reserve(static_cast<std::size_t>(grid_points) * grid_points);
    for (double xm : grid) {
        for (double xp : grid) {
            const EfficiencyParams eff(xm, xp, n_parties);
            SweepRow row{xm, xp, 0.0, false};
            if (eff.denominator() > 0.0) {
                row.bound = mdi_bound(trace_w, eff);
            } else {
                row.excluded = true;
                row.bound = std::numeric_limits<double>::quiet_NaN();
            }
            rows.push_back(row);
        }
    }
    return rows;
}

}  // namespace mdiew
