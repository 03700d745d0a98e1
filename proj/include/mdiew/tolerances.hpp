#pragma once

// Numeric tolerances used across the library. Everything upstream of the
// detector simulation is built from analytically constructed operators;
// deviations are rounding only.

namespace mdiew {

inline constexpr double kHermitianTol = 1e-10;   // max-entry |A - A^dagger|
inline constexpr double kTraceTol = 1e-10;       // |tr(rho) - 1|
inline constexpr double kPsdTol = -1e-9;         // smallest admissible eigenvalue
inline constexpr double kResidualTol = 1e-8;     // least-squares / reconstruction
inline constexpr double kPivotTol = 1e-12;       // elimination rank threshold
inline constexpr double kJacobiOffTol = 1e-12;   // off-diagonal Frobenius norm
inline constexpr int kJacobiMaxSweeps = 100;
inline constexpr double kCertifyTol = 1e-12;     // strict-inequality margin
inline constexpr double kEffectTol = 1e-9;       // POVM effect eigenvalue slack

}  // namespace mdiew
