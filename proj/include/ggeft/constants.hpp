#pragma once

// Central numeric tolerances. Functions that enforce one of these accept an
// override parameter; these are the per-run defaults.
namespace ggeft::defaults {

inline constexpr double hermiticity_tol = 1e-12;   // ||M - M^dag||_max at construction
inline constexpr double unitarity_tol = 1e-10;     // ||U^dag U - 1||_max
inline constexpr double spectral_tol = 1e-10;      // reconstruction / completeness checks
inline constexpr double degeneracy_tol = 1e-10;    // eigenvalue grouping width
inline constexpr double exp_overflow_arg = 700.0;  // |Re(scale)*eig| guard for exp
inline constexpr int jacobi_max_sweeps = 100;
inline constexpr double v_element_rel_tol = 1e-12; // epsilon denominator floor, relative to ||V||_max
inline constexpr double prob_floor = 1e-15;        // probabilities below this are exact zeros in logs

inline constexpr int propagator_slices = 2048;
inline constexpr double propagator_target_error = 1e-9;
inline constexpr int propagator_max_slices = 1 << 20;

}  // namespace ggeft::defaults
