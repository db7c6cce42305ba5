#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "nld/dynamics.hpp"

namespace nld {

/// Compatibility variables and second-order residuals at one interior sample.
struct BridgeResidual {
  double t = 0.0;
  ComplexField u0, v0;  // psi1_t + i psi2_x + i m psi1 - i W1, psi2_t - i psi1_x - i m psi2 + i W2
  double u0_max = 0.0, v0_max = 0.0;
  double nlkg_defect_1 = 0.0, nlkg_defect_2 = 0.0;  // max norms of the two Klein-Gordon lines
};

class BridgeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Throws BridgeError unless the system is spinor_1d with a model passing the
/// harmonic check.
void require_bridge_preconditions(const DiracSystem& sys);

/// Time derivatives from centered sample differences (first and second); the
/// Klein-Gordon lines are
///   (d_t^2 - d_x^2 + m^2) psi1 - m W1 - i sum_k d_k W1 * s_k,
///   (d_t^2 - d_x^2 + m^2) psi2 - m W2 + i sum_k d_k W2 * s_k,
/// with (s_a, s_b, s_c, s_d) = (S1, conj S1, S2, conj S2), S1 = -i m psi1 + i W1,
/// S2 = i m psi2 - i W2, and d_x^2 applied as deriv1 twice.
/// Requires 0 < k < samples - 1 and stored states.
BridgeResidual bridge_residual(const DiracSystem& sys, const Trajectory& tr, size_t k);

struct GronwallSeries {
  std::vector<double> times;  // interior samples
  std::vector<double> M;      // int (|u0|^2 + |v0|^2) dx
  std::vector<double> ratio;  // |dM/dt| / M where M exceeds floor_tol, else 0
  double floor = 0.0;         // M at the first interior sample
  double growth = 0.0;        // max M / floor (0 when floor is 0)
};

/// M(t) over all interior samples; the ratio uses centered differences of M.
GronwallSeries gronwall_monitor(const DiracSystem& sys, const Trajectory& tr, double floor_tol = 1e-300);

}  // namespace nld
