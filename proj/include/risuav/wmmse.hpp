#pragma once

// Per-slot beamforming and RIS phases through the sum-rate / weighted-MSE equivalence.
//
// For active link i (user k_i on UAV n_i) with s_ij = h~_{k_i}^{n_j H} w_j:
//   E_i = |sqrt(P) u_i s_ii - 1|^2 + sum_{j != i} P |u_i|^2 |s_ij|^2 + sigma^2 |u_i|^2,
// and the block objective is sum_i g_i E_i - ln g_i. Both unit-modulus blocks reduce to
//   f(x) = x^H Q x - 2 Re(x^H b),  |x_t| = modulus,
// solved by majorization-minimization with q = (lambda_max I - Q) x + b.

#include <functional>
#include <random>
#include <utility>
#include <vector>

#include "risuav/channel.hpp"
#include "risuav/common.hpp"
#include "risuav/rate.hpp"

namespace risuav {

/// Active links of one slot with their current beams.
struct SlotLinks {
  std::vector<std::pair<int, int>> links;  // (user, uav)
  std::vector<cvec> beams;                 // one per link
};

SlotLinks slot_links(const Schedule& schedule, const BeamPlan& beams, int slot);

/// s_ij for every ordered pair of active links, row-major [i * L + j].
std::vector<cd> link_responses(const ChannelSet& channels, const SlotLinks& slot, const cvec& v_theta);

struct WmmseState {
  std::vector<cd> u;
  std::vector<double> g;
  std::vector<double> E;
  double objective = 0.0;  // sum g E - ln g
};

std::vector<double> compute_mse(const std::vector<cd>& responses, const std::vector<cd>& u, double power_w,
                                double noise_w);
/// MMSE receivers u_i = sqrt(P) s_ii^* / (P |s_ii|^2 + Phi_i).
std::vector<cd> update_receiver(const std::vector<cd>& responses, double power_w, double noise_w);
/// g = 1 / E; throws std::domain_error for nonpositive E.
std::vector<double> update_weight(const std::vector<double>& E);
double wmmse_objective(const std::vector<double>& g, const std::vector<double>& E);

/// Per-link rates log2(1 + SINR) from the same responses.
std::vector<double> link_rates(const std::vector<cd>& responses, double power_w, double noise_w);

struct MmProblem {
  cmat Q;                 // Hermitian PSD
  cvec b;
  double modulus = 1.0;
  double lambda_max = 0.0;

  /// Fills lambda_max; throws std::invalid_argument when Q is not Hermitian.
  void prepare();
  double objective(const cvec& x) const;
  /// Majorizer expanded at x0, evaluated at x (equals objective(x0) when x == x0).
  double surrogate(const cvec& x, const cvec& x0) const;
};

struct MmOptions {
  double tolerance = 1e-3;  // relative change of f
  int max_iterations = 1000;
};

struct MmResult {
  cvec x;
  std::vector<double> trace;  // f at the start and after every iteration
  int iterations = 0;
};

MmResult mm_solve(const MmProblem& problem, const cvec& x0, const MmOptions& options = {});

/// Beam block of the link with index `j` in `slot` (others fixed).
MmProblem beam_problem(const ChannelSet& channels, const SlotLinks& slot, const cvec& v_theta,
                       const WmmseState& state, int j, double power_w);

/// RIS-phase block of one slot (beams fixed).
MmProblem ris_problem(const ChannelSet& channels, const SlotLinks& slot, const WmmseState& state,
                      double power_w);

struct JointOptions {
  double tolerance = 1e-3;  // outer relative change of the weighted-MSE objective
  int max_rounds = 1000;
  MmOptions mm;
  bool optimize_beams = true;
  bool optimize_phases = true;
};

struct JointTrace {
  std::vector<double> objective;              // after every full round (starts with the initial value)
  std::vector<std::vector<double>> beam_mm;   // every beam MM trace
  std::vector<std::vector<double>> phase_mm;  // every phase MM trace
  int rounds = 0;
  bool converged = false;
};

/// Optimizes the beams of the slot's active links and the slot's RIS phases in place.
JointTrace joint_beam_ris(const ChannelSet& channels, SlotLinks& slot, cvec& v_theta, double power_w,
                          double noise_w, const JointOptions& options = {});

/// Constant-modulus vector with uniform random phases.
cvec random_unit_modulus(std::mt19937_64& rng, int length, double modulus);

/// Beams phase-aligned to the direct channel of each (user, uav) pair; phases all ones.
void initialize_plans(const ChannelSet& channels, BeamPlan& beams, PhasePlan& phases);

}  // namespace risuav
