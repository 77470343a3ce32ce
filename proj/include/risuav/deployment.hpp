#pragma once

// One-step sphere search over UAV movement directions.

#include <vector>

#include "risuav/channel.hpp"
#include "risuav/rate.hpp"
#include "risuav/scenario.hpp"

namespace risuav {

/// p_pre + d [sin(theta) cos(phi), sin(theta) sin(phi), cos(theta)].
Vec3 candidate_position(const Vec3& p_pre, double d, double theta_mv, double phi_mv);

struct DeploymentState {
  std::vector<Vec3> p_pre;
  std::vector<Vec3> p_opt;
  double step = 0.0;
  double grid_step = 0.0;
  double sum_rate_before = 0.0;
  double sum_rate_after = 0.0;
  int candidates_evaluated = 0;
};

/// Per-link share gamma_k / (appearances of k) used by the admissibility check.
std::vector<double> link_shares(const NetworkScenario& scenario, const Schedule& schedule);

/// Scans every UAV in index order around its p_pre (plus p_pre itself) with the other UAVs
/// at their latest accepted positions. A candidate replaces the current position only when
/// it strictly raises the sum-rate and keeps every link that met its share meeting it.
/// `positions` and `channels` are updated in place.
DeploymentState best_deployment(const NetworkScenario& scenario, const TimeblockDraw& draw, ChannelSet& channels,
                                std::vector<Vec3>& positions, const Schedule& schedule, const BeamPlan& beams,
                                const PhasePlan& phases, bool enforce_min_rate = true);

}  // namespace risuav
