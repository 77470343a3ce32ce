#include "risuav/deployment.hpp"

#include <cmath>
#include <stdexcept>

namespace risuav {

Vec3 candidate_position(const Vec3& p, double d, double theta, double phi) {
  if (d < 0.0) throw std::invalid_argument("candidate_position: step must be nonnegative");
  return p + d * Vec3(std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta));
}

std::vector<double> link_shares(const NetworkScenario& s, const Schedule& x) {
  std::vector<double> share(static_cast<std::size_t>(x.slots() * x.uavs()), 0.0);
  for (int m = 0; m < x.slots(); ++m) {
    for (int n = 0; n < x.uavs(); ++n) {
      const int k = x.user_of(n, m);
      if (k < 0) continue;
      share[static_cast<std::size_t>(m * x.uavs() + n)] = s.gamma(k) / x.appearances(k);
    }
  }
  return share;
}

namespace {

constexpr double kShareTol = 1e-12;

std::vector<char> links_meeting(const RateReport& rep, const std::vector<double>& share, const Schedule& x) {
  std::vector<char> ok(share.size(), 0);
  for (int m = 0; m < x.slots(); ++m) {
    for (int n = 0; n < x.uavs(); ++n) {
      const auto i = static_cast<std::size_t>(m * x.uavs() + n);
      ok[i] = x.user_of(n, m) >= 0 && rep.link_rate[i] >= share[i] - kShareTol;
    }
  }
  return ok;
}

std::vector<char> users_meeting(const RateReport& rep, const NetworkScenario& s) {
  std::vector<char> ok(rep.per_user.size(), 0);
  for (std::size_t k = 0; k < ok.size(); ++k) ok[k] = rep.per_user[k] >= s.gamma(static_cast<int>(k)) - kShareTol;
  return ok;
}

bool keeps(const std::vector<char>& before, const std::vector<char>& after) {
  for (std::size_t i = 0; i < before.size(); ++i) {
    if (before[i] && !after[i]) return false;
  }
  return true;
}

}  // namespace

DeploymentState best_deployment(const NetworkScenario& s, const TimeblockDraw& draw, ChannelSet& ch,
                                std::vector<Vec3>& positions, const Schedule& x, const BeamPlan& beams,
                                const PhasePlan& phases, bool enforce) {
  DeploymentState st;
  st.p_pre = draw.uav_pos_pre;
  st.step = s.step_m;
  st.grid_step = s.search_step_rad;
  const std::vector<double> share = link_shares(s, x);
  RateReport current = evaluate_rates(ch, x, beams, phases, s.power_w, s.noise_w);
  st.sum_rate_before = current.sum_rate;
  const int grid = static_cast<int>(std::ceil(2.0 * kPi / s.search_step_rad - 1e-9));

  for (int n = 0; n < s.num_uavs; ++n) {
    const Vec3& pre = draw.uav_pos_pre[static_cast<std::size_t>(n)];
    const std::vector<char> baseline_links = links_meeting(current, share, x);
    const std::vector<char> baseline_users = users_meeting(current, s);
    std::vector<Vec3> cands;
    cands.push_back(pre);
    if (s.step_m > 0.0) {
      for (int i = 0; i < grid; ++i) {
        for (int j = 0; j < grid; ++j) {
          cands.push_back(candidate_position(pre, s.step_m, i * s.search_step_rad, j * s.search_step_rad));
        }
      }
    }
    double best_rate = current.sum_rate;
    int best = -1;
    RateReport best_rep;
    ChannelSet trial = ch;
    for (std::size_t c = 0; c < cands.size(); ++c) {
      const Vec3& p = cands[c];
      if (p.z() < s.min_altitude_m) continue;
      if ((p - positions[static_cast<std::size_t>(n)]).norm() == 0.0) continue;
      update_uav_channels(trial, s, draw, n, p);
      ++st.candidates_evaluated;
      RateReport rep = evaluate_rates(trial, x, beams, phases, s.power_w, s.noise_w);
      if (!(rep.sum_rate > best_rate)) continue;
      if (enforce && !(keeps(baseline_links, links_meeting(rep, share, x)) &&
                       keeps(baseline_users, users_meeting(rep, s)))) {
        continue;
      }
      best_rate = rep.sum_rate;
      best = static_cast<int>(c);
      best_rep = std::move(rep);
    }
    if (best >= 0) {
      positions[static_cast<std::size_t>(n)] = cands[static_cast<std::size_t>(best)];
      update_uav_channels(ch, s, draw, n, positions[static_cast<std::size_t>(n)]);
      current = std::move(best_rep);
    }
  }
  st.p_opt = positions;
  st.sum_rate_after = current.sum_rate;
  return st;
}

}  // namespace risuav
