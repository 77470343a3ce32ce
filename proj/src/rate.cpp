#include "risuav/rate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace risuav {

Schedule::Schedule(int users, int uavs, int slots)
    : users_(users), uavs_(uavs), slots_(slots), x_(static_cast<std::size_t>(users * uavs * slots), 0) {}

int Schedule::user_of(int n, int m) const {
  for (int k = 0; k < users_; ++k) {
    if (at(k, n, m)) return k;
  }
  return -1;
}

std::vector<std::pair<int, int>> Schedule::active(int m) const {
  std::vector<std::pair<int, int>> out;
  for (int n = 0; n < uavs_; ++n) {
    for (int k = 0; k < users_; ++k) {
      if (at(k, n, m)) out.emplace_back(k, n);
    }
  }
  return out;
}

int Schedule::appearances(int k) const {
  int count = 0;
  for (int m = 0; m < slots_; ++m) {
    for (int n = 0; n < uavs_; ++n) count += at(k, n, m) ? 1 : 0;
  }
  return count;
}

std::optional<std::string> Schedule::violation() const {
  for (int m = 0; m < slots_; ++m) {
    for (int n = 0; n < uavs_; ++n) {
      int served = 0;
      for (int k = 0; k < users_; ++k) served += at(k, n, m) ? 1 : 0;
      if (served > 1) return "rule (i): UAV " + std::to_string(n) + " serves several users in slot " + std::to_string(m);
    }
    for (int k = 0; k < users_; ++k) {
      int servers = 0;
      for (int n = 0; n < uavs_; ++n) servers += at(k, n, m) ? 1 : 0;
      if (servers > 1) return "rule (ii): user " + std::to_string(k) + " served by several UAVs in slot " + std::to_string(m);
    }
  }
  for (int k = 0; k < users_; ++k) {
    if (appearances(k) < 1) return "rule (iii): user " + std::to_string(k) + " is never scheduled";
  }
  return std::nullopt;
}

BeamPlan::BeamPlan(int users_, int uavs_, int slots_, int antennas_)
    : users(users_), uavs(uavs_), slots(slots_), antennas(antennas_),
      w(static_cast<std::size_t>(users_ * uavs_ * slots_),
        cvec::Constant(antennas_, cd(1.0 / std::sqrt(static_cast<double>(antennas_)), 0.0))) {}

double BeamPlan::modulus_error() const {
  const double target = 1.0 / std::sqrt(static_cast<double>(antennas));
  double worst = 0.0;
  for (const auto& beam : w) {
    for (Eigen::Index t = 0; t < beam.size(); ++t) worst = std::max(worst, std::abs(std::abs(beam(t)) - target));
  }
  return worst;
}

cvec phase_aligned_beam(const crow& row) {
  const double scale = 1.0 / std::sqrt(static_cast<double>(row.size()));
  cvec w(row.size());
  for (Eigen::Index t = 0; t < row.size(); ++t) {
    // row_t * w_t = |row_t| / sqrt(N_t) when w_t carries the conjugate phase
    w(t) = std::polar(scale, -std::arg(row(t)));
  }
  return w;
}

std::vector<crow> effective_channels(const ChannelSet& ch, const cvec& v) {
  std::vector<crow> rows;
  rows.reserve(static_cast<std::size_t>(ch.num_users * ch.num_uavs));
  for (int k = 0; k < ch.num_users; ++k) {
    for (int n = 0; n < ch.num_uavs; ++n) rows.push_back(effective_channel(ch, v, k, n));
  }
  return rows;
}

LinkGains link_gains(const ChannelSet& ch, const BeamPlan& beams, const PhasePlan& phases, int m) {
  const int K = ch.num_users;
  const int N = ch.num_uavs;
  if (beams.antennas != ch.antennas) throw std::invalid_argument("link_gains: beam length mismatch");
  const auto rows = effective_channels(ch, phases.v.at(static_cast<std::size_t>(m)));
  LinkGains out;
  out.users = K;
  out.uavs = N;
  out.g.resize(static_cast<std::size_t>(K * N));
  out.c.resize(static_cast<std::size_t>(K * K * N));
  for (int k = 0; k < K; ++k) {
    for (int n = 0; n < N; ++n) {
      out.g[static_cast<std::size_t>(k * N + n)] =
          std::norm((rows[static_cast<std::size_t>(k * N + n)] * beams.at(k, n, m))(0));
    }
  }
  for (int kp = 0; kp < K; ++kp) {
    for (int k = 0; k < K; ++k) {
      for (int np = 0; np < N; ++np) {
        out.c[static_cast<std::size_t>((kp * K + k) * N + np)] =
            std::norm((rows[static_cast<std::size_t>(k * N + np)] * beams.at(kp, np, m))(0));
      }
    }
  }
  return out;
}

double rate_user(const Schedule& x, const LinkGains& gains, double power, double noise, int k, int n, int m) {
  if (!x.at(k, n, m)) return 0.0;
  double interference = 0.0;
  for (int np = 0; np < x.uavs(); ++np) {
    if (np == n) continue;
    for (int kp = 0; kp < x.users(); ++kp) {
      if (kp == k || !x.at(kp, np, m)) continue;
      interference += power * gains.cross(kp, k, np);
    }
  }
  return std::log2(1.0 + power * gains.desired(k, n) / (interference + noise));
}

double RateReport::min_user_rate() const {
  if (per_user.empty()) return 0.0;
  return *std::min_element(per_user.begin(), per_user.end());
}

namespace {

// Rates of the active links of one slot, in Schedule::active order.
std::vector<double> slot_link_rates(const ChannelSet& ch, const std::vector<std::pair<int, int>>& links,
                                    const BeamPlan& beams, const cvec& v, int m, double power, double noise) {
  std::vector<cvec> used;
  used.reserve(links.size());
  for (const auto& [k, n] : links) used.push_back(beams.at(k, n, m));
  std::vector<double> rates;
  rates.reserve(links.size());
  for (std::size_t i = 0; i < links.size(); ++i) {
    const int k = links[i].first;
    double signal = 0.0;
    double interference = 0.0;
    for (std::size_t j = 0; j < links.size(); ++j) {
      const crow row = effective_channel(ch, v, k, links[j].second);
      const double p = power * std::norm((row * used[j])(0));
      if (i == j) {
        signal = p;
      } else {
        interference += p;
      }
    }
    rates.push_back(std::log2(1.0 + signal / (interference + noise)));
  }
  return rates;
}

}  // namespace

double slot_sum_rate(const ChannelSet& ch, const Schedule& x, const BeamPlan& beams, const cvec& v, int m,
                     double power, double noise) {
  const auto rates = slot_link_rates(ch, x.active(m), beams, v, m, power, noise);
  double total = 0.0;
  for (double r : rates) total += r;
  return total;
}

RateReport evaluate_rates(const ChannelSet& ch, const Schedule& x, const BeamPlan& beams, const PhasePlan& phases,
                          double power, double noise) {
  RateReport rep;
  rep.per_user.assign(static_cast<std::size_t>(x.users()), 0.0);
  rep.slot_rate.assign(static_cast<std::size_t>(x.slots()), 0.0);
  rep.link_rate.assign(static_cast<std::size_t>(x.slots() * x.uavs()), 0.0);
  for (int m = 0; m < x.slots(); ++m) {
    const auto links = x.active(m);
    const auto rates = slot_link_rates(ch, links, beams, phases.v.at(static_cast<std::size_t>(m)), m, power, noise);
    for (std::size_t i = 0; i < links.size(); ++i) {
      const auto [k, n] = links[i];
      rep.per_user[static_cast<std::size_t>(k)] += rates[i];
      rep.slot_rate[static_cast<std::size_t>(m)] += rates[i];
      rep.link_rate[static_cast<std::size_t>(m * x.uavs() + n)] = rates[i];
      rep.sum_rate += rates[i];
    }
  }
  return rep;
}

double sum_rate(const ChannelSet& ch, const Schedule& x, const BeamPlan& beams, const PhasePlan& phases,
                double power, double noise) {
  return evaluate_rates(ch, x, beams, phases, power, noise).sum_rate;
}

std::vector<double> per_user_rate(const ChannelSet& ch, const Schedule& x, const BeamPlan& beams,
                                  const PhasePlan& phases, double power, double noise) {
  return evaluate_rates(ch, x, beams, phases, power, noise).per_user;
}

}  // namespace risuav
