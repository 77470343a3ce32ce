#pragma once

// Received-signal model, per-link rates and timeblock metrics.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "risuav/channel.hpp"
#include "risuav/common.hpp"

namespace risuav {

/// Binary assignment x[k][n][m]: user k served by UAV n in slot m.
class Schedule {
 public:
  Schedule() = default;
  Schedule(int users, int uavs, int slots);

  int users() const { return users_; }
  int uavs() const { return uavs_; }
  int slots() const { return slots_; }

  bool at(int k, int n, int m) const { return x_[index(k, n, m)] != 0; }
  void set(int k, int n, int m, bool on) { x_[index(k, n, m)] = on ? 1 : 0; }
  std::size_t index(int k, int n, int m) const {
    return static_cast<std::size_t>((m * uavs_ + n) * users_ + k);
  }
  std::size_t size() const { return x_.size(); }
  bool flat(std::size_t i) const { return x_[i] != 0; }
  void set_flat(std::size_t i, bool on) { x_[i] = on ? 1 : 0; }

  /// User scheduled on UAV n in slot m, or -1.
  int user_of(int n, int m) const;
  /// (user, uav) pairs active in slot m, ordered by UAV.
  std::vector<std::pair<int, int>> active(int m) const;
  /// Number of (n, m) cells in which user k is scheduled.
  int appearances(int k) const;

  /// Rules (i)-(iii); returns a description of the first violation.
  std::optional<std::string> violation() const;
  bool valid() const { return !violation().has_value(); }

  bool operator==(const Schedule& other) const = default;

 private:
  int users_ = 0;
  int uavs_ = 0;
  int slots_ = 0;
  std::vector<std::uint8_t> x_;
};

/// Beam w_k^n[m] for every (user, UAV, slot) triple; the beam in use on UAV n at
/// slot m is the one toward its scheduled user.
struct BeamPlan {
  int users = 0;
  int uavs = 0;
  int slots = 0;
  int antennas = 0;
  std::vector<cvec> w;

  BeamPlan() = default;
  BeamPlan(int users_, int uavs_, int slots_, int antennas_);

  cvec& at(int k, int n, int m) { return w[index(k, n, m)]; }
  const cvec& at(int k, int n, int m) const { return w[index(k, n, m)]; }
  std::size_t index(int k, int n, int m) const {
    return static_cast<std::size_t>((m * uavs + n) * users + k);
  }

  /// Largest deviation of any entry modulus from 1/sqrt(N_t).
  double modulus_error() const;
};

/// Constant-modulus beam matched to a channel row: w_t = exp(j arg conj(row_t)) / sqrt(N_t).
cvec phase_aligned_beam(const crow& channel_row);

/// Effective channel rows for one slot, [k * N + n].
std::vector<crow> effective_channels(const ChannelSet& channels, const cvec& v_theta);

/// Desired and interference gains of one slot (without the power factor).
struct LinkGains {
  int users = 0;
  int uavs = 0;
  std::vector<double> g;  // [k * N + n] = |h~_k^n^H w_k^n|^2
  std::vector<double> c;  // [(kp * K + k) * N + np] = |h~_k^np^H w_kp^np|^2

  double desired(int k, int n) const { return g[static_cast<std::size_t>(k * uavs + n)]; }
  double cross(int kp, int k, int np) const {
    return c[static_cast<std::size_t>((kp * users + k) * uavs + np)];
  }
};

LinkGains link_gains(const ChannelSet& channels, const BeamPlan& beams, const PhasePlan& phases, int slot);

/// log2(1 + P g x / (sum_{n'!=n, k'!=k} P c x' + sigma^2)).
double rate_user(const Schedule& schedule, const LinkGains& gains, double power_w, double noise_w, int k, int n,
                 int m);

struct RateReport {
  double sum_rate = 0.0;
  std::vector<double> per_user;    // total over the timeblock
  std::vector<double> slot_rate;   // sum over links of each slot
  std::vector<double> link_rate;   // [m * N + n], 0 when idle
  double min_user_rate() const;
};

RateReport evaluate_rates(const ChannelSet& channels, const Schedule& schedule, const BeamPlan& beams,
                          const PhasePlan& phases, double power_w, double noise_w);

/// Sum-rate of one slot only.
double slot_sum_rate(const ChannelSet& channels, const Schedule& schedule, const BeamPlan& beams,
                     const cvec& v_theta, int slot, double power_w, double noise_w);

double sum_rate(const ChannelSet& channels, const Schedule& schedule, const BeamPlan& beams,
                const PhasePlan& phases, double power_w, double noise_w);
std::vector<double> per_user_rate(const ChannelSet& channels, const Schedule& schedule, const BeamPlan& beams,
                                  const PhasePlan& phases, double power_w, double noise_w);

}  // namespace risuav
