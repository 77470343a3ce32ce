#pragma once

// Problem instance, randomness and large-scale fading for one network run.

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "risuav/common.hpp"

namespace risuav {

/// kappa = intercept + 10 * exponent * log10(s) + eta, eta ~ N(0, shadow_sigma^2), all in dB.
struct PathLossParams {
  double intercept_db = 61.4;
  double exponent = 2.0;
  double shadow_sigma_db = 5.8;
};

struct NetworkScenario {
  int num_uavs = 2;   // N
  int num_users = 4;  // K
  int num_slots = 4;  // M
  int num_ris = 2;    // R, zero disables the surfaces entirely
  int uav_rows = 16;  // M_E
  int uav_cols = 4;   // N_A
  int ris_rows = 16;
  int ris_cols = 4;

  double power_w = dbm_to_watts(5.0);
  double noise_w = dbm_to_watts(-85.0);
  std::vector<double> min_rate;  // gamma_k, bits/s/Hz per timeblock

  double step_m = 1.0;
  double min_altitude_m = 5.0;
  double search_step_rad = kPi / 8.0;

  std::vector<Vec3> uav_init_pos;
  std::vector<Vec3> ris_pos;
  std::vector<Vec3> user_pos;  // z = 0
  std::vector<Vec3> ris_candidates;
  double user_area[4] = {0.0, 50.0, 0.0, 50.0};  // xmin, xmax, ymin, ymax
  double user_jitter_m = 0.0;

  double carrier_hz = 28e9;
  double blockage_a = 11.95;
  double blockage_b = 0.14;
  PathLossParams los{61.4, 2.0, 5.8};
  PathLossParams blocked{72.0, 2.92, 8.7};
  int clusters = 3;
  double scatter_radius_m = 50.0;

  int timeblocks = 1000;
  std::uint64_t seed = 1;

  int antennas() const { return uav_rows * uav_cols; }
  int ris_elements() const { return ris_rows * ris_cols; }
  double gamma(int k) const { return min_rate.at(static_cast<std::size_t>(k)); }

  /// Throws ConfigError naming the first violated constraint.
  void validate() const;
};

/// Scenario populated with the reference setup (2 UAVs, 4 users, 4 slots, 2 RIS, 16x4 arrays).
NetworkScenario default_scenario();

/// Parses JSON text (empty text means all defaults). Throws ConfigError.
NetworkScenario load_scenario(std::string_view config_text);
NetworkScenario load_scenario_file(const std::string& path);

/// Draws K user positions uniformly in the scenario's user area from its seed.
std::vector<Vec3> place_users(const NetworkScenario& scenario);

/// Logistic air-to-ground LOS model; elevation in degrees.
double no_blockage_probability(double elevation_deg, double a = 11.95, double b = 0.14);

/// Elevation angle (degrees) of `from` as seen from ground point `to`.
double elevation_deg(const Vec3& from, const Vec3& to);

/// Throws std::invalid_argument for nonpositive distance.
double path_loss_db(double distance_m, const PathLossParams& params, double eta_db);
double path_loss_db(double distance_m, bool blocked, double eta_db);

/// Large-scale and small-scale randomness for one transmitter/receiver link.
struct LinkDraw {
  bool blocked = false;
  double shadow_db = 0.0;           // eta, frozen for the timeblock
  double gain_db = 0.0;             // kappa at the draw-time distance
  std::vector<cd> unit_gains;       // CN(0,1) per cluster, scaled by 10^(-kappa/20) at use
  std::vector<Vec3> scatterers;     // ground points, empty for a LOS link
};

enum class LinkKind : std::uint64_t { uav_user = 1, ris_user = 2, uav_ris = 3, mode = 4, users = 5 };

/// Seeded generator for one (seed, timeblock, link) triple.
std::mt19937_64 link_rng(std::uint64_t seed, std::uint64_t timeblock, LinkKind kind,
                         std::uint64_t a, std::uint64_t b);

struct TimeblockDraw {
  int index = 0;
  std::vector<Vec3> uav_pos_pre;
  std::vector<Vec3> user_pos;
  std::vector<LinkDraw> uav_user;  // [k * N + n]
  std::vector<LinkDraw> ris_user;  // [k * R + r]
  std::vector<LinkDraw> uav_ris;   // [r * N + n]
  int num_uavs = 0;
  int num_ris = 0;

  const LinkDraw& direct(int k, int n) const { return uav_user[static_cast<std::size_t>(k * num_uavs + n)]; }
  const LinkDraw& ris_to_user(int k, int r) const { return ris_user[static_cast<std::size_t>(k * num_ris + r)]; }
  const LinkDraw& uav_to_ris(int r, int n) const { return uav_ris[static_cast<std::size_t>(r * num_uavs + n)]; }
};

/// Blockage uses the elevation from `uav_pos_pre`; everything is a pure function of
/// (scenario.seed, index, link identity).
TimeblockDraw sample_timeblock(const NetworkScenario& scenario, int index,
                               const std::vector<Vec3>& uav_pos_pre);

}  // namespace risuav
