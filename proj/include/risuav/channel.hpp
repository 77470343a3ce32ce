#pragma once

// Array responses and channel synthesis for direct, RIS-user and UAV-RIS links.
//
// Conventions:
//   * UPA steering vectors are vectorized row-major over (p, c), p the M_E index:
//     entry p * N_A + c = exp(j*pi*(c*mu + p*nu)) / sqrt(N_t).
//   * h_direct(k, n) is the column h_k^n; the transmitted signal reaches user k as
//     h_direct^H w.
//   * h_ris_user(k, r) holds the row entries of h_k^r (used without conjugation):
//     the cascaded row is h_k^r * Theta_r * G_r^n.

#include <iosfwd>
#include <vector>

#include "risuav/common.hpp"
#include "risuav/scenario.hpp"

namespace risuav {

struct Angles {
  double theta;  // elevation from the local vertical, radians
  double phi;    // azimuth, radians
};

/// theta = atan(horizontal / |dz|); phi = atan(dy/dx) - pi*min(sign(dx), 0), phi = 0 when
/// the horizontal positions coincide.
Angles angles_to(const Vec3& from, const Vec3& to);

cvec steering_vector(double theta, double phi, int rows, int cols);

/// One timeblock's channels at a given set of UAV positions.
struct ChannelSet {
  int num_users = 0;
  int num_uavs = 0;
  int num_ris = 0;
  int antennas = 0;
  int ris_elements = 0;

  std::vector<cvec> h_direct;    // [k * N + n], length N_t
  std::vector<cvec> h_ris_user;  // [k * R + r], length N_RIS
  std::vector<cmat> g_uav_ris;   // [r * N + n], N_RIS x N_t
  std::vector<crow> h_ris_stack; // [k], 1 x R*N_RIS
  std::vector<cmat> g_stack;     // [n], R*N_RIS x N_t

  const cvec& direct(int k, int n) const { return h_direct[idx(k, n)]; }
  cvec& direct(int k, int n) { return h_direct[idx(k, n)]; }
  const cvec& ris_user(int k, int r) const { return h_ris_user[static_cast<std::size_t>(k * num_ris + r)]; }
  const cmat& uav_ris(int r, int n) const { return g_uav_ris[static_cast<std::size_t>(r * num_uavs + n)]; }
  int stacked_size() const { return num_ris * ris_elements; }

  /// Rebuilds the stacked forms from the per-RIS blocks.
  void restack();
  void restack_uav(int n);
  void restack_user(int k);

  /// Zeroes every RIS-related channel (no-RIS ablation).
  void clear_ris();

 private:
  std::size_t idx(int k, int n) const { return static_cast<std::size_t>(k * num_uavs + n); }
};

/// Complex gain scale 10^(-kappa/20) for a link at `distance_m` with its frozen shadowing.
double amplitude_scale(const LinkDraw& link, const NetworkScenario& scenario, double distance_m);

cvec uav_user_channel(const TimeblockDraw& draw, const NetworkScenario& scenario, const Vec3& uav_pos,
                      int user, int uav);
cvec ris_user_channel(const TimeblockDraw& draw, const NetworkScenario& scenario, int ris, int user);
cmat uav_ris_channel(const TimeblockDraw& draw, const NetworkScenario& scenario, const Vec3& uav_pos,
                     int ris, int uav);

ChannelSet build_channels(const NetworkScenario& scenario, const TimeblockDraw& draw,
                          const std::vector<Vec3>& uav_pos);

/// Recomputes the channels of one UAV after it moved.
void update_uav_channels(ChannelSet& channels, const NetworkScenario& scenario, const TimeblockDraw& draw,
                         int uav, const Vec3& uav_pos);

/// Per-slot RIS configuration: v[m] is the diagonal of the stacked phase matrix.
struct PhasePlan {
  std::vector<cvec> v;

  static PhasePlan identity(int slots, int length);
  int slots() const { return static_cast<int>(v.size()); }
};

/// h~^H = h_k^n^H + H_RIS[k] diag(v) G_stack[n]. Throws std::invalid_argument on size mismatch.
crow effective_channel(const ChannelSet& channels, const cvec& v_theta, int user, int uav);

/// Per-RIS sum form of the same quantity, kept for cross-checking the stacked route.
crow effective_channel_summed(const ChannelSet& channels, const cvec& v_theta, int user, int uav);

/// Text dump: header line "risuav-channels K N R Nt Nris", then one block per matrix
/// ("direct k n" / "ris_user k r" / "uav_ris r n") followed by rows of "re im" pairs.
void write_channel_dump(std::ostream& out, const ChannelSet& channels);
ChannelSet read_channel_dump(std::istream& in);

}  // namespace risuav
