#pragma once

// User scheduling as a mixed-integer program, solved by spatial branch-and-bound
// over a secant/outer-approximation linear relaxation.
//
// Per triple j = (k, n, m) the program carries x_j (binary), d_j and h_j with
//   maximize  sum_j d_j - h_j
//   s.t.      rules (i)-(iii) on x,  sum_{n,m} d - h >= gamma_k,
//             2^d_j <= SI_j(x) = P g_j x_j + I_j(x) + sigma^2,
//             2^h_j >= I_j(x) + sigma^2,   I_j(x) = sum_{n'!=n, k'!=k} P c x_{k'n'm}.
// The relaxation replaces 2^h by its secant over [l_h, u_h] and log2(SI) by tangent
// cuts; it also carries the valid cut d_j - h_j <= x_j log2(1 + P g_j / sigma^2).
// Internally all powers are normalized by sigma^2.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "risuav/channel.hpp"
#include "risuav/rate.hpp"
#include "risuav/scenario.hpp"

namespace risuav {

struct MinlpInstance {
  int users = 0;
  int uavs = 0;
  int slots = 0;
  double power_w = 1.0;
  double noise_w = 1.0;
  std::vector<double> g;      // [var(k, n, m)]
  std::vector<double> c;      // [cross(kp, k, np, m)]
  std::vector<double> gamma;  // [k]

  int variables() const { return users * uavs * slots; }
  std::size_t var(int k, int n, int m) const { return static_cast<std::size_t>((m * uavs + n) * users + k); }
  std::size_t cross(int kp, int k, int np, int m) const {
    return static_cast<std::size_t>(((m * users + kp) * users + k) * uavs + np);
  }
  double pg(int k, int n, int m) const { return power_w * g[var(k, n, m)]; }
  double pc(int kp, int k, int np, int m) const { return power_w * c[cross(kp, k, np, m)]; }

  /// l_h = log2(sigma^2) and u_h = log2(sum P c + sigma^2) for triple (k, n, m).
  double h_lower(int k, int n, int m) const;
  double h_upper(int k, int n, int m) const;

  /// Sizes must match and gains must be finite and nonnegative.
  void validate() const;
};

/// Gains from the current network state; beams at unscheduled triples act as candidates.
MinlpInstance make_instance(const NetworkScenario& scenario, const ChannelSet& channels, const BeamPlan& beams,
                            const PhasePlan& phases);

std::vector<double> exact_user_rates(const MinlpInstance& instance, const Schedule& schedule);
double exact_objective(const MinlpInstance& instance, const Schedule& schedule);
bool meets_min_rate(const MinlpInstance& instance, const Schedule& schedule, double tol = 1e-9);

/// Linear over-estimator of 2^h on [l, u]: slope * h + intercept.
struct Secant {
  double slope = 0.0;
  double intercept = 0.0;
  double operator()(double h) const { return slope * h + intercept; }
};

/// Throws std::invalid_argument when u <= l.
Secant secant_bound(double l, double u);

/// Tangent upper bound of log2(SI_j(x)) taken at some point: d_j <= offset + sum coef * x.
struct TangentCut {
  int row = 0;
  double offset = 0.0;
  std::vector<std::pair<int, double>> coef;
};

struct BnBNode {
  std::vector<std::uint8_t> x_lo;
  std::vector<std::uint8_t> x_hi;
  std::vector<double> h_lo;  // normalized: log2(value / sigma^2)
  std::vector<double> h_hi;
  double parent_bound = std::numeric_limits<double>::infinity();
  int depth = 0;
  std::vector<TangentCut> cuts;

  static BnBNode root(const MinlpInstance& instance);
};

struct RelaxationOptions {
  double cut_tolerance = 1e-6;
  int max_rounds = 60;
  /// Stop refining once the bound drops to this value (node can be pruned).
  double prune_below = -std::numeric_limits<double>::infinity();
};

struct Relaxation {
  bool feasible = false;
  double objective = 0.0;  // valid upper bound on the node
  std::vector<double> x;
  std::vector<double> d;   // normalized
  std::vector<double> h;   // normalized
  std::vector<TangentCut> active_cuts;
  int lp_solves = 0;
  bool refined = false;    // cut violation below tolerance
};

Relaxation solve_node_relaxation(const MinlpInstance& instance, const BnBNode& node,
                                 const RelaxationOptions& options = {});

/// Integer branch on the most fractional x (lowest index on ties); otherwise a continuous
/// branch at the current h of the most violated active triple. Throws std::logic_error
/// when the relaxed point is already integral and exact.
std::pair<BnBNode, BnBNode> branch(const MinlpInstance& instance, const BnBNode& node, const Relaxation& rel);

struct SbnbOptions {
  double tolerance = 1e-5;  // absolute, bits/s/Hz
  long max_nodes = 1000000;
  std::optional<Schedule> incumbent;
  std::function<void(const std::string&)> log;
  int log_every = 0;
};

struct SbnbResult {
  bool feasible = false;
  Schedule schedule;
  double objective = -std::numeric_limits<double>::infinity();
  double bound = std::numeric_limits<double>::infinity();
  bool certified = false;
  long nodes = 0;
  long lp_solves = 0;
  int infeasible_user = -1;
};

SbnbResult sbnb_solve(const MinlpInstance& instance, const SbnbOptions& options = {});

/// Same as sbnb_solve but throws InfeasibleError naming the binding user.
Schedule sbnb_schedule(const MinlpInstance& instance, const SbnbOptions& options = {});

struct BruteForceResult {
  bool feasible = false;
  Schedule schedule;
  double objective = -std::numeric_limits<double>::infinity();
};

/// Exhaustive enumeration of all 2^(K N M) tensors; throws std::invalid_argument when
/// K N M > 20. Ties keep the lowest enumeration index.
BruteForceResult brute_force_schedule(const MinlpInstance& instance);

/// Round-robin: cell (n, m) serves user (m mod ceil(K/N)) * N + n when it exists.
Schedule fixed_schedule(int users, int uavs, int slots);
Schedule fixed_schedule(const NetworkScenario& scenario);

/// Upper bound sum_m max_n log2(1 + P g / sigma^2) on a user's timeblock rate.
double user_rate_upper_bound(const MinlpInstance& instance, int k);

/// Text format: "risuav-minlp K N M", "power noise", gamma line, g line, c line.
void write_instance(std::ostream& out, const MinlpInstance& instance);
MinlpInstance read_instance(std::istream& in);

/// Synthetic instance with exponential fading on log-uniform gains; cross gains sit 10 dB
/// lower on average.
MinlpInstance random_instance(std::mt19937_64& rng, int users, int uavs, int slots, double gamma);

/// sBnB against exhaustive enumeration on random instances with K N M <= 12.
struct OracleReport {
  int instances = 0;
  int mismatches = 0;
  double max_gap = 0.0;  // |sbnb - brute force| over instances where both are feasible
  double seconds = 0.0;
  std::vector<std::string> failures;
};
OracleReport oracle_check(int instances, std::uint64_t seed, double tolerance = 1e-4);

}  // namespace risuav
