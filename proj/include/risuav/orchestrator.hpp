#pragma once

// Alternating optimization per timeblock, Monte-Carlo experiments and parameter sweeps.

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "risuav/channel.hpp"
#include "risuav/rate.hpp"
#include "risuav/scenario.hpp"
#include "risuav/scheduling.hpp"
#include "risuav/wmmse.hpp"

namespace risuav {

enum class Mode { joint, fixed_sched, no_beam_ris, no_deploy, random, no_ris };

std::string mode_name(Mode mode);
/// Throws std::invalid_argument for unknown names.
Mode parse_mode(const std::string& name);
const std::vector<Mode>& all_modes();

/// Which blocks a mode optimizes.
struct ModeTraits {
  bool deploy = false;
  bool schedule = false;   // sBnB
  bool beams = false;      // WMMSE/MM
  bool min_rate = false;   // gamma enforced
  bool random_beams = false;
  bool random_schedule = false;
  bool zero_ris = false;
};
ModeTraits mode_traits(Mode mode);

struct OrchestratorOptions {
  double tolerance = 1e-3;   // relative sum-rate gain that stops the outer loop
  int max_iterations = 1000;
  JointOptions wmmse;
  double sbnb_tolerance = 1e-4;
  long sbnb_max_nodes = 1000000;
  bool wall_clock = false;
  int threads = 1;  // workers for the per-slot beam/RIS problems
};

struct TimeblockResult {
  Mode mode = Mode::joint;
  std::uint64_t seed = 0;
  int timeblock = 0;
  double sum_rate = 0.0;
  double min_rate = 0.0;
  int iterations = 0;
  bool feasible = true;
  int failing_user = -1;
  double wall_ms = 0.0;
  std::vector<double> trace;  // sum-rate at the start and after every outer iteration
};

/// State exposed to the invariant hook after every block update.
struct UpdateView {
  const char* stage;
  const NetworkScenario& scenario;
  const std::vector<Vec3>& p_pre;
  const std::vector<Vec3>& positions;
  const Schedule& schedule;
  const BeamPlan& beams;
  const PhasePlan& phases;
  double sum_rate;
};
using UpdateHook = std::function<void(const UpdateView&)>;

struct TimeblockOutcome {
  std::vector<Vec3> positions;
  Schedule schedule;
  BeamPlan beams;
  PhasePlan phases;
  TimeblockResult result;
};

TimeblockOutcome optimize_timeblock(const NetworkScenario& scenario, const TimeblockDraw& draw, Mode mode,
                                    const OrchestratorOptions& options = {}, const UpdateHook& hook = {});

/// Runs `timeblocks` consecutive timeblocks, carrying UAV positions forward.
std::vector<TimeblockResult> run_experiment(const NetworkScenario& scenario, Mode mode, int timeblocks,
                                            const OrchestratorOptions& options = {}, const UpdateHook& hook = {},
                                            const std::function<void(const TimeblockResult&)>& on_result = {});

enum class SweepAxis { num_ris, step_d, altitude, power };
std::string axis_name(SweepAxis axis);
SweepAxis parse_axis(const std::string& name);

/// Scenario with one axis set to `value`. RIS counts take the first r entries of a seeded
/// permutation of the candidate set, so smaller sets are nested in larger ones.
NetworkScenario apply_axis(const NetworkScenario& base, SweepAxis axis, double value);

struct SweepGroup {
  SweepAxis axis;
  double value;
  std::vector<TimeblockResult> results;
};

std::vector<SweepGroup> sweep(const NetworkScenario& scenario, SweepAxis axis, const std::vector<double>& values,
                              Mode mode, int timeblocks, const OrchestratorOptions& options = {});

/// CSV rows: mode,seed,timeblock,sum_rate,min_rate,iterations,feasible,wall_ms
/// (sweeps prepend axis,value).
void write_csv_header(std::ostream& out, bool sweep_columns);
void write_csv_row(std::ostream& out, const TimeblockResult& r, const std::optional<SweepGroup>& group = {});
void write_results_csv(std::ostream& out, const std::vector<TimeblockResult>& results);
void write_sweep_csv(std::ostream& out, const std::vector<SweepGroup>& groups);

/// Mean of the sum-rate column.
double mean_sum_rate(const std::vector<TimeblockResult>& results);

/// One-sided paired sign test: probability of at least `wins` successes among the nonzero
/// differences under the null of a fair coin.
struct SignTest {
  int wins = 0;
  int losses = 0;
  double mean_difference = 0.0;
  double p_value = 1.0;
};
/// Tests a > b over paired samples.
SignTest paired_sign_test(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace risuav
