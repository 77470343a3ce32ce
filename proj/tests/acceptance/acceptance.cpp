// One PASS/FAIL line per acceptance criterion at desk scale.
// Usage: risuav_acceptance [criterion ...]   (all criteria when none is named)

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "risuav/orchestrator.hpp"
#include "risuav/wmmse.hpp"

using namespace risuav;

namespace {

constexpr int kTimeblocks = 100;
constexpr double kAlpha = 0.05;

struct Verdict {
  bool pass = false;
  std::string detail;
};

NetworkScenario desk() {
  return load_scenario(R"({
    "arrays": {"uav_rows": 4, "uav_cols": 4, "ris_rows": 4, "ris_cols": 4},
    "experiment": {"seed": 1, "timeblocks": 100}
  })");
}

std::vector<double> sum_rates(const std::vector<TimeblockResult>& r) {
  std::vector<double> out;
  for (const auto& x : r) out.push_back(x.sum_rate);
  return out;
}

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string describe_pair(const std::string& a, const std::string& b, const SignTest& t) {
  std::ostringstream s;
  s << a << ">" << b << " wins " << t.wins << "/" << t.wins + t.losses << " p=" << fmt("%.2g", t.p_value)
    << " diff=" << fmt("%.3f", t.mean_difference);
  return s.str();
}

// Diagnostic only: mean over the second half of the run, after the UAVs have settled.
double settled_mean(const std::vector<TimeblockResult>& r) {
  double total = 0.0;
  const std::size_t from = r.size() / 2;
  for (std::size_t i = from; i < r.size(); ++i) total += r[i].sum_rate;
  return total / static_cast<double>(r.size() - from);
}

// Significant increase from `lo` to `hi` in the paired sign test.
bool significant(const SignTest& t) { return t.mean_difference > 0.0 && t.p_value < kAlpha; }

// Monotone trend over a sweep: consecutive means never move against the trend, no step shows a
// significant reversal, and the end points differ significantly in the trend direction.
Verdict monotone_trend(const std::vector<SweepGroup>& groups, bool increasing) {
  std::ostringstream d;
  bool ok = true;
  auto oriented = [&](const std::vector<TimeblockResult>& a, const std::vector<TimeblockResult>& b) {
    return increasing ? paired_sign_test(sum_rates(b), sum_rates(a)) : paired_sign_test(sum_rates(a), sum_rates(b));
  };
  for (const auto& g : groups) d << axis_name(g.axis) << "=" << g.value << ":" << fmt("%.3f", mean_sum_rate(g.results)) << " ";
  for (std::size_t i = 1; i < groups.size(); ++i) {
    const SignTest forward = oriented(groups[i - 1].results, groups[i].results);
    const SignTest reverse = paired_sign_test(
        increasing ? sum_rates(groups[i - 1].results) : sum_rates(groups[i].results),
        increasing ? sum_rates(groups[i].results) : sum_rates(groups[i - 1].results));
    const bool step_ok = forward.mean_difference >= 0.0 && reverse.p_value >= kAlpha;
    ok = ok && step_ok;
    d << "| step " << groups[i - 1].value << "->" << groups[i].value << " wins " << forward.wins << "/"
      << forward.wins + forward.losses << " p=" << fmt("%.2g", forward.p_value) << (step_ok ? "" : " (reversed)")
      << " ";
  }
  const SignTest ends = oriented(groups.front().results, groups.back().results);
  ok = ok && significant(ends);
  d << "| ends p=" << fmt("%.2g", ends.p_value) << " | settled means";
  for (const auto& g : groups) d << " " << fmt("%.3f", settled_mean(g.results));
  return {ok, d.str()};
}

Verdict oracle() {
  const OracleReport rep = oracle_check(50, 2024);
  std::ostringstream d;
  d << rep.instances << " instances, mismatches " << rep.mismatches << ", max gap " << fmt("%.2g", rep.max_gap)
    << ", " << fmt("%.2f", rep.seconds) << " s";
  for (const auto& f : rep.failures) d << "; " << f;
  return {rep.mismatches == 0 && rep.seconds < 60.0, d.str()};
}

Verdict rate_wmmse() {
  const NetworkScenario base = desk();
  std::mt19937_64 rng(77);
  double worst = 0.0;
  int tuples = 0;
  for (int t = 0; tuples < 1000; ++t) {
    NetworkScenario s = base;
    s.seed = static_cast<std::uint64_t>(1000 + t);
    const TimeblockDraw draw = sample_timeblock(s, t, s.uav_init_pos);
    const ChannelSet ch = build_channels(s, draw, s.uav_init_pos);
    for (int rep = 0; rep < 10 && tuples < 1000; ++rep, ++tuples) {
      std::uniform_int_distribution<int> user(0, s.num_users - 1);
      const int k0 = user(rng);
      int k1 = user(rng);
      if (k1 == k0) k1 = (k0 + 1) % s.num_users;
      SlotLinks slot;
      slot.links = {{k0, 0}, {k1, 1}};
      if (rep % 5 == 4) slot.links.pop_back();  // interference-free tuples too
      const double modulus = 1.0 / std::sqrt(static_cast<double>(ch.antennas));
      for (std::size_t i = 0; i < slot.links.size(); ++i) slot.beams.push_back(random_unit_modulus(rng, ch.antennas, modulus));
      const cvec v = random_unit_modulus(rng, ch.stacked_size(), 1.0);
      const auto resp = link_responses(ch, slot, v);
      const auto E = compute_mse(resp, update_receiver(resp, s.power_w, s.noise_w), s.power_w, s.noise_w);
      Schedule x(s.num_users, s.num_uavs, 1);
      BeamPlan beams(s.num_users, s.num_uavs, 1, ch.antennas);
      for (std::size_t i = 0; i < slot.links.size(); ++i) {
        x.set(slot.links[i].first, slot.links[i].second, 0, true);
        beams.at(slot.links[i].first, slot.links[i].second, 0) = slot.beams[i];
      }
      PhasePlan ph;
      ph.v = {v};
      const RateReport r = evaluate_rates(ch, x, beams, ph, s.power_w, s.noise_w);
      for (std::size_t i = 0; i < slot.links.size(); ++i) {
        worst = std::max(worst, std::abs(std::log2(1.0 / E[i]) - r.link_rate[i]));
      }
    }
  }
  return {worst < 1e-9, std::to_string(tuples) + " tuples, max |log2(1/E) - rate| = " + fmt("%.3g", worst)};
}

// Grid search refined around the best cell until the step is far below the tolerance.
double grid_oracle(const MmProblem& p) {
  double best = 1e300;
  double a0 = 0.0;
  double c0 = 0.0;
  double step = 2.0 * kPi / 360.0;
  int half = 180;
  double ca = kPi;
  double cc = kPi;
  for (int level = 0; level < 5; ++level) {
    for (int i = -half; i <= half; ++i) {
      for (int j = -half; j <= half; ++j) {
        cvec x(2);
        x << std::polar(p.modulus, ca + i * step), std::polar(p.modulus, cc + j * step);
        const double f = p.objective(x);
        if (f < best) {
          best = f;
          a0 = ca + i * step;
          c0 = cc + j * step;
        }
      }
    }
    ca = a0;
    cc = c0;
    step /= 10.0;
    half = 10;
  }
  return best;
}

Verdict mm_descent() {
  const NetworkScenario base = desk();
  std::mt19937_64 rng(78);
  int violations = 0;
  long steps = 0;
  for (int t = 0; t < 100; ++t) {
    NetworkScenario s = base;
    s.seed = static_cast<std::uint64_t>(2000 + t);
    const ChannelSet ch = build_channels(s, sample_timeblock(s, t, s.uav_init_pos), s.uav_init_pos);
    SlotLinks slot;
    slot.links = {{t % 4, 0}, {(t + 1 + t / 4 % 3) % 4, 1}};
    const double modulus = 1.0 / std::sqrt(static_cast<double>(ch.antennas));
    for (std::size_t i = 0; i < slot.links.size(); ++i) slot.beams.push_back(random_unit_modulus(rng, ch.antennas, modulus));
    cvec v = random_unit_modulus(rng, ch.stacked_size(), 1.0);
    const JointTrace tr = joint_beam_ris(ch, slot, v, s.power_w, s.noise_w);
    for (const auto* block : {&tr.beam_mm, &tr.phase_mm}) {
      for (const auto& mm : *block) {
        for (std::size_t i = 1; i < mm.size(); ++i, ++steps) {
          if (mm[i] > mm[i - 1] + 1e-10 * std::max(1.0, std::abs(mm[i - 1]))) ++violations;
        }
      }
    }
  }
  double worst_gap = 0.0;
  std::normal_distribution<double> g(0.0, std::sqrt(0.5));
  for (int t = 0; t < 20; ++t) {
    MmProblem p;
    cmat X(2, 2);
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) X(i, j) = cd(g(rng), g(rng));
    }
    p.Q = X * X.adjoint();
    p.b = cvec(2);
    p.b << cd(g(rng), g(rng)), cd(g(rng), g(rng));
    p.modulus = t % 2 == 0 ? 1.0 / std::sqrt(2.0) : 1.0;
    p.prepare();
    double mm = 1e300;
    for (int start = 0; start < 4; ++start) {
      mm = std::min(mm, p.objective(mm_solve(p, random_unit_modulus(rng, 2, p.modulus), {1e-12, 100000}).x));
    }
    worst_gap = std::max(worst_gap, std::abs(mm - grid_oracle(p)));
  }
  std::ostringstream d;
  d << steps << " MM steps over 100 problems, " << violations << " increases; 2-variable gap to grid oracle "
    << fmt("%.2g", worst_gap);
  return {violations == 0 && worst_gap <= 1e-3, d.str()};
}

struct JointRun {
  std::vector<TimeblockResult> results;
  long updates = 0;
  std::vector<std::string> violations;
};

const JointRun& joint_run() {
  static const JointRun run = [] {
    JointRun r;
    const NetworkScenario s = desk();
    const UpdateHook hook = [&](const UpdateView& v) {
      ++r.updates;
      auto fail = [&](const std::string& what) {
        if (r.violations.size() < 5) r.violations.push_back(std::string(v.stage) + ": " + what);
      };
      if (auto why = v.schedule.violation()) fail(*why);
      if (v.beams.modulus_error() > 1e-9) fail("beam modulus");
      for (const auto& ph : v.phases.v) {
        for (Eigen::Index i = 0; i < ph.size(); ++i) {
          if (std::abs(std::abs(ph(i)) - 1.0) > 1e-9) fail("RIS modulus");
        }
      }
      for (std::size_t n = 0; n < v.positions.size(); ++n) {
        const double step = (v.positions[n] - v.p_pre[n]).norm();
        if (step > 1e-9 && std::abs(step - v.scenario.step_m) > 1e-9) fail("displacement");
        if (v.positions[n].z() < v.scenario.min_altitude_m) fail("altitude");
      }
    };
    r.results = run_experiment(s, Mode::joint, kTimeblocks, {}, hook);
    for (const auto& x : r.results) {
      if (x.feasible && x.min_rate < s.min_rate.front() - 1e-12) {
        r.violations.push_back("feasible timeblock " + std::to_string(x.timeblock) + " below gamma");
      }
    }
    return r;
  }();
  return run;
}

Verdict outer_monotone() {
  const JointRun& run = joint_run();
  int bad = 0;
  int iterations = 0;
  for (const auto& r : run.results) {
    iterations += r.iterations;
    for (std::size_t i = 1; i < r.trace.size(); ++i) {
      if (r.trace[i] < r.trace[i - 1]) {
        ++bad;
        break;
      }
    }
  }
  return {bad == 0, std::to_string(run.results.size()) + " timeblocks, " + std::to_string(iterations) +
                        " outer iterations, " + std::to_string(bad) + " decreasing traces"};
}

Verdict invariants() {
  const JointRun& run = joint_run();
  std::ostringstream d;
  d << run.updates << " block updates checked, " << run.violations.size() << " violations";
  for (const auto& v : run.violations) d << "; " << v;
  return {run.violations.empty() && run.updates > 0, d.str()};
}

Verdict fig3() {
  const auto started = std::chrono::steady_clock::now();
  const NetworkScenario s = desk();
  const auto& joint = joint_run().results;
  const auto fixed = run_experiment(s, Mode::fixed_sched, kTimeblocks);
  const auto nbr = run_experiment(s, Mode::no_beam_ris, kTimeblocks);
  const auto rnd = run_experiment(s, Mode::random, kTimeblocks);
  const SignTest a = paired_sign_test(sum_rates(joint), sum_rates(fixed));
  const SignTest b = paired_sign_test(sum_rates(fixed), sum_rates(nbr));
  const SignTest c = paired_sign_test(sum_rates(nbr), sum_rates(rnd));
  const double gap = mean_sum_rate(joint) / mean_sum_rate(fixed) - 1.0;
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  std::ostringstream d;
  d << "means joint " << fmt("%.3f", mean_sum_rate(joint)) << " fixed-sched " << fmt("%.3f", mean_sum_rate(fixed))
    << " no-beam-ris " << fmt("%.3f", mean_sum_rate(nbr)) << " random " << fmt("%.3f", mean_sum_rate(rnd)) << " | "
    << describe_pair("joint", "fixed", a) << " | " << describe_pair("fixed", "nbr", b) << " | "
    << describe_pair("nbr", "random", c) << " | gap " << fmt("%.1f", 100.0 * gap) << "% | baselines "
    << fmt("%.0f", seconds) << " s";
  const bool ok = significant(a) && significant(b) && significant(c) && gap >= 0.03 && gap <= 0.20;
  return {ok, d.str()};
}

Verdict fig5() {
  return monotone_trend(sweep(desk(), SweepAxis::num_ris, {0, 1, 2}, Mode::fixed_sched, kTimeblocks), true);
}

Verdict fig6() {
  return monotone_trend(sweep(desk(), SweepAxis::step_d, {1, 3, 5}, Mode::fixed_sched, kTimeblocks), false);
}

Verdict fig7() {
  const NetworkScenario s = desk();
  const auto none = sweep(s, SweepAxis::altitude, {15, 30}, Mode::no_ris, kTimeblocks);
  const auto joint = sweep(s, SweepAxis::altitude, {15, 30}, Mode::joint, kTimeblocks);
  const SignTest n = paired_sign_test(sum_rates(none[1].results), sum_rates(none[0].results));
  const SignTest j = paired_sign_test(sum_rates(joint[0].results), sum_rates(joint[1].results));
  std::ostringstream d;
  d << "no-ris 15m " << fmt("%.3f", mean_sum_rate(none[0].results)) << " 30m " << fmt("%.3f", mean_sum_rate(none[1].results))
    << " (" << describe_pair("30m", "15m", n) << ") | joint 15m " << fmt("%.3f", mean_sum_rate(joint[0].results))
    << " 30m " << fmt("%.3f", mean_sum_rate(joint[1].results)) << " (" << describe_pair("15m", "30m", j)
    << ") | settled joint 15m " << fmt("%.3f", settled_mean(joint[0].results)) << " 30m "
    << fmt("%.3f", settled_mean(joint[1].results));
  return {significant(n) && significant(j), d.str()};
}

Verdict blockage() {
  constexpr int kDraws = 10000;
  std::ostringstream d;
  bool ok = true;
  for (double xi : {15.0, 45.0, 75.0}) {
    const double z = 30.0;
    const double horizontal = z / std::tan(xi * kPi / 180.0);
    std::ostringstream cfg;
    cfg.precision(17);
    cfg << R"({"network": {"uavs": 1, "users": 1, "slots": 1, "ris": 0},
               "arrays": {"uav_rows": 1, "uav_cols": 1, "ris_rows": 1, "ris_cols": 1},
               "geometry": {"uav_init": [[0, 0, )" << z << R"(]], "users": [[)" << horizontal << R"(, 0, 0]], "ris": []},
               "experiment": {"seed": 5}})";
    const NetworkScenario s = load_scenario(cfg.str());
    int blocked = 0;
    for (int t = 0; t < kDraws; ++t) blocked += sample_timeblock(s, t, s.uav_init_pos).direct(0, 0).blocked ? 1 : 0;
    const double freq = static_cast<double>(blocked) / kDraws;
    const double expect = 1.0 - no_blockage_probability(elevation_deg(s.uav_init_pos[0], s.user_pos[0]));
    ok = ok && std::abs(freq - expect) <= 0.02;
    d << "xi=" << xi << " freq " << fmt("%.4f", freq) << " model " << fmt("%.4f", expect) << "; ";
  }
  return {ok, d.str()};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"oracle-equivalence", oracle},     {"rate-wmmse-identity", rate_wmmse},
      {"mm-descent", mm_descent},         {"outer-monotonicity", outer_monotone},
      {"update-invariants", invariants},  {"fig3-mode-ordering", fig3},
      {"fig5-ris-count-trend", fig5},     {"fig6-step-trend", fig6},
      {"fig7-altitude-trend", fig7},      {"blockage-monte-carlo", blockage},
  };
  std::set<std::string> only(argv + 1, argv + argc);
  for (const auto& name : only) {
    bool known = false;
    for (const auto& c : criteria) known = known || c.first == name;
    if (!known) {
      std::cerr << "unknown criterion: " << name << '\n';
      return 2;
    }
  }
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    if (!only.empty() && !only.count(name)) continue;
    const auto started = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    std::cout << (v.pass ? "PASS " : "FAIL ") << name << " [" << fmt("%.1f", seconds) << " s] " << v.detail
              << std::endl;
    failed += v.pass ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
