#include "risuav/orchestrator.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <iomanip>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "risuav/deployment.hpp"

namespace risuav {

std::string mode_name(Mode m) {
  switch (m) {
    case Mode::joint: return "joint";
    case Mode::fixed_sched: return "fixed-sched";
    case Mode::no_beam_ris: return "no-beam-ris";
    case Mode::no_deploy: return "no-deploy";
    case Mode::random: return "random";
    case Mode::no_ris: return "no-ris";
  }
  return "joint";
}

Mode parse_mode(const std::string& name) {
  for (Mode m : all_modes()) {
    if (mode_name(m) == name) return m;
  }
  throw std::invalid_argument("unknown mode: " + name);
}

const std::vector<Mode>& all_modes() {
  static const std::vector<Mode> modes = {Mode::joint,     Mode::fixed_sched, Mode::no_beam_ris,
                                          Mode::no_deploy, Mode::random,      Mode::no_ris};
  return modes;
}

ModeTraits mode_traits(Mode m) {
  ModeTraits t;
  switch (m) {
    case Mode::joint:
      t.deploy = t.schedule = t.beams = t.min_rate = true;
      break;
    case Mode::fixed_sched:
      t.deploy = t.beams = t.min_rate = true;
      break;
    case Mode::no_beam_ris:
      t.deploy = t.schedule = t.min_rate = t.random_beams = true;
      break;
    case Mode::no_deploy:
      t.beams = true;
      break;
    case Mode::random:
      t.random_beams = t.random_schedule = true;
      break;
    case Mode::no_ris:
      t.random_beams = t.zero_ris = true;
      break;
  }
  return t;
}

namespace {

Schedule permuted_fixed_schedule(const NetworkScenario& s, std::mt19937_64& rng) {
  std::vector<int> perm(static_cast<std::size_t>(s.num_users));
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  const Schedule base = fixed_schedule(s);
  Schedule out(s.num_users, s.num_uavs, s.num_slots);
  for (int m = 0; m < s.num_slots; ++m) {
    for (int n = 0; n < s.num_uavs; ++n) {
      const int k = base.user_of(n, m);
      if (k >= 0) out.set(perm[static_cast<std::size_t>(k)], n, m, true);
    }
  }
  return out;
}

bool meets_gamma(const NetworkScenario& s, const RateReport& rep) {
  for (int k = 0; k < s.num_users; ++k) {
    if (rep.per_user[static_cast<std::size_t>(k)] < s.gamma(k) - 1e-12) return false;
  }
  return true;
}

int failing_user(const NetworkScenario& s, const RateReport& rep) {
  int worst = -1;
  double margin = 0.0;
  for (int k = 0; k < s.num_users; ++k) {
    const double d = rep.per_user[static_cast<std::size_t>(k)] - s.gamma(k);
    if (d < margin - 1e-12) {
      margin = d;
      worst = k;
    }
  }
  return worst;
}

// Beams of unscheduled triples serve as the scheduler's candidates.
void refresh_candidate_beams(const ChannelSet& ch, const Schedule& x, BeamPlan& beams, const PhasePlan& phases) {
  for (int m = 0; m < x.slots(); ++m) {
    for (int n = 0; n < x.uavs(); ++n) {
      for (int k = 0; k < x.users(); ++k) {
        if (!x.at(k, n, m)) {
          beams.at(k, n, m) = phase_aligned_beam(effective_channel(ch, phases.v[static_cast<std::size_t>(m)], k, n));
        }
      }
    }
  }
}

template <class F>
void parallel_for(int count, int threads, F&& body) {
  const int workers = std::clamp(threads, 1, std::max(count, 1));
  if (workers == 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (int i = w; i < count; i += workers) body(i);
      } catch (...) {
        errors[static_cast<std::size_t>(w)] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

TimeblockOutcome optimize_timeblock(const NetworkScenario& scenario, const TimeblockDraw& draw_in, Mode mode,
                                    const OrchestratorOptions& opt, const UpdateHook& hook) {
  const auto started = std::chrono::steady_clock::now();
  const ModeTraits traits = mode_traits(mode);
  NetworkScenario s = scenario;
  TimeblockDraw draw = draw_in;
  if (traits.zero_ris) {
    s.num_ris = 0;
    s.ris_pos.clear();
    draw.num_ris = 0;
    draw.ris_user.clear();
    draw.uav_ris.clear();
  }
  const auto tb = static_cast<std::uint64_t>(draw.index);

  TimeblockOutcome out;
  out.positions = draw.uav_pos_pre;
  ChannelSet ch = build_channels(s, draw, out.positions);
  out.beams = BeamPlan(s.num_users, s.num_uavs, s.num_slots, s.antennas());
  if (traits.random_beams) {
    auto rng = link_rng(s.seed, tb, LinkKind::mode, 0, 0);
    const double modulus = 1.0 / std::sqrt(static_cast<double>(s.antennas()));
    for (auto& w : out.beams.w) w = random_unit_modulus(rng, s.antennas(), modulus);
    out.phases.v.clear();
    for (int m = 0; m < s.num_slots; ++m) out.phases.v.push_back(random_unit_modulus(rng, ch.stacked_size(), 1.0));
  } else {
    initialize_plans(ch, out.beams, out.phases);
  }
  if (traits.random_schedule) {
    auto rng = link_rng(s.seed, tb, LinkKind::mode, 1, 0);
    out.schedule = permuted_fixed_schedule(s, rng);
  } else {
    out.schedule = fixed_schedule(s);
  }

  auto report = [&] { return evaluate_rates(ch, out.schedule, out.beams, out.phases, s.power_w, s.noise_w); };
  auto notify = [&](const char* stage, double rate) {
    if (hook) hook({stage, s, draw.uav_pos_pre, out.positions, out.schedule, out.beams, out.phases, rate});
  };

  SbnbOptions sopt;
  sopt.tolerance = opt.sbnb_tolerance;
  sopt.max_nodes = opt.sbnb_max_nodes;

  RateReport rep = report();
  // A start point violating gamma is replaced by the scheduler's feasible choice when possible.
  if (traits.min_rate && traits.schedule && !meets_gamma(s, rep)) {
    if (!traits.random_beams) refresh_candidate_beams(ch, out.schedule, out.beams, out.phases);
    const SbnbResult r = sbnb_solve(make_instance(s, ch, out.beams, out.phases), sopt);
    if (r.feasible) {
      out.schedule = r.schedule;
      rep = report();
    }
  }
  notify("start", rep.sum_rate);

  TimeblockResult& res = out.result;
  res.mode = mode;
  res.seed = s.seed;
  res.timeblock = draw.index;
  res.trace.push_back(rep.sum_rate);

  const bool optimizes = traits.deploy || traits.schedule || traits.beams;
  for (int it = 0; optimizes && it < opt.max_iterations; ++it) {
    const double before = rep.sum_rate;
    if (traits.deploy) {
      best_deployment(s, draw, ch, out.positions, out.schedule, out.beams, out.phases, traits.min_rate);
      rep = report();
      notify("deployment", rep.sum_rate);
    }
    if (traits.schedule) {
      if (!traits.random_beams) refresh_candidate_beams(ch, out.schedule, out.beams, out.phases);
      sopt.incumbent = out.schedule;
      const MinlpInstance inst = make_instance(s, ch, out.beams, out.phases);
      MinlpInstance relaxed = inst;
      if (!traits.min_rate) std::fill(relaxed.gamma.begin(), relaxed.gamma.end(), 0.0);
      const SbnbResult r = sbnb_solve(relaxed, sopt);
      if (r.feasible && !(r.schedule == out.schedule)) {
        const Schedule previous = out.schedule;
        out.schedule = r.schedule;
        const RateReport candidate = report();
        const bool keeps_gamma = !traits.min_rate || meets_gamma(s, candidate) || !meets_gamma(s, rep);
        if (candidate.sum_rate >= rep.sum_rate && keeps_gamma) {
          rep = candidate;
        } else {
          out.schedule = previous;
        }
      }
      notify("scheduling", rep.sum_rate);
    }
    if (traits.beams) {
      // slots are independent; acceptance below runs in slot order so results match a serial run
      std::vector<SlotLinks> slots(static_cast<std::size_t>(s.num_slots));
      std::vector<cvec> v(static_cast<std::size_t>(s.num_slots));
      for (int m = 0; m < s.num_slots; ++m) {
        slots[static_cast<std::size_t>(m)] = slot_links(out.schedule, out.beams, m);
        v[static_cast<std::size_t>(m)] = out.phases.v[static_cast<std::size_t>(m)];
      }
      parallel_for(s.num_slots, opt.threads, [&](int m) {
        auto& slot = slots[static_cast<std::size_t>(m)];
        if (!slot.links.empty()) {
          joint_beam_ris(ch, slot, v[static_cast<std::size_t>(m)], s.power_w, s.noise_w, opt.wmmse);
        }
      });
      for (int m = 0; m < s.num_slots; ++m) {
        const SlotLinks& slot = slots[static_cast<std::size_t>(m)];
        if (slot.links.empty()) continue;
        BeamPlan trial = out.beams;
        for (std::size_t i = 0; i < slot.links.size(); ++i) {
          trial.at(slot.links[i].first, slot.links[i].second, m) = slot.beams[i];
        }
        PhasePlan trial_phases = out.phases;
        trial_phases.v[static_cast<std::size_t>(m)] = v[static_cast<std::size_t>(m)];
        const RateReport candidate = evaluate_rates(ch, out.schedule, trial, trial_phases, s.power_w, s.noise_w);
        const bool keeps_gamma = !traits.min_rate || meets_gamma(s, candidate) || !meets_gamma(s, rep);
        if (candidate.slot_rate[static_cast<std::size_t>(m)] >= rep.slot_rate[static_cast<std::size_t>(m)] &&
            keeps_gamma) {
          out.beams = std::move(trial);
          out.phases = std::move(trial_phases);
          rep = candidate;
        }
      }
      notify("beamforming", rep.sum_rate);
    }
    res.trace.push_back(rep.sum_rate);
    ++res.iterations;
    if (rep.sum_rate - before <= opt.tolerance * std::abs(before)) break;
  }

  res.sum_rate = rep.sum_rate;
  res.min_rate = rep.min_user_rate();
  if (traits.min_rate) {
    res.feasible = meets_gamma(s, rep);
    res.failing_user = res.feasible ? -1 : failing_user(s, rep);
  }
  if (opt.wall_clock) {
    res.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
  }
  return out;
}

std::vector<TimeblockResult> run_experiment(const NetworkScenario& s, Mode mode, int timeblocks,
                                            const OrchestratorOptions& opt, const UpdateHook& hook,
                                            const std::function<void(const TimeblockResult&)>& on_result) {
  if (timeblocks < 1) throw std::invalid_argument("run_experiment: timeblocks must be >= 1");
  std::vector<TimeblockResult> results;
  std::vector<Vec3> p_pre = s.uav_init_pos;
  const bool carries = mode_traits(mode).deploy;
  for (int tb = 0; tb < timeblocks; ++tb) {
    const TimeblockDraw draw = sample_timeblock(s, tb, p_pre);
    TimeblockOutcome o = optimize_timeblock(s, draw, mode, opt, hook);
    if (carries) p_pre = o.positions;
    if (on_result) on_result(o.result);
    results.push_back(std::move(o.result));
  }
  return results;
}

std::string axis_name(SweepAxis a) {
  switch (a) {
    case SweepAxis::num_ris: return "num_ris";
    case SweepAxis::step_d: return "step_d";
    case SweepAxis::altitude: return "altitude";
    case SweepAxis::power: return "power";
  }
  return "num_ris";
}

SweepAxis parse_axis(const std::string& name) {
  for (SweepAxis a : {SweepAxis::num_ris, SweepAxis::step_d, SweepAxis::altitude, SweepAxis::power}) {
    if (axis_name(a) == name) return a;
  }
  throw std::invalid_argument("unknown sweep axis: " + name);
}

NetworkScenario apply_axis(const NetworkScenario& base, SweepAxis axis, double value) {
  NetworkScenario s = base;
  switch (axis) {
    case SweepAxis::num_ris: {
      const int r = static_cast<int>(std::lround(value));
      if (r < 0 || static_cast<std::size_t>(r) > base.ris_candidates.size()) {
        throw ConfigError("num_ris value outside the candidate set");
      }
      std::vector<Vec3> pool = base.ris_candidates;
      auto rng = link_rng(base.seed, 0, LinkKind::mode, 2, 0);
      std::shuffle(pool.begin(), pool.end(), rng);
      s.num_ris = r;
      s.ris_pos.assign(pool.begin(), pool.begin() + r);
      break;
    }
    case SweepAxis::step_d:
      s.step_m = value;
      break;
    case SweepAxis::altitude:
      for (auto& p : s.uav_init_pos) p.z() = value;
      break;
    case SweepAxis::power:
      s.power_w = dbm_to_watts(value);
      break;
  }
  s.validate();
  return s;
}

std::vector<SweepGroup> sweep(const NetworkScenario& s, SweepAxis axis, const std::vector<double>& values, Mode mode,
                              int timeblocks, const OrchestratorOptions& opt) {
  std::vector<SweepGroup> groups;
  for (double v : values) {
    const NetworkScenario sv = apply_axis(s, axis, v);
    groups.push_back({axis, v, run_experiment(sv, mode, timeblocks, opt)});
  }
  return groups;
}

void write_csv_header(std::ostream& out, bool sweep_columns) {
  if (sweep_columns) out << "axis,value,";
  out << "mode,seed,timeblock,sum_rate,min_rate,iterations,feasible,wall_ms\n";
}

void write_csv_row(std::ostream& out, const TimeblockResult& r, const std::optional<SweepGroup>& group) {
  std::ostringstream line;
  line << std::setprecision(17);
  if (group) line << axis_name(group->axis) << ',' << group->value << ',';
  line << mode_name(r.mode) << ',' << r.seed << ',' << r.timeblock << ',' << r.sum_rate << ',' << r.min_rate << ','
       << r.iterations << ',' << (r.feasible ? 1 : 0) << ',' << std::setprecision(6) << r.wall_ms << '\n';
  out << line.str();
}

void write_results_csv(std::ostream& out, const std::vector<TimeblockResult>& results) {
  write_csv_header(out, false);
  for (const auto& r : results) write_csv_row(out, r);
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepGroup>& groups) {
  write_csv_header(out, true);
  for (const auto& g : groups) {
    for (const auto& r : g.results) write_csv_row(out, r, g);
  }
}

double mean_sum_rate(const std::vector<TimeblockResult>& results) {
  if (results.empty()) return 0.0;
  double total = 0.0;
  for (const auto& r : results) total += r.sum_rate;
  return total / static_cast<double>(results.size());
}

SignTest paired_sign_test(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("paired_sign_test: sample sizes differ");
  SignTest t;
  double total = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    total += d;
    if (d > 0.0) ++t.wins;
    if (d < 0.0) ++t.losses;
  }
  t.mean_difference = a.empty() ? 0.0 : total / static_cast<double>(a.size());
  const int n = t.wins + t.losses;
  if (n == 0) return t;
  // P(X >= wins), X ~ Binomial(n, 1/2)
  double p = 0.0;
  for (int x = t.wins; x <= n; ++x) {
    p += std::exp(std::lgamma(n + 1.0) - std::lgamma(x + 1.0) - std::lgamma(n - x + 1.0) - n * std::log(2.0));
  }
  t.p_value = std::min(1.0, p);
  return t;
}

}  // namespace risuav
