#include "doctest.h"

#include <cmath>
#include <random>

#include "risuav/wmmse.hpp"

using namespace risuav;

namespace {

cd cgauss(std::mt19937_64& rng, double sigma = 1.0) {
  std::normal_distribution<double> n(0.0, sigma / std::sqrt(2.0));
  return {n(rng), n(rng)};
}

std::vector<cd> random_responses(std::mt19937_64& rng, int L) {
  std::vector<cd> s(static_cast<std::size_t>(L * L));
  for (auto& v : s) v = cgauss(rng);
  return s;
}

cmat random_hermitian_psd(std::mt19937_64& rng, int n) {
  cmat X(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) X(i, j) = cgauss(rng);
  }
  return X * X.adjoint();
}

NetworkScenario desk_scenario(std::uint64_t seed) {
  NetworkScenario s = load_scenario(R"({"arrays": {"uav_rows": 4, "uav_cols": 4, "ris_rows": 4, "ris_cols": 4}})");
  s.seed = seed;
  return s;
}

}  // namespace

TEST_CASE("MSE special cases") {
  std::mt19937_64 rng(1);
  const auto s = random_responses(rng, 2);
  const auto E = compute_mse(s, {cd(0, 0), cd(0, 0)}, 2.0, 0.3);
  CHECK(E[0] == doctest::Approx(1.0));
  CHECK(E[1] == doctest::Approx(1.0));
  // perfect inversion without interference or noise
  const std::vector<cd> solo = {cd(0.3, -0.7)};
  const cd u = 1.0 / (std::sqrt(3.0) * solo[0]);
  CHECK(compute_mse(solo, {u}, 3.0, 0.0)[0] < 1e-28);
}

TEST_CASE("MSE matches a Monte-Carlo symbol/noise estimate") {
  std::mt19937_64 rng(2);
  const int L = 3;
  const auto s = random_responses(rng, L);
  const double P = 1.5;
  const double noise = 0.2;
  const auto u = update_receiver(s, P, noise);
  const auto E = compute_mse(s, u, P, noise);
  std::vector<double> acc(L, 0.0);
  const int draws = 100000;
  std::vector<cd> x(L);
  for (int t = 0; t < draws; ++t) {
    for (auto& xi : x) xi = cgauss(rng);
    for (int i = 0; i < L; ++i) {
      cd y = cgauss(rng, std::sqrt(noise));
      for (int j = 0; j < L; ++j) y += std::sqrt(P) * s[static_cast<std::size_t>(i * L + j)] * x[j];
      acc[i] += std::norm(u[i] * y - x[i]);
    }
  }
  for (int i = 0; i < L; ++i) CHECK(acc[i] / draws == doctest::Approx(E[i]).epsilon(0.01));
}

TEST_CASE("receiver update minimizes the MSE") {
  std::mt19937_64 rng(3);
  const auto s = random_responses(rng, 2);
  const double P = 0.8;
  const double noise = 0.1;
  const auto u = update_receiver(s, P, noise);
  const double best = compute_mse(s, u, P, noise)[0];
  // grid search around the optimum
  double grid = 1e300;
  for (int a = -200; a <= 200; ++a) {
    for (int b = -200; b <= 200; ++b) {
      const cd t = u[0] + cd(a * 0.005, b * 0.005);
      grid = std::min(grid, compute_mse(s, {t, u[1]}, P, noise)[0]);
    }
  }
  CHECK(best <= grid + 1e-12);
  // finite-difference gradient vanishes
  const double h = 1e-6;
  const double gr = (compute_mse(s, {u[0] + h, u[1]}, P, noise)[0] - compute_mse(s, {u[0] - h, u[1]}, P, noise)[0]) /
                    (2 * h);
  const double gi = (compute_mse(s, {u[0] + cd(0, h), u[1]}, P, noise)[0] -
                     compute_mse(s, {u[0] - cd(0, h), u[1]}, P, noise)[0]) /
                    (2 * h);
  CHECK(std::hypot(gr, gi) < 1e-6);
  // large noise drives the receiver to zero
  CHECK(std::abs(update_receiver(s, P, 1e12)[0]) < 1e-10);
}

TEST_CASE("weights are reciprocal MSEs") {
  CHECK(update_weight({0.5})[0] == 2.0);
  CHECK_THROWS_AS(update_weight({0.0}), std::domain_error);
  std::mt19937_64 rng(4);
  const auto s = random_responses(rng, 3);
  const auto E = compute_mse(s, update_receiver(s, 1.0, 0.5), 1.0, 0.5);
  const auto g = update_weight(E);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(g[i] * E[i] == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("rate equals log2 of the inverse MMSE on real channels") {
  double worst = 0.0;
  std::mt19937_64 rng(5);
  for (int t = 0; t < 50; ++t) {
    const NetworkScenario sc = desk_scenario(static_cast<std::uint64_t>(t + 1));
    const ChannelSet ch = build_channels(sc, sample_timeblock(sc, t, sc.uav_init_pos), sc.uav_init_pos);
    SlotLinks slot;
    slot.links = {{t % 4, 0}, {(t + 1) % 4, 1}};
    for (int i = 0; i < 2; ++i) slot.beams.push_back(random_unit_modulus(rng, ch.antennas, 0.25));
    const cvec v = random_unit_modulus(rng, ch.stacked_size(), 1.0);
    const auto s = link_responses(ch, slot, v);
    const auto E = compute_mse(s, update_receiver(s, sc.power_w, sc.noise_w), sc.power_w, sc.noise_w);
    const auto r = link_rates(s, sc.power_w, sc.noise_w);
    Schedule x(4, 2, 1);
    x.set(slot.links[0].first, 0, 0, true);
    x.set(slot.links[1].first, 1, 0, true);
    BeamPlan beams(4, 2, 1, ch.antennas);
    beams.at(slot.links[0].first, 0, 0) = slot.beams[0];
    beams.at(slot.links[1].first, 1, 0) = slot.beams[1];
    PhasePlan ph;
    ph.v = {v};
    const RateReport rep = evaluate_rates(ch, x, beams, ph, sc.power_w, sc.noise_w);
    for (int i = 0; i < 2; ++i) {
      worst = std::max(worst, std::abs(std::log2(1.0 / E[static_cast<std::size_t>(i)]) - r[static_cast<std::size_t>(i)]));
      worst = std::max(worst, std::abs(r[static_cast<std::size_t>(i)] - rep.link_rate[static_cast<std::size_t>(i)]));
    }
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("MM with a scaled-identity quadratic aligns with the linear term in one step") {
  MmProblem p;
  p.Q = cmat::Identity(1, 1) * 2.0;
  p.b = cvec::Constant(1, cd(0.3, -0.4));
  p.modulus = 1.0;
  p.prepare();
  const MmResult r = mm_solve(p, cvec::Constant(1, cd(-1, 0)), {1e-12, 5});
  CHECK(std::abs(std::arg(r.x(0)) - std::arg(p.b(0))) < 1e-12);
  CHECK(r.trace[1] <= r.trace[0]);

  // d = 0 and Q = lambda I: every unit-modulus point is a fixed point
  MmProblem flat;
  flat.Q = cmat::Identity(3, 3);
  flat.b = cvec::Zero(3);
  flat.prepare();
  std::mt19937_64 rng(6);
  const cvec x0 = random_unit_modulus(rng, 3, 1.0);
  const MmResult fr = mm_solve(flat, x0, {1e-12, 3});
  // the step is driven by the eigenvalue margin alone, so rounding moves phases by ~1e-7
  CHECK((fr.x - x0).norm() < 1e-6);
  CHECK(fr.trace.back() == doctest::Approx(fr.trace.front()).epsilon(1e-12));
}

TEST_CASE("MM descent, surrogate contact and eigenvalue bound") {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 100; ++t) {
    const int n = 2 + t % 15;
    MmProblem p;
    p.Q = random_hermitian_psd(rng, n);
    p.b = cvec(n);
    for (int i = 0; i < n; ++i) p.b(i) = cgauss(rng);
    p.modulus = (t % 2) ? 1.0 : 1.0 / std::sqrt(static_cast<double>(n));
    p.prepare();
    const cvec x0 = random_unit_modulus(rng, n, p.modulus);
    const MmResult r = mm_solve(p, x0, {1e-9, 1000});
    for (std::size_t i = 1; i < r.trace.size(); ++i) CHECK(r.trace[i] <= r.trace[i - 1] + 1e-10);
    CHECK(p.surrogate(x0, x0) == doctest::Approx(p.objective(x0)).epsilon(1e-10));
    const cvec y = random_unit_modulus(rng, n, p.modulus);
    CHECK(p.surrogate(y, x0) >= p.objective(y) - 1e-10 * std::max(1.0, std::abs(p.objective(y))));
    for (int k = 0; k < 10; ++k) {
      cvec z(n);
      for (int i = 0; i < n; ++i) z(i) = cgauss(rng);
      const double rq = (z.adjoint() * (p.lambda_max * cmat::Identity(n, n) - p.Q) * z)(0).real() / z.squaredNorm();
      CHECK(rq >= -1e-8);
    }
    for (Eigen::Index i = 0; i < r.x.size(); ++i) CHECK(std::abs(std::abs(r.x(i)) - p.modulus) < 1e-12);
  }
  MmProblem bad;
  bad.Q = cmat::Zero(2, 2);
  bad.Q(0, 1) = 1.0;
  bad.b = cvec::Zero(2);
  CHECK_THROWS_AS(bad.prepare(), std::invalid_argument);
}

TEST_CASE("MM reaches the phase-grid optimum on two-entry problems") {
  std::mt19937_64 rng(8);
  for (int t = 0; t < 20; ++t) {
    const bool beam = t % 2 == 0;
    const int grid = beam ? 64 : 360;
    MmProblem p;
    p.Q = random_hermitian_psd(rng, 2);
    p.b = cvec(2);
    p.b << cgauss(rng), cgauss(rng);
    p.modulus = beam ? 1.0 / std::sqrt(2.0) : 1.0;
    p.prepare();
    double best = 1e300;
    for (int a = 0; a < grid; ++a) {
      for (int c = 0; c < grid; ++c) {
        cvec x(2);
        x << std::polar(p.modulus, 2 * kPi * a / grid), std::polar(p.modulus, 2 * kPi * c / grid);
        best = std::min(best, p.objective(x));
      }
    }
    // best of a few starts guards against a local minimum of the two-phase landscape
    double mm = 1e300;
    for (int s = 0; s < 4; ++s) {
      mm = std::min(mm, p.objective(mm_solve(p, random_unit_modulus(rng, 2, p.modulus), {1e-12, 10000}).x));
    }
    CHECK(mm <= best + 1e-3);
    CHECK(mm >= best - 1e-3 * std::max(1.0, std::abs(best)) - 0.05);
  }
}

TEST_CASE("trace identity holds with the transposed Hadamard factor") {
  std::mt19937_64 rng(9);
  for (int t = 0; t < 20; ++t) {
    const int n = 5;
    const cmat A = random_hermitian_psd(rng, n);
    const cmat C = random_hermitian_psd(rng, n);
    const cvec v = random_unit_modulus(rng, n, 1.0);
    const cmat Theta = v.asDiagonal();
    const cd lhs = (Theta * A * Theta.adjoint() * C).trace();
    const cd rhs = (v.adjoint() * A.transpose().cwiseProduct(C) * v)(0);
    CHECK(std::abs(lhs - rhs) <= 1e-10 * std::abs(lhs));
  }
}

TEST_CASE("RIS block matches the weighted MSE and the trace-route assembly") {
  std::mt19937_64 rng(10);
  const NetworkScenario sc = desk_scenario(21);
  const ChannelSet ch = build_channels(sc, sample_timeblock(sc, 0, sc.uav_init_pos), sc.uav_init_pos);
  SlotLinks slot;
  slot.links = {{0, 0}, {3, 1}};
  for (int i = 0; i < 2; ++i) slot.beams.push_back(random_unit_modulus(rng, ch.antennas, 0.25));
  const cvec v0 = random_unit_modulus(rng, ch.stacked_size(), 1.0);
  WmmseState st;
  const auto s = link_responses(ch, slot, v0);
  st.u = update_receiver(s, sc.power_w, sc.noise_w);
  st.E = compute_mse(s, st.u, sc.power_w, sc.noise_w);
  st.g = update_weight(st.E);
  const MmProblem p = ris_problem(ch, slot, st, sc.power_w);

  const cvec v1 = random_unit_modulus(rng, ch.stacked_size(), 1.0);
  auto weighted = [&](const cvec& v) {
    const auto e = compute_mse(link_responses(ch, slot, v), st.u, sc.power_w, sc.noise_w);
    return st.g[0] * e[0] + st.g[1] * e[1];
  };
  const double lhs = p.objective(v1) - p.objective(v0);
  const double rhs = weighted(v1) - weighted(v0);
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-8));

  // quadratic part from Tr(Theta A Theta^H C) with A = (G w)(G w)^H and C = h^H h
  cmat Q = cmat::Zero(ch.stacked_size(), ch.stacked_size());
  for (std::size_t i = 0; i < 2; ++i) {
    const crow& h = ch.h_ris_stack[static_cast<std::size_t>(slot.links[i].first)];
    const cmat C = h.adjoint() * h;
    for (std::size_t j = 0; j < 2; ++j) {
      const cvec gw = ch.g_stack[static_cast<std::size_t>(slot.links[j].second)] * slot.beams[j];
      const cmat A = gw * gw.adjoint();
      Q += st.g[i] * sc.power_w * std::norm(st.u[i]) * A.transpose().cwiseProduct(C);
    }
  }
  CHECK((Q - p.Q).norm() <= 1e-10 * Q.norm());
}

TEST_CASE("beam block matches the weighted MSE") {
  std::mt19937_64 rng(11);
  const NetworkScenario sc = desk_scenario(22);
  const ChannelSet ch = build_channels(sc, sample_timeblock(sc, 1, sc.uav_init_pos), sc.uav_init_pos);
  SlotLinks slot;
  slot.links = {{1, 0}, {2, 1}};
  for (int i = 0; i < 2; ++i) slot.beams.push_back(random_unit_modulus(rng, ch.antennas, 0.25));
  const cvec v = random_unit_modulus(rng, ch.stacked_size(), 1.0);
  WmmseState st;
  const auto s = link_responses(ch, slot, v);
  st.u = update_receiver(s, sc.power_w, sc.noise_w);
  st.E = compute_mse(s, st.u, sc.power_w, sc.noise_w);
  st.g = update_weight(st.E);
  const MmProblem p = beam_problem(ch, slot, v, st, 1, sc.power_w);
  auto weighted = [&](const cvec& w) {
    SlotLinks other = slot;
    other.beams[1] = w;
    const auto e = compute_mse(link_responses(ch, other, v), st.u, sc.power_w, sc.noise_w);
    return st.g[0] * e[0] + st.g[1] * e[1];
  };
  const cvec w1 = random_unit_modulus(rng, ch.antennas, 0.25);
  CHECK(p.objective(w1) - p.objective(slot.beams[1]) ==
        doctest::Approx(weighted(w1) - weighted(slot.beams[1])).epsilon(1e-8));
}

TEST_CASE("single link without RIS converges to the phase-aligned beam rate") {
  std::mt19937_64 rng(12);
  NetworkScenario sc = desk_scenario(31);
  sc.num_ris = 0;
  sc.ris_pos.clear();
  const ChannelSet ch = build_channels(sc, sample_timeblock(sc, 0, sc.uav_init_pos), sc.uav_init_pos);
  SlotLinks slot;
  slot.links = {{2, 1}};
  slot.beams = {random_unit_modulus(rng, ch.antennas, 0.25)};
  cvec v(0);
  JointOptions opt;
  opt.tolerance = 1e-14;
  opt.mm = {1e-14, 10000};
  joint_beam_ris(ch, slot, v, sc.power_w, sc.noise_w, opt);
  const double rate = link_rates(link_responses(ch, slot, v), sc.power_w, sc.noise_w)[0];
  const crow h = ch.direct(2, 1).adjoint();
  const double closed = std::log2(1.0 + sc.power_w * std::pow(h.cwiseAbs().sum() * 0.25, 2) / sc.noise_w);
  CHECK(rate == doctest::Approx(closed).epsilon(1e-6));
}

TEST_CASE("joint rounds descend and beat random configurations") {
  std::mt19937_64 rng(13);
  for (int t = 0; t < 100; ++t) {
    const NetworkScenario sc = desk_scenario(static_cast<std::uint64_t>(100 + t));
    const ChannelSet ch = build_channels(sc, sample_timeblock(sc, t, sc.uav_init_pos), sc.uav_init_pos);
    SlotLinks slot;
    slot.links = {{t % 4, 0}, {(t + 2) % 4, 1}};
    SlotLinks random = slot;
    for (const auto& [k, n] : slot.links) {
      slot.beams.push_back(phase_aligned_beam(ch.direct(k, n).adjoint()));
      random.beams.push_back(random_unit_modulus(rng, ch.antennas, 0.25));
    }
    cvec v = cvec::Ones(ch.stacked_size());
    const cvec vr = random_unit_modulus(rng, ch.stacked_size(), 1.0);
    const JointTrace tr = joint_beam_ris(ch, slot, v, sc.power_w, sc.noise_w);
    for (std::size_t i = 1; i < tr.objective.size(); ++i) {
      CHECK(tr.objective[i] <= tr.objective[i - 1] + 1e-10 * std::abs(tr.objective[i - 1]));
    }
    for (const auto& mm : tr.beam_mm) {
      for (std::size_t i = 1; i < mm.size(); ++i) CHECK(mm[i] <= mm[i - 1] + 1e-10 * std::max(1.0, std::abs(mm[i - 1])));
    }
    for (const auto& mm : tr.phase_mm) {
      for (std::size_t i = 1; i < mm.size(); ++i) CHECK(mm[i] <= mm[i - 1] + 1e-10 * std::max(1.0, std::abs(mm[i - 1])));
    }
    for (const auto& w : slot.beams) {
      for (Eigen::Index i = 0; i < w.size(); ++i) CHECK(std::abs(std::abs(w(i)) - 0.25) < 1e-12);
    }
    for (Eigen::Index i = 0; i < v.size(); ++i) CHECK(std::abs(std::abs(v(i)) - 1.0) < 1e-12);
    auto total = [&](const SlotLinks& s, const cvec& ph) {
      const auto r = link_rates(link_responses(ch, s, ph), sc.power_w, sc.noise_w);
      return r[0] + r[1];
    };
    CHECK(total(slot, v) >= total(random, vr));
  }
}
