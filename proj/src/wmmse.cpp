#include "risuav/wmmse.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace risuav {

SlotLinks slot_links(const Schedule& schedule, const BeamPlan& beams, int slot) {
  SlotLinks out;
  out.links = schedule.active(slot);
  for (const auto& [k, n] : out.links) out.beams.push_back(beams.at(k, n, slot));
  return out;
}

std::vector<cd> link_responses(const ChannelSet& ch, const SlotLinks& slot, const cvec& v) {
  const std::size_t L = slot.links.size();
  std::vector<cd> s(L * L);
  for (std::size_t i = 0; i < L; ++i) {
    for (std::size_t j = 0; j < L; ++j) {
      const crow row = effective_channel(ch, v, slot.links[i].first, slot.links[j].second);
      s[i * L + j] = (row * slot.beams[j])(0);
    }
  }
  return s;
}

namespace {

std::size_t link_count(const std::vector<cd>& responses) {
  const auto L = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(responses.size()))));
  if (L * L != responses.size()) throw std::invalid_argument("responses must be a square table");
  return L;
}

double interference_plus_noise(const std::vector<cd>& s, std::size_t L, std::size_t i, double P, double noise) {
  double phi = noise;
  for (std::size_t j = 0; j < L; ++j) {
    if (j != i) phi += P * std::norm(s[i * L + j]);
  }
  return phi;
}

}  // namespace

std::vector<double> compute_mse(const std::vector<cd>& s, const std::vector<cd>& u, double P, double noise) {
  const std::size_t L = link_count(s);
  const double rp = std::sqrt(P);
  std::vector<double> E(L);
  for (std::size_t i = 0; i < L; ++i) {
    const double phi = interference_plus_noise(s, L, i, P, noise);
    E[i] = std::norm(rp * u[i] * s[i * L + i] - 1.0) + std::norm(u[i]) * phi;
  }
  return E;
}

std::vector<cd> update_receiver(const std::vector<cd>& s, double P, double noise) {
  const std::size_t L = link_count(s);
  const double rp = std::sqrt(P);
  std::vector<cd> u(L);
  for (std::size_t i = 0; i < L; ++i) {
    const cd own = s[i * L + i];
    const double phi = interference_plus_noise(s, L, i, P, noise);
    u[i] = rp * std::conj(own) / (P * std::norm(own) + phi);
  }
  return u;
}

std::vector<double> update_weight(const std::vector<double>& E) {
  std::vector<double> g(E.size());
  for (std::size_t i = 0; i < E.size(); ++i) {
    if (!(E[i] > 0.0)) throw std::domain_error("update_weight: MSE must be positive");
    g[i] = 1.0 / E[i];
  }
  return g;
}

double wmmse_objective(const std::vector<double>& g, const std::vector<double>& E) {
  double total = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) total += g[i] * E[i] - std::log(g[i]);
  return total;
}

std::vector<double> link_rates(const std::vector<cd>& s, double P, double noise) {
  const std::size_t L = link_count(s);
  std::vector<double> r(L);
  for (std::size_t i = 0; i < L; ++i) {
    r[i] = std::log2(1.0 + P * std::norm(s[i * L + i]) / interference_plus_noise(s, L, i, P, noise));
  }
  return r;
}

void MmProblem::prepare() {
  if (Q.rows() != Q.cols() || Q.rows() != b.size()) throw std::invalid_argument("mm: dimension mismatch");
  const double scale = std::max(Q.cwiseAbs().maxCoeff(), 1e-300);
  if ((Q - Q.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw std::invalid_argument("mm: quadratic matrix is not Hermitian");
  }
  if (Q.rows() == 0) {
    lambda_max = 0.0;
    return;
  }
  const cmat sym = 0.5 * (Q + Q.adjoint());
  Eigen::SelfAdjointEigenSolver<cmat> eig(sym, Eigen::EigenvaluesOnly);
  // small margin keeps lambda I - Q PSD under rounding
  const double top = eig.eigenvalues().maxCoeff();
  lambda_max = top + 1e-9 * std::max(std::abs(top), scale);
}

double MmProblem::objective(const cvec& x) const {
  return (x.adjoint() * Q * x)(0).real() - 2.0 * x.dot(b).real();
}

double MmProblem::surrogate(const cvec& x, const cvec& x0) const {
  // x^H Q x <= lambda |x|^2 - 2 Re(x^H (lambda I - Q) x0) + x0^H (lambda I - Q) x0
  const cvec m = lambda_max * x0 - Q * x0;
  const double quad = lambda_max * x.squaredNorm() - 2.0 * x.dot(m).real() + x0.dot(m).real();
  return quad - 2.0 * x.dot(b).real();
}

MmResult mm_solve(const MmProblem& p, const cvec& x0, const MmOptions& opt) {
  if (x0.size() != p.b.size()) throw std::invalid_argument("mm: start point has wrong length");
  MmResult out;
  out.x = x0;
  double f = p.objective(out.x);
  out.trace.push_back(f);
  for (int it = 0; it < opt.max_iterations; ++it) {
    const cvec q = p.lambda_max * out.x - p.Q * out.x + p.b;
    cvec next(q.size());
    for (Eigen::Index t = 0; t < q.size(); ++t) {
      // zero entries of q leave the phase free; keep the current one
      next(t) = std::abs(q(t)) > 0.0 ? std::polar(p.modulus, std::arg(q(t))) : out.x(t);
    }
    const double fn = p.objective(next);
    out.x = next;
    out.trace.push_back(fn);
    ++out.iterations;
    const bool small = std::abs(f - fn) <= opt.tolerance * std::max(std::abs(f), 1e-300);
    f = fn;
    if (small) break;
  }
  return out;
}

MmProblem beam_problem(const ChannelSet& ch, const SlotLinks& slot, const cvec& v, const WmmseState& st, int j,
                       double P) {
  const auto L = slot.links.size();
  const int uav = slot.links[static_cast<std::size_t>(j)].second;
  MmProblem p;
  p.modulus = 1.0 / std::sqrt(static_cast<double>(ch.antennas));
  p.Q = cmat::Zero(ch.antennas, ch.antennas);
  p.b = cvec::Zero(ch.antennas);
  for (std::size_t i = 0; i < L; ++i) {
    const cvec c = effective_channel(ch, v, slot.links[i].first, uav).adjoint();
    p.Q.noalias() += (P * st.g[i] * std::norm(st.u[i])) * (c * c.adjoint());
    if (i == static_cast<std::size_t>(j)) p.b = std::sqrt(P) * st.g[i] * std::conj(st.u[i]) * c;
  }
  p.prepare();
  return p;
}

MmProblem ris_problem(const ChannelSet& ch, const SlotLinks& slot, const WmmseState& st, double P) {
  const auto L = slot.links.size();
  const int size = ch.stacked_size();
  MmProblem p;
  p.modulus = 1.0;
  p.Q = cmat::Zero(size, size);
  cvec ell = cvec::Zero(size);
  for (std::size_t i = 0; i < L; ++i) {
    const int k = slot.links[i].first;
    const crow& hr = ch.h_ris_stack[static_cast<std::size_t>(k)];
    const double weight = st.g[i] * P * std::norm(st.u[i]);
    for (std::size_t j = 0; j < L; ++j) {
      const int n = slot.links[j].second;
      // s_ij = a_ij + z_ij^T v
      const cvec z = hr.transpose().cwiseProduct(ch.g_stack[static_cast<std::size_t>(n)] * slot.beams[j]);
      const cd a = (ch.direct(k, n).adjoint() * slot.beams[j])(0);
      p.Q.noalias() += weight * (z.conjugate() * z.transpose());
      ell += weight * std::conj(a) * z;
      if (i == j) ell -= st.g[i] * std::sqrt(P) * st.u[i] * z;
    }
  }
  p.b = -ell.conjugate();
  p.prepare();
  return p;
}

namespace {

WmmseState refresh_state(const ChannelSet& ch, const SlotLinks& slot, const cvec& v, double P, double noise) {
  WmmseState st;
  const auto s = link_responses(ch, slot, v);
  st.u = update_receiver(s, P, noise);
  st.E = compute_mse(s, st.u, P, noise);
  st.g = update_weight(st.E);
  st.objective = wmmse_objective(st.g, st.E);
  return st;
}

double objective_at(const ChannelSet& ch, const SlotLinks& slot, const cvec& v, const WmmseState& st, double P,
                    double noise) {
  return wmmse_objective(st.g, compute_mse(link_responses(ch, slot, v), st.u, P, noise));
}

}  // namespace

JointTrace joint_beam_ris(const ChannelSet& ch, SlotLinks& slot, cvec& v, double P, double noise,
                          const JointOptions& opt) {
  JointTrace trace;
  if (slot.links.empty()) return trace;
  const bool phases = opt.optimize_phases && ch.stacked_size() > 0;
  WmmseState st = refresh_state(ch, slot, v, P, noise);
  double prev = st.objective;
  trace.objective.push_back(prev);
  for (int round = 0; round < opt.max_rounds; ++round) {
    if (round > 0) st = refresh_state(ch, slot, v, P, noise);
    if (opt.optimize_beams) {
      for (std::size_t j = 0; j < slot.links.size(); ++j) {
        const MmProblem p = beam_problem(ch, slot, v, st, static_cast<int>(j), P);
        MmResult r = mm_solve(p, slot.beams[j], opt.mm);
        slot.beams[j] = r.x;
        trace.beam_mm.push_back(std::move(r.trace));
      }
    }
    if (phases) {
      const MmProblem p = ris_problem(ch, slot, st, P);
      MmResult r = mm_solve(p, v, opt.mm);
      v = r.x;
      trace.phase_mm.push_back(std::move(r.trace));
    }
    const double now = objective_at(ch, slot, v, st, P, noise);
    trace.objective.push_back(now);
    ++trace.rounds;
    if (std::abs(prev - now) <= opt.tolerance * std::max(std::abs(prev), 1e-300)) {
      trace.converged = true;
      break;
    }
    prev = now;
  }
  return trace;
}

cvec random_unit_modulus(std::mt19937_64& rng, int length, double modulus) {
  std::uniform_real_distribution<double> ang(0.0, 2.0 * kPi);
  cvec x(length);
  for (int t = 0; t < length; ++t) x(t) = std::polar(modulus, ang(rng));
  return x;
}

void initialize_plans(const ChannelSet& ch, BeamPlan& beams, PhasePlan& phases) {
  for (int m = 0; m < beams.slots; ++m) {
    for (int n = 0; n < beams.uavs; ++n) {
      for (int k = 0; k < beams.users; ++k) beams.at(k, n, m) = phase_aligned_beam(ch.direct(k, n).adjoint());
    }
  }
  phases = PhasePlan::identity(beams.slots, ch.stacked_size());
}

}  // namespace risuav
