#include "risuav/scheduling.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <istream>
#include <limits>
#include <memory>
#include <numeric>
#include <ostream>
#include <queue>
#include <sstream>
#include <stdexcept>

#include "risuav/lp.hpp"

namespace risuav {

namespace {

constexpr double kIntTol = 1e-6;
// A dive restarts from a fresh LP once cuts have grown the tableau this much.
constexpr int kMaxDiveRows = 3;

struct Triple {
  int k, n, m;
};

std::vector<Triple> triples_of(const MinlpInstance& in) {
  std::vector<Triple> t(static_cast<std::size_t>(in.variables()));
  for (int m = 0; m < in.slots; ++m) {
    for (int n = 0; n < in.uavs; ++n) {
      for (int k = 0; k < in.users; ++k) t[in.var(k, n, m)] = {k, n, m};
    }
  }
  return t;
}

// Normalized interference coefficients of triple j: (variable, P c / sigma^2).
std::vector<std::pair<int, double>> interference_terms(const MinlpInstance& in, const Triple& t) {
  std::vector<std::pair<int, double>> out;
  for (int np = 0; np < in.uavs; ++np) {
    if (np == t.n) continue;
    for (int kp = 0; kp < in.users; ++kp) {
      if (kp == t.k) continue;
      const double a = in.pc(kp, t.k, np, t.m) / in.noise_w;
      if (a > 0.0) out.emplace_back(static_cast<int>(in.var(kp, np, t.m)), a);
    }
  }
  return out;
}

double normalized_si(const MinlpInstance& in, const Triple& t, const std::vector<double>& x) {
  double si = 1.0 + in.pg(t.k, t.n, t.m) / in.noise_w * x[in.var(t.k, t.n, t.m)];
  for (const auto& [j, a] : interference_terms(in, t)) si += a * x[static_cast<std::size_t>(j)];
  return si;
}

double normalized_interference(const MinlpInstance& in, const Triple& t, const std::vector<double>& x) {
  double s = 1.0;
  for (const auto& [j, a] : interference_terms(in, t)) s += a * x[static_cast<std::size_t>(j)];
  return s;
}

TangentCut tangent_at(const MinlpInstance& in, const Triple& t, int row, const std::vector<double>& x0) {
  const double si0 = normalized_si(in, t, x0);
  const double beta = 1.0 / (si0 * std::log(2.0));
  TangentCut cut;
  cut.row = row;
  const int own = static_cast<int>(in.var(t.k, t.n, t.m));
  const double own_coef = beta * in.pg(t.k, t.n, t.m) / in.noise_w;
  double dot = own_coef * x0[static_cast<std::size_t>(own)];
  if (own_coef != 0.0) cut.coef.emplace_back(own, own_coef);
  for (const auto& [j, a] : interference_terms(in, t)) {
    cut.coef.emplace_back(j, beta * a);
    dot += beta * a * x0[static_cast<std::size_t>(j)];
  }
  cut.offset = std::log2(si0) - dot;
  return cut;
}

double link_rate(const MinlpInstance& in, const Schedule& s, const Triple& t) {
  if (!s.at(t.k, t.n, t.m)) return 0.0;
  double interference = 0.0;
  for (int np = 0; np < in.uavs; ++np) {
    if (np == t.n) continue;
    for (int kp = 0; kp < in.users; ++kp) {
      if (kp != t.k && s.at(kp, np, t.m)) interference += in.pc(kp, t.k, np, t.m);
    }
  }
  return std::log2(1.0 + in.pg(t.k, t.n, t.m) / (interference + in.noise_w));
}

Schedule rounded(const MinlpInstance& in, const std::vector<double>& x) {
  Schedule s(in.users, in.uavs, in.slots);
  for (std::size_t j = 0; j < x.size(); ++j) s.set_flat(j, x[j] > 0.5);
  return s;
}

bool integral(const std::vector<double>& x) {
  return std::all_of(x.begin(), x.end(), [](double v) { return std::abs(v - std::round(v)) <= kIntTol; });
}

int hardest_user(const MinlpInstance& in) {
  int worst = 0;
  double worst_margin = std::numeric_limits<double>::infinity();
  for (int k = 0; k < in.users; ++k) {
    const double margin = user_rate_upper_bound(in, k) - in.gamma[static_cast<std::size_t>(k)];
    if (margin < worst_margin) {
      worst_margin = margin;
      worst = k;
    }
  }
  return worst;
}

}  // namespace

double MinlpInstance::h_lower(int, int, int) const { return std::log2(noise_w); }

double MinlpInstance::h_upper(int k, int n, int m) const {
  double total = noise_w;
  for (int np = 0; np < uavs; ++np) {
    if (np == n) continue;
    for (int kp = 0; kp < users; ++kp) {
      if (kp != k) total += pc(kp, k, np, m);
    }
  }
  return std::log2(total);
}

void MinlpInstance::validate() const {
  if (users < 1 || uavs < 1 || slots < 1) throw std::invalid_argument("minlp: counts must be positive");
  if (!(power_w > 0.0) || !(noise_w > 0.0)) throw std::invalid_argument("minlp: power and noise must be positive");
  const auto J = static_cast<std::size_t>(variables());
  if (g.size() != J) throw std::invalid_argument("minlp: g has wrong size");
  if (c.size() != J * static_cast<std::size_t>(users)) throw std::invalid_argument("minlp: c has wrong size");
  if (gamma.size() != static_cast<std::size_t>(users)) throw std::invalid_argument("minlp: gamma has wrong size");
  for (double v : g) {
    if (!std::isfinite(v) || v < 0.0) throw std::invalid_argument("minlp: gains must be finite and nonnegative");
  }
  for (double v : c) {
    if (!std::isfinite(v) || v < 0.0) throw std::invalid_argument("minlp: gains must be finite and nonnegative");
  }
}

MinlpInstance make_instance(const NetworkScenario& s, const ChannelSet& ch, const BeamPlan& beams,
                            const PhasePlan& phases) {
  MinlpInstance in;
  in.users = s.num_users;
  in.uavs = s.num_uavs;
  in.slots = s.num_slots;
  in.power_w = s.power_w;
  in.noise_w = s.noise_w;
  in.g.assign(static_cast<std::size_t>(in.variables()), 0.0);
  in.c.assign(static_cast<std::size_t>(in.variables() * in.users), 0.0);
  for (int m = 0; m < in.slots; ++m) {
    const LinkGains lg = link_gains(ch, beams, phases, m);
    for (int n = 0; n < in.uavs; ++n) {
      for (int k = 0; k < in.users; ++k) {
        in.g[in.var(k, n, m)] = lg.desired(k, n);
        for (int kp = 0; kp < in.users; ++kp) in.c[in.cross(kp, k, n, m)] = lg.cross(kp, k, n);
      }
    }
  }
  in.gamma.resize(static_cast<std::size_t>(in.users));
  for (int k = 0; k < in.users; ++k) in.gamma[static_cast<std::size_t>(k)] = s.gamma(k);
  return in;
}

std::vector<double> exact_user_rates(const MinlpInstance& in, const Schedule& s) {
  std::vector<double> rates(static_cast<std::size_t>(in.users), 0.0);
  for (const Triple& t : triples_of(in)) rates[static_cast<std::size_t>(t.k)] += link_rate(in, s, t);
  return rates;
}

double exact_objective(const MinlpInstance& in, const Schedule& s) {
  const auto rates = exact_user_rates(in, s);
  return std::accumulate(rates.begin(), rates.end(), 0.0);
}

bool meets_min_rate(const MinlpInstance& in, const Schedule& s, double tol) {
  const auto rates = exact_user_rates(in, s);
  for (int k = 0; k < in.users; ++k) {
    if (rates[static_cast<std::size_t>(k)] < in.gamma[static_cast<std::size_t>(k)] - tol) return false;
  }
  return true;
}

Secant secant_bound(double l, double u) {
  if (!(u > l)) throw std::invalid_argument("secant_bound: degenerate interval (u <= l), treat h as fixed");
  const double el = std::exp2(l);
  const double eu = std::exp2(u);
  return {(eu - el) / (u - l), -(l * eu - u * el) / (u - l)};
}

BnBNode BnBNode::root(const MinlpInstance& in) {
  BnBNode node;
  const auto J = static_cast<std::size_t>(in.variables());
  node.x_lo.assign(J, 0);
  node.x_hi.assign(J, 1);
  node.h_lo.assign(J, 0.0);
  node.h_hi.resize(J);
  for (const Triple& t : triples_of(in)) {
    node.h_hi[in.var(t.k, t.n, t.m)] = in.h_upper(t.k, t.n, t.m) - std::log2(in.noise_w);
  }
  return node;
}

namespace {

// Node relaxation LP that survives across a dive: children change variable bounds and
// append secant rows; tangent cuts stay valid everywhere and are kept.
class NodeLp {
 public:
  NodeLp(const MinlpInstance& in, const BnBNode& node) : in_(in), triples_(triples_of(in)), J_(in.variables()) {
    lp::Problem base;
    for (int j = 0; j < J_; ++j) base.add_variable(node.x_lo[j], node.x_hi[j], 0.0);
    for (int j = 0; j < J_; ++j) {
      const Triple& t = triples_[static_cast<std::size_t>(j)];
      double top = 1.0 + in.pg(t.k, t.n, t.m) / in.noise_w;
      for (const auto& term : interference_terms(in, t)) top += term.second;
      base.add_variable(0.0, std::log2(top), 1.0);
    }
    for (int j = 0; j < J_; ++j) base.add_variable(node.h_lo[j], node.h_hi[j], -1.0);

    for (int m = 0; m < in.slots; ++m) {
      for (int n = 0; n < in.uavs; ++n) {
        std::vector<std::pair<int, double>> row;
        for (int k = 0; k < in.users; ++k) row.emplace_back(static_cast<int>(in.var(k, n, m)), 1.0);
        base.add_row(std::move(row), lp::Sense::le, 1.0);
      }
      for (int k = 0; k < in.users; ++k) {
        std::vector<std::pair<int, double>> row;
        for (int n = 0; n < in.uavs; ++n) row.emplace_back(static_cast<int>(in.var(k, n, m)), 1.0);
        base.add_row(std::move(row), lp::Sense::le, 1.0);
      }
    }
    for (int k = 0; k < in.users; ++k) {
      std::vector<std::pair<int, double>> cover;
      std::vector<std::pair<int, double>> rate;
      for (int m = 0; m < in.slots; ++m) {
        for (int n = 0; n < in.uavs; ++n) {
          const int j = static_cast<int>(in.var(k, n, m));
          cover.emplace_back(j, 1.0);
          rate.emplace_back(d(j), 1.0);
          rate.emplace_back(h(j), -1.0);
        }
      }
      base.add_row(std::move(cover), lp::Sense::ge, 1.0);
      const double gk = in.gamma[static_cast<std::size_t>(k)];
      if (gk > 0.0) base.add_row(std::move(rate), lp::Sense::ge, gk);
    }
    for (int j = 0; j < J_; ++j) {
      secant_row(base, j, node.h_lo[j], node.h_hi[j]);
      const Triple& t = triples_[static_cast<std::size_t>(j)];
      const double own = std::log2(1.0 + in.pg(t.k, t.n, t.m) / in.noise_w);
      // d - h <= x log2(1 + P g / sigma^2): an unscheduled triple contributes nothing
      base.add_row({{d(j), 1.0}, {h(j), -1.0}, {j, -own}}, lp::Sense::le, 0.0);
    }

    cuts_ = node.cuts;
    if (cuts_.empty()) {
      std::vector<double> zero(static_cast<std::size_t>(J_), 0.0);
      for (int j = 0; j < J_; ++j) {
        cuts_.push_back(tangent_at(in, triples_[static_cast<std::size_t>(j)], j, zero));
        std::vector<double> unit = zero;
        unit[static_cast<std::size_t>(j)] = 1.0;
        cuts_.push_back(tangent_at(in, triples_[static_cast<std::size_t>(j)], j, unit));
      }
    }
    for (const TangentCut& cut : cuts_) cut_row(base, cut);
    base_rows_ = base.rows();
    solver_ = std::make_unique<lp::Solver>(std::move(base));
  }

  int rows() const { return solver_->rows(); }
  int base_rows() const { return base_rows_; }

  /// Moves the LP from `from` to the child box `to`.
  void descend(const BnBNode& from, const BnBNode& to) {
    for (int j = 0; j < J_; ++j) {
      const auto s = static_cast<std::size_t>(j);
      if (from.x_lo[s] != to.x_lo[s] || from.x_hi[s] != to.x_hi[s]) solver_->set_bounds(j, to.x_lo[s], to.x_hi[s]);
      if (from.h_lo[s] != to.h_lo[s] || from.h_hi[s] != to.h_hi[s]) {
        solver_->set_bounds(h(j), to.h_lo[s], to.h_hi[s]);
        secant_row(*solver_, j, to.h_lo[s], to.h_hi[s]);
      }
    }
  }

  Relaxation refine(const RelaxationOptions& opt) {
    Relaxation rel;
    for (int round = 0; round < opt.max_rounds; ++round) {
      const lp::Result res = solved_ ? solver_->resolve(opt.prune_below) : solver_->solve();
      solved_ = true;
      ++rel.lp_solves;
      if (res.status == lp::Status::infeasible) {
        rel.feasible = false;
        return rel;
      }
      if (res.status == lp::Status::cutoff) {
        rel.feasible = true;
        rel.objective = opt.prune_below;
        return rel;
      }
      if (res.status != lp::Status::optimal) {
        throw std::runtime_error(std::string("node relaxation: LP solver stopped with ") +
                                 (res.status == lp::Status::unbounded ? "unbounded" : "iteration limit") +
                                 " after " + std::to_string(res.iterations) + " iterations");
      }
      rel.feasible = true;
      rel.objective = res.objective;
      rel.x.assign(res.x.begin(), res.x.begin() + J_);
      rel.d.assign(res.x.begin() + J_, res.x.begin() + 2 * J_);
      rel.h.assign(res.x.begin() + 2 * J_, res.x.end());

      // Keep the cuts that bind at this LP optimum.
      rel.active_cuts.clear();
      for (const TangentCut& cut : cuts_) {
        double rhs = cut.offset;
        for (const auto& [j, a] : cut.coef) rhs += a * rel.x[static_cast<std::size_t>(j)];
        if (rel.d[static_cast<std::size_t>(cut.row)] >= rhs - 1e-7) rel.active_cuts.push_back(cut);
      }

      if (res.objective <= opt.prune_below) return rel;

      std::size_t added = 0;
      for (int j = 0; j < J_; ++j) {
        const Triple& t = triples_[static_cast<std::size_t>(j)];
        const double exact = std::log2(normalized_si(in_, t, rel.x));
        if (rel.d[static_cast<std::size_t>(j)] - exact > opt.cut_tolerance) {
          cuts_.push_back(tangent_at(in_, t, j, rel.x));
          cut_row(*solver_, cuts_.back());
          ++added;
        }
      }
      if (added == 0) {
        rel.refined = true;
        return rel;
      }
    }
    return rel;
  }

 private:
  int d(int j) const { return J_ + j; }
  int h(int j) const { return 2 * J_ + j; }

  template <class Sink>
  void secant_row(Sink& sink, int j, double lo, double hi) const {
    auto terms = interference_terms(in_, triples_[static_cast<std::size_t>(j)]);
    if (hi - lo > 1e-12) {
      // 2^h >= 1 + I(x) relaxed through the secant over the node's h box
      const Secant sec = secant_bound(lo, hi);
      terms.emplace_back(h(j), -sec.slope);
      sink.add_row(std::move(terms), lp::Sense::le, sec.intercept - 1.0);
    } else if (!terms.empty()) {
      sink.add_row(std::move(terms), lp::Sense::le, std::exp2(hi) - 1.0);
    }
  }

  template <class Sink>
  void cut_row(Sink& sink, const TangentCut& cut) const {
    std::vector<std::pair<int, double>> row;
    row.reserve(cut.coef.size() + 1);
    row.emplace_back(d(cut.row), 1.0);
    for (const auto& [j, a] : cut.coef) row.emplace_back(j, -a);
    sink.add_row(std::move(row), lp::Sense::le, cut.offset);
  }

  const MinlpInstance& in_;
  std::vector<Triple> triples_;
  int J_;
  std::vector<TangentCut> cuts_;
  std::unique_ptr<lp::Solver> solver_;
  int base_rows_ = 0;
  bool solved_ = false;
};

}  // namespace

Relaxation solve_node_relaxation(const MinlpInstance& in, const BnBNode& node, const RelaxationOptions& opt) {
  NodeLp lp(in, node);
  return lp.refine(opt);
}

std::pair<BnBNode, BnBNode> branch(const MinlpInstance& in, const BnBNode& node, const Relaxation& rel) {
  const int J = in.variables();
  int pick = -1;
  double best = kIntTol;
  for (int j = 0; j < J; ++j) {
    const double v = rel.x[static_cast<std::size_t>(j)];
    const double frac = std::min(v - std::floor(v), std::ceil(v) - v);
    if (frac > best + 1e-12) {
      best = frac;
      pick = j;
    }
  }
  BnBNode lo = node;
  BnBNode hi = node;
  lo.depth = hi.depth = node.depth + 1;
  lo.parent_bound = hi.parent_bound = rel.objective;
  lo.cuts = hi.cuts = rel.active_cuts;
  if (pick >= 0) {
    lo.x_hi[static_cast<std::size_t>(pick)] = 0;
    hi.x_lo[static_cast<std::size_t>(pick)] = 1;
    return {lo, hi};
  }

  // Continuous branch on the triple whose relaxed h underestimates log2(1 + I(x)) most.
  const auto triples = triples_of(in);
  pick = -1;
  double worst = 1e-9;
  for (int j = 0; j < J; ++j) {
    const double need = std::log2(normalized_interference(in, triples[static_cast<std::size_t>(j)], rel.x));
    const double gap = need - rel.h[static_cast<std::size_t>(j)];
    if (gap > worst) {
      worst = gap;
      pick = j;
    }
  }
  if (pick < 0) throw std::logic_error("branch: relaxed point is already integral and exact");
  const auto p = static_cast<std::size_t>(pick);
  const double l = node.h_lo[p];
  const double u = node.h_hi[p];
  double split = rel.h[p];
  const double margin = 0.05 * (u - l);
  if (split < l + margin || split > u - margin) split = 0.5 * (l + u);
  lo.h_hi[p] = split;
  hi.h_lo[p] = split;
  return {lo, hi};
}

double user_rate_upper_bound(const MinlpInstance& in, int k) {
  double total = 0.0;
  for (int m = 0; m < in.slots; ++m) {
    double best = 0.0;
    for (int n = 0; n < in.uavs; ++n) best = std::max(best, std::log2(1.0 + in.pg(k, n, m) / in.noise_w));
    total += best;
  }
  return total;
}

SbnbResult sbnb_solve(const MinlpInstance& in, const SbnbOptions& opt) {
  in.validate();
  SbnbResult out;
  out.schedule = Schedule(in.users, in.uavs, in.slots);
  for (int k = 0; k < in.users; ++k) {
    if (user_rate_upper_bound(in, k) < in.gamma[static_cast<std::size_t>(k)]) {
      out.infeasible_user = k;
      out.bound = -std::numeric_limits<double>::infinity();
      out.certified = true;
      return out;
    }
  }
  if (opt.incumbent && opt.incumbent->valid() && meets_min_rate(in, *opt.incumbent)) {
    out.feasible = true;
    out.schedule = *opt.incumbent;
    out.objective = exact_objective(in, *opt.incumbent);
  }

  struct Entry {
    double bound;
    long order;
    BnBNode node;
  };
  auto worse = [](const Entry& a, const Entry& b) {
    if (a.bound != b.bound) return a.bound < b.bound;
    return a.order > b.order;
  };
  std::priority_queue<Entry, std::vector<Entry>, decltype(worse)> heap(worse);
  long order = 0;
  heap.push({std::numeric_limits<double>::infinity(), order++, BnBNode::root(in)});

  auto consider = [&](const Schedule& s) {
    if (!s.valid() || !meets_min_rate(in, s)) return;
    const double value = exact_objective(in, s);
    if (!out.feasible || value > out.objective) {
      out.feasible = true;
      out.objective = value;
      out.schedule = s;
    }
  };

  auto cutoff_now = [&] {
    return out.feasible ? out.objective + opt.tolerance : -std::numeric_limits<double>::infinity();
  };
  const auto triples = triples_of(in);
  bool capped = false;

  while (!heap.empty() && !capped) {
    Entry top = heap.top();
    heap.pop();
    if (top.bound <= cutoff_now()) continue;

    // Plunge: re-optimize the warm LP along one child per level; siblings wait in the heap.
    NodeLp lp(in, top.node);
    BnBNode node = std::move(top.node);
    double inherited = top.bound;
    while (true) {
      if (out.nodes >= opt.max_nodes) {
        heap.push({inherited, order++, std::move(node)});
        capped = true;
        break;
      }
      ++out.nodes;
      const double cutoff = cutoff_now();
      RelaxationOptions ropt;
      ropt.prune_below = cutoff;
      const Relaxation rel = lp.refine(ropt);
      out.lp_solves += rel.lp_solves;
      if (opt.log && opt.log_every > 0 && out.nodes % opt.log_every == 0) {
        std::ostringstream line;
        line << "sbnb nodes=" << out.nodes << " bound=" << inherited << " incumbent=" << out.objective
             << " gap=" << (inherited - out.objective);
        opt.log(line.str());
      }
      if (!rel.feasible) break;
      const double bound = std::min(rel.objective, inherited);
      if (bound <= cutoff) break;

      std::optional<std::pair<BnBNode, BnBNode>> children;
      bool dive_high = false;
      if (integral(rel.x)) {
        consider(rounded(in, rel.x));
        if (bound <= cutoff_now()) break;
        // An integral point whose relaxation is exact and only fails the true rate check
        // cannot be refined further by branching on h; cut it off by fixing one x.
        bool exact = true;
        for (int j = 0; j < in.variables(); ++j) {
          const double need = std::log2(normalized_interference(in, triples[static_cast<std::size_t>(j)], rel.x));
          if (need - rel.h[static_cast<std::size_t>(j)] > 1e-9) {
            exact = false;
            break;
          }
        }
        if (exact && rel.refined) {
          int free_var = -1;
          for (int j = 0; j < in.variables(); ++j) {
            if (node.x_lo[static_cast<std::size_t>(j)] != node.x_hi[static_cast<std::size_t>(j)]) {
              free_var = j;
              break;
            }
          }
          if (free_var < 0) break;
          BnBNode a = node;
          BnBNode b = node;
          a.x_hi[static_cast<std::size_t>(free_var)] = 0;
          b.x_lo[static_cast<std::size_t>(free_var)] = 1;
          a.depth = b.depth = node.depth + 1;
          a.parent_bound = b.parent_bound = bound;
          a.cuts = b.cuts = rel.active_cuts;
          // the current point lies in one child; explore the other one next
          dive_high = rel.x[static_cast<std::size_t>(free_var)] < 0.5;
          children.emplace(std::move(a), std::move(b));
        }
      }
      if (!children) {
        children.emplace(branch(in, node, rel));
        const BnBNode& hi_child = children->second;
        for (int j = 0; j < in.variables(); ++j) {
          const auto s = static_cast<std::size_t>(j);
          if (hi_child.x_lo[s] != node.x_lo[s]) {
            dive_high = rel.x[s] >= 0.5;
            break;
          }
        }
      }
      BnBNode& next = dive_high ? children->second : children->first;
      BnBNode& other = dive_high ? children->first : children->second;
      heap.push({bound, order++, std::move(other)});
      if (lp.rows() > kMaxDiveRows * lp.base_rows()) {
        heap.push({bound, order++, std::move(next)});
        break;
      }
      lp.descend(node, next);
      node = std::move(next);
      inherited = bound;
    }
  }

  out.certified = heap.empty();
  double open = -std::numeric_limits<double>::infinity();
  if (!heap.empty()) open = heap.top().bound;
  out.bound = std::max(out.feasible ? out.objective : -std::numeric_limits<double>::infinity(), open);
  if (!out.feasible) out.infeasible_user = hardest_user(in);
  return out;
}

Schedule sbnb_schedule(const MinlpInstance& in, const SbnbOptions& opt) {
  SbnbResult r = sbnb_solve(in, opt);
  if (!r.feasible) {
    throw InfeasibleError("minimum rate unattainable for user " + std::to_string(r.infeasible_user),
                          r.infeasible_user);
  }
  return r.schedule;
}

BruteForceResult brute_force_schedule(const MinlpInstance& in) {
  in.validate();
  const int J = in.variables();
  if (J > 20) throw std::invalid_argument("brute_force_schedule: instance too large (K N M > 20)");
  BruteForceResult out;
  out.schedule = Schedule(in.users, in.uavs, in.slots);
  Schedule s(in.users, in.uavs, in.slots);
  const std::uint32_t total = 1u << J;
  for (std::uint32_t mask = 0; mask < total; ++mask) {
    for (int j = 0; j < J; ++j) s.set_flat(static_cast<std::size_t>(j), (mask >> j) & 1u);
    if (!s.valid() || !meets_min_rate(in, s)) continue;
    const double value = exact_objective(in, s);
    if (!out.feasible || value > out.objective) {
      out.feasible = true;
      out.objective = value;
      out.schedule = s;
    }
  }
  return out;
}

Schedule fixed_schedule(int users, int uavs, int slots) {
  if (users < 1 || uavs < 1 || slots < 1) throw std::invalid_argument("fixed_schedule: counts must be positive");
  const int cycle = (users + uavs - 1) / uavs;
  if (cycle > slots) throw std::invalid_argument("fixed_schedule: ceil(K/N) <= M violated");
  Schedule s(users, uavs, slots);
  for (int m = 0; m < slots; ++m) {
    for (int n = 0; n < uavs; ++n) {
      const int k = (m % cycle) * uavs + n;
      if (k < users) s.set(k, n, m, true);
    }
  }
  return s;
}

Schedule fixed_schedule(const NetworkScenario& s) { return fixed_schedule(s.num_users, s.num_uavs, s.num_slots); }

void write_instance(std::ostream& out, const MinlpInstance& in) {
  out.precision(17);
  out << "risuav-minlp " << in.users << ' ' << in.uavs << ' ' << in.slots << '\n';
  out << in.power_w << ' ' << in.noise_w << '\n';
  auto line = [&](const std::vector<double>& v) {
    for (std::size_t i = 0; i < v.size(); ++i) out << (i ? " " : "") << v[i];
    out << '\n';
  };
  line(in.gamma);
  line(in.g);
  line(in.c);
}

MinlpInstance read_instance(std::istream& is) {
  std::string tag;
  MinlpInstance in;
  if (!(is >> tag) || tag != "risuav-minlp") throw std::runtime_error("read_instance: missing risuav-minlp header");
  if (!(is >> in.users >> in.uavs >> in.slots >> in.power_w >> in.noise_w)) {
    throw std::runtime_error("read_instance: malformed header");
  }
  if (in.users < 1 || in.uavs < 1 || in.slots < 1) throw std::runtime_error("read_instance: bad counts");
  auto read = [&](std::vector<double>& v, std::size_t count) {
    v.resize(count);
    for (auto& x : v) {
      if (!(is >> x)) throw std::runtime_error("read_instance: truncated data");
    }
  };
  const auto J = static_cast<std::size_t>(in.variables());
  read(in.gamma, static_cast<std::size_t>(in.users));
  read(in.g, J);
  read(in.c, J * static_cast<std::size_t>(in.users));
  in.validate();
  return in;
}

MinlpInstance random_instance(std::mt19937_64& rng, int K, int N, int M, double gamma) {
  MinlpInstance in;
  in.users = K;
  in.uavs = N;
  in.slots = M;
  in.power_w = 1.0;
  in.noise_w = 1.0;
  std::exponential_distribution<double> fade(1.0);
  std::uniform_real_distribution<double> db(-1.0, 2.0);
  in.g.resize(static_cast<std::size_t>(K * N * M));
  in.c.resize(static_cast<std::size_t>(K * N * M * K));
  for (auto& v : in.g) v = fade(rng) * std::pow(10.0, db(rng));
  for (auto& v : in.c) v = fade(rng) * std::pow(10.0, db(rng) - 1.0);
  in.gamma.assign(static_cast<std::size_t>(K), gamma);
  return in;
}

OracleReport oracle_check(int instances, std::uint64_t seed, double tolerance) {
  static const int shapes[][3] = {{2, 2, 2}, {3, 2, 2}, {2, 1, 2}, {3, 1, 3}, {2, 3, 2},
                                  {4, 1, 3}, {2, 2, 3}, {4, 2, 1}, {3, 3, 1}, {1, 2, 3}};
  static const double gammas[] = {0.0, 0.2, 0.5, 1.0};
  std::mt19937_64 rng(seed);
  OracleReport rep;
  const auto start = std::chrono::steady_clock::now();
  for (int i = 0; i < instances; ++i) {
    const int* sh = shapes[i % 10];
    const MinlpInstance in = random_instance(rng, sh[0], sh[1], sh[2], gammas[(i / 10) % 4]);
    const SbnbResult r = sbnb_solve(in);
    const BruteForceResult b = brute_force_schedule(in);
    ++rep.instances;
    bool ok = r.feasible == b.feasible;
    if (ok && b.feasible) {
      const double gap = std::abs(r.objective - b.objective);
      rep.max_gap = std::max(rep.max_gap, gap);
      ok = gap <= tolerance && r.schedule.valid() && meets_min_rate(in, r.schedule);
    }
    if (!ok) {
      ++rep.mismatches;
      std::ostringstream msg;
      msg << "instance " << i << " (" << sh[0] << "," << sh[1] << "," << sh[2] << "): sbnb " << r.objective
          << " vs brute force " << b.objective;
      rep.failures.push_back(msg.str());
    }
  }
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

}  // namespace risuav
