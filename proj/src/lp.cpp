#include "risuav/lp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace risuav::lp {

int Problem::add_variable(double lo, double hi, double cost) {
  if (!std::isfinite(lo)) throw std::invalid_argument("lp: lower bounds must be finite");
  if (hi < lo) throw std::invalid_argument("lp: empty variable range");
  lo_.push_back(lo);
  hi_.push_back(hi);
  cost_.push_back(cost);
  return static_cast<int>(lo_.size()) - 1;
}

void Problem::add_row(std::vector<std::pair<int, double>> coeffs, Sense sense, double rhs) {
  for (const auto& [j, a] : coeffs) {
    if (j < 0 || j >= variables()) throw std::out_of_range("lp: row references unknown variable");
    (void)a;
  }
  rows_.push_back({std::move(coeffs), sense, rhs});
}

double Problem::activity(int row, const std::vector<double>& x) const {
  double s = 0.0;
  for (const auto& [j, a] : rows_[static_cast<std::size_t>(row)].coeffs) s += a * x[static_cast<std::size_t>(j)];
  return s;
}

namespace {

enum class State : unsigned char { basic, at_lo, at_hi };

// Tableau over columns [structural | slack | artificial]; every row is an equality
// sum a x + s (+ sigma * art) = b with the slack bounded to encode the row sense.
class Tableau {
 public:
  Tableau(int rows, int cols) : m_(rows), n_(cols), t_(static_cast<std::size_t>(rows) * cols, 0.0) {}

  double& at(int i, int j) { return t_[static_cast<std::size_t>(i) * n_ + j]; }
  double at(int i, int j) const { return t_[static_cast<std::size_t>(i) * n_ + j]; }
  double* row(int i) { return t_.data() + static_cast<std::size_t>(i) * n_; }

  int m_;
  int n_;
  std::vector<double> t_;
};

class Simplex {
 public:
  Simplex(int rows, int cols, double tol) : tab_(rows, cols), beta_(rows), basis_(rows), tol_(tol) {
    lo_.resize(cols);
    hi_.resize(cols);
    state_.resize(cols, State::at_lo);
  }

  Tableau tab_;
  std::vector<double> beta_;
  std::vector<int> basis_;
  std::vector<double> lo_;
  std::vector<double> hi_;
  std::vector<State> state_;
  double tol_;
  int iterations_ = 0;

  double nonbasic_value(int j) const { return state_[j] == State::at_hi ? hi_[j] : lo_[j]; }

  // Returns optimal / unbounded / iteration_limit.
  Status run(const std::vector<double>& cost, int max_iterations) {
    const int m = tab_.m_;
    const int n = tab_.n_;
    std::vector<double> d(cost);
    auto refresh = [&] {
      d = cost;
      for (int i = 0; i < m; ++i) {
        const double cb = cost[basis_[i]];
        if (cb == 0.0) continue;
        const double* r = tab_.row(i);
        for (int j = 0; j < n; ++j) d[j] -= cb * r[j];
      }
    };
    refresh();
    int degenerate = 0;
    bool bland = false;
    while (true) {
      if (iterations_ >= max_iterations) return Status::iteration_limit;
      if (iterations_ % 50 == 49) refresh();

      int q = -1;
      double best = 0.0;
      for (int j = 0; j < n; ++j) {
        if (state_[j] == State::basic || hi_[j] - lo_[j] <= 0.0) continue;
        double gain = 0.0;
        if (state_[j] == State::at_lo && d[j] > tol_) gain = d[j];
        if (state_[j] == State::at_hi && d[j] < -tol_) gain = -d[j];
        if (gain <= 0.0) continue;
        if (bland) {
          q = j;
          break;
        }
        if (gain > best) {
          best = gain;
          q = j;
        }
      }
      if (q < 0) return Status::optimal;

      const double dir = state_[q] == State::at_lo ? 1.0 : -1.0;
      double step = hi_[q] - lo_[q];
      int leave = -1;
      bool leave_to_hi = false;
      double leave_pivot = 0.0;
      for (int i = 0; i < m; ++i) {
        const double alpha = tab_.at(i, q) * dir;
        if (std::abs(alpha) <= 1e-11) continue;
        const int b = basis_[i];
        double limit;
        bool to_hi;
        if (alpha > 0.0) {
          limit = (beta_[i] - lo_[b]) / alpha;
          to_hi = false;
        } else {
          if (!std::isfinite(hi_[b])) continue;
          limit = (hi_[b] - beta_[i]) / -alpha;
          to_hi = true;
        }
        limit = std::max(limit, 0.0);
        const bool better = limit < step - 1e-12 ||
                            (limit <= step + 1e-12 && leave >= 0 &&
                             (bland ? b < basis_[leave] : std::abs(alpha) > std::abs(leave_pivot)));
        if (better) {
          step = limit;
          leave = i;
          leave_to_hi = to_hi;
          leave_pivot = alpha;
        }
      }
      if (!std::isfinite(step)) return Status::unbounded;
      ++iterations_;

      // Bland's rule stays on once stalling is detected; switching back can cycle.
      if (step <= 1e-12) {
        if (++degenerate > 40) bland = true;
      } else {
        degenerate = 0;
      }

      for (int i = 0; i < m; ++i) {
        const double a = tab_.at(i, q);
        if (a != 0.0) beta_[i] -= a * dir * step;
      }
      if (leave < 0) {
        state_[q] = state_[q] == State::at_lo ? State::at_hi : State::at_lo;
        continue;
      }

      const double entering_value = nonbasic_value(q) + dir * step;
      const int out = basis_[leave];
      state_[out] = leave_to_hi ? State::at_hi : State::at_lo;
      state_[q] = State::basic;
      basis_[leave] = q;
      beta_[leave] = entering_value;

      double* pr = tab_.row(leave);
      const double piv = pr[q];
      for (int j = 0; j < n; ++j) pr[j] /= piv;
      pr[q] = 1.0;
      for (int i = 0; i < m; ++i) {
        if (i == leave) continue;
        double* ri = tab_.row(i);
        const double f = ri[q];
        if (f == 0.0) continue;
        for (int j = 0; j < n; ++j) ri[j] -= f * pr[j];
        ri[q] = 0.0;
      }
      const double fd = d[q];
      if (fd != 0.0) {
        for (int j = 0; j < n; ++j) d[j] -= fd * pr[j];
        d[q] = 0.0;
      }
    }
  }
};

Result two_phase(const Problem& problem, const Options& options) {
  const int nv = problem.variables();
  const int m = problem.rows();
  // Normalize every row to "<=" or "=" with a nonnegative slack.
  std::vector<double> b(static_cast<std::size_t>(m));
  std::vector<double> sign(static_cast<std::size_t>(m), 1.0);
  std::vector<double> r(static_cast<std::size_t>(m));
  int artificials = 0;
  for (int i = 0; i < m; ++i) {
    const Sense sense = problem.sense(i);
    sign[i] = sense == Sense::ge ? -1.0 : 1.0;
    b[i] = sign[i] * problem.rhs(i);
    double act = 0.0;
    for (const auto& [j, a] : problem.coefficients(i)) act += sign[i] * a * problem.lower(j);
    r[i] = b[i] - act;
    const double slack_hi = sense == Sense::eq ? 0.0 : kInf;
    if (r[i] < -options.tolerance || r[i] > slack_hi + options.tolerance) ++artificials;
  }

  const int ncols = nv + m + artificials;
  Simplex sx(m, ncols, options.tolerance);
  for (int j = 0; j < nv; ++j) {
    sx.lo_[j] = problem.lower(j);
    sx.hi_[j] = problem.upper(j);
  }
  std::vector<double> phase1(static_cast<std::size_t>(ncols), 0.0);
  int art = nv + m;
  for (int i = 0; i < m; ++i) {
    const Sense sense = problem.sense(i);
    const int slack = nv + i;
    sx.lo_[slack] = 0.0;
    sx.hi_[slack] = sense == Sense::eq ? 0.0 : kInf;
    const bool needs_art = r[i] < -options.tolerance || r[i] > sx.hi_[slack] + options.tolerance;
    const double s = needs_art ? (r[i] < 0.0 ? -1.0 : 1.0) : 1.0;
    double* tr = sx.tab_.row(i);
    for (const auto& [j, a] : problem.coefficients(i)) tr[j] += s * sign[i] * a;
    tr[slack] = s;
    if (needs_art) {
      sx.lo_[art] = 0.0;
      sx.hi_[art] = kInf;
      tr[art] = 1.0;
      sx.basis_[i] = art;
      sx.state_[art] = State::basic;
      sx.state_[slack] = State::at_lo;
      sx.beta_[i] = std::abs(r[i]);
      phase1[art] = -1.0;
      ++art;
    } else {
      sx.basis_[i] = slack;
      sx.state_[slack] = State::basic;
      sx.beta_[i] = std::max(r[i], 0.0);
    }
  }

  Result result;
  if (artificials > 0) {
    const Status s1 = sx.run(phase1, options.max_iterations);
    if (s1 == Status::iteration_limit) {
      result.status = s1;
      result.iterations = sx.iterations_;
      return result;
    }
    double infeasibility = 0.0;
    for (int i = 0; i < m; ++i) {
      if (sx.basis_[i] >= nv + m) infeasibility += sx.beta_[i];
    }
    if (infeasibility > 1e-7) {
      result.status = Status::infeasible;
      result.iterations = sx.iterations_;
      return result;
    }
    for (int j = nv + m; j < ncols; ++j) sx.hi_[j] = 0.0;
    for (int j = nv + m; j < ncols; ++j) {
      if (sx.state_[j] == State::at_hi) sx.state_[j] = State::at_lo;
    }
  }

  std::vector<double> phase2(static_cast<std::size_t>(ncols), 0.0);
  for (int j = 0; j < nv; ++j) phase2[j] = problem.cost(j);
  const Status s2 = sx.run(phase2, options.max_iterations);
  result.status = s2;
  result.iterations = sx.iterations_;
  if (s2 != Status::optimal) return result;

  result.x.resize(static_cast<std::size_t>(nv));
  for (int j = 0; j < nv; ++j) {
    if (sx.state_[j] != State::basic) result.x[j] = sx.nonbasic_value(j);
  }
  for (int i = 0; i < m; ++i) {
    if (sx.basis_[i] < nv) result.x[static_cast<std::size_t>(sx.basis_[i])] = sx.beta_[i];
  }
  for (int j = 0; j < nv; ++j) {
    result.x[j] = std::clamp(result.x[j], problem.lower(j), problem.upper(j));
  }
  result.objective = 0.0;
  for (int j = 0; j < nv; ++j) result.objective += problem.cost(j) * result.x[j];
  return result;
}


// Deterministic value in [0, 1) per column for the cost perturbation.
double jitter(int j) {
  std::uint64_t h = static_cast<std::uint64_t>(j) * 0x9E3779B97F4A7C15ull + 0x632BE59BD9B4E019ull;
  h ^= h >> 31;
  h *= 0xBF58476D1CE4E5B9ull;
  h ^= h >> 29;
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

constexpr double kPivotTol = 1e-9;
constexpr double kPerturb = 1e-7;
constexpr long kRebuildAfter = 5000;

}  // namespace

void Problem::set_bounds(int var, double lo, double hi) {
  if (var < 0 || var >= variables()) throw std::out_of_range("lp: unknown variable");
  if (!std::isfinite(lo)) throw std::invalid_argument("lp: lower bounds must be finite");
  if (hi < lo) throw std::invalid_argument("lp: empty variable range");
  lo_[static_cast<std::size_t>(var)] = lo;
  hi_[static_cast<std::size_t>(var)] = hi;
}

Result Problem::maximize(const Options& options) const { return Solver(*this, options).solve(); }

Solver::Solver(Problem problem, Options options) : problem_(std::move(problem)), opt_(options) {}

double Solver::value(int col) const {
  return state_[static_cast<std::size_t>(col)] == State::at_hi ? hi_[static_cast<std::size_t>(col)]
                                                                : lo_[static_cast<std::size_t>(col)];
}

bool Solver::build() {
  nv_ = problem_.variables();
  const int m = problem_.rows();
  const int n = nv_ + m;
  t_.assign(static_cast<std::size_t>(m), std::vector<double>(static_cast<std::size_t>(n), 0.0));
  beta_.assign(static_cast<std::size_t>(m), 0.0);
  basis_.assign(static_cast<std::size_t>(m), 0);
  state_.assign(static_cast<std::size_t>(n), State::at_lo);
  lo_.assign(static_cast<std::size_t>(n), 0.0);
  hi_.assign(static_cast<std::size_t>(n), kInf);
  sign_.assign(static_cast<std::size_t>(m), 1.0);
  cost_.assign(static_cast<std::size_t>(n), 0.0);
  for (int j = 0; j < nv_; ++j) {
    lo_[j] = problem_.lower(j);
    hi_[j] = problem_.upper(j);
    cost_[j] = problem_.cost(j);
    // nonbasic at the bound the cost prefers, so the slack basis is dual feasible
    if (cost_[j] > 0.0) {
      if (!std::isfinite(hi_[j])) return false;
      state_[j] = State::at_hi;
    }
  }
  for (int i = 0; i < m; ++i) {
    const int slack = nv_ + i;
    sign_[i] = problem_.sense(i) == Sense::ge ? -1.0 : 1.0;
    hi_[slack] = problem_.sense(i) == Sense::eq ? 0.0 : kInf;
    auto& row = t_[static_cast<std::size_t>(i)];
    double rest = sign_[i] * problem_.rhs(i);
    for (const auto& [j, a] : problem_.coefficients(i)) {
      row[static_cast<std::size_t>(j)] += sign_[i] * a;
      rest -= sign_[i] * a * value(j);
    }
    row[static_cast<std::size_t>(slack)] = 1.0;
    basis_[i] = slack;
    state_[slack] = State::basic;
    beta_[i] = rest;
  }
  since_build_ = 0;
  return true;
}

void Solver::compute_reduced_costs(const std::vector<double>& costs) {
  d_ = costs;
  for (std::size_t i = 0; i < t_.size(); ++i) {
    const double cb = costs[static_cast<std::size_t>(basis_[i])];
    if (cb == 0.0) continue;
    const auto& row = t_[i];
    for (std::size_t j = 0; j < row.size(); ++j) d_[j] -= cb * row[j];
  }
}

void Solver::perturb() {
  // Widens every nonbasic reduced cost away from zero; breaks dual degeneracy.
  work_ = cost_;
  for (std::size_t j = 0; j < work_.size(); ++j) {
    if (state_[j] == State::basic || hi_[j] - lo_[j] <= 0.0) continue;
    const double delta = kPerturb * (1.0 + std::abs(cost_[j])) * (1.0 + jitter(static_cast<int>(j)));
    work_[j] += state_[j] == State::at_lo ? -delta : delta;
  }
  compute_reduced_costs(cost_);
  true_d_ = d_;
  compute_reduced_costs(work_);
}

double Solver::dual_bound() const {
  // Any point satisfying the rows has c x = z + sum over nonbasic of d_j (x_j - x_j0).
  double z = 0.0;
  for (std::size_t j = 0; j < state_.size(); ++j) {
    if (state_[j] == State::basic) continue;
    z += cost_[j] * value(static_cast<int>(j));
    const double wrong = state_[j] == State::at_lo ? true_d_[j] : -true_d_[j];
    if (wrong > 0.0 && hi_[j] > lo_[j]) z += wrong * (hi_[j] - lo_[j]);
  }
  for (std::size_t i = 0; i < basis_.size(); ++i) z += cost_[static_cast<std::size_t>(basis_[i])] * beta_[i];
  return z;
}

void Solver::pivot(int r, int q) {
  auto& pr = t_[static_cast<std::size_t>(r)];
  const double piv = pr[static_cast<std::size_t>(q)];
  for (double& v : pr) v /= piv;
  pr[static_cast<std::size_t>(q)] = 1.0;
  for (std::size_t i = 0; i < t_.size(); ++i) {
    if (static_cast<int>(i) == r) continue;
    auto& ri = t_[i];
    const double f = ri[static_cast<std::size_t>(q)];
    if (f == 0.0) continue;
    for (std::size_t j = 0; j < ri.size(); ++j) ri[j] -= f * pr[j];
    ri[static_cast<std::size_t>(q)] = 0.0;
  }
  for (auto* d : {&d_, &true_d_}) {
    if (d->size() != pr.size()) continue;
    const double fd = (*d)[static_cast<std::size_t>(q)];
    if (fd == 0.0) continue;
    for (std::size_t j = 0; j < d->size(); ++j) (*d)[j] -= fd * pr[j];
    (*d)[static_cast<std::size_t>(q)] = 0.0;
  }
}

Status Solver::dual(double stop_below) {
  const int m = static_cast<int>(t_.size());
  const int n = static_cast<int>(lo_.size());
  const double tol = opt_.tolerance;
  while (true) {
    if (iterations_ >= opt_.max_iterations) return Status::iteration_limit;
    if (std::isfinite(stop_below) && dual_bound() <= stop_below) return Status::cutoff;

    int r = -1;
    double worst = tol;
    bool up = false;
    for (int i = 0; i < m; ++i) {
      const int b = basis_[i];
      const double below = lo_[b] - beta_[i];
      const double above = beta_[i] - hi_[b];
      const double scale = 1.0 + std::abs(beta_[i]) * 1e-3;
      if (below > worst * scale) {
        worst = below / scale;
        r = i;
        up = true;
      } else if (above > worst * scale) {
        worst = above / scale;
        r = i;
        up = false;
      }
    }
    if (r < 0) return Status::optimal;

    // Harris two-pass ratio test on the reduced costs.
    const auto& row = t_[static_cast<std::size_t>(r)];
    double bound = kInf;
    for (int j = 0; j < n; ++j) {
      if (state_[j] == State::basic || hi_[j] - lo_[j] <= 0.0) continue;
      const double dir = state_[j] == State::at_lo ? 1.0 : -1.0;
      const double effect = (up ? -row[j] : row[j]) * dir;
      if (effect <= kPivotTol) continue;
      const double slack = std::max(-d_[j] * dir, 0.0);
      bound = std::min(bound, (slack + tol) / effect);
    }
    if (!std::isfinite(bound)) return Status::infeasible;
    int q = -1;
    double best = 0.0;
    for (int j = 0; j < n; ++j) {
      if (state_[j] == State::basic || hi_[j] - lo_[j] <= 0.0) continue;
      const double dir = state_[j] == State::at_lo ? 1.0 : -1.0;
      const double effect = (up ? -row[j] : row[j]) * dir;
      if (effect <= kPivotTol) continue;
      const double slack = std::max(-d_[j] * dir, 0.0);
      if (slack / effect <= bound && effect > best) {
        best = effect;
        q = j;
      }
    }
    ++iterations_;
    ++since_build_;

    const int b = basis_[r];
    const double target = up ? lo_[b] : hi_[b];
    const double dir = state_[q] == State::at_lo ? 1.0 : -1.0;
    const double alpha = row[q];
    const double delta = (beta_[r] - target) / alpha;  // signed move of x_q
    (void)dir;
    const double entering = value(q) + delta;
    for (int i = 0; i < m; ++i) {
      const double a = t_[static_cast<std::size_t>(i)][q];
      if (a != 0.0) beta_[i] -= a * delta;
    }
    state_[b] = up ? State::at_lo : State::at_hi;
    state_[q] = State::basic;
    basis_[r] = q;
    beta_[r] = entering;
    pivot(r, q);
  }
}

Status Solver::primal() {
  const int m = static_cast<int>(t_.size());
  const int n = static_cast<int>(lo_.size());
  const double tol = opt_.tolerance;
  int degenerate = 0;
  bool bland = false;
  while (true) {
    if (iterations_ >= opt_.max_iterations) return Status::iteration_limit;
    int q = -1;
    double best = 0.0;
    for (int j = 0; j < n; ++j) {
      if (state_[j] == State::basic || hi_[j] - lo_[j] <= 0.0) continue;
      double gain = 0.0;
      if (state_[j] == State::at_lo && d_[j] > tol) gain = d_[j];
      if (state_[j] == State::at_hi && d_[j] < -tol) gain = -d_[j];
      if (gain <= 0.0) continue;
      if (bland) {
        q = j;
        break;
      }
      if (gain > best) {
        best = gain;
        q = j;
      }
    }
    if (q < 0) return Status::optimal;

    const double dir = state_[q] == State::at_lo ? 1.0 : -1.0;
    double step = hi_[q] - lo_[q];
    int leave = -1;
    bool leave_to_hi = false;
    double leave_pivot = 0.0;
    for (int i = 0; i < m; ++i) {
      const double alpha = t_[static_cast<std::size_t>(i)][q] * dir;
      if (std::abs(alpha) <= kPivotTol) continue;
      const int b = basis_[i];
      double limit;
      bool to_hi;
      if (alpha > 0.0) {
        limit = (beta_[i] - lo_[b]) / alpha;
        to_hi = false;
      } else {
        if (!std::isfinite(hi_[b])) continue;
        limit = (hi_[b] - beta_[i]) / -alpha;
        to_hi = true;
      }
      limit = std::max(limit, 0.0);
      const bool better = limit < step - 1e-12 ||
                          (limit <= step + 1e-12 && leave >= 0 &&
                           (bland ? b < basis_[leave] : std::abs(alpha) > std::abs(leave_pivot)));
      if (better) {
        step = limit;
        leave = i;
        leave_to_hi = to_hi;
        leave_pivot = alpha;
      }
    }
    if (!std::isfinite(step)) return Status::unbounded;
    ++iterations_;
    ++since_build_;
    if (step <= 1e-12) {
      if (++degenerate > 40) bland = true;
    } else {
      degenerate = 0;
    }
    for (int i = 0; i < m; ++i) {
      const double a = t_[static_cast<std::size_t>(i)][q];
      if (a != 0.0) beta_[i] -= a * dir * step;
    }
    if (leave < 0) {
      state_[q] = state_[q] == State::at_lo ? State::at_hi : State::at_lo;
      continue;
    }
    const double entering = value(q) + dir * step;
    const int out = basis_[leave];
    state_[out] = leave_to_hi ? State::at_hi : State::at_lo;
    state_[q] = State::basic;
    basis_[leave] = q;
    beta_[leave] = entering;
    pivot(leave, q);
  }
}

bool Solver::accurate() const {
  std::vector<double> x(static_cast<std::size_t>(nv_));
  for (int j = 0; j < nv_; ++j) {
    if (state_[j] != State::basic) x[j] = value(j);
  }
  for (std::size_t i = 0; i < basis_.size(); ++i) {
    if (basis_[i] < nv_) x[static_cast<std::size_t>(basis_[i])] = beta_[i];
  }
  for (int j = 0; j < nv_; ++j) {
    const double slack = 1e-7 * (1.0 + std::abs(x[j]));
    if (x[j] < lo_[j] - slack || x[j] > hi_[j] + slack) return false;
  }
  for (int i = 0; i < problem_.rows(); ++i) {
    double act = 0.0;
    double mag = std::abs(problem_.rhs(i));
    for (const auto& [j, a] : problem_.coefficients(i)) {
      act += a * x[static_cast<std::size_t>(j)];
      mag += std::abs(a * x[static_cast<std::size_t>(j)]);
    }
    const double slack = 1e-7 * (1.0 + mag);
    const double rhs = problem_.rhs(i);
    switch (problem_.sense(i)) {
      case Sense::le:
        if (act > rhs + slack) return false;
        break;
      case Sense::ge:
        if (act < rhs - slack) return false;
        break;
      case Sense::eq:
        if (std::abs(act - rhs) > slack) return false;
        break;
    }
  }
  return true;
}

Result Solver::finish(Status status) {
  Result out;
  out.status = status;
  out.iterations = iterations_;
  total_iterations_ += iterations_;
  if (status != Status::optimal) return out;
  out.x.assign(static_cast<std::size_t>(nv_), 0.0);
  for (int j = 0; j < nv_; ++j) {
    if (state_[j] != State::basic) out.x[j] = value(j);
  }
  for (std::size_t i = 0; i < basis_.size(); ++i) {
    if (basis_[i] < nv_) out.x[static_cast<std::size_t>(basis_[i])] = beta_[i];
  }
  for (int j = 0; j < nv_; ++j) {
    out.x[j] = std::clamp(out.x[j], problem_.lower(j), problem_.upper(j));
    out.objective += problem_.cost(j) * out.x[j];
  }
  return out;
}

Result Solver::cold() {
  iterations_ = 0;
  warm_ = false;
  if (build()) {
    perturb();
    Status s = dual(-kInf);
    if (s == Status::optimal) {
      compute_reduced_costs(cost_);
      s = primal();
      if (s == Status::optimal && accurate()) {
        warm_ = true;
        return finish(s);
      }
    } else if (s == Status::infeasible) {
      warm_ = true;
      return finish(s);
    }
  }
  // Slack-basis start impossible or numerically unsound: two-phase primal from scratch.
  Result r = two_phase(problem_, opt_);
  r.iterations += iterations_;
  total_iterations_ += r.iterations;
  return r;
}

Result Solver::solve() { return cold(); }

Result Solver::resolve(double stop_below) {
  if (!warm_ || since_build_ > kRebuildAfter) return cold();
  iterations_ = 0;
  perturb();
  Status s = dual(stop_below);
  if (s == Status::cutoff) return finish(s);
  if (s == Status::optimal) {
    compute_reduced_costs(cost_);
    s = primal();
    if (s == Status::optimal && accurate()) return finish(s);
  }
  // Infeasibility and numerical trouble are confirmed from a clean tableau.
  const int spent = iterations_;
  Result r = cold();
  r.iterations += spent;
  return r;
}

void Solver::set_bounds(int var, double lo, double hi) {
  problem_.set_bounds(var, lo, hi);
  if (!warm_) return;
  const auto j = static_cast<std::size_t>(var);
  if (state_[j] == State::basic) {
    lo_[j] = lo;
    hi_[j] = hi;
    return;
  }
  const double before = value(var);
  lo_[j] = lo;
  hi_[j] = hi;
  if (state_[j] == State::at_hi && !std::isfinite(hi)) {
    warm_ = false;
    return;
  }
  const double shift = value(var) - before;
  if (shift == 0.0) return;
  for (std::size_t i = 0; i < t_.size(); ++i) beta_[i] -= t_[i][j] * shift;
}

void Solver::add_row(std::vector<std::pair<int, double>> coeffs, Sense sense, double rhs) {
  problem_.add_row(coeffs, sense, rhs);
  if (!warm_) return;
  const double sg = sense == Sense::ge ? -1.0 : 1.0;
  for (auto& row : t_) row.push_back(0.0);
  const std::size_t n = lo_.size() + 1;
  lo_.push_back(0.0);
  hi_.push_back(sense == Sense::eq ? 0.0 : kInf);
  state_.push_back(State::basic);
  cost_.push_back(0.0);
  work_.push_back(0.0);
  d_.push_back(0.0);
  true_d_.push_back(0.0);
  sign_.push_back(sg);

  std::vector<double> row(n, 0.0);
  double slack = sg * rhs;
  std::vector<double> x(n - 1, 0.0);
  for (std::size_t j = 0; j + 1 < n; ++j) {
    if (state_[j] != State::basic) x[j] = value(static_cast<int>(j));
  }
  for (std::size_t i = 0; i < basis_.size(); ++i) x[static_cast<std::size_t>(basis_[i])] = beta_[i];
  for (const auto& [j, a] : coeffs) {
    row[static_cast<std::size_t>(j)] += sg * a;
    slack -= sg * a * x[static_cast<std::size_t>(j)];
  }
  row[n - 1] = 1.0;
  for (std::size_t i = 0; i < basis_.size(); ++i) {
    const auto b = static_cast<std::size_t>(basis_[i]);
    const double f = row[b];
    if (f == 0.0) continue;
    const auto& ti = t_[i];
    for (std::size_t j = 0; j < n; ++j) row[j] -= f * ti[j];
    row[b] = 0.0;
  }
  t_.push_back(std::move(row));
  basis_.push_back(static_cast<int>(n - 1));
  beta_.push_back(slack);
}

}  // namespace risuav::lp
