#pragma once

// Dense bounded-variable simplex for the small LPs solved at branch-and-bound nodes.
// Solver keeps its tableau between calls so bound changes and appended rows are
// re-optimized from the previous basis with dual simplex pivots.

#include <limits>
#include <utility>
#include <vector>

namespace risuav::lp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Sense { le, ge, eq };
enum class Status { optimal, infeasible, unbounded, iteration_limit, cutoff };

struct Options {
  int max_iterations = 20000;
  double tolerance = 1e-9;
};

struct Result {
  Status status = Status::infeasible;
  double objective = 0.0;
  std::vector<double> x;
  int iterations = 0;
};

/// maximize c^T x  s.t.  rows, lo <= x <= hi  (every lo finite).
class Problem {
 public:
  int add_variable(double lo, double hi, double cost);
  void add_row(std::vector<std::pair<int, double>> coeffs, Sense sense, double rhs);
  void set_bounds(int var, double lo, double hi);

  int variables() const { return static_cast<int>(lo_.size()); }
  int rows() const { return static_cast<int>(rows_.size()); }
  double lower(int var) const { return lo_[static_cast<std::size_t>(var)]; }
  double upper(int var) const { return hi_[static_cast<std::size_t>(var)]; }
  double cost(int var) const { return cost_[static_cast<std::size_t>(var)]; }

  /// Left-hand side of row i at x.
  double activity(int row, const std::vector<double>& x) const;
  double rhs(int row) const { return rows_[static_cast<std::size_t>(row)].rhs; }
  Sense sense(int row) const { return rows_[static_cast<std::size_t>(row)].sense; }
  const std::vector<std::pair<int, double>>& coefficients(int row) const {
    return rows_[static_cast<std::size_t>(row)].coeffs;
  }

  Result maximize(const Options& options = {}) const;

 private:
  struct Row {
    std::vector<std::pair<int, double>> coeffs;
    Sense sense;
    double rhs;
  };
  std::vector<double> lo_;
  std::vector<double> hi_;
  std::vector<double> cost_;
  std::vector<Row> rows_;
};

class Solver {
 public:
  explicit Solver(Problem problem, Options options = {});

  /// Solves from the slack basis.
  Result solve();
  /// Re-optimizes after set_bounds / add_row. Returns Status::cutoff as soon as the
  /// objective is proven to be at most `stop_below`.
  Result resolve(double stop_below = -kInf);

  void set_bounds(int var, double lo, double hi);
  void add_row(std::vector<std::pair<int, double>> coeffs, Sense sense, double rhs);

  const Problem& problem() const { return problem_; }
  int rows() const { return problem_.rows(); }
  /// Pivots across every call.
  long total_iterations() const { return total_iterations_; }

 private:
  enum class State : unsigned char { basic, at_lo, at_hi };

  bool build();
  void perturb();
  void compute_reduced_costs(const std::vector<double>& costs);
  Status dual(double stop_below);
  Status primal();
  void pivot(int row, int col);
  double dual_bound() const;
  double value(int col) const;
  bool accurate() const;
  Result finish(Status status);
  Result cold();

  Problem problem_;
  Options opt_;
  int nv_ = 0;
  std::vector<std::vector<double>> t_;
  std::vector<double> beta_;
  std::vector<int> basis_;
  std::vector<State> state_;
  std::vector<double> lo_;
  std::vector<double> hi_;
  std::vector<double> sign_;
  std::vector<double> cost_;
  std::vector<double> work_;
  std::vector<double> d_;
  std::vector<double> true_d_;
  bool warm_ = false;
  int iterations_ = 0;
  long total_iterations_ = 0;
  long since_build_ = 0;
};

}  // namespace risuav::lp
