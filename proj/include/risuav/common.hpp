#pragma once

#include <complex>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace risuav {

using cd = std::complex<double>;
using cvec = Eigen::VectorXcd;
using crow = Eigen::RowVectorXcd;
using cmat = Eigen::MatrixXcd;
using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;

inline constexpr double kPi = std::numbers::pi;

/// Raised for malformed or invariant-violating scenario configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when the minimum-rate requirement cannot be met by any schedule.
class InfeasibleError : public std::runtime_error {
 public:
  InfeasibleError(const std::string& what, int user) : std::runtime_error(what), user_(user) {}
  int user() const noexcept { return user_; }

 private:
  int user_;
};

inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double watts_to_dbm(double w) { return 10.0 * std::log10(w) + 30.0; }

}  // namespace risuav
