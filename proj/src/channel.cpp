#include "risuav/channel.hpp"

#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace risuav {

Angles angles_to(const Vec3& from, const Vec3& to) {
  const double dx = to.x() - from.x();
  const double dy = to.y() - from.y();
  const double horizontal = std::hypot(dx, dy);
  const double altitude = std::abs(from.z() - to.z());
  Angles a{};
  a.theta = std::atan2(horizontal, altitude);
  if (dx == 0.0) {
    a.phi = dy > 0.0 ? kPi / 2.0 : (dy < 0.0 ? -kPi / 2.0 : 0.0);
  } else {
    a.phi = std::atan(dy / dx) + (dx < 0.0 ? kPi : 0.0);
  }
  return a;
}

cvec steering_vector(double theta, double phi, int rows, int cols) {
  const double mu = std::sin(theta) * std::cos(phi);
  const double nu = std::sin(theta) * std::sin(phi);
  const int size = rows * cols;
  const double scale = 1.0 / std::sqrt(static_cast<double>(size));
  cvec a(size);
  for (int p = 0; p < rows; ++p) {
    for (int c = 0; c < cols; ++c) {
      a(p * cols + c) = std::polar(scale, kPi * (c * mu + p * nu));
    }
  }
  return a;
}

void ChannelSet::restack() {
  for (int n = 0; n < num_uavs; ++n) restack_uav(n);
  for (int k = 0; k < num_users; ++k) restack_user(k);
}

void ChannelSet::restack_uav(int n) {
  g_stack.resize(static_cast<std::size_t>(num_uavs));
  cmat& g = g_stack[static_cast<std::size_t>(n)];
  g.resize(stacked_size(), antennas);
  for (int r = 0; r < num_ris; ++r) g.middleRows(r * ris_elements, ris_elements) = uav_ris(r, n);
}

void ChannelSet::restack_user(int k) {
  h_ris_stack.resize(static_cast<std::size_t>(num_users));
  crow& h = h_ris_stack[static_cast<std::size_t>(k)];
  h.resize(stacked_size());
  for (int r = 0; r < num_ris; ++r) h.segment(r * ris_elements, ris_elements) = ris_user(k, r).transpose();
}

void ChannelSet::clear_ris() {
  for (auto& h : h_ris_user) h.setZero();
  for (auto& g : g_uav_ris) g.setZero();
  restack();
}

double amplitude_scale(const LinkDraw& link, const NetworkScenario& s, double distance_m) {
  const PathLossParams& pl = link.blocked ? s.blocked : s.los;
  const double kappa = path_loss_db(std::max(distance_m, 1e-3), pl, link.shadow_db);
  return std::pow(10.0, -kappa / 20.0);
}

cvec uav_user_channel(const TimeblockDraw& draw, const NetworkScenario& s, const Vec3& uav_pos, int user, int uav) {
  const LinkDraw& link = draw.direct(user, uav);
  const Vec3& target = draw.user_pos[static_cast<std::size_t>(user)];
  const double scale = amplitude_scale(link, s, (uav_pos - target).norm());
  const int nt = s.antennas();
  if (link.scatterers.empty()) {
    const Angles a = angles_to(uav_pos, target);
    return std::sqrt(static_cast<double>(nt)) * scale * link.unit_gains.front() *
           steering_vector(a.theta, a.phi, s.uav_rows, s.uav_cols);
  }
  const auto clusters = static_cast<double>(link.scatterers.size());
  cvec h = cvec::Zero(nt);
  for (std::size_t l = 0; l < link.scatterers.size(); ++l) {
    const Angles a = angles_to(uav_pos, link.scatterers[l]);
    h += link.unit_gains[l] * steering_vector(a.theta, a.phi, s.uav_rows, s.uav_cols);
  }
  return std::sqrt(nt / clusters) * scale * h;
}

cvec ris_user_channel(const TimeblockDraw& draw, const NetworkScenario& s, int ris, int user) {
  const LinkDraw& link = draw.ris_to_user(user, ris);
  const Vec3& origin = s.ris_pos[static_cast<std::size_t>(ris)];
  const Vec3& target = draw.user_pos[static_cast<std::size_t>(user)];
  const double scale = amplitude_scale(link, s, (origin - target).norm());
  const int size = s.ris_elements();
  if (link.scatterers.empty()) {
    const Angles a = angles_to(origin, target);
    return std::sqrt(static_cast<double>(size)) * scale * link.unit_gains.front() *
           steering_vector(a.theta, a.phi, s.ris_rows, s.ris_cols);
  }
  const auto clusters = static_cast<double>(link.scatterers.size());
  cvec h = cvec::Zero(size);
  for (std::size_t l = 0; l < link.scatterers.size(); ++l) {
    const Angles a = angles_to(origin, link.scatterers[l]);
    h += link.unit_gains[l] * steering_vector(a.theta, a.phi, s.ris_rows, s.ris_cols);
  }
  return std::sqrt(size / clusters) * scale * h;
}

cmat uav_ris_channel(const TimeblockDraw& draw, const NetworkScenario& s, const Vec3& uav_pos, int ris, int uav) {
  const LinkDraw& link = draw.uav_to_ris(ris, uav);
  const Vec3& surface = s.ris_pos[static_cast<std::size_t>(ris)];
  const double scale = amplitude_scale(link, s, (uav_pos - surface).norm());
  const int nt = s.antennas();
  const int nr = s.ris_elements();
  const Angles rx = angles_to(surface, uav_pos);
  const cvec a_rx = steering_vector(rx.theta, rx.phi, s.ris_rows, s.ris_cols);
  cmat g = cmat::Zero(nr, nt);
  const std::size_t clusters = std::max<std::size_t>(1, link.scatterers.size());
  for (std::size_t l = 0; l < clusters; ++l) {
    const Vec3& toward = link.scatterers.empty() ? surface : link.scatterers[l];
    const Angles tx = angles_to(uav_pos, toward);
    const cvec a_tx = steering_vector(tx.theta, tx.phi, s.uav_rows, s.uav_cols);
    g += link.unit_gains[l] * (a_rx * a_tx.adjoint());
  }
  return std::sqrt(static_cast<double>(nt) * nr / static_cast<double>(clusters)) * scale * g;
}

ChannelSet build_channels(const NetworkScenario& s, const TimeblockDraw& draw, const std::vector<Vec3>& uav_pos) {
  ChannelSet ch;
  ch.num_users = s.num_users;
  ch.num_uavs = s.num_uavs;
  ch.num_ris = s.num_ris;
  ch.antennas = s.antennas();
  ch.ris_elements = s.ris_elements();
  for (int k = 0; k < s.num_users; ++k) {
    for (int n = 0; n < s.num_uavs; ++n) {
      ch.h_direct.push_back(uav_user_channel(draw, s, uav_pos[static_cast<std::size_t>(n)], k, n));
    }
  }
  for (int k = 0; k < s.num_users; ++k) {
    for (int r = 0; r < s.num_ris; ++r) ch.h_ris_user.push_back(ris_user_channel(draw, s, r, k));
  }
  for (int r = 0; r < s.num_ris; ++r) {
    for (int n = 0; n < s.num_uavs; ++n) {
      ch.g_uav_ris.push_back(uav_ris_channel(draw, s, uav_pos[static_cast<std::size_t>(n)], r, n));
    }
  }
  ch.restack();
  return ch;
}

void update_uav_channels(ChannelSet& ch, const NetworkScenario& s, const TimeblockDraw& draw, int uav,
                         const Vec3& uav_pos) {
  for (int k = 0; k < ch.num_users; ++k) ch.direct(k, uav) = uav_user_channel(draw, s, uav_pos, k, uav);
  for (int r = 0; r < ch.num_ris; ++r) {
    ch.g_uav_ris[static_cast<std::size_t>(r * ch.num_uavs + uav)] = uav_ris_channel(draw, s, uav_pos, r, uav);
  }
  ch.restack_uav(uav);
}

PhasePlan PhasePlan::identity(int slots, int length) {
  PhasePlan p;
  p.v.assign(static_cast<std::size_t>(slots), cvec::Ones(length));
  return p;
}

crow effective_channel(const ChannelSet& ch, const cvec& v, int user, int uav) {
  if (v.size() != ch.stacked_size()) throw std::invalid_argument("effective_channel: phase vector size mismatch");
  crow row = ch.direct(user, uav).adjoint();
  if (ch.num_ris == 0) return row;
  const crow weighted = ch.h_ris_stack[static_cast<std::size_t>(user)].cwiseProduct(v.transpose());
  row.noalias() += weighted * ch.g_stack[static_cast<std::size_t>(uav)];
  return row;
}

crow effective_channel_summed(const ChannelSet& ch, const cvec& v, int user, int uav) {
  if (v.size() != ch.stacked_size()) throw std::invalid_argument("effective_channel: phase vector size mismatch");
  crow row = ch.direct(user, uav).adjoint();
  for (int r = 0; r < ch.num_ris; ++r) {
    const cvec theta = v.segment(r * ch.ris_elements, ch.ris_elements);
    const crow reflected = ch.ris_user(user, r).transpose() * theta.asDiagonal() * ch.uav_ris(r, uav);
    row += reflected;
  }
  return row;
}

namespace {

void write_matrix(std::ostream& out, const cmat& m) {
  out << m.rows() << ' ' << m.cols() << '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ' ';
      out << m(i, j).real() << ' ' << m(i, j).imag();
    }
    out << '\n';
  }
}

cmat read_matrix(std::istream& in) {
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;
  if (!(in >> rows >> cols) || rows < 0 || cols < 0) throw std::runtime_error("channel dump: bad matrix header");
  cmat m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      double re = 0.0;
      double im = 0.0;
      if (!(in >> re >> im)) throw std::runtime_error("channel dump: truncated matrix");
      m(i, j) = {re, im};
    }
  }
  return m;
}

void expect(std::istream& in, const std::string& tag, int a, int b) {
  std::string got;
  int x = -1;
  int y = -1;
  if (!(in >> got >> x >> y) || got != tag || x != a || y != b) {
    throw std::runtime_error("channel dump: expected block '" + tag + "'");
  }
}

}  // namespace

void write_channel_dump(std::ostream& out, const ChannelSet& ch) {
  out << std::setprecision(17);
  out << "risuav-channels " << ch.num_users << ' ' << ch.num_uavs << ' ' << ch.num_ris << ' ' << ch.antennas << ' '
      << ch.ris_elements << '\n';
  for (int k = 0; k < ch.num_users; ++k) {
    for (int n = 0; n < ch.num_uavs; ++n) {
      out << "direct " << k << ' ' << n << '\n';
      write_matrix(out, ch.direct(k, n));
    }
  }
  for (int k = 0; k < ch.num_users; ++k) {
    for (int r = 0; r < ch.num_ris; ++r) {
      out << "ris_user " << k << ' ' << r << '\n';
      write_matrix(out, ch.ris_user(k, r));
    }
  }
  for (int r = 0; r < ch.num_ris; ++r) {
    for (int n = 0; n < ch.num_uavs; ++n) {
      out << "uav_ris " << r << ' ' << n << '\n';
      write_matrix(out, ch.uav_ris(r, n));
    }
  }
}

ChannelSet read_channel_dump(std::istream& in) {
  std::string magic;
  ChannelSet ch;
  if (!(in >> magic >> ch.num_users >> ch.num_uavs >> ch.num_ris >> ch.antennas >> ch.ris_elements) ||
      magic != "risuav-channels") {
    throw std::runtime_error("channel dump: bad header");
  }
  for (int k = 0; k < ch.num_users; ++k) {
    for (int n = 0; n < ch.num_uavs; ++n) {
      expect(in, "direct", k, n);
      ch.h_direct.emplace_back(read_matrix(in));
    }
  }
  for (int k = 0; k < ch.num_users; ++k) {
    for (int r = 0; r < ch.num_ris; ++r) {
      expect(in, "ris_user", k, r);
      ch.h_ris_user.emplace_back(read_matrix(in));
    }
  }
  for (int r = 0; r < ch.num_ris; ++r) {
    for (int n = 0; n < ch.num_uavs; ++n) {
      expect(in, "uav_ris", r, n);
      ch.g_uav_ris.push_back(read_matrix(in));
    }
  }
  ch.restack();
  return ch;
}

}  // namespace risuav
