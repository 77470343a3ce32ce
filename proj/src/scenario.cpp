#include "risuav/scenario.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace risuav {

namespace {

using nlohmann::json;

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30U)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27U)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31U);
}

Vec3 to_point(const json& j, const char* what) {
  if (!j.is_array() || (j.size() != 2 && j.size() != 3)) {
    throw ConfigError(std::string(what) + ": expected [x, y] or [x, y, z]");
  }
  const double z = j.size() == 3 ? j[2].get<double>() : 0.0;
  return {j[0].get<double>(), j[1].get<double>(), z};
}

std::vector<Vec3> to_points(const json& j, const char* what) {
  if (!j.is_array()) throw ConfigError(std::string(what) + ": expected a list of points");
  std::vector<Vec3> out;
  for (const auto& p : j) out.push_back(to_point(p, what));
  return out;
}

template <typename T>
void read(const json& section, const char* key, T& into) {
  if (section.contains(key)) into = section.at(key).get<T>();
}

void read_path_loss(const json& section, const char* key, PathLossParams& into) {
  if (!section.contains(key)) return;
  const auto& p = section.at(key);
  read(p, "e", into.intercept_db);
  read(p, "f", into.exponent);
  read(p, "sigma", into.shadow_sigma_db);
}

const json& section(const json& root, const char* name) {
  static const json empty = json::object();
  if (!root.contains(name)) return empty;
  const auto& s = root.at(name);
  if (!s.is_object()) throw ConfigError(std::string("section '") + name + "' must be an object");
  return s;
}

}  // namespace

void NetworkScenario::validate() const {
  if (num_uavs < 1 || num_users < 1 || num_slots < 1) throw ConfigError("counts N, K, M must be >= 1");
  if (num_ris < 0) throw ConfigError("R must be >= 0");
  if (uav_rows < 1 || uav_cols < 1 || ris_rows < 1 || ris_cols < 1) {
    throw ConfigError("array dimensions must be >= 1");
  }
  if (num_ris > num_uavs) throw ConfigError("R ≤ N violated");
  if (num_uavs > num_users) throw ConfigError("N ≤ K violated");
  if ((num_users + num_uavs - 1) / num_uavs > num_slots) throw ConfigError("ceil(K/N) ≤ M violated");
  if (!(power_w > 0.0)) throw ConfigError("P > 0 violated");
  if (!(noise_w > 0.0)) throw ConfigError("sigma2 > 0 violated");
  if (!(step_m >= 0.0)) throw ConfigError("d ≥ 0 violated");
  if (!(search_step_rad > 0.0 && search_step_rad < 2.0 * kPi)) throw ConfigError("search step must lie in (0, 2π)");
  if (clusters < 1) throw ConfigError("cluster count must be >= 1");
  if (timeblocks < 1) throw ConfigError("timeblocks must be >= 1");
  if (static_cast<int>(min_rate.size()) != num_users) throw ConfigError("min_rate must have K entries");
  if (static_cast<int>(uav_init_pos.size()) != num_uavs) throw ConfigError("uav_init must have N entries");
  if (static_cast<int>(ris_pos.size()) != num_ris) throw ConfigError("ris positions must have R entries");
  if (static_cast<int>(user_pos.size()) != num_users) throw ConfigError("users must have K entries");
  for (const auto& p : uav_init_pos) {
    if (!(p.z() > 0.0)) throw ConfigError("UAV altitude must be > 0");
  }
}

NetworkScenario default_scenario() {
  NetworkScenario s;
  s.min_rate.assign(static_cast<std::size_t>(s.num_users), 1.0);
  s.uav_init_pos = {{15.0, 15.0, 30.0}, {35.0, 35.0, 30.0}};
  s.ris_pos = {{25.0, 25.0, 0.0}, {75.0, 75.0, 0.0}};
  s.ris_candidates = {{5.0, 5.0, 0.0}, {15.0, 15.0, 0.0}, {25.0, 25.0, 0.0}, {50.0, 50.0, 0.0}, {75.0, 75.0, 0.0}};
  s.user_pos = place_users(s);
  return s;
}

std::vector<Vec3> place_users(const NetworkScenario& s) {
  auto rng = link_rng(s.seed, 0, LinkKind::users, 0, 0);
  std::uniform_real_distribution<double> ux(s.user_area[0], s.user_area[1]);
  std::uniform_real_distribution<double> uy(s.user_area[2], s.user_area[3]);
  std::vector<Vec3> users;
  for (int k = 0; k < s.num_users; ++k) {
    const double x = ux(rng);
    const double y = uy(rng);
    users.emplace_back(x, y, 0.0);
  }
  return users;
}

NetworkScenario load_scenario(std::string_view text) {
  json root;
  const bool blank = text.find_first_not_of(" \t\r\n") == std::string_view::npos;
  if (blank) {
    root = json::object();
  } else {
    try {
      root = json::parse(text);
    } catch (const json::parse_error& e) {
      throw ConfigError(std::string("config parse error: ") + e.what());
    }
  }
  if (!root.is_object()) throw ConfigError("config root must be an object");

  NetworkScenario s = default_scenario();
  try {
    const auto& net = section(root, "network");
    read(net, "uavs", s.num_uavs);
    read(net, "users", s.num_users);
    read(net, "slots", s.num_slots);
    read(net, "ris", s.num_ris);

    const auto& arr = section(root, "arrays");
    read(arr, "uav_rows", s.uav_rows);
    read(arr, "uav_cols", s.uav_cols);
    read(arr, "ris_rows", s.ris_rows);
    read(arr, "ris_cols", s.ris_cols);

    const auto& radio = section(root, "radio");
    if (radio.contains("power_dbm")) s.power_w = dbm_to_watts(radio.at("power_dbm").get<double>());
    if (radio.contains("noise_dbm")) s.noise_w = dbm_to_watts(radio.at("noise_dbm").get<double>());
    read(radio, "carrier_hz", s.carrier_hz);
    s.min_rate.assign(static_cast<std::size_t>(s.num_users), 1.0);
    if (radio.contains("min_rate")) {
      const auto& g = radio.at("min_rate");
      if (g.is_array()) {
        s.min_rate = g.get<std::vector<double>>();
      } else {
        s.min_rate.assign(static_cast<std::size_t>(s.num_users), g.get<double>());
      }
    }

    const auto& geo = section(root, "geometry");
    if (geo.contains("uav_init")) s.uav_init_pos = to_points(geo.at("uav_init"), "uav_init");
    if (geo.contains("ris_candidates")) s.ris_candidates = to_points(geo.at("ris_candidates"), "ris_candidates");
    if (geo.contains("ris")) s.ris_pos = to_points(geo.at("ris"), "ris");
    if (static_cast<int>(s.ris_pos.size()) > s.num_ris) s.ris_pos.resize(static_cast<std::size_t>(s.num_ris));
    if (geo.contains("user_area")) {
      const auto a = geo.at("user_area").get<std::vector<double>>();
      if (a.size() != 4 || !(a[0] < a[1]) || !(a[2] < a[3])) {
        throw ConfigError("user_area: expected [xmin, xmax, ymin, ymax]");
      }
      for (int i = 0; i < 4; ++i) s.user_area[i] = a[static_cast<std::size_t>(i)];
    }
    read(geo, "step_m", s.step_m);
    read(geo, "min_altitude_m", s.min_altitude_m);
    read(geo, "search_step_rad", s.search_step_rad);
    read(geo, "user_jitter_m", s.user_jitter_m);

    const auto& prop = section(root, "propagation");
    read(prop, "blockage_a", s.blockage_a);
    read(prop, "blockage_b", s.blockage_b);
    read_path_loss(prop, "los", s.los);
    read_path_loss(prop, "blocked", s.blocked);
    read(prop, "clusters", s.clusters);
    read(prop, "scatter_radius_m", s.scatter_radius_m);

    const auto& exp = section(root, "experiment");
    read(exp, "timeblocks", s.timeblocks);
    read(exp, "seed", s.seed);

    if (geo.contains("users")) {
      s.user_pos = to_points(geo.at("users"), "users");
      for (auto& p : s.user_pos) p.z() = 0.0;
    } else {
      s.user_pos = place_users(s);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config type error: ") + e.what());
  }
  s.validate();
  return s;
}

NetworkScenario load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return load_scenario(buf.str());
}

double no_blockage_probability(double elevation_deg, double a, double b) {
  return 1.0 / (1.0 + a * std::exp(-b * (elevation_deg - a)));
}

double elevation_deg(const Vec3& from, const Vec3& to) {
  const double horizontal = std::hypot(from.x() - to.x(), from.y() - to.y());
  return std::atan2(from.z() - to.z(), horizontal) * 180.0 / kPi;
}

double path_loss_db(double distance_m, const PathLossParams& p, double eta_db) {
  if (!(distance_m > 0.0)) throw std::invalid_argument("path_loss_db: distance must be positive");
  return p.intercept_db + 10.0 * p.exponent * std::log10(distance_m) + eta_db;
}

double path_loss_db(double distance_m, bool blocked, double eta_db) {
  static const PathLossParams los{61.4, 2.0, 5.8};
  static const PathLossParams nlos{72.0, 2.92, 8.7};
  return path_loss_db(distance_m, blocked ? nlos : los, eta_db);
}

std::mt19937_64 link_rng(std::uint64_t seed, std::uint64_t timeblock, LinkKind kind, std::uint64_t a,
                         std::uint64_t b) {
  std::uint64_t h = splitmix(seed);
  h = splitmix(h ^ timeblock);
  h = splitmix(h ^ static_cast<std::uint64_t>(kind));
  h = splitmix(h ^ a);
  h = splitmix(h ^ b);
  return std::mt19937_64(h);
}

namespace {

LinkDraw draw_link(std::mt19937_64& rng, const NetworkScenario& s, bool blocked, int clusters,
                   const Vec3& receiver, double distance) {
  LinkDraw link;
  link.blocked = blocked;
  const PathLossParams& pl = blocked ? s.blocked : s.los;
  std::normal_distribution<double> shadow(0.0, pl.shadow_sigma_db);
  link.shadow_db = shadow(rng);
  link.gain_db = path_loss_db(std::max(distance, 1e-3), pl, link.shadow_db);
  std::normal_distribution<double> unit(0.0, std::sqrt(0.5));
  for (int l = 0; l < clusters; ++l) {
    const double re = unit(rng);
    const double im = unit(rng);
    link.unit_gains.emplace_back(re, im);
  }
  if (clusters > 1 || blocked) {
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (int l = 0; l < clusters; ++l) {
      const double radius = s.scatter_radius_m * std::sqrt(u01(rng));
      const double angle = 2.0 * kPi * u01(rng);
      link.scatterers.emplace_back(receiver.x() + radius * std::cos(angle),
                                   receiver.y() + radius * std::sin(angle), 0.0);
    }
  }
  return link;
}

}  // namespace

TimeblockDraw sample_timeblock(const NetworkScenario& s, int index, const std::vector<Vec3>& uav_pos_pre) {
  TimeblockDraw draw;
  draw.index = index;
  draw.num_uavs = s.num_uavs;
  draw.num_ris = s.num_ris;
  draw.uav_pos_pre = uav_pos_pre;
  draw.user_pos = s.user_pos;
  const auto tb = static_cast<std::uint64_t>(index);

  if (s.user_jitter_m > 0.0) {
    for (int k = 0; k < s.num_users; ++k) {
      auto rng = link_rng(s.seed, tb, LinkKind::users, static_cast<std::uint64_t>(k), 1);
      std::normal_distribution<double> jitter(0.0, s.user_jitter_m);
      auto& p = draw.user_pos[static_cast<std::size_t>(k)];
      p.x() += jitter(rng);
      p.y() += jitter(rng);
    }
  }

  for (int k = 0; k < s.num_users; ++k) {
    const Vec3& user = draw.user_pos[static_cast<std::size_t>(k)];
    for (int n = 0; n < s.num_uavs; ++n) {
      const Vec3& uav = uav_pos_pre[static_cast<std::size_t>(n)];
      auto rng = link_rng(s.seed, tb, LinkKind::uav_user, static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(n));
      std::uniform_real_distribution<double> u01(0.0, 1.0);
      const double p_block = 1.0 - no_blockage_probability(elevation_deg(uav, user), s.blockage_a, s.blockage_b);
      const bool blocked = u01(rng) < p_block;
      draw.uav_user.push_back(draw_link(rng, s, blocked, blocked ? s.clusters : 1, user, (uav - user).norm()));
    }
  }
  for (int k = 0; k < s.num_users; ++k) {
    const Vec3& user = draw.user_pos[static_cast<std::size_t>(k)];
    for (int r = 0; r < s.num_ris; ++r) {
      auto rng = link_rng(s.seed, tb, LinkKind::ris_user, static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(r));
      const Vec3& ris = s.ris_pos[static_cast<std::size_t>(r)];
      draw.ris_user.push_back(draw_link(rng, s, false, s.clusters, user, (ris - user).norm()));
    }
  }
  for (int r = 0; r < s.num_ris; ++r) {
    const Vec3& ris = s.ris_pos[static_cast<std::size_t>(r)];
    for (int n = 0; n < s.num_uavs; ++n) {
      auto rng = link_rng(s.seed, tb, LinkKind::uav_ris, static_cast<std::uint64_t>(r), static_cast<std::uint64_t>(n));
      const Vec3& uav = uav_pos_pre[static_cast<std::size_t>(n)];
      draw.uav_ris.push_back(draw_link(rng, s, false, 1, ris, (uav - ris).norm()));
    }
  }
  return draw;
}

}  // namespace risuav
