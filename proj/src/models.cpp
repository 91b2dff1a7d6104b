#include "angulus/models.hpp"

#include <algorithm>
#include <cmath>

namespace angulus {

namespace {

constexpr double kDivergenceRadius = 1e6;
constexpr int kEulerSubsteps = 100;
constexpr double kEulerStep = 0.01;
constexpr double kOscillatorP1 = 0.1;
constexpr double kOscillatorP2 = 0.55;

Matrix normal_form_matrix(double rho, double phi) {
  Matrix a(2, 2);
  a << std::cos(phi), -std::sin(phi) / rho, rho * std::sin(phi), std::cos(phi);
  return a;
}

Matrix rotation12(double phi) {
  Matrix t = Matrix::Identity(3, 3);
  t.topLeftCorner(2, 2) = rotation2(phi);
  return t;
}

// n == 0 or n in [2^(2l-1), 2^(2l) - 1] for some l >= 1.
bool counterexample1_first_branch(long n) {
  if (n == 0) return true;
  for (long lo = 2; lo <= n; lo *= 4) {
    if (n <= 2 * lo - 1) return true;
  }
  return false;
}

// n in [2 * 2^l - 4, 3 * 2^l - 5] for some l >= 1.
bool counterexample2_reflection_branch(long n) {
  for (long p = 2; 2 * p - 4 <= n; p *= 2) {
    if (n <= 3 * p - 5) return true;
  }
  return false;
}

double require_param(const Params& params, const std::string& key, const std::string& model) {
  auto it = params.find(key);
  if (it == params.end()) {
    throw Error(ErrorCode::MissingParam, "model '" + model + "' needs parameter '" + key + "'");
  }
  return it->second;
}

Params merge_params(const CatalogEntry& entry, const Params& given) {
  Params out = entry.defaults;
  for (const auto& [k, v] : given) out[k] = v;
  for (const auto& key : entry.required) require_param(out, key, entry.name);
  return out;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Vector initial_point(const Params& p, int dim) {
  Vector x(dim);
  for (int i = 0; i < dim; ++i) x(i) = p.at("x" + std::to_string(i + 1));
  return x;
}

SystemModel from_trajectory(std::string name, Params params, Trajectory traj,
                            std::vector<Matrix> jacobians) {
  SystemModel m;
  m.name = std::move(name);
  m.dim = static_cast<int>(traj.points.front().size());
  m.params = std::move(params);
  auto shared = std::make_shared<const std::vector<Matrix>>(std::move(jacobians));
  m.generator = [shared](long n) -> Matrix {
    if (n < 0 || n >= static_cast<long>(shared->size())) {
      throw Error(ErrorCode::InvalidArgument,
                  "index " + std::to_string(n) + " beyond precomputed trajectory of length " +
                      std::to_string(shared->size()));
    }
    return (*shared)[static_cast<std::size_t>(n)];
  };
  m.trajectory = std::make_shared<const Trajectory>(std::move(traj));
  return m;
}

}  // namespace

Matrix rotation2(double phi) {
  Matrix t(2, 2);
  t << std::cos(phi), -std::sin(phi), std::sin(phi), std::cos(phi);
  return t;
}

SystemModel scaled(const SystemModel& model, double c) {
  SystemModel out = model;
  out.generator = [gen = model.generator, c](long n) -> Matrix { return c * gen(n); };
  return out;
}

bool random_choice(std::uint64_t seed, long n) {
  const std::uint64_t key = splitmix64(seed) ^ (static_cast<std::uint64_t>(n) * 0xd1b54a32d192ed03ULL);
  return (splitmix64(key) >> 63) != 0;
}

const std::vector<CatalogEntry>& catalog() {
  static const std::vector<CatalogEntry> entries = {
      {"diag23", 2, {}, {}, "A_n = diag(2,3)"},
      {"reflection", 2, {}, {{"phi", 1.0 / 3.0}}, "A_n = [[cos phi, sin phi],[sin phi, -cos phi]]"},
      {"rotated_diag", 2, {}, {{"phi", 1.0 / 3.0}}, "A_n = T_{(n+1)phi} diag(2,3) T_{-n phi}"},
      {"rotation", 2, {}, {{"phi", 1.0 / 3.0}}, "A_n = T_{n phi}"},
      {"normal_form", 2, {}, {{"rho", 1.0 / 7.0}, {"phi", 1.0 / 3.0}},
       "A = [[cos phi, -sin phi / rho],[rho sin phi, cos phi]]"},
      {"block4", 4, {}, {{"eta", 1.2}}, "A = [[A(1,1/2), I],[0, eta A(1/2,1.4)]]"},
      {"param3d", 3, {"p"}, {{"phi", 1.0 / 3.0}}, "A_n = T12_{(n+1)phi} diag(1/2,p,3) T12_{-n phi}"},
      {"random3d", 3, {}, {{"phi", 0.2}}, "A_n in {B1, B2} uniformly i.i.d."},
      {"counterexample1", 2, {"phi0", "phi1"}, {}, "rotations by phi0 / phi1 on dyadic blocks"},
      {"counterexample2", 2, {}, {}, "diag(-1,1) / diag(1,1/2) on dyadic blocks"},
      {"henon2",
       2,
       {},
       {{"x1", -1.202}, {"x2", 0.3713}, {"length", double(kDefaultTrajectoryLength)}},
       "variational equation of the 2-D Henon map"},
      {"henon3",
       3,
       {},
       {{"x1", 0.2}, {"x2", 0.1}, {"x3", 0.0}, {"length", double(kDefaultTrajectoryLength)}},
       "variational equation of the 3-D Henon variant"},
      {"oscillators",
       4,
       {"lambda"},
       {{"x1", 1.0}, {"x2", 0.0}, {"x3", 1.0}, {"x4", 0.0}, {"length", double(kDefaultTrajectoryLength)}},
       "variational equation of the Euler 1-flow of two coupled oscillators"},
  };
  return entries;
}

SystemModel catalog_get(const std::string& name, const Params& params, std::optional<std::uint64_t> seed) {
  const auto& entries = catalog();
  auto it = std::find_if(entries.begin(), entries.end(), [&](const CatalogEntry& e) { return e.name == name; });
  if (it == entries.end()) {
    throw Error(ErrorCode::UnknownModel, "no catalog model named '" + name + "'");
  }
  const Params p = merge_params(*it, params);

  if (name == "henon2" || name == "henon3" || name == "oscillators") {
    const long length = static_cast<long>(p.at("length"));
    const std::string map_name = name == "oscillators" ? "oscillators_flow" : name;
    auto [model, traj] = variational_sequence(map_name, initial_point(p, it->dim), length, p);
    model.name = name;
    model.params = p;
    return model;
  }

  SystemModel m;
  m.name = name;
  m.dim = it->dim;
  m.params = p;

  if (name == "diag23") {
    Matrix a = Eigen::Vector2d(2.0, 3.0).asDiagonal();
    m.generator = [a](long) { return a; };
  } else if (name == "reflection") {
    const double phi = p.at("phi");
    Matrix a(2, 2);
    a << std::cos(phi), std::sin(phi), std::sin(phi), -std::cos(phi);
    m.generator = [a](long) { return a; };
  } else if (name == "rotated_diag") {
    const double phi = p.at("phi");
    const Matrix d = Eigen::Vector2d(2.0, 3.0).asDiagonal();
    m.generator = [phi, d](long n) -> Matrix {
      return rotation2(double(n + 1) * phi) * d * rotation2(-double(n) * phi);
    };
  } else if (name == "rotation") {
    const double phi = p.at("phi");
    m.generator = [phi](long n) { return rotation2(double(n) * phi); };
  } else if (name == "normal_form") {
    Matrix a = normal_form_matrix(p.at("rho"), p.at("phi"));
    m.generator = [a](long) { return a; };
  } else if (name == "block4") {
    Matrix a = Matrix::Zero(4, 4);
    a.topLeftCorner(2, 2) = normal_form_matrix(1.0, 0.5);
    a.topRightCorner(2, 2) = Matrix::Identity(2, 2);
    a.bottomRightCorner(2, 2) = p.at("eta") * normal_form_matrix(0.5, 1.4);
    m.generator = [a](long) { return a; };
  } else if (name == "param3d") {
    const double phi = p.at("phi");
    const Matrix d = Eigen::Vector3d(0.5, p.at("p"), 3.0).asDiagonal();
    m.generator = [phi, d](long n) -> Matrix {
      return rotation12(double(n + 1) * phi) * d * rotation12(-double(n) * phi);
    };
  } else if (name == "random3d") {
    const double phi = p.at("phi");
    Matrix b1 = Matrix::Zero(3, 3);
    b1.topLeftCorner(2, 2) = 2.0 * rotation2(phi);
    b1(2, 2) = 3.0;
    const Matrix b2 = Eigen::Vector3d(1.0, 1.0, 5.0).asDiagonal();
    const std::uint64_t key = seed.value_or(0);
    m.seed = key;
    m.generator = [b1, b2, key](long n) -> Matrix { return random_choice(key, n) ? b1 : b2; };
  } else if (name == "counterexample1") {
    const double phi0 = p.at("phi0");
    const double phi1 = p.at("phi1");
    m.generator = [phi0, phi1](long n) {
      return rotation2(counterexample1_first_branch(n) ? phi0 : phi1);
    };
  } else if (name == "counterexample2") {
    const Matrix reflect = Eigen::Vector2d(-1.0, 1.0).asDiagonal();
    const Matrix contract = Eigen::Vector2d(1.0, 0.5).asDiagonal();
    m.generator = [reflect, contract](long n) {
      return counterexample2_reflection_branch(n) ? reflect : contract;
    };
  }
  return m;
}

MapStep henon2_step(const Vector& x) {
  MapStep s;
  s.image = Vector(2);
  s.image << 1.0 + x(1) - 1.4 * x(0) * x(0), 0.3 * x(0);
  s.jacobian = Matrix(2, 2);
  s.jacobian << -2.8 * x(0), 1.0, 0.3, 0.0;
  return s;
}

MapStep henon3_step(const Vector& x) {
  MapStep s;
  s.image = Vector(3);
  s.image << 1.0 + x(2) - 1.4 * x(0) * x(0), x(0) + x(2), 0.2 * x(0) + 0.1 * x(1);
  s.jacobian = Matrix(3, 3);
  s.jacobian << -2.8 * x(0), 0.0, 1.0, 1.0, 0.0, 1.0, 0.2, 0.1, 0.0;
  return s;
}

Vector oscillator_field(const Vector& x, double lambda) {
  const double c = x(0) + x(1) - x(2) - x(3);
  const double r12 = x(0) * x(0) + x(1) * x(1);
  const double r34 = x(2) * x(2) + x(3) * x(3);
  Vector g(4);
  g(0) = x(0) + kOscillatorP1 * x(1) - r12 * x(0) - lambda * c;
  g(1) = -kOscillatorP1 * x(0) + x(1) - r12 * x(1) - lambda * c;
  g(2) = x(2) + kOscillatorP2 * x(3) - r34 * x(2) + lambda * c;
  g(3) = -kOscillatorP2 * x(2) + x(3) - r34 * x(3) + lambda * c;
  return g;
}

Matrix oscillator_field_jacobian(const Vector& x, double lambda) {
  const double x1 = x(0), x2 = x(1), x3 = x(2), x4 = x(3);
  const double l = lambda;
  Matrix j(4, 4);
  j << 1 - 3 * x1 * x1 - x2 * x2 - l, kOscillatorP1 - 2 * x1 * x2 - l, l, l,
      -kOscillatorP1 - 2 * x1 * x2 - l, 1 - x1 * x1 - 3 * x2 * x2 - l, l, l,
      l, l, 1 - 3 * x3 * x3 - x4 * x4 - l, kOscillatorP2 - 2 * x3 * x4 - l,
      l, l, -kOscillatorP2 - 2 * x3 * x4 - l, 1 - x3 * x3 - 3 * x4 * x4 - l;
  return j;
}

MapStep euler_one_flow(const Vector& x, double lambda) {
  MapStep s;
  s.image = x;
  s.jacobian = Matrix::Identity(4, 4);
  for (int step = 0; step < kEulerSubsteps; ++step) {
    const Matrix local = Matrix::Identity(4, 4) + kEulerStep * oscillator_field_jacobian(s.image, lambda);
    s.image += kEulerStep * oscillator_field(s.image, lambda);
    s.jacobian = local * s.jacobian;
  }
  return s;
}

std::pair<SystemModel, Trajectory> variational_sequence(const std::string& map_name, const Vector& x0,
                                                        long length, const Params& params) {
  if (length < 1) {
    throw Error(ErrorCode::InvalidArgument, "variational_sequence needs length >= 1");
  }
  std::function<MapStep(const Vector&)> step;
  int dim = 0;
  if (map_name == "henon2") {
    step = henon2_step;
    dim = 2;
  } else if (map_name == "henon3") {
    step = henon3_step;
    dim = 3;
  } else if (map_name == "oscillators_flow") {
    const double lambda = require_param(params, "lambda", map_name);
    step = [lambda](const Vector& x) { return euler_one_flow(x, lambda); };
    dim = 4;
  } else {
    throw Error(ErrorCode::UnknownModel, "no nonlinear map named '" + map_name + "'");
  }
  if (x0.size() != dim) {
    throw Error(ErrorCode::DimensionMismatch, map_name + " needs an initial point of dimension " +
                                                  std::to_string(dim));
  }

  Trajectory traj;
  traj.origin_map = map_name;
  traj.points.reserve(static_cast<std::size_t>(length) + 1);
  traj.points.push_back(x0);
  std::vector<Matrix> jacobians;
  jacobians.reserve(static_cast<std::size_t>(length));
  for (long n = 0; n < length; ++n) {
    MapStep s = step(traj.points.back());
    if (!s.image.allFinite() || s.image.norm() > kDivergenceRadius) {
      throw Error(ErrorCode::Diverged, map_name + " orbit left the bounded region at n = " +
                                           std::to_string(n + 1));
    }
    jacobians.push_back(std::move(s.jacobian));
    traj.points.push_back(std::move(s.image));
  }
  Params p = params;
  p["length"] = double(length);
  SystemModel model = from_trajectory(map_name, std::move(p), traj, std::move(jacobians));
  return {std::move(model), std::move(traj)};
}

}  // namespace angulus
