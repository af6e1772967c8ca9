#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "conewatch/common.hpp"
#include "conewatch/cone.hpp"
#include "conewatch/model.hpp"

namespace conewatch {

/// Closed-form properties of a built-in system, each covered by a test.
struct ZooFacts {
  std::vector<VectorXd> equilibria;
  std::optional<double> period;
  std::optional<VectorXd> lyapunov_exponents;  // non-increasing
  bool has_periodic_orbit = false;
  bool heteroclinic_attractor = false;
  std::string notes;
};

struct ZooEntry {
  VectorFieldModel model;
  QuadraticCone recommended_cone;
  std::optional<double> recommended_lambda;
  ZooFacts facts;
  Box default_box;
};

namespace zoo_detail {

inline VectorXd vec3(double a, double b, double c) {
  VectorXd v(3);
  v << a, b, c;
  return v;
}

inline QuadraticCone rank2_cone3() { return build_cone(vec3(-1.0, -1.0, 1.0)); }

inline ZooEntry make_linear_diag() {
  MatrixXd A = vec3(-1.0, -1.0, -3.0).asDiagonal();
  ZooEntry e;
  e.model = linear_model(A, "linear_diag");
  e.recommended_cone = rank2_cone3();
  e.recommended_lambda = 2.5;
  e.facts.equilibria = {VectorXd::Zero(3)};
  e.facts.lyapunov_exponents = vec3(-1.0, -1.0, -3.0);
  e.facts.notes = "globally stable linear node; every orbit converges to the origin";
  e.default_box = Box::cube(3, -2.0, 2.0);
  return e;
}

inline ZooEntry make_limit_cycle_3d(double c = 25.0) {
  VectorFieldModel m;
  m.dim = 3;
  m.name = "limit_cycle_3d";
  m.field = [c](const VectorXd& x) -> VectorXd {
    const double r2 = x[0] * x[0] + x[1] * x[1];
    VectorXd f(3);
    f << x[0] - x[1] - x[0] * r2, x[0] + x[1] - x[1] * r2, -c * x[2];
    return f;
  };
  m.jacobian = [c](const VectorXd& x) -> MatrixXd {
    MatrixXd J(3, 3);
    J << 1 - 3 * x[0] * x[0] - x[1] * x[1], -1 - 2 * x[0] * x[1], 0.0,
        1 - 2 * x[0] * x[1], 1 - x[0] * x[0] - 3 * x[1] * x[1], 0.0,
        0.0, 0.0, -c;
    return J;
  };
  ZooEntry e;
  e.model = std::move(m);
  e.recommended_cone = rank2_cone3();
  // Smith condition on [-2,2]^3 needs lambda in (46, 2c); 48 sits mid-interval.
  // Validated over a 21^3 grid by the zoo test suite.
  e.recommended_lambda = 48.0;
  e.facts.equilibria = {VectorXd::Zero(3)};
  e.facts.period = 2.0 * M_PI;
  e.facts.lyapunov_exponents = vec3(0.0, -2.0, -c);
  e.facts.has_periodic_orbit = true;
  e.facts.notes = "unit circle in z=0 is an attracting limit cycle; the z-axis is the only exceptional set";
  e.default_box = Box::cube(3, -2.0, 2.0);
  return e;
}

inline ZooEntry make_cyclic_feedback_3d(double gain = 5.0) {
  VectorFieldModel m;
  m.dim = 3;
  m.name = "cyclic_feedback_3d";
  m.field = [gain](const VectorXd& x) -> VectorXd {
    VectorXd f(3);
    f << -x[0] - std::tanh(gain * x[2]), -x[1] + std::tanh(gain * x[0]),
        -x[2] + std::tanh(gain * x[1]);
    return f;
  };
  m.jacobian = [gain](const VectorXd& x) -> MatrixXd {
    auto sech2 = [](double u) {
      const double ch = std::cosh(u);
      return 1.0 / (ch * ch);
    };
    MatrixXd J = MatrixXd::Zero(3, 3);
    J(0, 0) = -1;
    J(0, 2) = -gain * sech2(gain * x[2]);
    J(1, 0) = gain * sech2(gain * x[0]);
    J(1, 1) = -1;
    J(2, 1) = gain * sech2(gain * x[1]);
    J(2, 2) = -1;
    return J;
  };
  ZooEntry e;
  e.model = std::move(m);
  e.recommended_cone = rank2_cone3();
  e.facts.equilibria = {VectorXd::Zero(3)};
  e.facts.has_periodic_orbit = gain > 2.0;  // Hopf at gain 2 in the linearization
  e.facts.notes = "negative feedback loop; cooperativity for the default cone is reported empirically, not asserted";
  e.default_box = Box::cube(3, -2.0, 2.0);
  return e;
}

inline ZooEntry make_may_leonard(double alpha = 0.8, double beta = 1.3) {
  VectorFieldModel m;
  m.dim = 3;
  m.name = "may_leonard";
  m.field = [alpha, beta](const VectorXd& x) -> VectorXd {
    VectorXd f(3);
    f << x[0] * (1 - x[0] - alpha * x[1] - beta * x[2]),
        x[1] * (1 - x[1] - alpha * x[2] - beta * x[0]),
        x[2] * (1 - x[2] - alpha * x[0] - beta * x[1]);
    return f;
  };
  m.jacobian = [alpha, beta](const VectorXd& x) -> MatrixXd {
    MatrixXd J(3, 3);
    J << 1 - 2 * x[0] - alpha * x[1] - beta * x[2], -alpha * x[0], -beta * x[0],
        -beta * x[1], 1 - 2 * x[1] - alpha * x[2] - beta * x[0], -alpha * x[1],
        -alpha * x[2], -beta * x[2], 1 - 2 * x[2] - alpha * x[0] - beta * x[1];
    return J;
  };
  ZooEntry e;
  e.model = std::move(m);
  e.recommended_cone = rank2_cone3();
  const double s = 1.0 / (1.0 + alpha + beta);
  e.facts.equilibria = {VectorXd::Zero(3), vec3(1, 0, 0), vec3(0, 1, 0), vec3(0, 0, 1),
                        vec3(s, s, s)};
  e.facts.heteroclinic_attractor = alpha + beta > 2.0 && alpha < 1.0 && beta > 1.0;
  e.facts.notes = "competitive Lotka-Volterra in the heteroclinic regime: interior orbits off the diagonal cycle ever closer to the three axis equilibria";
  e.default_box = Box::cube(3, 0.0, 2.0);
  return e;
}

inline ZooEntry make_rotation_counterexample() {
  MatrixXd A = MatrixXd::Zero(3, 3);
  A(0, 2) = -1.0;
  A(2, 0) = 1.0;
  ZooEntry e;
  e.model = linear_model(A, "rotation_counterexample");
  e.recommended_cone = rank2_cone3();
  e.facts.equilibria = {VectorXd::Zero(3)};
  e.facts.notes = "rotation mixing the first and third axes; the whole second axis is equilibria and cone invariance fails for the default cone";
  e.default_box = Box::cube(3, -2.0, 2.0);
  return e;
}

}  // namespace zoo_detail

inline const std::vector<std::string>& zoo_names() {
  static const std::vector<std::string> names = {
      "linear_diag", "limit_cycle_3d", "cyclic_feedback_3d", "may_leonard",
      "rotation_counterexample"};
  return names;
}

inline ZooEntry get_model(const std::string& name) {
  if (name == "linear_diag") return zoo_detail::make_linear_diag();
  if (name == "limit_cycle_3d") return zoo_detail::make_limit_cycle_3d();
  if (name == "cyclic_feedback_3d") return zoo_detail::make_cyclic_feedback_3d();
  if (name == "may_leonard") return zoo_detail::make_may_leonard();
  if (name == "rotation_counterexample") return zoo_detail::make_rotation_counterexample();
  std::string known;
  for (const auto& n : zoo_names()) known += (known.empty() ? "" : ", ") + n;
  throw UnknownModel("unknown model '" + name + "' (known: " + known + ")");
}

// --- model spec (de)serialization -------------------------------------------

namespace zoo_detail {

inline std::vector<PolynomialCoordinate> linear_coords(const MatrixXd& A) {
  const int n = static_cast<int>(A.rows());
  std::vector<PolynomialCoordinate> coords(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (A(i, j) == 0.0) continue;
      MonomialTerm t;
      t.exponents.assign(n, 0);
      t.exponents[j] = 1;
      t.coefficient = A(i, j);
      coords[i].push_back(std::move(t));
    }
  return coords;
}

inline MonomialTerm term3(int e1, int e2, int e3, double c) {
  MonomialTerm t;
  t.exponents = {e1, e2, e3};
  t.coefficient = c;
  return t;
}

inline std::vector<PolynomialCoordinate> limit_cycle_coords(double c) {
  return {{term3(1, 0, 0, 1), term3(0, 1, 0, -1), term3(3, 0, 0, -1), term3(1, 2, 0, -1)},
          {term3(1, 0, 0, 1), term3(0, 1, 0, 1), term3(2, 1, 0, -1), term3(0, 3, 0, -1)},
          {term3(0, 0, 1, -c)}};
}

inline std::vector<PolynomialCoordinate> may_leonard_coords(double a, double b) {
  return {{term3(1, 0, 0, 1), term3(2, 0, 0, -1), term3(1, 1, 0, -a), term3(1, 0, 1, -b)},
          {term3(0, 1, 0, 1), term3(0, 2, 0, -1), term3(0, 1, 1, -a), term3(1, 1, 0, -b)},
          {term3(0, 0, 1, 1), term3(0, 0, 2, -1), term3(1, 0, 1, -a), term3(0, 1, 1, -b)}};
}

}  // namespace zoo_detail

/// Exportable spec of a zoo model: polynomial systems list their monomials,
/// the tanh loop lists its named parameters under a builtin spec.
inline nlohmann::json zoo_model_spec_json(const std::string& name) {
  if (name == "linear_diag") {
    MatrixXd A = zoo_detail::vec3(-1, -1, -3).asDiagonal();
    return {{"name", name},
            {"kind", "polynomial"},
            {"coefficients", polynomial_coords_to_json(zoo_detail::linear_coords(A))}};
  }
  if (name == "limit_cycle_3d")
    return {{"name", name},
            {"kind", "polynomial"},
            {"coefficients", polynomial_coords_to_json(zoo_detail::limit_cycle_coords(25.0))}};
  if (name == "may_leonard")
    return {{"name", name},
            {"kind", "polynomial"},
            {"coefficients", polynomial_coords_to_json(zoo_detail::may_leonard_coords(0.8, 1.3))}};
  if (name == "rotation_counterexample") {
    MatrixXd A = MatrixXd::Zero(3, 3);
    A(0, 2) = -1.0;
    A(2, 0) = 1.0;
    return {{"name", name},
            {"kind", "polynomial"},
            {"coefficients", polynomial_coords_to_json(zoo_detail::linear_coords(A))}};
  }
  if (name == "cyclic_feedback_3d")
    return {{"name", name}, {"kind", "builtin"}, {"coefficients", {{"gain", 5.0}}}};
  throw UnknownModel("unknown model '" + name + "'");
}

/// Model ingestion: {"name":..., "kind":"builtin"|"polynomial", "coefficients":...}.
inline VectorFieldModel model_from_json(const nlohmann::json& j) {
  if (j.is_string()) return get_model(j.get<std::string>()).model;
  if (!j.is_object()) throw ValidationError("model spec must be an object or a zoo name");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (it.key() != "name" && it.key() != "kind" && it.key() != "coefficients")
      throw ValidationError("model spec: unknown key '" + it.key() + "'");
  const std::string kind = j.value("kind", "builtin");
  if (kind == "builtin") {
    if (!j.contains("name")) throw ValidationError("model spec: builtin requires 'name'");
    const std::string name = j.at("name").get<std::string>();
    if (j.contains("coefficients")) {
      const auto& params = j.at("coefficients");
      if (!params.is_object()) throw ValidationError("builtin coefficients must be an object of named parameters");
      if (name == "cyclic_feedback_3d") {
        for (auto it = params.begin(); it != params.end(); ++it)
          if (it.key() != "gain") throw ValidationError("cyclic_feedback_3d: unknown parameter '" + it.key() + "'");
        return zoo_detail::make_cyclic_feedback_3d(params.value("gain", 5.0)).model;
      }
      if (name == "limit_cycle_3d") {
        for (auto it = params.begin(); it != params.end(); ++it)
          if (it.key() != "c") throw ValidationError("limit_cycle_3d: unknown parameter '" + it.key() + "'");
        return zoo_detail::make_limit_cycle_3d(params.value("c", 25.0)).model;
      }
      if (name == "may_leonard") {
        for (auto it = params.begin(); it != params.end(); ++it)
          if (it.key() != "alpha" && it.key() != "beta")
            throw ValidationError("may_leonard: unknown parameter '" + it.key() + "'");
        return zoo_detail::make_may_leonard(params.value("alpha", 0.8), params.value("beta", 1.3)).model;
      }
      throw ValidationError("builtin '" + name + "' takes no parameters");
    }
    return get_model(name).model;
  }
  if (kind == "polynomial") {
    if (!j.contains("coefficients")) throw ValidationError("model spec: polynomial requires 'coefficients'");
    auto coords = polynomial_coords_from_json(j.at("coefficients"));
    return polynomial_model(std::move(coords), j.value("name", "polynomial"));
  }
  throw ValidationError("model spec: kind must be 'builtin' or 'polynomial'");
}

}  // namespace conewatch
