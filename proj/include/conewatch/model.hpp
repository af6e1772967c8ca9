#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "conewatch/common.hpp"
#include "conewatch/rng.hpp"

#include <nlohmann/json.hpp>

namespace conewatch {

/// Autonomous vector field x' = F(x) with an optional analytic Jacobian.
/// When the Jacobian is absent a central finite-difference fallback is used.
struct VectorFieldModel {
  int dim = 0;
  std::string name;
  std::function<VectorXd(const VectorXd&)> field;
  std::function<MatrixXd(const VectorXd&)> jacobian;  // may be empty

  VectorXd eval_field(const VectorXd& x) const {
    require_dim(x, dim, "field");
    return field(x);
  }

  MatrixXd eval_jacobian(const VectorXd& x) const {
    require_dim(x, dim, "jacobian");
    if (jacobian) return jacobian(x);
    if (!field) throw JacobianUnavailable("model '" + name + "' has no field to difference");
    // Central differences, step scaled with the state magnitude.
    const double h = 1e-6 * (1.0 + x.norm());
    MatrixXd J(dim, dim);
    VectorXd xp = x, xm = x;
    for (int c = 0; c < dim; ++c) {
      xp[c] = x[c] + h;
      xm[c] = x[c] - h;
      J.col(c) = (field(xp) - field(xm)) / (2.0 * h);
      xp[c] = x[c];
      xm[c] = x[c];
    }
    return J;
  }
};

/// Max relative disagreement between the analytic Jacobian and central
/// differences of the field at random points of the box.
inline double jacobian_consistency_error(const VectorFieldModel& model, const Box& box,
                                         int n_points, std::uint64_t seed) {
  if (!model.jacobian) return 0.0;
  SplitMix64 rng(seed);
  double worst = 0.0;
  VectorFieldModel fd = model;
  fd.jacobian = nullptr;
  for (int i = 0; i < n_points; ++i) {
    const VectorXd x = rng.uniform_in_box(box);
    const MatrixXd Ja = model.eval_jacobian(x);
    const MatrixXd Jn = fd.eval_jacobian(x);
    const double scale = std::max(1.0, Ja.cwiseAbs().maxCoeff());
    worst = std::max(worst, (Ja - Jn).cwiseAbs().maxCoeff() / scale);
  }
  return worst;
}

/// Time-stamped solution samples on a uniform grid (plus the exact endpoint),
/// with the field value stored at every sample so that dense cubic Hermite
/// interpolation needs no further field evaluations.
struct Trajectory {
  std::vector<double> times;
  std::vector<VectorXd> states;
  std::vector<VectorXd> derivs;

  const VectorXd& x0() const { return states.front(); }
  std::size_t size() const { return times.size(); }
  double horizon() const { return times.back(); }

  /// First sample index with time >= t.
  std::size_t index_at_or_after(double t) const {
    auto it = std::lower_bound(times.begin(), times.end(), t - 1e-12);
    return static_cast<std::size_t>(it - times.begin());
  }

  /// Cubic Hermite interpolation; t clamped to the sampled range.
  VectorXd state_at(double t) const {
    if (t <= times.front()) return states.front();
    if (t >= times.back()) return states.back();
    auto it = std::upper_bound(times.begin(), times.end(), t);
    const std::size_t i = static_cast<std::size_t>(it - times.begin()) - 1;
    const double h = times[i + 1] - times[i];
    const double s = (t - times[i]) / h;
    const double s2 = s * s, s3 = s2 * s;
    const double h00 = 2 * s3 - 3 * s2 + 1;
    const double h10 = s3 - 2 * s2 + s;
    const double h01 = -2 * s3 + 3 * s2;
    const double h11 = s3 - s2;
    return h00 * states[i] + (h10 * h) * derivs[i] + h01 * states[i + 1] +
           (h11 * h) * derivs[i + 1];
  }

  void write_csv(std::ostream& os) const {
    const int n = static_cast<int>(states.front().size());
    os << "t";
    for (int i = 1; i <= n; ++i) os << ",x" << i;
    os << "\n";
    for (std::size_t r = 0; r < times.size(); ++r)
      os << format_double(times[r]) << "," << format_vector(states[r]) << "\n";
  }
};

/// Flow Jacobians M(t) = D_x Phi_t along one trajectory, M(0) = I.
struct FundamentalMatrixPath {
  std::vector<double> times;
  std::vector<MatrixXd> matrices;

  const MatrixXd& at_index(std::size_t i) const { return matrices[i]; }
  const MatrixXd& final() const { return matrices.back(); }
};

// --- concrete model builders ------------------------------------------------

inline VectorFieldModel linear_model(const MatrixXd& A, std::string name = "linear") {
  VectorFieldModel m;
  m.dim = static_cast<int>(A.rows());
  m.name = std::move(name);
  m.field = [A](const VectorXd& x) -> VectorXd { return A * x; };
  m.jacobian = [A](const VectorXd&) -> MatrixXd { return A; };
  return m;
}

/// One output coordinate of a polynomial field: sum of monomial terms.
struct MonomialTerm {
  std::vector<int> exponents;
  double coefficient = 0.0;
};

using PolynomialCoordinate = std::vector<MonomialTerm>;

inline VectorFieldModel polynomial_model(std::vector<PolynomialCoordinate> coords,
                                         std::string name = "polynomial") {
  const int n = static_cast<int>(coords.size());
  if (n < 1) throw ValidationError("polynomial model needs at least one coordinate");
  for (const auto& coord : coords)
    for (const auto& term : coord)
      if (static_cast<int>(term.exponents.size()) != n)
        throw ValidationError("monomial exponent tuple length must equal the model dimension");

  auto eval_monomial = [](const VectorXd& x, const MonomialTerm& t) {
    double v = t.coefficient;
    for (std::size_t i = 0; i < t.exponents.size(); ++i) {
      for (int e = 0; e < t.exponents[i]; ++e) v *= x[static_cast<Eigen::Index>(i)];
    }
    return v;
  };

  VectorFieldModel m;
  m.dim = n;
  m.name = std::move(name);
  auto shared = std::make_shared<std::vector<PolynomialCoordinate>>(std::move(coords));
  m.field = [shared, eval_monomial, n](const VectorXd& x) -> VectorXd {
    VectorXd out = VectorXd::Zero(n);
    for (int i = 0; i < n; ++i)
      for (const auto& term : (*shared)[i]) out[i] += eval_monomial(x, term);
    return out;
  };
  m.jacobian = [shared, n](const VectorXd& x) -> MatrixXd {
    MatrixXd J = MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
      for (const auto& term : (*shared)[i]) {
        for (int c = 0; c < n; ++c) {
          const int e = term.exponents[c];
          if (e == 0) continue;
          double v = term.coefficient * e;
          for (int d = 0; d < n; ++d) {
            const int p = term.exponents[d] - (d == c ? 1 : 0);
            for (int q = 0; q < p; ++q) v *= x[d];
          }
          J(i, c) += v;
        }
      }
    }
    return J;
  };
  return m;
}

inline std::vector<PolynomialCoordinate> polynomial_coords_from_json(const nlohmann::json& coeffs) {
  if (!coeffs.is_array() || coeffs.empty())
    throw ValidationError("polynomial coefficients must be a nonempty array of coordinate term lists");
  std::vector<PolynomialCoordinate> coords;
  for (const auto& coord : coeffs) {
    PolynomialCoordinate pc;
    if (!coord.is_array())
      throw ValidationError("each polynomial coordinate must be an array of terms");
    for (const auto& term : coord) {
      if (!term.is_object() || !term.contains("exponents") || !term.contains("coefficient"))
        throw ValidationError("polynomial term must have 'exponents' and 'coefficient'");
      for (auto it = term.begin(); it != term.end(); ++it)
        if (it.key() != "exponents" && it.key() != "coefficient")
          throw ValidationError("polynomial term: unknown key '" + it.key() + "'");
      MonomialTerm t;
      t.coefficient = term.at("coefficient").get<double>();
      for (const auto& e : term.at("exponents")) t.exponents.push_back(e.get<int>());
      pc.push_back(std::move(t));
    }
    coords.push_back(std::move(pc));
  }
  return coords;
}

inline nlohmann::json polynomial_coords_to_json(const std::vector<PolynomialCoordinate>& coords) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& coord : coords) {
    nlohmann::json jc = nlohmann::json::array();
    for (const auto& term : coord)
      jc.push_back({{"exponents", term.exponents}, {"coefficient", term.coefficient}});
    out.push_back(jc);
  }
  return out;
}

}  // namespace conewatch
