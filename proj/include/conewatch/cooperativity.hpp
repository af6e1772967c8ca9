#pragma once

#include <Eigen/Eigenvalues>
#include <functional>
#include <optional>
#include <vector>

#include "conewatch/cone.hpp"
#include "conewatch/common.hpp"
#include "conewatch/integrate.hpp"
#include "conewatch/model.hpp"

namespace conewatch {

/// Pointwise matrix-inequality scan: S(x) = Q J(x) + J(x)' Q + lambda(x) Q
/// must be negative definite at every checked point.
struct LmiReport {
  int points_checked = 0;
  double worst_eigenvalue = -std::numeric_limits<double>::infinity();
  VectorXd worst_point;
  bool pass = false;
  double margin = 0.0;
};

inline LmiReport smith_lmi_check(const QuadraticCone& cone, const VectorFieldModel& model,
                                 const std::function<double(const VectorXd&)>& lambda_fn,
                                 const std::vector<VectorXd>& points, double margin = 1e-8) {
  if (margin < 0) throw ValidationError("margin must be nonnegative");
  if (points.empty()) throw ValidationError("smith_lmi_check needs at least one point");
  if (cone.dim != model.dim) throw DimensionMismatch("cone dimension != model dimension");
  if (!model.field && !model.jacobian)
    throw JacobianUnavailable("model '" + model.name + "' has neither field nor jacobian");

  LmiReport report;
  report.margin = margin;
  const MatrixXd& Q = cone.q_matrix;
  for (const auto& x : points) {
    require_dim(x, cone.dim, "smith_lmi_check point");
    const MatrixXd J = model.eval_jacobian(x);
    MatrixXd S = Q * J + J.transpose() * Q + lambda_fn(x) * Q;
    S = 0.5 * (S + S.transpose());
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(S, Eigen::EigenvaluesOnly);
    const double top = es.eigenvalues().maxCoeff();
    if (top > report.worst_eigenvalue) {
      report.worst_eigenvalue = top;
      report.worst_point = x;
    }
    ++report.points_checked;
  }
  report.pass = report.worst_eigenvalue < -margin;
  return report;
}

namespace detail {

/// Gauss-Legendre nodes/weights on [0,1] via the Golub-Welsch tridiagonal.
inline void gauss_legendre_01(int m, std::vector<double>& nodes, std::vector<double>& weights) {
  if (m < 1) throw ValidationError("quadrature needs at least one node");
  MatrixXd J = MatrixXd::Zero(m, m);
  for (int i = 1; i < m; ++i) {
    const double b = i / std::sqrt(4.0 * i * i - 1.0);
    J(i - 1, i) = b;
    J(i, i - 1) = b;
  }
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(J);
  nodes.resize(m);
  weights.resize(m);
  for (int i = 0; i < m; ++i) {
    nodes[i] = 0.5 * (1.0 + es.eigenvalues()[i]);
    const double q0 = es.eigenvectors()(0, i);
    weights[i] = q0 * q0;  // half of the [-1,1] weight 2*q0^2
  }
}

inline MatrixXd segment_averaged_jacobian(const VectorFieldModel& model, const VectorXd& pi,
                                          const VectorXd& pj, const std::vector<double>& nodes,
                                          const std::vector<double>& weights) {
  MatrixXd Q = MatrixXd::Zero(model.dim, model.dim);
  for (std::size_t q = 0; q < nodes.size(); ++q)
    Q += weights[q] * model.eval_jacobian(nodes[q] * pi + (1.0 - nodes[q]) * pj);
  return Q;
}

}  // namespace detail

/// Jacobian of F averaged over the straight segment between the two flow
/// images at time t, by Gauss-Legendre quadrature.
inline MatrixXd averaged_jacobian(const VectorFieldModel& model, const VectorXd& x_i,
                                  const VectorXd& x_j, double t, int nodes,
                                  const IntegratorConfig& cfg = {}) {
  if (nodes < 2) throw ValidationError("averaged_jacobian needs at least 2 quadrature nodes");
  require_dim(x_i, model.dim, "averaged_jacobian");
  require_dim(x_j, model.dim, "averaged_jacobian");
  VectorXd pi = x_i, pj = x_j;
  if (t > 0) {
    pi = integrate(model, x_i, t, cfg).states.back();
    pj = (x_i - x_j).norm() == 0.0 ? pi : integrate(model, x_j, t, cfg).states.back();
  }
  std::vector<double> qn, qw;
  detail::gauss_legendre_01(nodes, qn, qw);
  return detail::segment_averaged_jacobian(model, pi, pj, qn, qw);
}

struct ConeViolation {
  double t = 0.0;
  VectorXd vector;
  double form_value = 0.0;
};

/// Cone invariance of the averaged-Jacobian linear system: the fundamental
/// matrix X(t) must push every boundary direction strictly inside for t > 0.
struct InvarianceReport {
  VectorXd x_i, x_j;
  double horizon = 0.0;
  int boundary_samples = 0;
  int checkpoints = 0;
  long violations_total = 0;
  std::vector<ConeViolation> violations;  // capped sample of the violations
  bool pass = false;
};

inline InvarianceReport fundamental_cone_invariance(const QuadraticCone& cone,
                                                    const VectorFieldModel& model,
                                                    const VectorXd& x_i, const VectorXd& x_j,
                                                    double horizon, int m_boundary,
                                                    std::uint64_t rng_seed,
                                                    const IntegratorConfig& cfg = {},
                                                    int quad_nodes = 8) {
  if (!(horizon > 0)) throw ValidationError("horizon must be positive");
  if (m_boundary < 1) throw ValidationError("need at least one boundary sample");
  if (cone.dim != model.dim) throw DimensionMismatch("cone dimension != model dimension");
  const int n = model.dim;

  // Cached trajectories: the averaged Jacobian interpolates these rather than
  // nesting integrations inside the fundamental-matrix right-hand side.
  const Trajectory traj_i = integrate(model, x_i, horizon, cfg);
  const Trajectory traj_j =
      (x_i - x_j).norm() == 0.0 ? traj_i : integrate(model, x_j, horizon, cfg);

  std::vector<double> qn, qw;
  detail::gauss_legendre_01(quad_nodes, qn, qw);

  InvarianceReport report;
  report.x_i = x_i;
  report.x_j = x_j;
  report.horizon = horizon;
  report.boundary_samples = m_boundary;
  const std::vector<VectorXd> boundary = sample_boundary(cone, m_boundary, rng_seed);
  const double t_skip = 1e-3 * horizon;
  constexpr std::size_t violation_cap = 256;

  auto rhs = [&](double t, const VectorXd& y, VectorXd& dy) {
    Eigen::Map<const MatrixXd> X(y.data(), n, n);
    const MatrixXd Q = detail::segment_averaged_jacobian(model, traj_i.state_at(t),
                                                         traj_j.state_at(t), qn, qw);
    dy.resize(y.size());
    Eigen::Map<MatrixXd>(dy.data(), n, n) = Q * X;
  };

  VectorXd y0(n * n);
  Eigen::Map<MatrixXd>(y0.data(), n, n) = MatrixXd::Identity(n, n);
  detail::DormandPrince rk(rhs, cfg, 0);
  rk.run(y0, horizon, [&](double t, const VectorXd& y, const VectorXd&) {
    if (t <= t_skip) return;
    ++report.checkpoints;
    Eigen::Map<const MatrixXd> X(y.data(), n, n);
    for (const auto& v : boundary) {
      const Membership mem = classify_point(cone, X * v);
      if (mem.region != MembershipRegion::Interior) {
        ++report.violations_total;
        if (report.violations.size() < violation_cap)
          report.violations.push_back({t, v, mem.form_value});
      }
    }
  });
  report.pass = report.violations_total == 0;
  return report;
}

/// Empirical monotonicity of the nonlinear flow: ordered pairs must stay
/// ordered at every checkpoint.
struct MonotonicityReport {
  int pairs_requested = 0;
  int pairs_tested = 0;
  int pairs_skipped = 0;  // integration failures (blow-up)
  int violations = 0;     // pairs that lost ordering at some checkpoint
  struct Evidence {
    int pair_index;
    double t;
    VectorXd x0, y0;
    double form_value;
  };
  std::optional<Evidence> first_violation;
};

inline MonotonicityReport empirical_monotonicity(const QuadraticCone& cone,
                                                 const VectorFieldModel& model, int n_pairs,
                                                 double horizon, std::uint64_t rng_seed,
                                                 const Box& box, const IntegratorConfig& cfg = {}) {
  if (n_pairs < 1) throw ValidationError("need at least one pair");
  if (cone.dim != model.dim) throw DimensionMismatch("cone dimension != model dimension");
  MonotonicityReport report;
  report.pairs_requested = n_pairs;

  for (int p = 0; p < n_pairs; ++p) {
    SplitMix64 rng(derive_seed(rng_seed, static_cast<std::uint64_t>(p)));
    const VectorXd x0 = rng.uniform_in_box(box);
    // Alternate boundary and interior cone directions; the offset is never zero.
    const double rho = (p % 2 == 0) ? 1.0 : 0.9 * rng.next_double();
    const VectorXd v = detail::sample_cone_direction(cone, rng, rho);
    const double r = rng.next_open01() * 0.25 * box.diameter();
    const VectorXd y0 = x0 + r * v;

    Trajectory tx, ty;
    try {
      tx = integrate(model, x0, horizon, cfg);
      ty = integrate(model, y0, horizon, cfg);
    } catch (const BlowUp&) {
      ++report.pairs_skipped;
      continue;
    } catch (const StepFailure&) {
      ++report.pairs_skipped;
      continue;
    }
    ++report.pairs_tested;

    const std::size_t len = std::min(tx.size(), ty.size());
    for (std::size_t s = 0; s < len; ++s) {
      const Membership mem = classify_point(cone, tx.states[s] - ty.states[s]);
      if (mem.region == MembershipRegion::Exterior) {
        ++report.violations;
        if (!report.first_violation)
          report.first_violation = {p, tx.times[s], x0, y0, mem.form_value};
        break;
      }
    }
  }
  return report;
}

/// Least lambda for which the Smith inequality passes on the given points,
/// located by coarse scan plus bisection; empty when no lambda in [lo, hi] works.
inline std::optional<double> minimal_smith_lambda(const QuadraticCone& cone,
                                                  const VectorFieldModel& model,
                                                  const std::vector<VectorXd>& points,
                                                  double margin = 1e-8, double lo = 0.0,
                                                  double hi = 200.0) {
  auto passes = [&](double lam) {
    return smith_lmi_check(cone, model, [lam](const VectorXd&) { return lam; }, points, margin)
        .pass;
  };
  const int scan = 64;
  double first_pass = std::numeric_limits<double>::quiet_NaN();
  double last_fail = lo;
  for (int i = 0; i <= scan; ++i) {
    const double lam = lo + (hi - lo) * i / scan;
    if (passes(lam)) {
      first_pass = lam;
      break;
    }
    last_fail = lam;
  }
  if (std::isnan(first_pass)) return std::nullopt;
  double a = last_fail, b = first_pass;
  for (int it = 0; it < 50; ++it) {
    const double mid = 0.5 * (a + b);
    (passes(mid) ? b : a) = mid;
  }
  return b;
}

}  // namespace conewatch
