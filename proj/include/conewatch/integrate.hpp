#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "conewatch/common.hpp"
#include "conewatch/model.hpp"
#include "conewatch/rng.hpp"

namespace conewatch {

struct IntegratorConfig {
  double rel_tol = 1e-9;
  double abs_tol = 1e-12;
  double max_step = 1.0;
  double sample_dt = 0.01;  // trajectory output grid; every sample is a step endpoint
  double norm_cap = 1e6;    // above this the run is declared a blow-up

  void validate() const {
    if (!(rel_tol > 0) || !(abs_tol > 0)) throw ValidationError("integrator tolerances must be positive");
    if (!(max_step > 0)) throw ValidationError("max_step must be positive");
    if (!(sample_dt > 0)) throw ValidationError("sample_dt must be positive");
    if (!(norm_cap > 0)) throw ValidationError("norm_cap must be positive");
  }
};

namespace detail {

// Dormand-Prince 5(4) pair, FSAL. Steps are clamped so that every sample
// time is hit exactly; the PI controller keeps its own unclamped step size.
class DormandPrince {
 public:
  using Rhs = std::function<void(double, const VectorXd&, VectorXd&)>;
  using SampleFn = std::function<void(double, const VectorXd&, const VectorXd&)>;

  DormandPrince(Rhs rhs, const IntegratorConfig& cfg, int blow_dim)
      : rhs_(std::move(rhs)), cfg_(cfg), blow_dim_(blow_dim) {
    cfg_.validate();
  }

  void run(const VectorXd& y0, double t_end, const SampleFn& on_sample) {
    if (!(t_end > 0)) throw ValidationError("t_end must be positive");
    const Eigen::Index n = y0.size();
    VectorXd y = y0;
    VectorXd k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), y5(n), yerr(n);
    rhs_(0.0, y, k1);

    double t = 0.0;
    long sample_idx = 0;
    on_sample(0.0, y, k1);
    check_blow(0.0, y);

    double h_ctrl = std::min({cfg_.max_step, cfg_.sample_dt, 1e-2});
    double facold = 1e-4;
    bool rejected = false;
    const double t_eps = 1e-12 * std::max(1.0, t_end);

    while (t < t_end - t_eps) {
      const double next_sample = std::min((sample_idx + 1) * cfg_.sample_dt, t_end);
      const double h = std::min(h_ctrl, next_sample - t);
      if (h < 1e-14 * std::max(1.0, std::abs(t)))
        throw StepFailure(t, "step size underflow at t=" + format_double(t));

      // stages
      ytmp = y + h * (a21 * k1);
      rhs_(t + c2 * h, ytmp, k2);
      ytmp = y + h * (a31 * k1 + a32 * k2);
      rhs_(t + c3 * h, ytmp, k3);
      ytmp = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
      rhs_(t + c4 * h, ytmp, k4);
      ytmp = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
      rhs_(t + c5 * h, ytmp, k5);
      ytmp = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
      rhs_(t + h, ytmp, k6);
      y5 = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
      rhs_(t + h, y5, k7);
      yerr = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

      double err = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        const double sk = cfg_.abs_tol + cfg_.rel_tol * std::max(std::abs(y[i]), std::abs(y5[i]));
        const double r = yerr[i] / sk;
        err += r * r;
      }
      err = std::sqrt(err / static_cast<double>(n));
      if (!std::isfinite(err)) err = 2.0;  // NaN/Inf in stages: force rejection

      const double fac11 = std::pow(std::max(err, 1e-30), expo1);
      if (err <= 1.0) {
        double fac = fac11 / std::pow(facold, pi_beta);
        fac = std::max(inv_fac_max, std::min(inv_fac_min, fac / safety));
        double h_new = h / fac;
        facold = std::max(err, 1e-4);
        if (rejected) h_new = std::min(h_new, h);
        rejected = false;

        t = (next_sample - t - h <= t_eps) ? next_sample : t + h;
        y.swap(y5);
        k1.swap(k7);
        check_blow(t, y);
        if (t == next_sample) {
          on_sample(t, y, k1);
          if (next_sample < t_end) ++sample_idx;
        }
        h_ctrl = std::min(h_new, cfg_.max_step);
      } else {
        rejected = true;
        h_ctrl = h / std::min(inv_fac_min, fac11 / safety);
      }
    }
  }

 private:
  void check_blow(double t, const VectorXd& y) const {
    const double nrm = blow_dim_ > 0 ? y.head(blow_dim_).norm() : y.norm();
    if (!(nrm <= cfg_.norm_cap))
      throw BlowUp(t, "state norm " + format_double(nrm) + " exceeded cap at t=" + format_double(t));
  }

  // Dormand-Prince coefficients (5th-order propagation, embedded 4th-order error).
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                          a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                          a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                          e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
  static constexpr double safety = 0.9, pi_beta = 0.04, expo1 = 0.2 - pi_beta * 0.75;
  static constexpr double inv_fac_min = 5.0;   // max growth 10x, max shrink 5x per step
  static constexpr double inv_fac_max = 0.1;

  Rhs rhs_;
  IntegratorConfig cfg_;
  int blow_dim_;
};

}  // namespace detail

/// Integrate x' = F(x) from x0 to t_end with samples every cfg.sample_dt.
inline Trajectory integrate(const VectorFieldModel& model, const VectorXd& x0, double t_end,
                            const IntegratorConfig& cfg = {}) {
  require_dim(x0, model.dim, "integrate");
  Trajectory traj;
  detail::DormandPrince rk([&model](double, const VectorXd& y, VectorXd& dy) { dy = model.field(y); },
                           cfg, model.dim);
  rk.run(x0, t_end, [&traj](double t, const VectorXd& y, const VectorXd& dy) {
    traj.times.push_back(t);
    traj.states.push_back(y);
    traj.derivs.push_back(dy);
  });
  return traj;
}

/// Co-integrate the flow with its variational equation M' = DF(x(t)) M,
/// M(0) = I, error-controlled on the joint system.
inline std::pair<Trajectory, FundamentalMatrixPath> integrate_variational(
    const VectorFieldModel& model, const VectorXd& x0, double t_end,
    const IntegratorConfig& cfg = {}) {
  require_dim(x0, model.dim, "integrate_variational");
  const int n = model.dim;
  VectorXd y0(n + n * n);
  y0.head(n) = x0;
  Eigen::Map<MatrixXd>(y0.data() + n, n, n) = MatrixXd::Identity(n, n);

  auto rhs = [&model, n](double, const VectorXd& y, VectorXd& dy) {
    dy.resize(y.size());
    const VectorXd x = y.head(n);
    dy.head(n) = model.field(x);
    Eigen::Map<const MatrixXd> M(y.data() + n, n, n);
    Eigen::Map<MatrixXd>(dy.data() + n, n, n) = model.eval_jacobian(x) * M;
  };

  Trajectory traj;
  FundamentalMatrixPath path;
  detail::DormandPrince rk(rhs, cfg, n);
  rk.run(y0, t_end, [&](double t, const VectorXd& y, const VectorXd& dy) {
    traj.times.push_back(t);
    traj.states.push_back(y.head(n));
    traj.derivs.push_back(dy.head(n));
    path.times.push_back(t);
    path.matrices.emplace_back(Eigen::Map<const MatrixXd>(y.data() + n, n, n));
  });
  return {std::move(traj), std::move(path)};
}

/// Newton search for roots of F seeded on a regular grid over the box.
/// Roots are deduplicated and restricted to a slightly inflated box.
inline std::vector<VectorXd> find_equilibria(const VectorFieldModel& model, const Box& box,
                                             int grid_per_axis, double newton_tol) {
  if (grid_per_axis < 2) throw ValidationError("grid_per_axis must be >= 2");
  if (box.dim() != model.dim) throw DimensionMismatch("box dimension != model dimension");
  const int n = model.dim;
  const double diam = box.diameter();
  const double dedupe_tol = std::max(1e-8, 1e-6 * diam);

  std::vector<VectorXd> roots;
  std::vector<int> idx(n, 0);
  while (true) {
    VectorXd x(n);
    for (int i = 0; i < n; ++i)
      x[i] = box.lo[i] + (box.hi[i] - box.lo[i]) * idx[i] / double(grid_per_axis - 1);

    for (int iter = 0; iter < 60; ++iter) {
      const VectorXd f = model.eval_field(x);
      if (!f.allFinite()) break;
      if (f.norm() <= newton_tol) {
        if (box.contains(x, 0.02)) {
          bool dup = false;
          for (const auto& r : roots)
            if ((r - x).norm() <= dedupe_tol) {
              dup = true;
              break;
            }
          if (!dup) roots.push_back(x);
        }
        break;
      }
      const MatrixXd J = model.eval_jacobian(x);
      const VectorXd dx = J.colPivHouseholderQr().solve(-f);
      if (!dx.allFinite() || dx.norm() > 10.0 * diam) break;
      x += dx;
    }

    int axis = n - 1;
    while (axis >= 0 && ++idx[axis] == grid_per_axis) idx[axis--] = 0;
    if (axis < 0) break;
  }

  std::sort(roots.begin(), roots.end(), [](const VectorXd& a, const VectorXd& b) {
    for (Eigen::Index i = 0; i < a.size(); ++i)
      if (a[i] != b[i]) return a[i] < b[i];
    return false;
  });
  return roots;
}

/// Heuristic boundedness check: integrate random starts and look for norm-cap
/// crossings. A clean pass is evidence, not a proof, of dissipativity.
struct DissipativityReport {
  bool bounded = false;
  double max_norm = 0.0;
  int starts = 0;
  int blowups = 0;
  std::string note = "heuristic orbit-boundedness probe; not a proof of dissipativity";
};

inline DissipativityReport dissipativity_probe(const VectorFieldModel& model, const Box& box,
                                               double horizon, int m, std::uint64_t rng_seed,
                                               const IntegratorConfig& cfg = {}) {
  if (!(horizon > 0)) throw ValidationError("horizon must be positive");
  DissipativityReport report;
  report.starts = m;
  for (int i = 0; i < m; ++i) {
    SplitMix64 rng(derive_seed(rng_seed, static_cast<std::uint64_t>(i)));
    const VectorXd x0 = rng.uniform_in_box(box);
    try {
      const Trajectory traj = integrate(model, x0, horizon, cfg);
      for (const auto& s : traj.states) report.max_norm = std::max(report.max_norm, s.norm());
    } catch (const BlowUp&) {
      report.blowups++;
      report.max_norm = std::max(report.max_norm, cfg.norm_cap);
    } catch (const StepFailure&) {
      report.blowups++;
    }
  }
  report.bounded = (report.blowups == 0) && (report.max_norm < cfg.norm_cap);
  return report;
}

}  // namespace conewatch
