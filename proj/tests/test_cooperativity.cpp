#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "conewatch/cooperativity.hpp"
#include "conewatch/zoo.hpp"

using namespace conewatch;

namespace {

VectorXd vec3(double a, double b, double c) {
  VectorXd v(3);
  v << a, b, c;
  return v;
}

std::vector<VectorXd> box_grid(const Box& box, int per_axis) {
  std::vector<VectorXd> pts;
  for (int i = 0; i < per_axis; ++i)
    for (int j = 0; j < per_axis; ++j)
      for (int k = 0; k < per_axis; ++k) {
        VectorXd x(3);
        x << box.lo[0] + (box.hi[0] - box.lo[0]) * i / (per_axis - 1),
            box.lo[1] + (box.hi[1] - box.lo[1]) * j / (per_axis - 1),
            box.lo[2] + (box.hi[2] - box.lo[2]) * k / (per_axis - 1);
        pts.push_back(x);
      }
  return pts;
}

}  // namespace

TEST_CASE("smith condition oracle on the linear node", "[cooperativity]") {
  const auto entry = get_model("linear_diag");
  const std::vector<VectorXd> pts = {vec3(0, 0, 0), vec3(1, 1, 1), vec3(-2, 0.5, 2)};

  const LmiReport pass = smith_lmi_check(entry.recommended_cone, entry.model,
                                         [](const VectorXd&) { return 2.5; }, pts);
  CHECK(pass.pass);
  CHECK(pass.worst_eigenvalue == Catch::Approx(-0.5).margin(1e-9));
  CHECK(pass.points_checked == 3);

  const LmiReport fail = smith_lmi_check(entry.recommended_cone, entry.model,
                                         [](const VectorXd&) { return 0.0; }, pts);
  CHECK_FALSE(fail.pass);
  CHECK(fail.worst_eigenvalue == Catch::Approx(2.0).margin(1e-9));
}

TEST_CASE("zero field fails for any positive lambda on an indefinite cone", "[cooperativity]") {
  VectorFieldModel still;
  still.dim = 3;
  still.name = "still";
  still.field = [](const VectorXd& x) { return VectorXd::Zero(x.size()); };
  still.jacobian = [](const VectorXd&) { return MatrixXd::Zero(3, 3); };
  const QuadraticCone cone = build_cone(vec3(-1, -1, 1));
  const LmiReport rep =
      smith_lmi_check(cone, still, [](const VectorXd&) { return 1.0; }, {vec3(0, 0, 0)});
  CHECK_FALSE(rep.pass);
  CHECK(rep.worst_eigenvalue == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("smith matrix is symmetric and scales covariantly with the cone", "[cooperativity]") {
  const auto entry = get_model("limit_cycle_3d");
  const std::vector<VectorXd> pts = box_grid(entry.default_box, 3);
  auto lam = [](const VectorXd&) { return 48.0; };

  const LmiReport base = smith_lmi_check(entry.recommended_cone, entry.model, lam, pts);
  const QuadraticCone scaled = build_cone(3.0 * vec3(-1, -1, 1));
  const LmiReport big = smith_lmi_check(scaled, entry.model, lam, pts);
  CHECK(big.worst_eigenvalue == Catch::Approx(3.0 * base.worst_eigenvalue).epsilon(1e-9));
  CHECK(big.pass == base.pass);
}

TEST_CASE("averaged jacobian reduces to known closed forms", "[cooperativity]") {
  SECTION("constant jacobian is returned untouched") {
    const auto entry = get_model("linear_diag");
    const MatrixXd A = vec3(-1, -1, -3).asDiagonal();
    const MatrixXd Q = averaged_jacobian(entry.model, vec3(1, 0, 0), vec3(0, 1, 1), 1.5, 4);
    CHECK((Q - A).cwiseAbs().maxCoeff() < 1e-12);
  }
  SECTION("degenerate segment gives the pointwise jacobian") {
    const auto entry = get_model("limit_cycle_3d");
    const VectorXd x = vec3(0.5, 0.2, 0.1);
    const VectorXd xt = integrate(entry.model, x, 1.0).states.back();
    const MatrixXd Q = averaged_jacobian(entry.model, x, x, 1.0, 6);
    CHECK((Q - entry.model.eval_jacobian(xt)).cwiseAbs().maxCoeff() < 1e-9);
  }
  SECTION("quadratic field averages exactly") {
    // F = (x1^2, 0, 0); between 0 and e1 the (1,1) entry integrates to 1.
    std::vector<PolynomialCoordinate> coords(3);
    MonomialTerm t;
    t.exponents = {2, 0, 0};
    t.coefficient = 1.0;
    coords[0].push_back(t);
    const VectorFieldModel quad = polynomial_model(coords, "quad");
    const MatrixXd Q = averaged_jacobian(quad, VectorXd::Zero(3), vec3(1, 0, 0), 0.0, 2);
    CHECK(Q(0, 0) == Catch::Approx(1.0).margin(1e-14));
    CHECK(Q.cwiseAbs().sum() == Catch::Approx(1.0).margin(1e-14));
  }
}

TEST_CASE("fundamental matrix keeps the cone on the linear node", "[cooperativity]") {
  const auto entry = get_model("linear_diag");
  const InvarianceReport rep = fundamental_cone_invariance(
      entry.recommended_cone, entry.model, vec3(1, 0.5, -0.5), vec3(-1, 0, 1), 20.0, 200, 17);
  CHECK(rep.pass);
  CHECK(rep.violations_total == 0);
  CHECK(rep.boundary_samples == 200);
  CHECK(rep.checkpoints > 0);
}

TEST_CASE("rotation generator breaks cone invariance quickly", "[cooperativity]") {
  const auto entry = get_model("rotation_counterexample");
  const InvarianceReport rep = fundamental_cone_invariance(
      entry.recommended_cone, entry.model, vec3(1, 0, 0), vec3(0, 1, 0), 5.0, 50, 17);
  CHECK_FALSE(rep.pass);
  CHECK(rep.violations_total > 0);
  REQUIRE_FALSE(rep.violations.empty());
  // Recorded evidence really is exterior to the cone.
  const auto& viol = rep.violations.front();
  CHECK(viol.form_value > 0);
  CHECK(viol.t > 0);
}

TEST_CASE("frozen pair at an equilibrium reproduces the matrix exponential", "[cooperativity]") {
  const auto entry = get_model("linear_diag");
  const VectorXd eq = VectorXd::Zero(3);
  const InvarianceReport rep = fundamental_cone_invariance(entry.recommended_cone, entry.model,
                                                           eq, eq, 2.0, 50, 23);
  CHECK(rep.pass);
}

TEST_CASE("empirical monotonicity agrees with the certificates", "[cooperativity]") {
  const auto linear = get_model("linear_diag");
  const MonotonicityReport good = empirical_monotonicity(
      linear.recommended_cone, linear.model, 200, 20.0, 29, linear.default_box);
  CHECK(good.pairs_tested == 200);
  CHECK(good.violations == 0);

  const auto rot = get_model("rotation_counterexample");
  const MonotonicityReport bad = empirical_monotonicity(
      rot.recommended_cone, rot.model, 100, 10.0, 29, rot.default_box);
  CHECK(bad.violations > 0);
  REQUIRE(bad.first_violation.has_value());
  CHECK(bad.first_violation->form_value > 0);
}

TEST_CASE("smith certificate implies fundamental invariance along a pair", "[cooperativity]") {
  // Consistency chain on the limit cycle model: the LMI holds on the hull of
  // two trajectories, so the averaged linear system must keep the cone.
  const auto entry = get_model("limit_cycle_3d");
  const VectorXd xi = vec3(0.4, 0.1, 0.3), xj = vec3(-0.2, 0.5, -0.1);
  const Trajectory ti = integrate(entry.model, xi, 10.0);
  const Trajectory tj = integrate(entry.model, xj, 10.0);
  std::vector<VectorXd> hull;
  for (std::size_t s = 0; s < ti.size(); s += 100)
    for (double tau : {0.0, 0.25, 0.5, 0.75, 1.0})
      hull.push_back(tau * ti.states[s] + (1 - tau) * tj.states[s]);
  const LmiReport lmi = smith_lmi_check(entry.recommended_cone, entry.model,
                                        [](const VectorXd&) { return 48.0; }, hull);
  REQUIRE(lmi.pass);

  const InvarianceReport inv = fundamental_cone_invariance(entry.recommended_cone, entry.model,
                                                           xi, xj, 10.0, 100, 31);
  CHECK(inv.pass);
}

TEST_CASE("minimal smith lambda brackets the analytic window", "[cooperativity]") {
  // On [-2,2]^3 the limit cycle model passes iff lambda is in (46, 50).
  const auto entry = get_model("limit_cycle_3d");
  const auto pts = box_grid(entry.default_box, 9);
  const auto lam = minimal_smith_lambda(entry.recommended_cone, entry.model, pts);
  REQUIRE(lam.has_value());
  CHECK(*lam == Catch::Approx(46.0).margin(0.01));
}
