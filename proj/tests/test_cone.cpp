#include <catch2/catch_amalgamated.hpp>

#include "conewatch/cone.hpp"

using namespace conewatch;

namespace {

VectorXd vec3(double a, double b, double c) {
  VectorXd v(3);
  v << a, b, c;
  return v;
}

QuadraticCone standard_cone3() { return build_cone(vec3(-1, -1, 1)); }

// Random orthogonal basis via QR of a gaussian matrix.
MatrixXd random_orthogonal(int n, SplitMix64& rng) {
  MatrixXd G(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) G(i, j) = rng.gaussian();
  Eigen::HouseholderQR<MatrixXd> qr(G);
  return qr.householderQ();
}

}  // namespace

TEST_CASE("build_cone assigns rank from the negative eigenvalue count", "[cone]") {
  const QuadraticCone c2 = standard_cone3();
  CHECK(c2.dim == 3);
  CHECK(c2.rank == 2);
  CHECK(c2.q_matrix.isApprox(vec3(-1, -1, 1).asDiagonal().toDenseMatrix()));
  // Negative frame spans the first two axes.
  for (int col = 0; col < 2; ++col) {
    const VectorXd u = c2.neg_frame.col(col);
    CHECK(std::abs(u[2]) < 1e-14);
    CHECK(u.dot(c2.q_matrix * u) < 0);
  }

  const QuadraticCone c1 = build_cone(vec3(-1, 1, 1));
  CHECK(c1.rank == 1);

  CHECK_THROWS_AS(build_cone(vec3(-1, -1, -1)), SignatureError);
  CHECK_THROWS_AS(build_cone(vec3(1, 1, 1)), SignatureError);
  CHECK_THROWS_AS(build_cone(vec3(-1, 0, 1)), ValidationError);
  VectorXd one(1);
  one << -1;
  CHECK_THROWS_AS(build_cone(one), ValidationError);
}

TEST_CASE("classify_point on the standard rank-2 cone", "[cone]") {
  const QuadraticCone cone = standard_cone3();

  const Membership in = classify_point(cone, vec3(1, 0, 0));
  CHECK(in.region == MembershipRegion::Interior);
  CHECK(in.form_value == Catch::Approx(-1.0));

  const Membership out = classify_point(cone, vec3(0, 0, 1));
  CHECK(out.region == MembershipRegion::Exterior);
  CHECK(out.form_value == Catch::Approx(1.0));

  const Membership on = classify_point(cone, vec3(1, 0, 1));
  CHECK(on.region == MembershipRegion::Boundary);
  CHECK(std::abs(on.form_value) < 1e-15);

  CHECK(classify_point(cone, VectorXd::Zero(3)).region == MembershipRegion::Boundary);
  CHECK_THROWS_AS(classify_point(cone, VectorXd::Zero(4)), DimensionMismatch);
}

TEST_CASE("order_relation mirrors membership of the difference", "[cone]") {
  const QuadraticCone cone = standard_cone3();
  CHECK(order_relation(cone, vec3(2, 0, 0), vec3(1, 0, 0)) == Ordering::StronglyOrdered);
  CHECK(order_relation(cone, vec3(0.5, 0.5, 0.5), vec3(0.5, 0.5, 0.5)) == Ordering::Ordered);
  CHECK(order_relation(cone, vec3(0, 0, 1), vec3(0, 0, 0)) == Ordering::Unordered);
  // The quadratic form is even, so the relation is symmetric.
  CHECK(order_relation(cone, vec3(1, 0, 0), vec3(2, 0, 0)) == Ordering::StronglyOrdered);
}

TEST_CASE("probe_subspace spans interior directions only", "[cone]") {
  const QuadraticCone cone = standard_cone3();
  const MatrixXd P = probe_subspace(cone);
  REQUIRE(P.cols() == 2);
  CHECK(std::abs(P(2, 0)) < 1e-14);
  CHECK(std::abs(P(2, 1)) < 1e-14);

  SplitMix64 rng(11);
  for (int i = 0; i < 100; ++i) {
    const VectorXd combo = P * rng.unit_vector(2);
    CHECK(classify_point(cone, combo).region == MembershipRegion::Interior);
  }

  const QuadraticCone rank1 = build_cone(vec3(-1, 1, 1));
  const MatrixXd P1 = probe_subspace(rank1);
  REQUIRE(P1.cols() == 1);
  CHECK(std::abs(std::abs(P1(0, 0)) - 1.0) < 1e-14);
}

TEST_CASE("sample_boundary lands on the cone boundary deterministically", "[cone]") {
  const QuadraticCone cone = standard_cone3();
  const auto pts = sample_boundary(cone, 50, 1234);
  REQUIRE(pts.size() == 50);
  for (const auto& v : pts) {
    CHECK(v.norm() == Catch::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(cone.form(v)) <= 1e-12);
    // v1^2 + v2^2 = v3^2 on this cone
    CHECK(v[0] * v[0] + v[1] * v[1] == Catch::Approx(v[2] * v[2]).margin(1e-12));
    CHECK(classify_point(cone, v).region == MembershipRegion::Boundary);
  }
  const auto again = sample_boundary(cone, 50, 1234);
  for (std::size_t i = 0; i < pts.size(); ++i) CHECK((pts[i] - again[i]).norm() == 0.0);

  const auto one = sample_boundary(cone, 1, 7);
  const auto one_again = sample_boundary(cone, 1, 7);
  CHECK((one[0] - one_again[0]).norm() == 0.0);
}

TEST_CASE("probe_neighborhood stays in the probe disc and off the center", "[cone]") {
  const QuadraticCone cone = standard_cone3();
  const VectorXd x = VectorXd::Zero(3);
  const auto pts = probe_neighborhood(cone, x, 1.0, 200, 99);
  REQUIRE(pts.size() == 200);
  for (const auto& y : pts) {
    const VectorXd d = y - x;
    CHECK(d.norm() > 0.0);
    CHECK(d.norm() < 1.0);
    CHECK(std::abs(d[2]) < 1e-14);  // inside span{e1,e2}
    CHECK(order_relation(cone, y, x) == Ordering::StronglyOrdered);
  }
  CHECK(probe_neighborhood(cone, x, 0.5, 0, 1).empty());
}

TEST_CASE("cone membership is homogeneous and frames behave", "[cone]") {
  SplitMix64 master(2024);
  std::vector<QuadraticCone> cones;
  cones.push_back(standard_cone3());
  for (int i = 0; i < 3; ++i) {  // random-basis signature (2,1)
    SplitMix64 rng(master.next_u64());
    VectorXd ev = vec3(-1 - rng.next_double(), -0.5 - rng.next_double(), 0.5 + rng.next_double());
    cones.push_back(build_cone(ev, random_orthogonal(3, rng)));
  }
  for (int i = 0; i < 2; ++i) {  // random-basis signature (2,2)
    SplitMix64 rng(master.next_u64());
    VectorXd ev(4);
    ev << -2 + rng.next_double(), -0.2 - rng.next_double(), 0.3 + rng.next_double(),
        1 + rng.next_double();
    cones.push_back(build_cone(ev, random_orthogonal(4, rng)));
  }

  for (const auto& cone : cones) {
    const int n = cone.dim, k = cone.rank;
    CHECK((cone.neg_frame.transpose() * cone.neg_frame - MatrixXd::Identity(k, k))
              .cwiseAbs()
              .maxCoeff() < 1e-10);
    CHECK((cone.pos_frame.transpose() * cone.pos_frame - MatrixXd::Identity(n - k, n - k))
              .cwiseAbs()
              .maxCoeff() < 1e-10);
    CHECK((cone.q_matrix - cone.q_matrix.transpose()).cwiseAbs().maxCoeff() <
          1e-12 * cone.q_matrix.cwiseAbs().maxCoeff());

    SplitMix64 rng(555);
    int checks = 10000 / static_cast<int>(cones.size());
    for (int i = 0; i < checks; ++i) {
      const VectorXd x = rng.gaussian_vector(n);
      double l = 0.0;
      while (l == 0.0) l = rng.uniform(-5.0, 5.0);
      CHECK(classify_point(cone, l * x).region == classify_point(cone, x).region);
      // k-solidity and complementedness
      CHECK(classify_point(cone, cone.neg_frame * rng.unit_vector(k)).region ==
            MembershipRegion::Interior);
      CHECK(classify_point(cone, cone.pos_frame * rng.unit_vector(n - k)).region ==
            MembershipRegion::Exterior);
    }
    for (const auto& v : sample_boundary(cone, 100, 4321)) CHECK(std::abs(cone.form(v)) <= 1e-12);
  }
}

TEST_CASE("set-wise order checks", "[cone]") {
  const QuadraticCone cone = standard_cone3();
  const std::vector<VectorXd> U = {vec3(2, 0, 0), vec3(2, 0.1, 0)};
  const std::vector<VectorXd> V = {vec3(0, 0, 0), vec3(0.1, 0, 0)};
  CHECK(sets_ordered(cone, U, V, cone.tol));
  CHECK(sets_strongly_ordered(cone, U, V, cone.tol));
  const std::vector<VectorXd> W = {vec3(2, 0, 5)};
  CHECK_FALSE(sets_ordered(cone, W, V, cone.tol));
}

TEST_CASE("cone JSON round-trips the matrix", "[cone]") {
  SplitMix64 rng(31);
  const MatrixXd B = random_orthogonal(3, rng);
  const QuadraticCone cone = build_cone(vec3(-2.5, -0.7, 1.9), B, 1e-8);

  const nlohmann::json j = cone_to_json(cone);
  const QuadraticCone back = cone_from_json(j);
  CHECK((back.q_matrix - cone.q_matrix).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(back.rank == cone.rank);
  CHECK(back.tol == cone.tol);

  CHECK_THROWS_AS(cone_from_json(nlohmann::json{{"eigenvalue", {1, 2}}}), ValidationError);
  CHECK_THROWS_AS(cone_from_json(nlohmann::json{{"eigenvalues", {-1, 1}}, {"extra", 1}}),
                  ValidationError);

  // Minimal spec: identity basis assumed.
  const QuadraticCone plain = cone_from_json(nlohmann::json{{"eigenvalues", {-1, -1, 1}}});
  CHECK(plain.rank == 2);
}
