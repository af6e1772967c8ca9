#pragma once

#include <Eigen/Dense>
#include <optional>
#include <utility>
#include <vector>

#include "conewatch/common.hpp"
#include "conewatch/rng.hpp"

#include <nlohmann/json.hpp>

namespace conewatch {

enum class MembershipRegion { Interior, Boundary, Exterior };

inline const char* to_string(MembershipRegion r) {
  switch (r) {
    case MembershipRegion::Interior: return "interior";
    case MembershipRegion::Boundary: return "boundary";
    default: return "exterior";
  }
}

struct Membership {
  MembershipRegion region;
  double form_value;
};

enum class Ordering { StronglyOrdered, Ordered, Unordered };

inline const char* to_string(Ordering o) {
  switch (o) {
    case Ordering::StronglyOrdered: return "strongly_ordered";
    case Ordering::Ordered: return "ordered";
    default: return "unordered";
  }
}

/// Rank-k quadratic cone {x : x'Sx <= 0} for a nonsingular symmetric S with
/// exactly k negative eigenvalues. The negative eigenspace lies in the cone
/// interior (k-solidity), the positive eigenspace meets the cone only at 0
/// (complementedness), so every instance is a valid solid complemented cone.
struct QuadraticCone {
  int dim = 0;
  int rank = 0;
  MatrixXd q_matrix;      // n x n symmetric, signature (k negative, n-k positive)
  MatrixXd neg_frame;     // n x k orthonormal, spans the negative eigenspace
  MatrixXd pos_frame;     // n x (n-k) orthonormal, spans the positive eigenspace
  VectorXd eigenvalues;   // ascending; first k negative
  double tol = 1e-9;      // default relative tolerance for membership tests

  double form(const VectorXd& x) const { return x.dot(q_matrix * x); }
};

/// Assemble a cone from eigenvalues and an optional orthogonal basis
/// (identity if absent): q = B diag(ev) B'. The rank is the count of
/// negative eigenvalues.
inline QuadraticCone build_cone(const VectorXd& eigenvalues,
                                const std::optional<MatrixXd>& basis = std::nullopt,
                                double tol = 1e-9) {
  const int n = static_cast<int>(eigenvalues.size());
  if (n < 2) throw ValidationError("cone dimension must be at least 2");
  if (!(tol > 0)) throw ValidationError("cone tol must be positive");

  const double scale = eigenvalues.cwiseAbs().maxCoeff();
  if (scale <= 0) throw ValidationError("all eigenvalues are zero");
  int n_neg = 0, n_pos = 0;
  for (int i = 0; i < n; ++i) {
    if (std::abs(eigenvalues[i]) < 1e-12 * scale)
      throw ValidationError("zero eigenvalue at index " + std::to_string(i) +
                            ": cone matrix must be nonsingular");
    (eigenvalues[i] < 0 ? n_neg : n_pos)++;
  }
  if (n_neg == 0 || n_pos == 0)
    throw SignatureError("eigenvalues must contain both signs: a one-signed form yields {0} or all of R^n");

  MatrixXd B = basis ? *basis : MatrixXd::Identity(n, n);
  if (B.rows() != n || B.cols() != n) throw DimensionMismatch("basis must be n x n");
  if ((B.transpose() * B - MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() > 1e-10)
    throw ValidationError("basis is not orthogonal");

  // Sort ascending so the negative directions come first.
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return eigenvalues[a] < eigenvalues[b]; });

  QuadraticCone cone;
  cone.dim = n;
  cone.rank = n_neg;
  cone.tol = tol;
  cone.eigenvalues.resize(n);
  MatrixXd sortedB(n, n);
  for (int i = 0; i < n; ++i) {
    cone.eigenvalues[i] = eigenvalues[order[i]];
    sortedB.col(i) = B.col(order[i]);
  }
  cone.neg_frame = sortedB.leftCols(n_neg);
  cone.pos_frame = sortedB.rightCols(n - n_neg);
  MatrixXd q = sortedB * cone.eigenvalues.asDiagonal() * sortedB.transpose();
  cone.q_matrix = 0.5 * (q + q.transpose());
  return cone;
}

/// Tolerant membership: interior iff form < -tol|x|^2, boundary iff
/// |form| <= tol|x|^2, exterior otherwise. The threshold scales with |x|^2
/// because the form does; the zero vector lands on the boundary.
inline Membership classify_point(const QuadraticCone& cone, const VectorXd& x, double tol) {
  require_dim(x, cone.dim, "classify_point");
  const double f = cone.form(x);
  const double band = tol * x.squaredNorm();
  MembershipRegion r;
  if (f < -band)
    r = MembershipRegion::Interior;
  else if (f <= band)
    r = MembershipRegion::Boundary;
  else
    r = MembershipRegion::Exterior;
  return {r, f};
}

inline Membership classify_point(const QuadraticCone& cone, const VectorXd& x) {
  return classify_point(cone, x, cone.tol);
}

inline Ordering order_relation(const QuadraticCone& cone, const VectorXd& x, const VectorXd& y,
                               double tol) {
  require_dim(x, cone.dim, "order_relation");
  require_dim(y, cone.dim, "order_relation");
  switch (classify_point(cone, x - y, tol).region) {
    case MembershipRegion::Interior: return Ordering::StronglyOrdered;
    case MembershipRegion::Boundary: return Ordering::Ordered;
    default: return Ordering::Unordered;
  }
}

inline Ordering order_relation(const QuadraticCone& cone, const VectorXd& x, const VectorXd& y) {
  return order_relation(cone, x, y, cone.tol);
}

/// The canonical probe: the negative eigenspace, a k-dimensional subspace
/// whose nonzero vectors are all interior.
inline MatrixXd probe_subspace(const QuadraticCone& cone) { return cone.neg_frame; }

namespace detail {

// Random direction with prescribed depth: rho=1 lands on the boundary,
// rho<1 strictly inside. Works in eigencoordinates where the form splits
// into a negative and a positive part that can be balanced exactly.
inline VectorXd sample_cone_direction(const QuadraticCone& cone, SplitMix64& rng, double rho) {
  const int k = cone.rank, p = cone.dim - cone.rank;
  const VectorXd u = rng.unit_vector(k);
  const VectorXd w = rng.unit_vector(p);
  double a = 0.0, b = 0.0;
  for (int i = 0; i < k; ++i) a += -cone.eigenvalues[i] * u[i] * u[i];
  for (int j = 0; j < p; ++j) b += cone.eigenvalues[k + j] * w[j] * w[j];
  VectorXd v = cone.neg_frame * (std::sqrt(b) * u) + cone.pos_frame * (rho * std::sqrt(a) * w);
  return v / v.norm();
}

}  // namespace detail

/// m unit vectors on the cone boundary, deterministic for a given seed.
inline std::vector<VectorXd> sample_boundary(const QuadraticCone& cone, int m,
                                             std::uint64_t rng_seed) {
  SplitMix64 rng(rng_seed);
  std::vector<VectorXd> out;
  out.reserve(std::max(m, 0));
  for (int i = 0; i < m; ++i) out.push_back(detail::sample_cone_direction(cone, rng, 1.0));
  return out;
}

/// m unit vectors in the cone: boundary when rho=1, interior depth drawn
/// uniformly from [0, rho_max] otherwise.
inline std::vector<VectorXd> sample_cone(const QuadraticCone& cone, int m, std::uint64_t rng_seed,
                                         double rho_max = 1.0) {
  SplitMix64 rng(rng_seed);
  std::vector<VectorXd> out;
  out.reserve(std::max(m, 0));
  for (int i = 0; i < m; ++i)
    out.push_back(detail::sample_cone_direction(cone, rng, rho_max * rng.next_double()));
  return out;
}

/// m points of the probe eps-disc through x, the point x itself excluded.
inline std::vector<VectorXd> probe_neighborhood(const QuadraticCone& cone, const VectorXd& x,
                                                double eps, int m, std::uint64_t rng_seed) {
  require_dim(x, cone.dim, "probe_neighborhood");
  if (!(eps > 0)) throw ValidationError("probe radius eps must be positive");
  SplitMix64 rng(rng_seed);
  std::vector<VectorXd> out;
  out.reserve(std::max(m, 0));
  for (int i = 0; i < m; ++i) {
    const VectorXd c = rng.unit_vector(cone.rank);
    const double r = eps * std::pow(rng.next_open01(), 1.0 / cone.rank);
    out.push_back(x + r * (cone.neg_frame * c));
  }
  return out;
}

/// Set-wise order checks. The first requires x-y in C for every pair, the
/// second x-y in Int C; both are exposed because the two readings differ.
inline bool sets_ordered(const QuadraticCone& cone, const std::vector<VectorXd>& U,
                         const std::vector<VectorXd>& V, double tol) {
  for (const auto& x : U)
    for (const auto& y : V)
      if (order_relation(cone, x, y, tol) == Ordering::Unordered) return false;
  return true;
}

inline bool sets_strongly_ordered(const QuadraticCone& cone, const std::vector<VectorXd>& U,
                                  const std::vector<VectorXd>& V, double tol) {
  for (const auto& x : U)
    for (const auto& y : V)
      if (order_relation(cone, x, y, tol) != Ordering::StronglyOrdered) return false;
  return true;
}

// --- serialization ---------------------------------------------------------

inline nlohmann::json cone_to_json(const QuadraticCone& cone) {
  nlohmann::json j;
  j["eigenvalues"] = std::vector<double>(cone.eigenvalues.data(),
                                         cone.eigenvalues.data() + cone.eigenvalues.size());
  MatrixXd B(cone.dim, cone.dim);
  B.leftCols(cone.rank) = cone.neg_frame;
  B.rightCols(cone.dim - cone.rank) = cone.pos_frame;
  std::vector<std::vector<double>> rows(cone.dim, std::vector<double>(cone.dim));
  for (int i = 0; i < cone.dim; ++i)
    for (int c = 0; c < cone.dim; ++c) rows[i][c] = B(i, c);
  j["basis"] = rows;
  j["tol"] = cone.tol;
  return j;
}

inline QuadraticCone cone_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ValidationError("cone spec must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (it.key() != "eigenvalues" && it.key() != "basis" && it.key() != "tol")
      throw ValidationError("cone spec: unknown key '" + it.key() + "'");
  }
  if (!j.contains("eigenvalues")) throw ValidationError("cone spec: missing 'eigenvalues'");
  const auto& evs = j.at("eigenvalues");
  if (!evs.is_array() || evs.empty()) throw ValidationError("cone spec: 'eigenvalues' must be a nonempty array");
  VectorXd eigenvalues(evs.size());
  for (std::size_t i = 0; i < evs.size(); ++i) eigenvalues[static_cast<Eigen::Index>(i)] = evs[i].get<double>();

  std::optional<MatrixXd> basis;
  if (j.contains("basis")) {
    const auto& rows = j.at("basis");
    const int n = static_cast<int>(eigenvalues.size());
    if (!rows.is_array() || static_cast<int>(rows.size()) != n)
      throw ValidationError("cone spec: 'basis' must be an n x n matrix");
    MatrixXd B(n, n);
    for (int i = 0; i < n; ++i) {
      if (!rows[i].is_array() || static_cast<int>(rows[i].size()) != n)
        throw ValidationError("cone spec: 'basis' must be an n x n matrix");
      for (int c = 0; c < n; ++c) B(i, c) = rows[i][c].get<double>();
    }
    basis = B;
  }
  const double tol = j.value("tol", 1e-9);
  return build_cone(eigenvalues, basis, tol);
}

}  // namespace conewatch
