#pragma once

#include <Eigen/Dense>
#include <charconv>
#include <stdexcept>
#include <string>
#include <vector>

namespace conewatch {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionMismatch : Error {
  using Error::Error;
};
struct SignatureError : Error {
  using Error::Error;
};
struct ValidationError : Error {
  using Error::Error;
};
struct JacobianUnavailable : Error {
  using Error::Error;
};
struct UnknownModel : Error {
  using Error::Error;
};
struct HorizonTooShort : Error {
  using Error::Error;
};
struct GapTooSmall : Error {
  using Error::Error;
};
struct DegenerateFrame : Error {
  using Error::Error;
};
struct EmptySweep : Error {
  using Error::Error;
};

/// Integration aborted: the state norm crossed the configured cap.
struct BlowUp : Error {
  double t_reached;
  explicit BlowUp(double t, const std::string& msg) : Error(msg), t_reached(t) {}
};

/// Integration aborted: step size underflowed (stiffness or invalid derivatives).
struct StepFailure : Error {
  double t_reached;
  explicit StepFailure(double t, const std::string& msg) : Error(msg), t_reached(t) {}
};

/// Axis-aligned box, the sampling domain for sweeps and equilibrium searches.
struct Box {
  VectorXd lo;
  VectorXd hi;

  Box() = default;
  Box(VectorXd lo_, VectorXd hi_) : lo(std::move(lo_)), hi(std::move(hi_)) {
    if (lo.size() != hi.size()) throw DimensionMismatch("box corners differ in dimension");
    for (Eigen::Index i = 0; i < lo.size(); ++i)
      if (!(lo[i] < hi[i])) throw ValidationError("degenerate box: lo must be < hi on every axis");
  }

  static Box cube(int dim, double low, double high) {
    return Box(VectorXd::Constant(dim, low), VectorXd::Constant(dim, high));
  }

  int dim() const { return static_cast<int>(lo.size()); }
  double diameter() const { return (hi - lo).norm(); }

  bool contains(const VectorXd& x, double inflate = 0.0) const {
    if (x.size() != lo.size()) return false;
    for (Eigen::Index i = 0; i < lo.size(); ++i) {
      const double pad = inflate * (hi[i] - lo[i]);
      if (x[i] < lo[i] - pad || x[i] > hi[i] + pad) return false;
    }
    return true;
  }

  Box inflated(double frac) const {
    VectorXd pad = frac * (hi - lo);
    return Box(lo - pad, hi + pad);
  }
};

/// Shortest round-trip decimal form, '.' separator regardless of locale.
inline std::string format_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline std::string format_vector(const VectorXd& v, const char* sep = ",") {
  std::string out;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) out += sep;
    out += format_double(v[i]);
  }
  return out;
}

inline void require_dim(const VectorXd& x, Eigen::Index n, const char* what) {
  if (x.size() != n)
    throw DimensionMismatch(std::string(what) + ": expected dimension " + std::to_string(n) +
                            ", got " + std::to_string(x.size()));
}

}  // namespace conewatch
