#pragma once

#include <Eigen/Dense>

#include <string_view>

namespace fibersym {

using Mat3 = Eigen::Matrix3d;
using Vec3 = Eigen::Vector3d;

enum class LoadingMode { Tension, Compression, Shear };

/// Loading relative to the dominant structural plane of the sample.
enum class Direction { InPlane, CrossPlane };

std::string_view to_string(LoadingMode mode);
std::string_view to_string(Direction dir);
/// Accepts "tension", "compression", "shear" (case-sensitive).
LoadingMode parse_mode(std::string_view text);
/// Accepts "in-plane" and "cross-plane".
Direction parse_direction(std::string_view text);

inline bool is_uniaxial(LoadingMode mode) { return mode != LoadingMode::Shear; }

/// Unit fiber vector n0 together with its tag.
///
/// The loading axis is e1 in every test. In-plane fibers lie along e1, which
/// gives I4 = lambda^2 in uniaxial loading and I4 = 1 in simple shear.
/// Cross-plane fibers lie along e2, which gives I4 = 1/lambda and
/// I4 = 1 + gamma^2 respectively.
struct FiberDirection {
  Direction tag;
  Vec3 n0;

  static FiberDirection of(Direction tag);
};

struct InvariantSet {
  double I1 = 3.0;
  double I2 = 3.0;
  double I4 = 1.0;
  double I5 = 1.0;
};

/// Derivatives of the invariants with respect to the loaded component of F:
/// F11 for uniaxial tests, F12 for simple shear.
struct InvariantDerivatives {
  double dI1 = 0.0;
  double dI2 = 0.0;
  double dI4 = 0.0;
  double dI5 = 0.0;
};

/// Full tensor derivatives dI/dF.
struct InvariantTensorDerivatives {
  Mat3 dI1;
  Mat3 dI2;
  Mat3 dI4;
  Mat3 dI5;
};

/// diag(lambda, 1/sqrt(lambda), 1/sqrt(lambda)). Compression is lambda < 1.
Mat3 uniaxial_gradient(double lambda);
/// Identity with gamma at (1,2).
Mat3 shear_gradient(double gamma);

/// General matrix evaluation of I1 = F:F, I2 = (I1^2 - C:C)/2,
/// I4 = C:N and I5 = C^2:N with C = F^t F and N = n0 (x) n0.
/// Requires det F = 1 within 1e-9 and a unit n0.
InvariantSet invariants_from_gradient(const Mat3& F, const Vec3& n0);
InvariantSet invariants_from_gradient(const Mat3& F, Direction dir);

InvariantSet invariants_uniaxial(double lambda, Direction dir);
InvariantSet invariants_shear(double gamma, Direction dir);
/// Dispatches on the mode; `loading` is lambda for uniaxial modes, gamma for shear.
InvariantSet invariants_for(LoadingMode mode, double loading, Direction dir);

/// Closed-form loading-direction derivatives.
InvariantDerivatives invariant_derivatives(LoadingMode mode, Direction dir, double loading);

/// dI1/dF = 2F, dI2/dF = 2[I1 F - F C], dI4/dF = 2 F N, dI5/dF = 2 F [N C + C N].
InvariantTensorDerivatives invariant_tensor_derivatives(const Mat3& F, const Vec3& n0);

}  // namespace fibersym
