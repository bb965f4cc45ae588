#include "fibersym/kinematics.hpp"

#include <cmath>
#include <string>

#include "fibersym/error.hpp"

namespace fibersym {

namespace {

void require_stretch(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw DomainError("stretch must be positive and finite, got " + std::to_string(lambda));
  }
}

void require_finite_shear(double gamma) {
  if (!std::isfinite(gamma)) throw DomainError("shear strain must be finite");
}

}  // namespace

std::string_view to_string(LoadingMode mode) {
  switch (mode) {
    case LoadingMode::Tension:
      return "tension";
    case LoadingMode::Compression:
      return "compression";
    case LoadingMode::Shear:
      return "shear";
  }
  throw DomainError("unknown loading mode");
}

std::string_view to_string(Direction dir) {
  switch (dir) {
    case Direction::InPlane:
      return "in-plane";
    case Direction::CrossPlane:
      return "cross-plane";
  }
  throw DomainError("unknown fiber direction");
}

LoadingMode parse_mode(std::string_view text) {
  if (text == "tension") return LoadingMode::Tension;
  if (text == "compression") return LoadingMode::Compression;
  if (text == "shear") return LoadingMode::Shear;
  throw DomainError("unknown loading mode '" + std::string(text) + "'");
}

Direction parse_direction(std::string_view text) {
  if (text == "in-plane") return Direction::InPlane;
  if (text == "cross-plane") return Direction::CrossPlane;
  throw DomainError("unknown direction '" + std::string(text) + "'");
}

FiberDirection FiberDirection::of(Direction tag) {
  switch (tag) {
    case Direction::InPlane:
      return {tag, Vec3::UnitX()};
    case Direction::CrossPlane:
      return {tag, Vec3::UnitY()};
  }
  throw DomainError("unknown fiber direction");
}

Mat3 uniaxial_gradient(double lambda) {
  require_stretch(lambda);
  const double lateral = 1.0 / std::sqrt(lambda);
  Mat3 F = Mat3::Zero();
  F(0, 0) = lambda;
  F(1, 1) = lateral;
  F(2, 2) = lateral;
  return F;
}

Mat3 shear_gradient(double gamma) {
  require_finite_shear(gamma);
  Mat3 F = Mat3::Identity();
  F(0, 1) = gamma;
  return F;
}

InvariantSet invariants_from_gradient(const Mat3& F, const Vec3& n0) {
  const double J = F.determinant();
  if (std::abs(J - 1.0) > 1e-9) {
    throw DomainError("deformation gradient is not isochoric (det F = " + std::to_string(J) + ")");
  }
  if (std::abs(n0.norm() - 1.0) > 1e-12) throw DomainError("fiber vector must have unit length");

  const Mat3 C = F.transpose() * F;
  const Mat3 C2 = C * C;
  const double I1 = F.cwiseProduct(F).sum();
  return InvariantSet{
      .I1 = I1,
      .I2 = 0.5 * (I1 * I1 - C.cwiseProduct(C).sum()),
      .I4 = n0.dot(C * n0),
      .I5 = n0.dot(C2 * n0),
  };
}

InvariantSet invariants_from_gradient(const Mat3& F, Direction dir) {
  return invariants_from_gradient(F, FiberDirection::of(dir).n0);
}

InvariantSet invariants_uniaxial(double lambda, Direction dir) {
  require_stretch(lambda);
  InvariantSet inv;
  inv.I1 = lambda * lambda + 2.0 / lambda;
  inv.I2 = 2.0 * lambda + 1.0 / (lambda * lambda);
  if (dir == Direction::InPlane) {
    inv.I4 = lambda * lambda;
    inv.I5 = inv.I4 * inv.I4;
  } else {
    inv.I4 = 1.0 / lambda;
    inv.I5 = 1.0 / (lambda * lambda);
  }
  return inv;
}

InvariantSet invariants_shear(double gamma, Direction dir) {
  require_finite_shear(gamma);
  const double g2 = gamma * gamma;
  InvariantSet inv;
  inv.I1 = 3.0 + g2;
  inv.I2 = 3.0 + g2;
  if (dir == Direction::InPlane) {
    inv.I4 = 1.0;
    inv.I5 = 1.0 + g2;
  } else {
    inv.I4 = 1.0 + g2;
    inv.I5 = (1.0 + g2) * (1.0 + g2) + g2;
  }
  return inv;
}

InvariantSet invariants_for(LoadingMode mode, double loading, Direction dir) {
  return is_uniaxial(mode) ? invariants_uniaxial(loading, dir) : invariants_shear(loading, dir);
}

InvariantDerivatives invariant_derivatives(LoadingMode mode, Direction dir, double loading) {
  if (dir != Direction::InPlane && dir != Direction::CrossPlane) {
    throw DomainError("unknown fiber direction");
  }
  InvariantDerivatives d;
  switch (mode) {
    case LoadingMode::Tension:
    case LoadingMode::Compression: {
      const double lambda = loading;
      require_stretch(lambda);
      d.dI1 = 2.0 * lambda;
      d.dI2 = 4.0;
      if (dir == Direction::InPlane) {
        d.dI4 = 2.0 * lambda;
        d.dI5 = 4.0 * lambda * lambda * lambda;
      }
      // Cross-plane fibers lie along e2; I4 = F22^2 does not depend on F11.
      return d;
    }
    case LoadingMode::Shear: {
      const double gamma = loading;
      require_finite_shear(gamma);
      d.dI1 = 2.0 * gamma;
      d.dI2 = 2.0 * gamma;
      if (dir == Direction::InPlane) {
        d.dI5 = 2.0 * gamma;
      } else {
        d.dI4 = 2.0 * gamma;
        d.dI5 = 6.0 * gamma + 4.0 * gamma * gamma * gamma;
      }
      return d;
    }
  }
  throw DomainError("unknown loading mode");
}

InvariantTensorDerivatives invariant_tensor_derivatives(const Mat3& F, const Vec3& n0) {
  const Mat3 C = F.transpose() * F;
  const Mat3 N = n0 * n0.transpose();
  const double I1 = F.cwiseProduct(F).sum();
  return InvariantTensorDerivatives{
      .dI1 = 2.0 * F,
      .dI2 = 2.0 * (I1 * F - F * C),
      .dI4 = 2.0 * F * N,
      .dI5 = 2.0 * F * (N * C + C * N),
  };
}

}  // namespace fibersym
