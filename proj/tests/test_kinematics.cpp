#include <gtest/gtest.h>

#include <random>

#include "fibersym/error.hpp"
#include "fibersym/kinematics.hpp"
#include "oracles.hpp"

using namespace fibersym;

namespace {

oracle::M3 to_oracle(const Mat3& F) {
  oracle::M3 m{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m[i][j] = F(i, j);
  return m;
}

void expect_inv(const InvariantSet& got, const oracle::Inv& want, double tol) {
  EXPECT_NEAR(got.I1, want.I1, tol);
  EXPECT_NEAR(got.I2, want.I2, tol);
  EXPECT_NEAR(got.I4, want.I4, tol);
  EXPECT_NEAR(got.I5, want.I5, tol);
}

}  // namespace

TEST(Kinematics, ReferenceStateInvariants) {
  for (auto dir : {Direction::InPlane, Direction::CrossPlane}) {
    const auto a = invariants_uniaxial(1.0, dir);
    const auto b = invariants_shear(0.0, dir);
    for (const auto& s : {a, b}) {
      EXPECT_DOUBLE_EQ(s.I1, 3.0);
      EXPECT_DOUBLE_EQ(s.I2, 3.0);
      EXPECT_DOUBLE_EQ(s.I4, 1.0);
      EXPECT_DOUBLE_EQ(s.I5, 1.0);
    }
  }
}

TEST(Kinematics, ClosedFormsMatchMatrixOracle) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> lam(0.9, 1.1), gam(0.0, 0.1);
  for (int i = 0; i < 200; ++i) {
    const double l = lam(rng), g = gam(rng);
    for (bool in : {true, false}) {
      const auto dir = in ? Direction::InPlane : Direction::CrossPlane;
      expect_inv(invariants_uniaxial(l, dir), oracle::invariants(oracle::uniaxial(l), oracle::fiber(in)), 1e-12);
      expect_inv(invariants_shear(g, dir), oracle::invariants(oracle::shear(g), oracle::fiber(in)), 1e-12);
    }
  }
}

TEST(Kinematics, SpecificValues) {
  const auto s = invariants_uniaxial(1.1, Direction::InPlane);
  EXPECT_NEAR(s.I1, 1.21 + 2.0 / 1.1, 1e-14);
  EXPECT_NEAR(s.I4, 1.21, 1e-14);
  EXPECT_NEAR(s.I5, 1.4641, 1e-14);
  const auto c = invariants_uniaxial(1.1, Direction::CrossPlane);
  EXPECT_NEAR(c.I4, 1.0 / 1.1, 1e-14);
  const auto sh = invariants_shear(0.1, Direction::CrossPlane);
  EXPECT_NEAR(sh.I4, 1.01, 1e-14);
  EXPECT_NEAR(invariants_shear(0.1, Direction::InPlane).I4, 1.0, 1e-14);
}

TEST(Kinematics, MatrixRouteMatchesClosedForm) {
  for (double l : {0.9, 0.95, 1.0, 1.05, 1.1}) {
    for (auto dir : {Direction::InPlane, Direction::CrossPlane}) {
      const auto a = invariants_from_gradient(uniaxial_gradient(l), dir);
      const auto b = invariants_uniaxial(l, dir);
      EXPECT_NEAR(a.I1, b.I1, 1e-12);
      EXPECT_NEAR(a.I2, b.I2, 1e-12);
      EXPECT_NEAR(a.I4, b.I4, 1e-12);
      EXPECT_NEAR(a.I5, b.I5, 1e-12);
    }
  }
}

TEST(Kinematics, LoadingDerivativesMatchFiniteDifferences) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> lam(0.9, 1.1), gam(0.0, 0.1);
  const double h = 1e-6;
  for (int i = 0; i < 200; ++i) {
    const double l = lam(rng), g = gam(rng);
    for (bool in : {true, false}) {
      const auto dir = in ? Direction::InPlane : Direction::CrossPlane;
      const auto n = oracle::fiber(in);
      auto perturbed = [&](oracle::M3 F, int r, int c, double d) {
        F[r][c] += d;
        return oracle::invariants(F, n);
      };
      for (auto mode : {LoadingMode::Tension, LoadingMode::Shear}) {
        const bool uni = mode == LoadingMode::Tension;
        const auto F = uni ? oracle::uniaxial(l) : oracle::shear(g);
        const int r = 0, c = uni ? 0 : 1;
        const auto p = perturbed(F, r, c, h), m = perturbed(F, r, c, -h);
        const auto d = invariant_derivatives(mode, dir, uni ? l : g);
        EXPECT_NEAR(d.dI1, (p.I1 - m.I1) / (2 * h), 1e-6);
        EXPECT_NEAR(d.dI2, (p.I2 - m.I2) / (2 * h), 1e-6);
        EXPECT_NEAR(d.dI4, (p.I4 - m.I4) / (2 * h), 1e-6);
        EXPECT_NEAR(d.dI5, (p.I5 - m.I5) / (2 * h), 1e-6);
      }
    }
  }
}

TEST(Kinematics, TensorDerivativesMatchFiniteDifferences) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-0.2, 0.2);
  const double h = 1e-6;
  for (int trial = 0; trial < 50; ++trial) {
    Mat3 F = Mat3::Identity();
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) F(i, j) += u(rng);
    Vec3 n0(u(rng) + 0.5, u(rng), u(rng));
    n0.normalize();
    const oracle::V3 n{n0(0), n0(1), n0(2)};
    const auto d = invariant_tensor_derivatives(F, n0);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        auto Fp = to_oracle(F), Fm = to_oracle(F);
        Fp[i][j] += h;
        Fm[i][j] -= h;
        const auto p = oracle::invariants(Fp, n), m = oracle::invariants(Fm, n);
        EXPECT_NEAR(d.dI1(i, j), (p.I1 - m.I1) / (2 * h), 1e-6);
        EXPECT_NEAR(d.dI2(i, j), (p.I2 - m.I2) / (2 * h), 1e-6);
        EXPECT_NEAR(d.dI4(i, j), (p.I4 - m.I4) / (2 * h), 1e-6);
        EXPECT_NEAR(d.dI5(i, j), (p.I5 - m.I5) / (2 * h), 1e-6);
      }
    }
  }
}

TEST(Kinematics, FiberInvariantInequality) {
  // I5 >= I4^2 for any F and unit n0 (Cauchy-Schwarz on C n0).
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> lam(0.5, 2.0), gam(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    for (auto dir : {Direction::InPlane, Direction::CrossPlane}) {
      const auto a = invariants_uniaxial(lam(rng), dir);
      const auto b = invariants_shear(gam(rng), dir);
      EXPECT_GE(a.I5 + 1e-12, a.I4 * a.I4);
      EXPECT_GE(b.I5 + 1e-12, b.I4 * b.I4);
    }
  }
}

TEST(Kinematics, RejectsInvalidStates) {
  EXPECT_THROW(invariants_uniaxial(0.0, Direction::InPlane), DomainError);
  EXPECT_THROW(invariants_uniaxial(-1.0, Direction::InPlane), DomainError);
  EXPECT_THROW(invariants_shear(std::nan(""), Direction::InPlane), DomainError);
  Mat3 F = Mat3::Identity();
  F(0, 0) = 1.2;
  EXPECT_THROW(invariants_from_gradient(F, Direction::InPlane), DomainError);
  EXPECT_THROW(invariants_from_gradient(Mat3::Identity(), Vec3(1, 1, 0)), DomainError);
}

TEST(Kinematics, NamesRoundTrip) {
  for (auto m : {LoadingMode::Tension, LoadingMode::Compression, LoadingMode::Shear}) {
    EXPECT_EQ(parse_mode(to_string(m)), m);
  }
  for (auto d : {Direction::InPlane, Direction::CrossPlane}) EXPECT_EQ(parse_direction(to_string(d)), d);
  EXPECT_THROW(parse_mode("Tension"), DomainError);
  EXPECT_THROW(parse_direction("inplane"), DomainError);
}
