#include "fibersym/stress.hpp"

#include <cmath>
#include <string>

#include "fibersym/error.hpp"

namespace fibersym {

void LoadingCase::validate() const {
  if (!std::isfinite(loading)) throw DomainError("loading must be finite");
  switch (mode) {
    case LoadingMode::Tension:
      if (loading < 1.0) throw DomainError("tension requires lambda >= 1");
      return;
    case LoadingMode::Compression:
      if (!(loading > 0.0) || loading > 1.0) throw DomainError("compression requires 0 < lambda <= 1");
      return;
    case LoadingMode::Shear:
      if (loading < 0.0) throw DomainError("shear requires gamma >= 0");
      return;
  }
  throw DomainError("unknown loading mode");
}

LoadingCase LoadingCase::protocol(LoadingMode mode, Direction dir) {
  switch (mode) {
    case LoadingMode::Tension:
      return {mode, dir, kTensionLimit};
    case LoadingMode::Compression:
      return {mode, dir, kCompressionLimit};
    case LoadingMode::Shear:
      return {mode, dir, kShearLimit};
  }
  throw DomainError("unknown loading mode");
}

std::vector<LoadingCase> protocol_cases() {
  std::vector<LoadingCase> cases;
  for (auto mode : {LoadingMode::Tension, LoadingMode::Compression, LoadingMode::Shear}) {
    for (auto dir : {Direction::InPlane, Direction::CrossPlane}) cases.push_back(LoadingCase::protocol(mode, dir));
  }
  return cases;
}

double reference_loading(LoadingMode mode) { return mode == LoadingMode::Shear ? 0.0 : 1.0; }

double uniaxial_stress(const ModelWeights& model, double lambda, Direction dir) {
  const auto inv = invariants_uniaxial(lambda, dir);
  const auto g = energy_gradient(model, inv);
  const double iso = 2.0 * (g.dI1 + g.dI2 / lambda) * (lambda - 1.0 / (lambda * lambda));
  if (dir == Direction::CrossPlane) return iso;
  return iso + 2.0 * lambda * g.dI4 + 4.0 * lambda * lambda * lambda * g.dI5;
}

double shear_stress(const ModelWeights& model, double gamma, Direction dir) {
  if (!std::isfinite(gamma)) throw DomainError("shear strain must be finite");
  const auto inv = invariants_shear(gamma, dir);
  const auto g = energy_gradient(model, inv);
  if (dir == Direction::InPlane) return 2.0 * gamma * (g.dI1 + g.dI2 + g.dI5);
  return 2.0 * gamma * (g.dI1 + g.dI2 + g.dI4) + (6.0 * gamma + 4.0 * gamma * gamma * gamma) * g.dI5;
}

double stress(const ModelWeights& model, LoadingMode mode, Direction dir, double loading) {
  return is_uniaxial(mode) ? uniaxial_stress(model, loading, dir) : shear_stress(model, loading, dir);
}

double pressure(const ModelWeights& model, double lambda) {
  // Isotropic part only; the fiber terms are absent from the lateral
  // equilibrium in the closed forms.
  const auto g = energy_gradient(model, invariants_uniaxial(lambda, Direction::InPlane));
  return 2.0 / lambda * g.dI1 + (2.0 * lambda + 2.0 / (lambda * lambda)) * g.dI2;
}

std::array<double, 4> stress_coefficients(LoadingMode mode, Direction dir, double loading) {
  if (is_uniaxial(mode)) {
    const double lambda = loading;
    if (!(lambda > 0.0)) throw DomainError("stretch must be positive");
    const double a = 2.0 * (lambda - 1.0 / (lambda * lambda));
    if (dir == Direction::CrossPlane) return {a, a / lambda, 0.0, 0.0};
    return {a, a / lambda, 2.0 * lambda, 4.0 * lambda * lambda * lambda};
  }
  const auto d = invariant_derivatives(mode, dir, loading);
  return {d.dI1, d.dI2, d.dI4, d.dI5};
}

std::array<double, kTermCount> term_stress_contributions(const ModelWeights& model, LoadingMode mode,
                                                         Direction dir, double loading) {
  const auto inv = invariants_for(mode, loading, dir);
  const auto c = stress_coefficients(mode, dir, loading);
  std::array<double, kTermCount> out{};
  for (int k = 1; k <= kTermCount; ++k) {
    const double w = model.outer[k - 1];
    if (w == 0.0) continue;
    const TermId id{k};
    out[k - 1] = w * term_slope(id, inv, model.inner[k - 1]) * c[static_cast<int>(id.invariant())];
  }
  return out;
}

Mat3 piola_stress_tensor(const ModelWeights& model, const Mat3& F, const Vec3& n0, double p) {
  const auto inv = invariants_from_gradient(F, n0);
  const auto g = energy_gradient(model, inv);
  const auto d = invariant_tensor_derivatives(F, n0);
  const Mat3 F_inv_t = F.inverse().transpose();
  return g.dI1 * d.dI1 + g.dI2 * d.dI2 + g.dI4 * d.dI4 + g.dI5 * d.dI5 - p * F_inv_t;
}

std::vector<double> loading_grid(const LoadingCase& c, int n_points) {
  if (n_points < 2) throw DomainError("a curve needs at least 2 points, got " + std::to_string(n_points), "EmptyGrid");
  c.validate();
  const double start = reference_loading(c.mode);
  std::vector<double> grid(static_cast<std::size_t>(n_points));
  const double step = (c.loading - start) / (n_points - 1);
  for (int i = 0; i < n_points; ++i) grid[i] = start + step * i;
  grid.back() = c.loading;
  return grid;
}

std::vector<StressSample> predict_curve(const ModelWeights& model, const LoadingCase& c, int n_points) {
  std::vector<StressSample> curve;
  for (double x : loading_grid(c, n_points)) curve.push_back({x, stress(model, c.mode, c.dir, x)});
  return curve;
}

}  // namespace fibersym
