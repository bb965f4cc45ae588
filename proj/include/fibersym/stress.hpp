#pragma once

#include <array>
#include <vector>

#include "fibersym/energy.hpp"
#include "fibersym/kinematics.hpp"

namespace fibersym {

/// Protocol limits of the test program.
inline constexpr double kTensionLimit = 1.1;
inline constexpr double kCompressionLimit = 0.9;
inline constexpr double kShearLimit = 0.1;

/// One loading configuration; `loading` is the target stretch (uniaxial) or
/// shear strain (shear). Curves run from the reference state to `loading`.
struct LoadingCase {
  LoadingMode mode = LoadingMode::Tension;
  Direction dir = Direction::InPlane;
  double loading = kTensionLimit;

  /// Throws DomainError unless tension has lambda >= 1, compression
  /// 0 < lambda <= 1 and shear gamma >= 0.
  void validate() const;
  /// The case at the protocol limit for the mode.
  static LoadingCase protocol(LoadingMode mode, Direction dir);
};

/// The six protocol cases in (mode, direction) order.
std::vector<LoadingCase> protocol_cases();

/// Reference state of a mode: lambda = 1 or gamma = 0.
double reference_loading(LoadingMode mode);

struct StressSample {
  double loading = 0.0;
  double stress = 0.0;  // kPa

  bool operator==(const StressSample&) const = default;
};

/// Nominal stress P11 with the incompressibility pressure eliminated through
/// P22 = P33 = 0. Cross-plane loading carries no fiber contribution.
double uniaxial_stress(const ModelWeights& model, double lambda, Direction dir);
/// Nominal shear stress P12 under simple shear.
double shear_stress(const ModelWeights& model, double gamma, Direction dir);
double stress(const ModelWeights& model, LoadingMode mode, Direction dir, double loading);

/// Lagrange multiplier of uniaxial loading: p = (2/lambda) psi_1 + [2 lambda + 2/lambda^2] psi_2.
double pressure(const ModelWeights& model, double lambda);

/// Coefficients c with P = c1 dpsi/dI1 + c2 dpsi/dI2 + c4 dpsi/dI4 + c5 dpsi/dI5
/// for the measured stress component. Linear in the energy gradient, so it
/// also decomposes the stress term by term.
std::array<double, 4> stress_coefficients(LoadingMode mode, Direction dir, double loading);

/// Per-term contributions to the measured stress; they sum to stress().
std::array<double, kTermCount> term_stress_contributions(const ModelWeights& model, LoadingMode mode,
                                                         Direction dir, double loading);

/// Tensor route: P = sum_i dpsi/dI_i dI_i/dF - p F^-t for an arbitrary F.
Mat3 piola_stress_tensor(const ModelWeights& model, const Mat3& F, const Vec3& n0, double p);

/// Inclusive uniform grid from the reference state to case.loading.
std::vector<double> loading_grid(const LoadingCase& c, int n_points);
std::vector<StressSample> predict_curve(const ModelWeights& model, const LoadingCase& c, int n_points);

}  // namespace fibersym
