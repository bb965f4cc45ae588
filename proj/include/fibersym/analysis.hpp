#pragma once

#include <span>
#include <string>
#include <vector>

#include "fibersym/dataio.hpp"

namespace fibersym {

/// Strain window of the stiffness regressions (10 % tension, compression and shear).
inline constexpr double kStiffnessWindow = 0.10;

/// Through-origin least squares slope E = (strain . stress) / (strain . strain), kPa.
double regress_stiffness(std::span<const double> strain, std::span<const double> stress);
/// 3 x through-origin shear slope (incompressible, nu = 1/2).
double shear_stiffness(std::span<const double> gamma, std::span<const double> tau);

/// Stiffness of one curve: tension on (lambda - 1, P), compression on
/// magnitudes (|lambda - 1|, |P|), shear as shear_stiffness. Only samples
/// with strain magnitude <= kStiffnessWindow enter the regression.
double curve_stiffness(const Experiment& e);

struct StiffnessSummary {
  Direction dir = Direction::InPlane;
  std::string sample;
  double E_ten = 0.0;
  double E_com = 0.0;
  double E_shr = 0.0;
  double E_mean = 0.0;
  int sample_count = 1;

  static StiffnessSummary make(Direction dir, std::string sample, double ten, double com, double shr);
};

/// Per-sample summaries for one direction, pairing tension, compression and
/// shear replicates by replicate id. Falls back to the mean curves when the
/// set has no replicates.
std::vector<StiffnessSummary> stiffness_summaries(const ExperimentSet& set, Direction dir);

struct WelchResult {
  double t = 0.0;
  double df = 0.0;
  double p = 1.0;
  bool significant_05 = false;
  bool significant_01 = false;
};

/// Regularized incomplete beta I_x(a, b), continued fraction to 1e-12.
double incomplete_beta(double a, double b, double x);
/// Student-t CDF with `df` degrees of freedom.
double student_t_cdf(double t, double df);
/// Two-tailed p for |T| >= |t|.
double student_t_two_tailed(double t, double df);

/// Welch's unequal-variance t-test with Welch-Satterthwaite degrees of freedom.
WelchResult welch_t_test(std::span<const double> a, std::span<const double> b);
WelchResult significance(double t, double df, double p);

struct AttributeComparison {
  std::string attribute;  // "E_ten", "E_com", "E_shr", "E_mean"
  int n_in_plane = 0;
  double mean_in_plane = 0.0;
  double sd_in_plane = 0.0;
  int n_cross_plane = 0;
  double mean_cross_plane = 0.0;
  double sd_cross_plane = 0.0;
  WelchResult welch;
};

enum class Symmetry { Anisotropic, Isotropic };

struct AnisotropyReport {
  std::vector<AttributeComparison> rows;
  Symmetry symmetry = Symmetry::Isotropic;

  /// "anisotropic" or "isotropic (not rejected)".
  std::string classification() const;
};

/// Welch test per stiffness attribute; anisotropic if any p < 0.05.
AnisotropyReport anisotropy_report(std::span<const StiffnessSummary> in_plane,
                                   std::span<const StiffnessSummary> cross_plane);

std::string to_csv(const AnisotropyReport& report);

double sample_mean(std::span<const double> x);
/// n - 1 denominator.
double sample_variance(std::span<const double> x);

}  // namespace fibersym
