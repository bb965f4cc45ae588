#pragma once

#include <array>
#include <string>
#include <vector>

#include "fibersym/kinematics.hpp"

namespace fibersym {

inline constexpr int kTermCount = 12;

/// Which invariant feeds a term. Fiber invariants enter through Macaulay
/// brackets <I - 1> = max(I - 1, 0).
enum class TermInvariant { I1, I2, I4, I5 };
enum class Activation { Identity, Exponential };

/// One entry of the fixed twelve-term catalog (k is 1-based).
///
///   k = 1..4   x = I1 - 3     : w*x, exp(w*x) - 1, w*x^2, exp(w*x^2) - 1
///   k = 5..8   x = I2 - 3     : same four
///   k = 9..10  m = <I4 - 1>   : w*m^2, exp(w*m^2) - 1
///   k = 11..12 m = <I5 - 1>   : w*m^2, exp(w*m^2) - 1
///
/// Each activation is multiplied by the outer weight w_k (kPa).
struct TermId {
  int k;

  TermInvariant invariant() const;
  int power() const;  // 1 or 2
  Activation activation() const;
  bool is_fiber() const { return k >= 9; }
  /// Identity-activation counterpart of an exponential term (k - 1).
  TermId identity_twin() const;
};

TermId term(int k);  // validates 1..12
std::string term_label(TermId id);

struct ModelWeights {
  std::array<double, kTermCount> outer{};  // w_k, kPa
  std::array<double, kTermCount> inner{};  // w*_k, unitless

  /// Throws DomainError on negative or non-finite entries.
  void validate() const;
  /// Leading-order stiffness coefficient w_k * w*_k, kPa.
  double coefficient(int k) const { return outer[k - 1] * inner[k - 1]; }
  bool operator==(const ModelWeights&) const = default;
};

struct NamedModel {
  std::string name;
  ModelWeights weights;
};

/// Built-in discovered models: "mycelium", "fruiting_body", "protein_mycelium".
std::vector<NamedModel> reference_models();
/// Looks up a built-in model by name; throws DomainError if unknown.
NamedModel reference_model(const std::string& name);

struct EnergyGradient {
  double dI1 = 0.0;
  double dI2 = 0.0;
  double dI4 = 0.0;
  double dI5 = 0.0;
};

struct WeightGradient {
  std::array<double, kTermCount> outer{};  // dpsi/dw_k, unitless
  std::array<double, kTermCount> inner{};  // dpsi/dw*_k, kPa
};

/// Activation value of term k per unit outer weight.
double term_energy(TermId id, const InvariantSet& inv, double w_inner);

/// Derivative of term_energy with respect to the term's own invariant.
double term_slope(TermId id, const InvariantSet& inv, double w_inner);
/// Mixed derivative d(term_slope)/d(w_inner).
double term_slope_inner_derivative(TermId id, const InvariantSet& inv, double w_inner);
/// d(term_energy)/d(w_inner).
double term_energy_inner_derivative(TermId id, const InvariantSet& inv, double w_inner);

double energy(const ModelWeights& model, const InvariantSet& inv);
EnergyGradient energy_gradient(const ModelWeights& model, const InvariantSet& inv);
WeightGradient weight_gradient(const ModelWeights& model, const InvariantSet& inv);

}  // namespace fibersym
