#include "fibersym/energy.hpp"

#include <algorithm>
#include <cmath>

#include "fibersym/error.hpp"

namespace fibersym {

namespace {

double macaulay(double x) { return std::max(x, 0.0); }

// Argument before activation: I1 - 3, I2 - 3, <I4 - 1>, <I5 - 1>.
double term_argument(TermInvariant which, const InvariantSet& inv) {
  switch (which) {
    case TermInvariant::I1:
      return inv.I1 - 3.0;
    case TermInvariant::I2:
      return inv.I2 - 3.0;
    case TermInvariant::I4:
      return macaulay(inv.I4 - 1.0);
    case TermInvariant::I5:
      return macaulay(inv.I5 - 1.0);
  }
  return 0.0;
}

}  // namespace

TermId term(int k) {
  if (k < 1 || k > kTermCount) throw DomainError("term index must be in 1..12, got " + std::to_string(k));
  return TermId{k};
}

TermInvariant TermId::invariant() const {
  if (k <= 4) return TermInvariant::I1;
  if (k <= 8) return TermInvariant::I2;
  if (k <= 10) return TermInvariant::I4;
  return TermInvariant::I5;
}

int TermId::power() const {
  if (is_fiber()) return 2;
  return ((k - 1) % 4) < 2 ? 1 : 2;
}

Activation TermId::activation() const {
  return (k % 2 == 1) ? Activation::Identity : Activation::Exponential;
}

TermId TermId::identity_twin() const {
  return activation() == Activation::Exponential ? TermId{k - 1} : *this;
}

std::string term_label(TermId id) {
  static constexpr const char* kArgs[] = {"[I1-3]", "[I2-3]", "<I4-1>", "<I5-1>"};
  const std::string arg = kArgs[static_cast<int>(id.invariant())];
  const std::string base = id.power() == 2 ? arg + "^2" : arg;
  return id.activation() == Activation::Identity ? base : "exp(" + base + ")-1";
}

void ModelWeights::validate() const {
  for (int i = 0; i < kTermCount; ++i) {
    if (!std::isfinite(outer[i]) || !std::isfinite(inner[i]) || outer[i] < 0.0 || inner[i] < 0.0) {
      throw DomainError("weights of term " + std::to_string(i + 1) + " must be finite and non-negative");
    }
  }
}

std::vector<NamedModel> reference_models() {
  std::vector<NamedModel> models(3);

  models[0].name = "mycelium";
  models[0].weights.outer[0] = 2.2540;
  models[0].weights.inner[0] = 2.2503;
  models[0].weights.outer[10] = 1.2800;
  models[0].weights.inner[10] = 1.2790;

  models[1].name = "fruiting_body";
  models[1].weights.outer[0] = 2.0377;
  models[1].weights.inner[0] = 2.1712;
  models[1].weights.outer[11] = 0.6881;
  models[1].weights.inner[11] = 0.7002;

  models[2].name = "protein_mycelium";
  models[2].weights.outer[0] = 3.4689;
  models[2].weights.inner[0] = 4.1216;
  return models;
}

NamedModel reference_model(const std::string& name) {
  for (auto& m : reference_models()) {
    if (m.name == name) return m;
  }
  throw DomainError("unknown reference model '" + name + "'", "UnknownModel");
}

double term_energy(TermId id, const InvariantSet& inv, double w_inner) {
  const double x = term_argument(id.invariant(), inv);
  const double arg = id.power() == 2 ? x * x : x;
  return id.activation() == Activation::Identity ? w_inner * arg : std::expm1(w_inner * arg);
}

double term_energy_inner_derivative(TermId id, const InvariantSet& inv, double w_inner) {
  const double x = term_argument(id.invariant(), inv);
  const double arg = id.power() == 2 ? x * x : x;
  return id.activation() == Activation::Identity ? arg : arg * std::exp(w_inner * arg);
}

double term_slope(TermId id, const InvariantSet& inv, double w_inner) {
  const double x = term_argument(id.invariant(), inv);
  // d(arg)/dI: 1 for linear, 2x for quadratic (Macaulay already applied to x).
  const double arg = id.power() == 2 ? x * x : x;
  const double darg = id.power() == 2 ? 2.0 * x : 1.0;
  if (id.activation() == Activation::Identity) return w_inner * darg;
  return w_inner * darg * std::exp(w_inner * arg);
}

double term_slope_inner_derivative(TermId id, const InvariantSet& inv, double w_inner) {
  const double x = term_argument(id.invariant(), inv);
  const double arg = id.power() == 2 ? x * x : x;
  const double darg = id.power() == 2 ? 2.0 * x : 1.0;
  if (id.activation() == Activation::Identity) return darg;
  return darg * std::exp(w_inner * arg) * (1.0 + w_inner * arg);
}

double energy(const ModelWeights& model, const InvariantSet& inv) {
  double psi = 0.0;
  for (int k = 1; k <= kTermCount; ++k) {
    if (model.outer[k - 1] == 0.0) continue;
    psi += model.outer[k - 1] * term_energy(TermId{k}, inv, model.inner[k - 1]);
  }
  return psi;
}

EnergyGradient energy_gradient(const ModelWeights& model, const InvariantSet& inv) {
  EnergyGradient g;
  for (int k = 1; k <= kTermCount; ++k) {
    const double w = model.outer[k - 1];
    if (w == 0.0) continue;
    const TermId id{k};
    const double contribution = w * term_slope(id, inv, model.inner[k - 1]);
    switch (id.invariant()) {
      case TermInvariant::I1:
        g.dI1 += contribution;
        break;
      case TermInvariant::I2:
        g.dI2 += contribution;
        break;
      case TermInvariant::I4:
        g.dI4 += contribution;
        break;
      case TermInvariant::I5:
        g.dI5 += contribution;
        break;
    }
  }
  return g;
}

WeightGradient weight_gradient(const ModelWeights& model, const InvariantSet& inv) {
  WeightGradient g;
  for (int k = 1; k <= kTermCount; ++k) {
    const TermId id{k};
    g.outer[k - 1] = term_energy(id, inv, model.inner[k - 1]);
    g.inner[k - 1] = model.outer[k - 1] * term_energy_inner_derivative(id, inv, model.inner[k - 1]);
  }
  return g;
}

}  // namespace fibersym
