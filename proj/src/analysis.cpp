#include "fibersym/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "fibersym/error.hpp"

namespace fibersym {

namespace {

// Modified Lentz evaluation of the continued fraction for I_x(a, b).
double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIterations = 10000;
  constexpr double kEps = 1e-15;
  constexpr double kTiny = 1e-300;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) return h;
  }
  throw NumericError("incomplete beta continued fraction did not converge");
}

std::vector<double> column(std::span<const StiffnessSummary> s, double StiffnessSummary::*field) {
  std::vector<double> out;
  for (const auto& x : s) out.push_back(x.*field);
  return out;
}

}  // namespace

double sample_mean(std::span<const double> x) {
  if (x.empty()) throw DomainError("mean of an empty sample");
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

double sample_variance(std::span<const double> x) {
  if (x.size() < 2) throw DomainError("variance needs at least 2 values");
  const double m = sample_mean(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return s / static_cast<double>(x.size() - 1);
}

double regress_stiffness(std::span<const double> strain, std::span<const double> stress) {
  if (strain.size() != stress.size()) throw DomainError("strain and stress lengths differ");
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < strain.size(); ++i) {
    num += strain[i] * stress[i];
    den += strain[i] * strain[i];
  }
  if (den == 0.0) throw DomainError("stiffness regression needs at least one non-zero strain");
  return num / den;
}

double shear_stiffness(std::span<const double> gamma, std::span<const double> tau) {
  return 3.0 * regress_stiffness(gamma, tau);
}

double curve_stiffness(const Experiment& e) {
  std::vector<double> strain;
  std::vector<double> stress_kpa;
  for (const auto& s : e.samples) {
    const double eps = e.mode == LoadingMode::Shear ? s.loading : s.loading - 1.0;
    if (std::abs(eps) > kStiffnessWindow + 1e-12) continue;
    if (e.mode == LoadingMode::Compression) {
      strain.push_back(std::abs(eps));
      stress_kpa.push_back(std::abs(s.stress));
    } else {
      strain.push_back(eps);
      stress_kpa.push_back(s.stress);
    }
  }
  return e.mode == LoadingMode::Shear ? shear_stiffness(strain, stress_kpa) : regress_stiffness(strain, stress_kpa);
}

StiffnessSummary StiffnessSummary::make(Direction dir, std::string sample, double ten, double com, double shr) {
  return {dir, std::move(sample), ten, com, shr, (ten + com + shr) / 3.0, 1};
}

std::vector<StiffnessSummary> stiffness_summaries(const ExperimentSet& set, Direction dir) {
  const Condition ten{LoadingMode::Tension, dir};
  const Condition com{LoadingMode::Compression, dir};
  const Condition shr{LoadingMode::Shear, dir};

  auto by_id = [&](const Condition& c) {
    std::map<std::string, const Experiment*> out;
    if (auto it = set.replicates.find(c); it != set.replicates.end()) {
      for (const auto& e : it->second) out[e.replicate] = &e;
    }
    return out;
  };
  const auto t = by_id(ten);
  const auto c = by_id(com);
  const auto s = by_id(shr);

  std::vector<StiffnessSummary> out;
  if (!t.empty() || !c.empty() || !s.empty()) {
    for (const auto& [id, e] : t) {
      auto ic = c.find(id);
      auto is = s.find(id);
      if (ic == c.end() || is == s.end()) continue;
      out.push_back(StiffnessSummary::make(dir, id, curve_stiffness(*e), curve_stiffness(*ic->second),
                                           curve_stiffness(*is->second)));
    }
    // Replicate ids are strings; keep numeric ids in numeric order.
    std::stable_sort(out.begin(), out.end(), [](const StiffnessSummary& a, const StiffnessSummary& b) {
      if (a.sample.size() != b.sample.size()) return a.sample.size() < b.sample.size();
      return a.sample < b.sample;
    });
    return out;
  }
  if (set.means.count(ten) && set.means.count(com) && set.means.count(shr)) {
    out.push_back(StiffnessSummary::make(dir, kMeanReplicate, curve_stiffness(set.means.at(ten)),
                                         curve_stiffness(set.means.at(com)), curve_stiffness(set.means.at(shr))));
  }
  return out;
}

double incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) throw DomainError("incomplete beta needs a, b > 0");
  if (x < 0.0 || x > 1.0 || std::isnan(x)) throw DomainError("incomplete beta needs 0 <= x <= 1");
  if (x == 0.0 || x == 1.0) return x;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  // The continued fraction converges fastest for x < (a + 1) / (a + b + 2).
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_two_tailed(double t, double df) {
  if (!(df > 0.0)) throw DomainError("degrees of freedom must be positive");
  if (std::isnan(t)) throw DomainError("t statistic is NaN");
  if (std::isinf(t)) return 0.0;
  return incomplete_beta(0.5 * df, 0.5, df / (df + t * t));
}

double student_t_cdf(double t, double df) {
  const double tail = 0.5 * student_t_two_tailed(t, df);
  return t >= 0.0 ? 1.0 - tail : tail;
}

WelchResult significance(double t, double df, double p) {
  return {t, df, p, p < 0.05, p < 0.01};
}

WelchResult welch_t_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) throw DomainError("Welch's t-test needs at least 2 values per sample", "Degenerate");
  for (double v : a) {
    if (!std::isfinite(v)) throw DomainError("non-finite sample value", "Degenerate");
  }
  for (double v : b) {
    if (!std::isfinite(v)) throw DomainError("non-finite sample value", "Degenerate");
  }
  const double ma = sample_mean(a);
  const double mb = sample_mean(b);
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double qa = sample_variance(a) / na;
  const double qb = sample_variance(b) / nb;
  const double se2 = qa + qb;

  if (se2 == 0.0) {
    if (ma == mb) throw DomainError("Welch's t-test is undefined for constant, equal samples", "Degenerate");
    const double t = ma > mb ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
    return significance(t, na + nb - 2.0, 0.0);
  }
  const double t = (ma - mb) / std::sqrt(se2);
  const double df = se2 * se2 / (qa * qa / (na - 1.0) + qb * qb / (nb - 1.0));
  const double p = t == 0.0 ? 1.0 : std::clamp(student_t_two_tailed(t, df), 0.0, 1.0);
  return significance(t, df, p);
}

std::string AnisotropyReport::classification() const {
  return symmetry == Symmetry::Anisotropic ? "anisotropic" : "isotropic (not rejected)";
}

AnisotropyReport anisotropy_report(std::span<const StiffnessSummary> in_plane,
                                   std::span<const StiffnessSummary> cross_plane) {
  if (in_plane.size() < 2 || cross_plane.size() < 2) {
    throw DomainError("anisotropy report needs at least 2 samples per direction", "Degenerate");
  }
  struct Attr {
    const char* name;
    double StiffnessSummary::*field;
  };
  static constexpr Attr kAttrs[] = {{"E_ten", &StiffnessSummary::E_ten},
                                    {"E_com", &StiffnessSummary::E_com},
                                    {"E_shr", &StiffnessSummary::E_shr},
                                    {"E_mean", &StiffnessSummary::E_mean}};
  AnisotropyReport report;
  for (const auto& attr : kAttrs) {
    const auto a = column(in_plane, attr.field);
    const auto b = column(cross_plane, attr.field);
    AttributeComparison row;
    row.attribute = attr.name;
    row.n_in_plane = static_cast<int>(a.size());
    row.mean_in_plane = sample_mean(a);
    row.sd_in_plane = std::sqrt(sample_variance(a));
    row.n_cross_plane = static_cast<int>(b.size());
    row.mean_cross_plane = sample_mean(b);
    row.sd_cross_plane = std::sqrt(sample_variance(b));
    row.welch = welch_t_test(a, b);
    if (row.welch.significant_05) report.symmetry = Symmetry::Anisotropic;
    report.rows.push_back(row);
  }
  return report;
}

std::string to_csv(const AnisotropyReport& report) {
  std::string out =
      "attribute,n_in_plane,mean_in_plane_kPa,sd_in_plane_kPa,n_cross_plane,mean_cross_plane_kPa,"
      "sd_cross_plane_kPa,t,df,p,significant_0.05,significant_0.01,classification\n";
  for (const auto& r : report.rows) {
    out += r.attribute + "," + std::to_string(r.n_in_plane) + "," + format_double(r.mean_in_plane) + "," +
           format_double(r.sd_in_plane) + "," + std::to_string(r.n_cross_plane) + "," +
           format_double(r.mean_cross_plane) + "," + format_double(r.sd_cross_plane) + "," +
           format_double(r.welch.t) + "," + format_double(r.welch.df) + "," + format_double(r.welch.p) + "," +
           (r.welch.significant_05 ? "1" : "0") + "," + (r.welch.significant_01 ? "1" : "0") + "," +
           report.classification() + "\n";
  }
  return out;
}

}  // namespace fibersym
