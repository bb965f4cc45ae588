#include "fibersym/discovery.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <numeric>
#include <random>
#include <thread>

#include "fibersym/error.hpp"
#include "fibersym/stress.hpp"

namespace fibersym {

namespace {

using TermMask = std::array<bool, kTermCount>;

constexpr TermMask kAllTerms = {true, true, true, true, true, true, true, true, true, true, true, true};

TermMask mask_of(std::span<const int> terms) {
  TermMask m{};
  for (int k : terms) m[term(k).k - 1] = true;
  return m;
}

// Per-term stress feature phi_k (stress per unit outer weight) and its
// derivative with respect to the inner weight.
struct Feature {
  double value;
  double d_inner;
};

Feature feature(int k, const TrainingPoint& p, double w_inner) {
  const TermId id{k};
  const double c = p.coeff[static_cast<int>(id.invariant())];
  return {term_slope(id, p.inv, w_inner) * c, term_slope_inner_derivative(id, p.inv, w_inner) * c};
}

struct AdamRun {
  ModelWeights weights;
  double final_loss = 0.0;
  std::vector<double> losses;
};

// Full-batch Adam with projection onto w >= 0, w* >= 0 after every step.
AdamRun run_adam(const std::vector<TrainingPoint>& points, const TrainingConfig& cfg, const TermMask& mask,
                 ModelWeights start) {
  constexpr double beta1 = 0.9;
  constexpr double beta2 = 0.999;
  constexpr double eps = 1e-8;
  constexpr int P = 2 * kTermCount;

  for (int i = 0; i < kTermCount; ++i) {
    if (!mask[i]) start.outer[i] = 0.0;
  }
  AdamRun run{start, 0.0, {}};
  run.losses.reserve(static_cast<std::size_t>(cfg.epochs) + 1);

  std::array<double, P> m{};
  std::array<double, P> v{};
  const double n = static_cast<double>(points.size());
  auto& w = run.weights;

  auto objective = [&](std::array<double, P>* grad) {
    double sq = 0.0;
    if (grad) grad->fill(0.0);
    for (const auto& p : points) {
      std::array<Feature, kTermCount> f{};
      double pred = 0.0;
      for (int i = 0; i < kTermCount; ++i) {
        if (!mask[i]) continue;
        f[i] = feature(i + 1, p, w.inner[i]);
        pred += w.outer[i] * f[i].value;
      }
      const double r = pred - p.target;
      sq += r * r;
      if (!grad) continue;
      for (int i = 0; i < kTermCount; ++i) {
        if (!mask[i]) continue;
        (*grad)[i] += 2.0 * r * f[i].value;
        (*grad)[kTermCount + i] += 2.0 * r * w.outer[i] * f[i].d_inner;
      }
    }
    double l1 = 0.0;
    for (int i = 0; i < kTermCount; ++i) l1 += w.outer[i];
    if (grad) {
      for (auto& g : *grad) g /= n;
      // w is constrained to w >= 0, so the feasible one-sided derivative of
      // the penalty is +alpha everywhere, including at w = 0.
      for (int i = 0; i < kTermCount; ++i) {
        if (mask[i]) (*grad)[i] += cfg.alpha;
      }
    }
    return sq / n + cfg.alpha * l1;
  };

  std::array<double, P> g{};
  double b1t = 1.0;
  double b2t = 1.0;
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const double L = objective(&g);
    if (!std::isfinite(L)) {
      const double last = run.losses.empty() ? L : run.losses.back();
      throw NumericError("training diverged at epoch " + std::to_string(epoch) +
                             " (last finite loss " + std::to_string(last) + ")",
                         "TrainingDiverged");
    }
    run.losses.push_back(L);
    b1t *= beta1;
    b2t *= beta2;
    for (int j = 0; j < P; ++j) {
      const int i = j % kTermCount;
      if (!mask[i]) continue;
      m[j] = beta1 * m[j] + (1.0 - beta1) * g[j];
      v[j] = beta2 * v[j] + (1.0 - beta2) * g[j] * g[j];
      const double step = cfg.learning_rate * (m[j] / (1.0 - b1t)) / (std::sqrt(v[j] / (1.0 - b2t)) + eps);
      double& x = j < kTermCount ? w.outer[i] : w.inner[i];
      x = std::max(x - step, 0.0);
    }
  }
  run.final_loss = objective(nullptr);
  if (!std::isfinite(run.final_loss)) throw NumericError("training diverged at the final epoch", "TrainingDiverged");
  run.losses.push_back(run.final_loss);
  return run;
}

AdamRun best_of_restarts(const std::vector<TrainingPoint>& points, const TrainingConfig& cfg, const TermMask& mask) {
  ModelWeights init;
  init.outer.fill(cfg.init_scale);
  init.inner.fill(cfg.init_scale);
  AdamRun best = run_adam(points, cfg, mask, init);

  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> uniform(0.0, 2.0 * cfg.init_scale);
  for (int r = 0; r < cfg.restarts; ++r) {
    for (int i = 0; i < kTermCount; ++i) {
      init.outer[i] = uniform(rng);
      init.inner[i] = uniform(rng);
    }
    AdamRun run = run_adam(points, cfg, mask, init);
    if (run.final_loss < best.final_loss) best = std::move(run);
  }
  return best;
}

void sparsify(ModelWeights& w, double threshold) {
  for (auto& x : w.outer) {
    if (x <= threshold) x = 0.0;
  }
}

std::vector<LossTracePoint> downsample(const std::vector<double>& losses, std::size_t max_points) {
  std::vector<LossTracePoint> out;
  if (losses.empty()) return out;
  const std::size_t n = losses.size();
  const std::size_t stride = (n + max_points - 1) / max_points;
  for (std::size_t i = 0; i < n; i += stride) out.push_back({static_cast<int>(i), losses[i]});
  if (out.back().epoch != static_cast<int>(n - 1)) {
    if (out.size() == max_points) out.pop_back();
    out.push_back({static_cast<int>(n - 1), losses.back()});
  }
  return out;
}

double mean_of(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

void fill_r2(SubsetFit& fit, std::span<const Experiment> experiments) {
  fit.r2.clear();
  for (const auto& e : experiments) fit.r2.push_back(r_squared(fit.weights, e));
  fit.mean_r2 = mean_of(fit.r2);
}

int parameter_count(std::span<const int> terms) {
  int n = 0;
  for (int k : terms) n += TermId{k}.activation() == Activation::Exponential ? 2 : 1;
  return n;
}

}  // namespace

void TrainingConfig::validate() const {
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw DomainError("alpha must be finite and non-negative");
  if (epochs < 1) throw DomainError("epochs must be positive");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) throw DomainError("learning rate must be positive");
  if (!(threshold >= 0.0)) throw DomainError("threshold must be non-negative");
  if (!(init_scale >= 0.0) || !std::isfinite(init_scale)) throw DomainError("initialization scale must be non-negative");
  if (restarts < 0) throw DomainError("restarts must be non-negative");
}

std::vector<TrainingPoint> training_points(std::span<const Experiment> experiments) {
  std::vector<TrainingPoint> points;
  for (const auto& e : experiments) {
    for (const auto& s : e.samples) {
      points.push_back({invariants_for(e.mode, s.loading, e.dir), stress_coefficients(e.mode, e.dir, s.loading),
                        s.stress});
    }
  }
  return points;
}

double predict_point(const ModelWeights& model, const TrainingPoint& p) {
  double pred = 0.0;
  for (int i = 0; i < kTermCount; ++i) {
    if (model.outer[i] == 0.0) continue;
    pred += model.outer[i] * feature(i + 1, p, model.inner[i]).value;
  }
  return pred;
}

double loss(const ModelWeights& model, std::span<const Experiment> experiments, double alpha) {
  double sq = 0.0;
  std::size_t n = 0;
  for (const auto& e : experiments) {
    for (const auto& s : e.samples) {
      const double r = stress(model, e.mode, e.dir, s.loading) - s.stress;
      sq += r * r;
      ++n;
    }
  }
  if (n == 0) throw DomainError("loss needs at least one sample", "NoData");
  double l1 = 0.0;
  for (double w : model.outer) l1 += std::abs(w);
  return sq / static_cast<double>(n) + alpha * l1;
}

std::array<double, 2 * kTermCount> loss_gradient(const ModelWeights& model, std::span<const Experiment> experiments,
                                                 double alpha) {
  const auto points = training_points(experiments);
  if (points.empty()) throw DomainError("loss needs at least one sample", "NoData");
  std::array<double, 2 * kTermCount> g{};
  for (const auto& p : points) {
    std::array<Feature, kTermCount> f{};
    double pred = 0.0;
    for (int i = 0; i < kTermCount; ++i) {
      f[i] = feature(i + 1, p, model.inner[i]);
      pred += model.outer[i] * f[i].value;
    }
    const double r = pred - p.target;
    for (int i = 0; i < kTermCount; ++i) {
      g[i] += 2.0 * r * f[i].value;
      g[kTermCount + i] += 2.0 * r * model.outer[i] * f[i].d_inner;
    }
  }
  const double n = static_cast<double>(points.size());
  for (auto& x : g) x /= n;
  for (int i = 0; i < kTermCount; ++i) {
    const double w = model.outer[i];
    g[i] += w > 0.0 ? alpha : (w < 0.0 ? -alpha : 0.0);
  }
  return g;
}

double r_squared(const ModelWeights& model, const Experiment& experiment) {
  const auto& s = experiment.samples;
  if (s.size() < 2) throw NumericError("R^2 needs at least 2 samples", "ZeroVariance");
  double mean = 0.0;
  for (const auto& x : s) mean += x.stress;
  mean /= static_cast<double>(s.size());
  double ss_tot = 0.0;
  double ss_res = 0.0;
  for (const auto& x : s) {
    const double r = stress(model, experiment.mode, experiment.dir, x.loading) - x.stress;
    ss_res += r * r;
    ss_tot += (x.stress - mean) * (x.stress - mean);
  }
  if (ss_tot == 0.0) {
    throw NumericError("R^2 undefined for " + condition_label(experiment.condition()) + ": zero stress variance",
                       "ZeroVariance");
  }
  return 1.0 - ss_res / ss_tot;
}

std::vector<int> active_terms(const ModelWeights& w, double threshold) {
  std::vector<int> out;
  for (int i = 0; i < kTermCount; ++i) {
    if (w.outer[i] > threshold) out.push_back(i + 1);
  }
  return out;
}

DiscoveredModel train(const ExperimentSet& set, const TrainingConfig& config, std::span<const Condition> training) {
  config.validate();
  const auto evaluation = set.mean_curves();

  std::vector<Experiment> train_set;
  std::vector<Condition> trained_on;
  if (training.empty()) {
    train_set = evaluation;
    for (const auto& e : evaluation) trained_on.push_back(e.condition());
  } else {
    for (const auto& c : training) {
      auto it = set.means.find(c);
      if (it == set.means.end()) throw DomainError("no data for training condition " + condition_label(c), "NoData");
      train_set.push_back(it->second);
      trained_on.push_back(c);
    }
  }
  const auto points = training_points(train_set);
  if (points.empty()) throw DomainError("no training samples", "NoData");

  AdamRun run = best_of_restarts(points, config, kAllTerms);
  sparsify(run.weights, config.threshold);

  DiscoveredModel out;
  out.l1_active_terms = active_terms(run.weights, config.threshold);
  std::vector<double> losses = std::move(run.losses);

  if (config.refine && !out.l1_active_terms.empty()) {
    const auto support = simplify_support(train_set, out.l1_active_terms);
    if (support != out.l1_active_terms) {
      if (support.empty()) {
        run.weights = ModelWeights{};
      } else {
        run = best_of_restarts(points, config, mask_of(support));
        sparsify(run.weights, config.threshold);
        losses.insert(losses.end(), run.losses.begin(), run.losses.end());
      }
    }
  }

  out.model = {set.material.empty() ? "discovered" : set.material + "_discovered", run.weights};
  out.active_terms = active_terms(run.weights, config.threshold);
  out.config = config;
  out.trained_on = trained_on;
  out.data_fingerprint = fingerprint(set);
  out.final_loss = loss(run.weights, train_set, config.alpha);
  out.loss_trace = downsample(losses, 1000);

  std::vector<double> r2;
  for (const auto& e : evaluation) {
    const double value = r_squared(run.weights, e);
    out.fits.push_back({e.condition(), value});
    r2.push_back(value);
  }
  out.mean_r2 = mean_of(r2);
  return out;
}

SubsetFit refit_subset(std::span<const Experiment> experiments, std::span<const int> terms) {
  SubsetFit fit;
  fit.terms.assign(terms.begin(), terms.end());
  std::sort(fit.terms.begin(), fit.terms.end());
  fit.terms.erase(std::unique(fit.terms.begin(), fit.terms.end()), fit.terms.end());
  for (int k : fit.terms) term(k);

  const auto points = training_points(experiments);
  if (points.empty()) throw DomainError("refit needs at least one sample", "NoData");

  // Parameter layout: outer weights of all terms, then inner weights of the
  // exponential terms.
  std::vector<int> exp_terms;
  for (int k : fit.terms) {
    if (TermId{k}.activation() == Activation::Exponential) exp_terms.push_back(k);
  }
  const int m = static_cast<int>(fit.terms.size());
  const int np = m + static_cast<int>(exp_terms.size());

  auto unpack = [&](const Eigen::VectorXd& theta) {
    ModelWeights w;
    for (int k : fit.terms) w.inner[k - 1] = 1.0;
    for (int i = 0; i < m; ++i) w.outer[fit.terms[i] - 1] = theta[i];
    for (std::size_t j = 0; j < exp_terms.size(); ++j) w.inner[exp_terms[j] - 1] = theta[m + j];
    return w;
  };
  auto rss_of = [&](const ModelWeights& w) {
    double s = 0.0;
    for (const auto& p : points) {
      const double r = predict_point(w, p) - p.target;
      s += r * r;
    }
    return s;
  };

  if (m == 0) {
    fit.weights = ModelWeights{};
    fit.rss = rss_of(fit.weights);
    fill_r2(fit, experiments);
    return fit;
  }

  const auto n = static_cast<Eigen::Index>(points.size());
  auto solve_from = [&](double inner_start) {
    Eigen::VectorXd theta(np);
    theta.head(m).setOnes();
    theta.tail(np - m).setConstant(inner_start);
    ModelWeights w = unpack(theta);
    double rss = rss_of(w);
    double mu = 1e-3;
    Eigen::MatrixXd J(n, np);
    Eigen::VectorXd r(n);
    for (int iter = 0; iter < 400; ++iter) {
      for (Eigen::Index i = 0; i < n; ++i) {
        const auto& p = points[static_cast<std::size_t>(i)];
        double pred = 0.0;
        for (int a = 0; a < m; ++a) {
          const int k = fit.terms[a];
          const auto f = feature(k, p, w.inner[k - 1]);
          pred += w.outer[k - 1] * f.value;
          J(i, a) = f.value;
        }
        for (std::size_t j = 0; j < exp_terms.size(); ++j) {
          const int k = exp_terms[j];
          J(i, m + static_cast<Eigen::Index>(j)) = w.outer[k - 1] * feature(k, p, w.inner[k - 1]).d_inner;
        }
        r[i] = pred - p.target;
      }
      const Eigen::MatrixXd A = J.transpose() * J;
      const Eigen::VectorXd g = J.transpose() * r;
      bool accepted = false;
      double improvement = 0.0;
      while (mu < 1e14) {
        Eigen::MatrixXd H = A;
        for (int d = 0; d < np; ++d) H(d, d) += mu * std::max(A(d, d), 1e-12);
        const Eigen::VectorXd delta = H.ldlt().solve(-g);
        Eigen::VectorXd trial = (theta + delta).cwiseMax(0.0);
        const ModelWeights tw = unpack(trial);
        const double trss = rss_of(tw);
        if (std::isfinite(trss) && trss < rss) {
          improvement = rss - trss;
          theta = trial;
          w = tw;
          rss = trss;
          mu = std::max(mu / 3.0, 1e-15);
          accepted = true;
          break;
        }
        mu *= 4.0;
      }
      if (!accepted || improvement <= 1e-15 * rss || rss == 0.0) break;
    }
    return std::pair{w, rss};
  };

  std::vector<double> starts = {0.5};
  if (!exp_terms.empty()) starts = {0.5, 0.1, 2.0};
  bool first = true;
  for (double s : starts) {
    auto [w, rss] = solve_from(s);
    if (first || rss < fit.rss) {
      fit.weights = w;
      fit.rss = rss;
      first = false;
    }
  }
  fill_r2(fit, experiments);
  return fit;
}

std::vector<SubsetFit> enumerate_subsets_bestfit(std::span<const Experiment> experiments, int max_terms,
                                                 int threads) {
  if (max_terms < 0 || max_terms > kTermCount) {
    throw DomainError("max_terms must be in 0..12, got " + std::to_string(max_terms), "CombinatorialLimit");
  }
  if (experiments.empty()) throw DomainError("no experiments", "NoData");

  std::vector<std::vector<int>> subsets;
  for (int size = 0; size <= max_terms; ++size) {
    std::vector<bool> pick(kTermCount, false);
    std::fill(pick.begin(), pick.begin() + size, true);
    do {
      std::vector<int> s;
      for (int i = 0; i < kTermCount; ++i) {
        if (pick[i]) s.push_back(i + 1);
      }
      subsets.push_back(std::move(s));
    } while (std::prev_permutation(pick.begin(), pick.end()));
  }

  std::vector<SubsetFit> fits(subsets.size());
  const int hw = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  const int workers = std::clamp(threads > 0 ? threads : hw, 1, static_cast<int>(subsets.size()));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < subsets.size(); i = next++) {
      try {
        fits[i] = refit_subset(experiments, subsets[i]);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 1; t < workers; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  std::stable_sort(fits.begin(), fits.end(),
                   [](const SubsetFit& a, const SubsetFit& b) { return a.mean_r2 > b.mean_r2; });
  return fits;
}

std::vector<int> simplify_support(std::span<const Experiment> experiments, std::vector<int> support) {
  std::sort(support.begin(), support.end());
  const auto points = training_points(experiments);
  const double n = static_cast<double>(points.size());
  if (points.empty()) throw DomainError("no samples", "NoData");
  double sum_sq = 0.0;
  for (const auto& p : points) sum_sq += p.target * p.target;
  const double floor = 1e-12 * sum_sq;

  std::map<std::vector<int>, double> cache;
  auto bic = [&](const std::vector<int>& s) {
    auto it = cache.find(s);
    if (it != cache.end()) return it->second;
    const double rss = refit_subset(experiments, s).rss;
    const double value = n * std::log((rss + floor) / n) + parameter_count(s) * std::log(n);
    cache.emplace(s, value);
    return value;
  };

  double current = bic(support);
  while (!support.empty()) {
    std::vector<std::vector<int>> candidates;
    for (int k : support) {
      std::vector<int> dropped;
      std::copy_if(support.begin(), support.end(), std::back_inserter(dropped), [k](int j) { return j != k; });
      candidates.push_back(dropped);
      if (TermId{k}.activation() == Activation::Exponential) {
        auto swapped = dropped;
        swapped.push_back(k - 1);
        std::sort(swapped.begin(), swapped.end());
        swapped.erase(std::unique(swapped.begin(), swapped.end()), swapped.end());
        candidates.push_back(std::move(swapped));
      }
    }
    const std::vector<int>* best = nullptr;
    double best_bic = 0.0;
    for (const auto& c : candidates) {
      const double b = bic(c);
      if (!best || b < best_bic || (b == best_bic && c < *best)) {
        best = &c;
        best_bic = b;
      }
    }
    if (!best || best_bic > current) break;
    support = *best;
    current = best_bic;
  }
  return support;
}

}  // namespace fibersym
