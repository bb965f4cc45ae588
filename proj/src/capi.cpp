#include "fibersym/fibersym.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <new>
#include <string>

#include "fibersym/analysis.hpp"
#include "fibersym/dataio.hpp"
#include "fibersym/discovery.hpp"
#include "fibersym/error.hpp"
#include "fibersym/report.hpp"

using namespace fibersym;

struct fsym_model {
  NamedModel value;
};
struct fsym_dataset {
  ExperimentSet value;
};
struct fsym_fit {
  DiscoveredModel value;
};

namespace {

thread_local std::string g_message;
thread_local std::string g_class;

fsym_status fail(fsym_status status, std::string cls, std::string message) {
  g_class = std::move(cls);
  g_message = std::move(message);
  return status;
}

template <class Fn>
fsym_status guarded(Fn&& fn) {
  g_class.clear();
  g_message.clear();
  try {
    fn();
    return FSYM_OK;
  } catch (const Error& e) {
    return fail(static_cast<fsym_status>(e.kind()), e.error_class(), e.what());
  } catch (const std::bad_alloc&) {
    return fail(FSYM_ERR_NUMERIC, "OutOfMemory", "out of memory");
  } catch (const std::exception& e) {
    return fail(FSYM_ERR_DOMAIN, "Domain", e.what());
  }
}

void require(const void* p, const char* what) {
  if (!p) throw DomainError(std::string(what) + " is null", "NullArgument");
}

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size() + 1);
  return out;
}

LoadingMode to_mode(fsym_mode m) {
  switch (m) {
    case FSYM_TENSION: return LoadingMode::Tension;
    case FSYM_COMPRESSION: return LoadingMode::Compression;
    case FSYM_SHEAR: return LoadingMode::Shear;
  }
  throw DomainError("unknown loading mode");
}

Direction to_dir(fsym_direction d) {
  switch (d) {
    case FSYM_IN_PLANE: return Direction::InPlane;
    case FSYM_CROSS_PLANE: return Direction::CrossPlane;
  }
  throw DomainError("unknown direction");
}

LoadingCase make_case(fsym_mode mode, fsym_direction dir, double loading) {
  LoadingCase c{to_mode(mode), to_dir(dir), loading};
  c.validate();
  return c;
}

}  // namespace

extern "C" {

const char* fsym_last_error_message(void) { return g_message.c_str(); }
const char* fsym_last_error_class(void) { return g_class.c_str(); }
const char* fsym_version(void) { return "1.0.0"; }
void fsym_string_free(char* s) { std::free(s); }

fsym_status fsym_model_builtin(const char* name, fsym_model** out) {
  return guarded([&] {
    require(name, "name");
    require(out, "out");
    *out = new fsym_model{reference_model(name)};
  });
}

fsym_status fsym_model_resolve(const char* name_or_path, fsym_model** out) {
  return guarded([&] {
    require(name_or_path, "name_or_path");
    require(out, "out");
    *out = new fsym_model{resolve_model(name_or_path)};
  });
}

fsym_status fsym_model_create(const char* name, const double outer[FSYM_TERM_COUNT],
                              const double inner[FSYM_TERM_COUNT], fsym_model** out) {
  return guarded([&] {
    require(name, "name");
    require(outer, "outer");
    require(inner, "inner");
    require(out, "out");
    NamedModel m{name, {}};
    for (int k = 0; k < kTermCount; ++k) {
      m.weights.outer[k] = outer[k];
      m.weights.inner[k] = inner[k];
    }
    m.weights.validate();
    *out = new fsym_model{std::move(m)};
  });
}

fsym_status fsym_model_load(const char* path, fsym_model** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new fsym_model{load_model(path)};
  });
}

fsym_status fsym_model_save(const fsym_model* model, const char* path) {
  return guarded([&] {
    require(model, "model");
    require(path, "path");
    save_model(model->value, path);
  });
}

fsym_status fsym_model_to_json(const fsym_model* model, char** out) {
  return guarded([&] {
    require(model, "model");
    require(out, "out");
    *out = dup(model_to_json(model->value));
  });
}

fsym_status fsym_model_weights(const fsym_model* model, double outer[FSYM_TERM_COUNT],
                               double inner[FSYM_TERM_COUNT]) {
  return guarded([&] {
    require(model, "model");
    for (int k = 0; k < kTermCount; ++k) {
      if (outer) outer[k] = model->value.weights.outer[k];
      if (inner) inner[k] = model->value.weights.inner[k];
    }
  });
}

fsym_status fsym_model_name(const fsym_model* model, char** out) {
  return guarded([&] {
    require(model, "model");
    require(out, "out");
    *out = dup(model->value.name);
  });
}

void fsym_model_free(fsym_model* model) { delete model; }

fsym_status fsym_parse_case(const char* text, fsym_mode* mode, fsym_direction* dir) {
  return guarded([&] {
    require(text, "text");
    require(mode, "mode");
    require(dir, "dir");
    const std::string_view s(text);
    const auto colon = s.find(':');
    if (colon == std::string_view::npos) {
      throw DomainError("case must look like <mode>:<direction>, got '" + std::string(s) + "'", "Usage");
    }
    *mode = static_cast<fsym_mode>(parse_mode(s.substr(0, colon)));
    *dir = static_cast<fsym_direction>(parse_direction(s.substr(colon + 1)));
  });
}

fsym_status fsym_protocol_limit(fsym_mode mode, double* out) {
  return guarded([&] {
    require(out, "out");
    *out = LoadingCase::protocol(to_mode(mode), Direction::InPlane).loading;
  });
}

fsym_status fsym_invariants(fsym_mode mode, fsym_direction dir, double loading, double out[4]) {
  return guarded([&] {
    require(out, "out");
    const auto c = make_case(mode, dir, loading);
    const auto inv = invariants_for(c.mode, c.loading, c.dir);
    out[0] = inv.I1;
    out[1] = inv.I2;
    out[2] = inv.I4;
    out[3] = inv.I5;
  });
}

fsym_status fsym_energy(const fsym_model* model, fsym_mode mode, fsym_direction dir, double loading, double* out) {
  return guarded([&] {
    require(model, "model");
    require(out, "out");
    const auto c = make_case(mode, dir, loading);
    *out = energy(model->value.weights, invariants_for(c.mode, c.loading, c.dir));
  });
}

fsym_status fsym_stress(const fsym_model* model, fsym_mode mode, fsym_direction dir, double loading, double* out) {
  return guarded([&] {
    require(model, "model");
    require(out, "out");
    const auto c = make_case(mode, dir, loading);
    *out = stress(model->value.weights, c.mode, c.dir, c.loading);
  });
}

fsym_status fsym_predict_csv(const fsym_model* model, fsym_mode mode, fsym_direction dir, double loading,
                             int n_points, char** out) {
  return guarded([&] {
    require(model, "model");
    require(out, "out");
    const auto c = make_case(mode, dir, loading);
    const auto grid = loading_grid(c, n_points);
    *out = dup(curve_csv(model->value, c, grid));
  });
}

fsym_status fsym_dataset_synthesize(const fsym_model* model, int n_points, double noise, uint64_t seed,
                                    int replicates, fsym_dataset** out) {
  return guarded([&] {
    require(model, "model");
    require(out, "out");
    *out = new fsym_dataset{synthesize(model->value, protocol_cases(), n_points, NoiseSpec{noise, seed}, replicates)};
  });
}

fsym_status fsym_dataset_load(const char* path, int permissive, fsym_dataset** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    ValidationOptions opts;
    opts.permissive = permissive != 0;
    *out = new fsym_dataset{load_data(path, opts)};
  });
}

fsym_status fsym_dataset_save(const fsym_dataset* set, const char* path) {
  return guarded([&] {
    require(set, "set");
    require(path, "path");
    save_csv(set->value, path);
  });
}

fsym_status fsym_dataset_to_csv(const fsym_dataset* set, char** out) {
  return guarded([&] {
    require(set, "set");
    require(out, "out");
    *out = dup(to_csv(set->value));
  });
}

fsym_status fsym_dataset_fingerprint(const fsym_dataset* set, char** out) {
  return guarded([&] {
    require(set, "set");
    require(out, "out");
    *out = dup(fingerprint(set->value));
  });
}

fsym_status fsym_dataset_material(const fsym_dataset* set, char** out) {
  return guarded([&] {
    require(set, "set");
    require(out, "out");
    *out = dup(set->value.material);
  });
}

fsym_status fsym_dataset_sample_count(const fsym_dataset* set, size_t* out) {
  return guarded([&] {
    require(set, "set");
    require(out, "out");
    *out = set->value.sample_count();
  });
}

void fsym_dataset_free(fsym_dataset* set) { delete set; }

void fsym_fit_config_default(fsym_fit_config* config) {
  if (!config) return;
  const TrainingConfig d;
  config->alpha = d.alpha;
  config->epochs = d.epochs;
  config->learning_rate = d.learning_rate;
  config->threshold = d.threshold;
  config->seed = d.seed;
  config->init_scale = d.init_scale;
  config->restarts = d.restarts;
  config->refine = d.refine ? 1 : 0;
}

fsym_status fsym_fit_train(const fsym_dataset* set, const fsym_fit_config* config, fsym_fit** out) {
  return guarded([&] {
    require(set, "set");
    require(out, "out");
    TrainingConfig c;
    if (config) {
      c.alpha = config->alpha;
      c.epochs = config->epochs;
      c.learning_rate = config->learning_rate;
      c.threshold = config->threshold;
      c.seed = config->seed;
      c.init_scale = config->init_scale;
      c.restarts = config->restarts;
      c.refine = config->refine != 0;
    }
    *out = new fsym_fit{train(set->value, c)};
  });
}

fsym_status fsym_fit_model(const fsym_fit* fit, fsym_model** out) {
  return guarded([&] {
    require(fit, "fit");
    require(out, "out");
    *out = new fsym_model{fit->value.model};
  });
}

fsym_status fsym_fit_active_terms(const fsym_fit* fit, int terms[FSYM_TERM_COUNT], int* count) {
  return guarded([&] {
    require(fit, "fit");
    require(terms, "terms");
    require(count, "count");
    const auto& a = fit->value.active_terms;
    *count = static_cast<int>(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) terms[i] = a[i];
  });
}

fsym_status fsym_fit_mean_r2(const fsym_fit* fit, double* out) {
  return guarded([&] {
    require(fit, "fit");
    require(out, "out");
    *out = fit->value.mean_r2;
  });
}

fsym_status fsym_fit_report_json(const fsym_fit* fit, char** out) {
  return guarded([&] {
    require(fit, "fit");
    require(out, "out");
    *out = dup(fit_report_json(fit->value));
  });
}

void fsym_fit_free(fsym_fit* fit) { delete fit; }

fsym_status fsym_evaluation_report_json(const fsym_model* model, const fsym_dataset* set, char** out) {
  return guarded([&] {
    require(model, "model");
    require(set, "set");
    require(out, "out");
    *out = dup(evaluation_report_json(model->value, set->value));
  });
}

fsym_status fsym_subsets_report_json(const fsym_dataset* set, int max_terms, int threads, char** out) {
  return guarded([&] {
    require(set, "set");
    require(out, "out");
    const auto exps = set->value.mean_curves();
    if (exps.empty()) throw IoError("dataset has no curves", "NoData");
    const auto fits = enumerate_subsets_bestfit(exps, max_terms, threads);
    *out = dup(subsets_report_json(fits, exps));
  });
}

fsym_status fsym_stiffness_table_csv(const fsym_dataset* set, char** out) {
  return guarded([&] {
    require(set, "set");
    require(out, "out");
    std::string csv = "direction,sample,E_ten_kPa,E_com_kPa,E_shr_kPa,E_mean_kPa\n";
    for (auto dir : {Direction::InPlane, Direction::CrossPlane}) {
      for (const auto& s : stiffness_summaries(set->value, dir)) {
        csv += std::string(to_string(dir)) + "," + s.sample + "," + format_double(s.E_ten) + "," +
               format_double(s.E_com) + "," + format_double(s.E_shr) + "," + format_double(s.E_mean) + "\n";
      }
    }
    *out = dup(csv);
  });
}

fsym_status fsym_anisotropy_report_csv(const fsym_dataset* set, char** out) {
  return guarded([&] {
    require(set, "set");
    require(out, "out");
    const auto a = stiffness_summaries(set->value, Direction::InPlane);
    const auto b = stiffness_summaries(set->value, Direction::CrossPlane);
    *out = dup(to_csv(anisotropy_report(a, b)));
  });
}

fsym_status fsym_welch(const double* a, size_t na, const double* b, size_t nb, fsym_welch_result* out) {
  return guarded([&] {
    require(out, "out");
    if (na) require(a, "a");
    if (nb) require(b, "b");
    const auto r = welch_t_test(std::span<const double>(a, na), std::span<const double>(b, nb));
    *out = {r.t, r.df, r.p};
  });
}

fsym_status fsym_export_reports(const fsym_dataset* set, const fsym_model* model, const char* out_dir, int svg,
                                char** files) {
  return guarded([&] {
    require(set, "set");
    require(out_dir, "out_dir");
    ExportOptions opts;
    opts.svg = svg != 0;
    const auto written = export_reports(set->value, model ? &model->value : nullptr, out_dir, opts);
    if (files) {
      std::string list;
      for (const auto& f : written) list += f + "\n";
      *files = dup(list);
    }
  });
}

fsym_status fsym_fnv1a_hex(const char* bytes, size_t length, char** out) {
  return guarded([&] {
    if (length) require(bytes, "bytes");
    require(out, "out");
    *out = dup(fnv1a_hex(std::string(bytes ? bytes : "", length)));
  });
}

}  // extern "C"
