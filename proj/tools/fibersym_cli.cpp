#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fibersym/fibersym.h"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

struct Failure {
  fsym_status status;
  std::string cls;
  std::string message;
};

void check(fsym_status s) {
  if (s != FSYM_OK) throw Failure{s, fsym_last_error_class(), fsym_last_error_message()};
}

[[noreturn]] void io_failure(const std::string& message) { throw Failure{FSYM_ERR_IO, "IO", message}; }

struct ModelDeleter {
  void operator()(fsym_model* m) const { fsym_model_free(m); }
};
struct DatasetDeleter {
  void operator()(fsym_dataset* d) const { fsym_dataset_free(d); }
};
struct FitDeleter {
  void operator()(fsym_fit* f) const { fsym_fit_free(f); }
};
using ModelPtr = std::unique_ptr<fsym_model, ModelDeleter>;
using DatasetPtr = std::unique_ptr<fsym_dataset, DatasetDeleter>;
using FitPtr = std::unique_ptr<fsym_fit, FitDeleter>;

// Takes ownership of a C string returned by the library.
std::string take(char* s) {
  std::string out = s ? s : "";
  fsym_string_free(s);
  return out;
}

std::string fnv(const std::string& bytes) {
  char* out = nullptr;
  check(fsym_fnv1a_hex(bytes.data(), bytes.size(), &out));
  return take(out);
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) io_failure("cannot read " + p.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void make_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) io_failure("cannot create directory " + dir.string());
}

ModelPtr resolve_model(const std::string& name) {
  fsym_model* m = nullptr;
  check(fsym_model_resolve(name.c_str(), &m));
  return ModelPtr(m);
}

DatasetPtr load_dataset(const std::string& path, bool permissive) {
  fsym_dataset* d = nullptr;
  check(fsym_dataset_load(path.c_str(), permissive ? 1 : 0, &d));
  return DatasetPtr(d);
}

std::string dataset_fingerprint(const fsym_dataset* d) {
  char* out = nullptr;
  check(fsym_dataset_fingerprint(d, &out));
  return take(out);
}

// Collects written files and emits manifest.json last.
class Run {
 public:
  Run(std::string command, fs::path out_dir) : command_(std::move(command)), out_(std::move(out_dir)) {
    manifest_["schema_version"] = 1;
    manifest_["tool"] = "fibersym";
    manifest_["version"] = fsym_version();
    manifest_["command"] = command_;
    manifest_["config"] = ordered_json::object();
    manifest_["inputs"] = ordered_json::array();
    manifest_["outputs"] = ordered_json::array();
  }

  ordered_json& config() { return manifest_["config"]; }

  void input(const std::string& kind, const std::string& ref, const std::string& fingerprint) {
    manifest_["inputs"].push_back({{"kind", kind}, {"ref", ref}, {"fingerprint", fingerprint}});
  }

  void write(const std::string& name, const std::string& text) {
    const fs::path p = out_ / name;
    std::ofstream o(p, std::ios::binary);
    if (!o) io_failure("cannot write " + p.string());
    o << text;
    if (!o) io_failure("write failed: " + p.string());
    record(name, text);
  }

  void record(const std::string& name, const std::string& text) {
    manifest_["outputs"].push_back({{"file", name}, {"fnv1a64", fnv(text)}});
  }

  void finish() {
    const fs::path p = out_ / "manifest.json";
    std::ofstream o(p, std::ios::binary);
    if (!o) io_failure("cannot write " + p.string());
    o << manifest_.dump(2) << "\n";
  }

  const fs::path& dir() const { return out_; }

 private:
  std::string command_;
  fs::path out_;
  ordered_json manifest_;
};

struct Options {
  std::string data = ".";
  std::string out = ".";
  std::string model = "mycelium";
  std::string case_text = "tension:in-plane";
  double alpha = 0.05;
  int epochs = 20000;
  std::uint64_t seed = 0;
  double threshold = 1e-3;
  double learning_rate = 1e-3;
  int restarts = 0;
  bool no_refine = false;
  int points = 21;
  double noise = 0.0;
  int replicates = 1;
  double loading = 0.0;
  bool permissive = false;
  bool svg = false;
  int max_terms = 2;
  int threads = 0;
  std::string predict_out;
  std::string report_model;
};

void cmd_synth(const Options& o) {
  auto model = resolve_model(o.model);
  fsym_dataset* raw = nullptr;
  check(fsym_dataset_synthesize(model.get(), o.points, o.noise, o.seed, o.replicates, &raw));
  DatasetPtr set(raw);

  make_dir(o.out);
  Run run("synth", o.out);
  run.config() = {{"model", o.model}, {"points", o.points}, {"noise", o.noise}, {"seed", o.seed},
                  {"replicates", o.replicates}};
  char* model_json = nullptr;
  check(fsym_model_to_json(model.get(), &model_json));
  const std::string mj = take(model_json);
  run.input("model", o.model, fnv(mj));

  char* csv = nullptr;
  check(fsym_dataset_to_csv(set.get(), &csv));
  run.write("data.csv", take(csv));
  run.write("ground_truth.json", mj);
  run.finish();
  std::cout << "wrote " << (run.dir() / "data.csv").string() << "\n";
}

void cmd_fit(const Options& o) {
  auto set = load_dataset(o.data, o.permissive);
  fsym_fit_config cfg;
  fsym_fit_config_default(&cfg);
  cfg.alpha = o.alpha;
  cfg.epochs = o.epochs;
  cfg.seed = o.seed;
  cfg.threshold = o.threshold;
  cfg.learning_rate = o.learning_rate;
  cfg.restarts = o.restarts;
  cfg.refine = o.no_refine ? 0 : 1;

  fsym_fit* raw = nullptr;
  check(fsym_fit_train(set.get(), &cfg, &raw));
  FitPtr fit(raw);
  fsym_model* m = nullptr;
  check(fsym_fit_model(fit.get(), &m));
  ModelPtr model(m);

  make_dir(o.out);
  Run run("fit", o.out);
  run.config() = {{"alpha", o.alpha},         {"epochs", o.epochs},         {"seed", o.seed},
                  {"threshold", o.threshold}, {"learning_rate", o.learning_rate}, {"restarts", o.restarts},
                  {"refine", !o.no_refine},   {"permissive", o.permissive}};
  run.input("data", o.data, dataset_fingerprint(set.get()));

  char* mj = nullptr;
  check(fsym_model_to_json(model.get(), &mj));
  run.write("model.json", take(mj));
  char* rj = nullptr;
  check(fsym_fit_report_json(fit.get(), &rj));
  run.write("fit_report.json", take(rj));
  run.finish();

  int terms[FSYM_TERM_COUNT];
  int count = 0;
  check(fsym_fit_active_terms(fit.get(), terms, &count));
  double r2 = 0.0;
  check(fsym_fit_mean_r2(fit.get(), &r2));
  std::cout << "active terms:";
  for (int i = 0; i < count; ++i) std::cout << " " << terms[i];
  std::cout << "\nmean R2: " << r2 << "\n";
}

void cmd_predict(const Options& o, bool loading_given) {
  auto model = resolve_model(o.model);
  fsym_mode mode;
  fsym_direction dir;
  check(fsym_parse_case(o.case_text.c_str(), &mode, &dir));
  double loading = o.loading;
  if (!loading_given) check(fsym_protocol_limit(mode, &loading));
  char* raw = nullptr;
  check(fsym_predict_csv(model.get(), mode, dir, loading, o.points, &raw));
  const std::string csv = take(raw);

  if (o.predict_out.empty()) {
    std::cout << csv;
    return;
  }
  make_dir(o.predict_out);
  Run run("predict", o.predict_out);
  run.config() = {{"model", o.model}, {"case", o.case_text}, {"loading", loading}, {"points", o.points}};
  char* mj = nullptr;
  check(fsym_model_to_json(model.get(), &mj));
  run.input("model", o.model, fnv(take(mj)));
  run.write("prediction.csv", csv);
  run.finish();
}

void cmd_stiffness(const Options& o) {
  auto set = load_dataset(o.data, o.permissive);
  char* raw = nullptr;
  check(fsym_stiffness_table_csv(set.get(), &raw));
  const std::string table = take(raw);

  make_dir(o.out);
  Run run("stiffness", o.out);
  run.config() = {{"permissive", o.permissive}};
  run.input("data", o.data, dataset_fingerprint(set.get()));
  run.write("stiffness_samples.csv", table);

  char* report = nullptr;
  const fsym_status s = fsym_anisotropy_report_csv(set.get(), &report);
  if (s == FSYM_OK) {
    const std::string csv = take(report);
    run.write("stiffness_report.csv", csv);
    std::cout << csv;
  } else if (std::string(fsym_last_error_class()) == "Degenerate") {
    std::cerr << "note: " << fsym_last_error_message() << "; Welch comparison skipped\n";
    std::cout << table;
  } else {
    check(s);
  }
  run.finish();
}

void cmd_subsets(const Options& o) {
  auto set = load_dataset(o.data, o.permissive);
  char* raw = nullptr;
  check(fsym_subsets_report_json(set.get(), o.max_terms, o.threads, &raw));
  make_dir(o.out);
  Run run("subsets", o.out);
  run.config() = {{"max_terms", o.max_terms}, {"permissive", o.permissive}};
  run.input("data", o.data, dataset_fingerprint(set.get()));
  run.write("subsets.json", take(raw));
  run.finish();
}

void cmd_report(const Options& o) {
  auto set = load_dataset(o.data, o.permissive);
  ModelPtr model;
  if (!o.report_model.empty()) model = resolve_model(o.report_model);

  make_dir(o.out);
  Run run("report", o.out);
  run.config() = {{"model", o.report_model}, {"svg", o.svg}, {"permissive", o.permissive}};
  run.input("data", o.data, dataset_fingerprint(set.get()));
  if (model) {
    char* mj = nullptr;
    check(fsym_model_to_json(model.get(), &mj));
    run.input("model", o.report_model, fnv(take(mj)));
  }
  char* files = nullptr;
  check(fsym_export_reports(set.get(), model.get(), o.out.c_str(), o.svg ? 1 : 0, &files));
  std::istringstream list(take(files));
  for (std::string name; std::getline(list, name);) {
    if (!name.empty()) run.record(name, read_file(fs::path(o.out) / name));
  }
  run.finish();
  std::cout << "wrote report to " << o.out << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse invariant-based discovery of material symmetry in soft fibrous materials"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(fsym_version()));

  Options o;
  auto add_data = [&](CLI::App* sub) {
    sub->add_option("--data", o.data, "data CSV file or directory of CSV files");
    sub->add_flag("--permissive", o.permissive, "accept loading beyond the protocol range");
  };
  auto add_out = [&](CLI::App* sub) { sub->add_option("--out", o.out, "output directory"); };

  auto* synth = app.add_subcommand("synth", "generate a synthetic six-experiment data set from a model");
  synth->add_option("--model", o.model, "built-in model name or model JSON path");
  add_out(synth);
  synth->add_option("--points", o.points, "samples per curve")->check(CLI::Range(2, 1000000));
  synth->add_option("--noise", o.noise, "relative sd of multiplicative Gaussian noise")->check(CLI::Range(0.0, 1.0));
  synth->add_option("--seed", o.seed, "noise seed");
  synth->add_option("--replicates", o.replicates, "noisy replicates per condition")->check(CLI::Range(1, 10000));

  auto* fit = app.add_subcommand("fit", "discover a sparse energy from data");
  add_data(fit);
  add_out(fit);
  fit->add_option("--alpha", o.alpha, "L1 penalty")->check(CLI::NonNegativeNumber);
  fit->add_option("--epochs", o.epochs, "Adam epochs")->check(CLI::Range(1, 100000000));
  fit->add_option("--seed", o.seed, "seed for restarts");
  fit->add_option("--threshold", o.threshold, "outer weights below this (kPa) are pruned")
      ->check(CLI::NonNegativeNumber);
  fit->add_option("--learning-rate", o.learning_rate, "Adam step size")->check(CLI::PositiveNumber);
  fit->add_option("--restarts", o.restarts, "extra random restarts")->check(CLI::Range(0, 1000));
  fit->add_flag("--no-refine", o.no_refine, "keep the raw L1 support");

  bool loading_given = false;
  auto* predict = app.add_subcommand("predict", "evaluate a model along one loading curve");
  predict->add_option("--model", o.model, "built-in model name or model JSON path");
  predict->add_option("--case", o.case_text, "<tension|compression|shear>:<in-plane|cross-plane>");
  predict->add_option("--points", o.points, "grid points including the reference state")
      ->check(CLI::Range(2, 1000000));
  predict->add_option("--loading", o.loading, "final stretch or shear strain (default: protocol limit)")
      ->each([&](const std::string&) { loading_given = true; });
  predict->add_option("--out", o.predict_out, "output directory (default: CSV to stdout)");

  auto* stiff = app.add_subcommand("stiffness", "small-strain stiffness and Welch anisotropy test");
  add_data(stiff);
  add_out(stiff);

  auto* subsets = app.add_subcommand("subsets", "brute-force best fits over term subsets");
  add_data(subsets);
  add_out(subsets);
  subsets->add_option("--max-terms", o.max_terms, "largest subset size")->check(CLI::Range(0, 12));
  subsets->add_option("--threads", o.threads, "worker threads (0: hardware concurrency)");

  auto* report = app.add_subcommand("report", "export data, term decompositions and stiffness tables");
  add_data(report);
  add_out(report);
  report->add_option("--model", o.report_model, "built-in model name or model JSON path");
  report->add_flag("--svg", o.svg, "also emit SVG line charts");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: Usage: " << e.what() << "\n";
    return FSYM_ERR_DOMAIN;
  }

  try {
    if (*synth) cmd_synth(o);
    else if (*fit) cmd_fit(o);
    else if (*predict) cmd_predict(o, loading_given);
    else if (*stiff) cmd_stiffness(o);
    else if (*subsets) cmd_subsets(o);
    else if (*report) cmd_report(o);
  } catch (const Failure& f) {
    std::cerr << "error: " << (f.cls.empty() ? "Error" : f.cls) << ": " << f.message << "\n";
    return static_cast<int>(f.status);
  } catch (const std::exception& e) {
    std::cerr << "error: IO: " << e.what() << "\n";
    return FSYM_ERR_IO;
  }
  return 0;
}
