#include "fibersym/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "fibersym/analysis.hpp"
#include "fibersym/error.hpp"
#include "json.hpp"

namespace fibersym {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

ordered_json condition_json(const Condition& c) {
  return {{"mode", std::string(to_string(c.mode))}, {"direction", std::string(to_string(c.dir))}};
}

ordered_json weights_json(const ModelWeights& w) {
  ordered_json arr = ordered_json::array();
  for (int k = 1; k <= kTermCount; ++k) {
    arr.push_back({{"k", k}, {"w_kPa", w.outer[k - 1]}, {"w_star", w.inner[k - 1]}});
  }
  return arr;
}

ordered_json coefficients_json(const ModelWeights& w, std::span<const int> terms) {
  ordered_json arr = ordered_json::array();
  for (int k : terms) {
    arr.push_back({{"k", k}, {"term", term_label(TermId{k})}, {"coefficient_kPa", w.coefficient(k)}});
  }
  return arr;
}

double display_r2(double r2) { return std::max(r2, 0.0); }

}  // namespace

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed: " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string model_to_json(const NamedModel& model, const std::string& meta_json) {
  ordered_json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["name"] = model.name;
  doc["weights"] = weights_json(model.weights);
  doc["meta"] = ordered_json::parse(meta_json);
  return doc.dump(2) + "\n";
}

NamedModel model_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("model JSON does not parse: ") + e.what());
  }
  try {
    if (doc.at("schema_version").get<int>() != kSchemaVersion) {
      throw ValidationError("unsupported model schema_version");
    }
    NamedModel model;
    model.name = doc.at("name").get<std::string>();
    std::array<bool, kTermCount> seen{};
    for (const auto& w : doc.at("weights")) {
      const int k = w.at("k").get<int>();
      if (k < 1 || k > kTermCount) throw ValidationError("model JSON: term index out of range");
      if (seen[k - 1]) throw ValidationError("model JSON: term " + std::to_string(k) + " listed twice");
      seen[k - 1] = true;
      model.weights.outer[k - 1] = w.at("w_kPa").get<double>();
      model.weights.inner[k - 1] = w.at("w_star").get<double>();
    }
    try {
      model.weights.validate();
    } catch (const DomainError& e) {
      throw ValidationError(std::string("model JSON: ") + e.what());
    }
    return model;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("model JSON is missing fields: ") + e.what());
  }
}

void save_model(const NamedModel& model, const std::filesystem::path& path, const std::string& meta_json) {
  write_text_file(path, model_to_json(model, meta_json));
}

NamedModel load_model(const std::filesystem::path& path) { return model_from_json(read_text_file(path)); }

NamedModel resolve_model(const std::string& name_or_path) {
  for (auto& m : reference_models()) {
    if (m.name == name_or_path) return m;
  }
  std::error_code ec;
  if (std::filesystem::is_regular_file(name_or_path, ec)) return load_model(name_or_path);
  throw DomainError("'" + name_or_path + "' is neither a built-in model nor a model file", "UnknownModel");
}

std::string fit_report_json(const DiscoveredModel& fit) {
  ordered_json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["model"] = fit.model.name;
  doc["data_fingerprint"] = fit.data_fingerprint;
  doc["config"] = {{"alpha", fit.config.alpha},
                   {"epochs", fit.config.epochs},
                   {"learning_rate", fit.config.learning_rate},
                   {"threshold_kPa", fit.config.threshold},
                   {"seed", fit.config.seed},
                   {"init_scale", fit.config.init_scale},
                   {"restarts", fit.config.restarts},
                   {"refine", fit.config.refine}};
  ordered_json trained = ordered_json::array();
  for (const auto& c : fit.trained_on) trained.push_back(condition_json(c));
  doc["trained_on"] = trained;
  doc["active_terms"] = fit.active_terms;
  doc["l1_active_terms"] = fit.l1_active_terms;
  doc["coefficients"] = coefficients_json(fit.model.weights, fit.active_terms);
  ordered_json r2 = ordered_json::array();
  for (const auto& f : fit.fits) {
    auto row = condition_json(f.condition);
    row["r2"] = f.r2;
    row["r2_display"] = display_r2(f.r2);
    r2.push_back(row);
  }
  doc["r2"] = r2;
  doc["r2_mean"] = fit.mean_r2;
  doc["final_loss"] = fit.final_loss;
  ordered_json trace = ordered_json::array();
  for (const auto& p : fit.loss_trace) trace.push_back({p.epoch, p.loss});
  doc["loss_trace"] = trace;
  return doc.dump(2) + "\n";
}

std::string evaluation_report_json(const NamedModel& model, const ExperimentSet& set) {
  ordered_json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["model"] = model.name;
  doc["data_fingerprint"] = fingerprint(set);
  const auto active = active_terms(model.weights, 0.0);
  doc["active_terms"] = active;
  doc["coefficients"] = coefficients_json(model.weights, active);
  ordered_json r2 = ordered_json::array();
  double sum = 0.0;
  int count = 0;
  for (const auto& e : set.mean_curves()) {
    auto row = condition_json(e.condition());
    const double value = r_squared(model.weights, e);
    row["r2"] = value;
    row["r2_display"] = display_r2(value);
    r2.push_back(row);
    sum += value;
    ++count;
  }
  doc["r2"] = r2;
  doc["r2_mean"] = count ? sum / count : 0.0;
  return doc.dump(2) + "\n";
}

std::string subsets_report_json(const std::vector<SubsetFit>& fits, std::span<const Experiment> experiments) {
  ordered_json doc;
  doc["schema_version"] = kSchemaVersion;
  ordered_json conditions = ordered_json::array();
  for (const auto& e : experiments) conditions.push_back(condition_json(e.condition()));
  doc["experiments"] = conditions;
  ordered_json ranked = ordered_json::array();
  int rank = 1;
  for (const auto& f : fits) {
    ranked.push_back({{"rank", rank++},
                      {"terms", f.terms},
                      {"mean_r2", f.mean_r2},
                      {"r2", f.r2},
                      {"rss", f.rss},
                      {"coefficients", coefficients_json(f.weights, f.terms)},
                      {"weights", weights_json(f.weights)}});
  }
  doc["subsets"] = ranked;
  return doc.dump(2) + "\n";
}

std::string curve_csv(const NamedModel& model, const LoadingCase& c, std::span<const double> grid) {
  std::string out = "loading,stress_kPa,mode,direction";
  for (int k = 1; k <= kTermCount; ++k) out += ",term_" + std::to_string(k);
  out += "\n";
  for (double x : grid) {
    out += format_double(x) + "," + format_double(stress(model.weights, c.mode, c.dir, x)) + "," +
           std::string(to_string(c.mode)) + "," + std::string(to_string(c.dir));
    for (double t : term_stress_contributions(model.weights, c.mode, c.dir, x)) out += "," + format_double(t);
    out += "\n";
  }
  return out;
}

std::string curves_svg(const ExperimentSet& set, const NamedModel* model, LoadingMode mode) {
  constexpr double W = 640, H = 420, left = 70, right = 20, top = 40, bottom = 60;
  struct Series {
    Direction dir;
    const char* color;
    std::vector<StressSample> data;
    std::vector<StressSample> line;
  };
  std::vector<Series> series;
  for (auto dir : {Direction::InPlane, Direction::CrossPlane}) {
    Series s{dir, dir == Direction::InPlane ? "#1f77b4" : "#ff7f0e", {}, {}};
    LoadingCase c = LoadingCase::protocol(mode, dir);
    if (auto it = set.means.find({mode, dir}); it != set.means.end()) {
      s.data = it->second.samples;
      c.loading = s.data.back().loading;
    }
    if (model) s.line = predict_curve(model->weights, c, 101);
    if (!s.data.empty() || !s.line.empty()) series.push_back(std::move(s));
  }

  double xmin = reference_loading(mode), xmax = xmin, ymin = 0.0, ymax = 0.0;
  for (const auto& s : series) {
    for (const auto* v : {&s.data, &s.line}) {
      for (const auto& p : *v) {
        xmin = std::min(xmin, p.loading);
        xmax = std::max(xmax, p.loading);
        ymin = std::min(ymin, p.stress);
        ymax = std::max(ymax, p.stress);
      }
    }
  }
  if (xmax == xmin) xmax = xmin + 1.0;
  if (ymax == ymin) ymax = ymin + 1.0;
  auto sx = [&](double x) { return left + (x - xmin) / (xmax - xmin) * (W - left - right); };
  auto sy = [&](double y) { return H - bottom - (y - ymin) / (ymax - ymin) * (H - top - bottom); };

  std::ostringstream o;
  o.precision(6);
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
    << " " << H << "\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">"
    << set.material << " " << to_string(mode) << "</text>\n";
  o << "<line x1=\"" << left << "\" y1=\"" << sy(0.0) << "\" x2=\"" << W - right << "\" y2=\"" << sy(0.0)
    << "\" stroke=\"black\"/>\n";
  o << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << H - bottom
    << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double x = xmin + (xmax - xmin) * i / 4.0;
    const double y = ymin + (ymax - ymin) * i / 4.0;
    o << "<text x=\"" << sx(x) << "\" y=\"" << H - bottom + 18 << "\" text-anchor=\"middle\" font-family=\"sans-serif\""
      << " font-size=\"11\">" << x << "</text>\n";
    o << "<text x=\"" << left - 6 << "\" y=\"" << sy(y) + 4 << "\" text-anchor=\"end\" font-family=\"sans-serif\""
      << " font-size=\"11\">" << y << "</text>\n";
  }
  o << "<text x=\"" << W / 2 << "\" y=\"" << H - 16 << "\" text-anchor=\"middle\" font-family=\"sans-serif\""
    << " font-size=\"13\">" << (mode == LoadingMode::Shear ? "shear strain" : "stretch") << "</text>\n";
  o << "<text x=\"18\" y=\"" << H / 2 << "\" transform=\"rotate(-90 18 " << H / 2
    << ")\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">stress [kPa]</text>\n";

  double legend_y = top + 10;
  for (const auto& s : series) {
    if (!s.line.empty()) {
      o << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"2\" points=\"";
      for (const auto& p : s.line) o << sx(p.loading) << "," << sy(p.stress) << " ";
      o << "\"/>\n";
    }
    for (const auto& p : s.data) {
      o << "<circle cx=\"" << sx(p.loading) << "\" cy=\"" << sy(p.stress) << "\" r=\"3\" fill=\"" << s.color
        << "\" fill-opacity=\"0.6\"/>\n";
    }
    o << "<rect x=\"" << left + 12 << "\" y=\"" << legend_y - 9 << "\" width=\"10\" height=\"10\" fill=\"" << s.color
      << "\"/>\n";
    o << "<text x=\"" << left + 28 << "\" y=\"" << legend_y << "\" font-family=\"sans-serif\" font-size=\"12\">"
      << to_string(s.dir) << "</text>\n";
    legend_y += 16;
  }
  o << "</svg>\n";
  return o.str();
}

std::vector<std::string> export_reports(const ExperimentSet& set, const NamedModel* model,
                                        const std::filesystem::path& out_dir, const ExportOptions& opts) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec || !std::filesystem::is_directory(out_dir)) throw IoError("cannot create directory " + out_dir.string());

  std::vector<std::string> written;
  auto emit = [&](const std::string& name, const std::string& text) {
    write_text_file(out_dir / name, text);
    written.push_back(name);
  };

  emit("data.csv", to_csv(set));
  if (model) {
    emit("model.json", model_to_json(*model));
    emit("fit_report.json", evaluation_report_json(*model, set));
    for (const auto& [cond, e] : set.means) {
      std::vector<double> grid;
      for (const auto& s : e.samples) grid.push_back(s.loading);
      const LoadingCase c{cond.mode, cond.dir, grid.back()};
      emit("decomposition_" + std::string(to_string(cond.mode)) + "_" + std::string(to_string(cond.dir)) + ".csv",
           curve_csv(*model, c, grid));
    }
  }
  const auto in_plane = stiffness_summaries(set, Direction::InPlane);
  const auto cross_plane = stiffness_summaries(set, Direction::CrossPlane);
  if (in_plane.size() >= 2 && cross_plane.size() >= 2) {
    emit("stiffness_report.csv", to_csv(anisotropy_report(in_plane, cross_plane)));
  }
  if (opts.svg) {
    for (auto mode : {LoadingMode::Tension, LoadingMode::Compression, LoadingMode::Shear}) {
      emit("curves_" + std::string(to_string(mode)) + ".svg", curves_svg(set, model, mode));
    }
  }
  return written;
}

}  // namespace fibersym
