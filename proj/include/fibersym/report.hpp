#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "fibersym/dataio.hpp"
#include "fibersym/discovery.hpp"

namespace fibersym {

// Model JSON:
//   {"schema_version": 1, "name": ..., "weights": [{"k": 1, "w_kPa": ..., "w_star": ...}, ...], "meta": {...}}
std::string model_to_json(const NamedModel& model, const std::string& meta_json = "{}");
NamedModel model_from_json(const std::string& text);
void save_model(const NamedModel& model, const std::filesystem::path& path, const std::string& meta_json = "{}");
NamedModel load_model(const std::filesystem::path& path);
/// Built-in name or path to a model JSON file.
NamedModel resolve_model(const std::string& name_or_path);

/// Fit report JSON: per-experiment R^2, active terms, configuration and the
/// downsampled loss trace.
std::string fit_report_json(const DiscoveredModel& fit);
/// Evaluation-only report for a given model (no training fields).
std::string evaluation_report_json(const NamedModel& model, const ExperimentSet& set);

std::string subsets_report_json(const std::vector<SubsetFit>& fits, std::span<const Experiment> experiments);

/// CSV `loading,stress_kPa,mode,direction,term_1..term_12`; the term columns
/// decompose stress_kPa additively.
std::string curve_csv(const NamedModel& model, const LoadingCase& c, std::span<const double> grid);

/// Static SVG line chart of one loading mode: data markers and model lines
/// for both directions.
std::string curves_svg(const ExperimentSet& set, const NamedModel* model, LoadingMode mode);

struct ExportOptions {
  bool svg = false;
};

/// Writes into out_dir:
///   data.csv                                   always
///   model.json, fit_report.json,
///   decomposition_<mode>_<direction>.csv       with a model
///   stiffness_report.csv                       when >= 2 samples per direction
///   curves_<mode>.svg                          with ExportOptions::svg
/// Returns the written file names in that order.
std::vector<std::string> export_reports(const ExperimentSet& set, const NamedModel* model,
                                        const std::filesystem::path& out_dir, const ExportOptions& opts = {});

void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace fibersym
