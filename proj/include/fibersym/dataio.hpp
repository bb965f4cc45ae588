#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "fibersym/energy.hpp"
#include "fibersym/stress.hpp"

namespace fibersym {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kDataHeader = "material,mode,direction,replicate,loading,stress_kPa";
/// Replicate id that marks the mean curve of a condition.
inline constexpr const char* kMeanReplicate = "mean";

struct Condition {
  LoadingMode mode = LoadingMode::Tension;
  Direction dir = Direction::InPlane;

  auto operator<=>(const Condition&) const = default;
};

std::string condition_label(const Condition& c);  // e.g. "tension:in-plane"

/// One loading curve. `samples` hold (lambda or gamma, stress in kPa) in
/// loading order starting at the reference state.
struct Experiment {
  LoadingMode mode = LoadingMode::Tension;
  Direction dir = Direction::InPlane;
  std::string replicate = kMeanReplicate;
  std::string material;
  std::vector<StressSample> samples;

  Condition condition() const { return {mode, dir}; }
  bool operator==(const Experiment&) const = default;
};

/// Mean curves (at most one per condition) plus optional replicate lists.
struct ExperimentSet {
  std::string material;
  std::map<Condition, Experiment> means;
  std::map<Condition, std::vector<Experiment>> replicates;

  std::vector<Experiment> mean_curves() const;
  std::size_t sample_count() const;
  bool operator==(const ExperimentSet&) const = default;
};

struct ValidationOptions {
  /// Accept any positive stretch and any non-negative shear strain.
  bool permissive = false;
  /// Allowed |stress| at the reference point, kPa.
  double reference_tolerance = 1e-3;
};

/// Checks the invariants of one curve (monotone loading from the reference
/// state, protocol bounds, finite stresses). Throws ValidationError.
void validate_experiment(const Experiment& e, const ValidationOptions& opts = {});

ExperimentSet parse_csv(const std::string& text, const ValidationOptions& opts = {},
                        const std::string& source = "<memory>");
ExperimentSet load_csv(const std::filesystem::path& path, const ValidationOptions& opts = {});
/// A file, or a directory whose *.csv files carrying the data header are
/// merged (in lexicographic path order). Throws IoError "NoData" when none.
ExperimentSet load_data(const std::filesystem::path& path, const ValidationOptions& opts = {});
/// Data CSVs found under `path` (a single file is returned as is).
std::vector<std::filesystem::path> find_data_files(const std::filesystem::path& path);

/// Canonical CSV: mean rows then replicate rows per condition, shortest
/// round-trip number formatting.
std::string to_csv(const ExperimentSet& set);
void save_csv(const ExperimentSet& set, const std::filesystem::path& path);

/// FNV-1a 64 of the canonical CSV, as 16 hex digits.
std::string fingerprint(const ExperimentSet& set);
std::string fnv1a_hex(const std::string& bytes);

struct NoiseSpec {
  double amplitude = 0.0;  // relative standard deviation of multiplicative noise
  std::uint64_t seed = 0;
};

/// Virtual laboratory: evaluates the model on uniform grids and applies
/// multiplicative Gaussian noise. With `replicates > 1` every replicate gets
/// its own noise draw and the mean curve is their pointwise average.
ExperimentSet synthesize(const NamedModel& model, const std::vector<LoadingCase>& protocol, int n_points,
                         const NoiseSpec& noise, int replicates = 1);

/// Shortest round-trip decimal representation.
std::string format_double(double v);
/// Strict full-string parse of a finite number; false on failure.
bool parse_double(std::string_view text, double& out);

}  // namespace fibersym
