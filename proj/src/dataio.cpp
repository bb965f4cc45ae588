#include "fibersym/dataio.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <tuple>

#include "fibersym/error.hpp"

namespace fibersym {

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

std::string_view trim_cr(std::string_view s) {
  if (!s.empty() && s.back() == '\r') s.remove_suffix(1);
  return s;
}

std::string describe(const Experiment& e) {
  return condition_label(e.condition()) + " replicate " + e.replicate;
}

struct RowRef {
  std::string source;
  std::size_t line;
};

std::string at(const RowRef& r) { return r.source + ":" + std::to_string(r.line); }

}  // namespace

std::string condition_label(const Condition& c) {
  return std::string(to_string(c.mode)) + ":" + std::string(to_string(c.dir));
}

std::vector<Experiment> ExperimentSet::mean_curves() const {
  std::vector<Experiment> out;
  for (const auto& [cond, e] : means) out.push_back(e);
  return out;
}

std::size_t ExperimentSet::sample_count() const {
  std::size_t n = 0;
  for (const auto& [cond, e] : means) n += e.samples.size();
  return n;
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

bool parse_double(std::string_view text, double& out) {
  if (text.empty()) return false;
  if (text.front() == '+') text.remove_prefix(1);
  auto res = std::from_chars(text.data(), text.data() + text.size(), out);
  return res.ec == std::errc() && res.ptr == text.data() + text.size() && std::isfinite(out);
}

void validate_experiment(const Experiment& e, const ValidationOptions& opts) {
  const auto& s = e.samples;
  if (s.size() < 2) throw ValidationError(describe(e) + ": a curve needs at least 2 samples");
  const double ref = reference_loading(e.mode);
  if (std::abs(s.front().loading - ref) > 1e-9) {
    throw ValidationError(describe(e) + ": first sample must be the reference state (" + format_double(ref) + ")");
  }
  if (std::abs(s.front().stress) > opts.reference_tolerance) {
    throw ValidationError(describe(e) + ": stress at the reference state exceeds tolerance");
  }
  const bool decreasing = e.mode == LoadingMode::Compression;
  for (std::size_t i = 1; i < s.size(); ++i) {
    const bool ok = decreasing ? s[i].loading < s[i - 1].loading : s[i].loading > s[i - 1].loading;
    if (!ok) throw ValidationError(describe(e) + ": loading is not strictly monotone at sample " + std::to_string(i));
  }
  for (const auto& p : s) {
    if (!std::isfinite(p.stress) || !std::isfinite(p.loading)) throw ValidationError(describe(e) + ": non-finite value");
  }
}

ExperimentSet parse_csv(const std::string& text, const ValidationOptions& opts, const std::string& source) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;

  if (!std::getline(in, line)) throw ValidationError(source + ": empty file, missing header");
  ++line_no;
  if (trim_cr(line) != kDataHeader) {
    throw ValidationError(source + ":1: malformed header, expected '" + std::string(kDataHeader) + "'", "MalformedHeader");
  }

  ExperimentSet set;
  std::map<std::tuple<Condition, std::string>, Experiment> curves;
  std::set<std::tuple<Condition, std::string, double>> seen;

  while (std::getline(in, line)) {
    ++line_no;
    const auto row = trim_cr(line);
    if (row.empty()) continue;
    const RowRef ref{source, line_no};
    const auto f = split_fields(row);
    if (f.size() != 6) {
      throw ValidationError(at(ref) + ": expected 6 fields, got " + std::to_string(f.size()));
    }
    Condition cond;
    try {
      cond.mode = parse_mode(f[1]);
      cond.dir = parse_direction(f[2]);
    } catch (const DomainError& err) {
      throw ValidationError(at(ref) + ": " + err.what());
    }
    const std::string material(f[0]);
    const std::string replicate(f[3]);
    if (replicate.empty()) throw ValidationError(at(ref) + ": empty replicate id");
    double loading = 0.0;
    double stress_kpa = 0.0;
    if (!parse_double(f[4], loading)) throw ValidationError(at(ref) + ": non-numeric loading '" + std::string(f[4]) + "'");
    if (!parse_double(f[5], stress_kpa)) {
      throw ValidationError(at(ref) + ": non-numeric stress '" + std::string(f[5]) + "'");
    }

    constexpr double eps = 1e-12;
    bool in_range = true;
    switch (cond.mode) {
      case LoadingMode::Tension:
        in_range = opts.permissive ? loading > 0.0 : (loading >= 1.0 - eps && loading <= kTensionLimit + eps);
        break;
      case LoadingMode::Compression:
        in_range = opts.permissive ? loading > 0.0 : (loading >= kCompressionLimit - eps && loading <= 1.0 + eps);
        break;
      case LoadingMode::Shear:
        in_range = opts.permissive ? loading >= 0.0 : (loading >= -eps && loading <= kShearLimit + eps);
        break;
    }
    if (!in_range) {
      throw ValidationError(at(ref) + ": loading " + std::string(f[4]) + " outside the " +
                                std::string(to_string(cond.mode)) + " protocol range",
                            "OutOfRange");
    }

    if (!seen.insert({cond, replicate, loading}).second) {
      throw ValidationError(at(ref) + ": duplicate sample for " + condition_label(cond) + " replicate " + replicate +
                                " at loading " + std::string(f[4]),
                            "DuplicateKey");
    }
    if (set.material.empty()) {
      set.material = material;
    } else if (material != set.material) {
      throw ValidationError(at(ref) + ": mixed materials '" + set.material + "' and '" + material + "'");
    }

    auto& curve = curves[{cond, replicate}];
    curve.mode = cond.mode;
    curve.dir = cond.dir;
    curve.replicate = replicate;
    curve.material = material;
    curve.samples.push_back({loading, stress_kpa});
  }

  if (curves.empty()) throw ValidationError(source + ": no samples", "NoSamples");

  for (auto& [key, curve] : curves) {
    validate_experiment(curve, opts);
    const auto& [cond, replicate] = key;
    if (replicate == kMeanReplicate) {
      set.means[cond] = curve;
    } else {
      set.replicates[cond].push_back(curve);
    }
  }

  // Conditions with replicates only: derive the mean curve.
  for (auto& [cond, reps] : set.replicates) {
    std::sort(reps.begin(), reps.end(), [](const Experiment& a, const Experiment& b) {
      // numeric ids sort numerically
      if (a.replicate.size() != b.replicate.size()) return a.replicate.size() < b.replicate.size();
      return a.replicate < b.replicate;
    });
    if (set.means.count(cond)) continue;
    if (reps.size() == 1) {
      Experiment mean = reps.front();
      mean.replicate = kMeanReplicate;
      set.means[cond] = std::move(mean);
      continue;
    }
    Experiment mean = reps.front();
    mean.replicate = kMeanReplicate;
    for (std::size_t i = 0; i < mean.samples.size(); ++i) {
      double sum = 0.0;
      for (const auto& r : reps) {
        if (r.samples.size() != mean.samples.size() || r.samples[i].loading != mean.samples[i].loading) {
          throw ValidationError(source + ": replicates of " + condition_label(cond) +
                                " use different loading grids; add '" + kMeanReplicate + "' rows");
        }
        sum += r.samples[i].stress;
      }
      mean.samples[i].stress = sum / static_cast<double>(reps.size());
    }
    set.means[cond] = std::move(mean);
  }
  return set;
}

ExperimentSet load_csv(const std::filesystem::path& path, const ValidationOptions& opts) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str(), opts, path.string());
}

std::vector<std::filesystem::path> find_data_files(const std::filesystem::path& path) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::exists(path, ec)) throw IoError("no such file or directory: " + path.string(), "NoData");
  if (!fs::is_directory(path, ec)) return {path};

  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(path, ec)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".csv") continue;
    std::ifstream in(entry.path());
    std::string first;
    std::getline(in, first);
    if (trim_cr(first) == kDataHeader) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

ExperimentSet load_data(const std::filesystem::path& path, const ValidationOptions& opts) {
  const auto files = find_data_files(path);
  if (files.empty()) throw IoError("no data files found in " + path.string(), "NoData");
  if (files.size() == 1) return load_csv(files.front(), opts);

  // Merge by concatenating data rows so duplicate keys across files are caught.
  std::string merged = std::string(kDataHeader) + "\n";
  for (const auto& f : files) {
    std::ifstream in(f, std::ios::binary);
    if (!in) throw IoError("cannot open " + f.string());
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) merged += line + "\n";
  }
  return parse_csv(merged, opts, path.string());
}

std::string to_csv(const ExperimentSet& set) {
  std::string out = std::string(kDataHeader) + "\n";
  auto emit = [&](const Experiment& e) {
    for (const auto& s : e.samples) {
      out += set.material;
      out += ',';
      out += to_string(e.mode);
      out += ',';
      out += to_string(e.dir);
      out += ',';
      out += e.replicate;
      out += ',';
      out += format_double(s.loading);
      out += ',';
      out += format_double(s.stress);
      out += '\n';
    }
  };
  for (const auto& [cond, mean] : set.means) {
    emit(mean);
    if (auto it = set.replicates.find(cond); it != set.replicates.end()) {
      for (const auto& r : it->second) emit(r);
    }
  }
  return out;
}

void save_csv(const ExperimentSet& set, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << to_csv(set);
  if (!out) throw IoError("write failed: " + path.string());
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string fingerprint(const ExperimentSet& set) { return fnv1a_hex(to_csv(set)); }

ExperimentSet synthesize(const NamedModel& model, const std::vector<LoadingCase>& protocol, int n_points,
                         const NoiseSpec& noise, int replicates) {
  model.weights.validate();
  if (protocol.empty()) throw DomainError("protocol has no loading cases");
  if (!(noise.amplitude >= 0.0) || !std::isfinite(noise.amplitude)) {
    throw DomainError("noise amplitude must be finite and non-negative");
  }
  if (replicates < 1) throw DomainError("need at least one replicate");

  std::mt19937_64 rng(noise.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  ExperimentSet set;
  set.material = model.name;
  for (const auto& c : protocol) {
    const Condition cond{c.mode, c.dir};
    if (set.means.count(cond)) throw DomainError("protocol lists " + condition_label(cond) + " twice");
    const auto clean = predict_curve(model.weights, c, n_points);

    std::vector<Experiment> reps;
    for (int r = 0; r < replicates; ++r) {
      Experiment e{c.mode, c.dir, std::to_string(r + 1), model.name, clean};
      if (noise.amplitude > 0.0) {
        for (auto& s : e.samples) s.stress *= 1.0 + noise.amplitude * gauss(rng);
      }
      reps.push_back(std::move(e));
    }

    Experiment mean{c.mode, c.dir, kMeanReplicate, model.name, clean};
    if (noise.amplitude > 0.0) {
      for (std::size_t i = 0; i < mean.samples.size(); ++i) {
        double sum = 0.0;
        for (const auto& r : reps) sum += r.samples[i].stress;
        mean.samples[i].stress = sum / replicates;
      }
    }
    set.means[cond] = std::move(mean);
    if (replicates > 1) set.replicates[cond] = std::move(reps);
  }
  return set;
}

}  // namespace fibersym
