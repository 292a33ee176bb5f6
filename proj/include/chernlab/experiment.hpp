#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "chernlab/chern.hpp"
#include "chernlab/estimates.hpp"
#include "chernlab/io.hpp"
#include "chernlab/model.hpp"
#include "chernlab/spectral.hpp"
#include "chernlab/types.hpp"
#include "chernlab/wannier.hpp"

namespace chernlab {

inline constexpr const char* kToolVersion = "chernlab 0.1.0";
inline constexpr int kExitOk = 0;
inline constexpr int kExitNumerical = 1;
inline constexpr int kExitInvalid = 2;

/// Invalid user input (config syntax, unknown keys, out-of-range windows).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct EstimateToggles {
  bool near_bd = true;
  bool far_bd = true;
  bool approx = true;
  bool pl_chern = true;
  bool p_x_pl = true;
  bool decay_trick = true;
};

/// One experiment: a model, a Fermi level, the localization exponent delta,
/// the marker/estimate windows, and output plumbing.
struct ExperimentConfig {
  int half_width = 8;  // N, serialized inside the model object
  ModelSpec model;
  double fermi_level = 0.0;
  double delta = 0.5;
  std::vector<int> window_values = {2, 3, 4};  // L_values
  EstimateToggles estimates;
  std::string output_dir = "out";
  double cluster_tol = 0.25;

  void validate() const {
    if (half_width < 2) throw ConfigError("config: N must be >= 2");
    if (delta <= 0.0) throw ConfigError("config: delta must be > 0");
    if (cluster_tol <= 0.0) throw ConfigError("config: cluster_tol must be > 0");
    if (window_values.empty()) throw ConfigError("config: L_values must be nonempty");
    for (int window : window_values) {
      if (window < 1 || 2 * window > half_width) {
        throw ConfigError("config: L_values entry " + std::to_string(window) +
                          " violates 1 <= L <= N/2");
      }
    }
    try {
      model.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("config: ") + e.what());
    }
    if (model.kind == ModelKind::atomic_limit &&
        model.disorder_strength > model.atomic_gap / 2.0) {
      throw ConfigError("config: atomic model requires W <= g/2");
    }
  }
};

namespace detail {

inline std::string kind_name(ModelKind kind) {
  return kind == ModelKind::two_band_chern ? "two_band_chern" : "atomic_limit";
}
inline std::string boundary_name(Boundary boundary) {
  return boundary == Boundary::open ? "open" : "periodic";
}

inline void require_keys(const nlohmann::json& object,
                         const std::set<std::string>& allowed,
                         const std::set<std::string>& required,
                         const std::string& where) {
  for (const auto& [key, value] : object.items()) {
    if (!allowed.count(key)) {
      throw ConfigError("config: unknown key \"" + key + "\" in " + where);
    }
  }
  for (const auto& key : required) {
    if (!object.contains(key)) {
      throw ConfigError("config: missing key \"" + key + "\" in " + where);
    }
  }
}

}  // namespace detail

inline nlohmann::ordered_json model_to_json(const ModelSpec& model, int half_width) {
  nlohmann::ordered_json j;
  j["kind"] = detail::kind_name(model.kind);
  j["N"] = half_width;
  j["u"] = model.mass_u;
  j["W"] = model.disorder_strength;
  j["seed"] = model.seed;
  j["boundary"] = detail::boundary_name(model.boundary);
  j["g"] = model.atomic_gap;
  return j;
}

inline std::pair<ModelSpec, int> model_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config: model must be a JSON object");
  detail::require_keys(j, {"kind", "N", "u", "W", "seed", "boundary", "g"},
                       {"kind", "N", "u", "W", "seed", "boundary", "g"}, "model");
  ModelSpec model;
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "two_band_chern") {
    model.kind = ModelKind::two_band_chern;
  } else if (kind == "atomic_limit") {
    model.kind = ModelKind::atomic_limit;
  } else {
    throw ConfigError("config: unknown model kind \"" + kind + "\"");
  }
  const std::string boundary = j.at("boundary").get<std::string>();
  if (boundary == "open") {
    model.boundary = Boundary::open;
  } else if (boundary == "periodic") {
    model.boundary = Boundary::periodic;
  } else {
    throw ConfigError("config: unknown boundary \"" + boundary + "\"");
  }
  model.mass_u = j.at("u").get<double>();
  model.disorder_strength = j.at("W").get<double>();
  model.seed = j.at("seed").get<std::uint64_t>();
  model.atomic_gap = j.at("g").get<double>();
  return {model, j.at("N").get<int>()};
}

inline nlohmann::ordered_json config_to_json(const ExperimentConfig& config) {
  nlohmann::ordered_json j;
  j["model"] = model_to_json(config.model, config.half_width);
  j["fermi_level"] = config.fermi_level;
  j["delta"] = config.delta;
  j["L_values"] = config.window_values;
  nlohmann::ordered_json toggles;
  toggles["near_bd"] = config.estimates.near_bd;
  toggles["far_bd"] = config.estimates.far_bd;
  toggles["approx"] = config.estimates.approx;
  toggles["pl_chern"] = config.estimates.pl_chern;
  toggles["p_x_pl"] = config.estimates.p_x_pl;
  toggles["decay_trick"] = config.estimates.decay_trick;
  j["estimates"] = toggles;
  j["output_dir"] = config.output_dir;
  j["cluster_tol"] = config.cluster_tol;
  return j;
}

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config: top level must be a JSON object");
  detail::require_keys(j,
                       {"model", "fermi_level", "delta", "L_values", "estimates",
                        "output_dir", "cluster_tol"},
                       {"model"}, "config");
  ExperimentConfig config;
  std::tie(config.model, config.half_width) = model_from_json(j.at("model"));
  if (j.contains("fermi_level")) config.fermi_level = j.at("fermi_level").get<double>();
  if (j.contains("delta")) config.delta = j.at("delta").get<double>();
  if (j.contains("L_values")) {
    config.window_values = j.at("L_values").get<std::vector<int>>();
  }
  if (j.contains("estimates")) {
    const auto& toggles = j.at("estimates");
    detail::require_keys(
        toggles, {"near_bd", "far_bd", "approx", "pl_chern", "p_x_pl", "decay_trick"},
        {}, "estimates");
    auto read = [&toggles](const char* key, bool fallback) {
      return toggles.contains(key) ? toggles.at(key).get<bool>() : fallback;
    };
    config.estimates.near_bd = read("near_bd", true);
    config.estimates.far_bd = read("far_bd", true);
    config.estimates.approx = read("approx", true);
    config.estimates.pl_chern = read("pl_chern", true);
    config.estimates.p_x_pl = read("p_x_pl", true);
    config.estimates.decay_trick = read("decay_trick", true);
  }
  if (j.contains("output_dir")) config.output_dir = j.at("output_dir").get<std::string>();
  if (j.contains("cluster_tol")) config.cluster_tol = j.at("cluster_tol").get<double>();
  return config;
}

inline std::string config_hash(const ExperimentConfig& config) {
  return fnv1a_hex(config_to_json(config).dump());
}

inline std::string model_hash(const ModelSpec& model, int half_width) {
  return fnv1a_hex(model_to_json(model, half_width).dump());
}

/// Run record written last: config fingerprint, artifact list, and the
/// pass/fail flags that mirror the acceptance checks relevant to the command.
struct RunManifest {
  std::string config_hash;
  std::string tool_version = kToolVersion;
  std::string started_at;
  std::string finished_at;
  std::vector<std::string> outputs;
  std::vector<std::pair<std::string, bool>> checks;

  bool all_passed() const {
    return std::all_of(checks.begin(), checks.end(),
                       [](const auto& c) { return c.second; });
  }
};

namespace detail {

inline std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(
      std::chrono::system_clock::now());
  std::tm tm_utc{};
  gmtime_r(&now, &tm_utc);
  char buffer[32];
  std::strftime(buffer, sizeof buffer, "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buffer;
}

/// Collects artifacts in an output directory and finalizes the manifest.
class RunWriter {
 public:
  RunWriter(const ExperimentConfig& config, const std::string& out_dir)
      : dir_(out_dir) {
    manifest_.config_hash = config_hash(config);
    manifest_.started_at = utc_timestamp();
    std::filesystem::create_directories(dir_);
  }

  void write(const std::string& name, const std::string& content) {
    write_text_file(dir_ / name, content);
    manifest_.outputs.push_back(name);
  }

  void check(const std::string& name, bool passed) {
    manifest_.checks.emplace_back(name, passed);
  }

  /// Writes manifest.json and returns the process exit code.
  int finish() {
    manifest_.finished_at = utc_timestamp();
    nlohmann::ordered_json j;
    j["config_hash"] = manifest_.config_hash;
    j["tool_version"] = manifest_.tool_version;
    j["started_at"] = manifest_.started_at;
    j["finished_at"] = manifest_.finished_at;
    j["outputs"] = manifest_.outputs;
    nlohmann::ordered_json checks;
    for (const auto& [name, passed] : manifest_.checks) checks[name] = passed;
    j["checks"] = checks;
    const bool ok = manifest_.all_passed() && outputs_nonempty();
    j["ok"] = ok;
    write_text_file(dir_ / "manifest.json", j.dump(2) + "\n");
    return ok ? kExitOk : kExitNumerical;
  }

  const RunManifest& manifest() const { return manifest_; }

 private:
  bool outputs_nonempty() const {
    for (const auto& name : manifest_.outputs) {
      std::error_code ec;
      if (std::filesystem::file_size(dir_ / name, ec) == 0 || ec) return false;
    }
    return true;
  }

  std::filesystem::path dir_;
  RunManifest manifest_;
};

struct BuiltModel {
  LatticeIndexing idx;
  EighResult spectrum;
  Projector projector;
  DiagonalOperator x;
  DiagonalOperator y;
};

inline BuiltModel build_and_project(const ExperimentConfig& config, int half_width) {
  LatticeIndexing idx(half_width, 2);
  EighResult spectrum = eigh(build_model(idx, config.model));
  Projector projector = fermi_projector(spectrum, config.fermi_level);
  PositionOperators pos = position_operators(idx);
  return BuiltModel{idx, std::move(spectrum), std::move(projector), std::move(pos.x),
                    std::move(pos.y)};
}

inline std::string marker_csv_row(const std::string& hash, int half_width,
                                  const MarkerResult& marker) {
  std::ostringstream row;
  row << hash << ',' << half_width << ',' << marker.window << ','
      << (marker.form == MarkerForm::chi_window ? "chi_window" : "pl_window") << ','
      << format_double(marker.value) << ',' << format_double(marker.imaginary_residual)
      << '\n';
  return row.str();
}

inline std::string series_csv(const ScalingSeries& series) {
  std::ostringstream csv;
  csv << "series_name,param,value\n";
  for (const auto& [param, value] : series.points) {
    csv << series.name << ',' << param << ',' << format_double(value) << '\n';
  }
  return csv.str();
}

inline nlohmann::ordered_json series_summary(const ScalingSeries& series) {
  nlohmann::ordered_json j;
  j["name"] = series.name;
  if (series.status == SeriesStatus::ok) {
    j["exponent"] = series.exponent;
    j["r2"] = series.r2;
    j["status"] = "ok";
  } else {
    j["exponent"] = nullptr;
    j["r2"] = nullptr;
    j["status"] = "numerically_zero";
  }
  j["witness_C"] = series.witness;
  return j;
}

inline bool strictly_decreasing(const ScalingSeries& series) {
  for (std::size_t i = 1; i < series.points.size(); ++i) {
    if (series.points[i].second >= series.points[i - 1].second) return false;
  }
  return true;
}

inline bool non_increasing(const ScalingSeries& series) {
  for (std::size_t i = 1; i < series.points.size(); ++i) {
    if (series.points[i].second > series.points[i - 1].second + 1e-15) return false;
  }
  return true;
}

}  // namespace detail

inline nlohmann::ordered_json decay_fit_to_json(const DecayFit& fit) {
  nlohmann::ordered_json j;
  if (fit.degenerate) {
    j["gamma"] = nullptr;
    j["prefactor"] = nullptr;
  } else {
    j["gamma"] = fit.gamma;
    j["prefactor"] = fit.prefactor;
  }
  nlohmann::ordered_json samples = nlohmann::ordered_json::array();
  for (const auto& [r, value] : fit.samples) {
    samples.push_back({r, value});
  }
  j["samples"] = samples;
  j["degenerate"] = fit.degenerate;
  return j;
}

/// `lab spectrum`: eigenvalues CSV, spectrum summary, projector kernel decay.
inline int run_spectrum(const ExperimentConfig& config, const std::string& out_dir) {
  config.validate();
  detail::RunWriter writer(config, out_dir);
  const auto built = detail::build_and_project(config, config.half_width);

  std::ostringstream eigenvalues;
  eigenvalues << "index,eigenvalue\n";
  for (Eigen::Index k = 0; k < built.spectrum.eigenvalues.size(); ++k) {
    eigenvalues << k << ',' << format_double(built.spectrum.eigenvalues[k]) << '\n';
  }
  writer.write("eigenvalues.csv", eigenvalues.str());

  double min_distance = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < built.spectrum.eigenvalues.size(); ++k) {
    min_distance = std::min(min_distance,
                            std::abs(built.spectrum.eigenvalues[k] - config.fermi_level));
  }
  nlohmann::ordered_json summary;
  summary["dim"] = built.idx.total_dim();
  summary["rank_below_fermi"] = built.projector.rank();
  summary["min_distance_to_fermi"] = min_distance;
  summary["bulk_gap"] = bulk_gap(built.spectrum, built.idx, config.fermi_level);
  writer.write("spectrum_summary.json", summary.dump(2) + "\n");

  const DecayFit fit = kernel_decay_fit(built.projector, built.idx);
  writer.write("decay_fit.json", decay_fit_to_json(fit).dump(2) + "\n");

  const Matrix idempotency =
      built.projector.mat() * built.projector.mat() - built.projector.mat();
  writer.check("projector_algebra",
               idempotency.norm() <= 1e-10 &&
                   hermiticity_residual(built.projector.mat()) <= 1e-12 &&
                   std::abs(built.projector.mat().trace().real() -
                            double(built.projector.rank())) <= 1e-8);
  return writer.finish();
}

/// `lab marker-sweep`: both marker forms at every configured window, plus the
/// k-space oracle for clean two-band models.
inline int run_marker_sweep(const ExperimentConfig& config, const std::string& out_dir) {
  config.validate();
  detail::RunWriter writer(config, out_dir);
  const auto built = detail::build_and_project(config, config.half_width);
  const WannierBasis basis = relabel_to_lattice(
      build_gwb_pxp(built.projector, built.x, built.y, config.cluster_tol));

  const std::string hash = model_hash(config.model, config.half_width);
  std::ostringstream markers;
  markers << "model_hash,N,L,form,value,imag_residual\n";
  bool reality = true;
  for (int window : config.window_values) {
    const MarkerResult chi =
        chern_marker_chi(built.projector, built.x, built.y, window, built.idx);
    const MarkerResult pl =
        chern_marker_pl(built.projector, basis, built.x, built.y, window);
    markers << detail::marker_csv_row(hash, config.half_width, chi);
    markers << detail::marker_csv_row(hash, config.half_width, pl);
    for (const MarkerResult& m : {chi, pl}) {
      reality = reality &&
                m.imaginary_residual <= 1e-8 * std::max(1.0, std::abs(m.value));
    }
  }
  writer.write("markers.csv", markers.str());
  writer.check("marker_reality", reality);

  if (config.model.kind == ModelKind::two_band_chern &&
      config.model.disorder_strength == 0.0) {
    nlohmann::ordered_json oracle;
    oracle["u"] = config.model.mass_u;
    oracle["grids"] = {12, 24, 48};
    std::vector<int> values;
    for (int grid : {12, 24, 48}) {
      values.push_back(fhs_chern_number(config.model.mass_u, grid));
    }
    oracle["values"] = values;
    const bool stable = values[0] == values[1] && values[1] == values[2];
    oracle["value"] = values[1];
    oracle["stable"] = stable;
    writer.write("fhs_oracle.json", oracle.dump(2) + "\n");
    writer.check("fhs_grid_stable", stable);
  }
  return writer.finish();
}

/// `lab dichotomy`: localization moments across derived sizes, bounded
/// density, marker values, and a one-page verdict.
inline int run_dichotomy(const ExperimentConfig& config, const std::string& out_dir) {
  config.validate();
  detail::RunWriter writer(config, out_dir);

  std::vector<int> sizes;
  for (int size : {config.half_width - 8, config.half_width - 4, config.half_width}) {
    if (size >= 4 && (sizes.empty() || sizes.back() != size)) sizes.push_back(size);
  }

  const double s_loc = 1.0 + config.delta;
  nlohmann::ordered_json trend = nlohmann::ordered_json::array();
  std::ostringstream moments;
  moments << "label_m1,label_m2,j,s,moment\n";
  double final_max_moment = 0.0;
  int bounded_density_m = 0;
  int degeneracy = 1;
  MarkerResult marker_chi_result, marker_pl_result;

  for (int size : sizes) {
    const auto built = detail::build_and_project(config, size);
    const WannierBasis raw =
        build_gwb_pxp(built.projector, built.x, built.y, config.cluster_tol);
    const WannierBasis basis = relabel_to_lattice(raw);
    const auto profile = localization_profile(basis, {1.0, s_loc}, built.idx);
    const MomentReport& loc = profile[1];
    trend.push_back({{"N", size}, {"max_moment", loc.max_value}});

    if (size == config.half_width) {
      final_max_moment = loc.max_value;
      bounded_density_m = bounded_density(raw.centers);
      degeneracy = basis.degeneracy;
      for (const MomentReport& report : profile) {
        for (Eigen::Index c = 0; c < basis.count(); ++c) {
          const LatticeLabel& label = (*basis.labels)[c];
          moments << label.m1 << ',' << label.m2 << ',' << label.j << ','
                  << format_double(report.s) << ','
                  << format_double(report.values[std::size_t(c)]) << '\n';
        }
      }
      int window = 1;
      for (int candidate : config.window_values) {
        if (2 * candidate <= size) window = std::max(window, candidate);
      }
      marker_chi_result =
          chern_marker_chi(built.projector, built.x, built.y, window, built.idx);
      marker_pl_result =
          chern_marker_pl(built.projector, basis, built.x, built.y, window);
    }
  }
  writer.write("moments.csv", moments.str());

  nlohmann::ordered_json verdict;
  verdict["phase_guess"] =
      std::abs(marker_chi_result.value) > 0.5 ? "topological" : "trivial";
  verdict["max_moment_trend"] = trend;
  verdict["marker_value"] = marker_chi_result.value;
  verdict["marker_pl_value"] = marker_pl_result.value;
  verdict["marker_window"] = marker_chi_result.window;
  verdict["bounded_density"] = bounded_density_m;
  verdict["degeneracy_M"] = degeneracy;
  verdict["s"] = s_loc;
  verdict["max_moment"] = final_max_moment;
  writer.write("verdict.json", verdict.dump(2) + "\n");

  writer.check("marker_reality",
               marker_chi_result.imaginary_residual <=
                       1e-8 * std::max(1.0, std::abs(marker_chi_result.value)) &&
                   marker_pl_result.imaginary_residual <=
                       1e-8 * std::max(1.0, std::abs(marker_pl_result.value)));
  writer.check("bounded_density_finite", bounded_density_m >= 1);
  return writer.finish();
}

/// `lab estimates`: every toggled estimate series with fitted exponents and
/// the pinned tolerance table; any violated invariant fails the run.
inline int run_estimates(const ExperimentConfig& config, const std::string& out_dir) {
  config.validate();
  detail::RunWriter writer(config, out_dir);
  const auto built = detail::build_and_project(config, config.half_width);
  const WannierBasis basis = relabel_to_lattice(
      build_gwb_pxp(built.projector, built.x, built.y, config.cluster_tol));

  const int n = config.half_width;
  const int a_tech = std::max(1, n / 4);
  std::vector<int> b_values;
  for (int b : {2, 4, 6, 8}) {
    if (a_tech + b <= n) b_values.push_back(b);
  }

  nlohmann::ordered_json summary;
  nlohmann::ordered_json series_list = nlohmann::ordered_json::array();
  auto emit_series = [&](const ScalingSeries& series) {
    writer.write(series.name + ".csv", detail::series_csv(series));
    series_list.push_back(detail::series_summary(series));
    writer.check(series.name + "_nonnegative", [&] {
      for (const auto& [param, value] : series.points) {
        if (!(value >= 0.0) || !std::isfinite(value)) return false;
      }
      return true;
    }());
  };

  if (config.estimates.near_bd) {
    const ScalingSeries series = prop_near_bd(basis, a_tech, b_values, built.idx,
                                              config.delta);
    emit_series(series);
    writer.check("near_bd_monotone", detail::non_increasing(series));
    writer.check("near_bd_witness_finite", std::isfinite(series.witness));
  }
  if (config.estimates.far_bd) {
    const ScalingSeries series = prop_far_bd(basis, a_tech, b_values, built.idx,
                                             config.delta);
    emit_series(series);
    writer.check("far_bd_monotone", detail::non_increasing(series));
    writer.check("far_bd_witness_finite", std::isfinite(series.witness));
  }
  if (config.estimates.decay_trick) {
    const DecayTrickReport report =
        lemma_decay_trick(basis, std::max(1, n / 2), built.idx, config.delta);
    std::ostringstream csv;
    csv << "m1,m2,j,region,observable,bound,ratio\n";
    for (const auto& entry : report.entries) {
      csv << entry.label.m1 << ',' << entry.label.m2 << ',' << entry.label.j << ','
          << entry.region << ',' << format_double(entry.observable) << ','
          << format_double(entry.bound) << ',' << format_double(entry.ratio) << '\n';
    }
    writer.write("decay_trick.csv", csv.str());
    nlohmann::ordered_json j;
    j["a"] = std::max(1, n / 2);
    j["max_ratio"] = report.max_ratio;
    j["region_counts"] = report.region_counts;
    summary["decay_trick"] = j;
    writer.check("decay_trick_ratio_finite", std::isfinite(report.max_ratio));
  }
  if (config.estimates.approx) {
    const ScalingSeries series =
        prop_approx_series(built.projector, basis, config.window_values, built.idx);
    emit_series(series);
    writer.check("approx_exponent_bound",
                 series.status == SeriesStatus::numerically_zero ||
                     series.exponent <= 2.0 / 3.0 + 0.1);
    const int split_window = config.window_values.back();
    if (split_window >= 2) {
      const ApproxSplit split = approx_four_term_split(built.projector, basis,
                                                       split_window, config.delta,
                                                       built.idx);
      writer.check("approx_four_term_split",
                   split.lhs <= split.far_term + split.band_out + split.band_in +
                                    split.near_term + 1e-10);
    }
  }
  if (config.estimates.pl_chern) {
    const ScalingSeries series = prop_pl_chern_diff(built.projector, basis, built.x,
                                                    built.y, config.window_values);
    emit_series(series);
    writer.check("pl_chern_decreasing",
                 series.status == SeriesStatus::numerically_zero ||
                     detail::strictly_decreasing(series));
    writer.check("pl_chern_exponent_bound",
                 series.status == SeriesStatus::numerically_zero ||
                     series.exponent <= -1.0 / 3.0 + 0.15);
    const CommutatorNormBound bound =
        commutator_norm_bound(built.projector, built.x, built.y);
    writer.check("commutator_norm_bound", bound.lhs <= bound.rhs + 1e-10);
  }
  if (config.estimates.p_x_pl) {
    const PxPlSeries both = prop_p_x_pl(built.projector, basis, built.x, built.y,
                                        config.window_values);
    emit_series(both.x_series);
    emit_series(both.y_series);
    writer.check("p_x_pl_decreasing",
                 (both.x_series.status == SeriesStatus::numerically_zero ||
                  detail::strictly_decreasing(both.x_series)) &&
                     (both.y_series.status == SeriesStatus::numerically_zero ||
                      detail::strictly_decreasing(both.y_series)));
    const int split_window = config.window_values.back();
    if (split_window >= 4) {
      const PxPlBandSplit split = p_x_pl_band_split(built.projector, basis, built.x,
                                                    split_window, config.delta);
      const bool exact = std::abs(split.total - (split.interior + split.band)) <=
                         1e-10 * std::max(1.0, split.total);
      const bool bounded =
          split.band <= split.sup_term * double(split.band_count) + 1e-10;
      writer.check("p_x_pl_band_split", exact && bounded);
    }
    // Hoelder chain at each window: |tr(P_L C P_L)| <= 2 S2(X side) S2(Y side).
    bool holder = true;
    for (int window : config.window_values) {
      const TraceReductionCheck reduction =
          trace_reduction_check(built.projector, basis, built.x, built.y, window);
      std::size_t at = 0;
      for (; at < both.x_series.points.size(); ++at) {
        if (both.x_series.points[at].first == window) break;
      }
      const double norm_l2 = double(window) * window;
      const double rhs =
          2.0 * std::sqrt(both.x_series.points[at].second * norm_l2) *
          std::sqrt(both.y_series.points[at].second * norm_l2);
      holder = holder && std::abs(reduction.lhs) <= rhs + 1e-10;
    }
    writer.check("holder_chain", holder);
  }
  summary["series"] = series_list;
  writer.write("summary.json", summary.dump(2) + "\n");
  return writer.finish();
}

}  // namespace chernlab
