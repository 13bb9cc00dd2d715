#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nnjump/analysis.hpp"
#include "nnjump/cli/scenario.hpp"
#include "nnjump/ensemble.hpp"

namespace nnjump::cli {

inline constexpr const char* kToolVersion = "0.1.0";

struct Summary {
  std::string model;
  Scenario scenario;
  std::uint64_t seed = 0;
  std::vector<double> t_grid;
  std::vector<double> mean, var, se;
  std::size_t clamp_count = 0;
  std::size_t cap_events = 0;
  double truncation_variance_budget = 0.0;
  /// Linear-growth constant when the model has one; drives the bound curve.
  std::optional<double> K;
  double x0 = 0.0;
};

Summary make_summary(const Scenario& s, const EnsembleResult& r, double trunc_budget, std::optional<double> K);
std::string summary_json(const Summary& s);

std::string report_json(const ConditionReport& r);
std::string reports_json(std::span<const ConditionReport> rs);
std::string diagnostics_json(std::span<const DiagnosticsReport> rs);

struct ManifestEntry {
  std::string command;
  int exit_status = 0;
};
std::string manifest_json(const std::string& digest, std::uint64_t seed, std::span<const ManifestEntry> entries);

/// Lowercase hex SHA-256.
std::string sha256_hex(const std::string& bytes);

/// `path_id,time,state,event_channel,event_size`, one row per recorded time.
std::string paths_csv(std::span<const SimPath> paths, const Dynamics& d);

/// Mean +- 3 SE versus time, with (1 + x0) e^{Kt} - 1 overlaid when K is set.
/// Throws Io on an empty grid.
std::string plot_svg(const Summary& s);

void write_file(const std::string& path, const std::string& content);

}  // namespace nnjump::cli
