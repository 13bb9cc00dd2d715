#pragma once

#include <string>
#include <vector>

#include "nnjump/cli/config.hpp"
#include "nnjump/engine.hpp"
#include "nnjump/gadget.hpp"
#include "nnjump/model.hpp"

namespace nnjump::cli {

struct Outputs {
  std::string summary = "summary.json";
  std::string paths_csv;  ///< empty: no path dump
  std::size_t path_cap = 10;
  std::string svg;  ///< empty: no plot
  bool operator==(const Outputs&) const = default;
};

struct DiagnosticsSpec {
  std::vector<std::string> tests;
  std::string f = "exp_neg";
  double budget = 0.01;
  double x0_low = 1.0;
  double x0_high = 2.0;
  double x0_star = 1.0;
  std::vector<double> dependence_x0{2.0, 1.5, 1.25, 1.125};
  double t = 1.0;
  bool sup_mode = false;
  bool operator==(const DiagnosticsSpec&) const = default;
};

struct GadgetSpec {
  double C = 1.0;
  double gamma = 0.5;
  int k_max = 10;
  GadgetVariant variant = GadgetVariant::Symmetric;
  std::size_t samples = 1000;
  std::size_t phi_points = 200;
  bool operator==(const GadgetSpec&) const = default;
};

struct Scenario {
  ModelSpec model;
  SimulationConfig config;
  double x0 = 1.0;
  std::vector<double> t_grid{0.25, 0.5, 1.0};
  Outputs outputs;
  DiagnosticsSpec diagnostics;
  std::vector<std::string> conditions{"6a", "6b", "6c", "6d", "monotone", "4a"};
  GadgetSpec gadget;

  bool operator==(const Scenario&) const = default;
};

/// Builds a scenario; `model.preset` seeds the model and later `model.*`
/// keys override its fields. Unknown keys are Config errors naming the key.
Scenario scenario_from_document(const Document& doc);
/// Full explicit form (no preset) that parses back to an equal scenario.
/// Throws Config for programmatic Custom coefficients.
Document scenario_to_document(const Scenario& s);

Scenario parse_scenario(const std::string& text);
std::string serialize_scenario(const Scenario& s);
Scenario load_scenario(const std::string& path);

Value measure_to_value(const JumpMeasure& m);
JumpMeasure measure_from_value(const Value& v, const std::string& key, MeasureRole default_role);
Value fn_to_value(const ScalarFn& f);
ScalarFn fn_from_value(const Value& v, const std::string& key);

}  // namespace nnjump::cli
