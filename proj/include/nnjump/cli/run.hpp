#pragma once

#include <string>
#include <vector>

#include "nnjump/analysis.hpp"
#include "nnjump/cli/outputs.hpp"
#include "nnjump/cli/scenario.hpp"
#include "nnjump/error.hpp"

namespace nnjump::cli {

/// 0 success, 1 a Fail or Inconclusive verdict, 2 configuration error,
/// 3 numerical error.
int exit_code_for(const Error& e);

Summary run_simulation(const Scenario& s, unsigned threads, std::vector<SimPath>* dump = nullptr);
std::vector<ConditionReport> run_conditions(const Scenario& s);
std::vector<DiagnosticsReport> run_diagnostics(const Scenario& s, const std::vector<std::string>& tests,
                                               unsigned threads);
/// Partition checks, envelope and difference bounds for k = 1..k_max.
DiagnosticsReport run_gadget_suite(const GadgetSpec& g, std::uint64_t seed);

/// Entry point behind the `nnjump` executable.
int run(int argc, const char* const* argv);
int run(const std::vector<std::string>& args);

}  // namespace nnjump::cli
