#pragma once

#include <string>
#include <variant>
#include <vector>

#include "engulf/engulfing.hpp"
#include "engulf/function.hpp"
#include "engulf/sections.hpp"

namespace engulf {

using Cell = std::variant<double, std::string, bool>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  bool operator==(const Table&) const = default;
};

// Machine-readable experiment result.  Equal inputs (function, config, seed)
// produce byte-identical serializations.
struct ExperimentReport {
  std::string experiment;
  std::string function_tag;
  std::string tool_version;
  std::uint64_t seed = 0;
  std::string config_json;  // canonical JSON of the configuration
  std::string config_hash;  // FNV-1a of config_json
  Table table;
  std::vector<std::string> verdicts;
  std::vector<std::string> notes;
  bool operator==(const ExperimentReport&) const = default;
};

// Bregman-gap chain of the piecewise x^4/x^2 example at pairs (x, -x^k):
// the chain terms are computed through the generic gap operations and checked
// against their closed forms; each row records the minimal constant at the
// pair.  k outside (1,3) is allowed but flagged.
ExperimentReport run_example_2_1(double k, const std::vector<double>& xs);

// Quasi-symmetry ratios of e^x and e^{x^2} at pairs (0, h): tabulates the
// ratio growth that rules both functions out of every soft-engulfing class.
ExperimentReport run_exp_family(const std::vector<double>& hs);

// One row per catalog function: K-hat, divergence flag, soft/full verdicts at
// the boosted constants, and a section-boundedness classification.
ExperimentReport run_catalog_report(const SamplerConfig& cfg, const RefineConfig& refine = {});

std::string to_json_string(const ExperimentReport& report);
ExperimentReport report_from_json(std::string_view text);  // throws std::invalid_argument
std::string to_csv(const Table& table);

// FNV-1a 64 over a string, hex-encoded; used for config provenance.
std::string fnv1a_hex(std::string_view text);

// --- serialization of library results (deterministic JSON) -------------------

std::string verdict_to_json(const EngulfingVerdict& v);
std::string kestimate_to_json(const KEstimate& e);
std::string equivalence_to_json(const EquivalenceReport& r);

// Section as a report: 1D interval row, or (direction, radius, point) rows in
// dimension 2 with plot coordinates truncated at the cap.
ExperimentReport section_report(const FunctionSpec& f, const SubgradientPair& base, double t,
                                int directions, double r_cap = 1e12);

ExperimentReport ratio_report(const FunctionSpec& f, const Vec& x, const Vec& y);
ExperimentReport kestimate_report(const FunctionSpec& f, const SamplerConfig& cfg,
                                  const RefineConfig& refine = {});

}  // namespace engulf
