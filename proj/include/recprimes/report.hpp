#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "recprimes/census.hpp"
#include "recprimes/density.hpp"
#include "recprimes/heuristics.hpp"

namespace recprimes {

using ojson = nlohmann::ordered_json;

enum class OutputFormat { csv, json, table };
const char* to_string(OutputFormat f);
OutputFormat parse_format(const std::string& s);

struct RunConfig {
  std::string subcommand;
  std::string seq;
  std::uint64_t N = 0;
  unsigned y = 0;
  std::uint64_t B = 0;
  unsigned k = 1;
  unsigned threads = 1;
  std::uint64_t trial_bound = 10000;
  std::uint64_t rho_iterations = std::uint64_t{1} << 26;
  unsigned prp_rounds = 24;
  std::uint64_t prp_seed = PrpPolicy{}.seed;
  OutputFormat format = OutputFormat::json;
  std::string cache_dir;
  std::string resume_path;
  std::string param;   // constants name, covering file, b-file path, ...
  std::string range;   // omega-stats range convention
  std::string extra;   // free-form (covering multiplier a, ...)

  bool operator==(const RunConfig&) const = default;
};

ojson config_to_json(const RunConfig& c);
RunConfig config_from_json(const ojson& j);

/// Renderers embed the config; parsers return both halves.
std::string render_census(const CensusReport& r, const RunConfig& c, OutputFormat f);
CensusReport parse_census_json(const std::string& text, RunConfig* config = nullptr);

std::string render_density(const DensityReport& r, const RunConfig& c);
DensityReport parse_density_json(const std::string& text, RunConfig* config = nullptr);

std::string render_moments(const MomentReport& r, const RunConfig& c);
MomentReport parse_moments_json(const std::string& text, RunConfig* config = nullptr);

std::string render_omega(const OmegaExperiment& r, const RunConfig& c);
OmegaExperiment parse_omega_json(const std::string& text, RunConfig* config = nullptr);

std::string render_constant(const std::string& name, const ConstantEstimate& e, const RunConfig& c);

/// Fixed-point decimal with `places` digits after the point.
std::string fixed(double v, int places);
std::string fixed(const mpq_class& v, int places);

}  // namespace recprimes
