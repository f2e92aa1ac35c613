#include "recprimes/report.hpp"

#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace recprimes {

namespace {

VerdictKind parse_kind(const std::string& s) {
  if (s == to_string(VerdictKind::composite)) return VerdictKind::composite;
  if (s == to_string(VerdictKind::probable_prime)) return VerdictKind::probable_prime;
  if (s == to_string(VerdictKind::proven_prime)) return VerdictKind::proven_prime;
  throw std::invalid_argument("unknown verdict " + s);
}

ojson parse_doc(const std::string& text, RunConfig* config) {
  ojson j = ojson::parse(text);
  if (config && j.contains("config")) *config = config_from_json(j.at("config"));
  return j;
}

mpq_class rational_from(const ojson& j, const char* num, const char* den) {
  mpq_class q(Int(j.at(num).get<std::string>()), Int(j.at(den).get<std::string>()));
  q.canonicalize();
  return q;
}

}  // namespace

const char* to_string(OutputFormat f) {
  switch (f) {
    case OutputFormat::csv: return "csv";
    case OutputFormat::json: return "json";
    case OutputFormat::table: return "table";
  }
  return "?";
}

OutputFormat parse_format(const std::string& s) {
  if (s == "csv") return OutputFormat::csv;
  if (s == "json") return OutputFormat::json;
  if (s == "table") return OutputFormat::table;
  throw std::invalid_argument("unknown output format " + s);
}

std::string fixed(double v, int places) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", places, v);
  return buf;
}

std::string fixed(const mpq_class& v, int places) {
  mpf_class f(v, 256);
  char buf[512];
  gmp_snprintf(buf, sizeof buf, "%.*Ff", places, f.get_mpf_t());
  return buf;
}

ojson config_to_json(const RunConfig& c) {
  ojson j;
  j["subcommand"] = c.subcommand;
  j["seq"] = c.seq;
  j["N"] = c.N;
  j["y"] = c.y;
  j["B"] = c.B;
  j["k"] = c.k;
  j["threads"] = c.threads;
  j["trial_bound"] = c.trial_bound;
  j["rho_iterations"] = c.rho_iterations;
  j["prp_rounds"] = c.prp_rounds;
  j["prp_seed"] = c.prp_seed;
  j["format"] = to_string(c.format);
  j["cache_dir"] = c.cache_dir;
  j["resume"] = c.resume_path;
  j["param"] = c.param;
  j["range"] = c.range;
  j["extra"] = c.extra;
  return j;
}

RunConfig config_from_json(const ojson& j) {
  RunConfig c;
  c.subcommand = j.value("subcommand", c.subcommand);
  c.seq = j.value("seq", c.seq);
  c.N = j.value("N", c.N);
  c.y = j.value("y", c.y);
  c.B = j.value("B", c.B);
  c.k = j.value("k", c.k);
  c.threads = j.value("threads", c.threads);
  c.trial_bound = j.value("trial_bound", c.trial_bound);
  c.rho_iterations = j.value("rho_iterations", c.rho_iterations);
  c.prp_rounds = j.value("prp_rounds", c.prp_rounds);
  c.prp_seed = j.value("prp_seed", c.prp_seed);
  c.format = parse_format(j.value("format", std::string(to_string(c.format))));
  c.cache_dir = j.value("cache_dir", c.cache_dir);
  c.resume_path = j.value("resume", c.resume_path);
  c.param = j.value("param", c.param);
  c.range = j.value("range", c.range);
  c.extra = j.value("extra", c.extra);
  return c;
}

std::string render_census(const CensusReport& r, const RunConfig& c, OutputFormat f) {
  std::ostringstream out;
  if (f == OutputFormat::csv) {
    out << "n,digits,verdict,method\n";
    for (const auto& h : r.hits) out << h.n << ',' << h.digits << ',' << to_string(h.kind) << ',' << h.method << '\n';
    return out.str();
  }
  if (f == OutputFormat::table) {
    out << "# " << r.spec << (r.partial ? " (partial)" : "") << '\n';
    out << "N count\n";
    for (const auto& cp : r.checkpoints) out << cp.N << ' ' << cp.count << '\n';
    out << r.N << ' ' << r.count() << '\n';
    return out.str();
  }
  ojson j;
  j["config"] = config_to_json(c);
  j["spec"] = r.spec;
  j["N"] = r.N;
  j["count"] = r.count();
  j["policy"] = r.policy;
  j["pruned"] = r.pruned;
  j["partial"] = r.partial;
  j["tested"] = r.tested;
  j["checkpoints"] = ojson::array();
  for (const auto& cp : r.checkpoints) j["checkpoints"].push_back({{"N", cp.N}, {"count", cp.count}});
  j["hits"] = ojson::array();
  for (const auto& h : r.hits)
    j["hits"].push_back({{"n", h.n}, {"digits", h.digits}, {"verdict", to_string(h.kind)}, {"method", h.method}});
  return j.dump(1) + "\n";
}

CensusReport parse_census_json(const std::string& text, RunConfig* config) {
  const ojson j = parse_doc(text, config);
  CensusReport r;
  r.spec = j.at("spec").get<std::string>();
  r.N = j.at("N").get<std::uint64_t>();
  r.policy = j.at("policy").get<std::string>();
  r.pruned = j.at("pruned").get<bool>();
  r.partial = j.at("partial").get<bool>();
  r.tested = j.at("tested").get<std::uint64_t>();
  for (const auto& cp : j.at("checkpoints"))
    r.checkpoints.push_back({cp.at("N").get<std::uint64_t>(), cp.at("count").get<std::size_t>()});
  for (const auto& h : j.at("hits"))
    r.hits.push_back({h.at("n").get<std::uint64_t>(), h.at("digits").get<std::size_t>(),
                      parse_kind(h.at("verdict").get<std::string>()), h.at("method").get<std::string>()});
  if (r.count() != j.at("count").get<std::size_t>()) throw std::invalid_argument("census count mismatch");
  return r;
}

std::string render_density(const DensityReport& r, const RunConfig& c) {
  ojson j;
  j["config"] = config_to_json(c);
  j["y"] = r.y;
  j["Ly"] = r.L.get_str();
  j["count"] = r.count.get_str();
  j["start"] = r.start;
  j["phi_num"] = r.phi_ratio.get_num().get_str();
  j["phi_den"] = r.phi_ratio.get_den().get_str();
  j["delta_num"] = r.delta.get_num().get_str();
  j["delta_den"] = r.delta.get_den().get_str();
  j["delta"] = fixed(r.delta, 4);
  j["support"] = r.support;
  return j.dump(1) + "\n";
}

DensityReport parse_density_json(const std::string& text, RunConfig* config) {
  const ojson j = parse_doc(text, config);
  DensityReport r;
  r.y = j.at("y").get<unsigned>();
  r.L = Int(j.at("Ly").get<std::string>());
  r.count = Int(j.at("count").get<std::string>());
  r.start = j.at("start").get<std::uint64_t>();
  r.phi_ratio = rational_from(j, "phi_num", "phi_den");
  r.delta = rational_from(j, "delta_num", "delta_den");
  r.delta_float = r.delta.get_d();
  r.support = j.at("support").get<std::vector<std::uint64_t>>();
  return r;
}

std::string render_moments(const MomentReport& r, const RunConfig& c) {
  ojson j;
  j["config"] = config_to_json(c);
  j["N"] = r.N;
  j["B"] = r.B;
  j["k"] = r.k;
  j["empirical_num"] = r.empirical.get_num().get_str();
  j["empirical_den"] = r.empirical.get_den().get_str();
  j["empirical"] = fixed(r.empirical, 6);
  j["predicted"] = fixed(r.predicted, 6);
  j["partial"] = r.partial;
  j["per_b"] = ojson::array();
  for (const auto& [b, n] : r.per_b) j["per_b"].push_back({b, n});
  return j.dump(1) + "\n";
}

MomentReport parse_moments_json(const std::string& text, RunConfig* config) {
  const ojson j = parse_doc(text, config);
  MomentReport r;
  r.N = j.at("N").get<std::uint64_t>();
  r.B = j.at("B").get<std::uint64_t>();
  r.k = j.at("k").get<unsigned>();
  r.empirical = rational_from(j, "empirical_num", "empirical_den");
  r.predicted = std::stod(j.at("predicted").get<std::string>());
  r.partial = j.at("partial").get<bool>();
  for (const auto& e : j.at("per_b")) r.per_b.emplace_back(e.at(0).get<std::int64_t>(), e.at(1).get<std::uint64_t>());
  return r;
}

std::string render_omega(const OmegaExperiment& r, const RunConfig& c) {
  ojson j;
  j["config"] = config_to_json(c);
  j["N"] = r.N;
  j["range"] = to_string(r.range);
  j["observed"] = fixed(r.observed, 6);
  j["prediction"] = fixed(r.prediction, 6);
  j["division_sequence"] = r.division_sequence;
  j["lower_bound"] = r.lower_bound;
  j["unresolved"] = r.unresolved;
  j["omegas"] = r.omegas;
  return j.dump(1) + "\n";
}

OmegaExperiment parse_omega_json(const std::string& text, RunConfig* config) {
  const ojson j = parse_doc(text, config);
  OmegaExperiment r;
  r.N = j.at("N").get<std::uint64_t>();
  const std::string range = j.at("range").get<std::string>();
  if (range != "upto" && range != "dyadic") throw std::invalid_argument("unknown range " + range);
  r.range = range == "upto" ? RangeConvention::upto : RangeConvention::dyadic;
  r.observed = std::stod(j.at("observed").get<std::string>());
  r.prediction = std::stod(j.at("prediction").get<std::string>());
  r.division_sequence = j.at("division_sequence").get<bool>();
  r.lower_bound = j.at("lower_bound").get<bool>();
  r.unresolved = j.at("unresolved").get<std::uint64_t>();
  r.omegas = j.at("omegas").get<std::vector<unsigned>>();
  return r;
}

std::string render_constant(const std::string& name, const ConstantEstimate& e, const RunConfig& c) {
  ojson j;
  j["config"] = config_to_json(c);
  j["constant"] = name;
  j["value"] = e.digits(20);
  j["truncation"] = e.truncation;
  j["parameter"] = e.parameter;
  j["direction"] = to_string(e.direction);
  if (e.tail_bound) j["tail_bound"] = fixed(*e.tail_bound, 12);
  return j.dump(1) + "\n";
}

}  // namespace recprimes
