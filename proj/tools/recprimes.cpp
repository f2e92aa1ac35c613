#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>

#include "recprimes/census.hpp"
#include "recprimes/covering.hpp"
#include "recprimes/density.hpp"
#include "recprimes/heuristics.hpp"
#include "recprimes/report.hpp"

using namespace recprimes;

namespace {

// Pre-scan for --config so the file can seed option defaults.
RunConfig initial_config(int argc, char** argv) {
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) != "--config") continue;
    std::ifstream in(argv[i + 1]);
    if (!in) throw CLI::ValidationError("--config", std::string("cannot open ") + argv[i + 1]);
    const ojson j = ojson::parse(in);
    // A rendered report carries its config under "config".
    return config_from_json(j.contains("config") ? j.at("config") : j);
  }
  return {};
}

std::string cache_dir(const RunConfig& c) {
  if (const char* env = std::getenv("RECPRIMES_CACHE")) return env;
  return c.cache_dir;
}

CensusPolicy census_policy(const RunConfig& c) {
  CensusPolicy p;
  p.prp.rounds = c.prp_rounds;
  p.prp.seed = c.prp_seed;
  p.trial_bound = c.trial_bound;
  p.threads = c.threads;
  p.log_path = c.resume_path;
  auto last = std::make_shared<std::chrono::steady_clock::time_point>(std::chrono::steady_clock::now());
  p.heartbeat = [last](std::uint64_t done, std::uint64_t total) {
    const auto now = std::chrono::steady_clock::now();
    if (now - *last < std::chrono::seconds(5) && done != total) return;
    *last = now;
    std::cerr << "progress " << done << "/" << total << std::endl;
  };
  return p;
}

FactorEffort effort(const RunConfig& c) {
  FactorEffort e;
  e.rho_iterations = c.rho_iterations;
  return e;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Primes in linear recurrence sequences: censuses, densities, coverings, constants"};
  app.require_subcommand(1);
  app.fallthrough();

  RunConfig cfg;
  try {
    cfg = initial_config(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  std::string config_path, out_format = to_string(cfg.format);
  app.add_option("--config", config_path, "JSON RunConfig supplying defaults");
  app.add_option("--threads", cfg.threads, "worker threads")->capture_default_str();
  app.add_option("--seed", cfg.prp_seed, "PRP seed")->capture_default_str();
  app.add_option("--prp-rounds", cfg.prp_rounds, "random-base rounds above 2^64")->capture_default_str();

  // census
  auto* census_cmd = app.add_subcommand("census", "count n <= N with u_n prime");
  std::uint64_t power_base = 0, division_n0 = 0, k_bound = 0;
  std::string form = "none";
  bool absolute = false, no_prefilter = false;
  census_cmd->add_option("--seq", cfg.seq, "sequence spec")->required(cfg.seq.empty());
  census_cmd->add_option("--N", cfg.N, "index bound")->required(cfg.N == 0);
  census_cmd->add_option("--resume", cfg.resume_path, "verdict log to replay and append");
  census_cmd->add_option("--out", out_format, "csv|json|table")->check(CLI::IsMember({"csv", "json", "table"}));
  census_cmd->add_option("--trial-bound", cfg.trial_bound, "plain trial division bound")->capture_default_str();
  census_cmd->add_option("--power-base", power_base, "only test n = base^m");
  census_cmd->add_option("--division", division_n0, "division sequence: prime n or n <= (n0-1)^2");
  census_cmd->add_option("--form", form, "extra trial divisors k*n+1 (index) or k*2n+1 (twice-index)")
      ->check(CLI::IsMember({"none", "index", "twice-index"}));
  census_cmd->add_option("--k-bound", k_bound, "k range for --form");
  census_cmd->add_flag("--abs", absolute, "count |u_n|");
  census_cmd->add_flag("--no-prefilter", no_prefilter, "skip the forbidden-class screen");

  // delta
  auto* delta_cmd = app.add_subcommand("delta", "exact density delta_u(R_y)");
  bool exact = false;
  std::string strategy = "sieve";
  delta_cmd->add_option("--seq", cfg.seq, "sequence spec")->required(cfg.seq.empty());
  delta_cmd->add_option("--y", cfg.y, "period bound")->required(cfg.y == 0);
  delta_cmd->add_flag("--exact", exact, "print only the rational");
  delta_cmd->add_option("--strategy", strategy, "sieve|ie")->check(CLI::IsMember({"sieve", "ie"}));

  // predict
  auto* predict_cmd = app.add_subcommand("predict", "predicted count delta * log N / log alpha");
  predict_cmd->add_option("--seq", cfg.seq, "sequence spec")->required(cfg.seq.empty());
  predict_cmd->add_option("--N", cfg.N, "index bound")->required(cfg.N == 0);
  predict_cmd->add_option("--y", cfg.y, "period bound")->capture_default_str();

  // covering
  auto* covering_cmd = app.add_subcommand("covering", "covering systems");
  covering_cmd->require_subcommand(1);
  auto* verify_cmd = covering_cmd->add_subcommand("verify", "verify a covering system against a sequence");
  unsigned multiplier = 1;
  verify_cmd->add_option("--seq", cfg.seq, "sequence spec")->required(cfg.seq.empty());
  verify_cmd->add_option("--file", cfg.param, "covering JSON")->required(cfg.param.empty())->check(CLI::ExistingFile);
  verify_cmd->add_option("--multiplier", multiplier, "window multiplier")->capture_default_str();
  auto* erdos_cmd = covering_cmd->add_subcommand("erdos", "covering from the primes of 2^64-1");
  erdos_cmd->add_option("--a", cfg.extra, "multiplier a");

  // constants
  auto* constants_cmd = app.add_subcommand("constants", "C_2, C_v, its lower bound, c_k, beta/gamma");
  std::string which;
  constants_cmd->add_option("name", which, "c2|cv|cvlb|ck|beta")
      ->required()
      ->check(CLI::IsMember({"c2", "cv", "cvlb", "ck", "beta"}));
  constants_cmd->add_option("--param", cfg.N, "truncation (p_max, d_max) or k for beta")->required(cfg.N == 0);
  constants_cmd->add_option("--k", cfg.k, "k for ck")->capture_default_str();

  // moments
  auto* moments_cmd = app.add_subcommand("moments", "empirical moments of Pi_{1,b}(N) over odd b <= B");
  double max_seconds = 0.0;
  moments_cmd->add_option("--N", cfg.N, "index bound")->required(cfg.N == 0);
  moments_cmd->add_option("--B", cfg.B, "b bound")->required(cfg.B == 0);
  moments_cmd->add_option("--k", cfg.k, "moment order")->capture_default_str();
  moments_cmd->add_option("--max-seconds", max_seconds, "budget; partial report when exceeded");

  // omega-stats
  auto* omega_cmd = app.add_subcommand("omega-stats", "mean Omega(u_n)");
  double offset = 0.0;
  if (cfg.range.empty()) cfg.range = "upto";
  omega_cmd->add_option("--seq", cfg.seq, "sequence spec")->required(cfg.seq.empty());
  omega_cmd->add_option("--N", cfg.N, "index bound")->required(cfg.N == 0);
  omega_cmd->add_option("--range", cfg.range, "upto|dyadic")->check(CLI::IsMember({"upto", "dyadic"}));
  omega_cmd->add_option("--offset", offset, "additive offset for non-division predictions");
  omega_cmd->add_option("--rho", cfg.rho_iterations, "rho iteration budget")->capture_default_str();

  // beta
  auto* beta_cmd = app.add_subcommand("beta", "roots beta_k < k < gamma_k");
  beta_cmd->add_option("--k", cfg.k, "k")->required();

  // crosscheck
  auto* cross_cmd = app.add_subcommand("crosscheck", "compare a census with an OEIS b-file");
  cross_cmd->add_option("--seq", cfg.seq, "sequence spec")->required(cfg.seq.empty());
  cross_cmd->add_option("--N", cfg.N, "index bound")->required(cfg.N == 0);
  cross_cmd->add_option("--bfile", cfg.param, "b-file path")->required(cfg.param.empty())->check(CLI::ExistingFile);
  cross_cmd->add_option("--division", division_n0, "division sequence pruning threshold");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    cfg.format = parse_format(out_format);
    cfg.cache_dir = cache_dir(cfg);
    auto* sub = app.get_subcommands().front();
    cfg.subcommand = sub->get_name();
    if (sub == covering_cmd) {
      sub = covering_cmd->get_subcommands().front();
      cfg.subcommand += " " + sub->get_name();
    }

    if (sub == census_cmd) {
      const auto rec = parse_sequence(cfg.seq);
      CensusPolicy policy = census_policy(cfg);
      policy.absolute = absolute;
      policy.prefilter = !no_prefilter;
      policy.k_bound = k_bound;
      policy.form = form == "index" ? FormRule::index : form == "twice-index" ? FormRule::twice_index : FormRule::none;
      CensusReport r;
      if (power_base) {
        r = power_index_census(rec, cfg.N, power_base, policy);
        cfg.extra = "power:" + std::to_string(power_base);
      } else if (division_n0) {
        r = division_seq_census(rec, cfg.N, division_n0, policy);
        cfg.extra = "division:" + std::to_string(division_n0);
      } else {
        r = census(rec, cfg.N, policy);
      }
      std::cerr << "census " << cfg.seq << " N=" << cfg.N << " count=" << r.count() << " wall=" << fixed(r.wall_seconds, 2)
                << "s\n";
      std::cout << render_census(r, cfg, cfg.format);
    } else if (sub == delta_cmd) {
      const auto rec = parse_sequence(cfg.seq);
      SupportOptions options;
      std::unique_ptr<FactorCache> cache;
      if (!cfg.cache_dir.empty()) {
        cache = std::make_unique<FactorCache>(cfg.cache_dir + "/factors.txt");
        options.cache = cache.get();
      }
      const auto r = delta(rec, cfg.y, strategy == "ie" ? DeltaStrategy::inclusion_exclusion : DeltaStrategy::sieve,
                           cfg.threads, options);
      if (cache) cache->save();
      cfg.param = strategy;
      if (exact)
        std::cout << r.delta.get_str() << "\n";
      else
        std::cout << render_density(r, cfg);
    } else if (sub == predict_cmd) {
      const auto rec = parse_sequence(cfg.seq);
      if (cfg.y == 0) cfg.y = 20;
      ojson j;
      j["config"] = config_to_json(cfg);
      j["prediction"] = fixed(predict_count(rec, static_cast<double>(cfg.N), cfg.y, cfg.threads), 4);
      std::cout << j.dump(1) << "\n";
    } else if (sub == verify_cmd) {
      const auto rec = parse_sequence(cfg.seq);
      const auto sys = load_covering(cfg.param, &rec);
      const auto r = verify_sequence_covering(rec, sys, multiplier);
      ojson j;
      j["config"] = config_to_json(cfg);
      j["covers"] = r.covers;
      j["divisibility"] = r.divisibility;
      j["verified"] = r.verified();
      j["window"] = r.window;
      if (r.first_uncovered) j["first_uncovered"] = *r.first_uncovered;
      if (r.failing) j["failing"] = {{"residue", r.failing->residue}, {"modulus", r.failing->modulus},
                                     {"prime", r.failing->prime}, {"index", *r.failing_index}};
      std::cout << j.dump(1) << "\n";
      return r.verified() ? 0 : 1;
    } else if (sub == erdos_cmd) {
      const auto r = erdos_construction(cfg.extra.empty() ? std::nullopt : std::optional<Int>(Int(cfg.extra)));
      ojson j;
      j["config"] = config_to_json(cfg);
      j["modulus"] = r.modulus.get_str();
      j["r"] = r.r.get_str();
      j["a"] = r.a.get_str();
      j["b"] = r.b.get_str();
      j["verified"] = r.verified;
      if (r.failing_index) j["failing_index"] = *r.failing_index;
      j["system"] = ojson::parse(covering_to_json(r.system));
      std::cout << j.dump(1) << "\n";
      return r.verified ? 0 : 1;
    } else if (sub == constants_cmd) {
      cfg.param = which;
      if (which == "beta") {
        const auto [b, g] = beta_gamma(static_cast<unsigned>(cfg.N));
        ojson j;
        j["config"] = config_to_json(cfg);
        j["beta"] = fixed(b, 9);
        j["gamma"] = fixed(g, 9);
        std::cout << j.dump(1) << "\n";
      } else {
        const ConstantEstimate e = which == "c2"     ? twin_constant(cfg.N)
                                   : which == "cv"   ? cv_constant(cfg.N)
                                   : which == "cvlb" ? cv_lower_bound(cfg.N)
                                                     : ck_constant(cfg.k, cfg.N);
        std::cout << render_constant(which, e, cfg);
      }
    } else if (sub == moments_cmd) {
      MomentOptions options;
      options.policy = census_policy(cfg);
      options.policy.heartbeat = nullptr;
      options.threads = cfg.threads;
      options.max_seconds = max_seconds;
      std::cout << render_moments(empirical_moments(cfg.N, cfg.B, cfg.k, options), cfg);
    } else if (sub == omega_cmd) {
      const auto rec = parse_sequence(cfg.seq);
      std::unique_ptr<FactorCache> cache;
      if (!cfg.cache_dir.empty()) cache = std::make_unique<FactorCache>(cfg.cache_dir + "/factors.txt");
      const auto r = mean_omega_experiment(rec, cfg.N, cfg.range == "dyadic" ? RangeConvention::dyadic : RangeConvention::upto,
                                           effort(cfg), cache.get(), offset);
      if (cache) cache->save();
      std::cout << render_omega(r, cfg);
    } else if (sub == beta_cmd) {
      const auto [b, g] = beta_gamma(cfg.k);
      std::cout << fixed(b, 6) << " " << fixed(g, 6) << "\n";
    } else if (sub == cross_cmd) {
      const auto rec = parse_sequence(cfg.seq);
      const auto bfile = load_bfile(cfg.param);
      const CensusPolicy policy = census_policy(cfg);
      const auto r = division_n0 ? division_seq_census(rec, cfg.N, division_n0, policy) : census(rec, cfg.N, policy);
      const auto diff = oeis_crosscheck(r, bfile);
      ojson j;
      j["config"] = config_to_json(cfg);
      j["limit"] = diff.limit;
      j["only_in_report"] = diff.only_in_report;
      j["only_in_bfile"] = diff.only_in_bfile;
      j["agree"] = diff.empty();
      std::cout << j.dump(1) << "\n";
      return diff.empty() ? 0 : 1;
    }
  } catch (const InvalidSequence& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
