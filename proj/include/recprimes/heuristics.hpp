#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "recprimes/arith.hpp"
#include "recprimes/bigseq.hpp"
#include "recprimes/census.hpp"

namespace recprimes {

enum class Direction { increasing, decreasing, oscillating };
const char* to_string(Direction d);

/// Default working precision for the constants, in bits.
inline constexpr unsigned kConstantPrecision = 192;

struct ConstantEstimate {
  mpf_class value{0, kConstantPrecision};
  std::string truncation;        // "p_max" or "d_max"
  std::uint64_t parameter = 0;
  Direction direction = Direction::increasing;
  std::optional<double> tail_bound;

  double as_double() const { return value.get_d(); }
  std::string digits(int count = 12) const;
};

/// 2 prod_{3 <= p <= p_max} (1 - 1/(p-1)^2).
ConstantEstimate twin_constant(std::uint64_t p_max);

/// C_2 * sum over odd squarefree d <= d_max of 1/(phi2(d) ord_d(2)).
ConstantEstimate cv_constant(std::uint64_t d_max, std::uint64_t c2_p_max = 10'000'000);

/// prod_{p <= p_max} (1 + 1/(p-1)^3).
ConstantEstimate cv_lower_bound(std::uint64_t p_max);

/// 2^{k-1} prod_{3 <= p <= p_max} (1 - k_p/p) / (1 - 1/p)^k, k_p = min(k, ord_p(2)).
ConstantEstimate ck_constant(unsigned k, std::uint64_t p_max);

/// Roots beta < k < gamma of tau (1 + log k - log tau) = k - 1.
std::pair<double, double> beta_gamma(unsigned k);
double beta_gamma_residual(unsigned k, double tau);

struct SieveIdentity {
  mpq_class lhs, rhs;
  std::vector<std::uint64_t> support;  // odd primes with ord_p(2) <= y
  bool holds() const { return lhs == rhs; }
};

SieveIdentity sieve_identity_check(unsigned y);

/// sum over d | R (odd support) of mu(d) eta_d / m_d, with m_d the lcm of the
/// periods and eta_d = 1 iff the forbidden classes of d's primes intersect.
mpq_class eta_sum(const LinearRecurrence& rec, unsigned y);
mpq_class eta_sum(const LinearRecurrence& rec, const std::vector<std::uint64_t>& primes);

enum class RangeConvention { upto, dyadic };
const char* to_string(RangeConvention r);

struct OmegaExperiment {
  std::uint64_t N = 0;
  RangeConvention range = RangeConvention::upto;
  double observed = 0.0;
  double prediction = 0.0;
  bool division_sequence = false;
  bool lower_bound = false;        // some cofactor resisted factoring
  std::uint64_t unresolved = 0;
  std::vector<unsigned> omegas;    // per n in range order
};

OmegaExperiment mean_omega_experiment(const LinearRecurrence& rec, std::uint64_t N, RangeConvention range,
                                      const FactorEffort& effort = {}, FactorCache* cache = nullptr,
                                      double offset = 0.0);

struct MomentReport {
  std::uint64_t N = 0, B = 0;
  unsigned k = 1;
  mpq_class empirical;  // (1/B) sum Pi_{1,b}(N)^k
  double predicted = 0.0;
  std::vector<std::pair<std::int64_t, std::uint64_t>> per_b;
  bool partial = false;

  mpq_class recompute() const;
};

struct MomentOptions {
  CensusPolicy policy;
  unsigned threads = 1;
  double max_seconds = 0.0;  // 0 = unlimited
  std::uint64_t cv_d_max = 100000;
};

/// Census of 2^n + b over odd 3 <= b <= B.
MomentReport empirical_moments(std::uint64_t N, std::uint64_t B, unsigned k, const MomentOptions& options = {});

}  // namespace recprimes
