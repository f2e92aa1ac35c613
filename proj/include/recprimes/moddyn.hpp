#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "recprimes/arith.hpp"
#include "recprimes/bigseq.hpp"

namespace recprimes {

class NotInvertible : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class IncompleteSupport : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PeriodRecord {
  std::uint64_t modulus = 0;
  std::uint64_t preperiod = 0;
  std::uint64_t period = 0;
};

/// Least t >= 1 with g^t = 1 (mod m), found by descending from lambda(m).
std::uint64_t multiplicative_order(const Int& g, std::uint64_t m);

/// u_n mod m for m < 2^63, by powering T^n modulo the characteristic polynomial.
std::uint64_t eval_mod(const LinearRecurrence& rec, std::uint64_t n, std::uint64_t m);

/// State (u_n, ..., u_{n+k-1}) mod m.
std::vector<std::uint64_t> state_mod(const LinearRecurrence& rec, std::uint64_t n, std::uint64_t m);
void step_state_mod(const LinearRecurrence& rec, std::vector<std::uint64_t>& state, std::uint64_t m);

/// Exact (preperiod, period) of the state orbit mod m (Brent cycle detection).
PeriodRecord period_mod(const LinearRecurrence& rec, std::uint64_t m);

/// As period_mod, but gives up (nullopt) after `max_steps` orbit steps.
std::optional<PeriodRecord> period_mod_bounded(const LinearRecurrence& rec, std::uint64_t m,
                                               std::uint64_t max_steps);

struct ForbiddenClasses {
  std::uint64_t prime = 0;
  std::uint64_t preperiod = 0;
  std::uint64_t period = 0;
  std::vector<std::uint64_t> residues;                        // S_p, ascending
  std::vector<std::pair<std::uint64_t, bool>> exceptions;     // n < preperiod

  /// p | u_n, using the exceptions below the preperiod.
  bool divides(std::uint64_t n) const;
};

ForbiddenClasses forbidden_classes(const LinearRecurrence& rec, std::uint64_t p);
ForbiddenClasses forbidden_classes(const LinearRecurrence& rec, std::uint64_t p, const PeriodRecord& record);

struct PeriodGroup {
  std::uint64_t m;
  std::vector<std::uint64_t> primes;
};

struct PeriodTable {
  unsigned y = 0;
  Int Ly;
  std::vector<PeriodGroup> groups;           // ascending m, nonempty groups only
  std::vector<ForbiddenClasses> classes;     // every support prime, ascending

  std::vector<std::uint64_t> primes() const;
  std::string to_json() const;
};

struct SupportOptions {
  std::uint64_t fallback_prime_bound = 1000000;
  FactorEffort effort;
  FactorCache* cache = nullptr;
};

/// All primes whose exact period is at most y.
PeriodTable period_support(const LinearRecurrence& rec, unsigned y, const SupportOptions& options = {});

/// lcm(1, ..., y).
Int lcm_upto(unsigned y);

}  // namespace recprimes
