#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

namespace recprimes {

using Int = mpz_class;

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

enum class VerdictKind { composite, probable_prime, proven_prime };

const char* to_string(VerdictKind kind);

struct Verdict {
  VerdictKind kind = VerdictKind::composite;
  // Composite: a nontrivial factor or a strong-test witness (0 for n < 2).
  Int evidence;
  unsigned rounds = 0;  // strong-test rounds actually run
  std::string method;

  bool is_prime() const { return kind != VerdictKind::composite; }
};

struct PrpPolicy {
  unsigned rounds = 24;  // random-base rounds after the base-2 test, above 2^64
  std::uint64_t seed = 0x9e3779b97f4a7c15ULL;
};

/// Miller-Rabin. Deterministic below 2^64; above that a base-2 strong test
/// followed by `rounds` bases drawn from a generator seeded by (seed, n).
Verdict is_probable_prime(const Int& n, const PrpPolicy& policy = {});

bool is_prime_u64(std::uint64_t n);

/// Primes up to `limit` (at most 10^7), a view into a shared sieve built once.
std::span<const std::uint32_t> small_primes(std::uint32_t limit);

struct TrialConfig {
  std::uint64_t plain_bound = 0;     // try all primes up to this bound
  std::uint64_t form_modulus = 0;    // if nonzero, also try q = k*form_modulus + 1
  std::uint64_t k_bound = 0;
  bool mod8_filter = false;          // restrict form candidates to q = +-1 mod 8
};

struct TrialFactor {
  std::uint64_t factor;
  std::uint64_t k;  // 0 for the plain stage
};

/// Returns the first factor q < n found, or nothing.
std::optional<TrialFactor> trial_division(const Int& n, const TrialConfig& config);

struct FactorEffort {
  std::uint32_t trial_bound = 1000000;
  std::uint64_t rho_iterations = 1ULL << 26;
  std::uint64_t seed = 1;
};

struct FactorizationResult {
  int sign = 1;
  std::vector<std::pair<Int, unsigned>> factors;  // ascending primes with multiplicity
  std::optional<Int> cofactor;                    // composite part that resisted

  bool complete() const { return !cofactor; }
  Int product() const;
};

FactorizationResult factorize(const Int& n, const FactorEffort& effort = {});

/// Full factorization of a machine word, ascending.
std::vector<std::pair<std::uint64_t, unsigned>> factor_u64(std::uint64_t n);

int moebius(std::uint64_t n);
std::uint64_t euler_phi(std::uint64_t n);
std::uint64_t phi2(std::uint64_t n);  // odd squarefree n only
std::uint64_t tau(std::uint64_t n);
std::vector<std::uint64_t> divisors(std::uint64_t n);

/// Omega counts multiplicity. An unresolved cofactor contributes 2, which is
/// only a lower bound; callers check complete().
unsigned omega_big(const FactorizationResult& f);
unsigned omega_p(const FactorizationResult& f, const Int& p);

std::uint64_t mulmod64(std::uint64_t a, std::uint64_t b, std::uint64_t m);
std::uint64_t powmod64(std::uint64_t a, std::uint64_t e, std::uint64_t m);
std::uint64_t lcm_u64(std::uint64_t a, std::uint64_t b);

/// Thread-safe get-or-compute map of factorizations with a plain-text backing
/// file (`n f1 f2 ...`, primes repeated by multiplicity, complete entries only).
class FactorCache {
 public:
  FactorCache() = default;
  explicit FactorCache(std::string path);

  FactorizationResult get(const Int& n, const FactorEffort& effort = {});
  void save() const;
  std::size_t size() const;

 private:
  std::string path_;
  mutable std::mutex mutex_;
  std::map<Int, FactorizationResult> table_;
};

}  // namespace recprimes
