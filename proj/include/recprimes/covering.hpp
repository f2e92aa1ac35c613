#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "recprimes/bigseq.hpp"

namespace recprimes {

struct Congruence {
  std::uint64_t residue = 0;
  std::uint64_t modulus = 1;
  std::uint64_t prime = 0;  // 0 when the class carries no prime

  bool operator==(const Congruence&) const = default;
};

struct CoveringSystem {
  std::vector<Congruence> congruences;
  std::string note;

  /// lcm of the moduli.
  std::uint64_t window() const;
  std::vector<std::uint64_t> primes() const;
};

struct CoverageResult {
  bool covers = false;
  std::optional<std::uint64_t> first_uncovered;
};

/// Exact membership scan over [0, window).
CoverageResult verify_covers(const CoveringSystem& sys);

struct SequenceCoveringResult {
  bool covers = false;
  std::optional<std::uint64_t> first_uncovered;
  bool divisibility = false;
  std::optional<Congruence> failing;        // first class whose prime does not divide
  std::optional<std::uint64_t> failing_index;
  std::uint64_t window = 0;                 // lcm of moduli and periods

  bool verified() const { return covers && divisibility; }
};

/// Coverage plus: p | u_n for every n = n_p (mod m_p) across a window of
/// length lcm(all m_p, all periods mod p) * multiplier.
SequenceCoveringResult verify_sequence_covering(const LinearRecurrence& rec, const CoveringSystem& sys,
                                                unsigned window_multiplier = 1);

/// One congruence per forbidden class of each prime.
CoveringSystem system_from_primes(const LinearRecurrence& rec, const std::vector<std::uint64_t>& primes);

/// JSON `{congruences:[{residue, modulus, prime}], note}`. Entries that give
/// only a prime are expanded from the forbidden classes of `rec`.
CoveringSystem covering_from_json(const std::string& text, const LinearRecurrence* rec = nullptr);
CoveringSystem load_covering(const std::string& path, const LinearRecurrence* rec = nullptr);
std::string covering_to_json(const CoveringSystem& sys);

struct ErdosResult {
  Int modulus;  // 2^64 - 1
  Int r;
  Int a, b;
  CoveringSystem system;
  bool verified = false;
  std::optional<std::uint64_t> failing_index;
};

/// r = 1 mod 3*5*17*257*65537*641, r = -1 mod 6700417; b = a*r (r^2 = 1), and
/// gcd(a 2^n + b, 2^64 - 1) > 1 checked for 0 <= n < 64.
ErdosResult erdos_construction(const std::optional<Int>& a = std::nullopt);
bool erdos_verify(const Int& a, const Int& b, std::optional<std::uint64_t>* failing = nullptr);

struct BrierResult {
  bool plus = false;   // 2^n + k
  bool minus = false;  // 2^n - k
  std::uint64_t window_plus = 0, window_minus = 0;
};

Int brier_k();
BrierResult brier_check(const Int& k = brier_k());

/// gcd(u_n, prod primes) > 1 for all n in one joint period window past the preperiods.
bool gcd_covering(const LinearRecurrence& rec, const std::vector<std::uint64_t>& primes,
                  std::optional<std::uint64_t>* failing = nullptr);

}  // namespace recprimes
