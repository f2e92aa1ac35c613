#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "recprimes/bigseq.hpp"
#include "recprimes/moddyn.hpp"

namespace recprimes {

using Rational = mpq_class;

class NotExponentiallyGrowing : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Prob(gcd(u_n, m) = 1) over one period, divided by phi(m)/m.
Rational delta_mod(const LinearRecurrence& rec, std::uint64_t m);

enum class DeltaStrategy { sieve, inclusion_exclusion };

struct DensityReport {
  unsigned y = 0;
  Int count;           // n in the window with (u_n, R_y) = 1
  Int L;               // window length L_y
  std::uint64_t start = 1;
  Rational phi_ratio;  // phi(R_y)/R_y
  Rational delta;
  double delta_float = 0.0;
  std::vector<std::uint64_t> support;
};

/// Allowed-residue masks, one per distinct period among the support primes.
struct ResidueMask {
  std::uint64_t modulus;
  std::vector<bool> allowed;
};
std::vector<ResidueMask> residue_masks(const PeriodTable& table);

/// Number of n in [start, start + length) allowed by every mask.
Int count_allowed_sieve(const std::vector<ResidueMask>& masks, std::uint64_t start, std::uint64_t length,
                        unsigned threads = 1);

/// Same count by inclusion-exclusion over the forbidden classes; length must
/// be a multiple of every modulus.
Int count_allowed_inclusion_exclusion(const std::vector<ResidueMask>& masks, const Int& length);

DensityReport delta_from_table(const PeriodTable& table, DeltaStrategy strategy = DeltaStrategy::sieve,
                               unsigned threads = 1);
DensityReport delta(const LinearRecurrence& rec, unsigned y, DeltaStrategy strategy = DeltaStrategy::sieve,
                    unsigned threads = 1, const SupportOptions& options = {});

/// delta * log N / log alpha for the dominant root alpha of rec.
double predict_count(const LinearRecurrence& rec, double N, unsigned y, unsigned threads = 1);
double predict_from_constant(double c, double N, double alpha);

/// e^gamma log N / log alpha.
double mersenne_style_prediction(double N, double alpha);

struct KappaResult {
  double value = 0.0;
  std::uint64_t fixed_divisor = 0;  // a prime with omega(p) = p, if any
  std::vector<std::pair<std::uint64_t, std::uint64_t>> omega;  // (p, omega(p)) for p <= y
};

/// prod_{p <= y} (p - omega(p)) / (p - 1) for f given by ascending coefficients.
KappaResult kappa_f(const std::vector<Int>& ascending, std::uint64_t y);

}  // namespace recprimes
