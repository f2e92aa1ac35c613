#include "recprimes/density.hpp"

#include <atomic>
#include <bit>
#include <cmath>
#include <numeric>
#include <thread>
#include <tuple>

namespace recprimes {

namespace {

constexpr double kEulerGamma = 0.57721566490153286060651209;
constexpr std::uint64_t kSegmentWords = 1u << 16;  // 2^22 bits

struct Pattern {
  std::uint64_t modulus;
  std::vector<std::uint64_t> words;  // words[phase]: bit j <-> allowed[(phase + j) % modulus]
  std::uint64_t advance;             // 64 mod modulus
};

Pattern make_pattern(const ResidueMask& mask) {
  Pattern p{mask.modulus, std::vector<std::uint64_t>(mask.modulus, 0), 64 % mask.modulus};
  for (std::uint64_t phase = 0; phase < mask.modulus; ++phase) {
    std::uint64_t w = 0;
    for (unsigned j = 0; j < 64; ++j)
      if (mask.allowed[(phase + j) % mask.modulus]) w |= std::uint64_t{1} << j;
    p.words[phase] = w;
  }
  return p;
}

std::uint64_t count_segment(const std::vector<Pattern>& patterns, std::uint64_t start, std::uint64_t bits,
                            std::vector<std::uint64_t>& buffer) {
  const std::uint64_t words = (bits + 63) / 64;
  buffer.assign(words, ~std::uint64_t{0});
  if (bits % 64) buffer[words - 1] = (std::uint64_t{1} << (bits % 64)) - 1;
  for (const auto& p : patterns) {
    std::uint64_t phase = start % p.modulus;
    for (std::uint64_t w = 0; w < words; ++w) {
      buffer[w] &= p.words[phase];
      phase += p.advance;
      if (phase >= p.modulus) phase -= p.modulus;
    }
  }
  std::uint64_t total = 0;
  for (std::uint64_t w : buffer) total += std::popcount(w);
  return total;
}

struct Crt {
  std::uint64_t residue;
  std::uint64_t modulus;
};

std::int64_t inverse_mod(std::int64_t a, std::int64_t m) {
  std::int64_t g = m, x = 0, x1 = 1, a1 = a % m;
  if (a1 < 0) a1 += m;
  std::int64_t b = a1;
  while (b) {
    const std::int64_t q = g / b;
    std::tie(g, b) = std::make_pair(b, g - q * b);
    std::tie(x, x1) = std::make_pair(x1, x - q * x1);
  }
  x %= m;
  return x < 0 ? x + m : x;
}

void inclusion_exclusion(const std::vector<ResidueMask>& masks, std::size_t idx, Crt state, int sign,
                         const Int& length, Int& total) {
  if (idx == masks.size()) {
    total += sign * (length / Int(state.modulus));
    return;
  }
  inclusion_exclusion(masks, idx + 1, state, sign, length, total);
  const auto& mask = masks[idx];
  const std::uint64_t pi = mask.modulus;
  const std::uint64_t g = std::gcd(state.modulus, pi);
  for (std::uint64_t r = 0; r < pi; ++r) {
    if (mask.allowed[r]) continue;
    if ((r % g) != (state.residue % g)) continue;
    // Solve x = R (mod M), x = r (mod pi).
    const std::uint64_t m_g = state.modulus / g, pi_g = pi / g;
    const auto diff = static_cast<std::int64_t>(r % pi) - static_cast<std::int64_t>(state.residue % pi);
    std::int64_t t = (diff / static_cast<std::int64_t>(g)) % static_cast<std::int64_t>(pi_g);
    if (pi_g > 1) {
      t = static_cast<std::int64_t>(static_cast<__int128>(t < 0 ? t + static_cast<std::int64_t>(pi_g) : t) *
                                    inverse_mod(static_cast<std::int64_t>(m_g % pi_g), static_cast<std::int64_t>(pi_g)) %
                                    static_cast<__int128>(pi_g));
    } else {
      t = 0;
    }
    const std::uint64_t modulus = m_g * pi;
    const auto residue = static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(state.residue) + static_cast<unsigned __int128>(state.modulus) * t) % modulus);
    inclusion_exclusion(masks, idx + 1, Crt{residue, modulus}, -sign, length, total);
  }
}

}  // namespace

Rational delta_mod(const LinearRecurrence& rec, std::uint64_t m) {
  if (m < 2) throw std::invalid_argument("delta_mod needs m >= 2");
  const PeriodRecord pr = period_mod(rec, m);
  auto state = state_mod(rec, pr.preperiod, m);
  std::uint64_t coprime = 0;
  for (std::uint64_t i = 0; i < pr.period; ++i) {
    if (std::gcd(state[0], m) == 1) ++coprime;
    step_state_mod(rec, state, m);
  }
  return Rational(Int(coprime), Int(pr.period)) / Rational(Int(euler_phi(m)), Int(m));
}

std::vector<ResidueMask> residue_masks(const PeriodTable& table) {
  std::vector<ResidueMask> masks;
  for (const auto& group : table.groups) {
    ResidueMask mask{group.m, std::vector<bool>(group.m, true)};
    bool any = false;
    for (const auto& fc : table.classes) {
      if (fc.period != group.m) continue;
      for (std::uint64_t r : fc.residues) {
        mask.allowed[r] = false;
        any = true;
      }
    }
    if (any) masks.push_back(std::move(mask));
  }
  return masks;
}

Int count_allowed_sieve(const std::vector<ResidueMask>& masks, std::uint64_t start, std::uint64_t length,
                        unsigned threads) {
  std::vector<Pattern> patterns;
  for (const auto& m : masks) patterns.push_back(make_pattern(m));
  const std::uint64_t segment_bits = kSegmentWords * 64;
  const std::uint64_t segments = (length + segment_bits - 1) / segment_bits;
  std::atomic<std::uint64_t> next{0};
  threads = std::max(1u, threads);
  std::vector<std::uint64_t> partial(threads, 0);
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        std::vector<std::uint64_t> buffer;
        for (std::uint64_t s; (s = next.fetch_add(1)) < segments;) {
          const std::uint64_t offset = s * segment_bits;
          const std::uint64_t bits = std::min(segment_bits, length - offset);
          partial[t] += count_segment(patterns, start + offset, bits, buffer);
        }
      });
    }
  }
  Int total = 0;
  for (std::uint64_t p : partial) total += Int(p);
  return total;
}

Int count_allowed_inclusion_exclusion(const std::vector<ResidueMask>& masks, const Int& length) {
  for (const auto& m : masks)
    if (!mpz_divisible_ui_p(length.get_mpz_t(), m.modulus))
      throw std::invalid_argument("window length must be a multiple of every modulus");
  Int total = 0;
  inclusion_exclusion(masks, 0, Crt{0, 1}, 1, length, total);
  return total;
}

DensityReport delta_from_table(const PeriodTable& table, DeltaStrategy strategy, unsigned threads) {
  DensityReport out;
  out.y = table.y;
  out.L = table.Ly;
  out.support = table.primes();
  std::uint64_t rho = 1;
  for (const auto& fc : table.classes) rho = std::max(rho, fc.preperiod);
  const auto masks = residue_masks(table);

  if (strategy == DeltaStrategy::sieve) {
    if (!mpz_fits_ulong_p(out.L.get_mpz_t())) throw std::invalid_argument("L_y too large for the sieve window");
    const std::uint64_t L = out.L.get_ui();
    out.start = 1 + L * ((rho - 1 + L - 1) / L);
    out.count = count_allowed_sieve(masks, out.start, L, threads);
  } else {
    if (mpz_fits_ulong_p(out.L.get_mpz_t())) {
      const std::uint64_t L = out.L.get_ui();
      out.start = 1 + L * ((rho - 1 + L - 1) / L);
    }
    out.count = count_allowed_inclusion_exclusion(masks, out.L);
  }

  out.phi_ratio = 1;
  for (std::uint64_t p : out.support) out.phi_ratio *= Rational(Int(p - 1), Int(p));
  out.delta = Rational(out.count) / (Rational(out.L) * out.phi_ratio);
  out.delta.canonicalize();
  out.delta_float = out.delta.get_d();
  return out;
}

DensityReport delta(const LinearRecurrence& rec, unsigned y, DeltaStrategy strategy, unsigned threads,
                    const SupportOptions& options) {
  return delta_from_table(period_support(rec, y, options), strategy, threads);
}

double predict_from_constant(double c, double N, double alpha) {
  if (!(alpha > 1.0)) throw NotExponentiallyGrowing("dominant root must exceed 1");
  return c * std::log(N) / std::log(alpha);
}

double predict_count(const LinearRecurrence& rec, double N, unsigned y, unsigned threads) {
  const CharPoly cp = char_poly(rec);
  if (!(cp.dominant_root - cp.error_bound > 1.0)) throw NotExponentiallyGrowing("dominant root must exceed 1");
  const DensityReport d = delta(rec, y, DeltaStrategy::sieve, threads);
  if (d.count == 0) return 0.0;
  return predict_from_constant(d.delta_float, N, cp.dominant_root);
}

double mersenne_style_prediction(double N, double alpha) {
  if (!(alpha > 1.0)) throw NotExponentiallyGrowing("dominant root must exceed 1");
  return std::exp(kEulerGamma) * std::log(N) / std::log(alpha);
}

KappaResult kappa_f(const std::vector<Int>& ascending, std::uint64_t y) {
  if (y < 2) throw std::invalid_argument("kappa_f needs y >= 2");
  KappaResult out;
  long double product = 1.0L;
  for (std::uint32_t p : small_primes(static_cast<std::uint32_t>(std::min<std::uint64_t>(y, 10'000'000)))) {
    std::vector<std::uint64_t> c;
    for (const auto& a : ascending) c.push_back(mpz_fdiv_ui(a.get_mpz_t(), p));
    std::uint64_t roots = 0;
    for (std::uint64_t n = 0; n < p; ++n) {
      std::uint64_t acc = 0;
      for (std::size_t i = c.size(); i-- > 0;) acc = (acc * n + c[i]) % p;
      if (acc == 0) ++roots;
    }
    out.omega.emplace_back(p, roots);
    if (roots == p) {
      out.value = 0.0;
      out.fixed_divisor = p;
      return out;
    }
    product *= static_cast<long double>(p - roots) / static_cast<long double>(p - 1);
  }
  out.value = static_cast<double>(product);
  return out;
}

}  // namespace recprimes
