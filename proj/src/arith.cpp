#include "recprimes/arith.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

namespace recprimes {

const char* to_string(VerdictKind kind) {
  switch (kind) {
    case VerdictKind::composite: return "composite";
    case VerdictKind::probable_prime: return "probable_prime";
    case VerdictKind::proven_prime: return "proven_prime";
  }
  return "?";
}

std::uint64_t mulmod64(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

std::uint64_t powmod64(std::uint64_t a, std::uint64_t e, std::uint64_t m) {
  std::uint64_t r = 1 % m;
  a %= m;
  while (e) {
    if (e & 1) r = mulmod64(r, a, m);
    a = mulmod64(a, a, m);
    e >>= 1;
  }
  return r;
}

std::uint64_t lcm_u64(std::uint64_t a, std::uint64_t b) {
  if (a == 0 || b == 0) return 0;
  return a / std::gcd(a, b) * b;
}

namespace {

constexpr std::uint32_t kSieveLimit = 10'000'000;

const std::vector<std::uint32_t>& sieve_table() {
  static const std::vector<std::uint32_t> primes = [] {
    std::vector<bool> composite(kSieveLimit + 1, false);
    std::vector<std::uint32_t> out;
    out.reserve(665000);
    for (std::uint32_t i = 2; i <= kSieveLimit; ++i) {
      if (composite[i]) continue;
      out.push_back(i);
      for (std::uint64_t j = std::uint64_t{i} * i; j <= kSieveLimit; j += i) composite[j] = true;
    }
    return out;
  }();
  return primes;
}

bool strong_test_u64(std::uint64_t n, std::uint64_t a) {
  std::uint64_t d = n - 1;
  unsigned s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  std::uint64_t x = powmod64(a, d, n);
  if (x == 1 || x == n - 1) return true;
  for (unsigned i = 1; i < s; ++i) {
    x = mulmod64(x, x, n);
    if (x == n - 1) return true;
  }
  return false;
}

bool strong_test(const Int& n, const Int& base) {
  Int d = n - 1;
  const mp_bitcnt_t s = mpz_scan1(d.get_mpz_t(), 0);
  mpz_tdiv_q_2exp(d.get_mpz_t(), d.get_mpz_t(), s);
  const Int nm1 = n - 1;
  Int x;
  mpz_powm(x.get_mpz_t(), base.get_mpz_t(), d.get_mpz_t(), n.get_mpz_t());
  if (x == 1 || x == nm1) return true;
  for (mp_bitcnt_t i = 1; i < s; ++i) {
    mpz_powm_ui(x.get_mpz_t(), x.get_mpz_t(), 2, n.get_mpz_t());
    if (x == nm1) return true;
    if (x == 1) return false;
  }
  return false;
}

std::uint64_t rho_u64(std::uint64_t n, std::uint64_t seed) {
  if (n % 2 == 0) return 2;
  std::mt19937_64 rng(seed ^ n);
  for (;;) {
    const std::uint64_t c = rng() % (n - 1) + 1;
    std::uint64_t y = rng() % n, x = y, ys = y, q = 1, g = 1;
    const auto f = [&](std::uint64_t v) {
      const std::uint64_t s = mulmod64(v, v, n);
      return s >= n - c ? s - (n - c) : s + c;
    };
    for (std::uint64_t r = 1; g == 1; r <<= 1) {
      x = y;
      for (std::uint64_t i = 0; i < r; ++i) y = f(y);
      for (std::uint64_t k = 0; k < r && g == 1; k += 128) {
        ys = y;
        for (std::uint64_t i = 0; i < std::min<std::uint64_t>(128, r - k); ++i) {
          y = f(y);
          q = mulmod64(q, x > y ? x - y : y - x, n);
        }
        g = std::gcd(q, n);
      }
    }
    if (g == n) {
      do {
        ys = f(ys);
        g = std::gcd(x > ys ? x - ys : ys - x, n);
      } while (g == 1);
    }
    if (g != n) return g;
  }
}

void factor_u64_into(std::uint64_t n, std::map<std::uint64_t, unsigned>& out) {
  if (n == 1) return;
  if (is_prime_u64(n)) {
    ++out[n];
    return;
  }
  const std::uint64_t d = rho_u64(n, 0x1234567ULL);
  factor_u64_into(d, out);
  factor_u64_into(n / d, out);
}

// Pollard-Brent over GMP integers; returns 0 when the budget runs out.
Int rho_big(const Int& n, std::uint64_t budget, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uint64_t spent = 0;
  Int x, y, ys, q, g, diff, c;
  while (spent < budget) {
    c = Int(rng() | 1);
    y = Int(rng()) % n;
    q = 1;
    g = 1;
    const auto step = [&](Int& v) {
      mpz_mul(v.get_mpz_t(), v.get_mpz_t(), v.get_mpz_t());
      mpz_add(v.get_mpz_t(), v.get_mpz_t(), c.get_mpz_t());
      mpz_mod(v.get_mpz_t(), v.get_mpz_t(), n.get_mpz_t());
    };
    for (std::uint64_t r = 1; g == 1 && spent < budget; r <<= 1) {
      x = y;
      for (std::uint64_t i = 0; i < r; ++i) step(y);
      spent += r;
      for (std::uint64_t k = 0; k < r && g == 1; k += 128) {
        ys = y;
        const std::uint64_t m = std::min<std::uint64_t>(128, r - k);
        for (std::uint64_t i = 0; i < m; ++i) {
          step(y);
          mpz_sub(diff.get_mpz_t(), x.get_mpz_t(), y.get_mpz_t());
          mpz_mul(q.get_mpz_t(), q.get_mpz_t(), diff.get_mpz_t());
          mpz_mod(q.get_mpz_t(), q.get_mpz_t(), n.get_mpz_t());
        }
        spent += m;
        mpz_gcd(g.get_mpz_t(), q.get_mpz_t(), n.get_mpz_t());
      }
    }
    if (g == n) {
      do {
        step(ys);
        mpz_sub(diff.get_mpz_t(), x.get_mpz_t(), ys.get_mpz_t());
        mpz_gcd(g.get_mpz_t(), diff.get_mpz_t(), n.get_mpz_t());
      } while (g == 1);
    }
    if (g != 1 && g != n) return g;
  }
  return 0;
}

}  // namespace

std::span<const std::uint32_t> small_primes(std::uint32_t limit) {
  if (limit > kSieveLimit) throw std::invalid_argument("small_primes limit above 10^7");
  const auto& all = sieve_table();
  const auto end = std::upper_bound(all.begin(), all.end(), limit);
  return {all.data(), static_cast<std::size_t>(end - all.begin())};
}

bool is_prime_u64(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t p : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
    if (n % p == 0) return n == p;
  }
  for (std::uint64_t a : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
    if (!strong_test_u64(n, a)) return false;
  }
  return true;
}

Verdict is_probable_prime(const Int& n, const PrpPolicy& policy) {
  Verdict v;
  if (n < 2) {
    v.evidence = 0;
    v.method = "unit";
    return v;
  }
  if (mpz_fits_ulong_p(n.get_mpz_t())) {
    const std::uint64_t m = n.get_ui();
    if (is_prime_u64(m)) {
      v.kind = VerdictKind::proven_prime;
      v.rounds = 12;
      v.method = "deterministic-64";
    } else {
      v.evidence = factor_u64(m).front().first;
      v.method = "factor";
    }
    return v;
  }
  for (std::uint32_t p : small_primes(1000)) {
    if (mpz_divisible_ui_p(n.get_mpz_t(), p)) {
      v.evidence = p;
      v.method = "trial";
      return v;
    }
  }
  v.rounds = 1;
  if (!strong_test(n, 2)) {
    v.evidence = 2;
    v.method = "sprp-witness";
    return v;
  }
  const Int low = n & Int("18446744073709551615");
  std::seed_seq seq{static_cast<std::uint32_t>(policy.seed), static_cast<std::uint32_t>(policy.seed >> 32),
                    static_cast<std::uint32_t>(low.get_ui()),
                    static_cast<std::uint32_t>(mpz_sizeinbase(n.get_mpz_t(), 2))};
  std::mt19937_64 rng(seq);
  const Int span = n - 4;
  const std::size_t words = mpz_sizeinbase(n.get_mpz_t(), 2) / 64 + 1;
  for (unsigned i = 0; i < policy.rounds; ++i) {
    Int base = 0;
    for (std::size_t w = 0; w < words; ++w) {
      base <<= 64;
      base += Int(std::to_string(rng()));
    }
    base = base % span + 3;
    ++v.rounds;
    if (!strong_test(n, base)) {
      v.evidence = base;
      v.method = "sprp-witness";
      return v;
    }
  }
  v.kind = VerdictKind::probable_prime;
  v.method = "sprp-2+" + std::to_string(policy.rounds);
  return v;
}

std::optional<TrialFactor> trial_division(const Int& n, const TrialConfig& config) {
  if (n <= 1) throw DomainError("trial_division needs n > 1");
  if (config.plain_bound) {
    const auto bound = static_cast<std::uint32_t>(std::min<std::uint64_t>(config.plain_bound, kSieveLimit));
    for (std::uint32_t p : small_primes(bound)) {
      if (n <= p) break;
      if (mpz_divisible_ui_p(n.get_mpz_t(), p)) return TrialFactor{p, 0};
    }
  }
  if (config.form_modulus) {
    for (std::uint64_t k = 1; k <= config.k_bound; ++k) {
      const unsigned __int128 wide = static_cast<unsigned __int128>(k) * config.form_modulus + 1;
      if (wide >> 63) break;
      const auto q = static_cast<std::uint64_t>(wide);
      if (n <= q) break;
      if (config.mod8_filter && q % 8 != 1 && q % 8 != 7) continue;
      if (!is_prime_u64(q)) continue;
      if (mpz_divisible_ui_p(n.get_mpz_t(), q)) return TrialFactor{q, k};
    }
  }
  return std::nullopt;
}

Int FactorizationResult::product() const {
  Int out = 1;
  for (const auto& [p, e] : factors) {
    Int pe;
    mpz_pow_ui(pe.get_mpz_t(), p.get_mpz_t(), e);
    out *= pe;
  }
  if (cofactor) out *= *cofactor;
  return sign < 0 ? Int(-out) : out;
}

std::vector<std::pair<std::uint64_t, unsigned>> factor_u64(std::uint64_t n) {
  if (n == 0) throw DomainError("cannot factor 0");
  std::map<std::uint64_t, unsigned> acc;
  for (std::uint64_t p : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47}) {
    while (n % p == 0) {
      ++acc[p];
      n /= p;
    }
  }
  factor_u64_into(n, acc);
  return {acc.begin(), acc.end()};
}

FactorizationResult factorize(const Int& n, const FactorEffort& effort) {
  if (n == 0) throw DomainError("cannot factor 0");
  FactorizationResult out;
  out.sign = n < 0 ? -1 : 1;
  Int m = abs(n);
  std::map<Int, unsigned> acc;

  if (mpz_fits_ulong_p(m.get_mpz_t())) {
    for (const auto& [p, e] : factor_u64(m.get_ui())) acc[Int(std::to_string(p))] += e;
    out.factors.assign(acc.begin(), acc.end());
    return out;
  }

  for (std::uint32_t p : small_primes(std::min<std::uint32_t>(effort.trial_bound, kSieveLimit))) {
    if (std::uint64_t{p} * p > m) break;
    if (mpz_divisible_ui_p(m.get_mpz_t(), p)) {
      unsigned e = 0;
      while (mpz_divisible_ui_p(m.get_mpz_t(), p)) {
        mpz_divexact_ui(m.get_mpz_t(), m.get_mpz_t(), p);
        ++e;
      }
      acc[Int(p)] += e;
    }
  }

  std::vector<std::pair<Int, unsigned>> work;
  if (m > 1) work.emplace_back(m, 1);
  Int stubborn = 1;
  std::uint64_t seed = effort.seed;
  while (!work.empty()) {
    auto [c, mult] = work.back();
    work.pop_back();
    if (c == 1) continue;
    if (mpz_fits_ulong_p(c.get_mpz_t())) {
      for (const auto& [p, e] : factor_u64(c.get_ui())) acc[Int(std::to_string(p))] += e * mult;
      continue;
    }
    if (is_probable_prime(c).is_prime()) {
      acc[c] += mult;
      continue;
    }
    if (mpz_perfect_power_p(c.get_mpz_t())) {
      bool split = false;
      for (unsigned long k = mpz_sizeinbase(c.get_mpz_t(), 2); k >= 2 && !split; --k) {
        Int root;
        if (mpz_root(root.get_mpz_t(), c.get_mpz_t(), k)) {
          work.emplace_back(root, mult * k);
          split = true;
        }
      }
      if (split) continue;
    }
    const Int d = rho_big(c, effort.rho_iterations, seed++);
    if (d == 0) {
      Int pe;
      mpz_pow_ui(pe.get_mpz_t(), c.get_mpz_t(), mult);
      stubborn *= pe;
      continue;
    }
    work.emplace_back(d, mult);
    work.emplace_back(Int(c / d), mult);
  }
  out.factors.assign(acc.begin(), acc.end());
  if (stubborn != 1) out.cofactor = stubborn;
  return out;
}

int moebius(std::uint64_t n) {
  if (n == 0) throw DomainError("moebius needs n >= 1");
  int mu = 1;
  for (const auto& [p, e] : factor_u64(n)) {
    if (e > 1) return 0;
    mu = -mu;
  }
  return mu;
}

std::uint64_t euler_phi(std::uint64_t n) {
  if (n == 0) throw DomainError("euler_phi needs n >= 1");
  std::uint64_t out = n;
  for (const auto& [p, e] : factor_u64(n)) out = out / p * (p - 1);
  return out;
}

std::uint64_t phi2(std::uint64_t n) {
  if (n == 0 || n % 2 == 0) throw DomainError("phi2 needs odd n");
  std::uint64_t out = 1;
  for (const auto& [p, e] : factor_u64(n)) {
    if (e > 1) throw DomainError("phi2 needs squarefree n");
    out *= p - 2;
  }
  return out;
}

std::uint64_t tau(std::uint64_t n) {
  if (n == 0) throw DomainError("tau needs n >= 1");
  std::uint64_t out = 1;
  for (const auto& [p, e] : factor_u64(n)) out *= e + 1;
  return out;
}

std::vector<std::uint64_t> divisors(std::uint64_t n) {
  std::vector<std::uint64_t> out{1};
  for (const auto& [p, e] : factor_u64(n)) {
    const std::size_t base = out.size();
    std::uint64_t pk = 1;
    for (unsigned i = 0; i < e; ++i) {
      pk *= p;
      for (std::size_t j = 0; j < base; ++j) out.push_back(out[j] * pk);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

unsigned omega_big(const FactorizationResult& f) {
  unsigned total = f.cofactor ? 2 : 0;
  for (const auto& [p, e] : f.factors) total += e;
  return total;
}

unsigned omega_p(const FactorizationResult& f, const Int& p) {
  unsigned total = (f.cofactor && *f.cofactor >= p) ? 2 : 0;
  for (const auto& [q, e] : f.factors)
    if (q >= p) total += e;
  return total;
}

FactorCache::FactorCache(std::string path) : path_(std::move(path)) {
  std::ifstream in(path_);
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream fields(line);
    std::string token;
    if (!(fields >> token)) continue;
    const Int n(token);
    FactorizationResult r;
    r.sign = n < 0 ? -1 : 1;
    std::map<Int, unsigned> acc;
    while (fields >> token) ++acc[Int(token)];
    r.factors.assign(acc.begin(), acc.end());
    if (r.product() == n) table_.emplace(n, std::move(r));
  }
}

FactorizationResult FactorCache::get(const Int& n, const FactorEffort& effort) {
  {
    std::lock_guard lock(mutex_);
    if (auto it = table_.find(n); it != table_.end()) return it->second;
  }
  FactorizationResult r = factorize(n, effort);
  std::lock_guard lock(mutex_);
  return table_.emplace(n, std::move(r)).first->second;
}

void FactorCache::save() const {
  if (path_.empty()) return;
  std::lock_guard lock(mutex_);
  std::ofstream out(path_, std::ios::trunc);
  for (const auto& [n, r] : table_) {
    if (!r.complete()) continue;
    out << n.get_str();
    for (const auto& [p, e] : r.factors)
      for (unsigned i = 0; i < e; ++i) out << ' ' << p.get_str();
    out << '\n';
  }
}

std::size_t FactorCache::size() const {
  std::lock_guard lock(mutex_);
  return table_.size();
}

}  // namespace recprimes
