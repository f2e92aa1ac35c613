#include "recprimes/heuristics.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <map>
#include <numeric>
#include <thread>

#include "recprimes/moddyn.hpp"

namespace recprimes {

namespace {

mpf_class mpf(double v = 0.0) { return mpf_class(v, kConstantPrecision); }

struct Crt {
  std::uint64_t residue;
  std::uint64_t modulus;
};

std::optional<Crt> crt_merge(const Crt& a, std::uint64_t r, std::uint64_t m) {
  // Small moduli only (lcm of periods); brute force over the coarser lattice.
  const std::uint64_t g = std::gcd(a.modulus, m);
  if (a.residue % g != r % g) return std::nullopt;
  const std::uint64_t l = a.modulus / g * m;
  for (std::uint64_t x = a.residue; x < l; x += a.modulus)
    if (x % m == r % m) return Crt{x, l};
  return std::nullopt;
}

double g_value(long double k, long double tau) {
  if (tau <= 0) return static_cast<double>(-(k - 1));
  return static_cast<double>(tau * (1 + std::log(k) - std::log(tau)) - (k - 1));
}

// Safeguarded Newton on [lo, hi] where g(lo) and g(hi) differ in sign.
long double bracketed_newton(long double k, long double lo, long double hi) {
  const auto g = [k](long double t) {
    return t <= 0 ? -(k - 1) : t * (1 + std::log(k) - std::log(t)) - (k - 1);
  };
  long double glo = g(lo);
  long double x = (lo + hi) / 2;
  for (int it = 0; it < 200; ++it) {
    const long double gx = g(x);
    if (std::fabs(gx) < 1e-15L) break;
    if ((gx < 0) == (glo < 0)) {
      lo = x;
      glo = gx;
    } else {
      hi = x;
    }
    const long double d = std::log(k) - std::log(x);
    long double next = d != 0 ? x - gx / d : (lo + hi) / 2;
    if (!(next > lo && next < hi)) next = (lo + hi) / 2;
    if (std::fabs(next - x) < 1e-18L * std::max<long double>(1, x)) {
      x = next;
      break;
    }
    x = next;
  }
  return x;
}

void enumerate_subsets(const std::vector<std::uint64_t>& periods, std::size_t idx, std::uint64_t lcm, int sign,
                       mpq_class& total) {
  if (idx == periods.size()) {
    total += mpq_class(sign, lcm);
    return;
  }
  enumerate_subsets(periods, idx + 1, lcm, sign, total);
  enumerate_subsets(periods, idx + 1, lcm_u64(lcm, periods[idx]), -sign, total);
}

void eta_walk(const std::vector<ForbiddenClasses>& classes, std::size_t idx, const std::vector<Crt>& states,
              std::uint64_t lcm, int sign, mpq_class& total) {
  if (idx == classes.size()) {
    if (!states.empty()) total += mpq_class(sign, lcm);
    return;
  }
  eta_walk(classes, idx + 1, states, lcm, sign, total);
  const auto& fc = classes[idx];
  std::vector<Crt> next;
  for (const auto& s : states)
    for (std::uint64_t r : fc.residues)
      if (auto m = crt_merge(s, r, fc.period)) next.push_back(*m);
  // Deduplicate: only the solution set matters.
  std::sort(next.begin(), next.end(), [](const Crt& a, const Crt& b) {
    return std::tie(a.modulus, a.residue) < std::tie(b.modulus, b.residue);
  });
  next.erase(std::unique(next.begin(), next.end(),
                         [](const Crt& a, const Crt& b) { return a.modulus == b.modulus && a.residue == b.residue; }),
             next.end());
  eta_walk(classes, idx + 1, next, lcm_u64(lcm, fc.period), -sign, total);
}

std::vector<std::uint64_t> odd_support(const LinearRecurrence& rec, unsigned y) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t p : period_support(rec, y).primes())
    if (p != 2) out.push_back(p);
  return out;
}

}  // namespace

const char* to_string(Direction d) {
  switch (d) {
    case Direction::increasing: return "increasing";
    case Direction::decreasing: return "decreasing";
    case Direction::oscillating: return "oscillating";
  }
  return "?";
}

const char* to_string(RangeConvention r) { return r == RangeConvention::upto ? "upto" : "dyadic"; }

std::string ConstantEstimate::digits(int count) const {
  char buf[256];
  gmp_snprintf(buf, sizeof buf, "%.*Ff", count, value.get_mpf_t());
  return buf;
}

ConstantEstimate twin_constant(std::uint64_t p_max) {
  if (p_max < 3) throw std::invalid_argument("twin_constant needs p_max >= 3");
  ConstantEstimate out;
  out.truncation = "p_max";
  out.parameter = p_max;
  out.direction = Direction::decreasing;
  mpf_class acc = mpf(2.0), num = mpf(), den = mpf();
  for (std::uint32_t p : small_primes(static_cast<std::uint32_t>(p_max))) {
    if (p < 3) continue;
    num = mpf_class(static_cast<double>(p), kConstantPrecision) * (p - 2);
    den = mpf_class(static_cast<double>(p - 1), kConstantPrecision) * (p - 1);
    acc *= num;
    acc /= den;
  }
  out.value = acc;
  return out;
}

ConstantEstimate cv_lower_bound(std::uint64_t p_max) {
  if (p_max < 2) throw std::invalid_argument("cv_lower_bound needs p_max >= 2");
  ConstantEstimate out;
  out.truncation = "p_max";
  out.parameter = p_max;
  out.direction = Direction::increasing;
  mpf_class acc = mpf(1.0), cube = mpf();
  for (std::uint32_t p : small_primes(static_cast<std::uint32_t>(p_max))) {
    cube = mpf(static_cast<double>(p - 1));
    cube = cube * cube * cube;
    acc *= (cube + 1) / cube;
  }
  out.value = acc;
  return out;
}

ConstantEstimate cv_constant(std::uint64_t d_max, std::uint64_t c2_p_max) {
  if (d_max < 1) throw std::invalid_argument("cv_constant needs d_max >= 1");
  ConstantEstimate out;
  out.truncation = "d_max";
  out.parameter = d_max;
  out.direction = Direction::increasing;
  mpq_class sum = 0;
  for (std::uint64_t d = 1; d <= d_max; d += 2) {
    if (moebius(d) == 0) continue;
    sum += mpq_class(1, 1) / (mpq_class(Int(phi2(d))) * mpq_class(Int(multiplicative_order(2, d))));
  }
  out.value = twin_constant(c2_p_max).value * mpf_class(sum, kConstantPrecision);
  return out;
}

ConstantEstimate ck_constant(unsigned k, std::uint64_t p_max) {
  if (k < 1) throw std::invalid_argument("ck_constant needs k >= 1");
  ConstantEstimate out;
  out.truncation = "p_max";
  out.parameter = p_max;
  out.direction = Direction::oscillating;
  mpf_class acc = mpf(1.0);
  mpf_mul_2exp(acc.get_mpf_t(), acc.get_mpf_t(), k - 1);
  if (p_max >= 3) {
    for (std::uint32_t p : small_primes(static_cast<std::uint32_t>(p_max))) {
      if (p < 3) continue;
      const std::uint64_t kp = std::min<std::uint64_t>(k, multiplicative_order(2, p));
      mpf_class num = mpf(static_cast<double>(p - kp)) / p;
      mpf_class base = mpf(static_cast<double>(p - 1)) / p, den = mpf(1.0);
      for (unsigned i = 0; i < k; ++i) den *= base;
      acc *= num / den;
    }
  }
  out.value = acc;
  return out;
}

double beta_gamma_residual(unsigned k, double tau) { return std::fabs(g_value(k, tau)); }

std::pair<double, double> beta_gamma(unsigned k) {
  if (k < 1) throw std::invalid_argument("beta_gamma needs k >= 1");
  if (k == 1) return {0.0, std::exp(1.0)};
  const long double kk = k;
  const long double beta = bracketed_newton(kk, 0.0L, kk);
  const long double gamma = bracketed_newton(kk, kk, kk * std::exp(2.0L));
  return {static_cast<double>(beta), static_cast<double>(gamma)};
}

SieveIdentity sieve_identity_check(unsigned y) {
  if (y < 2) throw std::invalid_argument("sieve_identity_check needs y >= 2");
  SieveIdentity out;
  out.support = odd_support(make_geometric_shift(1, -1), y);
  std::vector<std::uint64_t> orders;
  for (std::uint64_t p : out.support) orders.push_back(multiplicative_order(2, p));
  out.lhs = 0;
  enumerate_subsets(orders, 0, 1, 1, out.lhs);
  out.lhs.canonicalize();
  out.rhs = 1;
  for (std::uint32_t p : small_primes(y)) out.rhs *= mpq_class(p - 1, p);
  out.rhs.canonicalize();
  return out;
}

mpq_class eta_sum(const LinearRecurrence& rec, const std::vector<std::uint64_t>& primes) {
  std::vector<ForbiddenClasses> classes;
  for (std::uint64_t p : primes) classes.push_back(forbidden_classes(rec, p));
  mpq_class total = 0;
  eta_walk(classes, 0, {Crt{0, 1}}, 1, 1, total);
  total.canonicalize();
  return total;
}

mpq_class eta_sum(const LinearRecurrence& rec, unsigned y) { return eta_sum(rec, odd_support(rec, y)); }

OmegaExperiment mean_omega_experiment(const LinearRecurrence& rec, std::uint64_t N, RangeConvention range,
                                      const FactorEffort& effort, FactorCache* cache, double offset) {
  if (N < 1) throw std::invalid_argument("mean_omega_experiment needs N >= 1");
  OmegaExperiment out;
  out.N = N;
  out.range = range;
  out.division_sequence = is_division_sequence(rec);
  const std::uint64_t lo = range == RangeConvention::upto ? 1 : N + 1;
  const std::uint64_t hi = range == RangeConvention::upto ? N : 2 * N;

  std::map<std::uint64_t, std::pair<unsigned, bool>> phi_omega;
  const auto omega_of = [&](const Int& v) -> std::pair<unsigned, bool> {
    const Int a = abs(v);
    if (a <= 1) return {0, true};
    const FactorizationResult f = cache ? cache->get(a, effort) : factorize(a, effort);
    return {omega_big(f), f.complete()};
  };

  double total = 0.0;
  for (std::uint64_t n = lo; n <= hi; ++n) {
    unsigned omega = 0;
    bool complete = true;
    if (out.division_sequence) {
      for (std::uint64_t d : divisors(n)) {
        auto it = phi_omega.find(d);
        if (it == phi_omega.end()) it = phi_omega.emplace(d, omega_of(phi_decomposition(rec, d))).first;
        omega += it->second.first;
        complete = complete && it->second.second;
      }
    } else {
      std::tie(omega, complete) = omega_of(eval(rec, n));
    }
    if (!complete) {
      out.lower_bound = true;
      ++out.unresolved;
    }
    out.omegas.push_back(omega);
    total += omega;
  }
  out.observed = total / static_cast<double>(hi - lo + 1);
  const double logN = std::log(static_cast<double>(N));
  out.prediction = out.division_sequence ? 0.5 * logN * logN : logN + offset;
  return out;
}

mpq_class MomentReport::recompute() const {
  mpq_class sum = 0;
  for (const auto& [b, count] : per_b) {
    Int power;
    mpz_ui_pow_ui(power.get_mpz_t(), count, k);
    sum += mpq_class(power);
  }
  if (B == 0) return 0;
  mpq_class out = sum / mpq_class(Int(B));
  out.canonicalize();
  return out;
}

MomentReport empirical_moments(std::uint64_t N, std::uint64_t B, unsigned k, const MomentOptions& options) {
  if (N < 1 || B < 1 || k < 1) throw std::invalid_argument("empirical_moments needs N, B, k >= 1");
  const auto t0 = std::chrono::steady_clock::now();
  MomentReport out;
  out.N = N;
  out.B = B;
  out.k = k;

  std::vector<std::int64_t> bs;
  for (std::uint64_t b = 3; b <= B; b += 2) bs.push_back(static_cast<std::int64_t>(b));
  std::vector<std::optional<std::uint64_t>> counts(bs.size());
  std::atomic<std::size_t> next{0};
  CensusPolicy policy = options.policy;
  policy.threads = 1;
  policy.log_path.clear();
  policy.heartbeat = nullptr;
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < std::max(1u, options.threads); ++t) {
      pool.emplace_back([&] {
        for (std::size_t i; (i = next.fetch_add(1)) < bs.size();) {
          if (options.max_seconds > 0 &&
              std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() > options.max_seconds) {
            next = bs.size();
            break;
          }
          counts[i] = census(make_geometric_shift(1, bs[i]), N, policy).count();
        }
      });
    }
  }
  for (std::size_t i = 0; i < bs.size(); ++i) {
    if (!counts[i]) {
      out.partial = true;
      break;
    }
    out.per_b.emplace_back(bs[i], *counts[i]);
  }
  out.empirical = out.recompute();
  const double l = std::log2(static_cast<double>(N));
  out.predicted = std::pow(l, k);
  if (k == 2) out.predicted *= cv_constant(options.cv_d_max).as_double();
  return out;
}

}  // namespace recprimes
