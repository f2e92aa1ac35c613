#include "recprimes/moddyn.hpp"

#include <algorithm>
#include <numeric>
#include <optional>
#include <set>

#include <json.hpp>

namespace recprimes {

namespace {

std::vector<std::uint64_t> reduced_coefficients(const LinearRecurrence& rec, std::uint64_t m) {
  std::vector<std::uint64_t> out;
  out.reserve(rec.order());
  for (const auto& a : rec.coefficients()) out.push_back(mpz_fdiv_ui(a.get_mpz_t(), m));
  return out;
}

std::vector<std::uint64_t> reduced_initial(const LinearRecurrence& rec, std::uint64_t m) {
  std::vector<std::uint64_t> out;
  out.reserve(rec.order());
  for (const auto& u : rec.initial_terms()) out.push_back(mpz_fdiv_ui(u.get_mpz_t(), m));
  return out;
}

std::uint64_t addmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  const std::uint64_t s = a + b;
  return (s >= m || s < a) ? s - m : s;
}

std::vector<std::uint64_t> mulmod_poly(const std::vector<std::uint64_t>& r, const std::vector<std::uint64_t>& s,
                                       const std::vector<std::uint64_t>& coeffs, std::uint64_t m) {
  const std::size_t k = coeffs.size();
  std::vector<std::uint64_t> prod(2 * k - 1, 0);
  for (std::size_t i = 0; i < k; ++i) {
    if (!r[i]) continue;
    for (std::size_t j = 0; j < k; ++j) prod[i + j] = addmod(prod[i + j], mulmod64(r[i], s[j], m), m);
  }
  for (std::size_t d = 2 * k - 2; d >= k; --d) {
    if (!prod[d]) continue;
    for (std::size_t i = 1; i <= k; ++i)
      prod[d - i] = addmod(prod[d - i], mulmod64(prod[d], coeffs[i - 1], m), m);
    prod[d] = 0;
  }
  prod.resize(k);
  return prod;
}

std::vector<std::uint64_t> times_t(const std::vector<std::uint64_t>& r, const std::vector<std::uint64_t>& coeffs,
                                   std::uint64_t m) {
  const std::size_t k = coeffs.size();
  std::vector<std::uint64_t> out(k, 0);
  const std::uint64_t top = r[k - 1];
  for (std::size_t i = k - 1; i > 0; --i) out[i] = r[i - 1];
  for (std::size_t i = 1; i <= k; ++i) out[k - i] = addmod(out[k - i], mulmod64(top, coeffs[i - 1], m), m);
  return out;
}

std::vector<std::uint64_t> power_of_t_mod(std::uint64_t n, const std::vector<std::uint64_t>& coeffs,
                                          std::uint64_t m) {
  const std::size_t k = coeffs.size();
  std::vector<std::uint64_t> result(k, 0);
  if (k == 1) {
    result[0] = powmod64(coeffs[0], n, m);
    return result;
  }
  std::vector<std::uint64_t> base(k, 0);
  result[0] = 1 % m;
  base[1] = 1 % m;
  while (n) {
    if (n & 1) result = mulmod_poly(result, base, coeffs, m);
    n >>= 1;
    if (n) base = mulmod_poly(base, base, coeffs, m);
  }
  return result;
}

std::uint64_t dot_mod(const std::vector<std::uint64_t>& r, const std::vector<std::uint64_t>& u, std::uint64_t m) {
  std::uint64_t acc = 0;
  for (std::size_t i = 0; i < r.size(); ++i) acc = addmod(acc, mulmod64(r[i], u[i], m), m);
  return acc;
}

void step_reduced(const std::vector<std::uint64_t>& coeffs, std::vector<std::uint64_t>& state, std::uint64_t m) {
  const std::size_t k = coeffs.size();
  std::uint64_t next = 0;
  for (std::size_t i = 1; i <= k; ++i) next = addmod(next, mulmod64(coeffs[i - 1], state[k - i], m), m);
  std::rotate(state.begin(), state.begin() + 1, state.end());
  state[k - 1] = next;
}

// Brent's algorithm on the state orbit; gives up after `limit` steps.
std::optional<PeriodRecord> orbit_period(const LinearRecurrence& rec, std::uint64_t m, std::uint64_t limit) {
  const auto coeffs = reduced_coefficients(rec, m);
  const auto x0 = reduced_initial(rec, m);
  std::uint64_t power = 1, lam = 1, steps = 0;
  auto tortoise = x0, hare = x0;
  step_reduced(coeffs, hare, m);
  while (tortoise != hare) {
    if (power == lam) {
      tortoise = hare;
      power *= 2;
      lam = 0;
    }
    step_reduced(coeffs, hare, m);
    ++lam;
    if (++steps > limit) return std::nullopt;
  }
  tortoise = x0;
  hare = x0;
  for (std::uint64_t i = 0; i < lam; ++i) step_reduced(coeffs, hare, m);
  std::uint64_t mu = 0;
  while (tortoise != hare) {
    step_reduced(coeffs, tortoise, m);
    step_reduced(coeffs, hare, m);
    ++mu;
  }
  return PeriodRecord{m, mu, lam};
}

void check_modulus(std::uint64_t m) {
  if (m == 0 || (m >> 63)) throw std::invalid_argument("modulus must lie in [1, 2^63)");
}

void add_prime_factors(const Int& value, std::set<std::uint64_t>& out, const SupportOptions& options,
                       const std::string& what) {
  const Int v = abs(value);
  if (v <= 1) return;
  const FactorizationResult f = options.cache ? options.cache->get(v, options.effort) : factorize(v, options.effort);
  if (!f.complete())
    throw IncompleteSupport("could not fully factor " + what + " (cofactor " + f.cofactor->get_str() + ")");
  for (const auto& [p, e] : f.factors) {
    if (!mpz_fits_ulong_p(p.get_mpz_t()) || p.get_ui() >> 62)
      throw IncompleteSupport("support prime " + p.get_str() + " from " + what + " exceeds 2^62");
    out.insert(p.get_ui());
  }
}

}  // namespace

std::uint64_t eval_mod(const LinearRecurrence& rec, std::uint64_t n, std::uint64_t m) {
  check_modulus(m);
  if (m == 1) return 0;
  return dot_mod(power_of_t_mod(n, reduced_coefficients(rec, m), m), reduced_initial(rec, m), m);
}

std::vector<std::uint64_t> state_mod(const LinearRecurrence& rec, std::uint64_t n, std::uint64_t m) {
  check_modulus(m);
  const auto coeffs = reduced_coefficients(rec, m);
  const auto init = reduced_initial(rec, m);
  auto r = power_of_t_mod(n, coeffs, m);
  std::vector<std::uint64_t> state(rec.order());
  for (std::size_t j = 0; j < state.size(); ++j) {
    state[j] = dot_mod(r, init, m);
    if (j + 1 < state.size()) r = times_t(r, coeffs, m);
  }
  return state;
}

void step_state_mod(const LinearRecurrence& rec, std::vector<std::uint64_t>& state, std::uint64_t m) {
  step_reduced(reduced_coefficients(rec, m), state, m);
}

std::uint64_t multiplicative_order(const Int& g, std::uint64_t m) {
  if (m == 0) throw std::invalid_argument("multiplicative_order needs m >= 1");
  const std::uint64_t gm = mpz_fdiv_ui(g.get_mpz_t(), m);
  if (m == 1) return 1;
  if (std::gcd(gm, m) != 1) throw NotInvertible("gcd(g, m) > 1");
  std::uint64_t lambda = 1;
  for (const auto& [p, e] : factor_u64(m)) {
    std::uint64_t pe1 = 1;
    for (unsigned i = 1; i < e; ++i) pe1 *= p;
    std::uint64_t l;
    if (p == 2) l = e == 1 ? 1 : (e == 2 ? 2 : pe1 / 2);
    else l = pe1 * (p - 1);
    lambda = lcm_u64(lambda, l);
  }
  std::uint64_t t = lambda;
  for (const auto& [q, e] : factor_u64(lambda)) {
    while (t % q == 0 && powmod64(gm, t / q, m) == 1) t /= q;
  }
  return t;
}

PeriodRecord period_mod(const LinearRecurrence& rec, std::uint64_t m) {
  check_modulus(m);
  return *orbit_period(rec, m, ~std::uint64_t{0});
}

std::optional<PeriodRecord> period_mod_bounded(const LinearRecurrence& rec, std::uint64_t m,
                                               std::uint64_t max_steps) {
  check_modulus(m);
  return orbit_period(rec, m, max_steps);
}

bool ForbiddenClasses::divides(std::uint64_t n) const {
  if (n < preperiod) {
    for (const auto& [idx, flag] : exceptions)
      if (idx == n) return flag;
    return false;
  }
  return std::binary_search(residues.begin(), residues.end(), n % period);
}

namespace {

ForbiddenClasses classes_from_record(const LinearRecurrence& rec, std::uint64_t p, const PeriodRecord& pr) {
  ForbiddenClasses out;
  out.prime = p;
  out.preperiod = pr.preperiod;
  out.period = pr.period;
  const auto coeffs = reduced_coefficients(rec, p);
  auto state = reduced_initial(rec, p);
  for (std::uint64_t n = 0; n < pr.preperiod + pr.period; ++n) {
    const bool hit = state[0] == 0;
    if (n < pr.preperiod) out.exceptions.emplace_back(n, hit);
    else if (hit) out.residues.push_back(n % pr.period);
    step_reduced(coeffs, state, p);
  }
  std::sort(out.residues.begin(), out.residues.end());
  return out;
}

}  // namespace

ForbiddenClasses forbidden_classes(const LinearRecurrence& rec, std::uint64_t p) {
  return classes_from_record(rec, p, period_mod(rec, p));
}

ForbiddenClasses forbidden_classes(const LinearRecurrence& rec, std::uint64_t p, const PeriodRecord& record) {
  return classes_from_record(rec, p, record);
}

Int lcm_upto(unsigned y) {
  Int out = 1;
  for (unsigned m = 2; m <= y; ++m) mpz_lcm_ui(out.get_mpz_t(), out.get_mpz_t(), m);
  return out;
}

std::vector<std::uint64_t> PeriodTable::primes() const {
  std::vector<std::uint64_t> out;
  for (const auto& c : classes) out.push_back(c.prime);
  return out;
}

std::string PeriodTable::to_json() const {
  nlohmann::ordered_json j;
  j["y"] = y;
  if (mpz_fits_ulong_p(Ly.get_mpz_t())) j["Ly"] = Ly.get_ui();
  else j["Ly"] = Ly.get_str();
  j["groups"] = nlohmann::ordered_json::array();
  for (const auto& g : groups) j["groups"].push_back({{"m", g.m}, {"primes", g.primes}});
  return j.dump();
}

PeriodTable period_support(const LinearRecurrence& rec, unsigned y, const SupportOptions& options) {
  if (y < 1) throw std::invalid_argument("period_support needs y >= 1");
  std::set<std::uint64_t> candidates{2};
  const std::size_t k = rec.order();

  if (rec.tag_as<GeometricShift>()) {
    for (unsigned m = 1; m <= y; ++m) {
      Int mersenne = 1;
      mersenne <<= m;
      mersenne -= 1;
      add_prime_factors(mersenne, candidates, options, "2^" + std::to_string(m) + "-1");
    }
  } else {
    const auto terms = first_terms(rec, y + 3 * k + 1);
    bool fallback = false;
    for (unsigned m = 1; m <= y; ++m) {
      Int G = 0;
      for (std::size_t i = k; i < 3 * k; ++i) {
        const Int diff = terms[m + i] - terms[i];
        mpz_gcd(G.get_mpz_t(), G.get_mpz_t(), diff.get_mpz_t());
      }
      if (G == 0) fallback = true;
      else add_prime_factors(G, candidates, options, "G_" + std::to_string(m));
    }
    if (fallback) {
      for (std::uint32_t p : small_primes(static_cast<std::uint32_t>(
               std::min<std::uint64_t>(options.fallback_prime_bound, 10'000'000))))
        candidates.insert(p);
    }
  }

  PeriodTable table;
  table.y = y;
  table.Ly = lcm_upto(y);
  const std::uint64_t limit = 4 * (std::uint64_t{y} + k) + 64;
  std::vector<std::vector<std::uint64_t>> by_period(y + 1);
  for (std::uint64_t p : candidates) {
    const auto pr = orbit_period(rec, p, limit);
    if (!pr || pr->period > y) continue;
    by_period[pr->period].push_back(p);
    table.classes.push_back(classes_from_record(rec, p, *pr));
  }
  for (unsigned m = 1; m <= y; ++m)
    if (!by_period[m].empty()) table.groups.push_back({m, by_period[m]});
  return table;
}

}  // namespace recprimes
