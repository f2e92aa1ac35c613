#include "recprimes/covering.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "recprimes/arith.hpp"
#include "recprimes/moddyn.hpp"

namespace recprimes {

namespace {

constexpr std::uint64_t kFermatPrimes[] = {3, 5, 17, 257, 65537, 641};
constexpr std::uint64_t kP6 = 6700417;

}  // namespace

std::uint64_t CoveringSystem::window() const {
  std::uint64_t w = 1;
  for (const auto& c : congruences) {
    if (c.modulus == 0) throw std::invalid_argument("zero modulus in covering system");
    w = lcm_u64(w, c.modulus);
  }
  return w;
}

std::vector<std::uint64_t> CoveringSystem::primes() const {
  std::vector<std::uint64_t> out;
  for (const auto& c : congruences)
    if (c.prime && std::find(out.begin(), out.end(), c.prime) == out.end()) out.push_back(c.prime);
  std::sort(out.begin(), out.end());
  return out;
}

CoverageResult verify_covers(const CoveringSystem& sys) {
  if (sys.congruences.empty()) throw std::invalid_argument("empty covering system");
  const std::uint64_t w = sys.window();
  for (std::uint64_t n = 0; n < w; ++n) {
    bool hit = false;
    for (const auto& c : sys.congruences) {
      if (n % c.modulus == c.residue % c.modulus) {
        hit = true;
        break;
      }
    }
    if (!hit) return {false, n};
  }
  return {true, std::nullopt};
}

SequenceCoveringResult verify_sequence_covering(const LinearRecurrence& rec, const CoveringSystem& sys,
                                                unsigned window_multiplier) {
  SequenceCoveringResult out;
  const CoverageResult cov = verify_covers(sys);
  out.covers = cov.covers;
  out.first_uncovered = cov.first_uncovered;

  std::map<std::uint64_t, ForbiddenClasses> classes;
  std::uint64_t w = sys.window(), rho = 0;
  for (const auto& c : sys.congruences) {
    if (c.prime == 0) throw std::invalid_argument("every congruence needs a prime");
    if (!classes.count(c.prime)) {
      auto fc = forbidden_classes(rec, c.prime);
      w = lcm_u64(w, fc.period);
      rho = std::max(rho, fc.preperiod);
      classes.emplace(c.prime, std::move(fc));
    }
  }
  w *= std::max(1u, window_multiplier);
  out.window = w;
  out.divisibility = true;
  for (const auto& c : sys.congruences) {
    const auto& fc = classes.at(c.prime);
    for (std::uint64_t n = c.residue % c.modulus; n < rho + w; n += c.modulus) {
      if (!fc.divides(n)) {
        out.divisibility = false;
        out.failing = c;
        out.failing_index = n;
        return out;
      }
    }
  }
  return out;
}

CoveringSystem system_from_primes(const LinearRecurrence& rec, const std::vector<std::uint64_t>& primes) {
  CoveringSystem sys;
  for (std::uint64_t p : primes) {
    const auto fc = forbidden_classes(rec, p);
    for (std::uint64_t r : fc.residues) sys.congruences.push_back({r, fc.period, p});
  }
  return sys;
}

bool gcd_covering(const LinearRecurrence& rec, const std::vector<std::uint64_t>& primes,
                  std::optional<std::uint64_t>* failing) {
  std::vector<ForbiddenClasses> classes;
  std::uint64_t w = 1, rho = 0;
  for (std::uint64_t p : primes) {
    classes.push_back(forbidden_classes(rec, p));
    w = lcm_u64(w, classes.back().period);
    rho = std::max(rho, classes.back().preperiod);
  }
  for (std::uint64_t n = 0; n < rho + w; ++n) {
    const bool hit = std::any_of(classes.begin(), classes.end(), [n](const auto& fc) { return fc.divides(n); });
    if (!hit) {
      if (failing) *failing = n;
      return false;
    }
  }
  return true;
}

CoveringSystem covering_from_json(const std::string& text, const LinearRecurrence* rec) {
  const auto j = nlohmann::json::parse(text);
  CoveringSystem sys;
  sys.note = j.value("note", "");
  for (const auto& entry : j.at("congruences")) {
    const std::uint64_t prime = entry.value("prime", std::uint64_t{0});
    if (entry.contains("modulus")) {
      const std::uint64_t m = entry.at("modulus").get<std::uint64_t>();
      if (m == 0) throw std::invalid_argument("zero modulus in covering system");
      sys.congruences.push_back({entry.value("residue", std::uint64_t{0}), m, prime});
      continue;
    }
    if (!rec || prime == 0) throw std::invalid_argument("congruence without modulus needs a prime and a sequence");
    const auto fc = forbidden_classes(*rec, prime);
    for (std::uint64_t r : fc.residues) sys.congruences.push_back({r, fc.period, prime});
  }
  return sys;
}

CoveringSystem load_covering(const std::string& path, const LinearRecurrence* rec) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open covering file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return covering_from_json(buf.str(), rec);
}

std::string covering_to_json(const CoveringSystem& sys) {
  nlohmann::ordered_json j;
  j["congruences"] = nlohmann::ordered_json::array();
  for (const auto& c : sys.congruences)
    j["congruences"].push_back({{"residue", c.residue}, {"modulus", c.modulus}, {"prime", c.prime}});
  j["note"] = sys.note;
  return j.dump();
}

bool erdos_verify(const Int& a, const Int& b, std::optional<std::uint64_t>* failing) {
  Int M = 1;
  M <<= 64;
  M -= 1;
  Int term, g;
  for (unsigned n = 0; n < 64; ++n) {
    mpz_mul_2exp(term.get_mpz_t(), a.get_mpz_t(), n);
    term += b;
    mpz_gcd(g.get_mpz_t(), term.get_mpz_t(), M.get_mpz_t());
    if (g == 1) {
      if (failing) *failing = n;
      return false;
    }
  }
  return true;
}

ErdosResult erdos_construction(const std::optional<Int>& a) {
  ErdosResult out;
  out.modulus = 1;
  out.modulus <<= 64;
  out.modulus -= 1;
  Int P = 1;
  for (std::uint64_t p : kFermatPrimes) P *= Int(p);
  // r = 1 + P t with 1 + P t = -1 (mod p6).
  Int inv, q(kP6);
  mpz_invert(inv.get_mpz_t(), P.get_mpz_t(), q.get_mpz_t());
  Int t = (Int(-2) * inv) % q;
  if (t < 0) t += q;
  out.r = 1 + P * t;
  out.a = a.value_or(Int(1));
  out.b = (out.a * out.r) % out.modulus;
  if (out.b < 0) out.b += out.modulus;
  if (out.b == 0) out.b = out.modulus;

  for (unsigned k = 0; k < 6; ++k)
    out.system.congruences.push_back({std::uint64_t{1} << k, std::uint64_t{2} << k, kFermatPrimes[k]});
  out.system.congruences.push_back({0, 64, kP6});
  out.system.note = "Erdos: primes of 2^64-1";

  std::optional<std::uint64_t> failing;
  out.verified = erdos_verify(out.a, out.b, &failing);
  out.failing_index = failing;
  return out;
}

Int brier_k() { return Int("3316923598096294713661"); }

BrierResult brier_check(const Int& k) {
  static const std::vector<std::uint64_t> plus{3, 5, 7, 13, 17, 19, 31, 97, 151, 241, 673};
  static const std::vector<std::uint64_t> minus{3, 7, 11, 19, 31, 37, 41, 73, 109, 151, 331, 1321};
  BrierResult out;
  const auto window = [](const LinearRecurrence& rec, const std::vector<std::uint64_t>& primes) {
    std::uint64_t w = 1;
    for (std::uint64_t p : primes) w = lcm_u64(w, period_mod(rec, p).period);
    return w;
  };
  const auto rp = make_geometric_shift(1, k), rm = make_geometric_shift(1, -k);
  out.plus = gcd_covering(rp, plus);
  out.minus = gcd_covering(rm, minus);
  out.window_plus = window(rp, plus);
  out.window_minus = window(rm, minus);
  return out;
}

}  // namespace recprimes
