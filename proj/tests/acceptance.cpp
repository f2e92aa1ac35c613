// Acceptance run: one PASS/FAIL line per criterion.
//   acceptance                 fast tier
//   acceptance --slow-only     N = 10^4 census column, delta at y = 25
//   acceptance --expect-fail L exit 0 iff the failing set is exactly L

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "recprimes/census.hpp"
#include "recprimes/covering.hpp"
#include "recprimes/density.hpp"
#include "recprimes/heuristics.hpp"
#include "recprimes/moddyn.hpp"

using namespace recprimes;

namespace {

using Clock = std::chrono::steady_clock;

unsigned g_threads = 1;
std::set<int> g_failed;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

void verdict(int id, bool pass, const std::string& detail, Clock::time_point t0) {
  const double s = seconds_since(t0);
  std::printf("%s criterion %d: %s [%.1fs]\n", pass ? "PASS" : "FAIL", id, detail.c_str(), s);
  std::fflush(stdout);
  if (!pass) g_failed.insert(id);
}

CensusPolicy policy() {
  CensusPolicy p;
  p.threads = g_threads;
  return p;
}

std::string fixture(const char* name) { return std::string(RECPRIMES_FIXTURES) + "/" + name; }

struct Row {
  int a, b;
  std::size_t c2, c3, c4;
};

// Pi_{a,b}(N) at N = 10^2, 10^3, 10^4.
const std::vector<Row> kCensusTable{
    {1, -1, 10, 14, 22}, {1, 1, 5, 5, 5},     {1, -3, 13, 27, 34}, {3, -1, 15, 25, 30}, {1, 3, 15, 18, 31},
    {3, 1, 11, 19, 24},  {1, -5, 13, 22, 31}, {5, -1, 11, 17, 29}, {1, 5, 6, 11, 11},   {5, 1, 10, 11, 15},
    {1, -7, 1, 2, 6},    {7, -1, 7, 8, 8},    {1, 7, 15, 24, 34},  {7, 1, 9, 19, 22},   {3, -5, 14, 25, 35},
    {5, -3, 18, 32, 43}, {3, 5, 22, 31, 49},  {5, 3, 22, 34, 48}};

std::string pair_name(int a, int b);

// Mismatch note; says whether admitting n = 0 would reconcile the row.
std::string census_mismatch(const Row& row, std::size_t got, std::size_t want) {
  std::string note = pair_name(row.a, row.b) + " got " + std::to_string(got) + " want " + std::to_string(want);
  if (row.a + row.b == 2 && got + 1 == want) note += " (u_0 = 2 is prime; n = 0 is excluded)";
  return note;
}

std::string pair_name(int a, int b) {
  std::ostringstream s;
  s << "(" << a << "," << b << ")";
  return s.str();
}

void criterion1_fast() {
  const auto t0 = Clock::now();
  std::vector<std::string> bad;
  for (const auto& row : kCensusTable) {
    const auto r = census(make_geometric_shift(row.a, row.b), 1000, policy());
    if (r.count_upto(100) != row.c2) bad.push_back(census_mismatch(row, r.count_upto(100), row.c2) + " at 10^2");
    if (r.count() != row.c3) bad.push_back(census_mismatch(row, r.count(), row.c3) + " at 10^3");
  }
  const double s = seconds_since(t0);
  std::string detail = "18 sequences at N=10^2,10^3";
  for (const auto& b : bad) detail += "; " + b;
  if (s > 900) detail += "; over the 15 minute budget";
  verdict(1, bad.empty() && s <= 900, detail, t0);
}

void criterion1_slow() {
  const auto t0 = Clock::now();
  std::vector<std::string> bad;
  for (const auto& row : kCensusTable) {
    const auto rec = make_geometric_shift(row.a, row.b);
    CensusReport r;
    // 2^n - 1 and 2^n + 1 only admit prime n and n = 2^m respectively.
    if (row.a == 1 && row.b == -1)
      r = division_seq_census(rec, 10000, 2, policy());
    else if (row.a == 1 && row.b == 1)
      r = power_index_census(rec, 10000, 2, policy());
    else
      r = census(rec, 10000, policy());
    std::printf("  %s Pi(10^4) = %zu (table %zu) [%.0fs]\n", pair_name(row.a, row.b).c_str(), r.count(), row.c4,
                seconds_since(t0));
    std::fflush(stdout);
    if (r.count() != row.c4) bad.push_back(census_mismatch(row, r.count(), row.c4) + " at 10^4");
  }
  const double s = seconds_since(t0);
  std::string detail = "18 sequences at N=10^4";
  for (const auto& b : bad) detail += "; " + b;
  if (s > 7200) detail += "; over the 2 hour budget";
  verdict(1, bad.empty() && s <= 7200, detail, t0);
}

void criterion2() {
  const auto t0 = Clock::now();
  const auto mer = division_seq_census(make_geometric_shift(1, -1), 10000, 2, policy());
  CensusPolicy fp = policy();
  fp.form = FormRule::twice_index;
  fp.k_bound = 100000;
  const auto fer = power_index_census(make_geometric_shift(1, 1), 1000000, 2, fp);
  const auto fib = division_seq_census(make_lucas(1, 1), 10000, 3, policy());
  const bool ok = mer.count() == 22 && fer.count() == 5 && fer.tested == 20 && fib.count() == 26;
  std::ostringstream d;
  d << "Mersenne " << mer.count() << "/22, Fermat " << fer.count() << "/5 over " << fer.tested
    << " indices, Fibonacci " << fib.count() << "/26";
  const double s = seconds_since(t0);
  if (s > 3600) d << "; over the 1 hour budget";
  verdict(2, ok && s <= 3600, d.str(), t0);
}

void criterion3() {
  const auto t0 = Clock::now();
  struct L {
    const char* name;
    LinearRecurrence rec;
    std::size_t c2, c3;
  };
  const std::vector<L> rows{{"(3^n-1)/2", make_two_term(3, 1, true), 4, 6},
                            {"3^n-2^n", make_two_term(3, 2, false), 8, 11},
                            {"(5^n-3^n)/2", make_two_term(5, 3, true), 5, 8},
                            {"6^n-5^n", make_two_term(6, 5, false), 7, 8}};
  bool ok = true;
  std::string detail;
  for (const auto& row : rows) {
    const auto r = census(row.rec, 1000, policy());
    ok = ok && r.count_upto(100) == row.c2 && r.count() == row.c3;
    detail += std::string(detail.empty() ? "" : ", ") + row.name + " " + std::to_string(r.count_upto(100)) + "," +
              std::to_string(r.count());
  }
  verdict(3, ok, detail, t0);
}

struct DensityRow {
  int a, b;
  double v[5];  // y = 5, 10, 15, 20, 25
};

const std::vector<DensityRow> kDensityTable{
    {1, 3, {2.26, 2.52, 2.44, 2.46, 2.54}},  {1, -3, {3.39, 3.51, 3.38, 3.5, 3.46}},
    {1, 5, {1.5, 1.44, 1.16, 1.05, 1.04}},   {1, -5, {2.26, 2.16, 2.55, 2.46, 2.54}},
    {1, 7, {2.26, 2.16, 2.32, 2.52, 2.60}},  {1, -7, {1.13, 1.08, .85, .92, .91}},
    {3, 5, {4.52, 4.18, 3.82, 3.9, 3.85}},   {3, -5, {3.02, 2.88, 3.22, 3.11, 3.21}}};

void criterion4_fast() {
  const auto t0 = Clock::now();
  double worst = 0;
  bool agree = true, budget = true;
  for (const auto& row : kDensityTable) {
    const auto rec = make_geometric_shift(row.a, row.b);
    const unsigned ys[] = {5, 10, 15, 20};
    for (int i = 0; i < 4; ++i) {
      const auto tp = Clock::now();
      worst = std::max(worst, std::abs(delta(rec, ys[i]).delta_float - row.v[i]));
      budget = budget && seconds_since(tp) < 600;
    }
    for (unsigned y = 2; y <= 12; ++y)
      agree = agree && delta(rec, y, DeltaStrategy::sieve).delta == delta(rec, y, DeltaStrategy::inclusion_exclusion).delta;
  }
  std::ostringstream d;
  d << "8 pairs at y=5..20, max |delta - table| = " << std::fixed << std::setprecision(4) << worst
    << " (tol 0.01); strategies " << (agree ? "agree" : "DISAGREE") << " for y <= 12";
  verdict(4, worst <= 0.01 && agree && budget, d.str(), t0);
}

void criterion4_slow() {
  const auto t0 = Clock::now();
  double worst = 0;
  for (const auto& row : kDensityTable)
    worst = std::max(worst, std::abs(delta(make_geometric_shift(row.a, row.b), 25).delta_float - row.v[4]));
  std::ostringstream d;
  d << "8 pairs at y=25, max |delta - table| = " << std::fixed << std::setprecision(4) << worst << " (tol 0.02)";
  verdict(4, worst <= 0.02, d.str(), t0);
}

void criterion5() {
  const auto t0 = Clock::now();
  const auto minus = make_geometric_shift(1, -7), plus = make_geometric_shift(1, 7);
  const bool exact = delta_mod(minus, 15) == Rational(15, 32) && delta_mod(plus, 15) == Rational(15, 16);
  const bool counter = delta_mod(minus, 15) != delta_mod(minus, 3) * delta_mod(minus, 5) &&
                       delta_mod(plus, 15) != delta_mod(plus, 3) * delta_mod(plus, 5);
  std::ostringstream d;
  d << "delta_{1,-7}(15) = " << delta_mod(minus, 15).get_str() << ", delta_{1,7}(15) = " << delta_mod(plus, 15).get_str()
    << ", product rule " << (counter ? "fails as expected" : "holds");
  verdict(5, exact && counter, d.str(), t0);
}

LinearRecurrence fib_affine(const Int& a, const Int& b) { return make_custom({2, 0, -1}, {b, a + b, a + b}); }

void criterion6() {
  const auto t0 = Clock::now();
  struct Named {
    const char* name;
    const char* file;
    LinearRecurrence rec;
  };
  const std::vector<Named> systems{{"Selfridge", "selfridge.json", make_geometric_shift(78557, 1)},
                                   {"Riesel", "riesel.json", make_geometric_shift(509203, -1)},
                                   {"Brier+", "brier_plus.json", make_geometric_shift(1, brier_k())},
                                   {"Brier-", "brier_minus.json", make_geometric_shift(1, -brier_k())},
                                   {"Fibonacci 93687", "fibonacci.json", fib_affine(1, 93687)},
                                   {"Fibonacci 103377", "fibonacci.json", fib_affine(1, 103377)},
                                   {"Fibonacci 5*93687", "fibonacci.json", fib_affine(5, 5 * 93687 % 312018)},
                                   {"Fibonacci 11*103377", "fibonacci.json", fib_affine(11, 11 * 103377 % 312018)}};
  bool ok = true;
  std::size_t perturbed = 0;
  std::string detail;
  for (const auto& s : systems) {
    const auto sys = load_covering(fixture(s.file), &s.rec);
    const bool v = verify_sequence_covering(s.rec, sys).verified();
    ok = ok && v;
    if (!v) detail += std::string(s.name) + " failed; ";
    for (std::size_t i = 0; i < sys.congruences.size(); ++i) {
      CoveringSystem shifted = sys;
      auto& c = shifted.congruences[i];
      c.residue = (c.residue + 1) % c.modulus;
      if (std::find(sys.congruences.begin(), sys.congruences.end(), c) != sys.congruences.end()) continue;
      ++perturbed;
      if (verify_sequence_covering(s.rec, shifted).verified()) {
        ok = false;
        detail += std::string(s.name) + " perturbation " + std::to_string(i) + " accepted; ";
      }
    }
    CoveringSystem dropped = sys;
    dropped.congruences.pop_back();
    ++perturbed;
    if (verify_sequence_covering(s.rec, dropped).verified()) {
      ok = false;
      detail += std::string(s.name) + " with a class dropped accepted; ";
    }
  }
  const auto brier = brier_check();
  const auto erdos = erdos_construction();
  std::optional<std::uint64_t> failing;
  const bool erdos_perturbed = erdos_verify(erdos.a, erdos.b + 2, &failing);
  ok = ok && brier.plus && brier.minus && erdos.verified && !erdos_perturbed;
  detail += std::to_string(systems.size()) + " systems, " + std::to_string(perturbed) + " perturbations rejected; Brier " +
            (brier.plus && brier.minus ? "ok" : "FAILED") + "; Erdos r = " + erdos.r.get_str() +
            (erdos.verified ? " verified" : " FAILED");
  verdict(6, ok, detail, t0);
}

void criterion7() {
  const auto t0 = Clock::now();
  bool identities = true;
  for (std::uint64_t m = 4; m <= 500; ++m)
    for (int sign : {-1, 1}) {
      const auto s = fibonacci_shift_identity(m, sign);
      identities = identities && fibonacci(m) + sign == fibonacci(s.fib_index) * lucas_number(s.lucas_index);
    }
  std::set<Int> values;
  for (int c : {-1, 1}) {
    const auto rec = make_fibonacci_shift(c);
    for (const auto& h : census(rec, 10000, policy()).hits) values.insert(eval(rec, h.n));
  }
  std::string got;
  for (const auto& v : values) got += (got.empty() ? "" : ",") + v.get_str();
  const bool ok = identities && values == std::set<Int>{2, 3, 7};
  verdict(7, ok, std::string("shift identities ") + (identities ? "hold" : "FAIL") + " for m <= 500; F_n +- 1 prime values {" + got + "} to 10^4", t0);
}

void criterion8() {
  const auto t0 = Clock::now();
  const double c2 = twin_constant(1000000).as_double();
  const double lb = cv_lower_bound(1000000).as_double();
  const double cv2 = cv_constant(100).as_double(), cv3 = cv_constant(1000).as_double(),
               cv4 = cv_constant(10000).as_double();
  const auto b1 = beta_gamma(1), b2 = beta_gamma(2), b3 = beta_gamma(3);
  const bool ok = std::abs(c2 - 1.3203) <= 1e-4 && std::abs(lb - 2.3009615) <= 1e-6 && cv2 < cv3 && cv3 < cv4 &&
                  cv3 > 2.30 && b1.first == 0 && std::abs(b1.second - std::exp(1.0)) < 5e-3 &&
                  std::abs(b2.first - 0.373365) < 5e-7 && std::abs(b2.second - 4.31) < 5e-3 &&
                  std::abs(b3.first - 0.914) < 5e-4 && std::abs(b3.second - 5.764) < 5e-4;
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "C2 = %.6f, Cv lower bound = %.8f, Cv(10^2,10^3,10^4) = %.5f < %.5f < %.5f, beta/gamma = (%.0f, %.4f) "
                "(%.6f, %.4f) (%.4f, %.4f)",
                c2, lb, cv2, cv3, cv4, b1.first, b1.second, b2.first, b2.second, b3.first, b3.second);
  verdict(8, ok, buf, t0);
}

void criterion9() {
  const auto t0 = Clock::now();
  bool ok = true;
  for (unsigned y = 2; y <= 12; ++y) ok = ok && sieve_identity_check(y).holds();
  verdict(9, ok, "exact rational equality for 2 <= y <= 12", t0);
}

void criterion10() {
  const auto t0 = Clock::now();
  FactorCache cache;
  struct Target {
    const char* name;
    LinearRecurrence rec;
    std::uint64_t N;
    double want;
  };
  const std::vector<Target> targets{{"2^n-3", make_geometric_shift(1, -3), 50, 3.48},
                                    {"2^n-1", make_geometric_shift(1, -1), 50, 6.28},
                                    {"2^n-3", make_geometric_shift(1, -3), 100, 4.07},
                                    {"2^n-1", make_geometric_shift(1, -1), 100, 8.16}};
  std::map<RangeConvention, std::vector<OmegaExperiment>> runs;
  for (auto range : {RangeConvention::upto, RangeConvention::dyadic})
    for (const auto& t : targets) runs[range].push_back(mean_omega_experiment(t.rec, t.N, range, {}, &cache));

  std::optional<RangeConvention> match;
  std::ostringstream d;
  d << std::fixed << std::setprecision(2);
  for (auto range : {RangeConvention::upto, RangeConvention::dyadic}) {
    bool all = true;
    d << to_string(range) << ":";
    for (std::size_t i = 0; i < targets.size(); ++i) {
      const auto& e = runs[range][i];
      all = all && std::abs(e.observed - targets[i].want) <= 0.02;
      d << " " << targets[i].name << "@" << targets[i].N << "=" << e.observed << (e.lower_bound ? "+" : "");
    }
    d << "; ";
    if (all && !match) match = range;
  }
  const double p50 = runs[RangeConvention::dyadic][1].prediction, p100 = runs[RangeConvention::dyadic][3].prediction;
  d << "Mersenne predictions " << p50 << ", " << p100 << "; matching convention "
    << (match ? to_string(*match) : "none");
  const bool predictions = std::abs(p50 - 7.65) < 0.005 && std::abs(p100 - 10.60) < 0.005;
  const double s = seconds_since(t0);
  if (s > 1800) d << "; over the 30 minute budget";
  verdict(10, match.has_value() && predictions && s <= 1800, d.str(), t0);
}

void criterion11() {
  const auto t0 = Clock::now();
  MomentOptions opt;
  opt.threads = g_threads;
  const auto first = empirical_moments(512, 2000, 1, opt);
  MomentReport second = first;
  second.k = 2;
  second.empirical = second.recompute();
  const double m1 = first.empirical.get_d(), m2 = second.empirical.get_d();
  const double target2 = 81.0 * cv_constant(opt.cv_d_max).as_double();
  const bool first_ok = std::abs(m1 - 9.0) <= 0.15 * 9.0;
  const bool variance = m2 > m1 * m1;
  const bool scale = m2 >= target2 / 2 && m2 <= target2 * 2;
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "odd b <= 2000, N = 512: first moment %.4f vs 9 +-15%% %s; second %.3f > first^2 = %.3f %s; "
                "Cv*81 = %.3f, ratio %.3f %s",
                m1, first_ok ? "ok" : "OUT", m2, m1 * m1, variance ? "ok" : "OUT", target2, m2 / target2,
                scale ? "ok" : "OUT");
  verdict(11, first_ok && variance && scale && !first.partial, buf, t0);
}

PeriodRecord brute_period(const LinearRecurrence& rec, std::uint64_t m) {
  std::map<std::vector<std::uint64_t>, std::uint64_t> seen;
  auto state = state_mod(rec, 0, m);
  for (std::uint64_t n = 0;; ++n) {
    const auto [it, fresh] = seen.emplace(state, n);
    if (!fresh) return {m, it->second, n - it->second};
    step_state_mod(rec, state, m);
  }
}

void criterion12() {
  const auto t0 = Clock::now();
  std::vector<std::string> failed;

  const auto rec = make_geometric_shift(1, -3);
  const auto base = census(rec, 700);
  for (unsigned t : {2u, 4u, 16u}) {
    CensusPolicy p;
    p.threads = t;
    if (census(rec, 700, p).hits != base.hits) failed.push_back("threads " + std::to_string(t));
  }

  {
    const auto log = (std::filesystem::temp_directory_path() / "recprimes_acceptance_resume.log").string();
    std::filesystem::remove(log);
    CensusPolicy p;
    p.log_path = log;
    const auto seq = make_geometric_shift(5, -3);
    census(seq, 600, p);
    std::vector<std::string> lines;
    {
      std::ifstream in(log);
      for (std::string l; std::getline(in, l);) lines.push_back(l);
    }
    {
      std::ofstream out(log, std::ios::trunc);
      for (std::size_t i = 0; i < lines.size() / 2; ++i) out << lines[i] << '\n';
      out << lines[lines.size() / 2].substr(0, 5);
    }
    const auto resumed = census(seq, 600, p);
    if (resumed.hits != census(seq, 600).hits || resumed.replayed != lines.size() / 2) failed.push_back("resume");
    std::filesystem::remove(log);
  }

  {
    const std::uint32_t limit = 10000000;
    std::vector<bool> composite(limit, false);
    composite[0] = composite[1] = true;
    for (std::uint32_t i = 2; i * i < limit; ++i)
      if (!composite[i])
        for (std::uint32_t j = i * i; j < limit; j += i) composite[j] = true;
    Int n;
    for (std::uint32_t i = 0; i < limit; ++i) {
      n = i;
      if (is_probable_prime(n).is_prime() == composite[i]) {
        failed.push_back("PRP at " + std::to_string(i));
        break;
      }
    }
  }

  for (const auto& seq : {make_lucas(1, 1), make_geometric_shift(1, -1)}) {
    const auto x = first_terms(seq, 201);
    bool law = true;
    for (std::uint64_t m = 1; m <= 200 && law; ++m)
      for (std::uint64_t n = m; n <= 200; ++n) law = law && gcd(x[m], x[n]) == abs(x[std::gcd(m, n)]);
    if (!law) failed.push_back("gcd law " + seq.spec());
  }

  for (const auto& seq : {make_geometric_shift(1, -1), make_lucas(1, 1)}) {
    for (std::uint64_t n = 1; n <= 60; ++n) {
      unsigned sum = 0;
      for (std::uint64_t d : divisors(n)) sum += omega_big(factorize(phi_decomposition(seq, d)));
      if (sum != omega_big(factorize(eval(seq, n)))) {
        failed.push_back("Omega additivity " + seq.spec() + " n=" + std::to_string(n));
        break;
      }
    }
  }

  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    const int k = 1 + static_cast<int>(rng() % 3);
    std::vector<Int> a(k), u(k);
    for (auto& c : a) c = static_cast<long>(rng() % 11) - 5;
    if (a.back() == 0) a.back() = 2;
    for (auto& c : u) c = static_cast<long>(rng() % 21) - 10;
    const auto seq = make_custom(a, u);
    const std::uint64_t m = 2 + rng() % 60;
    const auto got = period_mod(seq, m), want = brute_period(seq, m);
    if (got.preperiod != want.preperiod || got.period != want.period) {
      failed.push_back("period minimality trial " + std::to_string(trial));
      break;
    }
  }

  std::string detail = "threads, resume, PRP < 10^7, gcd law, Omega additivity n <= 60, 200 period instances";
  for (const auto& f : failed) detail += "; failed " + f;
  verdict(12, failed.empty(), detail, t0);
}

std::set<int> parse_list(const std::string& s) {
  std::set<int> out;
  std::stringstream in(s);
  for (std::string item; std::getline(in, item, ',');)
    if (!item.empty()) out.insert(std::stoi(item));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  bool slow_only = false;
  std::string expect_fail, only;
  g_threads = std::max(1u, std::thread::hardware_concurrency());
  app.add_flag("--slow-only", slow_only, "run the slow tier only");
  app.add_option("--expect-fail", expect_fail, "comma list of criteria known to fail");
  app.add_option("--only", only, "comma list of criteria to run");
  app.add_option("--threads", g_threads, "worker threads");
  CLI11_PARSE(app, argc, argv);

  const std::set<int> selected = parse_list(only);
  const auto want = [&](int id) { return selected.empty() || selected.count(id); };

  if (slow_only) {
    if (want(1)) criterion1_slow();
    if (want(4)) criterion4_slow();
  } else {
    if (want(1)) criterion1_fast();
    if (want(2)) criterion2();
    if (want(3)) criterion3();
    if (want(4)) criterion4_fast();
    if (want(5)) criterion5();
    if (want(6)) criterion6();
    if (want(7)) criterion7();
    if (want(8)) criterion8();
    if (want(9)) criterion9();
    if (want(10)) criterion10();
    if (want(11)) criterion11();
    if (want(12)) criterion12();
  }

  std::set<int> expected;
  for (int id : parse_list(expect_fail))
    if (want(id) && (!slow_only || id == 1 || id == 4)) expected.insert(id);
  std::string failed;
  for (int id : g_failed) failed += (failed.empty() ? "" : ",") + std::to_string(id);
  std::printf("failed: {%s}\n", failed.c_str());
  if (!expected.empty()) std::printf("expected failures: {%s}\n", expect_fail.c_str());
  return g_failed == expected ? 0 : 1;
}
