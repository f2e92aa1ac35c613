#include <doctest.h>

#include <algorithm>
#include <random>

#include "recprimes/census.hpp"
#include "recprimes/covering.hpp"

using namespace recprimes;

namespace {

std::string fixture(const char* name) { return std::string(RECPRIMES_FIXTURES) + "/" + name; }

LinearRecurrence fib_affine(const Int& a, const Int& b) {
  return make_custom({2, 0, -1}, {b, a + b, a + b});
}

struct Named {
  const char* file;
  LinearRecurrence rec;
};

std::vector<Named> named_systems() {
  return {{"selfridge.json", make_geometric_shift(78557, 1)},
          {"selfridge.json", make_geometric_shift(1, 78557)},
          {"riesel.json", make_geometric_shift(509203, -1)},
          {"brier_plus.json", make_geometric_shift(1, brier_k())},
          {"brier_minus.json", make_geometric_shift(1, -brier_k())},
          {"fibonacci.json", fib_affine(1, 93687)},
          {"fibonacci.json", fib_affine(1, 103377)}};
}

}  // namespace

TEST_CASE("plain coverage") {
  CHECK(verify_covers({{{0, 2, 0}, {1, 2, 0}}, ""}).covers);
  const auto r = verify_covers({{{1, 3, 0}}, ""});
  CHECK_FALSE(r.covers);
  CHECK(r.first_uncovered == 0);
  CHECK(verify_covers(load_covering(fixture("erdos.json"))).covers);
  CHECK_THROWS_AS(verify_covers({}), std::invalid_argument);
  CHECK_THROWS_AS(verify_covers({{{0, 0, 0}}, ""}), std::invalid_argument);
  CHECK_THROWS_AS(covering_from_json(R"({"congruences":[{"residue":0,"modulus":0}]})"), std::invalid_argument);
}

TEST_CASE("named coverings verify") {
  for (const auto& [file, rec] : named_systems()) {
    const auto sys = load_covering(fixture(file), &rec);
    const auto r = verify_sequence_covering(rec, sys);
    CHECK_MESSAGE(r.verified(), file << " " << rec.spec());
    CHECK(720 % r.window == 0);
    CHECK(verify_sequence_covering(rec, sys, 3).verified() == r.verified());
    // Composite-forcing is observed.
    if (rec.tag_as<GeometricShift>()) {
      const std::uint64_t pmax = sys.primes().back();
      for (const auto& h : census(rec, 500).hits) CHECK(eval(rec, h.n) <= pmax);
    }
  }
}

TEST_CASE("brute-force coverage agrees") {
  for (const auto& [file, rec] : named_systems()) {
    const auto sys = load_covering(fixture(file), &rec);
    const std::uint64_t w = sys.window();
    bool all = true;
    for (std::uint64_t n = 0; n < w; ++n) {
      bool hit = false;
      for (const auto& c : sys.congruences) hit = hit || n % c.modulus == c.residue;
      all = all && hit;
    }
    CHECK(verify_covers(sys).covers == all);
  }
}

TEST_CASE("perturbations fail") {
  for (const auto& [file, rec] : named_systems()) {
    const auto sys = load_covering(fixture(file), &rec);
    for (std::size_t i = 0; i < sys.congruences.size(); ++i) {
      CoveringSystem shifted = sys;
      auto& c = shifted.congruences[i];
      c.residue = (c.residue + 1) % c.modulus;
      // Landing on another class of the same prime is not a perturbation.
      if (std::find(sys.congruences.begin(), sys.congruences.end(), c) != sys.congruences.end()) continue;
      const auto r = verify_sequence_covering(rec, shifted);
      CHECK_FALSE(r.verified());
      if (r.covers) CHECK(r.failing == c);
    }
    CoveringSystem dropped = sys;
    dropped.congruences.pop_back();
    const auto d = verify_sequence_covering(rec, dropped);
    CHECK_FALSE(d.covers);
    CHECK(d.first_uncovered.has_value());
  }
  // Shifting the sequence breaks the gcd condition.
  CHECK_FALSE(gcd_covering(make_geometric_shift(78559, 1), {3, 5, 7, 13, 19, 37, 73}));
  CHECK(gcd_covering(make_geometric_shift(78557, 1), {3, 5, 7, 13, 19, 37, 73}));
  std::optional<std::uint64_t> failing;
  CHECK_FALSE(gcd_covering(fib_affine(1, 93689), {2, 3, 7, 17, 19, 23}, &failing));
  CHECK(failing.has_value());
  CHECK_FALSE(gcd_covering(make_geometric_shift(509205, -1), {3, 5, 7, 13, 17, 241}));
}

TEST_CASE("Brier") {
  const auto r = brier_check();
  CHECK(r.plus);
  CHECK(r.minus);
  CHECK(720 % r.window_plus == 0);
  CHECK(720 % r.window_minus == 0);
  const auto s = brier_check(brier_k() + 2);
  CHECK_FALSE(s.plus);
  CHECK_FALSE(s.minus);
}

TEST_CASE("Erdos construction") {
  const auto e = erdos_construction();
  CHECK(e.r == Int("15511380746462593381"));
  CHECK(e.b == e.r);
  CHECK(e.verified);
  CHECK((e.r * e.r) % e.modulus == 1);
  CHECK(verify_covers(e.system).covers);
  CHECK(e.system.congruences == load_covering(fixture("erdos.json")).congruences);

  std::mt19937_64 rng(3);
  for (int i = 0; i < 100; ++i) {
    const Int a(std::to_string(rng() % 1000000007ULL + 1));
    const auto x = erdos_construction(a);
    REQUIRE(x.verified);
    REQUIRE((x.b * e.r - x.a) % e.modulus == 0);
  }
  std::optional<std::uint64_t> failing;
  CHECK_FALSE(erdos_verify(1, e.b + 2, &failing));
  CHECK(failing.has_value());
}

TEST_CASE("JSON round trip") {
  const auto rec = make_geometric_shift(78557, 1);
  const auto sys = load_covering(fixture("selfridge.json"), &rec);
  CHECK(sys.primes() == std::vector<std::uint64_t>{3, 5, 7, 13, 19, 37, 73});
  const auto back = covering_from_json(covering_to_json(sys));
  CHECK(back.congruences == sys.congruences);
  CHECK(back.note == sys.note);
  CHECK(system_from_primes(rec, sys.primes()).congruences == sys.congruences);
  CHECK_THROWS_AS(load_covering(fixture("selfridge.json")), std::invalid_argument);
}
