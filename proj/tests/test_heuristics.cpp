#include <doctest.h>

#include <cmath>

#include "recprimes/heuristics.hpp"

using namespace recprimes;

namespace {

Int pow2_minus(unsigned n, long c) {
  Int r = 1;
  r <<= n;
  return r - c;
}

}  // namespace

TEST_CASE("constants") {
  const auto c2 = twin_constant(1000000);
  CHECK(c2.as_double() == doctest::Approx(1.3203).epsilon(1e-4));
  CHECK(c2.direction == Direction::decreasing);
  CHECK(twin_constant(1000).as_double() > c2.as_double());
  CHECK(c2.digits(6).substr(0, 6) == "1.3203");

  const auto lb = cv_lower_bound(1000000);
  CHECK(std::abs(lb.as_double() - 2.3009615) < 1e-6);
  CHECK(lb.direction == Direction::increasing);

  const auto small = cv_constant(100, 100000), big = cv_constant(1000, 100000);
  CHECK(small.as_double() < big.as_double());
  CHECK(big.as_double() > 2.30);
  CHECK(big.truncation == "d_max");

  // k = 1 reduces to 1; k = 2 is the twin constant.
  CHECK(ck_constant(1, 1000).as_double() == doctest::Approx(1.0));
  CHECK(ck_constant(2, 100000).as_double() == doctest::Approx(twin_constant(100000).as_double()).epsilon(1e-9));
  CHECK(ck_constant(3, 100000).direction == Direction::oscillating);
}

TEST_CASE("beta and gamma") {
  const auto [b1, g1] = beta_gamma(1);
  CHECK(b1 == 0.0);
  CHECK(g1 == doctest::Approx(std::exp(1.0)));
  const auto [b2, g2] = beta_gamma(2);
  CHECK(b2 == doctest::Approx(0.373365).epsilon(1e-6));
  CHECK(g2 == doctest::Approx(4.311070).epsilon(1e-6));
  const auto [b3, g3] = beta_gamma(3);
  CHECK(b3 == doctest::Approx(0.913728).epsilon(1e-6));
  CHECK(g3 == doctest::Approx(5.763994).epsilon(1e-6));
  for (unsigned k = 2; k <= 60; ++k) {
    const auto [b, g] = beta_gamma(k);
    REQUIRE(b < k);
    REQUIRE(g > k);
    REQUIRE(std::abs(beta_gamma_residual(k, b)) < 1e-12 * k);
    REQUIRE(std::abs(beta_gamma_residual(k, g)) < 1e-12 * k);
  }
  const double b50 = beta_gamma(50).first;
  CHECK(std::abs(b50 - (50 - std::sqrt(100.0) + 1.0 / 3)) < 0.5);
}

TEST_CASE("sieve identity") {
  CHECK(sieve_identity_check(2).rhs == mpq_class(1, 2));
  CHECK(sieve_identity_check(4).rhs == mpq_class(1, 3));
  CHECK(sieve_identity_check(4).support == std::vector<std::uint64_t>{3, 5, 7});
  for (unsigned y = 2; y <= 12; ++y) CHECK_MESSAGE(sieve_identity_check(y).holds(), "y=" << y);
}

TEST_CASE("eta sums") {
  CHECK(eta_sum(make_geometric_shift(1, 3), 4) == mpq_class(1, 2));
  for (unsigned y = 2; y <= 6; ++y) CHECK(eta_sum(make_geometric_shift(1, -1), y) == sieve_identity_check(y).lhs);
  // A covering set leaves nothing.
  CHECK(eta_sum(make_geometric_shift(78557, 1), {3, 5, 7, 13, 19, 37, 73}) == 0);
  CHECK(eta_sum(make_geometric_shift(78559, 1), {3, 5, 7, 13, 19, 37, 73}) != 0);
}

TEST_CASE("mean number of prime factors") {
  const auto m = mean_omega_experiment(make_geometric_shift(1, -1), 20, RangeConvention::upto);
  CHECK(m.division_sequence);
  CHECK(m.omegas == std::vector<unsigned>{0, 1, 1, 2, 1, 3, 1, 3, 2, 3, 2, 5, 1, 3, 3, 4, 1, 6, 1, 6});
  CHECK(m.observed == doctest::Approx(49.0 / 20));
  CHECK(m.prediction == doctest::Approx(0.5 * std::log(20.0) * std::log(20.0)));
  CHECK_FALSE(m.lower_bound);

  const auto s = mean_omega_experiment(make_geometric_shift(1, -3), 30, RangeConvention::upto);
  CHECK_FALSE(s.division_sequence);
  CHECK(s.observed == doctest::Approx(26.0 / 15));
  CHECK(s.prediction == doctest::Approx(std::log(30.0)));

  const auto d = mean_omega_experiment(make_geometric_shift(1, -3), 10, RangeConvention::dyadic);
  CHECK(d.omegas.size() == 10);
  CHECK(d.omegas.front() == 2);  // 2^11 - 3 = 2045 = 5 * 409
}

TEST_CASE("omega is additive over the cyclotomic split") {
  const auto m = mean_omega_experiment(make_geometric_shift(1, -1), 60, RangeConvention::upto);
  REQUIRE(m.omegas.size() == 60);
  for (unsigned n = 1; n <= 60; ++n) REQUIRE(m.omegas[n - 1] == omega_big(factorize(pow2_minus(n, 1))));
}

TEST_CASE("moments") {
  const auto r = empirical_moments(8, 10, 1);
  CHECK(r.empirical == mpq_class(19, 10));
  CHECK(r.per_b == std::vector<std::pair<std::int64_t, std::uint64_t>>{{3, 6}, {5, 3}, {7, 4}, {9, 6}});
  CHECK(r.recompute() == r.empirical);
  CHECK(r.predicted == doctest::Approx(3.0));
  CHECK_FALSE(r.partial);

  MomentOptions opt;
  opt.cv_d_max = 1000;
  const auto r2 = empirical_moments(8, 10, 2, opt);
  CHECK(r2.empirical == mpq_class(36 + 9 + 16 + 36, 10));
  CHECK(r2.predicted == doctest::Approx(9.0 * cv_constant(1000).as_double()));

  MomentOptions threaded;
  threaded.threads = 3;
  CHECK(empirical_moments(64, 40, 1, threaded).per_b == empirical_moments(64, 40, 1).per_b);

  MomentOptions quick;
  quick.max_seconds = 1e-3;
  const auto p = empirical_moments(3000, 3000, 1, quick);
  CHECK(p.partial);
  CHECK(p.per_b.size() < 1499);
  for (std::size_t i = 0; i < p.per_b.size(); ++i) CHECK(p.per_b[i].first == static_cast<std::int64_t>(3 + 2 * i));
  CHECK(p.recompute() == p.empirical);
}
