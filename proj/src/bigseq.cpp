#include "recprimes/bigseq.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>

#include <Eigen/Dense>

#include "recprimes/arith.hpp"

namespace recprimes {

namespace {

std::string join_ints(const std::vector<Int>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += v[i].get_str();
  }
  return out;
}

std::string custom_spec(const std::vector<Int>& coeffs, const std::vector<Int>& init) {
  return "custom:[" + join_ints(coeffs) + "];[" + join_ints(init) + "]";
}

// Polynomials over Q, ascending degree.
using QPoly = std::vector<mpq_class>;

void trim(QPoly& p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
}

QPoly poly_mod(QPoly a, const QPoly& b) {
  trim(a);
  const std::size_t db = b.size() - 1;
  while (a.size() >= b.size()) {
    const mpq_class factor = a.back() / b.back();
    const std::size_t shift = a.size() - 1 - db;
    for (std::size_t i = 0; i <= db; ++i) a[shift + i] -= factor * b[i];
    trim(a);
  }
  return a;
}

QPoly poly_gcd(QPoly a, QPoly b) {
  trim(a);
  trim(b);
  while (!b.empty()) {
    QPoly r = poly_mod(a, b);
    a = std::move(b);
    b = std::move(r);
  }
  const mpq_class lead = a.back();
  for (auto& c : a) c /= lead;
  return a;
}

QPoly poly_mul(const QPoly& a, const QPoly& b) {
  QPoly out(a.size() + b.size() - 1, mpq_class(0));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

QPoly poly_divexact(QPoly a, const QPoly& b) {
  trim(a);
  const std::size_t db = b.size() - 1;
  QPoly q(a.size() - db, mpq_class(0));
  while (a.size() >= b.size()) {
    const mpq_class factor = a.back() / b.back();
    const std::size_t shift = a.size() - 1 - db;
    q[shift] = factor;
    for (std::size_t i = 0; i <= db; ++i) a[shift + i] -= factor * b[i];
    trim(a);
  }
  return q;
}

// f(T) = T^k - a_1 T^{k-1} - ... - a_k in ascending order.
QPoly char_poly_ascending(const LinearRecurrence& rec) {
  const std::size_t k = rec.order();
  QPoly f(k + 1);
  f[k] = 1;
  for (std::size_t i = 1; i <= k; ++i) f[k - i] = -rec.coefficients()[i - 1];
  return f;
}

// r(T) * s(T) mod f(T), where T^k = a_1 T^{k-1} + ... + a_k.
std::vector<Int> mulmod_charpoly(const std::vector<Int>& r, const std::vector<Int>& s,
                                 const std::vector<Int>& coeffs) {
  const std::size_t k = coeffs.size();
  std::vector<Int> prod(2 * k - 1);
  for (std::size_t i = 0; i < k; ++i) {
    if (r[i] == 0) continue;
    for (std::size_t j = 0; j < k; ++j) prod[i + j] += r[i] * s[j];
  }
  for (std::size_t d = 2 * k - 2; d >= k; --d) {
    if (prod[d] == 0) continue;
    // T^d = T^{d-k} * (a_1 T^{k-1} + ... + a_k)
    for (std::size_t i = 1; i <= k; ++i) prod[d - i] += prod[d] * coeffs[i - 1];
    prod[d] = 0;
  }
  prod.resize(k);
  return prod;
}

std::vector<Int> times_t_mod(const std::vector<Int>& r, const std::vector<Int>& coeffs) {
  const std::size_t k = coeffs.size();
  std::vector<Int> out(k);
  const Int top = r[k - 1];
  for (std::size_t i = k - 1; i > 0; --i) out[i] = r[i - 1];
  out[0] = 0;
  for (std::size_t i = 1; i <= k; ++i) out[k - i] += top * coeffs[i - 1];
  return out;
}

// T^n mod f(T) as a coefficient vector of length k.
std::vector<Int> power_of_t(std::uint64_t n, const std::vector<Int>& coeffs) {
  const std::size_t k = coeffs.size();
  std::vector<Int> result(k), base(k);
  result[0] = 1;
  if (k == 1) {
    Int v;
    mpz_pow_ui(v.get_mpz_t(), coeffs[0].get_mpz_t(), n);
    result[0] = v;
    return result;
  }
  base[1] = 1;
  while (n) {
    if (n & 1) result = mulmod_charpoly(result, base, coeffs);
    n >>= 1;
    if (n) base = mulmod_charpoly(base, base, coeffs);
  }
  return result;
}

Int dot(const std::vector<Int>& r, const std::vector<Int>& init) {
  Int acc = 0;
  for (std::size_t i = 0; i < r.size(); ++i) acc += r[i] * init[i];
  return acc;
}

Int pow_int(const Int& base, std::uint64_t e) {
  Int out;
  mpz_pow_ui(out.get_mpz_t(), base.get_mpz_t(), e);
  return out;
}

// [[a, b], [1, 0]]^n applied to (u_1, u_0) = (1, 0).
Int lucas_term(const Int& a, const Int& b, std::uint64_t n) {
  Int m00 = 1, m01 = 0, m10 = 0, m11 = 1;  // accumulator
  Int p00 = a, p01 = b, p10 = 1, p11 = 0;  // base
  while (n) {
    if (n & 1) {
      Int t00 = m00 * p00 + m01 * p10, t01 = m00 * p01 + m01 * p11;
      Int t10 = m10 * p00 + m11 * p10, t11 = m10 * p01 + m11 * p11;
      m00 = t00; m01 = t01; m10 = t10; m11 = t11;
    }
    n >>= 1;
    if (n) {
      Int t00 = p00 * p00 + p01 * p10, t01 = p00 * p01 + p01 * p11;
      Int t10 = p10 * p00 + p11 * p10, t11 = p10 * p01 + p11 * p11;
      p00 = t00; p01 = t01; p10 = t10; p11 = t11;
    }
  }
  return m10;
}

long double horner(const std::vector<Int>& desc, long double x) {
  long double acc = 0;
  for (const auto& c : desc) acc = acc * x + c.get_d();
  return acc;
}

std::complex<long double> horner(const std::vector<Int>& desc, std::complex<long double> x) {
  std::complex<long double> acc = 0;
  for (const auto& c : desc) acc = acc * x + static_cast<long double>(c.get_d());
  return acc;
}

std::complex<long double> horner_derivative(const std::vector<Int>& desc,
                                            std::complex<long double> x) {
  std::complex<long double> acc = 0;
  const std::size_t deg = desc.size() - 1;
  for (std::size_t i = 0; i < deg; ++i)
    acc = acc * x + static_cast<long double>(desc[i].get_d()) * static_cast<long double>(deg - i);
  return acc;
}

bool exact_root(const std::vector<Int>& desc, const Int& r) {
  Int acc = 0;
  for (const auto& c : desc) acc = acc * r + c;
  return acc == 0;
}

}  // namespace

LinearRecurrence::LinearRecurrence(std::vector<Int> coefficients, std::vector<Int> initial,
                                   SequenceTag tag, std::string spec)
    : coefficients_(std::move(coefficients)),
      initial_(std::move(initial)),
      tag_(std::move(tag)),
      spec_(std::move(spec)) {
  if (coefficients_.empty()) throw InvalidSequence("recurrence order must be positive");
  if (coefficients_.size() != initial_.size())
    throw InvalidSequence("need exactly k initial terms for an order-k recurrence");
  if (coefficients_.back() == 0) throw InvalidSequence("a_k must be nonzero");
  if (spec_.empty()) spec_ = custom_spec(coefficients_, initial_);
}

LinearRecurrence make_custom(std::vector<Int> coefficients, std::vector<Int> initial) {
  return LinearRecurrence(std::move(coefficients), std::move(initial));
}

LinearRecurrence make_geometric_shift(const Int& a, const Int& b) {
  if (a == 0) throw InvalidSequence("geometric shift needs a != 0");
  return LinearRecurrence({3, -2}, {a + b, 2 * a + b}, GeometricShift{a, b},
                          "geom:" + a.get_str() + "," + b.get_str());
}

LinearRecurrence make_two_term(const Int& alpha, const Int& beta, bool divide_by_difference) {
  if (alpha == beta) throw InvalidSequence("two-term sequence needs alpha != beta");
  if (!(alpha > abs(beta) && abs(beta) >= 1))
    throw InvalidSequence("two-term sequence needs alpha > |beta| >= 1");
  if (gcd(alpha, beta) != 1) throw InvalidSequence("two-term sequence needs gcd(alpha, beta) = 1");
  const Int u1 = divide_by_difference ? Int(1) : Int(alpha - beta);
  std::string spec = "twoterm:" + alpha.get_str() + "," + beta.get_str();
  if (divide_by_difference) spec += ",div";
  return LinearRecurrence({alpha + beta, -alpha * beta}, {0, u1},
                          TwoTerm{alpha, beta, divide_by_difference}, std::move(spec));
}

LinearRecurrence make_lucas(const Int& a, const Int& b) {
  if (a * a + 4 * b <= 0) throw InvalidSequence("Lucas sequence needs a^2 + 4b > 0");
  if (b == 0) throw InvalidSequence("Lucas sequence needs b != 0");
  return LinearRecurrence({a, b}, {0, 1}, Lucas{a, b},
                          "lucas:" + a.get_str() + "," + b.get_str());
}

LinearRecurrence make_fibonacci_shift(const Int& c) {
  // (T - 1)(T^2 - T - 1) = T^3 - 2T^2 + 1
  return LinearRecurrence({2, 0, -1}, {c, 1 + c, 1 + c}, FibonacciShift{c},
                          "fibshift:" + c.get_str());
}

LinearRecurrence make_repunit_ratio(unsigned p, const Int& base) {
  if (p < 2) throw InvalidSequence("repunit ratio needs p >= 2");
  if (base < 2) throw InvalidSequence("repunit ratio needs base >= 2");
  // Roots base^0, ..., base^{p-1}.
  std::vector<Int> poly{1};  // descending, monic
  for (unsigned j = 0; j < p; ++j) {
    const Int root = pow_int(base, j);
    std::vector<Int> next(poly.size() + 1);
    for (std::size_t i = 0; i < poly.size(); ++i) {
      next[i] += poly[i];
      next[i + 1] -= root * poly[i];
    }
    poly = std::move(next);
  }
  std::vector<Int> coeffs(p), init(p);
  for (unsigned i = 1; i <= p; ++i) coeffs[i - 1] = -poly[i];
  for (unsigned n = 0; n < p; ++n) {
    Int acc = 0;
    for (unsigned j = 0; j < p; ++j) acc += pow_int(base, std::uint64_t{j} * n);
    init[n] = acc;
  }
  return LinearRecurrence(std::move(coeffs), std::move(init), RepunitRatio{p, base},
                          "repunit:" + std::to_string(p) + "," + base.get_str());
}

LinearRecurrence combine(std::vector<LinearRecurrence> parts) {
  if (parts.size() < 2) throw InvalidSequence("combination needs at least two parts");
  const std::size_t q = parts.size();

  QPoly lcm_poly{mpq_class(1)};
  for (const auto& part : parts) {
    const QPoly f = char_poly_ascending(part);
    QPoly fq((f.size() - 1) * q + 1, mpq_class(0));
    for (std::size_t j = 0; j < f.size(); ++j) fq[j * q] = f[j];
    const QPoly g = poly_gcd(lcm_poly, fq);
    lcm_poly = poly_divexact(poly_mul(lcm_poly, fq), g);
  }
  const std::size_t order = lcm_poly.size() - 1;
  std::vector<Int> coeffs(order);
  for (std::size_t i = 1; i <= order; ++i) {
    const mpq_class& c = lcm_poly[order - i];
    if (c.get_den() != 1) throw InvalidSequence("combination polynomial is not integral");
    coeffs[i - 1] = -c.get_num();
  }

  std::vector<std::vector<Int>> heads;
  for (const auto& part : parts) heads.push_back(first_terms(part, order / q + 2));
  std::vector<Int> init(order);
  for (std::size_t n = 0; n < order; ++n) init[n] = heads[n % q][n / q];

  std::string spec = "combine:" + std::to_string(q);
  for (const auto& part : parts) spec += ";" + part.spec();
  auto shared = std::make_shared<const std::vector<LinearRecurrence>>(std::move(parts));
  return LinearRecurrence(std::move(coeffs), std::move(init), Combination{std::move(shared)},
                          std::move(spec));
}

std::vector<Int> first_terms(const LinearRecurrence& rec, std::size_t count) {
  const std::size_t k = rec.order();
  std::vector<Int> out(rec.initial_terms().begin(),
                       rec.initial_terms().begin() + std::min(k, count));
  out.reserve(count);
  while (out.size() < count) {
    Int next = 0;
    const std::size_t n = out.size();
    for (std::size_t i = 1; i <= k; ++i) next += rec.coefficients()[i - 1] * out[n - i];
    out.push_back(std::move(next));
  }
  return out;
}

Int eval_by_unrolling(const LinearRecurrence& rec, std::uint64_t n) {
  const std::size_t k = rec.order();
  if (n < k) return rec.initial_terms()[n];
  std::vector<Int> state = rec.initial_terms();
  for (std::uint64_t i = 0; i + k <= n; ++i) step_state(rec, state);
  return state[k - 1];
}

void step_state(const LinearRecurrence& rec, std::vector<Int>& state) {
  const std::size_t k = rec.order();
  Int next = 0;
  for (std::size_t i = 1; i <= k; ++i) next += rec.coefficients()[i - 1] * state[k - i];
  std::rotate(state.begin(), state.begin() + 1, state.end());
  state[k - 1] = std::move(next);
}

std::vector<Int> state_at(const LinearRecurrence& rec, std::uint64_t n) {
  const std::size_t k = rec.order();
  std::vector<Int> r = power_of_t(n, rec.coefficients());
  std::vector<Int> state(k);
  for (std::size_t j = 0; j < k; ++j) {
    state[j] = dot(r, rec.initial_terms());
    if (j + 1 < k) r = times_t_mod(r, rec.coefficients());
  }
  return state;
}

Int eval(const LinearRecurrence& rec, std::uint64_t n) {
  struct Visitor {
    const LinearRecurrence& rec;
    std::uint64_t n;
    Int operator()(const Generic&) const { return dot(power_of_t(n, rec.coefficients()), rec.initial_terms()); }
    Int operator()(const GeometricShift& g) const {
      Int v;
      mpz_mul_2exp(v.get_mpz_t(), g.a.get_mpz_t(), n);
      return v + g.b;
    }
    Int operator()(const TwoTerm& t) const {
      Int v = pow_int(t.alpha, n) - pow_int(t.beta, n);
      if (t.divided) {
        const Int d = t.alpha - t.beta;
        mpz_divexact(v.get_mpz_t(), v.get_mpz_t(), d.get_mpz_t());
      }
      return v;
    }
    Int operator()(const Lucas& l) const {
      if (l.a == 1 && l.b == 1) return fibonacci(n);
      return lucas_term(l.a, l.b, n);
    }
    Int operator()(const FibonacciShift& f) const { return fibonacci(n) + f.c; }
    Int operator()(const RepunitRatio& r) const {
      Int acc = 0;
      const Int step = pow_int(r.base, n);
      Int term = 1;
      for (unsigned j = 0; j < r.p; ++j) {
        acc += term;
        term *= step;
      }
      return acc;
    }
    Int operator()(const Combination& c) const {
      const std::size_t q = c.parts->size();
      return eval((*c.parts)[n % q], n / q);
    }
  };
  return std::visit(Visitor{rec, n}, rec.tag());
}

CharPoly char_poly(const LinearRecurrence& rec) {
  const std::size_t k = rec.order();
  CharPoly out;
  out.coefficients.resize(k + 1);
  out.coefficients[0] = 1;
  for (std::size_t i = 1; i <= k; ++i) out.coefficients[i] = -rec.coefficients()[i - 1];

  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(k, k);
  for (std::size_t i = 0; i < k; ++i) companion(0, i) = rec.coefficients()[i].get_d();
  for (std::size_t i = 1; i < k; ++i) companion(i, i - 1) = 1.0;
  const Eigen::VectorXcd roots = Eigen::EigenSolver<Eigen::MatrixXd>(companion, false).eigenvalues();

  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < roots.size(); ++i)
    if (std::abs(roots[i]) > std::abs(roots[best])) best = i;
  const std::complex<double> root = roots[best];
  const double modulus = std::abs(root);

  // Integer dominant roots are detected exactly.
  const Int candidate(static_cast<long>(std::llround(modulus)));
  for (const Int& r : {candidate, Int(-candidate)}) {
    if (candidate != 0 && exact_root(out.coefficients, r) &&
        std::abs(modulus - candidate.get_d()) < 1e-3 * std::max(1.0, modulus)) {
      out.dominant_root = candidate.get_d();
      out.error_bound = 0.0;
      out.exact = true;
      return out;
    }
  }

  if (std::abs(root.imag()) <= 1e-7 * std::max(1.0, modulus)) {
    // Real root: bracket and bisect.
    long double lo = root.real() - 1e-6L * std::max(1.0, modulus);
    long double hi = root.real() + 1e-6L * std::max(1.0, modulus);
    long double flo = horner(out.coefficients, lo), fhi = horner(out.coefficients, hi);
    if ((flo < 0) != (fhi < 0)) {
      while (hi - lo > 1e-13L * std::max(1.0, modulus)) {
        const long double mid = (lo + hi) / 2;
        const long double fmid = horner(out.coefficients, mid);
        if ((fmid < 0) == (flo < 0)) {
          lo = mid;
          flo = fmid;
        } else {
          hi = mid;
        }
      }
      out.dominant_root = static_cast<double>(std::fabs((lo + hi) / 2));
      out.error_bound = static_cast<double>(hi - lo);
      return out;
    }
  }

  // Complex or even-multiplicity root: Newton polish.
  std::complex<long double> z(root.real(), root.imag());
  for (int it = 0; it < 50; ++it) {
    const auto d = horner_derivative(out.coefficients, z);
    if (std::abs(d) == 0) break;
    const auto delta = horner(out.coefficients, z) / d;
    z -= delta;
    if (std::abs(delta) < 1e-15L * std::max<long double>(1, std::abs(z))) break;
  }
  const auto d = horner_derivative(out.coefficients, z);
  out.dominant_root = static_cast<double>(std::abs(z));
  out.error_bound = std::abs(d) > 0
                        ? static_cast<double>(k * std::abs(horner(out.coefficients, z) / d))
                        : 1e-6;
  out.error_bound = std::max(out.error_bound, 1e-15 * out.dominant_root);
  return out;
}

bool is_division_sequence(const LinearRecurrence& rec) {
  if (rec.tag_as<TwoTerm>() || rec.tag_as<Lucas>()) return true;
  if (const auto* g = rec.tag_as<GeometricShift>()) return g->a == -g->b;
  return false;
}

Int phi_decomposition(const LinearRecurrence& divseq, std::uint64_t n) {
  if (n == 0) throw NotDivisionSequence("phi_n is defined for n >= 1");
  Int numerator = 1, denominator = 1;
  for (std::uint64_t m = 1; m <= n; ++m) {
    if (n % m) continue;
    const int mu = moebius(n / m);
    if (mu == 0) continue;
    const Int x = eval(divseq, m);
    if (x == 0) throw NotDivisionSequence("x_" + std::to_string(m) + " vanishes");
    (mu > 0 ? numerator : denominator) *= x;
  }
  if (!mpz_divisible_p(numerator.get_mpz_t(), denominator.get_mpz_t()))
    throw NotDivisionSequence("phi_" + std::to_string(n) + " is not integral");
  Int out;
  mpz_divexact(out.get_mpz_t(), numerator.get_mpz_t(), denominator.get_mpz_t());
  return out;
}

ShiftFactorization fibonacci_shift_identity(std::uint64_t m, int sign) {
  if (m == 0) throw std::invalid_argument("fibonacci_shift_identity needs m >= 1");
  if (sign != 1 && sign != -1) throw std::invalid_argument("sign must be +1 or -1");
  const std::uint64_t n = m / 4;
  const bool minus = sign < 0;
  switch (m % 4) {
    case 0: return minus ? ShiftFactorization{2 * n + 1, 2 * n - 1} : ShiftFactorization{2 * n - 1, 2 * n + 1};
    case 1: return minus ? ShiftFactorization{2 * n, 2 * n + 1} : ShiftFactorization{2 * n + 1, 2 * n};
    case 2: return minus ? ShiftFactorization{2 * n, 2 * n + 2} : ShiftFactorization{2 * n + 2, 2 * n};
    default: return minus ? ShiftFactorization{2 * n + 2, 2 * n + 1} : ShiftFactorization{2 * n + 1, 2 * n + 2};
  }
}

Int fibonacci(std::uint64_t n) {
  Int out;
  mpz_fib_ui(out.get_mpz_t(), n);
  return out;
}

Int lucas_number(std::uint64_t n) {
  Int out;
  mpz_lucnum_ui(out.get_mpz_t(), n);
  return out;
}

// ---------------------------------------------------------------------------
// Mini-grammar

namespace {

class SpecParser {
 public:
  explicit SpecParser(std::string_view text) : text_(text) {}

  LinearRecurrence parse_all() {
    LinearRecurrence rec = parse_one();
    if (pos_ != text_.size()) fail("trailing characters");
    return rec;
  }

 private:
  [[noreturn]] void fail(const std::string& why) const {
    throw InvalidSequence("bad sequence spec '" + std::string(text_) + "' at offset " +
                          std::to_string(pos_) + ": " + why);
  }

  bool eat(char c) {
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!eat(c)) fail(std::string("expected '") + c + "'");
  }

  Int integer() {
    const std::size_t start = pos_;
    if (pos_ < text_.size() && text_[pos_] == '-') ++pos_;
    const std::size_t digits = pos_;
    while (pos_ < text_.size() && text_[pos_] >= '0' && text_[pos_] <= '9') ++pos_;
    if (pos_ == digits) fail("expected an integer");
    return Int(std::string(text_.substr(start, pos_ - start)));
  }

  std::vector<Int> int_list() {
    expect('[');
    std::vector<Int> out;
    if (eat(']')) return out;
    do {
      out.push_back(integer());
    } while (eat(','));
    expect(']');
    return out;
  }

  std::string keyword() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && text_[pos_] >= 'a' && text_[pos_] <= 'z') ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }

  LinearRecurrence parse_one() {
    const std::string kind = keyword();
    expect(':');
    if (kind == "geom") {
      Int a = integer();
      expect(',');
      return make_geometric_shift(a, integer());
    }
    if (kind == "twoterm") {
      Int alpha = integer();
      expect(',');
      Int beta = integer();
      bool divided = false;
      if (eat(',')) {
        const std::string flag = keyword();
        if (flag != "div") fail("expected 'div'");
        divided = true;
      }
      return make_two_term(alpha, beta, divided);
    }
    if (kind == "lucas") {
      Int a = integer();
      expect(',');
      return make_lucas(a, integer());
    }
    if (kind == "fibshift") return make_fibonacci_shift(integer());
    if (kind == "repunit") {
      const Int p = integer();
      expect(',');
      if (p < 2 || p > 64) fail("repunit p out of range");
      return make_repunit_ratio(static_cast<unsigned>(p.get_ui()), integer());
    }
    if (kind == "custom") {
      auto coeffs = int_list();
      expect(';');
      auto init = int_list();
      return make_custom(std::move(coeffs), std::move(init));
    }
    if (kind == "combine") {
      const Int q = integer();
      if (q < 2 || q > 64) fail("combine q out of range");
      std::vector<LinearRecurrence> parts;
      for (unsigned long i = 0; i < q.get_ui(); ++i) {
        expect(';');
        parts.push_back(parse_one());
      }
      return combine(std::move(parts));
    }
    fail("unknown sequence kind '" + kind + "'");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

LinearRecurrence parse_sequence(std::string_view spec) { return SpecParser(spec).parse_all(); }

}  // namespace recprimes
