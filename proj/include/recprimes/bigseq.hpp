#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <gmpxx.h>

namespace recprimes {

using Int = mpz_class;

class LinearRecurrence;

// Structural tags. They never change the recurrence law; they only enable
// closed-form evaluation and let other modules recognise special families.
struct Generic {};
struct GeometricShift { Int a, b; };                 // a*2^n + b
struct TwoTerm { Int alpha, beta; bool divided; };   // (alpha^n - beta^n)[/(alpha-beta)]
struct Lucas { Int a, b; };                          // u_n = a u_{n-1} + b u_{n-2}, u_0=0, u_1=1
struct FibonacciShift { Int c; };                    // F_n + c
struct RepunitRatio { unsigned p; Int base; };       // (base^{pn}-1)/(base^n-1)
struct Combination {
  std::shared_ptr<const std::vector<LinearRecurrence>> parts;
};

using SequenceTag = std::variant<Generic, GeometricShift, TwoTerm, Lucas,
                                 FibonacciShift, RepunitRatio, Combination>;

class InvalidSequence : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Integer linear recurrence u_{n+k} = a_1 u_{n+k-1} + ... + a_k u_n.
///
/// Values are immutable after construction and safe to share across threads.
class LinearRecurrence {
 public:
  LinearRecurrence(std::vector<Int> coefficients, std::vector<Int> initial,
                   SequenceTag tag = Generic{}, std::string spec = {});

  std::size_t order() const { return coefficients_.size(); }
  const std::vector<Int>& coefficients() const { return coefficients_; }
  const std::vector<Int>& initial_terms() const { return initial_; }
  const SequenceTag& tag() const { return tag_; }

  /// Canonical mini-grammar string (see parse_sequence).
  const std::string& spec() const { return spec_; }

  template <class T>
  const T* tag_as() const { return std::get_if<T>(&tag_); }

 private:
  std::vector<Int> coefficients_;
  std::vector<Int> initial_;
  SequenceTag tag_;
  std::string spec_;
};

LinearRecurrence make_custom(std::vector<Int> coefficients, std::vector<Int> initial);
LinearRecurrence make_geometric_shift(const Int& a, const Int& b);
LinearRecurrence make_two_term(const Int& alpha, const Int& beta, bool divide_by_difference);
LinearRecurrence make_lucas(const Int& a, const Int& b);
LinearRecurrence make_fibonacci_shift(const Int& c);
LinearRecurrence make_repunit_ratio(unsigned p, const Int& base);

/// Interleaves q = parts.size() sequences: U_{a + m q} = parts[a]_m.
/// The stored recurrence is lcm_a f_a(T^q).
LinearRecurrence combine(std::vector<LinearRecurrence> parts);

/// Exact term u_n. Tagged families use closed forms or binary powering;
/// everything else uses companion-matrix powering.
Int eval(const LinearRecurrence& rec, std::uint64_t n);

/// Reference path: unrolls the recurrence from the initial terms.
Int eval_by_unrolling(const LinearRecurrence& rec, std::uint64_t n);

/// The first `count` terms, by unrolling.
std::vector<Int> first_terms(const LinearRecurrence& rec, std::size_t count);

/// State vector (u_n, ..., u_{n+k-1}).
std::vector<Int> state_at(const LinearRecurrence& rec, std::uint64_t n);

/// Advances a state vector by one index in place.
void step_state(const LinearRecurrence& rec, std::vector<Int>& state);

struct CharPoly {
  /// Monic f(T) = T^k - a_1 T^{k-1} - ... - a_k, highest degree first.
  std::vector<Int> coefficients;
  /// Largest modulus among the roots of f.
  double dominant_root = 0.0;
  double error_bound = 0.0;
  bool exact = false;  // the dominant root is a rational integer
};

CharPoly char_poly(const LinearRecurrence& rec);

/// True for the tagged strong division families (Lucas, two-term, a(2^n-1)).
bool is_division_sequence(const LinearRecurrence& rec);

class NotDivisionSequence : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// phi_n = prod_{m | n} x_m^{mu(n/m)}; throws NotDivisionSequence when the
/// quotient is not integral or a needed term vanishes.
Int phi_decomposition(const LinearRecurrence& divseq, std::uint64_t n);

/// F_m + sign = F_i * L_j with (i, j) chosen by m mod 4 and sign.
struct ShiftFactorization {
  std::uint64_t fib_index;
  std::uint64_t lucas_index;
};
ShiftFactorization fibonacci_shift_identity(std::uint64_t m, int sign);

Int fibonacci(std::uint64_t n);
Int lucas_number(std::uint64_t n);

/// Parses `geom:a,b` | `twoterm:A,B[,div]` | `lucas:a,b` | `fibshift:c` |
/// `repunit:p,base` | `custom:[a1,...,ak];[u0,...,uk-1]` | `combine:q;spec;...`.
LinearRecurrence parse_sequence(std::string_view spec);

}  // namespace recprimes
