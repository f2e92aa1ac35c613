#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "recprimes/arith.hpp"
#include "recprimes/bigseq.hpp"

namespace recprimes {

enum class FormRule { none, index, twice_index };

struct CensusPolicy {
  PrpPolicy prp;
  std::uint64_t trial_bound = 10000;
  FormRule form = FormRule::none;    // extra trial divisors k*n+1 or k*2n+1
  std::uint64_t k_bound = 0;
  bool mod8_filter = false;
  bool prefilter = true;             // forbidden-class screen by small primes
  std::uint32_t prefilter_bound = 1000;
  unsigned threads = 1;
  bool absolute = false;             // count |u_n| instead of positive u_n only
  std::string log_path;              // append-only verdict log; replayed on start
  std::function<void(std::uint64_t done, std::uint64_t total)> heartbeat;

  std::string fingerprint() const;
};

struct CensusHit {
  std::uint64_t n = 0;
  std::size_t digits = 0;
  VerdictKind kind = VerdictKind::probable_prime;
  std::string method;

  bool operator==(const CensusHit&) const = default;
};

struct Checkpoint {
  std::uint64_t N;
  std::size_t count;

  bool operator==(const Checkpoint&) const = default;
};

struct CensusReport {
  std::string spec;
  std::uint64_t N = 0;
  std::vector<CensusHit> hits;
  std::vector<Checkpoint> checkpoints;  // prefix counts at 10^2, 10^3, ... <= N
  std::string policy;
  double wall_seconds = 0.0;
  bool pruned = false;
  bool partial = false;
  std::uint64_t tested = 0;    // indices examined
  std::uint64_t replayed = 0;  // verdicts taken from the log

  std::size_t count() const { return hits.size(); }
  std::size_t count_upto(std::uint64_t n) const;
  std::vector<std::uint64_t> indices() const;
};

/// Every 1 <= n <= N with u_n a (probable) prime.
CensusReport census(const LinearRecurrence& rec, std::uint64_t N, const CensusPolicy& policy = {});

/// Census restricted to a sorted index list (the report covers 1..N).
CensusReport census_indices(const LinearRecurrence& rec, std::uint64_t N, const std::vector<std::uint64_t>& indices,
                            const CensusPolicy& policy = {});

/// Division sequences: only prime n and n <= (n0 - 1)^2 can give primes.
CensusReport division_seq_census(const LinearRecurrence& rec, std::uint64_t N, std::uint64_t n0,
                                 const CensusPolicy& policy = {});

/// Only n = base^m (m >= 0); used for 2^n + 1 (base 2) and repunit ratios (base p).
CensusReport power_index_census(const LinearRecurrence& rec, std::uint64_t N, std::uint64_t base,
                                const CensusPolicy& policy = {});

/// n <= N where both sequences take (probable) prime values.
std::vector<std::uint64_t> simultaneous_census(const LinearRecurrence& a, const LinearRecurrence& b, std::uint64_t N,
                                               const CensusPolicy& policy = {});

class BFileError : public std::runtime_error {
 public:
  BFileError(std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Values a(n) of an OEIS b-file (`n a(n)` lines, `#` comments).
std::vector<std::uint64_t> parse_bfile(std::istream& in);
std::vector<std::uint64_t> load_bfile(const std::string& path);

struct CrosscheckDiff {
  std::uint64_t limit = 0;
  std::vector<std::uint64_t> only_in_report;
  std::vector<std::uint64_t> only_in_bfile;

  bool empty() const { return only_in_report.empty() && only_in_bfile.empty(); }
};

CrosscheckDiff oeis_crosscheck(const CensusReport& report, const std::vector<std::uint64_t>& bfile);

std::uint64_t fnv1a(std::string_view text);

}  // namespace recprimes
