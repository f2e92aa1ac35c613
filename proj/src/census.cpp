#include "recprimes/census.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <condition_variable>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include "recprimes/moddyn.hpp"

namespace recprimes {

namespace {

constexpr std::size_t kBlock = 64;

struct Entry {
  std::uint64_t n = 0;
  VerdictKind kind = VerdictKind::composite;
  std::size_t digits = 0;
  std::string method;
};

std::string hex64(std::uint64_t v) {
  std::ostringstream out;
  out << std::hex << v;
  return out.str();
}

std::optional<VerdictKind> parse_kind(const std::string& s) {
  if (s == "composite") return VerdictKind::composite;
  if (s == "probable_prime") return VerdictKind::probable_prime;
  if (s == "proven_prime") return VerdictKind::proven_prime;
  return std::nullopt;
}

std::map<std::uint64_t, Entry> replay_log(const std::string& path, const std::string& key) {
  std::map<std::uint64_t, Entry> out;
  std::ifstream in(path);
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream fields(line);
    std::string hash, kind;
    Entry e;
    if (!(fields >> hash >> e.n >> kind >> e.digits >> e.method) || hash != key) continue;
    const auto k = parse_kind(kind);
    if (!k) continue;
    e.kind = *k;
    out[e.n] = e;
  }
  return out;
}

class Classifier {
 public:
  Classifier(const LinearRecurrence& rec, const CensusPolicy& policy) : policy_(policy) {
    if (!policy.prefilter) return;
    const std::uint64_t cap = std::uint64_t{1} << 20;
    for (std::uint32_t p : small_primes(policy.prefilter_bound)) {
      const auto pr = period_mod_bounded(rec, p, cap);
      if (!pr) continue;
      ForbiddenClasses fc = forbidden_classes(rec, p, *pr);
      const bool useful = !fc.residues.empty() ||
                          std::any_of(fc.exceptions.begin(), fc.exceptions.end(), [](const auto& e) { return e.second; });
      if (useful) screens_.push_back(std::move(fc));
    }
  }

  Entry classify(std::uint64_t n, const Int& u) const {
    Entry e;
    e.n = n;
    const Int v = policy_.absolute ? Int(abs(u)) : u;
    e.digits = v == 0 ? 1 : Int(abs(v)).get_str().size();
    if (v <= 1) {
      e.method = "nonpositive";
      return e;
    }
    for (const auto& fc : screens_) {
      if (fc.divides(n) && v != fc.prime) {
        e.method = "prefilter:" + std::to_string(fc.prime);
        return e;
      }
    }
    TrialConfig trial;
    trial.plain_bound = policy_.trial_bound;
    if (policy_.form != FormRule::none) {
      trial.form_modulus = policy_.form == FormRule::index ? n : 2 * n;
      trial.k_bound = policy_.k_bound;
      trial.mod8_filter = policy_.mod8_filter;
    }
    if (const auto f = trial_division(v, trial)) {
      e.method = "trial:" + std::to_string(f->factor);
      return e;
    }
    const Verdict verdict = is_probable_prime(v, policy_.prp);
    e.kind = verdict.kind;
    e.method = verdict.method;
    return e;
  }

 private:
  const CensusPolicy& policy_;
  std::vector<ForbiddenClasses> screens_;
};

std::vector<Entry> run_block(const LinearRecurrence& rec, const Classifier& classifier,
                             const std::vector<std::uint64_t>& indices, std::size_t begin, std::size_t end,
                             const std::map<std::uint64_t, Entry>& replay) {
  std::vector<Entry> out;
  out.reserve(end - begin);
  const bool contiguous = indices[end - 1] - indices[begin] == end - 1 - begin;
  std::vector<Int> state;
  if (contiguous) state = state_at(rec, indices[begin]);
  for (std::size_t i = begin; i < end; ++i) {
    const std::uint64_t n = indices[i];
    if (auto it = replay.find(n); it != replay.end()) {
      out.push_back(it->second);
    } else {
      const Int u = contiguous ? state[0] : eval(rec, n);
      out.push_back(classifier.classify(n, u));
    }
    if (contiguous && i + 1 < end) step_state(rec, state);
  }
  return out;
}

const char* form_name(FormRule f) {
  switch (f) {
    case FormRule::none: return "none";
    case FormRule::index: return "index";
    case FormRule::twice_index: return "twice_index";
  }
  return "?";
}

}  // namespace

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string CensusPolicy::fingerprint() const {
  std::ostringstream out;
  out << "seed=" << prp.seed << ";rounds=" << prp.rounds << ";trial=" << trial_bound << ";form=" << form_name(form)
      << ";k=" << k_bound << ";mod8=" << mod8_filter << ";prefilter=" << (prefilter ? prefilter_bound : 0)
      << ";abs=" << absolute;
  return out.str();
}

std::size_t CensusReport::count_upto(std::uint64_t n) const {
  return static_cast<std::size_t>(
      std::upper_bound(hits.begin(), hits.end(), n, [](std::uint64_t v, const CensusHit& h) { return v < h.n; }) -
      hits.begin());
}

std::vector<std::uint64_t> CensusReport::indices() const {
  std::vector<std::uint64_t> out;
  for (const auto& h : hits) out.push_back(h.n);
  return out;
}

CensusReport census_indices(const LinearRecurrence& rec, std::uint64_t N, const std::vector<std::uint64_t>& indices,
                            const CensusPolicy& policy) {
  const auto t0 = std::chrono::steady_clock::now();
  CensusReport report;
  report.spec = rec.spec();
  report.N = N;
  report.policy = policy.fingerprint();

  const std::string key = hex64(fnv1a(rec.spec()));
  const auto replay = policy.log_path.empty() ? std::map<std::uint64_t, Entry>{} : replay_log(policy.log_path, key);
  std::ofstream log;
  if (!policy.log_path.empty()) log.open(policy.log_path, std::ios::app);

  const Classifier classifier(rec, policy);
  const std::size_t blocks = (indices.size() + kBlock - 1) / kBlock;
  std::vector<std::optional<std::vector<Entry>>> results(blocks);
  std::mutex mutex;
  std::condition_variable ready;
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;

  auto worker = [&] {
    for (std::size_t b; (b = next.fetch_add(1)) < blocks;) {
      std::vector<Entry> entries;
      try {
        const std::size_t begin = b * kBlock, end = std::min(indices.size(), begin + kBlock);
        entries = run_block(rec, classifier, indices, begin, end, replay);
      } catch (...) {
        std::lock_guard lock(mutex);
        if (!failure) failure = std::current_exception();
        next = blocks;
      }
      std::lock_guard lock(mutex);
      results[b] = std::move(entries);
      ready.notify_all();
    }
  };

  {
    std::vector<std::jthread> pool;
    const unsigned threads = std::max(1u, policy.threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);

    // Ordered reducer: consume blocks in index order as they complete.
    for (std::size_t b = 0; b < blocks; ++b) {
      std::vector<Entry> entries;
      {
        std::unique_lock lock(mutex);
        ready.wait(lock, [&] { return results[b].has_value() || failure; });
        if (failure && !results[b]) break;
        entries = std::move(*results[b]);
        results[b].reset();
      }
      for (const auto& e : entries) {
        ++report.tested;
        if (replay.count(e.n)) ++report.replayed;
        else if (log.is_open())
          log << key << ' ' << e.n << ' ' << to_string(e.kind) << ' ' << e.digits << ' ' << e.method << '\n';
        if (e.kind != VerdictKind::composite) report.hits.push_back({e.n, e.digits, e.kind, e.method});
      }
      if (log.is_open()) log.flush();
      if (policy.heartbeat) policy.heartbeat(std::min(indices.size(), (b + 1) * kBlock), indices.size());
    }
  }
  if (failure) std::rethrow_exception(failure);

  for (std::uint64_t c = 100; c <= N; c *= 10) {
    report.checkpoints.push_back({c, report.count_upto(c)});
    if (c > N / 10) break;
  }
  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

CensusReport census(const LinearRecurrence& rec, std::uint64_t N, const CensusPolicy& policy) {
  if (N < 1) throw std::invalid_argument("census needs N >= 1");
  std::vector<std::uint64_t> indices(N);
  for (std::uint64_t n = 1; n <= N; ++n) indices[n - 1] = n;
  return census_indices(rec, N, indices, policy);
}

CensusReport division_seq_census(const LinearRecurrence& rec, std::uint64_t N, std::uint64_t n0,
                                 const CensusPolicy& policy) {
  if (!is_division_sequence(rec)) throw NotDivisionSequence(rec.spec() + " is not tagged as a division sequence");
  if (n0 < 1) throw std::invalid_argument("division_seq_census needs n0 >= 1");
  const std::uint64_t small = (n0 - 1) * (n0 - 1);
  std::vector<std::uint64_t> indices;
  for (std::uint64_t n = 1; n <= N; ++n)
    if (n <= small || is_prime_u64(n)) indices.push_back(n);
  CensusReport r = census_indices(rec, N, indices, policy);
  r.pruned = true;
  return r;
}

CensusReport power_index_census(const LinearRecurrence& rec, std::uint64_t N, std::uint64_t base,
                                const CensusPolicy& policy) {
  if (base < 2) throw std::invalid_argument("power_index_census needs base >= 2");
  std::vector<std::uint64_t> indices;
  for (std::uint64_t n = 1; n <= N; n *= base) {
    indices.push_back(n);
    if (n > N / base) break;
  }
  CensusReport r = census_indices(rec, N, indices, policy);
  r.pruned = true;
  return r;
}

std::vector<std::uint64_t> simultaneous_census(const LinearRecurrence& a, const LinearRecurrence& b, std::uint64_t N,
                                               const CensusPolicy& policy) {
  const std::size_t window = a.order() + b.order();
  if (first_terms(a, window) == first_terms(b, window))
    throw InvalidSequence("simultaneous census needs distinct sequences");
  CensusPolicy p = policy;
  p.log_path.clear();
  const auto ha = census(a, N, p).indices();
  const auto hb = census(b, N, p).indices();
  std::vector<std::uint64_t> out;
  std::set_intersection(ha.begin(), ha.end(), hb.begin(), hb.end(), std::back_inserter(out));
  return out;
}

BFileError::BFileError(std::size_t line, const std::string& what)
    : std::runtime_error("b-file line " + std::to_string(line) + ": " + what), line_(line) {}

std::vector<std::uint64_t> parse_bfile(std::istream& in) {
  std::vector<std::uint64_t> out;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    std::string idx, value, extra;
    if (!(fields >> idx >> value) || (fields >> extra)) throw BFileError(number, "expected `n a(n)`");
    const auto numeric = [](const std::string& s) {
      return !s.empty() && std::all_of(s.begin() + (s[0] == '-' ? 1 : 0), s.end(), [](char c) { return c >= '0' && c <= '9'; }) &&
             s != "-";
    };
    if (!numeric(idx) || !numeric(value)) throw BFileError(number, "non-numeric field");
    if (value[0] == '-' || value.size() > 19) throw BFileError(number, "value out of range");
    out.push_back(std::stoull(value));
  }
  return out;
}

std::vector<std::uint64_t> load_bfile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open b-file " + path);
  return parse_bfile(in);
}

CrosscheckDiff oeis_crosscheck(const CensusReport& report, const std::vector<std::uint64_t>& bfile) {
  CrosscheckDiff diff;
  const std::uint64_t bmax = bfile.empty() ? 0 : *std::max_element(bfile.begin(), bfile.end());
  diff.limit = std::min(report.N, bmax);
  std::vector<std::uint64_t> ours, theirs;
  for (const auto& h : report.hits)
    if (h.n <= diff.limit) ours.push_back(h.n);
  for (std::uint64_t v : bfile)
    if (v <= diff.limit) theirs.push_back(v);
  std::sort(theirs.begin(), theirs.end());
  theirs.erase(std::unique(theirs.begin(), theirs.end()), theirs.end());
  std::set_difference(ours.begin(), ours.end(), theirs.begin(), theirs.end(), std::back_inserter(diff.only_in_report));
  std::set_difference(theirs.begin(), theirs.end(), ours.begin(), ours.end(), std::back_inserter(diff.only_in_bfile));
  return diff;
}

}  // namespace recprimes
