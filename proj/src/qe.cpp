#include "qxlab/qe.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "qxlab/rng.hpp"

namespace qxlab {

namespace {

// Fixed-width bitset over signed offsets [-w, w], with shifted-OR transitions.
class OffsetBits {
 public:
  explicit OffsetBits(long long w) : w_(w), nbits_(2 * w + 1) {
    words_.assign(std::size_t((nbits_ + 63) / 64), 0);
  }

  bool get(long long s) const {
    const long long i = s + w_;
    if (i < 0 || i >= nbits_) return false;
    return (words_[std::size_t(i >> 6)] >> (i & 63)) & 1u;
  }

  void set(long long s) {
    const long long i = s + w_;
    words_[std::size_t(i >> 6)] |= (std::uint64_t(1) << (i & 63));
  }

  /// this |= (src shifted by `shift` offsets); bits shifted outside are lost
  /// (they cannot occur here: transitions stay within [-w, w] by construction).
  void or_shifted(const OffsetBits& src, long long shift) {
    if (shift >= 0) {
      const long long word_shift = shift >> 6;
      const int bit_shift = int(shift & 63);
      const long long nw = (long long)words_.size();
      for (long long i = nw - 1; i >= word_shift; --i) {
        std::uint64_t v = src.words_[std::size_t(i - word_shift)] << bit_shift;
        if (bit_shift && i - word_shift - 1 >= 0)
          v |= src.words_[std::size_t(i - word_shift - 1)] >> (64 - bit_shift);
        words_[std::size_t(i)] |= v;
      }
    } else {
      const long long s = -shift;
      const long long word_shift = s >> 6;
      const int bit_shift = int(s & 63);
      const long long nw = (long long)words_.size();
      for (long long i = 0; i + word_shift < nw; ++i) {
        std::uint64_t v = src.words_[std::size_t(i + word_shift)] >> bit_shift;
        if (bit_shift && i + word_shift + 1 < nw)
          v |= src.words_[std::size_t(i + word_shift + 1)] << (64 - bit_shift);
        words_[std::size_t(i)] |= v;
      }
    }
    mask_top();
  }

  long long popcount_limit2() const {  // 0, 1, or 2-means-"at least 2"
    long long c = 0;
    for (auto v : words_) {
      c += __builtin_popcountll(v);
      if (c >= 2) return 2;
    }
    return c;
  }

  template <typename F>
  void for_each_set(F&& f) const {
    for (std::size_t wi = 0; wi < words_.size(); ++wi) {
      std::uint64_t v = words_[wi];
      while (v) {
        const int b = __builtin_ctzll(v);
        f(static_cast<long long>(wi) * 64 + b - w_);
        v &= v - 1;
      }
    }
  }

 private:
  void mask_top() {
    const int used = int(nbits_ & 63);
    if (used) words_.back() &= (~std::uint64_t(0)) >> (64 - used);
  }

  long long w_;
  long long nbits_;
  std::vector<std::uint64_t> words_;
};

struct DpItem {
  int summand_index = 0;
  long long unit_value = 0;  // contribution of one unit of r, times D
  long long bound = 0;       // |r| <= bound
};

long long exact_scaled(const Rational& v, const BigInt& d) {
  const Rational scaled = v * Rational(d);
  if (boost::multiprecision::denominator(scaled) != 1)
    throw std::logic_error("common denominator does not clear a weight");
  return boost::multiprecision::numerator(scaled).convert_to<long long>();
}

}  // namespace

QEVerdict decide_qe(const Decomposition& dec, const QEOptions& opts) {
  const Decomposition norm = normalize(dec);

  QEVerdict v;
  for (const auto& s : norm.summands)
    if (s.kind == SummandKind::ii1_factor) {
      v.qe = false;
      v.obstruction = Obstruction::type_II_present;
      return v;
    }
  for (const auto& s : norm.summands)
    if (s.kind == SummandKind::diffuse_matrix) {
      v.qe = false;
      v.obstruction = Obstruction::diffuse_matrix_present;
      return v;
    }

  Rational alpha0 = 0;
  std::vector<DpItem> items;
  std::vector<Rational> unit_rationals;
  BigInt d = 1;
  for (int i = 0; i < int(norm.summands.size()); ++i) {
    const auto& s = norm.summands[i];
    if (s.kind == SummandKind::diffuse_abelian) {
      alpha0 = s.weight;
      d = lcm(d, boost::multiprecision::denominator(s.weight));
      continue;
    }
    const Rational unit =
        s.dim == 1 ? s.weight : Rational(s.weight / s.dim);
    const long long bound = s.dim == 1 ? s.copies : s.dim;
    d = lcm(d, boost::multiprecision::denominator(unit));
    items.push_back({i, 0, bound});
    unit_rationals.push_back(unit);
  }
  if (items.empty()) {  // nothing atomic: vacuously QE
    v.qe = true;
    return v;
  }
  if (d > BigInt(opts.max_denominator))
    throw QEBudgetError("decide_qe: common denominator exceeds the budget");

  long long w = 0;
  for (std::size_t i = 0; i < items.size(); ++i) {
    items[i].unit_value = exact_scaled(unit_rationals[i], d);
    w += items[i].bound * items[i].unit_value;
  }
  const long long a0d = exact_scaled(alpha0, d);

  const std::uint64_t layer_bits = std::uint64_t(2 * w + 1);
  if (layer_bits * (items.size() + 1) * 2 > opts.max_dp_bits)
    throw QEBudgetError("decide_qe: DP memory budget exceeded");

  // any[i]: sums reachable with the first i items; nz[i]: same but with at
  // least one nonzero r.
  std::vector<OffsetBits> any, nz;
  any.reserve(items.size() + 1);
  nz.reserve(items.size() + 1);
  any.emplace_back(w);
  any.back().set(0);
  nz.emplace_back(w);
  for (const auto& it : items) {
    OffsetBits a(w), z(w);
    for (long long r = -it.bound; r <= it.bound; ++r) {
      a.or_shifted(any.back(), r * it.unit_value);
      if (r == 0)
        z.or_shifted(nz.back(), 0);
      else
        z.or_shifted(any.back(), r * it.unit_value);
    }
    any.push_back(std::move(a));
    nz.push_back(std::move(z));
  }

  // smallest |target| with a nonzero representation and |target| <= alpha0*D
  std::optional<long long> target;
  const auto& final_nz = nz.back();
  for (long long t = 0; t <= a0d && !target; ++t) {
    if (final_nz.get(t))
      target = t;
    else if (t > 0 && final_nz.get(-t))
      target = -t;
  }
  if (!target) {
    v.qe = true;
    return v;
  }

  // Walk the layers back to reconstruct an r-vector for the target.
  long long s = *target;
  bool need_nonzero = true;
  std::vector<WitnessEntry> entries;
  for (int i = int(items.size()); i >= 1; --i) {
    const auto& it = items[std::size_t(i - 1)];
    bool chosen = false;
    for (long long mag = 0; mag <= it.bound && !chosen; ++mag) {
      for (int sign : {+1, -1}) {
        const long long r = sign * mag;
        if (mag == 0 && sign < 0) continue;
        const long long prev = s - r * it.unit_value;
        if (prev < -w || prev > w) continue;
        const bool still_need = need_nonzero && r == 0;
        const bool ok = still_need ? nz[std::size_t(i - 1)].get(prev)
                                   : any[std::size_t(i - 1)].get(prev);
        if (ok) {
          if (r != 0) entries.push_back({it.summand_index, r});
          s = prev;
          need_nonzero = still_need;
          chosen = true;
          break;
        }
      }
    }
    if (!chosen) throw std::logic_error("decide_qe: witness reconstruction failed");
  }
  std::reverse(entries.begin(), entries.end());

  v.qe = false;
  v.obstruction = Obstruction::weight_relation;
  v.witness = std::move(entries);
  v.witness_sum = Rational(BigInt(*target), d);
  return v;
}

// ---- projection conjugacy ---------------------------------------------------

namespace {

long long rank_bound(const Summand& s) {
  return s.dim == 1 ? s.copies : s.dim;
}

void validate_spec(const Decomposition& dec, const ProjectionSpec& p,
                   const char* who) {
  if (p.parts.size() != dec.summands.size())
    throw std::invalid_argument(std::string(who) + ": spec length mismatch");
  for (std::size_t i = 0; i < p.parts.size(); ++i) {
    const auto& s = dec.summands[i];
    const auto& part = p.parts[i];
    switch (s.kind) {
      case SummandKind::diffuse_abelian:
        if (part.trace_part < 0 || part.trace_part > Rational(s.weight * s.copies))
          throw std::invalid_argument(std::string(who) +
                                      ": diffuse trace out of range");
        break;
      case SummandKind::matrix:
        if (part.rank < 0 || part.rank > rank_bound(s))
          throw std::invalid_argument(std::string(who) + ": rank out of range");
        break;
      case SummandKind::diffuse_matrix:
        throw std::invalid_argument(std::string(who) +
                                    ": diffuse_matrix summands not supported");
      case SummandKind::ii1_factor:
        throw std::invalid_argument(std::string(who) +
                                    ": decomposition must be type I");
    }
  }
}

}  // namespace

Rational projection_trace(const Decomposition& dec, const ProjectionSpec& p) {
  validate_spec(dec, p, "projection_trace");
  Rational t = 0;
  for (std::size_t i = 0; i < p.parts.size(); ++i) {
    const auto& s = dec.summands[i];
    if (s.kind == SummandKind::diffuse_abelian)
      t += p.parts[i].trace_part;
    else
      t += Rational(s.weight * p.parts[i].rank) / s.dim;
  }
  return t;
}

bool projections_conjugate(const Decomposition& dec, const ProjectionSpec& p,
                           const ProjectionSpec& q) {
  validate_spec(dec, p, "projections_conjugate");
  validate_spec(dec, q, "projections_conjugate");

  Rational diffuse_p = 0, diffuse_q = 0;
  std::map<Rational, long long> onedim_p, onedim_q;  // weight -> count of 1s
  std::map<std::pair<int, Rational>, std::vector<long long>> big_p, big_q;

  for (std::size_t i = 0; i < dec.summands.size(); ++i) {
    const auto& s = dec.summands[i];
    if (s.kind == SummandKind::diffuse_abelian) {
      diffuse_p += p.parts[i].trace_part;
      diffuse_q += q.parts[i].trace_part;
    } else if (s.dim == 1) {
      onedim_p[s.weight] += p.parts[i].rank;
      onedim_q[s.weight] += q.parts[i].rank;
    } else {
      big_p[{s.dim, s.weight}].push_back(p.parts[i].rank);
      big_q[{s.dim, s.weight}].push_back(q.parts[i].rank);
    }
  }
  if (diffuse_p != diffuse_q) return false;
  if (onedim_p != onedim_q) return false;
  for (auto& [key, ranks] : big_p) std::sort(ranks.begin(), ranks.end());
  for (auto& [key, ranks] : big_q) std::sort(ranks.begin(), ranks.end());
  return big_p == big_q;
}

std::pair<ProjectionSpec, ProjectionSpec> witness_to_projection_pair(
    const Decomposition& normalized, const QEVerdict& verdict) {
  if (verdict.obstruction != Obstruction::weight_relation)
    throw std::invalid_argument(
        "witness_to_projection_pair: verdict carries no weight relation");
  ProjectionSpec p, q;
  p.parts.resize(normalized.summands.size());
  q.parts.resize(normalized.summands.size());
  for (const auto& e : verdict.witness) {
    p.parts[std::size_t(e.summand_index)].rank = std::max(e.r, 0LL);
    q.parts[std::size_t(e.summand_index)].rank = std::max(-e.r, 0LL);
  }
  const Rational t = verdict.witness_sum.value_or(Rational(0));
  if (t != 0) {
    // pad with diffuse mass so the traces match: tau(p0) - tau(q0) = -t
    for (std::size_t i = 0; i < normalized.summands.size(); ++i) {
      if (normalized.summands[i].kind == SummandKind::diffuse_abelian) {
        p.parts[i].trace_part = t < 0 ? Rational(-t) : Rational(0);
        q.parts[i].trace_part = t > 0 ? t : Rational(0);
        break;
      }
    }
  }
  if (projection_trace(normalized, p) != projection_trace(normalized, q))
    throw std::logic_error("witness pair traces do not match");
  if (projections_conjugate(normalized, p, q)) {
    // Witness landed on a swap of identical summands; use the rank-2 vs
    // rank-1 + rank-1 pair on the first identical (dim >= 2, weight) duo.
    for (std::size_t i = 0; i + 1 < normalized.summands.size(); ++i) {
      const auto& a = normalized.summands[i];
      for (std::size_t j = i + 1; j < normalized.summands.size(); ++j) {
        const auto& b = normalized.summands[j];
        if (a.kind == SummandKind::matrix && b.kind == SummandKind::matrix &&
            a.dim >= 2 && a.dim == b.dim && a.weight == b.weight) {
          ProjectionSpec pp, qq;
          pp.parts.resize(normalized.summands.size());
          qq.parts.resize(normalized.summands.size());
          pp.parts[i].rank = 2;
          qq.parts[i].rank = 1;
          qq.parts[j].rank = 1;
          return {pp, qq};
        }
      }
    }
    throw std::logic_error(
        "witness pair unexpectedly conjugate without identical summands");
  }
  return {p, q};
}

McVerdict mc_verdict(const Decomposition& dec) {
  bool any_ii1 = false;
  for (const auto& s : dec.summands) {
    if (s.kind != SummandKind::ii1_factor) continue;
    any_ii1 = true;
    if (s.m2_embeddable && *s.m2_embeddable) return McVerdict::not_model_complete;
  }
  return any_ii1 ? McVerdict::unknown : McVerdict::model_complete;
}

// ---- weight-simplex genericity ----------------------------------------------

std::optional<Rational> epsilon_k(
    const std::vector<std::vector<Rational>>& alpha, int k,
    const QEOptions& opts) {
  if (k < 1 || int(alpha.size()) != k)
    throw std::invalid_argument("epsilon_k: alpha must be k x k");
  for (const auto& row : alpha)
    if (int(row.size()) != k)
      throw std::invalid_argument("epsilon_k: alpha must be k x k");
  for (int m = 0; m < k; ++m)
    for (int n = 0; n < k; ++n) {
      if (alpha[m][n] < 0)
        throw std::invalid_argument("epsilon_k: negative weight");
      if (n + 1 < k && alpha[m][n] < alpha[m][n + 1])
        throw std::invalid_argument("epsilon_k: rows must be nonincreasing");
    }

  BigInt d = 1;
  struct Item {
    long long unit = 0;
    long long bound = 0;
  };
  std::vector<Rational> units;
  std::vector<long long> bounds;
  for (int m = 0; m < k; ++m)
    for (int n = 0; n < k; ++n)
      if (alpha[m][n] > 0) {
        const Rational unit = Rational(alpha[m][n]) / (m + 1);
        d = lcm(d, boost::multiprecision::denominator(unit));
        units.push_back(unit);
        bounds.push_back(m + 1);
      }
  if (units.empty()) return std::nullopt;  // only the zero projection
  if (d > BigInt(opts.max_denominator))
    throw QEBudgetError("epsilon_k: common denominator exceeds the budget");

  long long w = 0;
  std::vector<Item> items(units.size());
  for (std::size_t i = 0; i < units.size(); ++i) {
    items[i].unit = exact_scaled(units[i], d);
    items[i].bound = bounds[i];
    w += items[i].bound * items[i].unit;
  }
  if (std::uint64_t(w + 1) * 2 > opts.max_dp_bits)
    throw QEBudgetError("epsilon_k: DP memory budget exceeded");

  OffsetBits reach(w);
  reach.set(0);
  for (const auto& it : items) {
    OffsetBits next(w);
    for (long long r = 0; r <= it.bound; ++r)
      next.or_shifted(reach, r * it.unit);
    reach = std::move(next);
  }
  if (reach.popcount_limit2() < 2) return std::nullopt;

  long long best = -1, prev = -1;
  bool have_prev = false;
  reach.for_each_set([&](long long s) {
    if (have_prev) {
      const long long gap = s - prev;
      if (best < 0 || gap < best) best = gap;
    }
    prev = s;
    have_prev = true;
  });
  return Rational(BigInt(best), d);
}

bool check_Gk(const std::vector<std::vector<Rational>>& alpha, int k,
              const QEOptions& opts) {
  Rational total = 0;
  for (const auto& row : alpha)
    for (const auto& a : row) total += a;
  if (total > 1)
    throw std::invalid_argument("check_Gk: total mass above 1");
  const Rational tail = Rational(1) - total;
  const auto eps = epsilon_k(alpha, k, opts);
  if (!eps) return true;  // epsilon is infinite
  return tail < *eps;
}

GenericityResult genericity_sample(int k, long long trials, GenericityMode mode,
                                   double tol, std::uint64_t master_seed,
                                   int dyadic_bits, const QEOptions& opts) {
  if (k < 1) throw std::invalid_argument("genericity_sample: k >= 1");
  if (trials < 1) throw std::invalid_argument("genericity_sample: trials >= 1");
  if (dyadic_bits < 1 || dyadic_bits > 62)
    throw std::invalid_argument("genericity_sample: bad dyadic_bits");

  GenericityResult res;
  res.trials = trials;
  for (long long t = 0; t < trials; ++t) {
    RngStream stream(master_seed, mix64(0x67656e65726963ULL, std::uint64_t(t)));
    std::vector<int> dims(k);
    for (auto& m : dims) m = 1 + int(stream.next_u64() % 3);
    std::vector<double> wts(k);
    double total = 0.0;
    for (auto& x : wts) {
      x = -std::log1p(-stream.next_unit());  // Exp(1)
      total += x;
    }
    for (auto& x : wts) x /= total;  // Dirichlet(1,...,1)

    // canonical order: weights descending, index ties stable
    std::vector<int> order(k);
    for (int i = 0; i < k; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return wts[a] > wts[b]; });
    {
      std::vector<double> w2(k);
      std::vector<int> d2(k);
      for (int i = 0; i < k; ++i) {
        w2[i] = wts[order[i]];
        d2[i] = dims[order[i]];
      }
      wts.swap(w2);
      dims.swap(d2);
    }

    bool qe = true;
    if (mode == GenericityMode::float_tolerance) {
      double combos = 1.0;
      for (int m : dims) combos *= double(2 * m + 1);
      if (combos > 1e7)
        throw QEBudgetError("genericity_sample: enumeration too large");
      // odometer over r_j in [-n_j, n_j]
      std::vector<long long> r(k);
      for (int i = 0; i < k; ++i) r[i] = -dims[i];
      for (;;) {
        bool allzero = true;
        double sum = 0.0;
        for (int i = 0; i < k; ++i) {
          if (r[i] != 0) allzero = false;
          sum += double(r[i]) * wts[i] / dims[i];
        }
        if (!allzero && std::abs(sum) <= tol) {
          qe = false;
          break;
        }
        int i = 0;
        while (i < k && r[i] == dims[i]) {
          r[i] = -dims[i];
          ++i;
        }
        if (i == k) break;
        ++r[i];
      }
    } else {
      const long long denom = 1LL << dyadic_bits;
      std::vector<long long> nums(k);
      long long acc = 0;
      for (int i = 0; i < k; ++i) {
        nums[i] = std::max<long long>(1, std::llround(wts[i] * double(denom)));
        acc += nums[i];
      }
      // force the exact total onto the largest entry
      const auto top = std::max_element(nums.begin(), nums.end());
      *top += denom - acc;
      if (*top < 1) continue;  // pathological rounding; count as skipped trial
      Decomposition dec;
      for (int i = 0; i < k; ++i) {
        Summand s;
        s.kind = SummandKind::matrix;
        s.dim = dims[i];
        s.weight = Rational(BigInt(nums[i]), BigInt(denom));
        dec.summands.push_back(s);
      }
      qe = decide_qe(dec, opts).qe;
    }
    if (qe) ++res.qe_count;
  }
  res.fraction = double(res.qe_count) / double(res.trials);
  return res;
}

}  // namespace qxlab
