#include <doctest.h>

#include <map>
#include <set>

#include "qxlab/qe.hpp"
#include "qxlab/rng.hpp"

using namespace qxlab;

namespace {

Summand matrix_summand(int dim, const Rational& w, int copies = 1) {
  Summand s;
  s.kind = SummandKind::matrix;
  s.dim = dim;
  s.weight = w;
  s.copies = copies;
  return s;
}

Summand diffuse_summand(const Rational& w) {
  Summand s;
  s.kind = SummandKind::diffuse_abelian;
  s.dim = 1;
  s.weight = w;
  return s;
}

Decomposition dec_of(std::vector<Summand> summands) {
  Decomposition d;
  d.summands = std::move(summands);
  return d;
}

// Independent brute-force r-vector search over the normalized form.
struct BruteItem {
  Rational unit;
  long long bound;
};

struct BruteResult {
  bool qe = true;
  std::vector<long long> witness;  // parallel to items
  Rational sum = 0;
};

BruteResult brute_force_qe(const Decomposition& normalized) {
  Rational alpha0 = 0;
  std::vector<BruteItem> items;
  for (const auto& s : normalized.summands) {
    if (s.kind == SummandKind::diffuse_abelian)
      alpha0 += s.weight;
    else if (s.dim == 1)
      items.push_back({s.weight, s.copies});
    else
      items.push_back({Rational(s.weight / s.dim), s.dim});
  }
  BruteResult res;
  if (items.empty()) return res;
  std::vector<long long> r(items.size());
  for (std::size_t i = 0; i < items.size(); ++i) r[i] = -items[i].bound;
  for (;;) {
    bool allzero = true;
    Rational sum = 0;
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (r[i] != 0) allzero = false;
      sum += items[i].unit * r[i];
    }
    if (!allzero) {
      const Rational a = sum < 0 ? Rational(-sum) : sum;
      if (a <= alpha0) {
        res.qe = false;
        res.witness = r;
        res.sum = sum;
        return res;
      }
    }
    std::size_t i = 0;
    while (i < items.size() && r[i] == items[i].bound) {
      r[i] = -items[i].bound;
      ++i;
    }
    if (i == items.size()) break;
    ++r[i];
  }
  return res;
}

// r-vectors over the normalized non-diffuse summands, as a map for comparison
std::map<int, long long> witness_map(const QEVerdict& v) {
  std::map<int, long long> m;
  for (const auto& e : v.witness) m[e.summand_index] = e.r;
  return m;
}

bool witness_matches_up_to_sign(const QEVerdict& v,
                                std::map<int, long long> expect) {
  const auto got = witness_map(v);
  if (got == expect) return true;
  for (auto& [k, r] : expect) r = -r;
  return got == expect;
}

Decomposition random_decomposition(std::uint64_t seed, bool allow_diffuse) {
  RngStream s(seed, 0xdec0);
  const int k = 1 + int(s.next_u64() % 4);
  std::vector<long long> nums;
  long long total = 0;
  const bool diffuse = allow_diffuse && (s.next_u64() % 3 == 0);
  const int parts = k + (diffuse ? 1 : 0);
  for (int i = 0; i < parts; ++i) {
    nums.push_back(1 + static_cast<long long>(s.next_u64() % 9));
    total += nums.back();
  }
  Decomposition dec;
  for (int i = 0; i < k; ++i)
    dec.summands.push_back(
        matrix_summand(1 + int(s.next_u64() % 4),
                       Rational(BigInt(nums[std::size_t(i)]), BigInt(total))));
  if (diffuse)
    dec.summands.push_back(
        diffuse_summand(Rational(BigInt(nums.back()), BigInt(total))));
  return dec;
}

}  // namespace

TEST_CASE("rational parsing") {
  CHECK(parse_rational("3/4") == Rational(3, 4));
  CHECK(parse_rational("-1/2") == Rational(-1, 2));
  CHECK(parse_rational("2") == Rational(2));
  CHECK(parse_rational("6/4") == Rational(3, 2));
  CHECK(rational_to_string(Rational(3, 6)) == "1/2");
  CHECK(rational_to_string(Rational(4)) == "4");
  CHECK_THROWS_AS(parse_rational("1.5"), std::invalid_argument);
  CHECK_THROWS_AS(parse_rational("abc"), std::invalid_argument);
  CHECK_THROWS_AS(parse_rational("1/0"), std::invalid_argument);
  CHECK_THROWS_AS(parse_rational(""), std::invalid_argument);
}

TEST_CASE("normalize groups and orders") {
  // three (C, 1/3) inputs collapse to one group of multiplicity 3
  const Decomposition grouped = normalize(dec_of({matrix_summand(1, Rational(1, 3)),
                                                  matrix_summand(1, Rational(1, 3)),
                                                  matrix_summand(1, Rational(1, 3))}));
  REQUIRE(grouped.summands.size() == 1);
  CHECK(grouped.summands[0].dim == 1);
  CHECK(grouped.summands[0].copies == 3);
  CHECK(grouped.summands[0].weight == Rational(1, 3));

  // distinct weights stay separate, descending
  const Decomposition paper = normalize(dec_of({matrix_summand(1, Rational(1, 6)),
                                                matrix_summand(1, Rational(1, 2)),
                                                matrix_summand(1, Rational(1, 3))}));
  REQUIRE(paper.summands.size() == 3);
  CHECK(paper.summands[0].weight == Rational(1, 2));
  CHECK(paper.summands[1].weight == Rational(1, 3));
  CHECK(paper.summands[2].weight == Rational(1, 6));

  // diffuse parts merge and go first; M_1 x L^inf is L^inf
  Summand dm;
  dm.kind = SummandKind::diffuse_matrix;
  dm.dim = 1;
  dm.weight = Rational(1, 4);
  const Decomposition merged = normalize(
      dec_of({matrix_summand(2, Rational(1, 2)), diffuse_summand(Rational(1, 4)), dm}));
  REQUIRE(merged.summands.size() == 2);
  CHECK(merged.summands[0].kind == SummandKind::diffuse_abelian);
  CHECK(merged.summands[0].weight == Rational(1, 2));
  CHECK(merged.summands[1].dim == 2);

  // idempotence and weight preservation on random decompositions
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Decomposition dec = random_decomposition(seed, true);
    const Decomposition once = normalize(dec);
    const Decomposition twice = normalize(once);
    CHECK(total_weight(once) == 1);
    CHECK(decomposition_to_json_text(once) == decomposition_to_json_text(twice));
  }

  CHECK_THROWS_AS(normalize(dec_of({matrix_summand(2, Rational(1, 2))})),
                  std::invalid_argument);
  CHECK_THROWS_AS(normalize(dec_of({matrix_summand(2, Rational(0))})),
                  std::invalid_argument);
}

TEST_CASE("decide_qe golden cases") {
  // (C,1/2) + (C,1/3) + (C,1/6): 1/2 - 1/3 - 1/6 = 0
  const QEVerdict v1 = decide_qe(dec_of({matrix_summand(1, Rational(1, 2)),
                                         matrix_summand(1, Rational(1, 3)),
                                         matrix_summand(1, Rational(1, 6))}));
  CHECK_FALSE(v1.qe);
  CHECK(v1.obstruction == Obstruction::weight_relation);
  CHECK(*v1.witness_sum == 0);
  CHECK(witness_matches_up_to_sign(v1, {{0, 1}, {1, -1}, {2, -1}}));

  // (C,2/5) + (M3,3/5): rank 2 in M3 has trace 2/5
  const QEVerdict v2 = decide_qe(dec_of({matrix_summand(1, Rational(2, 5)),
                                         matrix_summand(3, Rational(3, 5))}));
  CHECK_FALSE(v2.qe);
  CHECK(*v2.witness_sum == 0);
  CHECK(witness_matches_up_to_sign(v2, {{0, -1}, {1, 2}}));

  // matrix algebras alone are QE
  for (int n = 1; n <= 6; ++n)
    CHECK(decide_qe(dec_of({matrix_summand(n, Rational(1))})).qe);

  // diffuse alone is QE
  CHECK(decide_qe(dec_of({diffuse_summand(Rational(1))})).qe);

  // (L^inf, 1/2) + (M2, 1/2): rank-1 trace 1/4 is within alpha_0 of 0
  const QEVerdict v3 = decide_qe(
      dec_of({diffuse_summand(Rational(1, 2)), matrix_summand(2, Rational(1, 2))}));
  CHECK_FALSE(v3.qe);
  CHECK(v3.obstruction == Obstruction::weight_relation);
  REQUIRE(v3.witness.size() == 1);
  CHECK(std::abs(v3.witness[0].r) == 1);
  Rational ws = *v3.witness_sum;
  if (ws < 0) ws = -ws;
  CHECK(ws == Rational(1, 4));

  // identical matrix summands of equal weight
  const QEVerdict v4 = decide_qe(dec_of(
      {matrix_summand(2, Rational(1, 2)), matrix_summand(2, Rational(1, 2))}));
  CHECK_FALSE(v4.qe);
  CHECK(*v4.witness_sum == 0);

  // obstruction kinds
  Summand ii1;
  ii1.kind = SummandKind::ii1_factor;
  ii1.weight = Rational(1);
  CHECK(decide_qe(dec_of({ii1})).obstruction == Obstruction::type_II_present);

  Summand dm;
  dm.kind = SummandKind::diffuse_matrix;
  dm.dim = 2;
  dm.weight = Rational(1);
  CHECK(decide_qe(dec_of({dm})).obstruction ==
        Obstruction::diffuse_matrix_present);
}

TEST_CASE("decide_qe is permutation invariant") {
  const std::vector<Summand> base = {matrix_summand(1, Rational(1, 2)),
                                     matrix_summand(3, Rational(1, 4)),
                                     matrix_summand(2, Rational(1, 4))};
  const QEVerdict v0 = decide_qe(dec_of(base));
  std::vector<Summand> perm = {base[2], base[0], base[1]};
  const QEVerdict v1 = decide_qe(dec_of(perm));
  CHECK(v0.qe == v1.qe);
  CHECK(witness_map(v0) == witness_map(v1));  // indices are normalized-form
}

TEST_CASE("decide_qe agrees with brute force on random decompositions") {
  int qe_count = 0, witness_count = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const Decomposition dec = random_decomposition(seed, true);
    const Decomposition norm = normalize(dec);
    const QEVerdict fast = decide_qe(dec);
    const BruteResult brute = brute_force_qe(norm);
    REQUIRE(fast.qe == brute.qe);
    if (fast.qe) {
      ++qe_count;
      continue;
    }
    ++witness_count;
    // witness self-validation under exact arithmetic
    REQUIRE(fast.obstruction == Obstruction::weight_relation);
    REQUIRE_FALSE(fast.witness.empty());
    Rational alpha0 = 0;
    for (const auto& s : norm.summands)
      if (s.kind == SummandKind::diffuse_abelian) alpha0 += s.weight;
    Rational sum = 0;
    for (const auto& e : fast.witness) {
      const auto& s = norm.summands[std::size_t(e.summand_index)];
      REQUIRE(s.kind == SummandKind::matrix);
      const long long bound = s.dim == 1 ? s.copies : s.dim;
      REQUIRE(e.r != 0);
      REQUIRE(std::abs(e.r) <= bound);
      sum += (s.dim == 1 ? s.weight : Rational(s.weight / s.dim)) * e.r;
    }
    REQUIRE(sum == *fast.witness_sum);
    Rational a = sum < 0 ? Rational(-sum) : sum;
    REQUIRE(a <= alpha0);
  }
  // both outcomes are exercised
  CHECK(qe_count > 10);
  CHECK(witness_count > 10);
}

TEST_CASE("decide_qe budget guard") {
  QEOptions opts;
  opts.max_denominator = 10;
  CHECK_THROWS_AS(decide_qe(dec_of({matrix_summand(1, Rational(1, 101)),
                                    matrix_summand(1, Rational(100, 101))}),
                            opts),
                  QEBudgetError);
}

TEST_CASE("projection conjugacy") {
  // paper example: same trace, not conjugate
  const Decomposition dec = dec_of({matrix_summand(1, Rational(1, 2)),
                                    matrix_summand(1, Rational(1, 3)),
                                    matrix_summand(1, Rational(1, 6))});
  ProjectionSpec p, q;
  p.parts = {{1, 0}, {0, 0}, {0, 0}};
  q.parts = {{0, 0}, {1, 0}, {1, 0}};
  CHECK(projection_trace(dec, p) == projection_trace(dec, q));
  CHECK_FALSE(projections_conjugate(dec, p, q));
  CHECK(projections_conjugate(dec, p, p));

  // equal-weight copies can be permuted
  const Decomposition dec2 = dec_of({matrix_summand(1, Rational(1, 4)),
                                     matrix_summand(1, Rational(1, 4)),
                                     diffuse_summand(Rational(1, 2))});
  ProjectionSpec p2, q2;
  p2.parts = {{1, 0}, {0, 0}, {0, 0}};
  q2.parts = {{0, 0}, {1, 0}, {0, 0}};
  CHECK(projections_conjugate(dec2, p2, q2));

  // identical M2 summands: swap is an automorphism, rank split is not
  const Decomposition dec3 = dec_of(
      {matrix_summand(2, Rational(1, 2)), matrix_summand(2, Rational(1, 2))});
  ProjectionSpec a, b, c;
  a.parts = {{1, 0}, {0, 0}};
  b.parts = {{0, 0}, {1, 0}};
  c.parts = {{2, 0}, {0, 0}};
  ProjectionSpec d2;
  d2.parts = {{1, 0}, {1, 0}};
  CHECK(projections_conjugate(dec3, a, b));
  CHECK(projection_trace(dec3, c) == projection_trace(dec3, d2));
  CHECK_FALSE(projections_conjugate(dec3, c, d2));

  // invalid specs
  ProjectionSpec bad;
  bad.parts = {{3, 0}, {0, 0}};  // rank 3 in M2
  CHECK_THROWS_AS(projections_conjugate(dec3, bad, a), std::invalid_argument);
  ProjectionSpec short_spec;
  short_spec.parts = {{0, 0}};
  CHECK_THROWS_AS(projections_conjugate(dec3, short_spec, a),
                  std::invalid_argument);
}

TEST_CASE("witnesses yield non-conjugate equal-trace pairs") {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const Decomposition norm = normalize(random_decomposition(seed, true));
    const QEVerdict v = decide_qe(norm);
    if (v.qe) continue;
    const auto [p, q] = witness_to_projection_pair(norm, v);
    CHECK(projection_trace(norm, p) == projection_trace(norm, q));
    CHECK_FALSE(projections_conjugate(norm, p, q));
  }
  // the identical-summand case specifically
  const Decomposition twins = normalize(dec_of(
      {matrix_summand(2, Rational(1, 2)), matrix_summand(2, Rational(1, 2))}));
  const QEVerdict v = decide_qe(twins);
  REQUIRE_FALSE(v.qe);
  const auto [p, q] = witness_to_projection_pair(twins, v);
  CHECK(projection_trace(twins, p) == projection_trace(twins, q));
  CHECK_FALSE(projections_conjugate(twins, p, q));
}

TEST_CASE("QE decompositions conjugate all equal-trace pairs") {
  // Theorem-A direction at desk scale: enumerate every projection pair on
  // atomic decompositions that were decided QE.
  int checked_decs = 0;
  for (std::uint64_t seed = 0; seed < 120 && checked_decs < 25; ++seed) {
    const Decomposition norm = normalize(random_decomposition(seed, false));
    if (!decide_qe(norm).qe) continue;
    std::vector<long long> bounds;
    for (const auto& s : norm.summands)
      bounds.push_back(s.dim == 1 ? s.copies : s.dim);
    long long total = 1;
    for (long long b : bounds) total *= b + 1;
    if (total > 60) continue;
    ++checked_decs;

    std::vector<ProjectionSpec> specs;
    std::vector<long long> r(bounds.size(), 0);
    for (;;) {
      ProjectionSpec spec;
      for (long long x : r) spec.parts.push_back({x, 0});
      specs.push_back(spec);
      std::size_t i = 0;
      while (i < r.size() && r[i] == bounds[i]) r[i++] = 0;
      if (i == r.size()) break;
      ++r[i];
    }
    for (std::size_t i = 0; i < specs.size(); ++i)
      for (std::size_t j = i + 1; j < specs.size(); ++j)
        if (projection_trace(norm, specs[i]) == projection_trace(norm, specs[j]))
          CHECK(projections_conjugate(norm, specs[i], specs[j]));
  }
  CHECK(checked_decs >= 10);
}

TEST_CASE("mc verdict") {
  CHECK(mc_verdict(dec_of({matrix_summand(3, Rational(1))})) ==
        McVerdict::model_complete);

  Summand ii1_true;
  ii1_true.kind = SummandKind::ii1_factor;
  ii1_true.weight = Rational(1);
  ii1_true.m2_embeddable = true;
  CHECK(mc_verdict(dec_of({ii1_true})) == McVerdict::not_model_complete);

  Summand ii1_unknown = ii1_true;
  ii1_unknown.m2_embeddable.reset();
  CHECK(mc_verdict(dec_of({ii1_unknown})) == McVerdict::unknown);

  Summand ii1_false = ii1_true;
  ii1_false.m2_embeddable = false;
  CHECK(mc_verdict(dec_of({ii1_false})) == McVerdict::unknown);
}

namespace {

std::vector<std::vector<Rational>> zero_alpha(int k) {
  return std::vector<std::vector<Rational>>(std::size_t(k),
                                            std::vector<Rational>(std::size_t(k), 0));
}

std::optional<Rational> brute_epsilon_k(
    const std::vector<std::vector<Rational>>& alpha, int k) {
  std::set<Rational> traces;
  std::vector<std::pair<Rational, long long>> items;
  for (int m = 1; m <= k; ++m)
    for (int n = 1; n <= k; ++n)
      if (alpha[std::size_t(m - 1)][std::size_t(n - 1)] > 0)
        items.push_back({Rational(alpha[std::size_t(m - 1)][std::size_t(n - 1)] / m), m});
  std::vector<long long> r(items.size(), 0);
  for (;;) {
    Rational t = 0;
    for (std::size_t i = 0; i < items.size(); ++i) t += items[i].first * r[i];
    traces.insert(t);
    std::size_t i = 0;
    while (i < items.size() && r[i] == items[i].second) r[i++] = 0;
    if (i == items.size()) break;
    ++r[i];
  }
  if (traces.size() < 2) return std::nullopt;
  std::optional<Rational> best;
  auto prev = traces.begin();
  for (auto it = std::next(traces.begin()); it != traces.end(); ++it) {
    const Rational gap = *it - *prev;
    if (!best || gap < *best) best = gap;
    prev = it;
  }
  return best;
}

}  // namespace

TEST_CASE("epsilon_k examples and oracle") {
  auto a1 = zero_alpha(1);
  a1[0][0] = 1;
  CHECK(*epsilon_k(a1, 1) == Rational(1));

  auto a2 = zero_alpha(2);
  a2[0][0] = Rational(1, 2);
  a2[0][1] = Rational(1, 2);
  CHECK(*epsilon_k(a2, 2) == Rational(1, 2));

  auto a3 = zero_alpha(2);
  a3[0][0] = Rational(1, 2);
  a3[1][0] = Rational(1, 2);
  CHECK(*epsilon_k(a3, 2) == Rational(1, 4));

  CHECK_FALSE(epsilon_k(zero_alpha(2), 2).has_value());

  auto bad = zero_alpha(2);
  bad[0][1] = Rational(1, 2);  // row increasing in n
  CHECK_THROWS_AS(epsilon_k(bad, 2), std::invalid_argument);

  // exhaustive enumeration oracle on random small arrays
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    RngStream s(seed, 0xe9);
    const int k = 2 + int(s.next_u64() % 2);
    auto alpha = zero_alpha(k);
    long long total = 0;
    std::vector<long long> nums;
    for (int m = 0; m < k; ++m)
      for (int n = 0; n < k; ++n) {
        nums.push_back(static_cast<long long>(s.next_u64() % 5));
        total += nums.back();
      }
    if (total == 0) continue;
    std::size_t idx = 0;
    for (int m = 0; m < k; ++m) {
      std::vector<long long> row;
      for (int n = 0; n < k; ++n) row.push_back(nums[idx++]);
      std::sort(row.rbegin(), row.rend());
      for (int n = 0; n < k; ++n)
        alpha[std::size_t(m)][std::size_t(n)] =
            Rational(BigInt(row[std::size_t(n)]), BigInt(2 * total));
    }
    CHECK(epsilon_k(alpha, k) == brute_epsilon_k(alpha, k));
  }
}

TEST_CASE("check_Gk") {
  auto full = zero_alpha(1);
  full[0][0] = 1;
  CHECK(check_Gk(full, 1));  // tail 0 < epsilon

  auto half = zero_alpha(1);
  half[0][0] = Rational(1, 2);
  CHECK_FALSE(check_Gk(half, 1));  // tail 1/2 == epsilon, strict inequality

  auto mixed = zero_alpha(2);
  mixed[0][0] = Rational(1, 2);
  mixed[1][0] = Rational(1, 4);
  CHECK(*epsilon_k(mixed, 2) == Rational(1, 8));
  CHECK_FALSE(check_Gk(mixed, 2));  // tail 1/4 >= 1/8

  auto over = zero_alpha(1);
  over[0][0] = Rational(3, 2);
  CHECK_THROWS_AS(check_Gk(over, 1), std::invalid_argument);
}

TEST_CASE("genericity sampling") {
  // single matrix summand is always QE
  const GenericityResult one =
      genericity_sample(1, 200, GenericityMode::float_tolerance, 1e-9, 5);
  CHECK(one.fraction == 1.0);

  // determinism
  const GenericityResult a =
      genericity_sample(3, 500, GenericityMode::float_tolerance, 1e-9, 9);
  const GenericityResult b =
      genericity_sample(3, 500, GenericityMode::float_tolerance, 1e-9, 9);
  CHECK(a.qe_count == b.qe_count);

  // dyadic rounding reintroduces rational relations
  const GenericityResult exact =
      genericity_sample(3, 4000, GenericityMode::exact_rational, 1e-9, 11, 12);
  const GenericityResult fl =
      genericity_sample(3, 4000, GenericityMode::float_tolerance, 1e-9, 11);
  CHECK(exact.fraction < fl.fraction);

  CHECK_THROWS_AS(genericity_sample(0, 10, GenericityMode::float_tolerance,
                                    1e-9, 1),
                  std::invalid_argument);
}

TEST_CASE("decomposition json") {
  const std::string text =
      "{\"summands\": ["
      "{\"kind\": \"diffuse_abelian\", \"weight\": \"1/2\"},"
      "{\"kind\": \"matrix\", \"dim\": 2, \"weight\": \"1/2\"}]}";
  const Decomposition dec = decomposition_from_json_text(text);
  REQUIRE(dec.summands.size() == 2);
  CHECK(dec.summands[0].kind == SummandKind::diffuse_abelian);
  CHECK(dec.summands[1].dim == 2);

  const Decomposition back =
      decomposition_from_json_text(decomposition_to_json_text(dec));
  CHECK(back.summands[1].weight == Rational(1, 2));

  CHECK_THROWS_AS(decomposition_from_json_text("{}"), std::invalid_argument);
  CHECK_THROWS_AS(decomposition_from_json_text("nope"), std::invalid_argument);
  CHECK_THROWS_AS(
      decomposition_from_json_text(
          "{\"summands\": [{\"kind\": \"matrix\", \"weight\": 0.5}]}"),
      std::invalid_argument);
}
