#pragma once

// Decision procedures for quantifier elimination of type I tracial von
// Neumann algebras: the exact integer dynamic program over weight relations,
// projection-conjugacy testing, model-completeness verdicts, and the
// weight-simplex genericity experiments.

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "qxlab/decomposition.hpp"

namespace qxlab {

enum class Obstruction { none, type_II_present, diffuse_matrix_present,
                         weight_relation };

struct WitnessEntry {
  int summand_index = 0;  // index into the normalized decomposition
  long long r = 0;        // nonzero, |r| <= bound of that summand
};

struct QEVerdict {
  bool qe = false;
  Obstruction obstruction = Obstruction::none;
  std::vector<WitnessEntry> witness;   // weight_relation only
  std::optional<Rational> witness_sum; // |sum| <= alpha_0
};

struct QEOptions {
  // Common-denominator budget: the DP state space is 2D+1, so D is capped.
  std::uint64_t max_denominator = 1'000'000'000;
  // Secondary guard on total DP memory (bits across stored layers).
  std::uint64_t max_dp_bits = 1ull << 33;
};

struct QEBudgetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Prop-style QE test on the (internally normalized) decomposition. On a
/// weight-relation failure the verdict carries a witness r-vector indexed
/// against normalize(dec).
QEVerdict decide_qe(const Decomposition& dec, const QEOptions& opts = {});

// ---- projection conjugacy --------------------------------------------------

struct ProjectionPart {
  long long rank = 0;       // matrix kinds; for a dim-1 group, the count of 1s
  Rational trace_part = 0;  // diffuse_abelian only, in [0, weight]
};

struct ProjectionSpec {
  std::vector<ProjectionPart> parts;  // parallel to dec.summands
};

/// tau(p) under the given decomposition.
Rational projection_trace(const Decomposition& dec, const ProjectionSpec& p);

/// Whether p and q are conjugate by an automorphism: equal diffuse trace,
/// equal rank sums within each equal-weight group of one-dimensional
/// summands, and equal rank multisets within each group of identical
/// (dim >= 2, weight) matrix summands. Requires a type I decomposition.
bool projections_conjugate(const Decomposition& dec, const ProjectionSpec& p,
                           const ProjectionSpec& q);

/// Turn a weight-relation witness into an equal-trace, non-conjugate
/// projection pair on the normalized decomposition.
std::pair<ProjectionSpec, ProjectionSpec> witness_to_projection_pair(
    const Decomposition& normalized, const QEVerdict& verdict);

// ---- model completeness -----------------------------------------------------

enum class McVerdict { model_complete, not_model_complete, unknown };

McVerdict mc_verdict(const Decomposition& dec);

// ---- weight-simplex genericity ----------------------------------------------

/// Minimum gap between distinct achievable projection traces of the truncated
/// purely atomic algebra with weights alpha[m-1][n-1] on M_m terms
/// (0 <= r_{m,n} <= m). nullopt means every projection has the same trace.
std::optional<Rational> epsilon_k(
    const std::vector<std::vector<Rational>>& alpha, int k,
    const QEOptions& opts = {});

/// Tail mass 1 - sum alpha strictly below epsilon_k.
bool check_Gk(const std::vector<std::vector<Rational>>& alpha, int k,
              const QEOptions& opts = {});

enum class GenericityMode { exact_rational, float_tolerance };

struct GenericityResult {
  long long qe_count = 0;
  long long trials = 0;
  double fraction = 0.0;
};

/// Sample purely atomic decompositions (k summands, dims uniform in {1,2,3},
/// Dirichlet(1,..,1) weights) and report the fraction judged QE. In
/// float_tolerance mode a relation |sum| <= tol counts as a failure; in
/// exact_rational mode the weights are rounded to denominator 2^dyadic_bits
/// and decide_qe runs exactly.
GenericityResult genericity_sample(int k, long long trials, GenericityMode mode,
                                   double tol, std::uint64_t master_seed,
                                   int dyadic_bits = 12,
                                   const QEOptions& opts = {});

}  // namespace qxlab
