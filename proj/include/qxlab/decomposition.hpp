#pragma once

// Exact-rational description of a tracial von Neumann algebra as a weighted
// direct sum of summand kinds, plus the grouped canonical form the decision
// procedure works on.

#include <optional>
#include <string>
#include <vector>

#include "qxlab/rational.hpp"

namespace qxlab {

enum class SummandKind { diffuse_abelian, matrix, diffuse_matrix, ii1_factor };

std::string kind_to_string(SummandKind k);
SummandKind kind_from_string(const std::string& s);

struct Summand {
  SummandKind kind = SummandKind::matrix;
  int dim = 1;        // matrix size; 1 for diffuse_abelian; unused for II1
  Rational weight;    // total trace weight of one copy
  int copies = 1;     // grouped multiplicity, (M_dim, weight)^{+copies}
  std::optional<bool> m2_embeddable;  // II1 only
};

struct Decomposition {
  std::vector<Summand> summands;
};

/// Grouped canonical form: one diffuse summand at most (first), then
/// one-dimensional groups by descending weight, then dim >= 2 matrix summands
/// by (dim, weight) descending, then II1 summands. diffuse_matrix with
/// dim = 1 becomes diffuse_abelian. Validates weights > 0 and total == 1.
Decomposition normalize(const Decomposition& dec);

bool is_type_one(const Decomposition& dec);

/// Total trace weight, counting copies.
Rational total_weight(const Decomposition& dec);

/// JSON round trip: {"summands": [{"kind":..., "dim":..., "weight":"p/q",
/// "copies":..., "m2_embeddable":...}, ...]}.
Decomposition decomposition_from_json_text(const std::string& text);
std::string decomposition_to_json_text(const Decomposition& dec);

}  // namespace qxlab
