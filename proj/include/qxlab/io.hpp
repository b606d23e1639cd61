#pragma once

// Matrix interchange formats. JSON: {"n": n, "entries": [[re, im], ...]}
// row-major, n^2 entries. Binary: magic "QXM1", two 64-bit little-endian
// unsigned ints (rows, cols), then rows*cols little-endian IEEE-754 double
// pairs (re, im), row-major. Tuples are one file per member plus a manifest.

#include <cstdint>
#include <string>
#include <vector>

#include "qxlab/haar.hpp"
#include "qxlab/hs.hpp"

namespace qxlab {

std::string matrix_to_json_text(const ComplexMatrix& a);
ComplexMatrix matrix_from_json_text(const std::string& text);

void write_matrix_json(const std::string& path, const ComplexMatrix& a);
ComplexMatrix read_matrix_json(const std::string& path);

void write_matrix_binary(const std::string& path, const ComplexMatrix& a);
ComplexMatrix read_matrix_binary(const std::string& path);

enum class MatrixFileFormat { json, binary };

/// Writes members as <stem>_0.<ext> ... plus <stem>_manifest.json containing
/// {"n":, "d":, "seed":, "files": [...]} and returns the manifest path.
std::string write_tuple(const std::string& stem, const UnitaryTuple& t,
                        MatrixFileFormat format);

/// Reads a tuple back from its manifest (member format inferred per file).
UnitaryTuple read_tuple_manifest(const std::string& manifest_path);

}  // namespace qxlab
