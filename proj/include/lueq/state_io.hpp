#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "lueq/types.hpp"

namespace lueq {

// Malformed file contents (unreadable, bad JSON, missing/ill-typed fields,
// shape mismatches). State-validation failures surface separately as
// std::invalid_argument from MultipartiteState.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raw contents of a matrix file: {"dims": [...], "re": [[...]], "im":
// [[...]], "mode": "density"|"hermitian"}; "im" defaults to zero and "mode"
// to "density". Factor files reuse the syntax with a single-entry dims list.
struct MatrixFile {
  std::vector<int> dims;
  ComplexMatrix matrix;
  StateMode mode = StateMode::Density;
};

// Syntax-level parse; no state validation beyond shape consistency.
MatrixFile parse_matrix_file(const std::string& path);

// Parse plus full MultipartiteState validation for the file's mode.
MultipartiteState parse_state(const std::string& path);

// Writers emit decimal literals with 17 significant digits, so write→parse
// round trips reproduce every entry bit-exactly; a zero imaginary part is
// omitted.
void write_matrix_file(const ComplexMatrix& m, const std::vector<int>& dims, StateMode mode,
                       const std::string& path);
void write_state(const MultipartiteState& s, const std::string& path);

}  // namespace lueq
