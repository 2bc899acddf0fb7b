#ifndef OPRADIUS_MATRIX_IO_HPP
#define OPRADIUS_MATRIX_IO_HPP

#include <initializer_list>
#include <string>

#include "opradius/types.hpp"

// Matrix JSON format shared by all CLI commands:
//   {"n": <int>, "re": [[...]], "im": [[...]]}
// row-major n x n arrays; "im" may be omitted for real matrices.

namespace opradius {

CMatrix matrix_from_json_text(const std::string& text);
CMatrix matrix_from_json_file(const std::string& path);

/// Serializes a matrix; "im" is omitted when every imaginary part is zero.
std::string matrix_to_json_text(const CMatrix& a);

/// FNV-1a digest over dimensions, entries and trailing parameters. Stable
/// across runs; used as cache key and provenance tag.
std::string matrix_digest(std::initializer_list<const CMatrix*> mats,
                          std::initializer_list<double> params = {});

}  // namespace opradius

#endif
