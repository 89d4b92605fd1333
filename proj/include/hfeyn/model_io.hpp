#pragma once

#include <cstddef>
#include <string>
#include <string_view>

#include "hfeyn/bv_complex.hpp"

namespace hfeyn {

/// Parses the line-based model format (see README). Indices are 1-based in
/// the text and 0-based in the result. Throws ParseError with the offending
/// line number; does not validate (call Model::validate).
ModelSpec parse_model(std::string_view text);

/// Reads and parses a model file. Throws std::runtime_error if unreadable.
ModelSpec read_model_file(const std::string& path);

/// Canonical text for a model: one `b` line per sorted index of each b^(m).
/// parse_model(format_model(s)) == s for every symmetric s.
std::string format_model(const ModelSpec& spec);

/// Observable in shorthand ("x1^2 x3", "1/2 x1 x2", "x^4" when N = 1, "1")
/// or tensor form ("[1 1] = 1/2; [1 2] = 3"). Throws ParseError (line 0) on
/// bad syntax or an index outside 1..dimension.
MarkedTensor parse_observable(std::string_view text, std::size_t dimension);

}  // namespace hfeyn
