#include "hfeyn/model_io.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "hfeyn/errors.hpp"

namespace hfeyn {

namespace {

std::vector<std::string> split_ws(std::string_view line) {
  std::vector<std::string> out;
  std::istringstream in{std::string(line)};
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

Rational rational_at(std::size_t line, const std::string& tok) {
  try {
    return parse_rational(tok);
  } catch (const std::invalid_argument& e) {
    throw ParseError(line, e.what());
  }
}

unsigned unsigned_at(std::size_t line, const std::string& tok, const char* what) {
  if (tok.empty() || !std::all_of(tok.begin(), tok.end(), [](char c) { return c >= '0' && c <= '9'; }) ||
      tok.size() > 9) {
    throw ParseError(line, std::string("expected ") + what + ", got '" + tok + "'");
  }
  return static_cast<unsigned>(std::stoul(tok));
}

unsigned index_at(std::size_t line, const std::string& tok, std::size_t dimension) {
  const unsigned i = unsigned_at(line, tok, "an index");
  if (i < 1 || i > dimension) {
    throw ParseError(line, "index " + tok + " outside 1.." + std::to_string(dimension));
  }
  return i - 1;
}

}  // namespace

ModelSpec parse_model(std::string_view text) {
  ModelSpec spec;
  bool have_dimension = false;
  std::size_t rows = 0;
  std::vector<Rational> a_data;
  std::set<std::pair<unsigned, std::vector<unsigned>>> seen;

  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const auto tokens = split_ws(line);
    const std::string& key = tokens[0];
    if (key == "label") {
      spec.label = std::string(trim(line.substr(5)));
    } else if (key == "dimension") {
      if (have_dimension) throw ParseError(line_no, "dimension given twice");
      if (tokens.size() != 2) throw ParseError(line_no, "expected 'dimension N'");
      spec.dimension = unsigned_at(line_no, tokens[1], "a dimension");
      if (spec.dimension == 0 || spec.dimension > kMaxVariables) {
        throw ParseError(line_no, "dimension must be between 1 and " + std::to_string(kMaxVariables));
      }
      have_dimension = true;
    } else if (key == "a") {
      if (!have_dimension) throw ParseError(line_no, "'a' row before 'dimension'");
      if (rows == spec.dimension) throw ParseError(line_no, "too many 'a' rows");
      if (tokens.size() != spec.dimension + 1) {
        throw ParseError(line_no, "'a' row needs " + std::to_string(spec.dimension) + " entries");
      }
      for (std::size_t k = 1; k < tokens.size(); ++k) a_data.push_back(rational_at(line_no, tokens[k]));
      ++rows;
    } else if (key == "b" || key == "b-raw") {
      if (!have_dimension) throw ParseError(line_no, "'" + key + "' entry before 'dimension'");
      // b M I1 .. IM = COEFF
      const auto eq = std::find(tokens.begin(), tokens.end(), "=");
      if (eq == tokens.end() || eq + 2 != tokens.end() || eq - tokens.begin() < 2) {
        throw ParseError(line_no, "expected '" + key + " M I1 .. IM = COEFF'");
      }
      const unsigned m = unsigned_at(line_no, tokens[1], "an order");
      std::vector<unsigned> index;
      for (auto it = tokens.begin() + 2; it != eq; ++it) index.push_back(index_at(line_no, *it, spec.dimension));
      if (index.size() != m) {
        throw ParseError(line_no, "order " + std::to_string(m) + " needs " + std::to_string(m) + " indices");
      }
      const Rational value = rational_at(line_no, *(eq + 1));
      std::vector<unsigned> key_index = index;
      if (key == "b") std::sort(key_index.begin(), key_index.end());
      if (!seen.emplace(m, key_index).second) throw ParseError(line_no, "duplicate entry for this index");
      auto [it, inserted] = spec.interaction.try_emplace(m, Tensor(m));
      if (key == "b") {
        it->second.set_symmetric(index, value);
      } else {
        it->second.set(index, value);
      }
    } else {
      throw ParseError(line_no, "unknown keyword '" + key + "'");
    }
  }
  if (!have_dimension) throw ParseError(line_no, "missing 'dimension'");
  if (rows != spec.dimension) throw ParseError(line_no, "expected " + std::to_string(spec.dimension) + " 'a' rows");
  spec.a = RationalMatrix(spec.dimension, std::move(a_data));
  // Entries given as zero leave no trace in the tensor.
  for (auto it = spec.interaction.begin(); it != spec.interaction.end();) {
    it = it->second.is_zero() ? spec.interaction.erase(it) : std::next(it);
  }
  return spec;
}

ModelSpec read_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read model file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_model(buf.str());
}

std::string format_model(const ModelSpec& spec) {
  std::ostringstream out;
  if (!spec.label.empty()) out << "label " << spec.label << '\n';
  out << "dimension " << spec.dimension << '\n';
  for (std::size_t i = 0; i < spec.dimension; ++i) {
    out << 'a';
    for (std::size_t j = 0; j < spec.dimension; ++j) out << ' ' << to_string(spec.a(i, j));
    out << '\n';
  }
  for (const auto& [m, tensor] : spec.interaction) {
    for (const auto& [index, value] : tensor.entries()) {
      if (!std::is_sorted(index.begin(), index.end())) continue;
      out << "b " << m;
      for (unsigned i : index) out << ' ' << i + 1;
      out << " = " << to_string(value) << '\n';
    }
  }
  return out.str();
}

MarkedTensor parse_observable(std::string_view text, std::size_t dimension) {
  constexpr std::size_t kLine = 0;
  text = trim(text);
  if (text.empty()) throw ParseError(kLine, "empty observable");

  if (text.front() == '[') {
    // [I1 .. In] = COEFF; ...
    MarkedTensor f;
    bool first = true;
    std::size_t start = 0;
    while (start < text.size()) {
      auto end = text.find(';', start);
      if (end == std::string_view::npos) end = text.size();
      const std::string_view entry = trim(text.substr(start, end - start));
      start = end + 1;
      if (entry.empty()) continue;
      const auto close = entry.find(']');
      const auto eq = entry.find('=', close == std::string_view::npos ? 0 : close);
      if (entry.front() != '[' || close == std::string_view::npos || eq == std::string_view::npos ||
          !trim(entry.substr(close + 1, eq - close - 1)).empty()) {
        throw ParseError(kLine, "expected '[I1 .. In] = COEFF', got '" + std::string(entry) + "'");
      }
      std::vector<unsigned> index;
      for (const auto& tok : split_ws(entry.substr(1, close - 1))) index.push_back(index_at(kLine, tok, dimension));
      const Rational value = rational_at(kLine, std::string(trim(entry.substr(eq + 1))));
      if (first) {
        f = MarkedTensor(static_cast<unsigned>(index.size()));
        first = false;
      } else if (index.size() != f.arity()) {
        throw ParseError(kLine, "all observable entries need the same number of indices");
      }
      f.add(index, value);
    }
    if (first) throw ParseError(kLine, "empty observable");
    return f;
  }

  Rational coefficient = 1;
  std::vector<unsigned> exponents(dimension, 0);
  for (const auto& tok : split_ws(text)) {
    if (tok.front() != 'x') {
      coefficient *= rational_at(kLine, tok);
      continue;
    }
    const auto caret = tok.find('^');
    const std::string var = tok.substr(1, caret == std::string::npos ? std::string::npos : caret - 1);
    unsigned i = 0;
    if (var.empty()) {
      if (dimension != 1) throw ParseError(kLine, "bare 'x' is only allowed when N = 1");
    } else {
      i = index_at(kLine, var, dimension);
    }
    const unsigned e = caret == std::string::npos ? 1 : unsigned_at(kLine, tok.substr(caret + 1), "an exponent");
    exponents[i] += e;
  }
  MarkedTensor f = tensor_from_monomial(exponents);
  if (coefficient != 1) {
    MarkedTensor scaled(f.arity());
    for (const auto& [index, value] : f.entries()) scaled.set(index, value * coefficient);
    f = std::move(scaled);
  }
  return f;
}

}  // namespace hfeyn
