#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "hfeyn/bv_complex.hpp"

namespace hfeyn {

enum class Method { Reduce, Diagrams, Oracle, All };
enum class ListFormat { Table, Records };

/// Exit status 0 iff everything requested succeeded and agreed; 1 for a
/// disagreement or failed check. Input errors surface as exceptions.
struct CommandResult {
  int exit_code = 0;
  std::string output;
};

CommandResult cmd_expect(const Model& model, const MarkedTensor& f, unsigned max_order, Method method);

CommandResult cmd_list_diagrams(const Model& model, const MarkedTensor& f, unsigned max_order, ListFormat format);

struct CheckOptions {
  unsigned max_degree = 4;
  unsigned max_order = 4;
  std::uint64_t seed = 1;
  std::size_t samples = 20;
};

CommandResult cmd_check(const Model& model, const CheckOptions& options);

/// Full command line (argv[0] included). Input errors are written to err
/// and give exit status 2.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hfeyn
