#include <CLI11.hpp>

#include <map>

#include "hfeyn/commands.hpp"
#include "hfeyn/errors.hpp"
#include "hfeyn/model_io.hpp"

namespace hfeyn {

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact expectation values of a finite-dimensional BV complex"};
  app.name(args.empty() ? "hfeyn" : args.front());
  app.require_subcommand(1);

  std::string model_path;
  std::string observable;
  unsigned order = 4;
  unsigned legs = 0;
  unsigned max_degree = 4;
  std::uint64_t seed = 1;
  std::size_t samples = 20;
  std::string method = "all";
  std::string format = "table";
  const std::map<std::string, Method> methods{
      {"reduce", Method::Reduce}, {"diagrams", Method::Diagrams}, {"oracle", Method::Oracle}, {"all", Method::All}};
  const std::map<std::string, ListFormat> formats{{"table", ListFormat::Table}, {"records", ListFormat::Records}};

  auto* expect = app.add_subcommand("expect", "Compute <f> through hbar^K");
  expect->add_option("--model", model_path, "Model file")->required();
  expect->add_option("--observable", observable, "Observable, e.g. \"x1^2 x2\" or \"[1 2] = 1/2\"")->required();
  expect->add_option("--order", order, "Highest hbar power K")->capture_default_str();
  expect->add_option("--method", method, "reduce, diagrams, oracle or all")
      ->transform(CLI::IsMember(methods, CLI::ignore_case).description(""))
      ->capture_default_str();

  auto* list = app.add_subcommand("list-diagrams", "List closed diagrams with beta <= K");
  list->add_option("--model", model_path, "Model file")->required();
  auto* legs_opt = list->add_option("--legs", legs, "Marked valence n (observable x1^n)");
  auto* obs_opt = list->add_option("--observable", observable, "Observable carried by the marked vertex");
  legs_opt->excludes(obs_opt);
  list->add_option("--order", order, "Betti bound K")->capture_default_str();
  list->add_option("--format", format, "table or records")
      ->transform(CLI::IsMember(formats, CLI::ignore_case).description(""))
      ->capture_default_str();

  auto* check = app.add_subcommand("check", "Run the consistency checks on a model");
  check->add_option("--model", model_path, "Model file")->required();
  check->add_option("--order", order, "Highest hbar power K")->capture_default_str();
  check->add_option("--max-degree", max_degree, "Largest observable degree")->capture_default_str();
  check->add_option("--seed", seed, "Seed for the random samples")->capture_default_str();
  check->add_option("--samples", samples, "Random samples per check")->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    if (!reversed.empty()) reversed.pop_back();
    app.parse(std::move(reversed));
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\nRun with --help for more information.\n";
    return 2;
  }

  try {
    const Model model = Model::validate(read_model_file(model_path));
    CommandResult result;
    if (expect->parsed()) {
      result = cmd_expect(model, parse_observable(observable, model.dimension()), order, methods.at(method));
    } else if (list->parsed()) {
      const MarkedTensor f = obs_opt->count() > 0 ? parse_observable(observable, model.dimension())
                                                  : tensor_from_monomial(std::vector<unsigned>{legs});
      result = cmd_list_diagrams(model, f, order, formats.at(format));
    } else {
      result = cmd_check(model, CheckOptions{max_degree, order, seed, samples});
    }
    out << result.output;
    return result.exit_code;
  } catch (const ParseError& e) {
    err << "error: " << (e.line() == 0 ? "observable: " : model_path + ": ") << e.what() << '\n';
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
  } catch (const std::runtime_error& e) {
    err << "error: " << e.what() << '\n';
  }
  return 2;
}

}  // namespace hfeyn
