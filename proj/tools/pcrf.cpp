// Command line front end: parses one model file and runs one inference
// command against it. Records go to stdout, notices and errors to stderr.
// Exit codes: 0 success, 1 invalid input or arguments, 2 internal error.

#include <exception>
#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "pcrf/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"inference over pattern-based chain models"};
  app.require_subcommand(1);

  std::string file;
  pcrf::cli::Request req;

  std::map<std::string, pcrf::cli::Algo> algo_names{
      {"auto", pcrf::cli::Algo::automatic}, {"alg1", pcrf::cli::Algo::alg1},
      {"alg4", pcrf::cli::Algo::alg4},      {"alg5", pcrf::cli::Algo::alg5},
      {"alg6", pcrf::cli::Algo::alg6},
  };

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("model", file, "model file")->required();
    sub->add_flag("--timing", req.timing,
                  "append a timing record (exempt from byte-identical output)");
    return sub;
  };

  CLI::App* partition = add_common(app.add_subcommand(
      "partition", "combined weight of all labelings under the model's semiring"));
  partition->add_option("--algorithm", req.algorithm, "chain algorithm (default auto)")
      ->transform(CLI::CheckedTransformer(algo_names, CLI::ignore_case));

  CLI::App* map_cmd =
      add_common(app.add_subcommand("map", "minimum total energy and a witness labeling"));
  map_cmd->add_option("--algorithm", req.algorithm, "alg6, or alg5 for the general fallback")
      ->transform(CLI::CheckedTransformer(algo_names, CLI::ignore_case));
  map_cmd->add_flag("--fft", req.fft, "assemble window costs through correlation tables");
  map_cmd->add_flag("--exact-pi-tilde", req.exact_pi_tilde, "exact suffix classes");
  map_cmd->add_option("--delta", req.delta, "transform split threshold (default 1)")
      ->check(CLI::NonNegativeNumber);

  add_common(app.add_subcommand("marginals",
                                "occurrence probability of every positioned pattern"));

  CLI::App* sample = add_common(app.add_subcommand("sample", "exact draws from the model"));
  sample->add_option("--seed", req.seed, "random seed (default $PCRF_SEED, else 0)")
      ->envname("PCRF_SEED");
  sample->add_option("--count", req.count, "number of draws (default 1)")
      ->check(CLI::PositiveNumber);

  add_common(app.add_subcommand("stats", "model size statistics"));
  add_common(app.add_subcommand("check", "cross-check engine paths against enumeration"));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  req.command = app.get_subcommands().front()->get_name();
  try {
    std::ifstream in(file);
    if (!in) throw pcrf::ModelError("cannot open model file '" + file + "'");
    req.model = pcrf::parse_model(in);
    pcrf::cli::run(req, std::cout, std::cerr);
  } catch (const pcrf::ModelError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
