#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "linfcomp/cli.hpp"

int main(int argc, char** argv) {
  using namespace linfcomp;

  CLI::App app{"L-infinity compositional data analysis toolkit"};
  app.name("linf-compose");

  RunConfig cfg;
  std::string input, labels, out = ".", p;
  app.add_option("command", cfg.command, "Subcommand")
      ->required()
      ->check(CLI::IsMember(subcommands()));
  app.add_option("--input", input, "Count table (comma or tab delimited)");
  app.add_option("--labels", labels, "Two-column table: sample ID, external label");
  app.add_option("--ref", cfg.refs, "Reference component name(s)")->expected(1, -1);
  app.add_option("--n0", cfg.n0, "Minimum cell size for truncation and crosstabs")->capture_default_str();
  app.add_option("--tau", cfg.tau, "Dominance threshold for the dominant_set column")->capture_default_str();
  app.add_option("--p", p, "Lp exponent: positive number or 'inf'");
  app.add_option("--C", cfg.C, "Safety factor for lambda selection")->capture_default_str();
  app.add_option("--base", cfg.base, "Base dissimilarity for dist")
      ->check(CLI::IsMember({"bray_curtis", "manhattan", "euclidean", "angular"}))
      ->capture_default_str();
  app.add_option("--out", out, "Output directory")->capture_default_str();
  app.add_option("--seed", cfg.seed, "Seed for synth")->capture_default_str();
  app.add_option("--n", cfg.synth_samples, "synth: number of samples")->capture_default_str();
  app.add_option("--components", cfg.synth_components, "synth: number of components")->capture_default_str();
  app.add_option("--sparsity", cfg.synth_sparsity, "synth: fraction of zeroed non-dominant entries")
      ->capture_default_str();
  app.add_option("--dominance", cfg.synth_dominance, "synth: lower bound of the dominant value")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitInput;
  }

  if (cfg.command != "synth" && input.empty()) {
    std::cerr << "error: invalid_argument/MissingInput: --input is required\n";
    return kExitInput;
  }
  cfg.input = input;
  if (!labels.empty()) cfg.labels = labels;
  cfg.out = out;
  cfg.threads = threads_from_env();
  if (!p.empty()) {
    try {
      cfg.p = PExponent::parse(p);
    } catch (const Error& e) {
      std::cerr << "error: " << to_string(e.category()) << '/' << e.kind() << ": " << e.what() << '\n';
      return kExitInput;
    }
  }
  return run_command(cfg);
}
