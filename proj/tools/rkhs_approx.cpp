#include "rkhs/cli/commands.hpp"

#include <CLI11.hpp>

#include <functional>
#include <iostream>

namespace {

using rkhs::cli::CommandOptions;

struct RawFlags {
  std::uint64_t seed = 0;
  double tol = 0.0;
};

CLI::App* add_command(CLI::App& app, const std::string& name, const std::string& description,
                      CommandOptions& opts, RawFlags& raw) {
  CLI::App* sub = app.add_subcommand(name, description);
  sub->add_option("--input,-i", opts.input, "Input JSON file")->required();
  sub->add_option("--output,-o", opts.output, "Result JSON file (default: stdout)");
  sub->add_option("--seed", raw.seed, "Override the random seed");
  sub->add_option("--tol", raw.tol, "Override the solver tolerance")
      ->check(CLI::PositiveNumber);
  sub->add_flag("--strict", opts.strict, "Treat non-convergence as a failure (exit 2)");
  return sub;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Regularized least-squares approximation in reproducing kernel Hilbert spaces"};
  app.require_subcommand(1);

  CommandOptions opts;
  RawFlags raw;

  CLI::App* interp =
      add_command(app, "interpolate", "Minimum-norm kernel interpolation", opts, raw);
  interp->add_option("--gram-out", opts.gram_out, "Write the Gram matrix as CSV");

  CLI::App* solve = add_command(app, "solve", "Solve the regularized problem", opts, raw);
  solve->add_option("--gram-out", opts.gram_out, "Write the Gram matrix as CSV");

  CLI::App* frame = add_command(app, "frame-bounds", "Norm-equivalence constants", opts, raw);
  frame->add_option("--histogram", opts.histogram, "Write the ratio histogram as CSV");
  frame->add_option("--gram-out", opts.gram_out, "Write the Gram matrix as CSV");

  CLI::App* hardy = add_command(app, "hardy-demo", "Hardy/Bergman worked example", opts, raw);
  hardy->add_option("--csv", opts.csv, "Write the coefficient table as CSV");

  CLI::App* quant = add_command(app, "quantize", "Empirical-measure convergence study", opts, raw);
  quant->add_option("--csv", opts.csv, "Write per-cell rows as CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return rkhs::cli::kExitValidation;
  }

  for (CLI::App* sub : app.get_subcommands()) {
    if (sub->count("--seed") > 0) opts.seed = raw.seed;
    if (sub->count("--tol") > 0) opts.tol = raw.tol;
  }

  if (interp->parsed()) return rkhs::cli::run_interpolate(opts, std::cerr);
  if (solve->parsed()) return rkhs::cli::run_solve(opts, std::cerr);
  if (frame->parsed()) return rkhs::cli::run_frame_bounds(opts, std::cerr);
  if (hardy->parsed()) return rkhs::cli::run_hardy_demo(opts, std::cerr);
  if (quant->parsed()) return rkhs::cli::run_quantize(opts, std::cerr);
  return rkhs::cli::kExitValidation;
}
