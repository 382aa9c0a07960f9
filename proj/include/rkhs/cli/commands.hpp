#pragma once

#include "rkhs/cli/json_io.hpp"
#include "rkhs/cli/quantize.hpp"

#include <iosfwd>
#include <optional>
#include <string>

namespace rkhs::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitValidation = 1,
  kExitNumerical = 2,
};

struct CommandOptions {
  std::string input;
  std::string output;  ///< empty or "-" for stdout
  std::optional<std::uint64_t> seed;
  bool strict = false;  ///< NotConverged becomes exit 2
  std::optional<double> tol;
  std::string csv;        ///< hardy-demo coefficient table, quantize rows
  std::string histogram;  ///< frame-bounds ratio histogram
  std::string gram_out;   ///< Gram matrix export
};

struct HardyInput {
  hardy::CoefficientFunction b;
  double r = 0.5;
  hardy::HardyDemoOptions options;
};

HardyInput parse_hardy_input(const json& doc);

/// Result document {version, command, inputs_digest, result, diagnostics}.
json result_document(const std::string& command, const json& input, json result,
                     const Diagnostics& diag);

int run_interpolate(const CommandOptions& opts, std::ostream& err);
int run_solve(const CommandOptions& opts, std::ostream& err);
int run_frame_bounds(const CommandOptions& opts, std::ostream& err);
int run_hardy_demo(const CommandOptions& opts, std::ostream& err);
int run_quantize(const CommandOptions& opts, std::ostream& err);

}  // namespace rkhs::cli
