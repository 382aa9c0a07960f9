#include "rkhs/cli/commands.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

using namespace rkhs;
using namespace rkhs::cli;

namespace {

Errc code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return Errc::InvalidArgument;
}

std::string message_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const std::exception& e) {
    return e.what();
  }
  return {};
}

const char* kMinimal = R"({
  "kernel": {"type": "gaussian", "gamma": 1.0},
  "points": [[0.0]],
  "targets": [2.0],
  "cost": {"type": "squared"},
  "p": 2
})";

// Scratch directory removed at scope exit.
struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("rkhs_cli_test_" + std::to_string(std::random_device{}()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string write(const std::string& name, const std::string& text) const {
    const auto p = path / name;
    std::ofstream(p) << text;
    return p.string();
  }
  json read_json(const std::string& name) const {
    std::ifstream in(path / name);
    return json::parse(in);
  }
};

}  // namespace

TEST_CASE("parse_problem") {
  SUBCASE("minimal file") {
    const ProblemSpec spec = parse_problem(std::string_view(kMinimal));
    REQUIRE(spec.measure.size() == 1);
    CHECK(spec.measure.weights()[0] == 1.0);
    CHECK(spec.field == Field::Real);
    CHECK(spec.p == 2.0);
    CHECK(spec.cost.is_squared());
    CHECK(spec.targets(0) == Scalar(2.0));
  }
  SUBCASE("weights summing to two are renormalized with a warning") {
    json doc = json::parse(kMinimal);
    doc["points"] = {{0.0}, {1.0}};
    doc["targets"] = {1.0, 2.0};
    doc["weights"] = {1.5, 0.5};
    Diagnostics diag;
    const ProblemSpec spec = parse_problem(doc, &diag);
    CHECK(spec.measure.weights()[0] == doctest::Approx(0.75));
    REQUIRE(diag.warnings.size() == 1);
    CHECK(diag.warnings[0].find("renormalized") != std::string::npos);
  }
  SUBCASE("unknown cost type names cost.type") {
    json doc = json::parse(kMinimal);
    doc["cost"]["type"] = "cubic";
    CHECK(code_of([&] { parse_problem(doc); }) == Errc::SchemaError);
    CHECK(message_of([&] { parse_problem(doc); }).find("cost.type") != std::string::npos);
  }
  SUBCASE("unknown keys are rejected with their path") {
    json doc = json::parse(kMinimal);
    doc["kernel"]["sigma"] = 2.0;
    CHECK(code_of([&] { parse_problem(doc); }) == Errc::SchemaError);
    CHECK(message_of([&] { parse_problem(doc); }).find("kernel.sigma") != std::string::npos);
    doc = json::parse(kMinimal);
    doc["extra"] = 1;
    CHECK(message_of([&] { parse_problem(doc); }).find("extra") != std::string::npos);
  }
  SUBCASE("invariant violations") {
    json doc = json::parse(kMinimal);
    doc["points"] = {{0.0}, {0.0}};
    doc["targets"] = {1.0, 2.0};
    CHECK(code_of([&] { parse_problem(doc); }) == Errc::InvariantViolation);
    doc = json::parse(kMinimal);
    doc["weights"] = {-1.0};
    CHECK(code_of([&] { parse_problem(doc); }) == Errc::InvariantViolation);
  }
  SUBCASE("type errors") {
    json doc = json::parse(kMinimal);
    doc["p"] = "two";
    CHECK(code_of([&] { parse_problem(doc); }) == Errc::SchemaError);
    doc = json::parse(kMinimal);
    doc.erase("targets");
    CHECK(message_of([&] { parse_problem(doc); }).find("targets") != std::string::npos);
    CHECK(code_of([] { parse_problem(std::string_view("{not json")); }) == Errc::SchemaError);
  }
  SUBCASE("complex problems use [re, im] pairs") {
    json doc = {{"field", "complex"},
                {"kernel", {{"type", "szego"}}},
                {"points", {{0.1, 0.2}, {-0.3, 0.0}}},
                {"targets", {{1.0, -1.0}, {0.0, 2.0}}},
                {"cost", {{"type", "huber"}, {"delta", 0.5}}},
                {"p", 1.5}};
    const ProblemSpec spec = parse_problem(doc);
    CHECK(spec.measure.points()[0].z() == Scalar(0.1, 0.2));
    CHECK(spec.targets(1) == Scalar(0.0, 2.0));
    doc["targets"] = {1.0, 2.0};
    CHECK(code_of([&] { parse_problem(doc); }) == Errc::SchemaError);
  }
}

TEST_CASE("serialize(parse(file)) is idempotent") {
  const std::vector<std::string> files = {
      kMinimal,
      R"({"field": "complex", "kernel": {"type": "bergman"}, "points": [[0.1, 0.2], [-0.3, 0.0]],
          "weights": [1, 3], "targets": [[1.0, -1.0], [0.0, 2.0]],
          "cost": {"type": "eps_insensitive", "eps": 0.25}, "p": 3,
          "solver": {"method": "iterative", "tol": 1e-9, "max_iter": 100, "seed": 5}})",
      R"({"kernel": {"type": "polynomial", "degree": 3, "offset": 0.5}, "points": [[0, 1], [2, 3]],
          "targets": [0.1, 0.2], "cost": {"type": "power", "q": 1.25}, "p": 1})"};
  for (const std::string& text : files) {
    SolverConfig solver;
    const ProblemSpec spec = parse_problem(std::string_view(text), nullptr, &solver);
    const json once = serialize_problem(spec, solver);
    SolverConfig solver2;
    const json twice = serialize_problem(parse_problem(once, nullptr, &solver2), solver2);
    CHECK(once == twice);
  }
}

TEST_CASE("complex text and Gram CSV") {
  CHECK(parse_complex_text("1.5") == Scalar(1.5, 0.0));
  CHECK(parse_complex_text("1-2i") == Scalar(1.0, -2.0));
  CHECK(parse_complex_text("-0.5+0.25i") == Scalar(-0.5, 0.25));
  CHECK(parse_complex_text("1e-3+1e-3i") == Scalar(1e-3, 1e-3));
  CHECK(parse_complex_text("i") == Scalar(0.0, 1.0));
  CHECK(parse_complex_text("-i") == Scalar(0.0, -1.0));
  CHECK(parse_complex_text("2i") == Scalar(0.0, 2.0));
  CHECK_THROWS_AS(parse_complex_text("abc"), Error);
  CHECK_THROWS_AS(parse_complex_text(""), Error);

  std::mt19937_64 rng(89);
  for (bool complex : {false, true}) {
    const Matrix q = testing::random_psd(rng, 5, 3, complex);
    std::stringstream ss;
    write_gram_csv(q, ss);
    const Matrix back = read_gram_csv(ss);
    CHECK(back == q);  // %.17g round-trips exactly
  }
  std::stringstream bad("1,2\n3\n");
  CHECK_THROWS_AS(read_gram_csv(bad), Error);
}

TEST_CASE("inputs digest") {
  const json a = json::parse(R"({"b": 1, "a": [1, 2]})");
  const json b = json::parse(R"({"a": [1, 2], "b": 1})");
  CHECK(inputs_digest(a) == inputs_digest(b));
  CHECK(inputs_digest(a).rfind("sha256:", 0) == 0);
  CHECK(inputs_digest(a).size() == 7 + 64);
  CHECK(inputs_digest(a) != inputs_digest(json::parse(R"({"a": [2, 1], "b": 1})")));
  // Known vector: sha256 of the two bytes "{}".
  CHECK(inputs_digest(json::object()) ==
        "sha256:44136fa355b3678a1146ad16f7e8649e94fb4fc21fe77e8310c060f61caaff8a");
}

TEST_CASE("hardy input") {
  const HardyInput in = parse_hardy_input(json::parse(
      R"({"b": [1, [0, 0.5]], "r": 0.3, "M": 4, "quadrature": {"n_r": 10, "n_theta": 12}})"));
  CHECK(in.b.coeffs[1] == Scalar(0.0, 0.5));
  CHECK(in.r == 0.3);
  CHECK(in.options.truncation.value() == 4);
  CHECK(in.options.quad.n_theta == 12);
  CHECK(code_of([] { parse_hardy_input(json::parse(R"({"b": [1, 2], "r": 0.5, "M": 1})")); }) ==
        Errc::SchemaError);
  CHECK(code_of([] { parse_hardy_input(json::parse(R"({"b": [1], "r": 0.5, "q": 1})")); }) ==
        Errc::SchemaError);
}

TEST_CASE("quantize study") {
  const json doc = json::parse(R"({
    "sampler": {"type": "box", "lower": [-1], "upper": [1]},
    "target": {"type": "affine", "intercept": 0.5, "slope": [2.0]},
    "kernel": {"type": "gaussian", "gamma": 1.0},
    "cost": {"type": "huber", "delta": 0.5},
    "p": 2,
    "N": [8],
    "repetitions": 2,
    "seed": 3
  })");
  SUBCASE("same seed, identical results") {
    const auto a = run_quantize_study(parse_quantize_spec(doc));
    const auto b = run_quantize_study(parse_quantize_spec(doc));
    REQUIRE(a.rows.size() == 2);
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
      CHECK(a.rows[i].objective == b.rows[i].objective);
      CHECK(a.rows[i].seed == b.rows[i].seed);
      CHECK(a.rows[i].probe_values == b.rows[i].probe_values);
    }
    CHECK(a.rows[0].seed != a.rows[1].seed);
    std::stringstream csv;
    write_quantize_csv(a, csv);
    std::string header;
    std::getline(csv, header);
    CHECK(header == "N,repetition,objective,rkhs_norm,probe_drift");
  }
  SUBCASE("cell seeds do not depend on evaluation order") {
    CHECK(cell_seed(1, 0, 0) == cell_seed(1, 0, 0));
    CHECK(cell_seed(1, 0, 1) != cell_seed(1, 1, 0));
    CHECK(cell_seed(1, 2, 3) != cell_seed(2, 2, 3));
  }
  SUBCASE("validation") {
    json bad = doc;
    bad["N"] = {8, 8};
    CHECK_THROWS_AS(run_quantize_study(parse_quantize_spec(bad)), Error);
    bad = doc;
    bad["repetitions"] = 0;
    CHECK_THROWS_AS(run_quantize_study(parse_quantize_spec(bad)), Error);
    bad = doc;
    bad["sampler"]["type"] = "sphere";
    CHECK(code_of([&] { parse_quantize_spec(bad); }) == Errc::SchemaError);
  }
  SUBCASE("disk study approaches the Euler-Lagrange prediction") {
    const json disk = json::parse(R"({
      "sampler": {"type": "disk", "r": 0.5},
      "target": {"type": "bergman", "coeffs": [1.0, 0.5]},
      "kernel": {"type": "szego"},
      "cost": {"type": "squared"},
      "p": 2,
      "N": [16, 256, 2048],
      "repetitions": 1,
      "seed": 11
    })");
    const auto res = run_quantize_study(parse_quantize_spec(disk));
    REQUIRE(res.formula_probe_values.has_value());
    REQUIRE(res.rows.size() == 3);
    CHECK(res.rows[2].formula_deviation.value() < res.rows[0].formula_deviation.value());
    CHECK(res.rows[2].formula_deviation.value() < 5e-2);
  }
}

TEST_CASE("commands write result documents and exit codes") {
  TempDir tmp;
  std::ostringstream err;
  CommandOptions opts;

  SUBCASE("solve on the scalar example") {
    opts.input = tmp.write("in.json", kMinimal);
    opts.output = (tmp.path / "out.json").string();
    CHECK(run_solve(opts, err) == kExitOk);
    const json out = tmp.read_json("out.json");
    CHECK(out["version"] == kSchemaVersion);
    CHECK(out["command"] == "solve");
    CHECK(out["result"]["alpha"][0].get<double>() == doctest::Approx(1.0));
    CHECK(out["result"]["objective"].get<double>() == doctest::Approx(2.0));
    CHECK(err.str().empty());
  }
  SUBCASE("interpolate with an invertible Gram") {
    opts.input = tmp.write("in.json", R"({"kernel": {"type": "gaussian", "gamma": 1},
        "points": [[0], [1], [2.5]], "targets": [1, -2, 0.5]})");
    opts.output = (tmp.path / "out.json").string();
    opts.gram_out = (tmp.path / "gram.csv").string();
    CHECK(run_interpolate(opts, err) == kExitOk);
    CHECK(tmp.read_json("out.json")["result"]["lsq_error"].get<double>() <= 1e-12);
    std::ifstream g(tmp.path / "gram.csv");
    CHECK(read_gram_csv(g).rows() == 3);
  }
  SUBCASE("hardy-demo with a constant target") {
    opts.input = tmp.write("in.json", R"({"b": [1], "r": 0.5})");
    opts.output = (tmp.path / "out.json").string();
    opts.csv = (tmp.path / "coeffs.csv").string();
    CHECK(run_hardy_demo(opts, err) == kExitOk);
    const json out = tmp.read_json("out.json");
    CHECK(out["result"]["coefficients"][0]["computed"][0].get<double>() == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(std::filesystem::exists(tmp.path / "coeffs.csv"));
  }
  SUBCASE("validation errors exit 1 with a JSON error") {
    opts.input = tmp.write("in.json", R"({"kernel": {"type": "gaussian", "gamma": 1},
        "points": [[0]], "targets": [1], "cost": {"type": "cubic"}, "p": 2})");
    CHECK(run_solve(opts, err) == kExitValidation);
    const json e = json::parse(err.str());
    CHECK(e["error"]["code"] == "SchemaError");
    CHECK(e["error"]["message"].get<std::string>().find("cost.type") != std::string::npos);
  }
  SUBCASE("missing input file") {
    opts.input = (tmp.path / "nope.json").string();
    CHECK(run_solve(opts, err) == kExitValidation);
  }
  SUBCASE("non-convergence is fatal only with --strict") {
    opts.input = tmp.write("in.json", R"({"kernel": {"type": "gaussian", "gamma": 1},
        "points": [[0], [0.5], [1.5]], "targets": [1, -1, 2], "cost": {"type": "power", "q": 1.5},
        "p": 1.5, "solver": {"max_iter": 1}})");
    opts.output = (tmp.path / "out.json").string();
    CHECK(run_solve(opts, err) == kExitOk);
    CHECK(tmp.read_json("out.json")["result"]["converged"] == false);
    opts.strict = true;
    CHECK(run_solve(opts, err) == kExitNumerical);
  }
  SUBCASE("degenerate span exits 2") {
    tmp.write("zero.csv", "0,0\n0,0\n");
    opts.input = tmp.write("in.json", R"({"kernel": {"type": "gram", "csv": "zero.csv"}})");
    opts.output = (tmp.path / "out.json").string();
    CHECK(run_frame_bounds(opts, err) == kExitNumerical);
    CHECK(json::parse(err.str())["error"]["code"] == "DegenerateSpan");
  }
  SUBCASE("seed flag overrides the file seed") {
    opts.input = tmp.write("in.json", R"({"kernel": {"type": "gaussian", "gamma": 1},
        "points": [[0], [1]], "frame": {"n_samples": 10, "seed": 4}})");
    opts.output = (tmp.path / "a.json").string();
    CHECK(run_frame_bounds(opts, err) == kExitOk);
    opts.seed = 99;
    opts.output = (tmp.path / "b.json").string();
    CHECK(run_frame_bounds(opts, err) == kExitOk);
    CHECK(tmp.read_json("a.json")["result"]["seed"] == 4);
    CHECK(tmp.read_json("b.json")["result"]["seed"] == 99);
    CHECK(tmp.read_json("a.json")["inputs_digest"] != tmp.read_json("b.json")["inputs_digest"]);
  }
}
