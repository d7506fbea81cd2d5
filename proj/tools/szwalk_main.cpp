// szwalk command-line front end.
//
// Subcommands:
//   walk           evolve a quantum walk and write per-step distributions
//   semiclassical  build a semiclassical transition matrix
//   pagerank       quantum PageRank over a transition or adjacency matrix
//   bench          scaling benchmark with power-law fits
//
// Exit codes: 0 success, 2 usage error, 3 input validation error,
// 4 numerical error.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "szwalk/szwalk.hpp"

namespace {

using nlohmann::json;
using namespace szwalk;

constexpr int kUsageExit = 2;

Real parse_angle_flag(const std::string& text, const std::string& flag) {
  auto parsed = parse_angle_expr(text);
  if (const auto* err = std::get_if<ParseError>(&parsed)) {
    throw Error(ErrorCode::InvalidArgument,
                flag + ": offset " + std::to_string(err->offset) + ": " +
                    err->message);
  }
  return std::get<AngleExpr>(parsed).value();
}

PipelineExpr parse_pipeline_flag(const std::string& text, bool reverse) {
  auto parsed = parse_pipeline(text);
  if (const auto* err = std::get_if<ParseError>(&parsed)) {
    throw Error(ErrorCode::InvalidArgument,
                "--unitary: offset " + std::to_string(err->offset) + ": " +
                    err->message);
  }
  PipelineExpr expr = std::get<PipelineExpr>(std::move(parsed));
  if (reverse) {
    std::reverse(expr.tokens.begin(), expr.tokens.end());
  }
  return expr;
}

StochasticPolicy parse_policy(const std::string& name) {
  if (name == "strict") return StochasticPolicy::strict;
  if (name == "renormalize") return StochasticPolicy::renormalize;
  throw Error(ErrorCode::InvalidArgument,
              "--policy must be strict or renormalize");
}

struct WalkArgs {
  std::string graph;
  int steps = 0;
  std::string unitary;
  std::string measure = "both";
  std::string initial = "superposition";
  std::string theta_file;
  std::string output_prefix = "walk";
  std::string policy = "strict";
  std::string apply_order = "notation";
};

int run_walk(const WalkArgs& args) {
  const TransitionMatrix g = TransitionMatrix::validated(
      io::read_matrix_csv(args.graph), parse_policy(args.policy));

  std::optional<PhaseMatrix> theta;
  if (!args.theta_file.empty()) {
    theta = io::read_matrix_csv(args.theta_file);
  }

  Register reg;
  if (args.measure == "1") {
    reg = Register::first;
  } else if (args.measure == "2") {
    reg = Register::second;
  } else if (args.measure == "both") {
    reg = Register::both;
  } else {
    throw Error(ErrorCode::InvalidArgument, "--measure must be 1, 2 or both");
  }

  if (args.apply_order != "notation" && args.apply_order != "left") {
    throw Error(ErrorCode::InvalidArgument,
                "--apply-order must be notation or left");
  }
  const PipelineExpr expr =
      parse_pipeline_flag(args.unitary, args.apply_order == "left");
  const BoundPipeline bound =
      bind_pipeline(expr, g, theta ? &*theta : nullptr);

  const auto load_initial = [&](auto scalar_tag) {
    using Scalar = decltype(scalar_tag);
    if (args.initial == "superposition") {
      if constexpr (is_complex_v<Scalar>) {
        return initial_superposition(
            theta ? build_psi_matrix(g, *theta)
                  : build_psi_matrix(g, PhaseMatrix::Zero(g.n(), g.n())));
      } else {
        return initial_superposition(build_psi_matrix(g));
      }
    }
    const ComplexVector v = io::read_state_vector(args.initial);
    bool renormalized = false;
    MatrixState<Complex> phi = vector_to_matrix(v, true, &renormalized);
    if (renormalized) {
      std::cerr << "warning: initial state renormalized to unit norm\n";
    }
    if (phi.rows() != g.n()) {
      throw Error(ErrorCode::DimensionMismatch,
                  "initial state is for N=" + std::to_string(phi.rows()) +
                      " but the graph has N=" + std::to_string(g.n()));
    }
    if constexpr (is_complex_v<Scalar>) {
      return phi;
    } else {
      if (phi.imag().cwiseAbs().maxCoeff() != 0.0) {
        throw Error(ErrorCode::InvalidArgument,
                    "initial state has imaginary parts but the pipeline is "
                    "real; add an angle or phase matrix to force complex "
                    "arithmetic");
      }
      return MatrixState<Real>(phi.real());
    }
  };

  const MeasurementResult result = std::visit(
      [&](const auto& pipeline) -> MeasurementResult {
        using Pipeline = std::decay_t<decltype(pipeline)>;
        if constexpr (std::is_same_v<Pipeline, UnitaryPipeline<Real>>) {
          return evolve(load_initial(Real{}), pipeline, args.steps, reg);
        } else {
          return evolve(load_initial(Complex{}), pipeline, args.steps, reg);
        }
      },
      bound);

  if (!result.first.empty()) {
    io::write_trace_csv(args.output_prefix + "_reg1.csv", result.first);
  }
  if (!result.second.empty()) {
    io::write_trace_csv(args.output_prefix + "_reg2.csv", result.second);
  }
  return 0;
}

struct SemiclassicalArgs {
  std::string graph;
  int tq = 0;
  int walk_class = 2;
  std::string unitary;
  Index batch_size = kDefaultBatchStates;
  std::string output = "semiclassical.csv";
  std::string policy = "strict";
  std::string apply_order = "notation";
};

int run_semiclassical(const SemiclassicalArgs& args) {
  const TransitionMatrix g = TransitionMatrix::validated(
      io::read_matrix_csv(args.graph), parse_policy(args.policy));
  const PipelineExpr expr =
      parse_pipeline_flag(args.unitary, args.apply_order == "left");
  const BoundPipeline bound = bind_pipeline(expr, g, nullptr);

  SemiclassicalConfig cfg;
  cfg.quantum_time = args.tq;
  cfg.walk_class = args.walk_class == 1 ? WalkClass::one : WalkClass::two;
  cfg.batch_size = args.batch_size;

  const SemiclassicalMatrix sc = std::visit(
      [&](const auto& pipeline) {
        return build_semiclassical_matrix(g, pipeline, cfg);
      },
      bound);
  io::write_matrix_csv(args.output, sc.matrix());
  return 0;
}

struct PageRankArgs {
  std::string graph;
  std::string adjacency;
  Real damping = 0.85;
  int steps = 50;
  std::string theta1 = "pi";
  std::string theta2 = "pi";
  bool include_t0 = false;
  std::string output_prefix = "pagerank";
  bool sorted = false;
  std::string policy = "strict";
};

int run_pagerank(const PageRankArgs& args) {
  if (args.graph.empty() == args.adjacency.empty()) {
    throw Error(ErrorCode::InvalidArgument,
                "provide exactly one of --graph or --adjacency");
  }
  const TransitionMatrix g =
      args.graph.empty()
          ? build_google_matrix(io::read_matrix_csv(args.adjacency),
                                args.damping)
          : TransitionMatrix::validated(io::read_matrix_csv(args.graph),
                                        parse_policy(args.policy));

  PageRankConfig cfg;
  cfg.steps = args.steps;
  cfg.theta1 = parse_angle_flag(args.theta1, "--theta1");
  cfg.theta2 = parse_angle_flag(args.theta2, "--theta2");
  cfg.damping = args.damping;
  cfg.include_t0 = args.include_t0;

  const PageRankResult result = quantum_pagerank(g, cfg);
  io::write_ranking_csv(args.output_prefix + ".csv", result.ranking, false);
  if (args.sorted) {
    io::write_ranking_csv(args.output_prefix + "_sorted.csv", result.ranking,
                          true);
  }
  return 0;
}

struct BenchArgs {
  std::vector<Index> sizes = {1000, 2000, 4000};
  int steps = 100;
  std::uint64_t seed = 1;
  std::string metric = "time";
  bool include_small = false;
  int repeats = 1;
  std::string output;
};

int run_bench(const BenchArgs& args) {
  if (args.metric != "time" && args.metric != "memory") {
    throw Error(ErrorCode::InvalidArgument, "--metric must be time or memory");
  }
  bench::BenchOptions opts;
  opts.steps = args.steps;
  opts.seed = args.seed;
  opts.include_small = args.include_small;
  opts.repeats = args.repeats;

  const std::vector<bench::SizeSample> samples =
      bench::run_scaling_samples(args.sizes, opts);
  const bench::ScalingFit time_fit =
      bench::fit_samples(samples, bench::Metric::time, opts);
  const bench::ScalingFit memory_fit =
      bench::fit_samples(samples, bench::Metric::memory, opts);

  std::ostringstream out;
  for (const bench::SizeSample& s : samples) {
    out << json{{"size", s.size},
                {"seconds", s.seconds},
                {"peak_bytes", s.peak_bytes},
                {"seed", s.seed}}
               .dump()
        << '\n';
  }
  out << json{{"time",
               {{"A", time_fit.amplitude},
                {"n", time_fit.exponent},
                {"stderr_n", time_fit.stderr_n}}},
              {"memory",
               {{"A", memory_fit.amplitude},
                {"n", memory_fit.exponent},
                {"stderr_n", memory_fit.stderr_n}}}}
             .dump()
      << '\n';

  if (args.output.empty()) {
    std::cout << out.str();
  } else {
    std::ofstream file(args.output, std::ios::binary);
    if (!file) {
      throw Error(ErrorCode::IoError,
                  "cannot open '" + args.output + "' for writing");
    }
    file << out.str();
  }

  const bench::ScalingFit& report =
      args.metric == "time" ? time_fit : memory_fit;
  std::cerr << "fitted " << args.metric << " exponent n = " << report.exponent
            << " (stderr " << report.stderr_n << ")\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Szegedy quantum walk simulator"};
  app.require_subcommand(1);

  WalkArgs walk_args;
  CLI::App* walk = app.add_subcommand("walk", "evolve a walk, write traces");
  walk->add_option("--graph", walk_args.graph, "transition matrix CSV")
      ->required();
  walk->add_option("--steps", walk_args.steps, "number of walk steps")
      ->required()
      ->check(CLI::NonNegativeNumber);
  walk->add_option("--unitary", walk_args.unitary,
                   "pipeline, e.g. \"S R\" or \"S Q1{0,2} R(pi/2)\"")
      ->required();
  walk->add_option("--measure", walk_args.measure, "register: 1, 2 or both");
  walk->add_option("--initial", walk_args.initial,
                   "'superposition' or a state vector file");
  walk->add_option("--theta-matrix", walk_args.theta_file,
                   "per-edge phase matrix CSV");
  walk->add_option("--output", walk_args.output_prefix,
                   "output prefix for <prefix>_regK.csv");
  walk->add_option("--policy", walk_args.policy, "strict or renormalize");
  walk->add_option("--apply-order", walk_args.apply_order,
                   "notation (leftmost last) or left (leftmost first)");

  SemiclassicalArgs sc_args;
  CLI::App* sc =
      app.add_subcommand("semiclassical", "build a semiclassical matrix");
  sc->add_option("--graph", sc_args.graph, "transition matrix CSV")
      ->required();
  sc->add_option("--tq", sc_args.tq, "quantum steps between measurements")
      ->required()
      ->check(CLI::NonNegativeNumber);
  sc->add_option("--class", sc_args.walk_class, "1 or 2: register measured")
      ->required()
      ->check(CLI::Range(1, 2));
  sc->add_option("--unitary", sc_args.unitary, "pipeline DSL")->required();
  sc->add_option("--batch-size", sc_args.batch_size,
                 "states vectorized at once");
  sc->add_option("--output", sc_args.output, "output CSV path");
  sc->add_option("--policy", sc_args.policy, "strict or renormalize");
  sc->add_option("--apply-order", sc_args.apply_order, "notation or left");

  PageRankArgs pr_args;
  CLI::App* pr = app.add_subcommand("pagerank", "quantum PageRank");
  pr->add_option("--graph", pr_args.graph, "transition matrix CSV");
  pr->add_option("--adjacency", pr_args.adjacency,
                 "adjacency matrix CSV (Google matrix is built from it)");
  pr->add_option("--damping", pr_args.damping, "damping factor in (0,1]");
  pr->add_option("--steps", pr_args.steps, "time steps of the double walk")
      ->check(CLI::PositiveNumber);
  pr->add_option("--theta1", pr_args.theta1, "angle of the later reflection");
  pr->add_option("--theta2", pr_args.theta2, "angle of the first reflection");
  pr->add_flag("--include-t0", pr_args.include_t0,
               "include the initial distribution in the time average");
  pr->add_option("--output", pr_args.output_prefix, "output prefix");
  pr->add_flag("--sorted", pr_args.sorted,
               "also write <prefix>_sorted.csv by descending score");
  pr->add_option("--policy", pr_args.policy, "strict or renormalize");

  BenchArgs bench_args;
  CLI::App* bench = app.add_subcommand("bench", "scaling benchmark");
  bench->add_option("--sizes", bench_args.sizes,
                    "graph sizes, strictly increasing")
      ->delimiter(',');
  bench->add_option("--steps", bench_args.steps, "walk steps per size");
  bench->add_option("--seed", bench_args.seed, "random seed");
  bench->add_option("--metric", bench_args.metric,
                    "metric reported on stderr: time or memory");
  bench->add_flag("--include-small", bench_args.include_small,
                  "fit sizes below 1000 too");
  bench->add_option("--repeats", bench_args.repeats,
                    "timed repetitions per size; the minimum is kept")
      ->check(CLI::PositiveNumber);
  bench->add_option("--output", bench_args.output,
                    "JSON-lines report path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << '\n' << app.help() << '\n';
    return kUsageExit;
  }

  try {
    if (walk->parsed()) return run_walk(walk_args);
    if (sc->parsed()) return run_semiclassical(sc_args);
    if (pr->parsed()) return run_pagerank(pr_args);
    if (bench->parsed()) return run_bench(bench_args);
    std::cerr << app.help() << '\n';
    return kUsageExit;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  }
}
