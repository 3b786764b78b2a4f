#pragma once

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gamecond/equilibrium.hpp"
#include "gamecond/errors.hpp"
#include "gamecond/game.hpp"
#include "gamecond/io.hpp"
#include "gamecond/regularity.hpp"
#include "gamecond/smoothing.hpp"
#include "gamecond/tolerances.hpp"

namespace gamecond::cli {

using Json = nlohmann::ordered_json;

enum ExitCode : int {
  kOk = 0,
  kInternal = 1,
  kBadInput = 2,
  kAllEquilibria = 3,
  kIterationLimit = 4,
};

/// Parsed command line.
struct RunConfig {
  std::string command;
  std::string input_path;
  std::optional<io::MatrixFormat> format;
  std::optional<std::string> output_path;
  Tolerances tolerances;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  bool timestamp = true;
  bool allow_large = false;
  // kappa-oracle / kappa
  std::optional<double> grid_step;
  std::size_t samples = 0;
  // reg
  std::string point;
  // solve / report
  double eps = 1e-3;
  std::size_t max_iterations = 1'000'000;
  std::string ladder = "1e-1,1e-2,1e-3,1e-4";
  // vz-check
  std::size_t trials = 100;
};

namespace detail {

inline Json indices_json(const std::vector<int>& v) {
  Json a = Json::array();
  for (int i : v) a.push_back(i + 1);
  return a;
}

inline Json config_json(const IndexConfiguration& c) {
  return Json{{"I", indices_json(c.I)}, {"K", indices_json(c.K)}, {"J", indices_json(c.J)}};
}

inline Json vector_json(const Eigen::VectorXd& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

inline Json tolerances_json(const Tolerances& t) {
  return Json{{"feas", t.feas}, {"tie", t.tie}, {"zero", t.zero}, {"margin", t.margin},
              {"equil", t.equil}};
}

inline std::vector<double> parse_list(const std::string& text, char sep) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw Error(ErrorKind::InvalidArgument, "malformed number '" + item + "'");
    }
    if (io::detail::trim(item.substr(used)).size() != 0) {
      throw Error(ErrorKind::InvalidArgument, "malformed number '" + item + "'");
    }
    out.push_back(v);
  }
  return out;
}

/// "x1,...,xm;y1,...,yn"
inline StrategyProfile parse_point(const std::string& text) {
  const auto semi = text.find(';');
  if (semi == std::string::npos) {
    throw Error(ErrorKind::InvalidArgument, "point must have the form x1,...,xm;y1,...,yn");
  }
  const auto xs = parse_list(text.substr(0, semi), ',');
  const auto ys = parse_list(text.substr(semi + 1), ',');
  StrategyProfile w;
  w.x = Eigen::Map<const Eigen::VectorXd>(xs.data(), static_cast<Eigen::Index>(xs.size()));
  w.y = Eigen::Map<const Eigen::VectorXd>(ys.data(), static_cast<Eigen::Index>(ys.size()));
  return w;
}

inline std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline Json solve_trace_json(const SolveResult& r) {
  Json history = Json::array();
  for (const auto& h : r.trace.history) {
    history.push_back(Json{{"iteration", h.iteration}, {"gap", h.gap}});
  }
  return Json{{"x", vector_json(r.profile.x)},
              {"y", vector_json(r.profile.y)},
              {"epsilon", r.trace.epsilon},
              {"final_gap", r.trace.final_gap},
              {"iterations", r.trace.iterations},
              {"restart_count", r.trace.restart_count},
              {"history", history}};
}

}  // namespace detail

/// Dispatches one command and returns the "result" object. Errors propagate.
inline Json execute(const RunConfig& cfg, const MatrixGame& game, Json& diagnostics) {
  const Tolerances& tol = cfg.tolerances;
  if (cfg.command == "value") {
    const GameSolution sol = game_value(game);
    return Json{{"value", sol.value},
                {"y_level", sol.y_level},
                {"x_optimal", detail::vector_json(sol.x_optimal)},
                {"y_optimal", detail::vector_json(sol.y_optimal)}};
  }
  if (cfg.command == "kappa") {
    ConditionOptions opts;
    opts.tol = tol;
    opts.threads = cfg.threads;
    opts.allow_large = cfg.allow_large;
    ConditionReport rep = condition_measure(game, opts);
    if (cfg.samples > 0 || cfg.grid_step) {
      rep.oracle_estimate =
          condition_measure_oracle(game, SamplingPlan{cfg.grid_step, cfg.samples, cfg.seed}, tol);
    }
    Json marginal = Json::array();
    for (const auto& c : rep.marginal) marginal.push_back(detail::config_json(c));
    Json result{{"kappa", rep.kappa},
                {"witness_distance", rep.witness_distance},
                {"argmax_config", detail::config_json(rep.argmax_config)},
                {"configs_examined", rep.configs_examined},
                {"realization",
                 Json{{"x", detail::vector_json(rep.realization.point.x)},
                      {"y", detail::vector_json(rep.realization.point.y)},
                      {"slack", rep.realization.slack}}},
                {"marginal_configs", marginal}};
    if (rep.oracle_estimate) result["oracle_estimate"] = *rep.oracle_estimate;
    diagnostics["block_candidates"] = rep.block_candidates;
    return result;
  }
  if (cfg.command == "kappa-oracle") {
    SamplingPlan plan{cfg.grid_step, cfg.samples, cfg.seed};
    if (!plan.grid_step && plan.samples == 0) plan.samples = 10000;
    const double est = condition_measure_oracle(game, plan, tol);
    Json result{{"oracle_estimate", est}, {"samples", plan.samples}, {"seed", plan.seed}};
    if (plan.grid_step) result["grid_step"] = *plan.grid_step;
    return result;
  }
  if (cfg.command == "reg") {
    const StrategyProfile w = detail::parse_point(cfg.point);
    const double bound = exact_regularity_bound(game, w, tol);
    return Json{{"regularity_bound", bound},
                {"distance", 1.0 / bound},
                {"gap", gap_value(game, w)},
                {"index_sets", detail::config_json(index_sets(game, w, tol))}};
  }
  if (cfg.command == "solve") {
    SolveOptions opts;
    opts.max_iterations = cfg.max_iterations;
    return detail::solve_trace_json(solve(game, cfg.eps, opts));
  }
  if (cfg.command == "vz-check") {
    std::mt19937_64 rng(cfg.seed);
    const double threshold = equilibrium_threshold(game, tol);
    if (all_profiles_equilibria(game, tol)) {
      throw Error(ErrorKind::AllEquilibria, "all strategy profiles are equilibria");
    }
    double max_dev = 0.0;
    double max_norm_dev = 0.0;
    std::size_t done = 0;
    std::size_t draws = 0;
    while (done < cfg.trials) {
      if (++draws > 100 * cfg.trials + 1000) break;
      StrategyProfile w{gamecond::detail::random_face_point(rng, game.m()),
                        gamecond::detail::random_face_point(rng, game.n())};
      const double f = gap_value(game, w);
      if (f <= threshold) continue;
      double u = gamecond::detail::uniform01(rng);
      if (u <= 0.0) u = 0.5;
      const double z = f * u;
      const double direct = parametric_value_direct(game, w, z, tol);
      const double closed = parametric_value_closed_form(game, w, z, tol);
      max_dev = std::max(max_dev, std::abs(direct - closed));
      max_norm_dev = std::max(max_norm_dev, std::abs(direct - closed) / (1.0 + f));
      ++done;
    }
    return Json{{"trials", done},
                {"max_deviation", max_dev},
                {"max_normalized_deviation", max_norm_dev},
                {"within_tolerance", max_norm_dev <= 1e-6}};
  }
  throw Error(ErrorKind::InvalidArgument, "unknown command '" + cfg.command + "'");
}

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Condition measure and equilibrium tools for zero-sum matrix games", "gamecond"};
  app.fallthrough();
  app.require_subcommand(1, 1);

  std::string format_name;
  std::optional<unsigned> threads;
  bool no_timestamp = false;
  app.add_option("--input", cfg.input_path, "payoff matrix file (CSV or JSON)")->required();
  app.add_option("--format", format_name, "input format")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--output", cfg.output_path, "write the report here instead of stdout");
  app.add_option("--seed", cfg.seed, "random seed");
  app.add_option("--threads", threads, "worker threads for enumeration")
      ->check(CLI::Range(1u, 1024u));
  app.add_flag("--no-timestamp", no_timestamp, "omit timestamp and timing from diagnostics");
  app.add_flag("--allow-large", cfg.allow_large, "allow enumeration above m + n = 14");
  app.add_option("--tol-feas", cfg.tolerances.feas)->check(CLI::PositiveNumber);
  app.add_option("--tol-tie", cfg.tolerances.tie)->check(CLI::PositiveNumber);
  app.add_option("--tol-zero", cfg.tolerances.zero)->check(CLI::PositiveNumber);
  app.add_option("--tol-margin", cfg.tolerances.margin)->check(CLI::PositiveNumber);
  app.add_option("--tol-equil", cfg.tolerances.equil)->check(CLI::PositiveNumber);

  auto* value = app.add_subcommand("value", "game value and optimal strategies");
  auto* kappa = app.add_subcommand("kappa", "condition measure by configuration enumeration");
  kappa->add_option("--grid-step", cfg.grid_step, "also run the sampling oracle on this grid")
      ->check(CLI::PositiveNumber);
  kappa->add_option("--samples", cfg.samples, "also run the sampling oracle with this many samples");
  auto* oracle = app.add_subcommand("kappa-oracle", "sampling lower estimate of the condition measure");
  oracle->add_option("--grid-step", cfg.grid_step, "simplex grid spacing")->check(CLI::PositiveNumber);
  oracle->add_option("--samples", cfg.samples, "random samples");
  auto* reg = app.add_subcommand("reg", "exact regularity bound at a strategy profile");
  reg->add_option("--point", cfg.point, "profile as x1,...,xm;y1,...,yn")->required();
  auto* solve_cmd = app.add_subcommand("solve", "smoothing solver for an eps-equilibrium");
  solve_cmd->add_option("--eps", cfg.eps, "target gap")->check(CLI::PositiveNumber);
  solve_cmd->add_option("--max-iter", cfg.max_iterations, "iteration cap")
      ->check(CLI::PositiveNumber);
  auto* vz = app.add_subcommand("vz-check", "compare direct and closed-form parametric values");
  vz->add_option("--trials", cfg.trials, "random (point, level) pairs")->check(CLI::PositiveNumber);
  auto* report = app.add_subcommand("report", "CSV of iterations versus target gap");
  report->add_option("--ladder", cfg.ladder, "comma-separated decreasing targets");
  report->add_option("--max-iter", cfg.max_iterations, "iteration cap")->check(CLI::PositiveNumber);
  (void)value;

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kBadInput;
  }
  cfg.command = app.get_subcommands().front()->get_name();
  cfg.timestamp = !no_timestamp;
  if (!format_name.empty()) {
    cfg.format = format_name == "json" ? io::MatrixFormat::json : io::MatrixFormat::csv;
  }
  if (threads) {
    cfg.threads = *threads;
  } else if (const char* env = std::getenv("GAMECOND_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v >= 1 && v <= 1024) cfg.threads = static_cast<unsigned>(v);
    } catch (const std::exception&) {
      err << "warning: ignoring malformed GAMECOND_THREADS\n";
    }
  }

  auto emit = [&](const std::string& text) -> int {
    if (cfg.output_path) {
      std::ofstream file(*cfg.output_path, std::ios::binary);
      if (!file) {
        err << "error: cannot write '" << *cfg.output_path << "'\n";
        return kBadInput;
      }
      file << text;
    } else {
      out << text;
    }
    return kOk;
  };

  const auto started = std::chrono::steady_clock::now();
  try {
    const MatrixGame game = io::load_game(cfg.input_path, cfg.format);

    if (cfg.command == "report") {
      const auto ladder = detail::parse_list(cfg.ladder, ',');
      SolveOptions opts;
      opts.max_iterations = cfg.max_iterations;
      const auto rows = complexity_probe(game, ladder, opts);
      std::string csv = "epsilon,iterations,final_gap\n";
      for (const auto& r : rows) {
        csv += io::format_double(r.epsilon) + "," + std::to_string(r.iterations) + "," +
               io::format_double(r.final_gap) + "\n";
      }
      return emit(csv);
    }

    Json diagnostics = Json::object();
    diagnostics["m"] = game.m();
    diagnostics["n"] = game.n();
    diagnostics["threads"] = cfg.threads;
    int code = kOk;
    Json result;
    try {
      result = execute(cfg, game, diagnostics);
    } catch (const IterationLimitError& e) {
      result = detail::solve_trace_json(e.best());
      result["status"] = "iteration_limit_exceeded";
      code = kIterationLimit;
      err << "error: " << e.what() << "\n";
    }
    if (cfg.timestamp) {
      diagnostics["timestamp"] = detail::utc_timestamp();
      diagnostics["elapsed_ms"] =
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started)
              .count();
    }
    Json doc{{"command", cfg.command},
             {"input", cfg.input_path},
             {"result", result},
             {"diagnostics", diagnostics},
             {"tolerances", detail::tolerances_json(cfg.tolerances)}};
    const int written = emit(io::to_json_text(doc));
    return code != kOk ? code : written;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    switch (e.kind()) {
      case ErrorKind::AllEquilibria:
      case ErrorKind::PointIsEquilibrium:
        return kAllEquilibria;
      case ErrorKind::IterationLimitExceeded:
        return kIterationLimit;
      default:
        return kBadInput;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kInternal;
  }
}

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, out, err);
}

}  // namespace gamecond::cli
