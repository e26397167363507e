// Copyright 2026 The ldp-lab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ldp/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "ldp/parallel.hpp"

namespace ldp {

namespace {

namespace fs = std::filesystem;

const std::vector<std::string> kBlocks = {
    "sim",        "hypotheses", "pinv",     "action",
    "minimize",   "simulate",   "tube",     "exit",
    "ladder",     "coupling",   "lyapunov", "martingale"};

struct Context {
  const RunOptions& options;
  fs::path output;
  std::size_t workers = 1;
  std::uint64_t seed = 0;
  std::ostream& out;
};

void write_json(const fs::path& file, const Json& j) {
  std::ofstream os(file);
  if (!os) throw std::runtime_error("cannot write " + file.string());
  os << j.dump(2) << "\n";
}

void write_text(const fs::path& file, const std::string& text) {
  std::ofstream os(file);
  if (!os) throw std::runtime_error("cannot write " + file.string());
  os << text;
}

std::size_t parse_workers(const Json& j, const std::string& where) {
  if (j.is_string() && j.get<std::string>() == "auto") return 0;
  if (j.is_number_integer() && j.get<std::int64_t>() >= 0)
    return static_cast<std::size_t>(j.get<std::int64_t>());
  throw ConfigError(where, "expected a nonnegative integer or \"auto\"");
}

DiffusionModel read_model(ConfigReader& root) {
  auto reader = root.child("model");
  DiffusionModel model = model_from_json(reader);
  root.attach("model", reader.resolved());
  return model;
}

SimConfig read_sim(ConfigReader& root, std::uint64_t seed) {
  static const Json empty = Json::object();
  if (!root.has("sim")) {
    ConfigReader reader(empty, "sim");
    const SimConfig cfg = sim_from_json(reader, seed);
    root.attach("sim", reader.resolved());
    return cfg;
  }
  auto reader = root.child("sim");
  const SimConfig cfg = sim_from_json(reader, seed);
  root.attach("sim", reader.resolved());
  return cfg;
}

// Reads an optional block; missing blocks resolve to all defaults.
template <typename Fn>
auto with_block(ConfigReader& root, const std::string& key, Fn&& fn) {
  static const Json empty = Json::object();
  ConfigReader reader =
      root.has(key) ? root.child(key) : ConfigReader(empty, key);
  auto result = fn(reader);
  reader.finish();
  root.attach(key, reader.resolved());
  return result;
}

Path read_path_block(ConfigReader& block, const std::string& key,
                     const DiffusionModel& model, const Context& ctx,
                     std::optional<double> default_T,
                     std::optional<std::size_t> default_steps) {
  auto reader = block.child(key);
  Path path = path_from_json(reader, model, ctx.options.config_dir, default_T,
                             default_steps);
  block.attach(key, reader.resolved());
  return path;
}

std::vector<double> positive_list(ConfigReader& reader, const std::string& key,
                                  std::optional<std::vector<double>> fallback,
                                  bool increasing) {
  auto values = reader.numbers(key, std::move(fallback));
  if (values.empty()) throw ConfigError(reader.key_path(key), "must be nonempty");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] > 0.0))
      throw ConfigError(reader.key_path(key), "entries must be positive");
    if (i > 0 && increasing && !(values[i] > values[i - 1]))
      throw ConfigError(reader.key_path(key), "must be strictly increasing");
    if (i > 0 && !increasing && !(values[i] < values[i - 1]))
      throw ConfigError(reader.key_path(key), "must be strictly decreasing");
  }
  return values;
}

int cmd_check_hypotheses(ConfigReader& root, Context& ctx) {
  const DiffusionModel model = read_model(root);
  const HypothesisOptions opts = with_block(root, "hypotheses", [&](ConfigReader& r) {
    HypothesisOptions o;
    o.radii = positive_list(r, "radii", o.radii, true);
    o.probes_per_shell =
        static_cast<int>(r.integer("probes_per_shell", o.probes_per_shell, 1));
    o.L = r.positive("L", o.L);
    o.lipschitz_ball = r.positive("lipschitz_ball", o.lipschitz_ball);
    o.pair_samples = static_cast<int>(r.integer("pair_samples", o.pair_samples, 2));
    o.assert_h1 = r.boolean("assert_h1", false);
    o.assert_h2 = r.boolean("assert_h2", false);
    o.assert_h3 = r.boolean("assert_h3", false);
    o.seed = ctx.seed;
    return o;
  });
  const HypothesisReport report = check_hypotheses(model, opts);
  Json j = to_json(report);
  j["model"] = model.label();
  write_json(ctx.output / "hypotheses.json", j);
  ctx.out << "H1=" << to_string(report.h1) << " H2=" << to_string(report.h2)
          << " H3=" << to_string(report.h3)
          << " K_estimate=" << report.K_estimate << "\n";
  return report.any_fail() ? kExitVerdictFail : kExitOk;
}

int cmd_pinv_limit(ConfigReader& root, Context& ctx) {
  Json j = with_block(root, "pinv", [&](ConfigReader& r) {
    const Mat A = r.matrix("matrix");
    const Vec x = r.vector("x");
    const double rcond = r.positive("rcond", kDefaultRcond);
    const double range_tol = r.positive("range_tol", kDefaultRangeTol);
    if (A.rows() != A.cols() || A.rows() != x.size())
      throw ConfigError(r.key_path("x"), "dimension does not match matrix");
    if (rcond >= 1.0) throw ConfigError(r.key_path("rcond"), "must be < 1");
    Json out = to_json(pinv_limit_classify(A, x, rcond, range_tol));
    out["pseudoinverse"] = to_json(pseudoinverse(A, rcond));
    return out;
  });
  write_json(ctx.output / "pinv_limit.json", j);
  ctx.out << j.dump() << "\n";
  return kExitOk;
}

int cmd_action(ConfigReader& root, Context& ctx) {
  const DiffusionModel model = read_model(root);
  Json j = with_block(root, "action", [&](ConfigReader& r) {
    const Path path = read_path_block(r, "path", model, ctx, std::nullopt,
                                      std::nullopt);
    const double rcond = r.positive("rcond", kDefaultRcond);
    const double tol = r.positive("residual_tol", kDefaultResidualTol);
    const auto betas = r.numbers("betas", std::vector<double>{});
    Json out = to_json(rate_functional(model, path, rcond, tol));
    if (model.dim() == 1) {
      const auto scalar = rate_functional_scalar(model, path, tol);
      out["scalar_value"] = scalar.infinite ? Json("inf") : Json(scalar.value);
    }
    Json reg = Json::array();
    for (double b : betas) {
      if (!(b > 0.0)) throw ConfigError(r.key_path("betas"), "entries must be positive");
      reg.push_back({{"beta", b},
                     {"value", rate_functional_regularized(model, path, b)}});
    }
    out["regularized"] = reg;
    return out;
  });
  write_json(ctx.output / "action.json", j);
  ctx.out << "J=" << j["value"].dump() << " admissible=" << j["admissible"].dump()
          << "\n";
  return kExitOk;
}

int cmd_minimize(ConfigReader& root, Context& ctx) {
  const DiffusionModel model = read_model(root);
  const MinActionResult result = with_block(root, "minimize", [&](ConfigReader& r) {
    const Vec end = r.vector("end");
    if (static_cast<std::size_t>(end.size()) != model.dim())
      throw ConfigError(r.key_path("end"), "must have length dim");
    MinActionProblem problem{model, end, r.positive("T", 1.0),
                             static_cast<std::size_t>(r.integer("n_steps", 200, 4)),
                             0.0, 20000, 1e-8, std::nullopt};
    problem.beta = r.nonnegative("beta", 0.0);
    problem.max_iters = static_cast<int>(r.integer("max_iters", 20000));
    problem.grad_tol = r.positive("grad_tol", 1e-8);
    if (r.has("initial_path"))
      problem.initial_path = read_path_block(r, "initial_path", model, ctx,
                                             problem.T, problem.n_steps);
    r.finish();
    return minimize_action(problem);
  });
  write_json(ctx.output / "minimize.json", to_json(result));
  write_path_csv((ctx.output / "minimize_path.csv").string(), result.path);
  ctx.out << "J=" << to_json(result)["value"].dump()
          << " iterations=" << result.iterations
          << " converged=" << (result.converged ? "true" : "false") << "\n";
  return kExitOk;
}

int cmd_simulate(ConfigReader& root, Context& ctx) {
  const DiffusionModel model = read_model(root);
  const SimConfig cfg = read_sim(root, ctx.seed);
  struct Params {
    std::int64_t paths;
    std::optional<double> beta;
    double cap;
  };
  const Params p = with_block(root, "simulate", [&](ConfigReader& r) {
    Params out{r.integer("paths", 1, 1), std::nullopt,
               std::numeric_limits<double>::infinity()};
    if (r.has("beta")) out.beta = r.nonnegative("beta");
    if (r.has("C")) out.cap = r.positive("C");
    return out;
  });
  const auto n = static_cast<std::size_t>(p.paths);
  Json summary = Json::array();
  auto file_for = [&](const std::string& stem, std::size_t i) {
    if (n == 1) return ctx.output / (stem + ".csv");
    std::ostringstream name;
    name << stem << "_" << std::setw(6) << std::setfill('0') << i << ".csv";
    return ctx.output / name.str();
  };
  for (std::size_t i = 0; i < n; ++i) {
    const auto id = static_cast<std::uint32_t>(i);
    Json row{{"path_index", i}};
    try {
      if (p.beta) {
        const CoupledPaths pair = simulate_perturbed(model, cfg, *p.beta, p.cap, id);
        write_path_csv(file_for("path", i).string(), pair.base);
        write_path_csv(file_for("perturbed", i).string(), pair.perturbed);
        row["final_state"] = to_json(Vec(pair.base.state(pair.base.n_steps())));
        row["sup_deviation"] = pair.sup_deviation;
      } else {
        const Path path = simulate(model, cfg, id);
        write_path_csv(file_for("path", i).string(), path);
        row["final_state"] = to_json(Vec(path.state(path.n_steps())));
        if (std::isfinite(p.cap)) {
          row["exit_time"] = [&] {
            const auto t = first_exit_time(path, p.cap);
            return t.infinite ? Json("inf") : Json(t.value);
          }();
        }
      }
      row["diverged"] = false;
    } catch (const DivergenceError& e) {
      row["diverged"] = true;
      row["divergence_step"] = e.step();
    }
    summary.push_back(row);
  }
  write_json(ctx.output / "simulate.json", {{"paths", summary}});
  ctx.out << "simulated " << n << " path(s)\n";
  return kExitOk;
}

void write_estimate_table(const fs::path& file,
                          const std::vector<std::string>& rows,
                          const std::string& header) {
  std::string text = header + "\n";
  for (const auto& r : rows) text += r + "\n";
  write_text(file, text);
}

int cmd_tube_prob(ConfigReader& root, Context& ctx) {
  const DiffusionModel model = read_model(root);
  const SimConfig cfg = read_sim(root, ctx.seed);
  const TubeEstimate est = with_block(root, "tube", [&](ConfigReader& r) {
    const Path u = read_path_block(r, "path", model, ctx, cfg.T, cfg.n_steps());
    const double delta = r.positive("delta");
    const auto n = static_cast<std::uint64_t>(r.integer("n", 1000, 1));
    r.finish();
    return tube_probability(model, u, delta, cfg, n, ctx.workers);
  });
  write_json(ctx.output / "tube.json", to_json(est));
  write_estimate_table(ctx.output / "tube.csv", {estimate_csv_row(est)},
                       estimate_csv_header());
  ctx.out << "p_hat=" << est.p_hat << " eps2_log_p=" << est.eps2_log_p << "\n";
  return kExitOk;
}

int cmd_exit_prob(ConfigReader& root, Context& ctx) {
  const DiffusionModel model = read_model(root);
  const SimConfig cfg = read_sim(root, ctx.seed);
  const TubeEstimate est = with_block(root, "exit", [&](ConfigReader& r) {
    const double C = r.positive("C");
    const auto n = static_cast<std::uint64_t>(r.integer("n", 1000, 1));
    if (!(C > model.x0().norm()))
      throw ConfigError(r.key_path("C"), "must exceed |x0|");
    r.finish();
    return exit_probability(model, C, cfg, n, ctx.workers);
  });
  write_json(ctx.output / "exit.json", to_json(est));
  write_estimate_table(ctx.output / "exit.csv", {estimate_csv_row(est)},
                       estimate_csv_header());
  ctx.out << "p_hat=" << est.p_hat << " eps2_log_p=" << est.eps2_log_p << "\n";
  return kExitOk;
}

int cmd_ladder(ConfigReader& root, Context& ctx) {
  const DiffusionModel model = read_model(root);
  const SimConfig cfg = read_sim(root, ctx.seed);
  const auto rows = with_block(root, "ladder", [&](ConfigReader& r) {
    const Path u = read_path_block(r, "path", model, ctx, cfg.T, cfg.n_steps());
    const double delta = r.positive("delta");
    const auto eps = positive_list(r, "eps_list", std::nullopt, false);
    const auto n = static_cast<std::uint64_t>(r.integer("n", 1000, 1));
    r.finish();
    return ldp_ladder(model, u, delta, eps, cfg, n, ctx.workers);
  });
  Json j = Json::array();
  std::vector<std::string> csv;
  for (const auto& row : rows) {
    j.push_back(to_json(row));
    csv.push_back(estimate_csv_row(row.estimate, row.target));
  }
  write_json(ctx.output / "ladder.json", {{"rows", j}});
  write_estimate_table(ctx.output / "ladder.csv", csv, estimate_csv_header());
  ctx.out << "ladder rows=" << rows.size() << "\n";
  return kExitOk;
}

int cmd_coupling(ConfigReader& root, Context& ctx) {
  const DiffusionModel model = read_model(root);
  const SimConfig cfg = read_sim(root, ctx.seed);
  struct Row {
    double beta;
    TubeEstimate est;
  };
  const auto rows = with_block(root, "coupling", [&](ConfigReader& r) {
    const auto betas = r.numbers("betas", std::vector<double>{1e-2, 1e-3, 1e-4});
    const double C = r.positive("C", 5.0);
    const auto n = static_cast<std::uint64_t>(r.integer("n", 1000, 1));
    r.finish();
    std::vector<Row> out;
    for (double b : betas) {
      if (!(b >= 0.0 && b <= 1.0))
        throw ConfigError(r.key_path("betas"), "entries must lie in [0, 1]");
      out.push_back({b, coupling_deviation_probability(model, cfg, b, C, n,
                                                       ctx.workers)});
    }
    return out;
  });
  Json j = Json::array();
  std::vector<std::string> csv;
  for (const auto& row : rows) {
    Json e = to_json(row.est);
    e["beta"] = row.beta;
    j.push_back(e);
    std::ostringstream os;
    os << format_double(row.beta) << ',' << estimate_csv_row(row.est);
    csv.push_back(os.str());
  }
  write_json(ctx.output / "coupling.json", {{"rows", j}});
  write_estimate_table(ctx.output / "coupling.csv", csv,
                       "beta," + estimate_csv_header());
  ctx.out << "coupling rows=" << rows.size() << "\n";
  return kExitOk;
}

int cmd_lyapunov_scan(ConfigReader& root, Context& ctx) {
  const DiffusionModel model = read_model(root);
  const LyapunovScan scan = with_block(root, "lyapunov", [&](ConfigReader& r) {
    const double c = r.positive("c", 1.0);
    const double L = r.positive("L", 1.0);
    const auto radii = positive_list(r, "radii", std::vector<double>{2, 4, 8}, true);
    const int probes = static_cast<int>(r.integer("probes", 64, 1));
    std::optional<double> K;
    if (r.has("K_estimate")) K = r.positive("K_estimate");
    return lyapunov_scan(model, c, L, radii, probes, ctx.seed, K);
  });
  write_json(ctx.output / "lyapunov.json", to_json(scan));
  ctx.out << "verdict=" << to_string(scan.verdict)
          << " chain_violations=" << scan.chain_violations << "\n";
  return scan.verdict == Verdict::kFail ? kExitVerdictFail : kExitOk;
}

int cmd_martingale_check(ConfigReader& root, Context& ctx) {
  const auto reports = with_block(root, "martingale", [&](ConfigReader& r) {
    const std::string kind_name = r.string("kind", "c");
    MartingaleKind kind;
    try {
      kind = martingale_kind_from_string(kind_name);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(r.key_path("kind"), e.what());
    }
    const auto alphas = positive_list(r, "alphas", std::vector<double>{2.0, 2.5, 3.0}, true);
    const double B = r.positive("B", 1.0);
    const double T = r.positive("T", 1.0);
    const double dt = r.positive("dt", 1e-3);
    const auto n = static_cast<std::uint64_t>(r.integer("n", 100000, 1));
    if (dt > T) throw ConfigError(r.key_path("dt"), "must not exceed T");
    r.finish();
    std::vector<MartingaleReport> out;
    for (double a : alphas)
      out.push_back(martingale_bound_check(kind, a, B, T, dt, n, ctx.seed,
                                           ctx.workers));
    return out;
  });
  Json j = Json::array();
  bool all_pass = true;
  for (const auto& rep : reports) {
    j.push_back(to_json(rep));
    all_pass = all_pass && rep.pass;
  }
  write_json(ctx.output / "martingale.json", {{"checks", j}});
  ctx.out << "martingale checks=" << reports.size()
          << " all_pass=" << (all_pass ? "true" : "false") << "\n";
  return all_pass ? kExitOk : kExitVerdictFail;
}

using Handler = int (*)(ConfigReader&, Context&);

const std::vector<std::pair<std::string, Handler>>& handlers() {
  static const std::vector<std::pair<std::string, Handler>> table = {
      {"check-hypotheses", cmd_check_hypotheses},
      {"pinv-limit", cmd_pinv_limit},
      {"action", cmd_action},
      {"minimize", cmd_minimize},
      {"simulate", cmd_simulate},
      {"tube-prob", cmd_tube_prob},
      {"exit-prob", cmd_exit_prob},
      {"ladder", cmd_ladder},
      {"coupling", cmd_coupling},
      {"lyapunov-scan", cmd_lyapunov_scan},
      {"martingale-check", cmd_martingale_check},
  };
  return table;
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

}  // namespace

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [name, fn] : handlers()) out.push_back(name);
    return out;
  }();
  return names;
}

int run(const std::string& subcommand, const Json& config,
        const RunOptions& options, std::ostream& out, std::ostream& err) {
  const auto& table = handlers();
  const auto it = std::find_if(table.begin(), table.end(),
                               [&](const auto& h) { return h.first == subcommand; });
  if (it == table.end()) {
    err << "error: unknown subcommand '" << subcommand << "'\n";
    return kExitError;
  }
  try {
    ConfigReader root(config, "");
    if (!config.is_object()) throw ConfigError("<root>", "expected a JSON object");
    for (const auto& item : config.items()) {
      const auto& key = item.key();
      const bool known = key == "seed" || key == "workers" || key == "output" ||
                         key == "model" ||
                         std::find(kBlocks.begin(), kBlocks.end(), key) != kBlocks.end();
      if (!known) throw ConfigError(key, "unknown key");
    }
    const auto seed = static_cast<std::uint64_t>(root.integer("seed", 0));

    std::size_t workers = 0;
    if (root.has("workers")) workers = parse_workers(root.raw("workers"), "workers");
    if (const char* env = std::getenv("LDP_LAB_WORKERS"); env && *env)
      workers = parse_workers(Json::parse(std::string(env) == "auto"
                                              ? std::string("\"auto\"")
                                              : std::string(env)),
                              "LDP_LAB_WORKERS");
    if (options.workers_override) workers = *options.workers_override;
    workers = resolve_workers(workers);
    root.attach("workers", root.has("workers") ? root.raw("workers") : Json("auto"));

    fs::path output = root.string("output", "ldp-out");
    if (options.output_override) output = *options.output_override;
    else if (output.is_relative()) output = options.config_dir / output;

    Context ctx{options, output, workers, seed, out};
    fs::create_directories(output);

    const int code = it->second(root, ctx);

    // Blocks for other subcommands are accepted and echoed unchanged.
    for (const auto& block : kBlocks)
      if (root.has(block) && !root.resolved().contains(block))
        root.attach(block, root.raw(block));
    if (root.has("model") && !root.resolved().contains("model"))
      root.attach("model", root.raw("model"));
    root.finish();

    Json manifest;
    manifest["tool"] = kToolName;
    manifest["version"] = kToolVersion;
    manifest["subcommand"] = subcommand;
    manifest["config"] = root.resolved();
    manifest["workers_resolved"] = workers;
    manifest["exit_code"] = code;
    manifest["created_utc"] = utc_timestamp();
    write_json(output / "manifest.json", manifest);
    return code;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
  } catch (const EvaluationError& e) {
    err << "model evaluation error: " << e.what() << "\n";
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << "\n";
  } catch (const nlohmann::json::exception& e) {
    err << "config error: " << e.what() << "\n";
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
  }
  return kExitError;
}

}  // namespace ldp
