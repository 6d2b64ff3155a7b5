#include "chanstab/commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>
#include <openssl/evp.h>

#include "chanstab/bootstrap.hpp"
#include "chanstab/config.hpp"
#include "chanstab/csv.hpp"
#include "chanstab/errors.hpp"
#include "chanstab/linear_evolution.hpp"
#include "chanstab/nonlinear_sim.hpp"
#include "chanstab/parallel.hpp"
#include "chanstab/resolvent.hpp"
#include "chanstab/threshold.hpp"

namespace fs = std::filesystem;

namespace chanstab {

namespace {

// Raised for problems that stem from the configuration's content rather than
// the numerics (e.g. a bootstrap input directory that does not exist).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Context {
  Config config;
  fs::path out;
  int jobs;
  std::vector<std::string> outputs;

  std::string path(const std::string& name) {
    outputs.push_back(name);
    return (out / name).string();
  }
};

std::string tag(double coeff) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", coeff);
  return buf;
}

std::vector<double> linspace(double lo, double hi, int count) {
  std::vector<double> v;
  if (count == 1) return {lo};
  for (int i = 0; i < count; ++i) v.push_back(lo + (hi - lo) * i / (count - 1));
  return v;
}

LambdaRange lambda_range(const Config& c, int k) {
  LambdaRange r = default_lambda_range(k);
  if (c.sweep.lambda_min) r.lo = *c.sweep.lambda_min;
  if (c.sweep.lambda_max) r.hi = *c.sweep.lambda_max;
  if (!(r.hi > r.lo)) throw InputError("sweep: lambda_max must exceed lambda_min");
  return r;
}

struct Pair {
  double coeff;
  int k;
};

std::vector<Pair> pairs(const std::vector<double>& coeffs, const std::vector<int>& ks) {
  std::vector<Pair> out;
  for (double c : coeffs) {
    for (int k : ks) out.push_back({c, k});
  }
  return out;
}

bool fittable(const std::vector<double>& xs) {
  std::vector<double> distinct = xs;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  return distinct.size() >= 3;
}

// --- resolvent ---------------------------------------------------------------

struct ResolventResult {
  Pair p;
  ResolventProfile profile;
  double sup_norm = 0.0;
  double lambda_at_sup = 0.0;
  std::map<std::string, double> constants;
  std::vector<OsLambdaRatios> ratios;
};

int cmd_resolvent(Context& ctx) {
  const Config& c = ctx.config;
  const ChebyshevGrid grid = build_grid(c.grid.n);
  const auto work = pairs(c.physics.nu, c.physics.k);
  const auto results = parallel_map(work.size(), ctx.jobs, [&](std::size_t i) {
    const Pair p = work[i];
    const ModeOperator op = assemble_L(p.coeff, p.k, grid);
    const LambdaRange range = lambda_range(c, p.k);
    ResolventResult r;
    r.p = p;
    r.profile = resolvent_sweep(op, linspace(range.lo, range.hi, c.sweep.samples));
    // sup over lambda of ||(A - i k lambda)^{-1}|| is 1 / min sigma_min(A - i s), s = k lambda.
    const double a = p.k * range.lo;
    const double b = p.k * range.hi;
    const PsiResult psi = psi_detail(op, {std::min(a, b), std::max(a, b)}, c.sweep.samples);
    r.sup_norm = 1.0 / psi.psi;
    r.lambda_at_sup = psi.lambda_star / p.k;
    if (c.sweep.os_bounds) {
      r.constants = verify_os_bounds(p.coeff, p.k, grid, c.sweep.samples);
      r.ratios = os_lambda_profile(p.coeff, p.k, grid, r.profile.lambdas);
    }
    return r;
  });

  CsvWriter summary(ctx.path("resolvent_summary.csv"), {"coeff", "k", "name", "value"});
  for (const auto& r : results) {
    const std::string stem = "nu" + tag(r.p.coeff) + "_k" + std::to_string(r.p.k);
    CsvWriter sweep(ctx.path("resolvent_" + stem + ".csv"), {"coeff", "k", "lambda", "norm"});
    for (std::size_t i = 0; i < r.profile.lambdas.size(); ++i) {
      sweep.row({r.p.coeff, static_cast<long long>(r.p.k), r.profile.lambdas[i], r.profile.norms[i]});
    }
    sweep.close();
    summary.row({r.p.coeff, static_cast<long long>(r.p.k), std::string("sup_norm"), r.sup_norm});
    summary.row({r.p.coeff, static_cast<long long>(r.p.k), std::string("lambda_at_sup"), r.lambda_at_sup});
    for (const auto& [name, value] : r.constants) {
      summary.row({r.p.coeff, static_cast<long long>(r.p.k), name, value});
    }
    if (!r.ratios.empty()) {
      CsvWriter ratios(ctx.path("os_ratios_" + stem + ".csv"),
                       {"coeff", "k", "lambda", "u_L2", "w_grad", "w_L2", "w_from_Hm1"});
      for (const auto& q : r.ratios) {
        ratios.row({r.p.coeff, static_cast<long long>(r.p.k), q.lambda, q.u_L2, q.w_grad, q.w_L2,
                    q.w_from_Hm1});
      }
      ratios.close();
    }
  }
  summary.close();

  CsvWriter fit(ctx.path("resolvent_fit.csv"), {"k", "quantity", "exponent", "prefactor", "residual"});
  for (int k : c.physics.k) {
    std::map<std::string, std::vector<double>> ys;
    std::vector<double> xs;
    for (const auto& r : results) {
      if (r.p.k != k) continue;
      xs.push_back(r.p.coeff);
      ys["sup_norm"].push_back(r.sup_norm);
      for (const auto& [name, value] : r.constants) ys[name].push_back(value);
    }
    if (!fittable(xs)) continue;
    for (const auto& [name, values] : ys) {
      const ScalingFit f = fit_scaling(xs, values);
      fit.row({static_cast<long long>(k), name, f.exponent, f.prefactor, f.residual});
    }
  }
  fit.close();
  return kExitOk;
}

// --- psi ---------------------------------------------------------------------

int cmd_psi(Context& ctx) {
  const Config& c = ctx.config;
  const ChebyshevGrid grid = build_grid(c.grid.n);
  const OperatorKind kind = c.physics.kind;
  const auto work = pairs(c.coefficients(kind), c.physics.k);
  const auto results = parallel_map(work.size(), ctx.jobs, [&](std::size_t i) {
    const ModeOperator op = assemble(kind, work[i].coeff, work[i].k, grid);
    return psi_detail(op, lambda_range(c, work[i].k), c.sweep.samples);
  });

  CsvWriter out(ctx.path("psi.csv"),
                {"kind", "coeff", "k", "psi", "lambda_star", "scale", "ratio"});
  std::vector<double> ratios(work.size());
  for (std::size_t i = 0; i < work.size(); ++i) {
    const double mu = work[i].coeff;
    const double ak = std::abs(work[i].k);
    const double scale = std::sqrt(mu * ak) + mu * ak * ak;
    ratios[i] = results[i].psi / scale;
    out.row({std::string(to_string(kind)), mu, static_cast<long long>(work[i].k), results[i].psi,
             results[i].lambda_star, scale, ratios[i]});
  }
  out.close();

  CsvWriter fit(ctx.path("psi_fit.csv"),
                {"kind", "k", "exponent", "prefactor", "residual", "ratio_min", "ratio_max"});
  for (int k : c.physics.k) {
    std::vector<double> xs, ys, rs;
    for (std::size_t i = 0; i < work.size(); ++i) {
      if (work[i].k != k) continue;
      xs.push_back(work[i].coeff);
      ys.push_back(results[i].psi);
      rs.push_back(ratios[i]);
    }
    if (!fittable(xs)) continue;
    const ScalingFit f = fit_scaling(xs, ys);
    fit.row({std::string(to_string(kind)), static_cast<long long>(k), f.exponent, f.prefactor,
             f.residual, *std::min_element(rs.begin(), rs.end()),
             *std::max_element(rs.begin(), rs.end())});
  }
  fit.close();
  return kExitOk;
}

// --- semigroup ---------------------------------------------------------------

struct SemigroupResult {
  DecayCurve curve;
  GearhartPrussReport gp;
};

int cmd_semigroup(Context& ctx) {
  const Config& c = ctx.config;
  const ChebyshevGrid grid = build_grid(c.grid.n);
  const OperatorKind kind = c.physics.kind;
  const auto work = pairs(c.coefficients(kind), c.physics.k);
  const auto results = parallel_map(work.size(), ctx.jobs, [&](std::size_t i) {
    const ModeOperator op = assemble(kind, work[i].coeff, work[i].k, grid);
    const double scale = 1.0 / std::sqrt(work[i].coeff);
    SemigroupResult r;
    r.curve = decay_rate(op, c.sweep.horizon_factor * scale, c.sweep.time_samples);
    r.gp = gearhart_pruss_check(op, linspace(0.0, c.sweep.gp_factor * scale, c.sweep.gp_samples));
    return r;
  });

  CsvWriter rates(ctx.path("semigroup_rates.csv"),
                  {"kind", "coeff", "k", "rate", "psi", "gp_pass", "gp_worst_margin",
                   "gp_violations"});
  for (std::size_t i = 0; i < work.size(); ++i) {
    const auto& [coeff, k] = work[i];
    const SemigroupResult& r = results[i];
    const std::string stem = std::string(to_string(kind)) + "_" + tag(coeff) + "_k" + std::to_string(k);
    CsvWriter curve(ctx.path("decay_" + stem + ".csv"), {"coeff", "k", "t", "norm"});
    for (std::size_t j = 0; j < r.curve.times.size(); ++j) {
      curve.row({coeff, static_cast<long long>(k), r.curve.times[j], r.curve.norms[j]});
    }
    curve.close();
    rates.row({std::string(to_string(kind)), coeff, static_cast<long long>(k), r.curve.fitted_rate,
               r.gp.psi, static_cast<long long>(r.gp.pass), r.gp.worst_margin,
               static_cast<long long>(r.gp.violations)});
  }
  rates.close();

  CsvWriter fit(ctx.path("semigroup_fit.csv"), {"kind", "k", "exponent", "prefactor", "residual"});
  for (int k : c.physics.k) {
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < work.size(); ++i) {
      if (work[i].k != k) continue;
      xs.push_back(work[i].coeff);
      ys.push_back(results[i].curve.fitted_rate);
    }
    if (!fittable(xs)) continue;
    const ScalingFit f = fit_scaling(xs, ys);
    fit.row({std::string(to_string(kind)), static_cast<long long>(k), f.exponent, f.prefactor,
             f.residual});
  }
  fit.close();
  return kExitOk;
}

// --- simulate ----------------------------------------------------------------

SimConfig sim_config(const Config& c, std::size_t i) {
  SimConfig s;
  s.nu = c.physics.nu.at(i);
  s.mu = c.mu_for(i);
  s.K = c.simulation.K;
  s.n = c.grid.n;
  s.dt = c.simulation.dt;
  s.horizon = c.simulation.horizon;
  s.c0 = c.simulation.c0;
  s.c1 = c.simulation.c1;
  s.seed = c.simulation.seed;
  s.sobolev_s = c.simulation.sobolev_s;
  s.ledger_every = c.simulation.ledger_every;
  return s;
}

InitialShape sim_shape(const Config& c) {
  return c.simulation.shape == "single_mode" ? InitialShape::single_mode(c.simulation.mode)
                                             : InitialShape::random_band();
}

int cmd_simulate(Context& ctx) {
  const Config& c = ctx.config;
  const SimConfig sc = sim_config(c, 0);
  const PerturbationState init = make_initial_data(sc, sim_shape(c));
  const RunResult r = run(sc, init);

  CsvWriter ledger(ctx.path("ledger.csv"), {"t", "k", "component", "value"});
  for (const EnergyLedger& snap : r.history) {
    for (int k = -sc.K; k <= sc.K; ++k) {
      for (const auto& name : EnergyLedger::component_names()) {
        ledger.row({snap.time(), static_cast<long long>(k), name, snap.component(name, k)});
      }
    }
  }
  ledger.close();

  CsvWriter initial(ctx.path("initial_norms.csv"), {"k", "E_init", "H_init"});
  for (int k = -sc.K; k <= sc.K; ++k) {
    initial.row({static_cast<long long>(k), r.initial.E[k + sc.K], r.initial.H[k + sc.K]});
  }
  initial.close();

  CsvWriter summary(ctx.path("summary.csv"), {"name", "value"});
  const std::vector<std::pair<std::string, double>> rows = {
      {"nu", sc.nu},
      {"mu", sc.mu},
      {"K", sc.K},
      {"n", sc.n},
      {"dt", r.dt},
      {"horizon", sc.resolved_horizon()},
      {"steps", r.steps},
      {"t_end", r.ledger.time()},
      {"diverged", r.diverged ? 1.0 : 0.0},
      {"velocity_proxy", r.initial.velocity_proxy},
      {"temperature_proxy", r.initial.temperature_proxy},
      {"E_total", r.E_total()},
      {"H_total", r.H_total()},
      {"E_init_total", r.initial.E_total()},
      {"H_init_total", r.initial.H_total()},
      {"growth_ratio", r.growth_ratio()},
      {"reality_defect", r.final_state.reality_defect()},
      {"boundary_defect", r.final_state.boundary_defect()},
  };
  for (const auto& [name, value] : rows) summary.row({name, value});
  summary.close();

  if (r.diverged) {
    std::cerr << "simulate: diverged at t = " << r.diverged_at << ": " << r.message << '\n';
    return kExitNumerical;
  }
  return kExitOk;
}

// --- bootstrap ---------------------------------------------------------------

int cmd_bootstrap(Context& ctx) {
  const fs::path in = ctx.config.bootstrap.input;
  if (in.empty()) throw InputError("bootstrap.input is required");
  CsvTable summary, ledger, initial;
  try {
    summary = read_csv((in / "summary.csv").string());
    ledger = read_csv((in / "ledger.csv").string());
    initial = read_csv((in / "initial_norms.csv").string());
  } catch (const std::runtime_error& e) {
    throw InputError(std::string("bootstrap input: ") + e.what());
  }

  std::map<std::string, double> s;
  for (const auto& row : summary.rows) {
    s[row[summary.column("name")]] = std::stod(row[summary.column("value")]);
  }
  for (const char* key : {"nu", "mu", "K"}) {
    if (!s.count(key)) throw InputError(std::string("bootstrap input: summary lacks ") + key);
  }
  const int K = static_cast<int>(s["K"]);
  std::vector<double> E(2 * K + 1, 0.0), H(2 * K + 1, 0.0), E0(2 * K + 1, 0.0), H0(2 * K + 1, 0.0);

  const std::size_t ct = ledger.column("t"), ck = ledger.column("k");
  const std::size_t cc = ledger.column("component"), cv = ledger.column("value");
  double t_end = -1.0;
  for (const auto& row : ledger.rows) t_end = std::max(t_end, std::stod(row[ct]));
  for (const auto& row : ledger.rows) {
    if (std::stod(row[ct]) != t_end) continue;
    const int k = std::stoi(row[ck]);
    if (std::abs(k) > K) throw InputError("bootstrap input: ledger mode out of range");
    if (row[cc] == "E") E[k + K] = std::stod(row[cv]);
    if (row[cc] == "H") H[k + K] = std::stod(row[cv]);
  }
  for (const auto& row : initial.rows) {
    const int k = std::stoi(row[initial.column("k")]);
    if (std::abs(k) > K) throw InputError("bootstrap input: initial norm mode out of range");
    E0[k + K] = std::stod(row[initial.column("E_init")]);
    H0[k + K] = std::stod(row[initial.column("H_init")]);
  }

  const BootstrapReport report = bootstrap_check(E, H, s["nu"], s["mu"], E0, H0);
  CsvWriter out(ctx.path("bootstrap.csv"),
                {"k", "family", "applies", "lhs", "init", "nonlinear", "constant"});
  for (const auto& r : report.rows) {
    out.row({static_cast<long long>(r.k), r.family, static_cast<long long>(r.applies), r.lhs,
             r.init, r.nonlinear, r.constant});
  }
  out.close();
  return kExitOk;
}

// --- threshold ---------------------------------------------------------------

int cmd_threshold(Context& ctx) {
  const Config& c = ctx.config;
  VerdictOracle oracle;
  if (c.bisection.oracle == "synthetic") {
    const double gamma = c.bisection.synthetic_gamma;
    oracle = [gamma](double nu, double, double a) {
      return a <= std::pow(nu, gamma) ? Verdict::stable : Verdict::unstable;
    };
  } else {
    oracle = simulation_oracle(sim_config(c, 0), sim_shape(c));
  }
  const auto points = parallel_map(c.physics.nu.size(), ctx.jobs, [&](std::size_t i) {
    return bisect_threshold(oracle, c.physics.nu[i], c.mu_for(i), c.bisection.lo, c.bisection.hi,
                            c.bisection.tol);
  });

  CsvWriter out(ctx.path("threshold.csv"), {"nu", "mu", "amplitude_star", "lo", "hi",
                                             "verdict_margin", "evaluations"});
  for (const auto& p : points) {
    out.row({p.nu, p.mu, p.amplitude_star, p.lo, p.hi, p.verdict_margin,
             static_cast<long long>(p.evaluations)});
  }
  out.close();

  CsvWriter fit(ctx.path("threshold_fit.csv"), {"exponent", "prefactor", "residual"});
  if (fittable(c.physics.nu)) {
    const ScalingFit f = fit_threshold(points);
    fit.row({f.exponent, f.prefactor, f.residual});
  }
  fit.close();
  return kExitOk;
}

// --- manifest ----------------------------------------------------------------

std::string utc_now() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_manifest(const CommandOptions& o, const Context* ctx, const std::string& config_text,
                    int exit_code, const std::string& error, double wall, const std::string& started) {
  nlohmann::json m;
  m["command"] = o.command;
  m["config_path"] = o.config_path;
  m["config_sha1"] = git_blob_sha1(config_text);
  if (ctx) {
    m["config"] = ctx->config.to_json();
    m["seed"] = ctx->config.simulation.seed;
    m["jobs"] = ctx->jobs;
    m["outputs"] = ctx->outputs;
  }
  m["exit_code"] = exit_code;
  if (!error.empty()) m["error"] = error;
  m["versions"] = {{"chanstab", CHANSTAB_VERSION},
                   {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                                 std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                 std::to_string(EIGEN_MINOR_VERSION)},
                   {"compiler", __VERSION__}};
  m["started_utc"] = started;
  m["wall_time_seconds"] = wall;
  std::ofstream out(fs::path(o.out_dir) / "manifest.json", std::ios::binary | std::ios::trunc);
  out << m.dump(2) << '\n';
}

}  // namespace

std::string git_blob_sha1(const std::string& content) {
  const std::string header = "blob " + std::to_string(content.size()) + '\0';
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  EVP_MD_CTX* md = EVP_MD_CTX_new();
  EVP_DigestInit_ex(md, EVP_sha1(), nullptr);
  EVP_DigestUpdate(md, header.data(), header.size());
  EVP_DigestUpdate(md, content.data(), content.size());
  EVP_DigestFinal_ex(md, digest, &length);
  EVP_MD_CTX_free(md);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < length; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 15];
  }
  return out;
}

int run_command(const CommandOptions& o) {
  static const std::map<std::string, int (*)(Context&)> table = {
      {"resolvent", cmd_resolvent}, {"psi", cmd_psi},           {"semigroup", cmd_semigroup},
      {"simulate", cmd_simulate},   {"threshold", cmd_threshold}, {"bootstrap", cmd_bootstrap}};
  const auto started = std::chrono::steady_clock::now();
  const std::string started_utc = utc_now();
  const auto it = table.find(o.command);
  if (it == table.end()) {
    std::cerr << "unknown command '" << o.command << "'\n";
    return kExitConfig;
  }

  std::string text;
  std::optional<Context> ctx;
  int code = kExitOk;
  std::string error;
  try {
    std::error_code ec;
    fs::create_directories(o.out_dir, ec);
    if (ec) throw InputError("cannot create output directory '" + o.out_dir + "'");
    {
      std::ifstream in(o.config_path, std::ios::binary);
      if (!in) throw ConfigError("cannot open config file '" + o.config_path + "'");
      std::ostringstream buf;
      buf << in.rdbuf();
      text = buf.str();
    }
    ctx.emplace(Context{parse_config(text, o.config_path), o.out_dir, resolve_jobs(o.jobs), {}});
    if (o.seed) ctx->config.simulation.seed = *o.seed;
    code = it->second(*ctx);
  } catch (const ConfigError& e) {
    code = kExitConfig;
    error = e.what();
  } catch (const InputError& e) {
    code = kExitConfig;
    error = e.what();
  } catch (const InvalidArgument& e) {
    code = kExitConfig;
    error = e.what();
  } catch (const BracketError& e) {
    code = kExitBracket;
    error = e.what();
  } catch (const Diverged& e) {
    code = kExitNumerical;
    error = e.what();
  } catch (const NumericalSingularity& e) {
    code = kExitNumerical;
    error = e.what();
  } catch (const PreconditionViolation& e) {
    code = kExitNumerical;
    error = e.what();
  } catch (const std::exception& e) {
    code = kExitNumerical;
    error = e.what();
  }
  if (!error.empty()) std::cerr << o.command << ": " << error << '\n';

  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  if (fs::is_directory(o.out_dir)) {
    write_manifest(o, ctx ? &*ctx : nullptr, text, code, error, wall, started_utc);
  }
  return code;
}

int cli_main(int argc, char** argv) {
  CLI::App app{"Spectral stability toolkit for plane Poiseuille Boussinesq flow"};
  app.set_version_flag("--version", CHANSTAB_VERSION);
  app.require_subcommand(1);

  CommandOptions o;
  std::uint64_t seed = 0;
  for (const char* name : {"resolvent", "psi", "semigroup", "simulate", "threshold", "bootstrap"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", o.config_path, "TOML configuration file")->required();
    sub->add_option("--out", o.out_dir, "Output directory")->capture_default_str();
    sub->add_option("--jobs", o.jobs, "Worker threads (0: all cores)")->check(CLI::NonNegativeNumber);
    sub->add_option("--seed", seed, "Seed for random initial data (overrides the config)");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }
  for (CLI::App* sub : app.get_subcommands()) {
    o.command = sub->get_name();
    if (sub->count("--seed") > 0) o.seed = seed;
  }
  return run_command(o);
}

}  // namespace chanstab
