#include "lcrip/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <stdexcept>

#include "commands.hpp"
#include "lcrip/errors.hpp"
#include "lcrip/parallel.hpp"

namespace lcrip::cli {

namespace {

constexpr int kFormatVersion = 1;

template <typename T>
json echo_value(const T& v) {
  return json(v);
}

template <typename T>
json echo_value(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

/// Binds flags of one subcommand to its own Options and records the
/// RunConfig echo. Workers and output paths are not echoed: they never
/// change the document.
class Registrar {
 public:
  Registrar(CLI::App* app, Options& o) : app_(app), o_(o) {}

  template <typename T>
  CLI::Option* value(const std::string& flag, T& field, const std::string& help) {
    auto* opt = app_->add_option(flag, field, help)->capture_default_str();
    const std::string key = key_of(flag);
    o_.echo.emplace_back(key, [&field] { return echo_value(field); });
    return opt;
  }

  void flag(const std::string& name, bool& field, const std::string& help) {
    app_->add_flag(name, field, help);
    o_.echo.emplace_back(key_of(name), [&field] { return json(field); });
  }

  void ensemble() {
    app_->add_option("--ensemble", o_.ensemble, "exponential, gaussian, cube or l1ball")
        ->capture_default_str()
        ->check(CLI::IsMember({"exponential", "gaussian", "cube", "l1ball", "ExponentialProduct",
                               "GaussianProduct", "UniformCube", "UniformL1Ball"}));
    Options& o = o_;
    o_.echo.emplace_back("ensemble", [&o] {
      return json(std::string(to_string(parse_ensemble_kind(o.ensemble))));
    });
  }

  CLI::Option* count(const std::string& flag, std::size_t& field, const std::string& help,
                     std::size_t min = 1) {
    return value(flag, field, help)->check(CLI::Range(min, std::numeric_limits<std::size_t>::max()));
  }

  void seed() {
    value("--seed", o_.seed, "master seed");
    value("--stream", o_.stream, "stream index");
  }

  void method() {
    Options& o = o_;
    auto* exact = app_->add_flag_callback("--exact", [&o] { o.method = "exact"; },
                                          "exact enumeration (default)");
    auto* heur = app_->add_flag_callback("--heuristic", [&o] { o.method = "heuristic"; },
                                         "alternating-maximization lower bound");
    exact->excludes(heur);
    o_.echo.emplace_back("method", [&o] { return json(o.method); });
    value("--restarts", o_.restarts, "restarts of the heuristic search");
    value("--budget", o_.budget, "cap on enumerated subsets");
  }

  void grid(const std::string& fallback) {
    app_->add_option("--t-grid", o_.t_grid, "lo:hi:count (log-spaced) or comma list, default " +
                                                fallback);
    Options& o = o_;
    o_.echo.emplace_back("t_grid", [&o, fallback] {
      return json(o.t_grid.empty() ? fallback : o.t_grid);
    });
  }

  void sigma() {
    value("--sigma", o_.sigma, "weak-moment model: generic (sigma(p) = p) or empirical")
        ->check(CLI::IsMember({"generic", "empirical"}));
    value("--sigma-trials", o_.sigma_trials, "draws for the empirical model");
    value("--directions", o_.directions, "random directions for sigma estimates");
  }

  void theta() { value("--theta", o_.theta, "RIP level theta")->check(CLI::Range(0.0, 1.0)); }

 private:
  static std::string key_of(const std::string& flag) {
    std::string key = flag.substr(flag.find_first_not_of('-'));
    std::replace(key.begin(), key.end(), '-', '_');
    return key;
  }

  CLI::App* app_;
  Options& o_;
};

struct Subcommand {
  std::string name;
  std::string help;
  Command command;
  std::function<void(Registrar&, Options&)> setup;
};

std::vector<Subcommand> table() {
  return {
      {"sample", "draw an n x N matrix", cmd_sample,
       [](Registrar& r, Options& o) {
         r.ensemble();
         r.count("--n", o.n, "rows");
         r.count("--N", o.N, "dimension");
         r.seed();
       }},
      {"isotropy", "mean, covariance and psi_1 diagnostics", cmd_isotropy,
       [](Registrar& r, Options& o) {
         o.trials = 100000;
         r.ensemble();
         r.count("--N", o.N, "dimension");
         r.count("--trials", o.trials, "draws", 100);
         r.seed();
       }},
      {"tails-paouris", "norm deviation tail |X| / sqrt(N)", cmd_tails_paouris,
       [](Registrar& r, Options& o) {
         o.trials = 10000;
         r.ensemble();
         r.count("--N", o.N, "dimension");
         r.count("--trials", o.trials, "draws", 1000);
         r.grid("1:4:12");
         r.seed();
       }},
      {"tails-proj", "uniform tail of the m largest coordinates", cmd_tails_proj,
       [](Registrar& r, Options& o) {
         o.trials = 10000;
         r.ensemble();
         r.count("--N", o.N, "dimension");
         r.count("--m", o.m, "projection size");
         r.count("--trials", o.trials, "draws");
         r.grid("1:8:12");
         r.sigma();
         r.seed();
       }},
      {"tails-order", "tail of the ell-th order statistic", cmd_tails_order,
       [](Registrar& r, Options& o) {
         o.trials = 10000;
         r.ensemble();
         r.count("--N", o.N, "dimension");
         r.count("--ell", o.ell, "order statistic index");
         r.count("--trials", o.trials, "draws");
         r.grid("0.5:8:12");
         r.value("--C", o.C, "fit only thresholds t >= C log(eN/ell)");
         r.sigma();
         r.seed();
       }},
      {"tails-count", "moments of the exceedance count", cmd_tails_count,
       [](Registrar& r, Options& o) {
         o.trials = 10000;
         r.ensemble();
         r.count("--N", o.N, "dimension");
         r.value("--t", o.t, "threshold");
         r.value("--p", o.p, "moment order in [2, 8]");
         r.count("--trials", o.trials, "draws");
         r.value("--C", o.C, "admissibility constant: t >= C log(N t^2 / sigma(p)^2)");
         r.sigma();
         r.seed();
       }},
      {"tails-weighted", "weighted sums of independent rows", cmd_tails_weighted,
       [](Registrar& r, Options& o) {
         o.trials = 10000;
         r.ensemble();
         r.count("--n", o.n, "summands");
         r.count("--N", o.N, "dimension");
         r.count("--m", o.m, "projection size");
         r.count("--ell", o.ell, "order statistic index");
         r.value("--weights", o.weights, "uniform, basis or a comma list of n values");
         r.count("--trials", o.trials, "draws");
         r.value("--directions", o.directions, "random directions for sigma estimates");
         r.grid("1:8:12");
         r.seed();
       }},
      {"tails-akm", "tail of A_{k,m} / lambda_{k,m}", cmd_tails_akm,
       [](Registrar& r, Options& o) {
         o.trials = 2000;
         r.ensemble();
         r.count("--n", o.n, "rows");
         r.count("--N", o.N, "columns");
         r.count("--k", o.k, "row subset size");
         r.count("--m", o.m, "column subset size");
         r.count("--trials", o.trials, "matrices");
         r.grid("1:8:12");
         r.method();
         r.flag("--uniform-in-k", o.uniform_in_k, "also fit max over k of A_{k,m} / lambda_{k,m}");
         r.seed();
       }},
      {"kls-rate", "median of ||A^T A / n - Id|| against n", cmd_kls_rate,
       [](Registrar& r, Options& o) {
         o.trials = 500;
         r.ensemble();
         r.count("--N", o.N, "dimension");
         r.value("--n-grid", o.n_grid, "comma list of n >= N (default N,4N,16N,64N)");
         r.count("--trials", o.trials, "matrices per n");
         r.seed();
       }},
      {"akm", "A_{k,m} of one sampled matrix", cmd_akm,
       [](Registrar& r, Options& o) {
         r.ensemble();
         r.count("--n", o.n, "rows");
         r.count("--N", o.N, "columns");
         r.count("--k", o.k, "row subset size");
         r.count("--m", o.m, "column subset size");
         r.flag("--profile", o.profile, "every k = 1..n");
         r.method();
         r.seed();
       }},
      {"delta", "restricted isometry constant of one sampled matrix", cmd_delta,
       [](Registrar& r, Options& o) {
         r.ensemble();
         r.count("--n", o.n, "rows");
         r.count("--N", o.N, "columns");
         r.count("--m", o.m, "sparsity");
         r.method();
         r.seed();
       }},
      {"thresholds", "lambda_{k,m}, lambda_m, k', b_m, g and block sizes", cmd_thresholds,
       [](Registrar& r, Options& o) {
         r.count("--n", o.n, "rows");
         r.count("--N", o.N, "columns");
         r.count("--m", o.m, "column sparsity");
         r.count("--k", o.k, "row sparsity");
       }},
      {"net-audit", "multi-scale net projection audit", cmd_net_audit,
       [](Registrar& r, Options& o) {
         o.k = 5;
         o.m = 16;
         o.n = 40;
         o.N = 40;
         o.trials = 10000;
         r.count("--k", o.k, "sparsity of the audited vectors");
         r.count("--m", o.m, "column sparsity");
         r.count("--n", o.n, "ambient dimension of the vectors");
         r.count("--N", o.N, "columns (N >= n)");
         r.count("--trials", o.trials, "random vectors");
         r.seed();
       }},
      {"rip-cert", "net-based RIP certificate against the exact constant", cmd_rip_cert,
       [](Registrar& r, Options& o) {
         o.n = 16;
         o.N = 24;
         o.m = 2;
         o.trials = 1;
         r.ensemble();
         r.count("--n", o.n, "rows");
         r.count("--N", o.N, "columns");
         r.count("--m", o.m, "sparsity");
         r.theta();
         r.value("--B", o.B, "truncation level (default C log(n / b_m), at least 1)");
         r.value("--C", o.C, "C1 in the default truncation level");
         r.count("--replicas", o.replicas, "matrices for the mean of A_{k,m}^2");
         r.count("--trials", o.trials, "certified matrices");
         r.method();
         r.seed();
       }},
      {"rip-admissible", "largest admissible sparsity", cmd_rip_admissible,
       [](Registrar& r, Options& o) {
         o.n = 1024;
         o.N = 4096;
         r.count("--n", o.n, "rows");
         r.count("--N", o.N, "columns");
         r.theta();
         r.value("--c", o.c, "constant c");
         r.value("--C", o.C, "C1 in B = C1 log(n / b_m)");
       }},
      {"recover", "l1 recovery of random sparse signals", cmd_recover,
       [](Registrar& r, Options& o) {
         o.ensemble = "gaussian";
         o.n = 64;
         o.N = 256;
         o.trials = 100;
         r.ensemble();
         r.count("--n", o.n, "measurements");
         r.count("--N", o.N, "signal length");
         r.count("--s", o.s, "sparsity", 0);
         r.count("--trials", o.trials, "signals");
         r.value("--tol", o.tol, "solver tolerance")->check(CLI::PositiveNumber);
         r.count("--max-iter", o.max_iter, "solver iteration cap");
         r.seed();
       }},
      {"phase", "recovery rate against sparsity", cmd_phase,
       [](Registrar& r, Options& o) {
         o.ensemble = "gaussian";
         o.n = 64;
         o.N = 256;
         o.trials = 20;
         r.ensemble();
         r.count("--n", o.n, "measurements");
         r.count("--N", o.N, "signal length");
         r.value("--s-grid", o.s_grid, "comma list of sparsities (default 0,2,4,8,16)");
         r.count("--trials", o.trials, "signals per cell");
         r.theta();
         r.value("--c", o.c, "constant c of the admissible reference line");
         r.value("--tol", o.tol, "solver tolerance")->check(CLI::PositiveNumber);
         r.count("--max-iter", o.max_iter, "solver iteration cap");
         r.seed();
       }},
  };
}

int emit(const std::string& name, const Options& o, const CommandOutput& result,
         std::ostream& out, std::ostream& err) {
  json config = json::object();
  for (const auto& [key, get] : o.echo) config[key] = get();
  const json doc = {{"format_version", kFormatVersion},
                    {"command", name},
                    {"config", config},
                    {"result", result.result}};
  const std::string text = doc.dump(2) + "\n";
  if (o.out.empty()) {
    out << text;
  } else {
    std::ofstream file(o.out, std::ios::binary);
    if (!file) {
      err << "error: --out: cannot open " << o.out << "\n";
      return kExitUsage;
    }
    file << text;
  }
  std::string csv_path = o.csv;
  if (csv_path.empty() && !o.out.empty()) {
    const auto dot = o.out.find_last_of('.');
    const auto slash = o.out.find_last_of('/');
    const bool has_ext = dot != std::string::npos && (slash == std::string::npos || dot > slash);
    csv_path = (has_ext ? o.out.substr(0, dot) : o.out) + ".csv";
  }
  if (result.table && !csv_path.empty()) {
    std::ofstream file(csv_path, std::ios::binary);
    if (!file) {
      err << "error: --csv: cannot open " << csv_path << "\n";
      return kExitUsage;
    }
    write_csv(file, *result.table);
  }
  return result.exit_code;
}

}  // namespace

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& s : table()) out.push_back(s.name);
    return out;
  }();
  return names;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"lcrip: sub-matrix norms, RIP constants, tail checks and sparse recovery"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "help for every subcommand");

  const auto subs = table();
  std::map<std::string, std::unique_ptr<Options>> options;
  for (const auto& s : subs) {
    auto o = std::make_unique<Options>();
    o->workers = default_workers();
    CLI::App* sub = app.add_subcommand(s.name, s.help);
    Registrar reg(sub, *o);
    s.setup(reg, *o);
    sub->add_option("--workers", o->workers, "worker threads (default $LCRIP_WORKERS or 1)")
        ->check(CLI::Range(1U, 1024U));
    sub->add_option("--out", o->out, "write JSON here instead of stdout");
    sub->add_option("--csv", o->csv, "CSV path for curves and tables (default: beside --out)");
    options.emplace(s.name, std::move(o));
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  for (const auto& s : subs) {
    if (!app.got_subcommand(s.name)) continue;
    const Options& o = *options.at(s.name);
    try {
      return emit(s.name, o, s.command(o), out, err);
    } catch (const BudgetExceeded& e) {
      err << "error: budget exceeded: " << e.what() << "\n";
      return kExitFailure;
    } catch (const NonConvergence& e) {
      err << "error: no convergence: " << e.what() << "\n";
      return kExitFailure;
    } catch (const std::invalid_argument& e) {
      err << "error: " << e.what() << "\n";
      return kExitUsage;
    } catch (const std::out_of_range& e) {
      err << "error: " << e.what() << "\n";
      return kExitUsage;
    }
  }
  return kExitUsage;
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace lcrip::cli
