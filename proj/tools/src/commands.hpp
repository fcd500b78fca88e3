#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "serialize.hpp"

namespace lcrip::cli {

/// Parsed flags of one subcommand. Fields a subcommand does not register
/// keep their defaults and are not echoed.
struct Options {
  std::string ensemble = "exponential";
  std::size_t n = 8;
  std::size_t N = 16;
  std::size_t m = 2;
  std::size_t k = 2;
  std::size_t ell = 1;
  std::size_t s = 4;
  std::string t_grid;
  std::string n_grid;
  std::string s_grid;
  std::string weights = "uniform";
  std::size_t trials = 1000;
  std::size_t replicas = 200;
  std::size_t restarts = 20;
  std::size_t directions = 16;
  std::uint64_t budget = 100'000'000;
  double C = 1.0;
  double c = 1.0;
  double theta = 0.25;
  std::optional<double> B;
  double t = 3.0;
  double p = 2.0;
  std::string method = "exact";
  std::string sigma = "generic";
  std::size_t sigma_trials = 20000;
  bool profile = false;
  bool uniform_in_k = false;
  double tol = 1e-9;
  std::size_t max_iter = 20000;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  unsigned workers = 1;
  std::string out;
  std::string csv;

  /// (key, value) getters for the RunConfig echo, in registration order.
  std::vector<std::pair<std::string, std::function<json()>>> echo;
};

struct CommandOutput {
  json result;
  std::optional<Table> table;
  int exit_code = 0;
};

using Command = std::function<CommandOutput(const Options&)>;

CommandOutput cmd_sample(const Options& o);
CommandOutput cmd_isotropy(const Options& o);
CommandOutput cmd_tails_paouris(const Options& o);
CommandOutput cmd_tails_proj(const Options& o);
CommandOutput cmd_tails_order(const Options& o);
CommandOutput cmd_tails_count(const Options& o);
CommandOutput cmd_tails_weighted(const Options& o);
CommandOutput cmd_tails_akm(const Options& o);
CommandOutput cmd_kls_rate(const Options& o);
CommandOutput cmd_akm(const Options& o);
CommandOutput cmd_delta(const Options& o);
CommandOutput cmd_thresholds(const Options& o);
CommandOutput cmd_net_audit(const Options& o);
CommandOutput cmd_rip_cert(const Options& o);
CommandOutput cmd_rip_admissible(const Options& o);
CommandOutput cmd_recover(const Options& o);
CommandOutput cmd_phase(const Options& o);

/// "lo:hi:count" (log-spaced) or a comma-separated list.
std::vector<double> parse_grid(const std::string& text, const std::string& flag);
std::vector<std::size_t> parse_count_list(const std::string& text, const std::string& flag);

}  // namespace lcrip::cli
