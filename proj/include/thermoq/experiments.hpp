#pragma once

// Declarative experiments behind the command-line tool: parameter merging
// and validation, deterministic parallel scans, and table assembly.

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdlib>
#include <exception>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "thermoq/bounds.hpp"
#include "thermoq/collective.hpp"
#include "thermoq/errors.hpp"
#include "thermoq/io.hpp"
#include "thermoq/lindblad.hpp"
#include "thermoq/spectral.hpp"
#include "thermoq/strategies.hpp"

namespace thermoq::cli {

using io::Cell;
using io::Json;
using io::Table;

inline constexpr const char* kArtifactName = "thermoq";
inline constexpr const char* kArtifactVersion = "1.0.0";

inline const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {
      "bath-table",      "bound-qubit",     "bound-lamb",
      "strategy-table",  "collective-scan", "autonomous-scan",
      "ohmicity-bound",  "check-diffusive"};
  return names;
}

/// Parameter keys accepted by each command (flags and config-file keys
/// share these names).
inline std::vector<std::string> command_keys(const std::string& command) {
  const std::vector<std::string> bath = {"g", "alpha", "omega"};
  auto with = [&](std::vector<std::string> v) {
    v.insert(v.end(), bath.begin(), bath.end());
    return v;
  };
  if (command == "bath-table") return with({"w", "w-range", "T", "T-range"});
  if (command == "bound-qubit") return with({"w", "T", "T-range"});
  if (command == "bound-lamb") return with({"w", "T", "T-range"});
  if (command == "strategy-table") return {"a-min", "a-max", "t-min", "t-max"};
  if (command == "collective-scan") {
    return with({"w", "T", "N", "gdt-range", "prepare", "rate-prefactor"});
  }
  if (command == "autonomous-scan") {
    return with({"w", "T", "N", "b", "b-range", "rate-prefactor"});
  }
  if (command == "ohmicity-bound") return with({"w", "w-range", "T"});
  if (command == "check-diffusive") {
    return with({"w", "T", "T-range", "drop-absorption"});
  }
  throw DomainError("unknown command '" + command + "'");
}

struct ExperimentConfig {
  std::string command;
  Json params = Json::object();  // merged file values and flags
  std::string output;            // empty: stdout
  std::string format = "csv";
};

namespace detail {

using ::thermoq::detail::require;

inline double number(const Json& p, const std::string& key, double fallback) {
  if (!p.contains(key)) return fallback;
  const Json& v = p.at(key);
  if (v.is_number()) return v.get<double>();
  require(v.is_string(), "parameter '" + key + "' must be a number");
  return io::parse_double(v.get<std::string>());
}

inline std::vector<double> range(const Json& p, const std::string& range_key,
                                 const std::string& single_key,
                                 double fallback) {
  auto from = [&](const std::string& key) -> std::vector<double> {
    const Json& v = p.at(key);
    if (v.is_number()) return {v.get<double>()};
    if (v.is_array()) {
      std::vector<double> out;
      for (const Json& x : v) {
        require(x.is_number(), "parameter '" + key + "' must hold numbers");
        out.push_back(x.get<double>());
      }
      return out;
    }
    require(v.is_string(), "parameter '" + key + "' must be a range string");
    return io::parse_range(v.get<std::string>());
  };
  if (p.contains(range_key)) return from(range_key);
  if (p.contains(single_key)) return from(single_key);
  return {fallback};
}

inline std::vector<long> int_list(const Json& p, const std::string& key,
                                  std::vector<long> fallback) {
  if (!p.contains(key)) return fallback;
  const Json& v = p.at(key);
  if (v.is_number_integer()) return {v.get<long>()};
  if (v.is_array()) {
    std::vector<long> out;
    for (const Json& x : v) {
      require(x.is_number_integer(), "parameter '" + key + "' must hold integers");
      out.push_back(x.get<long>());
    }
    return out;
  }
  require(v.is_string(), "parameter '" + key + "' must be an integer list");
  return io::parse_int_list(v.get<std::string>());
}

inline bool flag(const Json& p, const std::string& key) {
  if (!p.contains(key)) return false;
  const Json& v = p.at(key);
  if (v.is_boolean()) return v.get<bool>();
  if (v.is_number_integer()) return v.get<long>() != 0;
  require(v.is_string(), "parameter '" + key + "' must be a boolean");
  const std::string s = v.get<std::string>();
  require(s == "true" || s == "false" || s == "1" || s == "0",
          "parameter '" + key + "' must be true or false");
  return s == "true" || s == "1";
}

inline OhmicDensity density(const Json& p) {
  OhmicDensity J{number(p, "g", 1.0), number(p, "alpha", 1.0),
                 number(p, "omega", 5.0)};
  require(std::isfinite(J.coupling) && J.coupling > 0.0, "g must be > 0");
  require(std::isfinite(J.ohmicity) && J.ohmicity >= 0.0, "alpha must be >= 0");
  require(std::isfinite(J.cutoff) && J.cutoff > 0.0, "omega must be > 0");
  return J;
}

inline void require_all(const std::vector<double>& xs, bool (*ok)(double),
                        const std::string& msg) {
  require(!xs.empty(), msg);
  for (double x : xs) require(std::isfinite(x) && ok(x), msg);
}

}  // namespace detail

/// Merges config-file values with flags (flags win) and validates every
/// physical parameter before any computation.
inline ExperimentConfig make_config(const std::string& command,
                                    const Json& file, const Json& flags) {
  using detail::require;
  ExperimentConfig cfg;
  cfg.command = command;
  const auto keys = command_keys(command);
  auto known = [&](const std::string& k) {
    return std::find(keys.begin(), keys.end(), k) != keys.end();
  };
  require(file.is_object() && flags.is_object(),
          "configuration must be a JSON object");
  for (const Json* src : {&file, &flags}) {
    for (auto it = src->begin(); it != src->end(); ++it) {
      const std::string& k = it.key();
      if (k == "command") {
        require(it.value() == command,
                "config file command does not match the subcommand");
      } else if (k == "output") {
        require(it.value().is_string(), "output must be a path string");
        cfg.output = it.value().get<std::string>();
      } else if (k == "format") {
        require(it.value().is_string(), "format must be csv or json");
        cfg.format = it.value().get<std::string>();
      } else {
        require(known(k), "unknown parameter '" + k + "' for " + command);
        cfg.params[k] = it.value();
      }
    }
  }
  require(cfg.format == "csv" || cfg.format == "json",
          "format must be csv or json");

  // Validation pass: evaluate every accessor the command will use.
  const Json& p = cfg.params;
  auto pos = +[](double x) { return x > 0.0; };
  auto nonneg = +[](double x) { return x >= 0.0; };
  if (command == "strategy-table") {
    const double a0 = detail::number(p, "a-min", 0.0);
    const double a1 = detail::number(p, "a-max", 1.0);
    const double t0 = detail::number(p, "t-min", kStrategyTimeMin);
    const double t1 = detail::number(p, "t-max", kStrategyTimeMax);
    require(0.0 <= a0 && a0 < a1 && a1 <= 1.0, "need 0 <= a-min < a-max <= 1");
    require(0.0 < t0 && t0 < t1 && std::isfinite(t1),
            "need 0 < t-min < t-max");
    return cfg;
  }
  const OhmicDensity J = detail::density(p);
  if (command == "bath-table" || command == "ohmicity-bound") {
    const auto ws = detail::range(p, "w-range", "w", 1.0);
    detail::require_all(ws, pos, "w must be > 0");
    for (double w : ws) {
      require(command == "ohmicity-bound" ? w <= J.cutoff : w < J.cutoff,
              command == "ohmicity-bound" ? "w must not exceed omega"
                                          : "w must lie below omega");
    }
    const auto Ts = detail::range(p, "T-range", "T", 1.0);
    detail::require_all(Ts, nonneg, "T must be >= 0");
    return cfg;
  }
  const double w = detail::number(p, "w", 1.0);
  if (command == "autonomous-scan") {
    require(std::isfinite(w) && w >= 0.0, "w must be >= 0");
  } else {
    require(std::isfinite(w) && w > 0.0, "w must be > 0");
  }
  if (command == "bound-qubit" || command == "bound-lamb" ||
      command == "check-diffusive") {
    require(command == "bound-qubit" ? w <= J.cutoff : w < J.cutoff,
            "w must lie below omega");
    const auto Ts = detail::range(p, "T-range", "T", 1.0);
    detail::require_all(Ts, pos, "T must be > 0");
    detail::flag(p, "drop-absorption");
    return cfg;
  }
  // collective-scan, autonomous-scan
  const double T = detail::number(p, "T", 1.0);
  require(std::isfinite(T) && T >= 0.0, "T must be >= 0");
  require(detail::number(p, "rate-prefactor", 1.0) > 0.0,
          "rate-prefactor must be > 0");
  const auto Ns = detail::int_list(
      p, "N", command == "collective-scan" ? std::vector<long>{1, 5, 10, 20}
                                           : std::vector<long>{50});
  require(!Ns.empty(), "N must be a non-empty list");
  for (long n : Ns) require(n >= 1 && n <= 4096, "N must lie in [1, 4096]");
  if (command == "collective-scan") {
    require(w <= J.cutoff, "w must not exceed omega");
    const auto gdt = detail::range(p, "gdt-range", "gdt-range", 1e-2);
    detail::require_all(gdt, pos, "gdt values must be > 0");
    std::string prep = "auto";
    if (p.contains("prepare")) {
      require(p.at("prepare").is_string(), "prepare must be a string");
      prep = p.at("prepare").get<std::string>();
    }
    require(prep == "auto" || prep == "middle" || prep == "ground",
            "prepare must be auto, middle or ground");
  } else {
    for (long n : Ns) require(n % 2 == 0, "autonomous-scan needs even N");
    const auto bs = detail::range(p, "b-range", "b", 0.05);
    detail::require_all(bs, pos, "b must be > 0");
  }
  return cfg;
}

/// Worker count: hardware concurrency capped by THERMOQ_THREADS.
inline std::size_t worker_count() {
  std::size_t n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("THERMOQ_THREADS")) {
    const std::string s(env);
    long v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    ::thermoq::detail::require(
        !s.empty() && res.ec == std::errc() && res.ptr == s.data() + s.size() &&
            v >= 1,
        "THERMOQ_THREADS must be a positive integer");
    n = std::min<std::size_t>(n, static_cast<std::size_t>(v));
  }
  return n;
}

/// Evaluates fn(0..count-1) on a worker pool; results are stored by index,
/// and the exception of the lowest failing index is rethrown.
template <class R, class F>
std::vector<R> parallel_map(std::size_t count, F fn) {
  std::vector<R> out(count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        out[i] = fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t n = std::min(worker_count(), std::max<std::size_t>(count, 1));
  std::vector<std::thread> pool;
  for (std::size_t k = 1; k < n; ++k) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

using Row = std::vector<Cell>;

namespace detail {

inline Table bath_table(const Json& p) {
  const OhmicDensity J = density(p);
  const auto ws = range(p, "w-range", "w", 1.0);
  const auto Ts = range(p, "T-range", "T", 1.0);
  Table t;
  t.columns = {"w", "T", "N", "dN_dT", "gamma_w", "gamma_minus_w",
               "dgamma_dT", "delta", "delta_T", "ddeltaT_dT", "s_dot"};
  const auto rows = parallel_map<Row>(ws.size() * Ts.size(), [&](std::size_t i) {
    const double w = ws[i / Ts.size()];
    const double T = Ts[i % Ts.size()];
    const BathResponse r = bath_response(w, T, J);
    return Row{w, T, bose_occupation(w, T),
               T > 0.0 ? bose_occupation_dT(w, T) : 0.0, r.gamma_plus,
               r.gamma_minus, r.dgamma_dT, r.delta, r.delta_T, r.ddeltaT_dT,
               r.s_dot};
  });
  for (const Row& r : rows) t.add_row(r);
  return t;
}

inline Table bound_qubit(const Json& p) {
  const OhmicDensity J = density(p);
  const double w = number(p, "w", 1.0);
  const auto Ts = range(p, "T-range", "T", 1.0);
  Table t;
  t.columns = {"T", "gamma_w", "gamma_minus_w", "dgamma_dT",
               "bound_fixed_H", "bound_explicit", "epsilon_star",
               "bound_optimal_H", "omega_opt"};
  const HermitianOperator sx(sigma_x());
  const auto rows = parallel_map<Row>(Ts.size(), [&](std::size_t i) {
    const double T = Ts[i];
    const BathResponse r = jump_rates(w, T, J);
    const BoundReport b = bound_fixed_H(qubit_model(w, r));
    const OptimalHBound o = bound_optimal_H(BosonicBath{J, T}, sx);
    return Row{T, r.gamma_plus, r.gamma_minus, r.dgamma_dT, b.rate,
               qubit_explicit_bound(w, T, J), *b.attaining_epsilon,
               o.report.rate, *o.report.attaining_omega};
  });
  for (const Row& r : rows) t.add_row(r);
  return t;
}

inline Table bound_lamb(const Json& p) {
  const OhmicDensity J = density(p);
  const double w = number(p, "w", 1.0);
  const auto Ts = range(p, "T-range", "T", 1.0);
  Table t;
  t.columns = {"T", "bound_total", "bound_rates_only", "bound_lamb_only",
               "regime", "gauge_x", "gamma_w", "gamma_minus_w", "dgamma_dT",
               "s_dot"};
  const auto rows = parallel_map<Row>(Ts.size(), [&](std::size_t i) {
    const double T = Ts[i];
    const BathResponse r = bath_response(w, T, J);
    const BoundReport total =
        qubit_bound_opt_gauge(r.gamma_plus, r.gamma_minus, r.dgamma_dT, r.s_dot);
    const BoundReport rates =
        qubit_bound_opt_gauge(r.gamma_plus, r.gamma_minus, r.dgamma_dT, 0.0);
    const BoundReport lamb =
        qubit_bound_opt_gauge(r.gamma_plus, r.gamma_minus, 0.0, r.s_dot);
    return Row{T, total.rate, rates.rate, lamb.rate,
               std::string(to_string(total.regime)), *total.gauge_x,
               r.gamma_plus, r.gamma_minus, r.dgamma_dT, r.s_dot};
  });
  for (const Row& r : rows) t.add_row(r);
  return t;
}

inline Table strategy_table(const Json& p) {
  const StrategyBox box{number(p, "a-min", 0.0), number(p, "a-max", 1.0),
                        number(p, "t-min", kStrategyTimeMin),
                        number(p, "t-max", kStrategyTimeMax)};
  Table t;
  t.columns = {"strategy", "r", "a_opt", "t_opt", "oracle_r"};
  const StrategyKind kinds[] = {StrategyKind::ramsey, StrategyKind::ancilla,
                                StrategyKind::fast};
  const auto rows = parallel_map<Row>(3, [&](std::size_t i) {
    const StrategyResult s = optimize_strategy(kinds[i], box);
    return Row{std::string(to_string(kinds[i])), s.r_coefficient, s.a_opt,
               s.t_opt, s.oracle_rate};
  });
  for (const Row& r : rows) t.add_row(r);
  return t;
}

inline BosonicBath collective_bath(const Json& p) {
  return BosonicBath{density(p), number(p, "T", 1.0),
                     number(p, "rate-prefactor", 1.0)};
}

inline Table collective_scan(const Json& p) {
  const BosonicBath bath = collective_bath(p);
  const double w = number(p, "w", 1.0);
  const auto Ns = int_list(p, "N", {1, 5, 10, 20});
  const auto gdt = range(p, "gdt-range", "gdt-range", 1e-2);
  const std::string prep =
      p.contains("prepare") ? p.at("prepare").get<std::string>() : "auto";
  const LadderBath lb = ladder_bath(bath, w);
  Table t;
  t.columns = {"N", "prepare_n", "g_dt", "fi_rate", "rate_limit"};
  const double g = bath.density.coupling;
  const auto rows = parallel_map<std::vector<Row>>(Ns.size(), [&](std::size_t i) {
    const auto N = static_cast<std::size_t>(Ns[i]);
    std::size_t n = N / 2;
    if (prep == "ground" || (prep == "auto" && N % 2 == 1)) n = 0;
    std::vector<double> dts;
    for (double x : gdt) dts.push_back(x / g);
    const auto rates = ladder_fi_rate_scan(N, dts, lb, n);
    const double limit = ladder_rate_limit(N, lb, n);
    std::vector<Row> out;
    for (std::size_t k = 0; k < gdt.size(); ++k) {
      out.push_back(Row{static_cast<long long>(N), static_cast<long long>(n),
                        gdt[k], rates[k], limit});
    }
    return out;
  });
  for (const auto& block : rows) {
    for (const Row& r : block) t.add_row(r);
  }
  return t;
}

inline Table autonomous_scan(const Json& p) {
  const BosonicBath bath = collective_bath(p);
  const double w = number(p, "w", 1.0);
  const auto Ns = int_list(p, "N", {50});
  const auto bs = range(p, "b-range", "b", 0.05);
  Table t;
  t.columns = {"N", "w", "b", "ground_n", "fi_rate", "bound_optimal_H",
               "ratio_to_bound"};
  for (long Nl : Ns) {
    const auto N = static_cast<std::size_t>(Nl);
    const double bound =
        bound_optimal_H(bath, HermitianOperator(dicke_sum_sigma_x(N))).report.rate;
    const auto rows = parallel_map<Row>(bs.size(), [&](std::size_t i) {
      const double b = bs[i];
      const std::size_t n = interacting_ground_index(N, w, b);
      const double r = autonomous_fi_rate_at(N, w, b, bath, n);
      return Row{static_cast<long long>(N), w, b, static_cast<long long>(n), r,
                 bound, r / bound};
    });
    for (const Row& r : rows) t.add_row(r);
  }
  return t;
}

inline Table ohmicity_table(const Json& p) {
  const OhmicDensity J = density(p);
  const auto ws = range(p, "w-range", "w", 1.0);
  const auto Ts = range(p, "T-range", "T", 1.0);
  Table t;
  t.columns = {"w", "T", "gamma_w", "gamma_minus_w", "rate",
               "attaining_channel"};
  for (double w : ws) {
    for (double T : Ts) {
      const BathResponse r = jump_rates(w, T, J);
      const OhmicityBound o = ohmicity_bound(w, r.gamma_plus, r.gamma_minus);
      t.add_row({w, T, r.gamma_plus, r.gamma_minus, o.rate,
                 std::string(o.attained_by_emission ? "emission"
                                                    : "absorption")});
    }
  }
  return t;
}

inline Table check_diffusive_table(const Json& p) {
  const OhmicDensity J = density(p);
  const double w = number(p, "w", 1.0);
  const auto Ts = range(p, "T-range", "T", 1.0);
  const bool drop = flag(p, "drop-absorption");
  Table t;
  t.columns = {"T", "simple", "general", "simple_residual", "general_residual"};
  const auto rows = parallel_map<Row>(Ts.size(), [&](std::size_t i) {
    BathResponse r = bath_response(w, Ts[i], J);
    if (drop) {
      r.gamma_minus = 0.0;
    }
    const DiffusiveCheck c = check_diffusive(qubit_model(w, r));
    return Row{Ts[i], static_cast<long long>(c.simple),
               static_cast<long long>(c.general), c.simple_residual,
               c.general_residual};
  });
  for (const Row& r : rows) t.add_row(r);
  return t;
}

}  // namespace detail

struct RunResult {
  Table table;
  Json meta;
};

inline RunResult run(const ExperimentConfig& cfg) {
  RunResult out;
  const Json& p = cfg.params;
  const std::string& c = cfg.command;
  if (c == "bath-table") out.table = detail::bath_table(p);
  else if (c == "bound-qubit") out.table = detail::bound_qubit(p);
  else if (c == "bound-lamb") out.table = detail::bound_lamb(p);
  else if (c == "strategy-table") out.table = detail::strategy_table(p);
  else if (c == "collective-scan") out.table = detail::collective_scan(p);
  else if (c == "autonomous-scan") out.table = detail::autonomous_scan(p);
  else if (c == "ohmicity-bound") out.table = detail::ohmicity_table(p);
  else if (c == "check-diffusive") out.table = detail::check_diffusive_table(p);
  else throw DomainError("unknown command '" + c + "'");
  out.meta["artifact"] = kArtifactName;
  out.meta["artifact_version"] = kArtifactVersion;
  out.meta["command"] = c;
  out.meta["config"] = p;
  return out;
}

}  // namespace thermoq::cli
