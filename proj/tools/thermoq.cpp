// thermoq command-line tool: runs one experiment per invocation and emits
// CSV or JSON.

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "thermoq/errors.hpp"
#include "thermoq/experiments.hpp"

namespace {

using thermoq::io::Json;

enum ExitCode { kOk = 0, kValidation = 1, kNonConvergence = 2 };

int fail(const std::string& kind, const std::string& message, int code) {
  Json err;
  err["error"]["kind"] = kind;
  err["error"]["message"] = message;
  err["error"]["exit_code"] = code;
  std::cerr << err.dump() << '\n';
  return code;
}

Json read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw thermoq::DomainError("cannot open config file '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw thermoq::DomainError("config file '" + path +
                               "' is not valid JSON: " + e.what());
  }
}

void emit(const thermoq::cli::ExperimentConfig& cfg,
          const thermoq::cli::RunResult& r) {
  std::ostringstream buf;
  if (cfg.format == "json") {
    thermoq::io::write_json(buf, r.table, r.meta);
  } else {
    thermoq::io::write_csv(buf, r.table);
  }
  if (cfg.output.empty()) {
    std::cout << buf.str();
    std::cout.flush();
    return;
  }
  std::ofstream out(cfg.output, std::ios::binary);
  if (!out) throw std::ios_base::failure("cannot open '" + cfg.output + "'");
  out << buf.str();
  out.flush();
  if (!out) throw std::ios_base::failure("write to '" + cfg.output + "' failed");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite-time thermometry bounds and strategies"};
  app.require_subcommand(1);

  struct Sub {
    CLI::App* app = nullptr;
    std::string config;
    std::string output;
    std::string format;
    std::map<std::string, std::string> values;
  };
  std::map<std::string, Sub> subs;
  for (const std::string& name : thermoq::cli::command_names()) {
    Sub& s = subs[name];
    s.app = app.add_subcommand(name);
    s.app->add_option("--config", s.config, "JSON config file");
    s.app->add_option("--output", s.output, "output path (default stdout)");
    s.app->add_option("--format", s.format, "csv or json");
    for (const std::string& key : thermoq::cli::command_keys(name)) {
      s.app->add_option("--" + key, s.values[key]);
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("usage", e.what(), kValidation);
  }

  for (auto& [name, s] : subs) {
    if (!s.app->parsed()) continue;
    try {
      Json file = Json::object();
      if (!s.config.empty()) file = read_config_file(s.config);
      Json flags = Json::object();
      for (const auto& [key, value] : s.values) {
        if (s.app->count("--" + key) > 0) flags[key] = value;
      }
      if (s.app->count("--output") > 0) flags["output"] = s.output;
      if (s.app->count("--format") > 0) flags["format"] = s.format;
      const auto cfg = thermoq::cli::make_config(name, file, flags);
      const auto result = thermoq::cli::run(cfg);
      emit(cfg, result);
      return kOk;
    } catch (const thermoq::ConvergenceError& e) {
      return fail("non-convergence", e.what(), kNonConvergence);
    } catch (const thermoq::IllDefinedFisher& e) {
      return fail("ill-defined-fisher", e.what(), kNonConvergence);
    } catch (const thermoq::DomainError& e) {
      return fail("validation", e.what(), kValidation);
    } catch (const std::ios_base::failure& e) {
      return fail("io", e.what(), kValidation);
    } catch (const Json::exception& e) {
      return fail("validation", e.what(), kValidation);
    }
  }
  return fail("usage", "no subcommand given", kValidation);
}
