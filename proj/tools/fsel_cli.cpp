// Command-line front end. Everything goes through the C API in libfsel.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "fsel/fsel.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitValidation = 3;
constexpr int kExitIo = 4;

int exit_code(fsel_status s) {
  switch (s) {
    case FSEL_OK: return kExitOk;
    case FSEL_ERR_USAGE: return kExitUsage;
    case FSEL_ERR_VALIDATION: return kExitValidation;
    case FSEL_ERR_IO: return kExitIo;
    default: return kExitFailure;
  }
}

// Flag name -> config key, for the value-taking flags shared by subcommands.
const std::vector<std::pair<std::string, std::string>> kValueFlags = {
    {"seed", "seed"},          {"tasks", "tasks"},         {"ways", "ways"},
    {"shots", "shots"},        {"query", "query"},         {"keep", "keep"},
    {"classifier", "classifier"}, {"adjust", "adjust"},    {"rank", "rank"},
    {"eval", "eval"},          {"eval-query", "eval_query"}, {"large-shot", "large_shot"},
    {"views", "views"},        {"rho", "rho"},             {"view-bias", "view_bias"},
    {"epsilon", "epsilon"},    {"draws", "draws"},         {"k", "k"},
    {"lambda", "lambda"},      {"max-iters", "max_iters"}, {"tolerance", "tolerance"},
    {"workers", "workers"},    {"data", "data"},           {"spec", "spec"},
    {"preset", "preset"},      {"classes", "classes"},     {"samples", "samples"},
};

struct Invocation {
  std::map<std::string, std::string> values;  // flag name -> raw value
  bool frozen_meta = false;
  bool progress = false;
  std::string out;
  std::string format = "csv";
  std::string config_file;
  std::string positional;
};

void add_shared(CLI::App* cmd, Invocation& inv) {
  for (const auto& [flag, key] : kValueFlags) {
    cmd->add_option("--" + flag, inv.values[flag], "sets config key '" + key + "'");
  }
  cmd->add_option("--out,-o", inv.out, "result file; '<out>.meta.json' gets the metadata");
  cmd->add_option("--format", inv.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--config", inv.config_file, "key = value file, overridden by flags");
  cmd->add_flag("--frozen-meta", inv.frozen_meta, "omit the timestamp from metadata");
  cmd->add_flag("--progress", inv.progress, "progress lines on stderr");
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

int fail(fsel_status s) {
  std::cerr << "error: " << fsel_last_error() << '\n';
  return exit_code(s);
}

int apply(fsel_config* cfg, const std::string& key, const std::string& value) {
  const fsel_status s = fsel_config_set(cfg, key.c_str(), value.c_str());
  return s == FSEL_OK ? kExitOk : fail(s);
}

int load_config_file(fsel_config* cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    std::cerr << "error: cannot open config file " << path << '\n';
    return kExitIo;
  }
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      std::cerr << "error: " << path << ":" << number << ": expected key = value\n";
      return kExitValidation;
    }
    std::string key = trim(line.substr(0, eq));
    for (char& ch : key) {
      if (ch == '-') ch = '_';
    }
    if (int rc = apply(cfg, key, trim(line.substr(eq + 1)))) return rc;
  }
  return kExitOk;
}

void print_table(const fsel_result* result) {
  const size_t cols = fsel_result_cols(result);
  for (size_t c = 0; c < cols; ++c) std::cout << (c ? "," : "") << fsel_result_column(result, c);
  std::cout << '\n';
  for (size_t r = 0; r < fsel_result_rows(result); ++r) {
    for (size_t c = 0; c < cols; ++c) std::cout << (c ? "," : "") << fsel_result_cell(result, r, c);
    std::cout << '\n';
  }
}

int execute(const std::string& command, const Invocation& inv) {
  fsel_config* raw = nullptr;
  if (fsel_status s = fsel_config_new(&raw); s != FSEL_OK) return fail(s);
  std::unique_ptr<fsel_config, decltype(&fsel_config_free)> cfg(raw, fsel_config_free);

  if (!inv.config_file.empty()) {
    if (int rc = load_config_file(cfg.get(), inv.config_file)) return rc;
  }
  for (const auto& [flag, key] : kValueFlags) {
    const auto it = inv.values.find(flag);
    if (it == inv.values.end() || it->second.empty()) continue;
    if (int rc = apply(cfg.get(), key, it->second)) return rc;
  }
  if (!inv.positional.empty()) {
    if (int rc = apply(cfg.get(), "data", inv.positional)) return rc;
  }
  if (inv.frozen_meta) {
    if (int rc = apply(cfg.get(), "frozen_meta", "true")) return rc;
  }
  if (inv.progress) {
    if (int rc = apply(cfg.get(), "progress", "true")) return rc;
  }

  if (command == "synth-ffsb") {
    if (inv.out.empty()) {
      std::cerr << "error: synth-ffsb needs --out\n";
      return kExitUsage;
    }
    if (fsel_status s = fsel_synthesize_ffsb(cfg.get(), inv.out.c_str()); s != FSEL_OK) {
      return fail(s);
    }
    std::cout << "{\"command\":\"synth-ffsb\",\"out\":\"" << inv.out << "\"}\n";
    return kExitOk;
  }

  fsel_result* result_raw = nullptr;
  if (fsel_status s = fsel_run(command.c_str(), cfg.get(), &result_raw); s != FSEL_OK) {
    return fail(s);
  }
  std::unique_ptr<fsel_result, decltype(&fsel_result_free)> result(result_raw, fsel_result_free);

  if (inv.out.empty()) {
    print_table(result.get());
    return kExitOk;
  }
  if (fsel_status s = fsel_result_write(result.get(), inv.out.c_str(), inv.format.c_str());
      s != FSEL_OK) {
    return fail(s);
  }
  const std::string meta = inv.out + ".meta.json";
  if (fsel_status s = fsel_result_write_metadata(result.get(), meta.c_str()); s != FSEL_OK) {
    return fail(s);
  }
  std::cout << "{\"command\":\"" << command << "\",\"rows\":" << fsel_result_rows(result.get())
            << ",\"out\":\"" << inv.out << "\",\"meta\":\"" << meta << "\"}\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Feature-importance selection and few-shot probing experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(fsel_version()));

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"table1", "two-dimensional Gaussian bench: 1-shot and large-shot accuracies"},
      {"thm1-check", "redundancy conditions and probability bound per shot"},
      {"thm1-verify", "Monte Carlo check of NCC redundancy per shot"},
      {"thm2-gap", "population error gap of exact 0-1 minimizers per shot"},
      {"mask-sweep", "error versus number of kept dimensions"},
      {"wayshot-grid", "full-feature versus best-mask error per way and shot"},
      {"fi-quality", "estimated importance statistics grouped by oracle rank"},
      {"topk-freq", "top-k membership counts over all class pairs of a feature file"},
      {"adjust-eval", "accuracy with and without the soft mask"},
      {"ffsb-info", "validate a feature file and print its header"},
      {"synth-ffsb", "write a feature file sampled from a Gaussian spec"},
  };
  std::map<std::string, Invocation> invocations;
  std::map<std::string, CLI::App*> subs;
  for (const auto& [name, help] : commands) {
    auto* cmd = app.add_subcommand(name, help);
    add_shared(cmd, invocations[name]);
    subs[name] = cmd;
  }
  subs["ffsb-info"]->add_option("file", invocations["ffsb-info"].positional, "FFSB file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  for (const auto& [name, cmd] : subs) {
    if (cmd->parsed()) return execute(name, invocations[name]);
  }
  std::cerr << app.help();
  return kExitUsage;
}
