#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <optional>

#include "CLI11.hpp"

#include "moyal/config.hpp"
#include "moyal/error.hpp"
#include "moyal/report.hpp"
#include "suite_algebra.hpp"
#include "suite_gw.hpp"
#include "suite_hamiltonian.hpp"
#include "suite_mollifier.hpp"

using namespace moyal;

namespace {

enum Exit { kPass = 0, kCheckFailure = 1, kConfigError = 2, kUnsupported = 3 };

void keep_suite(Report& r, const std::string& name) {
  if (name.empty()) return;
  std::vector<Check> kept;
  for (const auto& c : r.checks)
    if (c.id.rfind(name + ".", 0) == 0) kept.push_back(c);
  if (kept.empty()) throw ConfigError("--suite", "suite '" + name + "' selects no checks in " + r.suite);
  r.checks = std::move(kept);
}

void print(const Report& r, const std::filesystem::path& path) {
  for (const auto& c : r.checks) {
    const char* tag = c.status == CheckStatus::pass ? "PASS" : (c.status == CheckStatus::fail ? "FAIL" : "SKIP");
    std::printf("%-4s %-34s %-3s %.3e  tol %.1e\n", tag, c.id.c_str(), c.kind == CheckKind::max ? "<=" : ">",
                c.value, c.tolerance);
    if (!c.note.empty()) std::printf("     %s\n", c.note.c_str());
  }
  std::printf("%s: %s, report %s\n", r.suite.c_str(), r.passed() ? "all checks pass" : "checks failed",
              path.string().c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Star products, Grosse-Wulkenhaar solutions, tensors, mollifiers and nonlocal Hamiltonians"};
  app.require_subcommand(1);
  std::string config_path, out_dir, suite;
  std::optional<long long> seed;
  app.add_option("--config", config_path, "flat key=value config file");
  app.add_option("--out", out_dir, "output directory for reports and tables");
  app.add_option("--seed", seed, "seed for every random draw");
  app.add_option("--suite", suite, "run only the checks whose id starts with NAME.");

  const std::map<std::string, std::function<Report(const RunConfig&)>> commands = {
      {"verify-algebra", cli::verify_algebra},
      {"solve-gw", cli::solve_gw},
      {"tensors", cli::tensors},
      {"mollifier-scan", cli::mollifier_scan},
      {"hamiltonian-demo", cli::hamiltonian_demo},
  };
  const std::map<std::string, std::string> help = {
      {"verify-algebra", "matrix-base basis, associativity and grid cross-representation suites"},
      {"solve-gw", "exact single-cell solution; writes matrix CSV and grid binary"},
      {"tensors", "energy-momentum and Noether current suite; writes tensor CSVs"},
      {"mollifier-scan", "L1 convergence of mollified test functions; writes scan CSVs"},
      {"hamiltonian-demo", "toy and GW constraint chains; writes a trajectory CSV"},
  };
  for (const auto& [name, fn] : commands) app.add_subcommand(name, help.at(name))->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kConfigError;
  }
  const std::string name = app.get_subcommands().front()->get_name();

  try {
    RunConfig cfg = config_path.empty() ? RunConfig{} : load_config(config_path);
    if (!out_dir.empty()) cfg.out = out_dir;
    if (seed) {
      if (*seed < 0) throw ConfigError("--seed", "--seed must be non-negative");
      cfg.seed = static_cast<std::uint64_t>(*seed);
    }
    if (!suite.empty()) cfg.suite = suite;

    const auto start = std::chrono::steady_clock::now();
    Report r = commands.at(name)(cfg);
    keep_suite(r, cfg.suite);
    r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const auto path = std::filesystem::path(cfg.out) / (name + ".json");
    r.write(path);
    print(r, path);
    return r.passed() ? kPass : kCheckFailure;
  } catch (const ConfigError& e) {
    std::cerr << "config error [" << e.key << "]: " << e.what() << '\n';
    return kConfigError;
  } catch (const UnsupportedRegime& e) {
    std::cerr << "unsupported regime: " << e.what() << '\n';
    return kUnsupported;
  } catch (const DomainError& e) {
    std::cerr << "domain error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::out_of_range& e) {
    std::cerr << "out of range: " << e.what() << '\n';
    return kConfigError;
  }
}
