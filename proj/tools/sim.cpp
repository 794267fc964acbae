// sim: runs one experiment family and writes <family>-<hash>.csv plus a JSON
// sidecar. Exit codes: 0 success, 1 configuration error, 2 failed --assert
// or oracle check.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "mrm/harness.hpp"
#include "sim.hpp"

namespace {

namespace fs = std::filesystem;
using mrm::ExperimentFamily;

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kCheckFailed = 2;

struct CommonOptions {
  std::string config;
  std::vector<std::string> sets;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  std::optional<unsigned> parallelism;
  bool assert_checks = false;
  std::optional<std::string> dist;
  std::optional<std::uint32_t> trials;
  std::optional<double> delta;
  std::optional<double> lambda;
  std::optional<double> alpha;
  std::optional<double> length;
  std::optional<double> sensing_range;
  std::optional<std::string> baseline;
  std::optional<std::string> baseline_cache;
  std::vector<double> sweep;
  std::vector<double> alphas;  // workload only: sweep over alpha
  std::string dump_plans;
  std::uint32_t dump_limit = 10;
  bool quiet = false;
};

struct FamilyCommand {
  const char* name;
  ExperimentFamily family;
  const char* sweep_flag;
  const char* about;
};

constexpr FamilyCommand kCommands[] = {
    {"lattice-mean-reward", ExperimentFamily::LatticeMeanReward, "--n",
     "mean R*(n) on the 2-D lattice over path lengths n"},
    {"lattice-sensing", ExperimentFamily::LatticeSensing, "--m",
     "stopping distance of the limited-sensing lattice planner over sensing ranges m"},
    {"cont-mean-reward", ExperimentFamily::ContinuousMeanReward, "--L",
     "mean T*(L)/L on a marked Poisson field over mission lengths L"},
    {"cont-sensing", ExperimentFamily::ContinuousSensing, "--S",
     "stopping distance of the receding-horizon planner over sensing ranges S"},
    {"agility", ExperimentFamily::Agility, "--alphas", "mean T*(L)/L over agility alpha"},
    {"workload", ExperimentFamily::Workload, "--S",
     "planner and inference workload over S (or --alphas)"},
    {"ugs", ExperimentFamily::Ugs, "--L", "homogeneous vs randomized sensor precision"},
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw mrm::ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

mrm::ExperimentSpec build_spec(const FamilyCommand& cmd, const CommonOptions& o) {
  mrm::ExperimentSpec spec;
  if (!o.config.empty()) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(slurp(o.config));
    } catch (const nlohmann::json::exception& e) {
      throw mrm::ConfigError("config file '" + o.config + "' is not valid JSON: " + e.what());
    }
    if (j.contains("family") && j["family"] != mrm::to_string(cmd.family)) {
      throw mrm::ConfigError("config file is for family " + j["family"].dump() +
                             ", not " + std::string(mrm::to_string(cmd.family)));
    }
    spec = mrm::spec_from_json(j);
  }
  spec.family = cmd.family;
  for (const auto& s : o.sets) mrm::apply_override(spec, s);
  if (o.seed) spec.seed = *o.seed;
  if (o.parallelism) spec.parallelism = *o.parallelism;
  if (o.dist) spec.dist = *o.dist;
  if (o.trials) spec.trials = *o.trials;
  if (o.delta) spec.delta = *o.delta;
  if (o.lambda) spec.lambda = *o.lambda;
  if (o.alpha) spec.alpha = *o.alpha;
  if (o.length) spec.length = *o.length;
  if (o.sensing_range) spec.sensing_range = *o.sensing_range;
  if (o.baseline) spec.baseline = *o.baseline;
  if (o.baseline_cache) spec.baseline_cache = *o.baseline_cache;
  if (!o.sweep.empty() && !o.alphas.empty()) {
    throw mrm::ConfigError("give either --S or --alphas, not both");
  }
  if (!o.sweep.empty()) {
    spec.sweep = o.sweep;
    if (cmd.family == ExperimentFamily::Workload) spec.sweep_name = "S";
  }
  if (!o.alphas.empty()) {
    spec.sweep = o.alphas;
    spec.sweep_name = "alpha";
  }
  return mrm::normalized(spec);
}

fs::path output_dir(const CommonOptions& o) {
  if (!o.out_dir.empty()) return o.out_dir;
  if (const char* env = std::getenv("MRM_OUT_DIR"); env && *env) return env;
  return ".";
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

int run_family(const FamilyCommand& cmd, const CommonOptions& o, const std::string& argv_line) {
  const mrm::ExperimentSpec spec = build_spec(cmd, o);
  const std::string hash = mrm::config_hash(spec);
  if (!o.quiet) {
    std::cerr << cmd.name << ": config " << hash << ", " << spec.sweep.size()
              << " sweep points x " << spec.trials << " trials, parallelism "
              << spec.parallelism << '\n';
  }
  const auto progress = [&](std::string_view msg) {
    if (!o.quiet) std::cerr << "  " << msg << '\n';
  };
  const auto records = mrm::run(spec, progress);

  const fs::path dir = output_dir(o);
  fs::create_directories(dir);
  const std::string stem = std::string(mrm::to_string(spec.family)) + "-" + hash;
  std::ostringstream csv;
  mrm::write_records_csv(csv, records);
  write_file(dir / (stem + ".csv"), csv.str());
  std::cout << (dir / (stem + ".csv")).string() << '\n';

  nlohmann::json side = mrm::sidecar(spec, records);
  side["command_line"] = argv_line;
  side["outputs"] = {stem + ".csv"};
  if (spec.family == ExperimentFamily::Ugs) {
    std::ostringstream table;
    mrm::write_ugs_table(table, records);
    write_file(dir / (stem + "-ugs.csv"), table.str());
    side["outputs"].push_back(stem + "-ugs.csv");
    std::cout << (dir / (stem + "-ugs.csv")).string() << '\n';
  }
  if (!o.dump_plans.empty()) {
    std::ofstream dump(o.dump_plans);
    if (!dump) throw std::runtime_error("cannot write " + o.dump_plans);
    sim::dump_plans(dump, spec, o.dump_limit);
    side["plan_dump"] = o.dump_plans;
  }
  write_file(dir / (stem + ".json"), side.dump(2) + "\n");
  std::cout << (dir / (stem + ".json")).string() << '\n';

  if (!o.assert_checks) return kOk;
  const auto checks = sim::assert_checks(spec, records);
  bool ok = true;
  for (const auto& c : checks) {
    std::cout << (c.pass ? "PASS " : "FAIL ") << cmd.name << ' ' << c.name << ": " << c.detail
              << '\n';
    ok = ok && c.pass;
  }
  if (checks.empty()) std::cerr << cmd.name << ": no acceptance check applies to this spec\n";
  return ok ? kOk : kCheckFailed;
}

void add_common(CLI::App* sub, const FamilyCommand& cmd, CommonOptions& o) {
  sub->add_option("--config", o.config, "JSON experiment config (keys as in the sidecar spec)")
      ->check(CLI::ExistingFile);
  sub->add_option("--set", o.sets, "key=value override applied after --config; repeatable");
  sub->add_option("--seed", o.seed, "master seed");
  sub->add_option("--out-dir", o.out_dir, "output directory (default $MRM_OUT_DIR or .)");
  sub->add_option("--parallelism", o.parallelism, "worker threads; never changes results")
      ->check(CLI::PositiveNumber);
  sub->add_flag("--assert", o.assert_checks, "exit 2 if the family's acceptance check fails");
  sub->add_flag("-q,--quiet", o.quiet, "no progress on stderr");
  sub->add_option("--dist", o.dist, "reward distribution, e.g. exponential:rate=1");
  sub->add_option("--trials", o.trials, "Monte-Carlo trials per sweep point");
  sub->add_option("--delta", o.delta, "stopping-rule tolerance");
  sub->add_option("--lambda", o.lambda, "Poisson intensity");
  sub->add_option("--alpha", o.alpha, "agility w / v");
  sub->add_option("--length", o.length, "mission length where L is not swept");
  sub->add_option("--sensing-range", o.sensing_range, "S for workload sweeps over alpha");
  sub->add_option("--baseline", o.baseline, "auto | closed-form | empirical | power:<p>");
  sub->add_option("--baseline-cache", o.baseline_cache, "JSON file reused across runs");
  const std::string flag = cmd.sweep_flag;
  if (flag == "--alphas") {
    sub->add_option("--alphas", o.sweep, "comma-separated sweep")->delimiter(',');
  } else {
    sub->add_option(flag, o.sweep, "comma-separated sweep")->delimiter(',');
  }
  if (cmd.family == ExperimentFamily::Workload) {
    sub->add_option("--alphas", o.alphas, "sweep alpha instead of S")->delimiter(',');
  }
  if (cmd.family == ExperimentFamily::ContinuousMeanReward ||
      cmd.family == ExperimentFamily::Agility) {
    sub->add_option("--dump-plans", o.dump_plans, "write JSON-lines plan dumps to this file");
    sub->add_option("--dump-limit", o.dump_limit, "trials dumped per sweep point");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte-Carlo experiments for motion planning on random reward fields", "sim"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(mrm::library_version()));

  std::vector<CommonOptions> options(std::size(kCommands));
  std::vector<CLI::App*> subs;
  for (std::size_t i = 0; i < std::size(kCommands); ++i) {
    CLI::App* sub = app.add_subcommand(kCommands[i].name, kCommands[i].about);
    add_common(sub, kCommands[i], options[i]);
    subs.push_back(sub);
  }

  std::uint64_t oracle_seed = 1;
  std::uint32_t oracle_cases = 1000;
  CLI::App* oracle = app.add_subcommand("oracle-check", "brute-force vs DP equivalence suites");
  oracle->add_option("--seed", oracle_seed, "seed of the random cases");
  oracle->add_option("--cases", oracle_cases, "random cases per suite")
      ->check(CLI::PositiveNumber);

  std::string dump_path, field_out;
  std::size_t dump_line = 1;
  CLI::App* replay = app.add_subcommand("replay", "re-run one trial from a plan dump");
  replay->add_option("dump", dump_path, "JSON-lines plan dump")->required()->check(CLI::ExistingFile);
  replay->add_option("--line", dump_line, "1-based line of the dump to replay")
      ->check(CLI::PositiveNumber);
  replay->add_option("--field-out", field_out, "write the regenerated field as CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  std::string argv_line;
  for (int i = 0; i < argc; ++i) argv_line += (i ? " " : "") + std::string(argv[i]);

  try {
    for (std::size_t i = 0; i < subs.size(); ++i) {
      if (subs[i]->parsed()) return run_family(kCommands[i], options[i], argv_line);
    }
    if (oracle->parsed()) {
      bool ok = true;
      for (const auto& c : sim::oracle_suites(oracle_seed, oracle_cases)) {
        std::cout << (c.pass ? "PASS " : "FAIL ") << "oracle " << c.name << ": " << c.detail
                  << '\n';
        ok = ok && c.pass;
      }
      return ok ? kOk : kCheckFailed;
    }
    if (replay->parsed()) {
      std::ifstream in(dump_path);
      std::string line;
      for (std::size_t k = 0; k < dump_line; ++k) {
        if (!std::getline(in, line)) {
          throw mrm::ConfigError("plan dump has fewer than " + std::to_string(dump_line) +
                                 " lines");
        }
      }
      const auto r = sim::replay(line, field_out);
      std::cout << r.summary << '\n';
      return r.reproduced ? kOk : kCheckFailed;
    }
  } catch (const mrm::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  }
  return kConfigError;
}
