#pragma once

// Monte-Carlo experiment families, their CSV records and the fits run on
// them. Every record of one run carries the hash of the spec that produced
// it; aggregation across different specs is refused.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "mrm/stats.hpp"

namespace mrm {

/// Raised for invalid or inconsistent experiment configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class ExperimentFamily {
  LatticeMeanReward,     // sweep n: mean R*_2(n)
  LatticeSensing,        // sweep m: mean stopping distance
  ContinuousMeanReward,  // sweep L: mean T*_2(L) / L
  ContinuousSensing,     // sweep S: mean stopping distance
  Agility,               // sweep alpha: mean T*_2(L) / L
  Workload,              // sweep S or alpha: planner and inference workload
  Ugs,                   // sweep L: homogeneous vs randomized sensor precision
};

std::string_view to_string(ExperimentFamily family);
/// Throws ConfigError for unknown names.
ExperimentFamily parse_family(std::string_view name);

struct ExperimentSpec {
  ExperimentFamily family = ExperimentFamily::LatticeMeanReward;
  std::string dist = "exponential:rate=1";
  std::string sweep_name;  // empty selects the family default
  std::vector<double> sweep;
  std::uint32_t trials = 100;
  double delta = 0.1;
  std::uint64_t seed = 1;
  double lambda = 1.0;
  double alpha = 1.0;
  double length = 100.0;        // mission length where L is not swept
  double sensing_range = 8.0;   // S when the workload sweep is over alpha
  std::uint64_t max_steps = 1'000'000;  // lattice stopping cap
  double max_length = 1e4;      // continuous stopping cap
  /// Stopping baseline: "auto", "closed-form", "empirical" or "power:<p>"
  /// (R*_2 estimated at horizon ceil(m^p), the heavy-tailed variant).
  std::string baseline = "auto";
  std::uint32_t baseline_trials = 0;  // 0: 2000 for empirical, 1000 for power
  std::uint32_t baseline_n = 10'000;  // lattice empirical baseline length
  double baseline_length = 200.0;     // continuous empirical baseline length
  double mean_precision = 1.0;        // UGS
  double prior_precision = 1.0;       // UGS

  // Execution settings; they never change results and are not hashed.
  unsigned parallelism = 1;
  std::string baseline_cache;  // optional JSON file reused across runs
};

/// Fills family defaults and checks the spec. Throws ConfigError.
ExperimentSpec normalized(ExperimentSpec spec);

/// Canonical JSON of the result-determining fields (sorted keys).
nlohmann::json to_json(const ExperimentSpec& spec);
/// Accepts the keys produced by to_json plus "parallelism" and
/// "baseline_cache". Unknown keys are a ConfigError.
ExperimentSpec spec_from_json(const nlohmann::json& j);
/// Applies one `key=value` override; lists are comma separated.
void apply_override(ExperimentSpec& spec, std::string_view assignment);

/// FNV-1a 64 of the canonical JSON, as 16 hex digits.
std::string config_hash(const ExperimentSpec& spec);

struct ExperimentRecord {
  std::string family;
  std::string dist;
  std::optional<double> lambda;  // empty for lattice families
  std::optional<double> alpha;
  std::string sweep_name;
  double sweep_value = 0.0;
  std::uint32_t trials = 0;
  double mean = 0.0;
  double std_err = 0.0;
  nlohmann::json extra = nlohmann::json::object();  // always has config_hash, censored

  std::string config_hash() const;
  bool censored() const;
  /// `mean` for "mean", otherwise extra[metric]. Throws std::out_of_range.
  double metric(std::string_view name) const;
};

using ProgressFn = std::function<void(std::string_view)>;

/// Runs every sweep point of the spec. Trials are spread over
/// spec.parallelism workers and reduced in trial order, so records are
/// bitwise identical for any parallelism. Throws ConfigError for invalid
/// specs, including heavy-tailed stopping runs without a power baseline.
std::vector<ExperimentRecord> run(const ExperimentSpec& spec, const ProgressFn& progress = {});

inline constexpr std::string_view kRecordHeader =
    "family,dist,lambda,alpha,sweep_name,sweep_value,trials,mean,stderr,extra_json";

void write_records_csv(std::ostream& out, const std::vector<ExperimentRecord>& records);
/// Throws std::runtime_error on malformed input.
std::vector<ExperimentRecord> read_records_csv(std::istream& in);

/// Fits `metric` against sweep_value over the uncensored records. Throws
/// ConfigError if the records come from different specs and
/// std::invalid_argument if fewer than three points remain.
FitResult fit(const std::vector<ExperimentRecord>& records, FitModel model,
              std::string_view metric = "mean");

struct WorkloadFit {
  std::string metric;
  double expected_exponent = 0.0;
  FitResult fit;
};

/// Power-law fits of the workload metrics against the swept variable:
/// for S, relaxations per call (expect 4), per unit distance (3) and
/// visits per unit distance (0); for alpha, relaxations per unit distance
/// (2) and visits per unit distance (0.5).
std::vector<WorkloadFit> workload_report(const std::vector<ExperimentRecord>& records);

/// Sidecar document: effective spec, hash, version, timestamp, run notes.
nlohmann::json sidecar(const ExperimentSpec& spec, const std::vector<ExperimentRecord>& records);

/// `strategy,L,lambda,alpha,mean_gain,stderr_gain,mean_posterior_variance`
/// from UGS-family records.
void write_ugs_table(std::ostream& out, const std::vector<ExperimentRecord>& records);

std::string_view library_version();

}  // namespace mrm
