#include "mrm/harness.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <istream>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>

#include "mrm/bayes.hpp"
#include "mrm/distribution.hpp"
#include "mrm/format.hpp"
#include "mrm/lattice.hpp"
#include "mrm/parallel.hpp"
#include "mrm/planning.hpp"
#include "mrm/poisson_field.hpp"

#ifndef MRM_VERSION_STRING
#define MRM_VERSION_STRING "unknown"
#endif

namespace mrm {

using json = nlohmann::json;

namespace {

constexpr std::pair<ExperimentFamily, std::string_view> kFamilies[] = {
    {ExperimentFamily::LatticeMeanReward, "lattice-mean-reward"},
    {ExperimentFamily::LatticeSensing, "lattice-sensing"},
    {ExperimentFamily::ContinuousMeanReward, "continuous-mean-reward"},
    {ExperimentFamily::ContinuousSensing, "continuous-sensing"},
    {ExperimentFamily::Agility, "agility"},
    {ExperimentFamily::Workload, "workload"},
    {ExperimentFamily::Ugs, "ugs"},
};

bool is_lattice(ExperimentFamily f) {
  return f == ExperimentFamily::LatticeMeanReward || f == ExperimentFamily::LatticeSensing;
}

std::vector<std::string_view> sweep_names(ExperimentFamily f) {
  switch (f) {
    case ExperimentFamily::LatticeMeanReward: return {"n"};
    case ExperimentFamily::LatticeSensing: return {"m"};
    case ExperimentFamily::ContinuousMeanReward: return {"L"};
    case ExperimentFamily::ContinuousSensing: return {"S"};
    case ExperimentFamily::Agility: return {"alpha"};
    case ExperimentFamily::Workload: return {"S", "alpha"};
    case ExperimentFamily::Ugs: return {"L"};
  }
  return {};
}

std::vector<double> default_sweep(ExperimentFamily f, std::string_view name) {
  switch (f) {
    case ExperimentFamily::LatticeMeanReward: return {100, 300, 1000};
    case ExperimentFamily::LatticeSensing: return {4, 6, 8, 10, 12, 14, 16};
    case ExperimentFamily::ContinuousMeanReward: return {20, 50, 100, 200};
    case ExperimentFamily::ContinuousSensing: return {2, 4, 6, 8, 10};
    case ExperimentFamily::Agility: return {0.25, 0.5, 1, 2, 4};
    case ExperimentFamily::Workload:
      if (name == "alpha") return {0.25, 0.5, 1, 2, 4};
      return {4, 8, 16, 32};
    case ExperimentFamily::Ugs: return {100};
  }
  return {};
}

[[noreturn]] void config_error(const std::string& what) { throw ConfigError(what); }

void require(bool ok, const std::string& what) {
  if (!ok) config_error(what);
}

RewardDistribution parse_dist(const std::string& text) {
  try {
    return RewardDistribution::parse(text);
  } catch (const std::invalid_argument& e) {
    config_error(e.what());
  }
}

// ---- stopping baselines -------------------------------------------------

enum class BaselineMode { ClosedForm, Empirical, Power };

struct BaselinePlan {
  BaselineMode mode = BaselineMode::ClosedForm;
  double power = 1.0;
};

std::optional<double> continuous_closed_form(const RewardDistribution& dist, double lambda,
                                             double alpha) {
  // Unit-reward chains: sqrt(2 lambda) at alpha = 1, and the agility
  // mapping turns (lambda, alpha) into (alpha lambda, 1).
  if (const auto* c = std::get_if<ConstantReward>(&dist.params())) {
    return c->value * std::sqrt(2.0 * lambda * alpha);
  }
  return std::nullopt;
}

BaselinePlan plan_baseline(const ExperimentSpec& spec, const RewardDistribution& dist) {
  const bool lattice = spec.family == ExperimentFamily::LatticeSensing;
  const bool has_closed_form =
      lattice ? r_star_closed_form(dist).has_value()
              : continuous_closed_form(dist, spec.lambda, spec.alpha).has_value();
  const bool heavy = dist.tail_class() == TailClass::HeavyTailed;
  const std::string& b = spec.baseline;
  BaselinePlan plan;
  if (b.rfind("power:", 0) == 0) {
    const std::string p = b.substr(6);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(p.data(), p.data() + p.size(), value);
    require(ec == std::errc{} && ptr == p.data() + p.size() && value > 0.0 && std::isfinite(value),
            "baseline power must be a positive number, got '" + p + "'");
    plan.mode = BaselineMode::Power;
    plan.power = value;
    return plan;
  }
  if (heavy) {
    config_error("heavy-tailed rewards (" + spec.dist +
                 ") have an infinite asymptotic mean reward, so the stopping rule would fire "
                 "immediately; use the finite-horizon variant baseline=power:1.1");
  }
  if (b == "closed-form" || (b == "auto" && has_closed_form)) {
    require(has_closed_form, "no closed-form mean reward is known for " + spec.dist +
                                 "; use baseline=empirical");
    plan.mode = BaselineMode::ClosedForm;
    return plan;
  }
  require(b == "auto" || b == "empirical",
          "baseline must be auto, closed-form, empirical or power:<p>, got '" + b + "'");
  plan.mode = BaselineMode::Empirical;
  return plan;
}

class BaselineCache {
 public:
  static BaselineCache& instance() {
    static BaselineCache cache;
    return cache;
  }

  void load(const std::string& path) {
    if (path.empty()) return;
    std::ifstream in(path);
    if (!in) return;
    json j;
    try {
      in >> j;
    } catch (const json::exception&) {
      return;  // unreadable caches are rebuilt
    }
    std::lock_guard lock(mutex_);
    for (const auto& [k, v] : j.items()) {
      if (v.is_number()) values_.emplace(k, v.get<double>());
    }
  }

  void save(const std::string& path) const {
    if (path.empty()) return;
    std::lock_guard lock(mutex_);
    json j = json::object();
    for (const auto& [k, v] : values_) j[k] = v;
    std::ofstream(path) << j.dump(1) << '\n';
  }

  template <class Compute>
  double get(const std::string& key, Compute&& compute) {
    {
      std::lock_guard lock(mutex_);
      if (auto it = values_.find(key); it != values_.end()) return it->second;
    }
    const double v = compute();
    std::lock_guard lock(mutex_);
    values_.emplace(key, v);
    return v;
  }

 private:
  mutable std::mutex mutex_;
  std::map<std::string, double> values_;
};

std::uint64_t baseline_seed(std::uint64_t seed) { return mix64(seed ^ 0xBA5E11E5EEDULL); }

std::uint32_t baseline_trials(const ExperimentSpec& spec, BaselineMode mode) {
  if (spec.baseline_trials > 0) return spec.baseline_trials;
  return mode == BaselineMode::Power ? 1000 : 2000;
}

double lattice_baseline(const ExperimentSpec& spec, const RewardDistribution& dist,
                        const BaselinePlan& plan, std::uint32_t m) {
  if (plan.mode == BaselineMode::ClosedForm) return *r_star_closed_form(dist);
  const std::uint32_t n =
      plan.mode == BaselineMode::Power
          ? static_cast<std::uint32_t>(std::ceil(std::pow(static_cast<double>(m), plan.power)))
          : spec.baseline_n;
  const std::uint32_t trials = baseline_trials(spec, plan.mode);
  const std::string key = "lattice|" + dist.to_string() + "|n=" + std::to_string(n) +
                          "|trials=" + std::to_string(trials) +
                          "|seed=" + std::to_string(spec.seed);
  return BaselineCache::instance().get(key, [&] {
    return estimate_r_star(dist, n, trials, baseline_seed(spec.seed), spec.parallelism).mean;
  });
}

double continuous_baseline(const ExperimentSpec& spec, const RewardDistribution& dist,
                           const BaselinePlan& plan, double s) {
  if (plan.mode == BaselineMode::ClosedForm) {
    return *continuous_closed_form(dist, spec.lambda, spec.alpha);
  }
  const double length =
      plan.mode == BaselineMode::Power ? std::pow(s, plan.power) : spec.baseline_length;
  const std::uint32_t trials = std::max<std::uint32_t>(2, baseline_trials(spec, plan.mode));
  const std::string key = "continuous|" + dist.to_string() +
                          "|lambda=" + format_double(spec.lambda) +
                          "|alpha=" + format_double(spec.alpha) +
                          "|L=" + format_double(length) + "|trials=" + std::to_string(trials) +
                          "|seed=" + std::to_string(spec.seed);
  return BaselineCache::instance().get(key, [&] {
    return estimate_continuous_r_star(spec.lambda, dist, spec.alpha, length, trials,
                                      baseline_seed(spec.seed), spec.parallelism)
        .mean;
  });
}

std::string baseline_label(const BaselinePlan& plan) {
  switch (plan.mode) {
    case BaselineMode::ClosedForm: return "closed-form";
    case BaselineMode::Empirical: return "empirical";
    case BaselineMode::Power: return "power:" + format_double(plan.power);
  }
  return "";
}

// ---- record assembly -----------------------------------------------------

struct RecordBase {
  const ExperimentSpec& spec;
  std::string hash;

  ExperimentRecord make(double sweep_value, const Estimate& e, json extra) const {
    ExperimentRecord r;
    r.family = std::string(to_string(spec.family));
    r.dist = spec.dist;
    if (!is_lattice(spec.family)) {
      r.lambda = spec.lambda;
      r.alpha = spec.sweep_name == "alpha" ? sweep_value : spec.alpha;
    }
    r.sweep_name = spec.sweep_name;
    r.sweep_value = sweep_value;
    r.trials = spec.trials;
    r.mean = e.mean;
    r.std_err = e.std_err;
    extra["config_hash"] = hash;
    if (!extra.contains("censored")) extra["censored"] = false;
    r.extra = std::move(extra);
    return r;
  }
};

void report(const ProgressFn& progress, const ExperimentSpec& spec, std::size_t i,
            double value) {
  if (!progress) return;
  progress(std::string(to_string(spec.family)) + ": " + spec.sweep_name + "=" +
           format_double(value) + " done (" + std::to_string(i + 1) + "/" +
           std::to_string(spec.sweep.size()) + ")");
}

std::vector<ExperimentRecord> run_lattice_mean_reward(const ExperimentSpec& spec,
                                                      const RecordBase& base,
                                                      const ProgressFn& progress) {
  const RewardDistribution dist = parse_dist(spec.dist);
  std::vector<std::uint32_t> ns;
  for (double v : spec.sweep) ns.push_back(static_cast<std::uint32_t>(v));
  // One wedge sweep per trial serves every n (common random numbers).
  const auto totals = parallel_map(spec.trials, spec.parallelism, [&](std::size_t t) {
    return optimal_totals_at(LazyLatticeRewards(dist, spec.seed, t), ns);
  });
  const auto closed = r_star_closed_form(dist);
  std::vector<ExperimentRecord> out;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    std::vector<double> r(totals.size());
    for (std::size_t t = 0; t < totals.size(); ++t) r[t] = totals[t][i] / ns[i];
    json extra = {{"tail_class", dist.tail_class() == TailClass::HeavyTailed ? "heavy" : "light"}};
    if (closed) extra["r_star_closed_form"] = *closed;
    out.push_back(base.make(spec.sweep[i], estimate_mean(r), std::move(extra)));
    report(progress, spec, i, spec.sweep[i]);
  }
  return out;
}

std::vector<ExperimentRecord> run_lattice_sensing(const ExperimentSpec& spec,
                                                  const RecordBase& base,
                                                  const ProgressFn& progress) {
  const RewardDistribution dist = parse_dist(spec.dist);
  const BaselinePlan plan = plan_baseline(spec, dist);
  std::vector<ExperimentRecord> out;
  for (std::size_t i = 0; i < spec.sweep.size(); ++i) {
    const auto m = static_cast<std::uint32_t>(spec.sweep[i]);
    const StoppingRule rule{spec.delta, lattice_baseline(spec, dist, plan, m), spec.max_steps};
    const auto outcomes = parallel_map(spec.trials, spec.parallelism, [&](std::size_t t) {
      return run_until_suboptimal(dist, m, rule, spec.seed, t);
    });
    std::vector<double> d;
    std::uint64_t capped = 0;
    for (const auto& o : outcomes) {
      d.push_back(static_cast<double>(o.distance));
      capped += o.capped ? 1 : 0;
    }
    json extra = {{"baseline", rule.baseline},
                  {"baseline_mode", baseline_label(plan)},
                  {"delta", spec.delta},
                  {"max_steps", spec.max_steps},
                  {"capped_trials", capped},
                  {"censored", capped > 0}};
    out.push_back(base.make(spec.sweep[i], estimate_mean(d), std::move(extra)));
    report(progress, spec, i, spec.sweep[i]);
  }
  return out;
}

std::vector<ExperimentRecord> run_continuous_mean_reward(const ExperimentSpec& spec,
                                                         const RecordBase& base,
                                                         const ProgressFn& progress) {
  const RewardDistribution dist = parse_dist(spec.dist);
  const bool sweep_alpha = spec.family == ExperimentFamily::Agility;
  std::vector<ExperimentRecord> out;
  for (std::size_t i = 0; i < spec.sweep.size(); ++i) {
    const double length = sweep_alpha ? spec.length : spec.sweep[i];
    const double alpha = sweep_alpha ? spec.sweep[i] : spec.alpha;
    struct Trial {
      double rate = 0.0;
      double visits = 0.0;
    };
    const auto trials = parallel_map(spec.trials, spec.parallelism, [&](std::size_t t) {
      const auto field = MarkedPointField::generate(spec.lambda, reachable_cone(length, alpha),
                                                    dist, spec.seed, t);
      const auto plan =
          optimal_plan(field, RobotState{}, length, alpha, ChainSolver::DominanceSweep);
      return Trial{plan.total_reward / length,
                   static_cast<double>(plan.visited.size()) / length};
    });
    std::vector<double> rate, visits;
    for (const auto& t : trials) {
      rate.push_back(t.rate);
      visits.push_back(t.visits);
    }
    json extra = {{"length", length}, {"visits_per_distance", estimate_mean(visits).mean}};
    if (const auto c = continuous_closed_form(dist, spec.lambda, alpha)) {
      extra["r_star_closed_form"] = *c;
    }
    out.push_back(base.make(spec.sweep[i], estimate_mean(rate), std::move(extra)));
    report(progress, spec, i, spec.sweep[i]);
  }
  return out;
}

std::vector<ExperimentRecord> run_continuous_sensing(const ExperimentSpec& spec,
                                                     const RecordBase& base,
                                                     const ProgressFn& progress) {
  const RewardDistribution dist = parse_dist(spec.dist);
  const BaselinePlan plan = plan_baseline(spec, dist);
  std::vector<ExperimentRecord> out;
  for (std::size_t i = 0; i < spec.sweep.size(); ++i) {
    const double s = spec.sweep[i];
    const ContinuousStoppingRule rule{spec.delta, continuous_baseline(spec, dist, plan, s),
                                      spec.max_length};
    const auto outcomes = parallel_map(spec.trials, spec.parallelism, [&](std::size_t t) {
      return run_receding_until_suboptimal(spec.lambda, dist, spec.alpha, s, rule, spec.seed, t);
    });
    std::vector<double> d;
    std::uint64_t capped = 0;
    for (const auto& o : outcomes) {
      d.push_back(o.distance);
      capped += o.capped ? 1 : 0;
    }
    json extra = {{"baseline", rule.baseline},
                  {"baseline_mode", baseline_label(plan)},
                  {"delta", spec.delta},
                  {"max_length", spec.max_length},
                  {"capped_trials", capped},
                  {"censored", capped > 0}};
    out.push_back(base.make(s, estimate_mean(d), std::move(extra)));
    report(progress, spec, i, s);
  }
  return out;
}

std::vector<ExperimentRecord> run_workload(const ExperimentSpec& spec, const RecordBase& base,
                                           const ProgressFn& progress) {
  const RewardDistribution dist = parse_dist(spec.dist);
  const bool sweep_alpha = spec.sweep_name == "alpha";
  std::vector<ExperimentRecord> out;
  for (std::size_t i = 0; i < spec.sweep.size(); ++i) {
    const double s = sweep_alpha ? spec.sensing_range : spec.sweep[i];
    const double alpha = sweep_alpha ? spec.sweep[i] : spec.alpha;
    // Whole strips only, so every planner call sees a full window.
    const double mission = std::ceil(spec.length / s) * s;
    struct Trial {
      double per_call = 0.0;
      double per_distance = 0.0;
      double visits = 0.0;
      double candidates = 0.0;
    };
    const auto trials = parallel_map(spec.trials, spec.parallelism, [&](std::size_t t) {
      const StripwiseField field(spec.lambda, dist, spec.seed, t, s, std::max(alpha * s, s));
      const auto r =
          receding_horizon_plan(field, RobotState{}, mission, s, alpha, ChainSolver::PairScan);
      const auto calls = static_cast<double>(r.counters.planner_calls);
      return Trial{static_cast<double>(r.counters.dp_relaxations) / calls,
                   static_cast<double>(r.counters.dp_relaxations) / mission,
                   static_cast<double>(r.counters.targets_visited) / mission,
                   static_cast<double>(r.counters.candidates) / calls};
    });
    std::vector<double> per_call, per_distance, visits, candidates;
    for (const auto& t : trials) {
      per_call.push_back(t.per_call);
      per_distance.push_back(t.per_distance);
      visits.push_back(t.visits);
      candidates.push_back(t.candidates);
    }
    const Estimate pc = estimate_mean(per_call);
    const Estimate pd = estimate_mean(per_distance);
    const Estimate vi = estimate_mean(visits);
    const Estimate ca = estimate_mean(candidates);
    json extra = {{"sensing_range", s},
                  {"mission_length", mission},
                  {"relaxations_per_call", pc.mean},
                  {"relaxations_per_call_stderr", pc.std_err},
                  {"relaxations_per_distance", pd.mean},
                  {"visits_per_distance", vi.mean},
                  {"visits_per_distance_stderr", vi.std_err},
                  {"candidates_per_call", ca.mean},
                  {"candidates_per_call_stderr", ca.std_err}};
    out.push_back(base.make(spec.sweep[i], pd, std::move(extra)));
    report(progress, spec, i, spec.sweep[i]);
  }
  return out;
}

std::vector<ExperimentRecord> run_ugs(const ExperimentSpec& spec, const RecordBase& base,
                                      const ProgressFn& progress) {
  std::vector<ExperimentRecord> out;
  for (std::size_t i = 0; i < spec.sweep.size(); ++i) {
    const double length = spec.sweep[i];
    const UgsComparison cmp =
        compare_ugs_strategies(spec.lambda, spec.mean_precision, length, spec.alpha, spec.trials,
                               spec.seed, spec.parallelism, spec.prior_precision);
    const std::string marks[] = {
        RewardDistribution::constant(spec.mean_precision).to_string(),
        RewardDistribution::exponential(1.0 / spec.mean_precision).to_string()};
    int k = 0;
    for (const auto* summary : {&cmp.homogeneous, &cmp.randomized}) {
      for (std::size_t c = 0; c < summary->checkpoints.size(); ++c) {
        const auto& cp = summary->checkpoints[c];
        json extra = {{"strategy", to_string(summary->strategy)},
                      {"mission_length", length},
                      {"mean_posterior_variance", cp.mean_posterior_variance},
                      {"mean_precision", spec.mean_precision},
                      {"prior_precision", spec.prior_precision}};
        if (c + 1 == summary->checkpoints.size()) {
          extra["paired_gap"] = cmp.paired_gap.mean;
          extra["paired_gap_stderr"] = cmp.paired_gap.std_err;
        }
        ExperimentRecord r = base.make(cp.distance, cp.gain_per_distance, std::move(extra));
        r.dist = marks[k];
        out.push_back(std::move(r));
      }
      ++k;
    }
    report(progress, spec, i, length);
  }
  return out;
}

// ---- CSV -------------------------------------------------------------------

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  q += '"';
  return q;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (quoted) throw std::runtime_error("unterminated quoted CSV field");
  fields.push_back(std::move(cur));
  return fields;
}

double parse_number(const std::string& s) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last) throw std::runtime_error("bad number '" + s + "'");
  return v;
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

json full_json(const ExperimentSpec& spec) {
  json j = to_json(spec);
  j["parallelism"] = spec.parallelism;
  j["baseline_cache"] = spec.baseline_cache;
  return j;
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

std::string_view to_string(ExperimentFamily family) {
  for (const auto& [f, name] : kFamilies) {
    if (f == family) return name;
  }
  return "unknown";
}

ExperimentFamily parse_family(std::string_view name) {
  for (const auto& [f, n] : kFamilies) {
    if (n == name) return f;
  }
  config_error("unknown experiment family '" + std::string(name) + "'");
}

ExperimentSpec normalized(ExperimentSpec spec) {
  const auto names = sweep_names(spec.family);
  if (spec.sweep_name.empty()) spec.sweep_name = std::string(names.front());
  require(std::find(names.begin(), names.end(), spec.sweep_name) != names.end(),
          "family " + std::string(to_string(spec.family)) + " cannot sweep '" +
              spec.sweep_name + "'");
  if (spec.sweep.empty()) spec.sweep = default_sweep(spec.family, spec.sweep_name);

  const RewardDistribution dist = parse_dist(spec.dist);
  spec.dist = dist.to_string();
  require(spec.trials >= 1, "trials must be >= 1");
  require(spec.family != ExperimentFamily::Ugs || spec.trials >= 2,
          "the ugs family needs trials >= 2");
  auto positive = [](double x) { return std::isfinite(x) && x > 0.0; };
  require(positive(spec.delta), "delta must be > 0");
  require(positive(spec.lambda), "lambda must be > 0");
  require(positive(spec.alpha), "alpha must be > 0");
  require(positive(spec.length), "length must be > 0");
  require(positive(spec.sensing_range), "sensing_range must be > 0");
  require(spec.max_steps >= 1, "max_steps must be >= 1");
  require(positive(spec.max_length), "max_length must be > 0");
  require(spec.baseline_n >= 1, "baseline_n must be >= 1");
  require(spec.baseline_trials != 1, "baseline_trials must be 0 (default) or >= 2");
  require(positive(spec.baseline_length), "baseline_length must be > 0");
  require(positive(spec.mean_precision), "mean_precision must be > 0");
  require(positive(spec.prior_precision), "prior_precision must be > 0");
  require(spec.parallelism >= 1, "parallelism must be >= 1");
  for (std::size_t i = 0; i < spec.sweep.size(); ++i) {
    const double v = spec.sweep[i];
    require(positive(v), "sweep values must be finite and > 0");
    require(i == 0 || spec.sweep[i - 1] < v, "sweep values must be strictly ascending");
    if (is_lattice(spec.family)) {
      require(v == std::floor(v) && v <= 1e6, "lattice sweep values must be integers <= 1e6");
    }
  }
  if (spec.family == ExperimentFamily::LatticeSensing ||
      spec.family == ExperimentFamily::ContinuousSensing) {
    plan_baseline(spec, dist);
  }
  return spec;
}

json to_json(const ExperimentSpec& spec) {
  return json{{"family", to_string(spec.family)},
              {"dist", spec.dist},
              {"sweep_name", spec.sweep_name},
              {"sweep", spec.sweep},
              {"trials", spec.trials},
              {"delta", spec.delta},
              {"seed", spec.seed},
              {"lambda", spec.lambda},
              {"alpha", spec.alpha},
              {"length", spec.length},
              {"sensing_range", spec.sensing_range},
              {"max_steps", spec.max_steps},
              {"max_length", spec.max_length},
              {"baseline", spec.baseline},
              {"baseline_trials", spec.baseline_trials},
              {"baseline_n", spec.baseline_n},
              {"baseline_length", spec.baseline_length},
              {"mean_precision", spec.mean_precision},
              {"prior_precision", spec.prior_precision}};
}

ExperimentSpec spec_from_json(const json& j) {
  require(j.is_object(), "experiment config must be a JSON object");
  ExperimentSpec s;
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "family") s.family = parse_family(v.get<std::string>());
      else if (key == "dist") s.dist = v.get<std::string>();
      else if (key == "sweep_name") s.sweep_name = v.get<std::string>();
      else if (key == "sweep") s.sweep = v.get<std::vector<double>>();
      else if (key == "trials") s.trials = v.get<std::uint32_t>();
      else if (key == "delta") s.delta = v.get<double>();
      else if (key == "seed") s.seed = v.get<std::uint64_t>();
      else if (key == "lambda") s.lambda = v.get<double>();
      else if (key == "alpha") s.alpha = v.get<double>();
      else if (key == "length") s.length = v.get<double>();
      else if (key == "sensing_range") s.sensing_range = v.get<double>();
      else if (key == "max_steps") s.max_steps = v.get<std::uint64_t>();
      else if (key == "max_length") s.max_length = v.get<double>();
      else if (key == "baseline") s.baseline = v.get<std::string>();
      else if (key == "baseline_trials") s.baseline_trials = v.get<std::uint32_t>();
      else if (key == "baseline_n") s.baseline_n = v.get<std::uint32_t>();
      else if (key == "baseline_length") s.baseline_length = v.get<double>();
      else if (key == "mean_precision") s.mean_precision = v.get<double>();
      else if (key == "prior_precision") s.prior_precision = v.get<double>();
      else if (key == "parallelism") s.parallelism = v.get<unsigned>();
      else if (key == "baseline_cache") s.baseline_cache = v.get<std::string>();
      else config_error("unknown config key '" + key + "'");
    }
  } catch (const json::exception& e) {
    config_error(std::string("config type error: ") + e.what());
  }
  return s;
}

void apply_override(ExperimentSpec& spec, std::string_view assignment) {
  const auto eq = assignment.find('=');
  require(eq != std::string_view::npos && eq > 0,
          "override must look like key=value, got '" + std::string(assignment) + "'");
  const std::string key(assignment.substr(0, eq));
  const std::string value(assignment.substr(eq + 1));
  json j = full_json(spec);
  require(j.contains(key), "unknown config key '" + key + "'");
  json& slot = j[key];
  try {
    if (slot.is_string()) {
      slot = value;
    } else if (slot.is_array()) {
      json list = json::array();
      std::stringstream ss(value);
      std::string item;
      while (std::getline(ss, item, ',')) list.push_back(parse_number(item));
      slot = list;
    } else if (slot.is_number_unsigned() || slot.is_number_integer()) {
      std::uint64_t v = 0;
      const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
      require(ec == std::errc{} && ptr == value.data() + value.size(),
              key + " must be a non-negative integer, got '" + value + "'");
      slot = v;
    } else {
      slot = parse_number(value);
    }
  } catch (const std::runtime_error& e) {
    config_error(key + ": " + e.what());
  }
  spec = spec_from_json(j);
}

std::string config_hash(const ExperimentSpec& spec) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a(to_json(spec).dump())));
  return buf;
}

std::string ExperimentRecord::config_hash() const {
  return extra.value("config_hash", std::string());
}

bool ExperimentRecord::censored() const { return extra.value("censored", false); }

double ExperimentRecord::metric(std::string_view name) const {
  if (name == "mean") return mean;
  const auto it = extra.find(std::string(name));
  if (it == extra.end() || !it->is_number()) {
    throw std::out_of_range("record has no numeric metric '" + std::string(name) + "'");
  }
  return it->get<double>();
}

std::vector<ExperimentRecord> run(const ExperimentSpec& input, const ProgressFn& progress) {
  const ExperimentSpec spec = normalized(input);
  BaselineCache::instance().load(spec.baseline_cache);
  const RecordBase base{spec, config_hash(spec)};
  std::vector<ExperimentRecord> out;
  switch (spec.family) {
    case ExperimentFamily::LatticeMeanReward:
      out = run_lattice_mean_reward(spec, base, progress);
      break;
    case ExperimentFamily::LatticeSensing:
      out = run_lattice_sensing(spec, base, progress);
      break;
    case ExperimentFamily::ContinuousMeanReward:
    case ExperimentFamily::Agility:
      out = run_continuous_mean_reward(spec, base, progress);
      break;
    case ExperimentFamily::ContinuousSensing:
      out = run_continuous_sensing(spec, base, progress);
      break;
    case ExperimentFamily::Workload:
      out = run_workload(spec, base, progress);
      break;
    case ExperimentFamily::Ugs:
      out = run_ugs(spec, base, progress);
      break;
  }
  BaselineCache::instance().save(spec.baseline_cache);
  return out;
}

void write_records_csv(std::ostream& out, const std::vector<ExperimentRecord>& records) {
  out << kRecordHeader << '\n';
  auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
  for (const auto& r : records) {
    out << csv_field(r.family) << ',' << csv_field(r.dist) << ',' << opt(r.lambda) << ','
        << opt(r.alpha) << ',' << csv_field(r.sweep_name) << ',' << format_double(r.sweep_value)
        << ',' << r.trials << ',' << format_double(r.mean) << ',' << format_double(r.std_err)
        << ',' << csv_field(r.extra.dump()) << '\n';
  }
}

std::vector<ExperimentRecord> read_records_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kRecordHeader) {
    throw std::runtime_error("missing or unexpected experiment CSV header");
  }
  std::vector<ExperimentRecord> out;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    try {
      const auto f = split_csv_line(line);
      if (f.size() != 10) throw std::runtime_error("expected 10 fields");
      ExperimentRecord r;
      r.family = f[0];
      r.dist = f[1];
      if (!f[2].empty()) r.lambda = parse_number(f[2]);
      if (!f[3].empty()) r.alpha = parse_number(f[3]);
      r.sweep_name = f[4];
      r.sweep_value = parse_number(f[5]);
      r.trials = static_cast<std::uint32_t>(parse_number(f[6]));
      r.mean = parse_number(f[7]);
      r.std_err = parse_number(f[8]);
      r.extra = json::parse(f[9]);
      out.push_back(std::move(r));
    } catch (const std::exception& e) {
      throw std::runtime_error("experiment CSV row " + std::to_string(row) + ": " + e.what());
    }
  }
  return out;
}

FitResult fit(const std::vector<ExperimentRecord>& records, FitModel model,
              std::string_view metric) {
  if (!records.empty()) {
    const std::string hash = records.front().config_hash();
    for (const auto& r : records) {
      if (r.config_hash() != hash || r.sweep_name != records.front().sweep_name) {
        throw ConfigError("refusing to aggregate records from different experiment specs");
      }
    }
  }
  std::vector<double> x, y;
  for (const auto& r : records) {
    if (r.censored()) continue;
    x.push_back(r.sweep_value);
    y.push_back(r.metric(metric));
  }
  return fit(x, y, model);
}

std::vector<WorkloadFit> workload_report(const std::vector<ExperimentRecord>& records) {
  if (records.empty()) throw std::invalid_argument("workload report needs records");
  for (const auto& r : records) {
    if (r.family != to_string(ExperimentFamily::Workload)) {
      throw std::invalid_argument("workload report needs workload-family records");
    }
  }
  const bool over_alpha = records.front().sweep_name == "alpha";
  const std::vector<std::pair<std::string, double>> metrics =
      over_alpha ? std::vector<std::pair<std::string, double>>{{"relaxations_per_call", 2.0},
                                                               {"relaxations_per_distance", 2.0},
                                                               {"visits_per_distance", 0.5}}
                 : std::vector<std::pair<std::string, double>>{{"relaxations_per_call", 4.0},
                                                               {"relaxations_per_distance", 3.0},
                                                               {"visits_per_distance", 0.0}};
  std::vector<WorkloadFit> out;
  for (const auto& [metric, expected] : metrics) {
    out.push_back({metric, expected, fit(records, FitModel::PowerLaw, metric)});
  }
  return out;
}

json sidecar(const ExperimentSpec& input, const std::vector<ExperimentRecord>& records) {
  const ExperimentSpec spec = normalized(input);
  json notes = {
      {"lattice_path_length", "n counts the vertices a path crosses, origin included"},
      {"lattice_leg_rewards", "every limited-sensing leg collects m rewards; leg 1 starts at "
                              "the origin"},
      {"continuous_exit_state", "x2 is held at the last visited target's p2 until the strip "
                                "boundary"},
      {"time_unit", "v = 1, so distance along x1 is time"},
  };
  if (std::holds_alternative<BernoulliReward>(parse_dist(spec.dist).params())) {
    notes["bernoulli_rewards"] = "success reward 1, failure reward 0";
  }
  if (spec.family == ExperimentFamily::LatticeSensing) notes["cap"] = spec.max_steps;
  if (spec.family == ExperimentFamily::ContinuousSensing) notes["cap"] = spec.max_length;
  return json{{"spec", full_json(spec)},
              {"config_hash", config_hash(spec)},
              {"version", library_version()},
              {"created_utc", utc_timestamp()},
              {"records", records.size()},
              {"csv_header", kRecordHeader},
              {"notes", notes}};
}

void write_ugs_table(std::ostream& out, const std::vector<ExperimentRecord>& records) {
  out << "strategy,L,lambda,alpha,mean_gain,stderr_gain,mean_posterior_variance\n";
  for (const auto& r : records) {
    if (r.family != to_string(ExperimentFamily::Ugs)) continue;
    out << r.extra.at("strategy").get<std::string>() << ',' << format_double(r.sweep_value)
        << ',' << format_double(r.lambda.value_or(0.0)) << ','
        << format_double(r.alpha.value_or(0.0)) << ',' << format_double(r.mean) << ','
        << format_double(r.std_err) << ','
        << format_double(r.extra.at("mean_posterior_variance").get<double>()) << '\n';
  }
}

std::string_view library_version() { return MRM_VERSION_STRING; }

}  // namespace mrm
