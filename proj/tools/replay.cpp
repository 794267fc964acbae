#include <fstream>
#include <ostream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "mrm/planning.hpp"
#include "sim.hpp"

namespace sim {
namespace {

using nlohmann::json;

struct TrialParams {
  mrm::RewardDistribution dist = mrm::RewardDistribution::constant(1.0);
  double lambda = 1.0;
  double alpha = 1.0;
  double length = 1.0;
};

json to_params(const mrm::ExperimentSpec& spec, const TrialParams& p) {
  return {{"family", mrm::to_string(spec.family)},
          {"dist", p.dist.to_string()},
          {"lambda", p.lambda},
          {"alpha", p.alpha},
          {"length", p.length},
          {"config_hash", mrm::config_hash(spec)}};
}

mrm::MarkedPointField trial_field(const TrialParams& p, std::uint64_t seed, std::uint64_t stream) {
  return mrm::MarkedPointField::generate(p.lambda, mrm::reachable_cone(p.length, p.alpha), p.dist,
                                         seed, stream);
}

mrm::ContinuousPlan trial_plan(const mrm::MarkedPointField& field, const TrialParams& p) {
  return mrm::optimal_plan(field, {}, p.length, p.alpha, mrm::ChainSolver::DominanceSweep);
}

}  // namespace

void dump_plans(std::ostream& out, const mrm::ExperimentSpec& input, std::uint32_t limit) {
  const mrm::ExperimentSpec spec = mrm::normalized(input);
  if (spec.family != mrm::ExperimentFamily::ContinuousMeanReward &&
      spec.family != mrm::ExperimentFamily::Agility) {
    throw mrm::ConfigError("plan dumps are available for cont-mean-reward and agility runs");
  }
  const bool sweep_alpha = spec.family == mrm::ExperimentFamily::Agility;
  for (double v : spec.sweep) {
    TrialParams p{mrm::RewardDistribution::parse(spec.dist), spec.lambda,
                  sweep_alpha ? v : spec.alpha, sweep_alpha ? spec.length : v};
    const std::uint32_t trials = std::min(limit, spec.trials);
    for (std::uint32_t t = 0; t < trials; ++t) {
      const auto plan = trial_plan(trial_field(p, spec.seed, t), p);
      mrm::WorkloadCounters counters;
      counters.dp_relaxations = plan.dp_relaxations;
      counters.planner_calls = 1;
      counters.targets_visited = plan.visited.size();
      counters.distance = p.length;
      out << mrm::plan_record(spec.seed, t, to_params(spec, p), plan, counters).dump() << '\n';
    }
  }
}

ReplayResult replay(const std::string& dump_line, const std::string& field_csv_path) {
  json rec;
  try {
    rec = json::parse(dump_line);
  } catch (const json::exception& e) {
    throw mrm::ConfigError(std::string("plan dump line is not JSON: ") + e.what());
  }
  TrialParams p;
  std::uint64_t seed = 0, stream = 0;
  json recorded_visited;
  double recorded_total = 0.0;
  try {
    const json& params = rec.at("params");
    p.dist = mrm::RewardDistribution::parse(params.at("dist").get<std::string>());
    p.lambda = params.at("lambda").get<double>();
    p.alpha = params.at("alpha").get<double>();
    p.length = params.at("length").get<double>();
    seed = rec.at("seed").get<std::uint64_t>();
    stream = rec.at("stream").get<std::uint64_t>();
    recorded_visited = rec.at("visited");
    recorded_total = rec.at("total_reward").get<double>();
  } catch (const json::exception& e) {
    throw mrm::ConfigError(std::string("plan dump line is missing fields: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw mrm::ConfigError(e.what());
  }

  const auto field = trial_field(p, seed, stream);
  const auto plan = trial_plan(field, p);
  if (!field_csv_path.empty()) {
    std::ofstream f(field_csv_path);
    if (!f) throw std::runtime_error("cannot write " + field_csv_path);
    mrm::write_field_csv(f, field);
  }
  json visited = json::array();
  for (const auto& t : plan.visited) visited.push_back({t.p1, t.p2, t.reward});
  ReplayResult r;
  r.reproduced = visited == recorded_visited && plan.total_reward == recorded_total;
  r.summary = json{{"seed", seed},
                   {"stream", stream},
                   {"targets", field.size()},
                   {"recorded_total_reward", recorded_total},
                   {"replayed_total_reward", plan.total_reward},
                   {"visited", plan.visited.size()},
                   {"reproduced", r.reproduced}}
                  .dump();
  return r;
}

}  // namespace sim
