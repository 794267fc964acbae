#include "mrm/poisson_field.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <nlohmann/json.hpp>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "mrm/format.hpp"

namespace mrm {

namespace {

constexpr std::uint64_t kPositionTag = 1;
constexpr std::uint64_t kMarkTag = 2;

bool by_p1(const Target& a, const Target& b) { return a.p1 < b.p1; }

std::pair<double, double> draw_position(const Region& region, SeededRng& rng) {
  if (const auto* cone = std::get_if<ConeRegion>(&region)) {
    // Density of p1 on the triangle grows linearly: p1 = L sqrt(U).
    const double p1 = cone->length * std::sqrt(rng.uniform());
    const double p2 = cone->apex_p2 + (2.0 * rng.uniform() - 1.0) * cone->slope * p1;
    return {p1, p2};
  }
  const auto& strip = std::get<StripRegion>(region);
  const double p1 = strip.length * rng.uniform();
  const double p2 = (2.0 * rng.uniform() - 1.0) * strip.half_width;
  return {p1, p2};
}

nlohmann::json region_to_json(const Region& region) {
  if (const auto* cone = std::get_if<ConeRegion>(&region)) {
    return {{"kind", "cone"}, {"length", cone->length}, {"slope", cone->slope},
            {"apex_p2", cone->apex_p2}};
  }
  const auto& strip = std::get<StripRegion>(region);
  return {{"kind", "strip"}, {"length", strip.length}, {"half_width", strip.half_width}};
}

Region region_from_json(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "cone") {
    return ConeRegion{j.at("length").get<double>(), j.at("slope").get<double>(),
                      j.at("apex_p2").get<double>()};
  }
  if (kind == "strip") {
    return StripRegion{j.at("length").get<double>(), j.at("half_width").get<double>()};
  }
  throw std::runtime_error("unknown region kind '" + kind + "'");
}

double parse_csv_double(const std::string& text) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw std::runtime_error("bad number '" + text + "'");
  }
  return v;
}

}  // namespace

RobotConfig::RobotConfig(double speed, double lateral_speed, double sensing_range)
    : speed_(speed), lateral_speed_(lateral_speed), sensing_range_(sensing_range) {
  if (!(speed > 0.0) || !(lateral_speed > 0.0) || !(sensing_range > 0.0)) {
    throw std::invalid_argument("robot speed, lateral speed and sensing range must be > 0");
  }
}

double area(const Region& region) noexcept {
  if (const auto* cone = std::get_if<ConeRegion>(&region)) {
    return cone->slope * cone->length * cone->length;
  }
  const auto& strip = std::get<StripRegion>(region);
  return 2.0 * strip.half_width * strip.length;
}

bool contains(const Region& region, double p1, double p2) noexcept {
  if (const auto* cone = std::get_if<ConeRegion>(&region)) {
    return p1 >= 0.0 && p1 <= cone->length && std::fabs(p2 - cone->apex_p2) <= cone->slope * p1;
  }
  const auto& strip = std::get<StripRegion>(region);
  return p1 >= 0.0 && p1 <= strip.length && std::fabs(p2) <= strip.half_width;
}

MarkedPointField MarkedPointField::generate(double lambda, const Region& region,
                                            const RewardDistribution& dist, std::uint64_t seed,
                                            std::uint64_t stream) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("Poisson intensity must be finite and > 0");
  }
  const double a = area(region);
  if (!std::isfinite(a) || a < 0.0) throw std::invalid_argument("region area must be finite");

  MarkedPointField field(lambda, region, dist);
  field.seed_ = seed;
  field.stream_ = stream;
  if (a == 0.0) return field;

  SeededRng positions(seed, derive_stream(stream, kPositionTag));
  const std::uint64_t count = positions.poisson(lambda * a);
  field.targets_.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    const auto [p1, p2] = draw_position(region, positions);
    field.targets_.push_back({p1, p2, 0.0});
  }
  std::sort(field.targets_.begin(), field.targets_.end(), by_p1);
  for (;;) {
    const auto dup = std::adjacent_find(field.targets_.begin(), field.targets_.end(),
                                        [](const Target& x, const Target& y) { return x.p1 == y.p1; });
    if (dup == field.targets_.end()) break;
    const auto [p1, p2] = draw_position(region, positions);
    *std::next(dup) = {p1, p2, 0.0};
    ++field.redraws_;
    std::sort(field.targets_.begin(), field.targets_.end(), by_p1);
  }

  SeededRng marks(seed, derive_stream(stream, kMarkTag));
  for (auto& t : field.targets_) t.reward = dist.sample(marks);
  return field;
}

MarkedPointField MarkedPointField::from_targets(std::vector<Target> targets, double lambda,
                                                const Region& region,
                                                const RewardDistribution& dist,
                                                std::uint64_t seed, std::uint64_t stream) {
  MarkedPointField field(lambda, region, dist);
  field.seed_ = seed;
  field.stream_ = stream;
  std::sort(targets.begin(), targets.end(), by_p1);
  for (std::size_t i = 0; i < targets.size(); ++i) {
    if (!(targets[i].reward >= 0.0)) throw std::invalid_argument("target rewards must be >= 0");
    if (i > 0 && targets[i].p1 == targets[i - 1].p1) {
      throw std::invalid_argument("targets must have distinct p1");
    }
  }
  field.targets_ = std::move(targets);
  return field;
}

std::vector<Target> MarkedPointField::targets_in(double p1_lo, double p1_hi, double p2_lo,
                                                 double p2_hi) const {
  const auto first = std::upper_bound(targets_.begin(), targets_.end(), p1_lo,
                                      [](double x, const Target& t) { return x < t.p1; });
  std::vector<Target> out;
  for (auto it = first; it != targets_.end() && it->p1 <= p1_hi; ++it) {
    if (it->p2 >= p2_lo && it->p2 <= p2_hi) out.push_back(*it);
  }
  return out;
}

MarkedPointField agility_transform(const MarkedPointField& field, double alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("agility must be > 0");
  Region region = field.region();
  if (auto* cone = std::get_if<ConeRegion>(&region)) {
    cone->slope /= alpha;
    cone->apex_p2 /= alpha;
  } else {
    std::get<StripRegion>(region).half_width /= alpha;
  }
  std::vector<Target> mapped = field.targets();
  for (auto& t : mapped) t.p2 /= alpha;
  return MarkedPointField::from_targets(std::move(mapped), alpha * field.lambda(), region,
                                        field.distribution(), field.seed(), field.stream());
}

std::vector<Target> visible_targets(const MarkedPointField& field, double x1,
                                    double sensing_range) {
  const auto& all = field.targets();
  const auto first = std::lower_bound(all.begin(), all.end(), x1,
                                      [](const Target& t, double x) { return t.p1 < x; });
  const double limit = x1 + sensing_range;
  std::vector<Target> out;
  for (auto it = first; it != all.end() && it->p1 <= limit; ++it) out.push_back(*it);
  return out;
}

StripwiseField::StripwiseField(double lambda, RewardDistribution dist, std::uint64_t seed,
                               std::uint64_t stream, double cell_depth, double cell_width)
    : lambda_(lambda), dist_(dist), seed_(seed), stream_(stream), depth_(cell_depth),
      width_(cell_width) {
  if (!(lambda > 0.0) || !(cell_depth > 0.0) || !(cell_width > 0.0)) {
    throw std::invalid_argument("lazy field needs positive intensity and cell sizes");
  }
}

const std::vector<Target>& StripwiseField::cell(std::int64_t i, std::int64_t j) const {
  const CellKey key{i, j};
  if (auto it = cells_.find(key); it != cells_.end()) return it->second;
  const std::uint64_t tag = mix64(static_cast<std::uint64_t>(i)) ^
                            mix64(static_cast<std::uint64_t>(j) + 0x2545F4914F6CDD1DULL);
  SeededRng positions(seed_, derive_stream(stream_, derive_stream(kPositionTag, tag)));
  SeededRng marks(seed_, derive_stream(stream_, derive_stream(kMarkTag, tag)));
  const std::uint64_t count = positions.poisson(lambda_ * depth_ * width_);
  std::vector<Target> targets;
  targets.reserve(count);
  const double x0 = static_cast<double>(i) * depth_;
  const double y0 = static_cast<double>(j) * width_;
  for (std::uint64_t n = 0; n < count; ++n) {
    const double p1 = x0 + depth_ * positions.uniform();
    const double p2 = y0 + width_ * positions.uniform();
    targets.push_back({p1, p2, 0.0});
  }
  std::sort(targets.begin(), targets.end(), by_p1);
  for (auto& t : targets) t.reward = dist_.sample(marks);
  return cells_.emplace(key, std::move(targets)).first->second;
}

std::vector<Target> StripwiseField::targets_in(double p1_lo, double p1_hi, double p2_lo,
                                               double p2_hi) const {
  const auto i0 = static_cast<std::int64_t>(std::floor(p1_lo / depth_));
  const auto i1 = static_cast<std::int64_t>(std::floor(p1_hi / depth_));
  const auto j0 = static_cast<std::int64_t>(std::floor(p2_lo / width_));
  const auto j1 = static_cast<std::int64_t>(std::floor(p2_hi / width_));
  std::vector<Target> out;
  {
    std::lock_guard lock(mutex_);
    for (auto i = i0; i <= i1; ++i) {
      for (auto j = j0; j <= j1; ++j) {
        for (const auto& t : cell(i, j)) {
          if (t.p1 > p1_lo && t.p1 <= p1_hi && t.p2 >= p2_lo && t.p2 <= p2_hi) out.push_back(t);
        }
      }
    }
  }
  std::sort(out.begin(), out.end(), by_p1);
  return out;
}

void StripwiseField::evict_before(double x1) const {
  std::lock_guard lock(mutex_);
  std::erase_if(cells_, [&](const auto& entry) {
    return static_cast<double>(entry.first.first + 1) * depth_ < x1;
  });
}

std::size_t StripwiseField::cached_cells() const {
  std::lock_guard lock(mutex_);
  return cells_.size();
}

void write_field_csv(std::ostream& out, const MarkedPointField& field) {
  const nlohmann::json header{{"lambda", field.lambda()},
                              {"region", region_to_json(field.region())},
                              {"dist", field.distribution().to_string()},
                              {"seed", field.seed()},
                              {"stream", field.stream()},
                              {"p1_redraws", field.p1_redraws()}};
  out << "# " << header.dump() << "\n";
  out << "p1,p2,reward\n";
  for (const auto& t : field.targets()) {
    out << format_double(t.p1) << ',' << format_double(t.p2) << ',' << format_double(t.reward)
        << '\n';
  }
}

MarkedPointField read_field_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("# ", 0) != 0) {
    throw std::runtime_error("field CSV must start with a '# {json}' header line");
  }
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(line.substr(2));
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("bad field CSV header: ") + e.what());
  }
  if (!std::getline(in, line) || line != "p1,p2,reward") {
    throw std::runtime_error("field CSV is missing the 'p1,p2,reward' column line");
  }
  std::vector<Target> targets;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream row(line);
    std::string a, b, c;
    if (!std::getline(row, a, ',') || !std::getline(row, b, ',') || !std::getline(row, c)) {
      throw std::runtime_error("malformed field CSV row '" + line + "'");
    }
    targets.push_back({parse_csv_double(a), parse_csv_double(b), parse_csv_double(c)});
  }
  try {
    return MarkedPointField::from_targets(
        std::move(targets), header.at("lambda").get<double>(), region_from_json(header.at("region")),
        RewardDistribution::parse(header.at("dist").get<std::string>()),
        header.at("seed").get<std::uint64_t>(), header.at("stream").get<std::uint64_t>());
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("bad field CSV header: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(std::string("bad field CSV: ") + e.what());
  }
}

}  // namespace mrm
