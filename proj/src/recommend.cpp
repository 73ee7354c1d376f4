#include "evpix/recommend.hpp"

#include <charconv>
#include <sstream>

#include "evpix/default_rules.hpp"
#include "evpix/error.hpp"

namespace evpix {
namespace {

constexpr std::array<std::string_view, 6> kCriteria{"data_priority",           "sensor_motion",
                                                    "background_illumination", "object_size",
                                                    "object_contrast",         "object_speed"};

// Value names per criterion: index 0 is the first enumerator.
constexpr std::array<std::array<std::string_view, 2>, 6> kValues{{
    {"high_fidelity", "sparse"},
    {"static", "moving"},
    {"bright", "dim"},
    {"large", "small"},
    {"high", "low"},
    {"fast", "slow"},
}};

constexpr std::array<std::string_view, 3> kAxes{"bandwidth", "sensitivity", "refractory"};

std::array<int, 6> value_indices(const ScenarioCriteria& c) {
  return {static_cast<int>(c.data_priority),          static_cast<int>(c.sensor_motion),
          static_cast<int>(c.background_illumination), static_cast<int>(c.object_size),
          static_cast<int>(c.object_contrast),         static_cast<int>(c.object_speed)};
}

int criterion_index(std::string_view name) {
  for (std::size_t i = 0; i < kCriteria.size(); ++i) {
    if (kCriteria[i] == name) return static_cast<int>(i);
  }
  return -1;
}

int value_index(int criterion, std::string_view value) {
  for (int v = 0; v < 2; ++v) {
    if (kValues[criterion][v] == value) return v;
  }
  return -1;
}

template <typename E>
E bucket(int score, E low, E mid, E high) {
  return score > 0 ? high : (score < 0 ? low : mid);
}

}  // namespace

std::vector<ScenarioCriteria> ScenarioCriteria::all() {
  std::vector<ScenarioCriteria> out;
  for (int bits = 0; bits < 64; ++bits) {
    ScenarioCriteria c;
    for (int i = 0; i < 6; ++i) {
      set_criterion(c, kCriteria[i], kValues[i][(bits >> i) & 1]);
    }
    out.push_back(c);
  }
  return out;
}

std::array<std::pair<std::string_view, std::string_view>, 6> ScenarioCriteria::named_values() const {
  const auto idx = value_indices(*this);
  std::array<std::pair<std::string_view, std::string_view>, 6> out;
  for (int i = 0; i < 6; ++i) out[i] = {kCriteria[i], kValues[i][idx[i]]};
  return out;
}

bool set_criterion(ScenarioCriteria& c, std::string_view criterion, std::string_view value) {
  const int ci = criterion_index(criterion);
  if (ci < 0) return false;
  const int v = value_index(ci, value);
  if (v < 0) return false;
  switch (ci) {
    case 0: c.data_priority = static_cast<DataPriority>(v); break;
    case 1: c.sensor_motion = static_cast<SensorMotion>(v); break;
    case 2: c.background_illumination = static_cast<BackgroundIllumination>(v); break;
    case 3: c.object_size = static_cast<ObjectSize>(v); break;
    case 4: c.object_contrast = static_cast<ObjectContrast>(v); break;
    case 5: c.object_speed = static_cast<ObjectSpeed>(v); break;
  }
  return true;
}

std::string_view to_string(Bandwidth v) {
  static constexpr std::array<std::string_view, 3> names{"slow", "mid", "fast"};
  return names[static_cast<int>(v)];
}

std::string_view to_string(Sensitivity v) {
  static constexpr std::array<std::string_view, 3> names{"low", "mid", "high"};
  return names[static_cast<int>(v)];
}

std::string_view to_string(Refractory v) {
  static constexpr std::array<std::string_view, 3> names{"long", "mid", "short"};
  return names[static_cast<int>(v)];
}

std::vector<Rule> parse_rules(std::string_view text) {
  std::vector<Rule> rules;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    Rule r;
    std::string axis, weight;
    if (!(fields >> r.criterion)) continue;
    auto fail = [&](const std::string& why) {
      throw Error(ErrorCode::InvalidConfig, "rules line " + std::to_string(lineno) + ": " + why);
    };
    if (!(fields >> r.value >> axis >> weight)) fail("expected criterion value axis weight rationale");
    const int ci = criterion_index(r.criterion);
    if (ci < 0) fail("unknown criterion '" + r.criterion + "'");
    if (value_index(ci, r.value) < 0) fail("unknown value '" + r.value + "' for " + r.criterion);
    int ai = -1;
    for (std::size_t i = 0; i < kAxes.size(); ++i) {
      if (kAxes[i] == axis) ai = static_cast<int>(i);
    }
    if (ai < 0) fail("unknown axis '" + axis + "'");
    r.axis = static_cast<Axis>(ai);
    const auto [ptr, ec] = std::from_chars(weight.data() + (weight.front() == '+'), weight.data() + weight.size(), r.weight);
    if (ec != std::errc() || ptr != weight.data() + weight.size()) fail("weight '" + weight + "' is not an integer");
    std::getline(fields >> std::ws, r.rationale);
    if (r.rationale.empty()) fail("missing rationale");
    rules.push_back(std::move(r));
  }
  return rules;
}

const std::vector<Rule>& default_rules() {
  static const std::vector<Rule> rules = parse_rules(detail::kDefaultRules);
  return rules;
}

BiasRecommendation recommend(const ScenarioCriteria& criteria, const std::vector<Rule>& rules) {
  BiasRecommendation rec;
  const auto named = criteria.named_values();
  for (const Rule& r : rules) {
    const int ci = criterion_index(r.criterion);
    if (ci < 0 || named[ci].second != r.value || r.weight == 0) continue;
    rec.scores[static_cast<int>(r.axis)] += r.weight;
    rec.rationale.push_back(std::string(kAxes[static_cast<int>(r.axis)]) + (r.weight > 0 ? " +" : " ") +
                            std::to_string(r.weight) + ": " + r.rationale);
  }
  rec.bandwidth = bucket(rec.scores[0], Bandwidth::Slow, Bandwidth::Mid, Bandwidth::Fast);
  rec.sensitivity = bucket(rec.scores[1], Sensitivity::Low, Sensitivity::Mid, Sensitivity::High);
  rec.refractory = bucket(rec.scores[2], Refractory::Long, Refractory::Mid, Refractory::Short);
  for (std::size_t a = 0; a < kAxes.size(); ++a) {
    if (rec.scores[a] == 0) {
      rec.rationale.push_back(std::string(kAxes[a]) + " 0: votes cancel or none apply, so it stays at mid");
    }
  }
  return rec;
}

TweakMapping TweakMapping::defaults() {
  TweakMapping m;
  m.threshold_tweak = {{Sensitivity::Low, 0.5}, {Sensitivity::Mid, 0.0}, {Sensitivity::High, -0.5}};
  m.isf_scale = {{Bandwidth::Slow, 0.25}, {Bandwidth::Mid, 1.0}, {Bandwidth::Fast, 4.0}};
  m.max_firing_rate_tweak = {{Refractory::Long, -0.5}, {Refractory::Mid, 0.0}, {Refractory::Short, 0.5}};
  return m;
}

TweakSet to_tweaks(const BiasRecommendation& rec, const TweakMapping& mapping) {
  auto find = [](const auto& map, auto key, std::string_view what) {
    const auto it = map.find(key);
    if (it == map.end()) {
      throw Error(ErrorCode::IncompleteMapping, "no tweak mapping for " + std::string(what) + " level '" +
                                                    std::string(to_string(key)) + "'");
    }
    return it->second;
  };
  return {find(mapping.threshold_tweak, rec.sensitivity, "sensitivity"),
          find(mapping.isf_scale, rec.bandwidth, "bandwidth"),
          find(mapping.max_firing_rate_tweak, rec.refractory, "refractory")};
}

BiasConfig apply_tweaks(const TweakSet& tweaks, BiasConfig nominal) {
  nominal.threshold_tweak = tweaks.threshold_tweak;
  nominal.max_firing_rate_tweak = tweaks.max_firing_rate_tweak;
  nominal.i_sf *= tweaks.isf_scale;
  nominal.i_pr = std::max(nominal.i_pr, kRecommendedMinIpr);
  nominal.validate();
  return nominal;
}

}  // namespace evpix
