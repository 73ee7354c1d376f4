#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "evpix/bias_model.hpp"

namespace evpix {

enum class DataPriority { HighFidelity, Sparse };
enum class SensorMotion { Static, Moving };
enum class BackgroundIllumination { Bright, Dim };
enum class ObjectSize { Large, Small };
enum class ObjectContrast { High, Low };
enum class ObjectSpeed { Fast, Slow };

struct ScenarioCriteria {
  DataPriority data_priority = DataPriority::HighFidelity;
  SensorMotion sensor_motion = SensorMotion::Static;
  BackgroundIllumination background_illumination = BackgroundIllumination::Bright;
  ObjectSize object_size = ObjectSize::Large;
  ObjectContrast object_contrast = ObjectContrast::High;
  ObjectSpeed object_speed = ObjectSpeed::Slow;

  bool operator==(const ScenarioCriteria&) const = default;

  /// The 64 combinations in a fixed order (bit i of the index flips criterion i).
  static std::vector<ScenarioCriteria> all();

  /// Criterion names and current values as they appear in the rules file,
  /// e.g. {"object_speed", "fast"}.
  std::array<std::pair<std::string_view, std::string_view>, 6> named_values() const;
};

/// Parses a criterion value by its rules-file name; returns false if either
/// the criterion or the value is unknown.
bool set_criterion(ScenarioCriteria& c, std::string_view criterion, std::string_view value);

enum class Bandwidth { Slow, Mid, Fast };
enum class Sensitivity { Low, Mid, High };
enum class Refractory { Long, Mid, Short };

std::string_view to_string(Bandwidth v);
std::string_view to_string(Sensitivity v);
std::string_view to_string(Refractory v);

enum class Axis { Bandwidth, Sensitivity, Refractory };

/// One additive vote: when `criterion` has `value`, add `weight` to `axis`.
/// Positive weights push toward fast bandwidth, high sensitivity and a short
/// refractory period.
struct Rule {
  std::string criterion;
  std::string value;
  Axis axis = Axis::Bandwidth;
  int weight = 0;
  std::string rationale;
};

/// Rules file: one rule per line, "criterion value axis weight rationale...";
/// '#' starts a comment. Throws InvalidConfig on unknown names.
std::vector<Rule> parse_rules(std::string_view text);

/// The rules compiled in from data/recommend_rules.txt.
const std::vector<Rule>& default_rules();

struct BiasRecommendation {
  Bandwidth bandwidth = Bandwidth::Mid;
  Sensitivity sensitivity = Sensitivity::Mid;
  Refractory refractory = Refractory::Mid;
  std::array<int, 3> scores{};          ///< summed votes per Axis
  std::vector<std::string> rationale;   ///< one line per fired rule, plus notes for untouched axes

  bool operator==(const BiasRecommendation&) const = default;
};

/// Sums the votes of every rule that matches and buckets each axis by sign
/// (ties go to mid).
BiasRecommendation recommend(const ScenarioCriteria& criteria, const std::vector<Rule>& rules = default_rules());

struct TweakMapping {
  std::map<Sensitivity, double> threshold_tweak;
  std::map<Bandwidth, double> isf_scale;
  std::map<Refractory, double> max_firing_rate_tweak;

  static TweakMapping defaults();
};

struct TweakSet {
  double threshold_tweak = 0;
  double isf_scale = 1;
  double max_firing_rate_tweak = 0;

  bool operator==(const TweakSet&) const = default;
};

/// Throws IncompleteMapping if a level of the recommendation has no entry.
TweakSet to_tweaks(const BiasRecommendation& rec, const TweakMapping& mapping = TweakMapping::defaults());

/// i_pr floor applied with every recommendation: a high photoreceptor bias
/// lets the source follower filter its noise.
inline constexpr double kRecommendedMinIpr = 3e-9;

/// Applies a tweak set to a nominal bias configuration and validates it.
BiasConfig apply_tweaks(const TweakSet& tweaks, BiasConfig nominal);

}  // namespace evpix
