#ifndef NEV_NORMALIZE_HPP
#define NEV_NORMALIZE_HPP

#include <optional>
#include <string>
#include <vector>

#include "nev/core.hpp"

namespace nev {

enum class NormalizationTarget { Unit, Signed };

/// A set of parameter fields rescaled jointly against a common (min, max).
/// Without an explicit range the group's own extremes are used, which
/// requires at least two distinct member values.
struct NormalizationGroup {
  std::string name;
  std::vector<std::string> fields;
  std::optional<double> min;
  std::optional<double> max;
};

struct NormalizationSpec {
  NormalizationTarget target = NormalizationTarget::Signed;
  std::vector<NormalizationGroup> groups;
};

/// Maps value affinely so that min -> 0 and max -> 1. Values outside
/// (min, max) map outside [0, 1]; no clamping.
double normalize_unit(double value, double min, double max);

/// Maps value affinely so that min -> -1 and max -> +1. Computed as
/// 2 * normalize_unit(value, min, max) - 1 so the two scalers agree
/// exactly.
double normalize_signed(double value, double min, double max);

/// Records which fields were rescaled against which range.
struct GroupProvenance {
  std::string group;
  std::vector<std::string> fields;
  double min = 0.0;
  double max = 0.0;
};

struct NormalizeResult {
  ModelParams params;
  std::vector<GroupProvenance> provenance;
};

/// Replaces every field named in a group by its rescaled value; fields in
/// no group pass through unchanged. The result is marked non-raw. Errors
/// on degenerate ranges and on a field referenced by two groups.
NormalizeResult normalize_params(const ModelParams& raw,
                                 const NormalizationSpec& spec);

}  // namespace nev

#endif
