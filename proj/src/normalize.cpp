#include "nev/normalize.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace nev {

namespace {

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) {
    throw std::invalid_argument(std::string("normalize: non-finite ") + what);
  }
}

void require_range(double min, double max) {
  require_finite(min, "min");
  require_finite(max, "max");
  if (!(min < max)) {
    throw std::invalid_argument("normalize: degenerate range (min >= max)");
  }
}

}  // namespace

double normalize_unit(double value, double min, double max) {
  require_finite(value, "value");
  require_range(min, max);
  return (value - min) / (max - min);
}

double normalize_signed(double value, double min, double max) {
  return 2.0 * normalize_unit(value, min, max) - 1.0;
}

NormalizeResult normalize_params(const ModelParams& raw,
                                 const NormalizationSpec& spec) {
  NormalizeResult result{raw, {}};
  std::set<std::string> seen;

  for (const auto& group : spec.groups) {
    if (group.fields.empty()) {
      throw std::invalid_argument("normalize: empty group '" + group.name +
                                  "'");
    }
    for (const auto& field : group.fields) {
      if (!fields::exists(field)) {
        throw std::invalid_argument("normalize: unknown field '" + field +
                                    "' in group '" + group.name + "'");
      }
      if (!seen.insert(field).second) {
        throw std::invalid_argument("normalize: field '" + field +
                                    "' referenced by two groups");
      }
    }

    double lo, hi;
    if (group.min && group.max) {
      lo = *group.min;
      hi = *group.max;
    } else if (group.min || group.max) {
      throw std::invalid_argument("normalize: group '" + group.name +
                                  "' must give both min and max or neither");
    } else {
      lo = hi = fields::get(raw, group.fields.front());
      for (const auto& field : group.fields) {
        double v = fields::get(raw, field);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      if (!(lo < hi)) {
        throw std::invalid_argument(
            "normalize: group '" + group.name +
            "' needs two distinct values or an explicit (min, max)");
      }
    }
    require_range(lo, hi);

    for (const auto& field : group.fields) {
      double v = fields::get(raw, field);
      double scaled = spec.target == NormalizationTarget::Unit
                          ? normalize_unit(v, lo, hi)
                          : normalize_signed(v, lo, hi);
      fields::set(result.params, field, scaled);
    }
    result.provenance.push_back({group.name, group.fields, lo, hi});
  }

  result.params.raw = false;
  return result;
}

}  // namespace nev
