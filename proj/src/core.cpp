#include "nev/core.hpp"

#include <cmath>
#include <map>
#include <sstream>

namespace nev {

namespace {

std::string describe(const std::vector<ValidationIssue>& issues) {
  std::ostringstream out;
  out << "invalid parameters:";
  for (const auto& issue : issues) {
    out << " [" << issue.field << " = " << issue.value << ", allowed "
        << issue.allowed << "]";
  }
  return out.str();
}

struct Checker {
  std::vector<ValidationIssue> issues;

  void finite(const std::string& field, double v) {
    if (!std::isfinite(v)) issues.push_back({field, v, "finite"});
  }
  void nonneg(const std::string& field, double v) {
    if (!(v >= 0.0)) issues.push_back({field, v, "[0, inf)"});
  }
  void unit_interval(const std::string& field, double v) {
    if (!(v >= 0.0 && v <= 1.0)) issues.push_back({field, v, "[0, 1]"});
  }
  void half_open_unit(const std::string& field, double v) {
    if (!(v >= 0.0 && v < 1.0)) issues.push_back({field, v, "[0, 1)"});
  }
};

}  // namespace

ValidationError::ValidationError(std::vector<ValidationIssue> issues)
    : std::runtime_error(describe(issues)), issues_(std::move(issues)) {}

ModelParams validate(const ModelParams& params) {
  Checker check;
  for (const auto& name : fields::names()) {
    check.finite(name, fields::get(params, name));
  }
  check.unit_interval("consumer.alpha", params.consumer.alpha);
  check.half_open_unit("esdg.delta", params.esdg.delta);
  check.nonneg("esdg.epsilon", params.esdg.epsilon);
  check.nonneg("lambda", params.lambda);

  if (params.raw) {
    // Physical units: every table range is a plain non-negativity bound
    // except alpha (handled above).
    static const char* kNonNegative[] = {
        "manufacturer.R",  "manufacturer.V1", "manufacturer.V2",
        "manufacturer.C",  "manufacturer.f1", "manufacturer.f2",
        "consumer.T",      "consumer.E",      "consumer.I1",
        "consumer.I2",     "consumer.I3",     "consumer.I4",
        "consumer.P1",     "consumer.P2",     "consumer.A",
        "consumer.p",      "consumer.r",      "consumer.e1",
        "consumer.e2",     "consumer.n1",     "consumer.n2",
        "consumer.c1",     "consumer.c2"};
    for (const char* name : kNonNegative) {
      check.nonneg(name, fields::get(params, name));
    }
  }

  if (!check.issues.empty()) throw ValidationError(std::move(check.issues));
  return params;
}

void validate(const GameState& state) {
  Checker check;
  check.finite("state.t", state.t);
  check.nonneg("state.t", state.t);
  check.unit_interval("state.x", state.x);
  check.unit_interval("state.y", state.y);
  if (!check.issues.empty()) throw ValidationError(std::move(check.issues));
}

namespace fields {

namespace {

using Member = double ModelParams::*;

struct Accessor {
  double (*get)(const ModelParams&);
  void (*set)(ModelParams&, double);
};

#define NEV_FIELD(path, expr)                                  \
  {path,                                                       \
   {[](const ModelParams& p) -> double { return p.expr; },     \
    [](ModelParams& p, double v) { p.expr = v; }}}

const std::map<std::string, Accessor>& registry() {
  static const std::map<std::string, Accessor> table = {
      NEV_FIELD("manufacturer.R", manufacturer.R),
      NEV_FIELD("manufacturer.V1", manufacturer.V1),
      NEV_FIELD("manufacturer.V2", manufacturer.V2),
      NEV_FIELD("manufacturer.C", manufacturer.C),
      NEV_FIELD("manufacturer.f1", manufacturer.f1),
      NEV_FIELD("manufacturer.f2", manufacturer.f2),
      NEV_FIELD("consumer.T", consumer.T),
      NEV_FIELD("consumer.E", consumer.E),
      NEV_FIELD("consumer.alpha", consumer.alpha),
      NEV_FIELD("consumer.I1", consumer.I1),
      NEV_FIELD("consumer.I2", consumer.I2),
      NEV_FIELD("consumer.I3", consumer.I3),
      NEV_FIELD("consumer.I4", consumer.I4),
      NEV_FIELD("consumer.P1", consumer.P1),
      NEV_FIELD("consumer.P2", consumer.P2),
      NEV_FIELD("consumer.A", consumer.A),
      NEV_FIELD("consumer.p", consumer.p),
      NEV_FIELD("consumer.r", consumer.r),
      NEV_FIELD("consumer.e1", consumer.e1),
      NEV_FIELD("consumer.e2", consumer.e2),
      NEV_FIELD("consumer.n1", consumer.n1),
      NEV_FIELD("consumer.n2", consumer.n2),
      NEV_FIELD("consumer.c1", consumer.c1),
      NEV_FIELD("consumer.c2", consumer.c2),
      NEV_FIELD("esdg.gamma", esdg.gamma),
      NEV_FIELD("esdg.b", esdg.b),
      NEV_FIELD("esdg.epsilon", esdg.epsilon),
      NEV_FIELD("esdg.delta", esdg.delta),
      NEV_FIELD("lambda", lambda),
  };
  return table;
}

#undef NEV_FIELD

}  // namespace

bool exists(const std::string& path) { return registry().count(path) > 0; }

double get(const ModelParams& params, const std::string& path) {
  auto it = registry().find(path);
  if (it == registry().end()) {
    throw std::invalid_argument("unknown parameter field: " + path);
  }
  return it->second.get(params);
}

void set(ModelParams& params, const std::string& path, double value) {
  auto it = registry().find(path);
  if (it == registry().end()) {
    throw std::invalid_argument("unknown parameter field: " + path);
  }
  it->second.set(params, value);
}

const std::vector<std::string>& names() {
  static const std::vector<std::string> list = [] {
    std::vector<std::string> out;
    for (const auto& [name, _] : registry()) out.push_back(name);
    return out;
  }();
  return list;
}

}  // namespace fields

}  // namespace nev
