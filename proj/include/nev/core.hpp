#ifndef NEV_CORE_HPP
#define NEV_CORE_HPP

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace nev {

/// Population state of the two-sided adoption game: x is the share of
/// manufacturers producing NEVs, y the share of consumers buying NEVs,
/// t the simulation time in months.
struct GameState {
  double x = 0.0;
  double y = 0.0;
  double t = 0.0;
};

/// Manufacturer-side payoff constants. R is the dual-credit points bonus
/// for NEV production, V1/V2 the NEV/TFV profits, C the NEV R&D cost,
/// f1 the average-fuel-consumption points penalty and f2 the pollution
/// penalty.
struct ManufacturerParams {
  double R = 0.0;
  double V1 = 0.0;
  double V2 = 0.0;
  double C = 0.0;
  double f1 = 0.0;
  double f2 = 0.0;
};

/// Consumer-side payoff constants, one field per symbol of the decision
/// process: needs (T commuting, E environmental awareness), external
/// stimulus alpha, information-retrieval payoffs I1..I4 (stores,
/// internet, contacts, media), prices P1/P2, purchase tax A, TFV energy
/// price p, battery payout and replacement insurance r, ranges e1/e2,
/// infrastructure counts n1/n2 and energy-supplement efficiencies c1/c2.
struct ConsumerParams {
  double T = 0.0;
  double E = 0.0;
  double alpha = 0.0;
  double I1 = 0.0;
  double I2 = 0.0;
  double I3 = 0.0;
  double I4 = 0.0;
  double P1 = 0.0;
  double P2 = 0.0;
  double A = 0.0;
  double p = 0.0;
  double r = 0.0;
  double e1 = 0.0;
  double e2 = 0.0;
  double n1 = 0.0;
  double n2 = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
};

/// Expectation supply-demand game constants: gamma is the supply player's
/// basic payoff, b the demand player's constant payoff, epsilon the
/// expected matching payoff, and delta the discount applied on a strategy
/// mismatch (also the post-purchase feedback factor; `sigma` is accepted
/// as a config alias).
struct EsdgParams {
  double gamma = 0.0;
  double b = 0.0;
  double epsilon = 0.0;
  double delta = 0.0;

  double mismatch_discount() const { return delta * epsilon; }
};

struct ModelParams {
  ManufacturerParams manufacturer;
  ConsumerParams consumer;
  EsdgParams esdg;
  bool feedback_enabled = false;
  /// Reputation-coupling strength of dissatisfied consumers on the
  /// manufacturer payoff difference. Zero disables the coupling and keeps
  /// the manufacturer dynamic independent of y.
  double lambda = 0.0;
  /// True while values are still in physical units (yuan, km, minutes);
  /// false once normalized or specified directly in payoff units.
  bool raw = false;
};

struct Trajectory {
  std::vector<GameState> samples;
  std::string scenario_id;
  double step_size = 0.0;
  bool converged = false;
  std::optional<double> convergence_time;
  long clamped_steps = 0;

  const GameState& back() const { return samples.back(); }
};

struct ValidationIssue {
  std::string field;
  double value = 0.0;
  std::string allowed;
};

class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(std::vector<ValidationIssue> issues);
  const std::vector<ValidationIssue>& issues() const { return issues_; }

 private:
  std::vector<ValidationIssue> issues_;
};

/// Checks every range constraint and returns the parameters unchanged.
/// Structural constraints (finiteness, alpha in [0,1], delta in [0,1),
/// epsilon >= 0, lambda >= 0) always apply; the non-negativity ranges of
/// the raw parameter table apply only while params.raw is true. Throws
/// ValidationError listing every violated constraint by field name.
ModelParams validate(const ModelParams& params);

void validate(const GameState& state);

/// Numeric field registry: every ModelParams member is addressable by a
/// dotted path such as "consumer.r" or "esdg.delta". Used by
/// normalization groups, sweeps and calibration.
namespace fields {

bool exists(const std::string& path);
double get(const ModelParams& params, const std::string& path);
void set(ModelParams& params, const std::string& path, double value);
const std::vector<std::string>& names();

}  // namespace fields

}  // namespace nev

#endif
