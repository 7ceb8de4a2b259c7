#pragma once

#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace gencahn {

struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();

  bool bounded_below() const { return lo > -std::numeric_limits<double>::infinity(); }
  bool bounded_above() const { return hi < std::numeric_limits<double>::infinity(); }
  bool contains(double r) const { return r > lo && r < hi; }
};

// ---------------------------------------------------------------------------
// Mobility primitive alpha

enum class MobilityForm { PolynomialOdd, Tabulated };

/// alpha with growth exponent p and H1 constants C1, C2.
///
/// The built-in family is alpha(r) = r + r|r|^{2p} (C1 = 1, C2 = 2p + 1). The
/// tabulated form interpolates monotone data with PCHIP and continues
/// linearly beyond the table; its C1, C2 are estimated on an audit range.
struct MobilitySpec {
  MobilityForm form = MobilityForm::PolynomialOdd;
  double p = 1.0;
  double c1 = 1.0;
  double c2 = 3.0;
  std::vector<double> nodes;
  std::vector<double> values;
  std::vector<double> slopes;

  static MobilitySpec polynomial(double p);
  static MobilitySpec tabulated(double p, std::vector<std::pair<double, double>> table,
                                Interval audit_range = {-10.0, 10.0});
};

double alpha(const MobilitySpec& spec, double r);
double alpha_prime(const MobilitySpec& spec, double r);

/// alpha_M: alpha on [-M, M], affine with slope C1 outside. Throws NonPositiveM.
double alpha_trunc(const MobilitySpec& spec, double M, double r);
double alpha_trunc_prime(const MobilitySpec& spec, double M, double r);

/// rho_M, the inverse of alpha_M. Throws NoConvergence if the safeguarded
/// Newton iteration exceeds its budget.
double alpha_trunc_inverse(const MobilitySpec& spec, double M, double x);

// ---------------------------------------------------------------------------
// Potential phi = d(phi_hat)/dr

enum class PotentialKind { DoubleWell, EvenPolynomial, Logarithmic };

struct PotentialSpec {
  PotentialKind kind = PotentialKind::DoubleWell;
  /// Ascending coefficients of the unshifted phi_hat (EvenPolynomial only).
  std::vector<double> coeffs;
  double lambda = 0.0;  // Logarithmic only
  Interval domain;
  /// Added to phi_hat so that min phi_hat = 0.
  double shift = 0.0;
  /// Semiconvexity constant: phi' >= -c_split on the domain.
  double c_split = 1.0;
  /// False when phi_hat is unbounded below (negative leading coefficient).
  bool coercive = true;

  static PotentialSpec double_well();
  static PotentialSpec even_polynomial(std::vector<double> coeffs);
  static PotentialSpec logarithmic(double a, double b, double lambda);

  bool singular() const { return kind == PotentialKind::Logarithmic; }
};

/// Evaluations closer than this to a finite endpoint raise OutOfDomain.
inline constexpr double kDomainGuard = 1e-12;

bool in_domain(const PotentialSpec& spec, double r);
double phi(const PotentialSpec& spec, double r);
double phi_prime(const PotentialSpec& spec, double r);
double phi_hat(const PotentialSpec& spec, double r);

/// phi_mu(r) = phi(r) when |phi(r)| <= 1/mu, else sign(r)/mu; defined on all of
/// R for singular potentials. Throws NonPositiveMu.
double phi_trunc(const PotentialSpec& spec, double mu, double r);

struct ConvexSplit {
  double beta_value = 0.0;
  double c_split = 0.0;
};

/// phi(r) = beta(r) - c_split r with beta nondecreasing.
ConvexSplit split_convex(const PotentialSpec& spec, double r);

/// phi or phi_mu together with a consistent antiderivative and convex split.
///
/// With truncation the antiderivative is phi_hat on [r_lo, r_hi], the
/// interval where |phi| <= 1/mu, and continues linearly with slope -+1/mu
/// outside. Construction throws InvalidArgument when 1/mu is so small that
/// {|phi| <= 1/mu} is not such an interval (phi_mu would jump).
class EffectivePotential {
 public:
  explicit EffectivePotential(PotentialSpec spec, std::optional<double> mu = std::nullopt);

  const PotentialSpec& spec() const { return spec_; }
  std::optional<double> mu() const { return mu_; }
  double c_split() const { return spec_.c_split; }

  bool admissible(double r) const { return mu_ || in_domain(spec_, r); }
  double phi(double r) const;
  double phi_prime(double r) const;
  double phi_hat(double r) const;
  double beta(double r) const { return phi(r) + spec_.c_split * r; }
  double beta_prime(double r) const { return phi_prime(r) + spec_.c_split; }

  double lower_break() const { return r_lo_; }
  double upper_break() const { return r_hi_; }

 private:
  PotentialSpec spec_;
  std::optional<double> mu_;
  double r_lo_ = 0.0;
  double r_hi_ = 0.0;
};

/// alpha or alpha_M.
class EffectiveMobility {
 public:
  explicit EffectiveMobility(MobilitySpec spec, std::optional<double> M = std::nullopt);

  const MobilitySpec& spec() const { return spec_; }
  std::optional<double> M() const { return M_; }
  double alpha(double r) const;
  double alpha_prime(double r) const;

 private:
  MobilitySpec spec_;
  std::optional<double> M_;
};

// ---------------------------------------------------------------------------
// Integrability indices

struct IndexSet {
  double p = 0.0;
  double sigma = 0.0;
  double rho_p = 0.0;
  double kappa_p = 0.0;
  double eta_p_sigma = 0.0;
  double sigma_min = 0.0;   // max{(6p-3)/(6p+2), 0}
  bool compatible = false;  // sigma > sigma_min
};

/// Throws SigmaOutOfRange unless 0 < sigma < 1.
IndexSet indices(double p, double sigma);

// ---------------------------------------------------------------------------
// Sampling audit of the structural hypotheses

struct HypothesisCheck {
  std::string name;
  bool applicable = true;
  bool satisfied = false;
  std::map<std::string, double> constants;
  std::string note;
};

struct AuditReport {
  Interval range;
  std::size_t samples = 0;
  double sigma = 0.0;
  std::vector<HypothesisCheck> checks;

  const HypothesisCheck& at(const std::string& name) const;
  /// True when every applicable check is satisfied, H7/H8 excluded unless
  /// `include_uniqueness`.
  bool passed(bool include_uniqueness = false) const;
};

/// Audits H1-H10 on `samples` uniform points of `range` intersected with the
/// domain, plus geometric tail sequences toward each end of the domain.
/// Throws EmptyRange when the range has no interior inside the domain.
AuditReport audit_hypotheses(const MobilitySpec& mob, const PotentialSpec& pot, Interval range,
                             std::size_t samples, double sigma, double mean_shift = 0.0);

}  // namespace gencahn
