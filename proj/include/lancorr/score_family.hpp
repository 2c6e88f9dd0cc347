#pragma once

#include <array>
#include <string>

namespace lancorr {

enum class FamilyKind { Gaussian, StudentT };

struct ScoreDerivs {
  double first;   // M_f'
  double second;  // M_f''
};

/**
 * Innovation density f described through its score M_f = f'/f.
 *
 * Two families are supported, both with zero mean and unit variance:
 *  - standard Gaussian, M_f(x) = -x;
 *  - Student-t with nu >= 3 degrees of freedom rescaled by sqrt((nu-2)/nu),
 *    M_f(x) = -(nu+1) x / (nu - 2 + x^2).
 *
 * The Fisher-type moments I_j = E[eps^j M_f(eps)^2], j = 0, 1, 2, are computed
 * by quadrature when the family is constructed and cached; a ScoreFamily is
 * immutable afterwards and may be shared between threads.
 */
class ScoreFamily {
 public:
  static ScoreFamily gaussian();
  static ScoreFamily student_t(double nu);

  FamilyKind kind() const noexcept { return kind_; }
  /// Degrees of freedom (0 for the Gaussian family).
  double dof() const noexcept { return nu_; }
  std::string name() const;

  double density(double x) const;
  double log_density(double x) const;

  double score(double x) const;
  ScoreDerivs score_derivs(double x) const;

  /// N_f(x) = 1 + x M_f(x), the scale score.
  double nf(double x) const;
  /// N_f'(x) = M_f(x) + x M_f'(x).
  double nf_deriv(double x) const;

  /// Cached I_j for j in {0, 1, 2}; throws DomainError otherwise.
  double fisher_moment(int j) const;

  bool operator==(const ScoreFamily& other) const noexcept {
    return kind_ == other.kind_ && nu_ == other.nu_;
  }

  // Unchecked variants for inner loops where finiteness is already known.
  double score_unchecked(double x) const noexcept {
    if (kind_ == FamilyKind::Gaussian) return -x;
    return -(nu_ + 1.0) * x / (shape_ + x * x);
  }
  ScoreDerivs score_derivs_unchecked(double x) const noexcept;

 private:
  ScoreFamily(FamilyKind kind, double nu);

  FamilyKind kind_;
  double nu_;
  double shape_;     // nu - 2 for Student-t
  double log_norm_;  // log normalizing constant
  std::array<double, 3> moments_{};
};

// Free-function spellings of the operations.
double eval_score(const ScoreFamily& family, double x);
ScoreDerivs eval_score_derivs(const ScoreFamily& family, double x);
double eval_nf(const ScoreFamily& family, double x);
double fisher_moment(const ScoreFamily& family, int j);

/**
 * Quadrature check of the normalization identities a score family must meet:
 *   E[M_f] = 0,  E[eps M_f] = -1,  E[M_f' + M_f^2] = 0,
 *   E[eps (M_f' + M_f^2)] = 0,  E[eps^2 (M_f' + M_f^2)] = 2.
 *
 * `values` are the integrals, `residuals` the integrals minus their targets.
 * `tail` holds, per integrand, the mass beyond |x| > kTailRadius; `tail_flag`
 * is raised when any of them (or the I_2 tail) exceeds the quadrature tolerance,
 * which signals that the quantity depends on heavy tails.
 */
struct RegularityReport {
  static constexpr double kTailRadius = 200.0;
  static constexpr double kTolerance = 1e-8;

  std::array<double, 5> values{};
  std::array<double, 5> targets{0.0, -1.0, 0.0, 0.0, 2.0};
  std::array<double, 5> residuals{};
  std::array<double, 5> tail{};
  std::array<double, 3> moments{};
  double moment2_tail = 0.0;
  double normalization = 0.0;  // integral of f
  double mean = 0.0;
  double variance = 0.0;
  bool tail_flag = false;

  double max_abs_residual() const;
  bool passes(double tol = 1e-6) const { return max_abs_residual() < tol; }
};

RegularityReport check_regularity(const ScoreFamily& family);

}  // namespace lancorr
