#include "lancorr/score_family.hpp"

#include "lancorr/errors.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>

namespace lancorr {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kRelTol = 1e-13;
constexpr unsigned kMaxDepth = 20;

struct Quadrature {
  double value;
  double error;
};

// Adaptive Gauss-Kronrod; infinite limits are mapped to a finite interval by
// the library's x = t / (1 - t^2) style transform.
Quadrature integrate(const std::function<double(double)>& f, double a, double b,
                     const char* what) {
  using boost::math::quadrature::gauss_kronrod;
  double error = 0.0;
  double l1 = 0.0;
  const double value =
      gauss_kronrod<double, 61>::integrate(f, a, b, kMaxDepth, kRelTol, &error, &l1);
  if (!std::isfinite(value) || error > RegularityReport::kTolerance) {
    std::ostringstream msg;
    msg << "quadrature for " << what << " on [" << a << ", " << b
        << "] did not converge: value=" << value << " error_estimate=" << error
        << " L1=" << l1;
    throw NumericError(msg.str());
  }
  return {value, error};
}

double whole_line(const std::function<double(double)>& f, const char* what) {
  // Split at 0 so the peak of every integrand sits at an interval end.
  return integrate(f, -kInf, 0.0, what).value + integrate(f, 0.0, kInf, what).value;
}

double tails(const std::function<double(double)>& f, const char* what) {
  const double r = RegularityReport::kTailRadius;
  return std::abs(integrate(f, -kInf, -r, what).value) +
         std::abs(integrate(f, r, kInf, what).value);
}

void require_finite(double x) {
  if (!std::isfinite(x)) throw DomainError("score evaluated at a non-finite point");
}

}  // namespace

ScoreFamily::ScoreFamily(FamilyKind kind, double nu)
    : kind_(kind), nu_(nu), shape_(0.0), log_norm_(0.0) {
  if (kind_ == FamilyKind::Gaussian) {
    log_norm_ = -0.5 * std::log(2.0 * std::numbers::pi);
  } else {
    shape_ = nu_ - 2.0;
    log_norm_ = std::lgamma(0.5 * (nu_ + 1.0)) - std::lgamma(0.5 * nu_) -
                0.5 * std::log(std::numbers::pi * shape_);
  }
  for (int j = 0; j < 3; ++j) {
    moments_[j] = whole_line(
        [this, j](double x) {
          const double m = score_unchecked(x);
          return std::pow(x, j) * m * m * density(x);
        },
        "Fisher moment");
  }
}

ScoreFamily ScoreFamily::gaussian() { return ScoreFamily(FamilyKind::Gaussian, 0.0); }

ScoreFamily ScoreFamily::student_t(double nu) {
  if (!std::isfinite(nu) || nu < 3.0) {
    throw DomainError("Student-t family needs nu >= 3 (got " + std::to_string(nu) + ")");
  }
  return ScoreFamily(FamilyKind::StudentT, nu);
}

std::string ScoreFamily::name() const {
  if (kind_ == FamilyKind::Gaussian) return "gaussian";
  std::ostringstream os;
  os << "student-t(" << nu_ << ")";
  return os.str();
}

double ScoreFamily::log_density(double x) const {
  if (kind_ == FamilyKind::Gaussian) return log_norm_ - 0.5 * x * x;
  return log_norm_ - 0.5 * (nu_ + 1.0) * std::log1p(x * x / shape_);
}

double ScoreFamily::density(double x) const {
  if (std::isinf(x)) return 0.0;
  return std::exp(log_density(x));
}

ScoreDerivs ScoreFamily::score_derivs_unchecked(double x) const noexcept {
  if (kind_ == FamilyKind::Gaussian) return {-1.0, 0.0};
  const double d = shape_ + x * x;
  const double d2 = d * d;
  const double first = -(nu_ + 1.0) * (shape_ - x * x) / d2;
  const double second = 2.0 * (nu_ + 1.0) * x * (3.0 * shape_ - x * x) / (d2 * d);
  return {first, second};
}

double ScoreFamily::score(double x) const {
  require_finite(x);
  return score_unchecked(x);
}

ScoreDerivs ScoreFamily::score_derivs(double x) const {
  require_finite(x);
  return score_derivs_unchecked(x);
}

double ScoreFamily::nf(double x) const {
  require_finite(x);
  return 1.0 + x * score_unchecked(x);
}

double ScoreFamily::nf_deriv(double x) const {
  require_finite(x);
  return score_unchecked(x) + x * score_derivs_unchecked(x).first;
}

double ScoreFamily::fisher_moment(int j) const {
  if (j < 0 || j > 2) {
    throw DomainError("Fisher moment index must be 0, 1 or 2 (got " + std::to_string(j) + ")");
  }
  return moments_[static_cast<std::size_t>(j)];
}

double eval_score(const ScoreFamily& family, double x) { return family.score(x); }
ScoreDerivs eval_score_derivs(const ScoreFamily& family, double x) {
  return family.score_derivs(x);
}
double eval_nf(const ScoreFamily& family, double x) { return family.nf(x); }
double fisher_moment(const ScoreFamily& family, int j) { return family.fisher_moment(j); }

double RegularityReport::max_abs_residual() const {
  double worst = 0.0;
  for (double r : residuals) worst = std::max(worst, std::abs(r));
  return worst;
}

RegularityReport check_regularity(const ScoreFamily& family) {
  RegularityReport report;
  const auto f = [&family](double x) { return family.density(x); };
  // Ṁ + M² = f''/f
  const auto curvature = [&family](double x) {
    const double m = family.score_unchecked(x);
    return family.score_derivs_unchecked(x).first + m * m;
  };

  const std::array<std::function<double(double)>, 5> integrands{
      [&](double x) { return family.score_unchecked(x) * f(x); },
      [&](double x) { return x * family.score_unchecked(x) * f(x); },
      [&](double x) { return curvature(x) * f(x); },
      [&](double x) { return x * curvature(x) * f(x); },
      [&](double x) { return x * x * curvature(x) * f(x); },
  };

  for (std::size_t k = 0; k < integrands.size(); ++k) {
    report.values[k] = whole_line(integrands[k], "regularity identity");
    report.residuals[k] = report.values[k] - report.targets[k];
    report.tail[k] = tails(integrands[k], "regularity tail");
  }
  for (int j = 0; j < 3; ++j) report.moments[static_cast<std::size_t>(j)] = family.fisher_moment(j);
  report.moment2_tail = tails(
      [&](double x) {
        const double m = family.score_unchecked(x);
        return x * x * m * m * f(x);
      },
      "I_2 tail");

  report.normalization = whole_line(f, "normalization");
  report.mean = whole_line([&](double x) { return x * f(x); }, "mean");
  report.variance = whole_line([&](double x) { return x * x * f(x); }, "variance");

  report.tail_flag = report.moment2_tail > RegularityReport::kTolerance;
  for (double t : report.tail) {
    if (t > RegularityReport::kTolerance) report.tail_flag = true;
  }
  return report;
}

}  // namespace lancorr
