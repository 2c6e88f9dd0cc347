#pragma once

#include <cmath>
#include <string>
#include <string_view>

namespace lancorr {

/**
 * Named scalar perturbation function used for the drift G, the scale term L
 * and the ARCH variance term B. Functions are applied to the first lag
 * Y_{i-1}. Values are `scale * shape(x)`:
 *
 *   zero       0
 *   const      1
 *   inv_quad   1 / (1 + x^2)
 *   gauss      exp(-x^2 / 2)
 *
 * Textual form is `[scale*]shape`, e.g. `2*inv_quad`.
 */
class Perturbation {
 public:
  enum class Shape { Zero, Constant, InvQuad, Gauss };

  constexpr Perturbation() = default;
  constexpr Perturbation(Shape shape, double scale) : shape_(shape), scale_(scale) {}

  static constexpr Perturbation zero() { return {Shape::Zero, 0.0}; }
  static constexpr Perturbation constant(double c) { return {Shape::Constant, c}; }
  static constexpr Perturbation inv_quad(double scale = 1.0) { return {Shape::InvQuad, scale}; }
  static constexpr Perturbation gauss(double scale = 1.0) { return {Shape::Gauss, scale}; }

  /// Throws DomainError on an unknown name or a non-finite scale.
  static Perturbation parse(std::string_view text);

  double operator()(double x) const noexcept {
    switch (shape_) {
      case Shape::Zero:
        return 0.0;
      case Shape::Constant:
        return scale_;
      case Shape::InvQuad:
        return scale_ / (1.0 + x * x);
      case Shape::Gauss:
        return scale_ * std::exp(-0.5 * x * x);
    }
    return 0.0;
  }

  Perturbation scaled(double factor) const noexcept {
    if (shape_ == Shape::Zero) return zero();
    return {shape_, scale_ * factor};
  }

  bool is_zero() const noexcept { return shape_ == Shape::Zero || scale_ == 0.0; }
  /// True when the function never takes negative values.
  bool non_negative() const noexcept { return is_zero() || scale_ >= 0.0; }

  Shape shape() const noexcept { return shape_; }
  double scale() const noexcept { return scale_; }
  std::string to_string() const;

  bool operator==(const Perturbation&) const = default;

 private:
  Shape shape_ = Shape::Zero;
  double scale_ = 0.0;
};

}  // namespace lancorr
