#include "lancorr/perturbation.hpp"

#include "lancorr/detail/format.hpp"
#include "lancorr/errors.hpp"

namespace lancorr {

Perturbation Perturbation::parse(std::string_view text) {
  text = detail::trim(text);
  double scale = 1.0;
  if (const auto star = text.find('*'); star != std::string_view::npos) {
    if (!detail::parse_double(detail::trim(text.substr(0, star)), scale) || !std::isfinite(scale)) {
      throw DomainError("invalid perturbation scale in '" + std::string(text) + "'");
    }
    text = detail::trim(text.substr(star + 1));
  }
  if (text == "zero") return zero();
  if (text == "const") return constant(scale);
  if (text == "inv_quad") return inv_quad(scale);
  if (text == "gauss") return gauss(scale);
  throw DomainError("unknown perturbation function '" + std::string(text) +
                    "' (expected zero, const, inv_quad or gauss)");
}

std::string Perturbation::to_string() const {
  const char* name = "zero";
  switch (shape_) {
    case Shape::Zero:
      return "zero";
    case Shape::Constant:
      name = "const";
      break;
    case Shape::InvQuad:
      name = "inv_quad";
      break;
    case Shape::Gauss:
      name = "gauss";
      break;
  }
  if (scale_ == 1.0) return name;
  return detail::shortest(scale_) + "*" + name;
}

}  // namespace lancorr
