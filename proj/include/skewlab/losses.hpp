#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace skewlab {

enum class Loss { Exponential, Logistic };

inline Loss parse_loss(const std::string& name) {
  if (name == "exponential" || name == "exp") return Loss::Exponential;
  if (name == "logistic") return Loss::Logistic;
  throw std::invalid_argument("unknown loss '" + name + "'");
}

inline const char* to_string(Loss loss) { return loss == Loss::Exponential ? "exponential" : "logistic"; }

/// Margins are clamped to +-kMarginClamp before exponentiation.
inline constexpr double kMarginClamp = 700.0;

template <typename Scalar>
Scalar clamp_margin(Scalar margin, bool* clamped = nullptr) {
  const Scalar lim = static_cast<Scalar>(kMarginClamp);
  if (margin > lim || margin < -lim) {
    if (clamped) *clamped = true;
    return std::clamp(margin, -lim, lim);
  }
  return margin;
}

/// Per-sample loss as a function of the signed margin m = y h(x).
template <typename Scalar>
Scalar loss_value(Loss loss, Scalar margin) {
  using std::exp;
  using std::log1p;
  if (loss == Loss::Exponential) return exp(-margin);
  // log(1 + e^{-m}) without overflow on either side
  return margin > 0 ? log1p(exp(-margin)) : -margin + log1p(exp(margin));
}

/// d loss / d margin.
template <typename Scalar>
Scalar loss_slope(Loss loss, Scalar margin) {
  using std::exp;
  if (loss == Loss::Exponential) return -exp(-margin);
  if (margin >= 0) {
    const Scalar e = exp(-margin);
    return -e / (Scalar(1) + e);
  }
  return -Scalar(1) / (Scalar(1) + exp(margin));
}

}  // namespace skewlab
