#pragma once

namespace hfmargin {

/// Standard-normal CDF.
[[nodiscard]] double normal_cdf(double z);
/// Standard-normal quantile, 0 < p < 1.
[[nodiscard]] double normal_quantile(double p);

}  // namespace hfmargin
