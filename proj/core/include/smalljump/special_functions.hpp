#pragma once

namespace smalljump {

/// Upper incomplete gamma function Γ(a, s) = ∫_s^∞ t^(a-1) e^(-t) dt for
/// a > 0, s >= 0, to about 1e-12 relative accuracy. Uses the power series of
/// the lower function for s < a + 1 and a Lentz continued fraction otherwise.
double incomplete_gamma(double a, double s);

} // namespace smalljump
