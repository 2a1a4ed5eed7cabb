#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "swlw/errors.hpp"

namespace swlw {

/// Smooth saturations of the KdV nonlinearities.
///
///   flux(v)         ~ v^2      exact for |v| <= M, equal to |v| beyond M^2 + 1
///   coupling(v)     ~ v        exact for |v| <= M, equal to +-3M/2 beyond 2M
///   flux_potential  = integral_0^v flux
///
/// Both blends use the quintic smoothstep s(t) = t^3 (10 - 15t + 6t^2), so
/// every function here is C^2. Inside |v| <= M each method takes an explicit
/// branch with the untruncated arithmetic, which makes a run whose |v| never
/// exceeds M bitwise identical to an untruncated run.
class TruncationFamily {
public:
    static TruncationFamily off() { return TruncationFamily(); }

    static TruncationFamily active(double M) {
        if (!(M >= 1.0) || !std::isfinite(M)) {
            throw InvalidParameter("truncation level M must be finite and >= 1, got " + std::to_string(M));
        }
        return TruncationFamily(M);
    }

    bool is_active() const { return active_; }

    // +inf when off.
    double level() const { return active_ ? M_ : std::numeric_limits<double>::infinity(); }

    double flux(double v) const {
        const double a = std::abs(v);
        if (!active_ || a <= M_) return v * v;
        if (a >= M_ * M_ + 1.0) return a;
        const double theta = smoothstep((a - M_) / flux_width());
        return (1.0 - theta) * v * v + theta * a;
    }

    double flux_prime(double v) const {
        const double a = std::abs(v);
        if (!active_ || a <= M_) return 2.0 * v;
        const double sign = v < 0.0 ? -1.0 : 1.0;
        if (a >= M_ * M_ + 1.0) return sign;
        const double w = flux_width();
        const double t = (a - M_) / w;
        const double theta = smoothstep(t);
        const double dtheta = smoothstep_prime(t) / w;
        return sign * ((1.0 - theta) * 2.0 * a + theta - dtheta * (a * a - a));
    }

    /// Coarse envelope for |flux'|: 2(M^2+1) + 1. Not sharp.
    double flux_prime_bound() const {
        return active_ ? 2.0 * (M_ * M_ + 1.0) + 1.0 : std::numeric_limits<double>::infinity();
    }

    double coupling(double v) const {
        const double a = std::abs(v);
        if (!active_ || a <= M_) return v;
        const double sign = v < 0.0 ? -1.0 : 1.0;
        if (a >= 2.0 * M_) return sign * plateau();
        return sign * (M_ + M_ * ramp_integral((a - M_) / M_));
    }

    double coupling_prime(double v) const {
        const double a = std::abs(v);
        if (!active_ || a <= M_) return 1.0;
        if (a >= 2.0 * M_) return 0.0;
        return 1.0 - smoothstep((a - M_) / M_);
    }

    // s' vanishes at both ramp ends, so the one-sided limits agree at |v| = M and 2M.
    double coupling_second(double v) const {
        const double a = std::abs(v);
        if (!active_ || a <= M_ || a >= 2.0 * M_) return 0.0;
        const double sign = v < 0.0 ? -1.0 : 1.0;
        return -sign * smoothstep_prime((a - M_) / M_) / M_;
    }

    /// Closed-form antiderivative of flux, odd in v.
    double flux_potential(double v) const {
        const double a = std::abs(v);
        if (!active_ || a <= M_) return v * v * v / 3.0;
        const double sign = v < 0.0 ? -1.0 : 1.0;
        const double top = M_ * M_ + 1.0;
        if (a <= top) return sign * blend_potential(a);
        return sign * (blend_potential(top) + 0.5 * (a * a - top * top));
    }

    /// 3M/2, the saturation value of coupling.
    double plateau() const { return 1.5 * M_; }

    static double smoothstep(double t) {
        if (t <= 0.0) return 0.0;
        if (t >= 1.0) return 1.0;
        return t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
    }

    static double smoothstep_prime(double t) {
        if (t <= 0.0 || t >= 1.0) return 0.0;
        const double u = t * (1.0 - t);
        return 30.0 * u * u;
    }

    /// integral_0^t (1 - s(r)) dr = t - 5/2 t^4 + 3 t^5 - t^6; equals 1/2 at t = 1.
    static double ramp_integral(double t) {
        const double t4 = t * t * t * t;
        return t - t4 * (2.5 + t * (-3.0 + t));
    }

private:
    TruncationFamily() = default;
    explicit TruncationFamily(double M) : active_(true), M_(M) {}

    double flux_width() const { return M_ * M_ + 1.0 - M_; }

    // M^3/3 + integral_M^a flux(r) dr for M <= a <= M^2 + 1.
    //   flux(r) = r^2 - s(t) (r^2 - r),  r = M + W t
    // and s(t) (r^2 - r) is a degree-7 polynomial in t integrated term by term.
    double blend_potential(double a) const {
        const double w = flux_width();
        const double t = (a - M_) / w;
        const std::array<double, 6> s{0.0, 0.0, 0.0, 10.0, -15.0, 6.0};
        const std::array<double, 3> p{M_ * M_ - M_, w * (2.0 * M_ - 1.0), w * w};
        double correction = 0.0;
        for (std::size_t k = 3; k < s.size(); ++k) {
            for (std::size_t m = 0; m < p.size(); ++m) {
                const double n = static_cast<double>(k + m + 1);
                correction += s[k] * p[m] * std::pow(t, n) / n;
            }
        }
        return a * a * a / 3.0 - w * correction;
    }

    bool active_ = false;
    double M_ = std::numeric_limits<double>::infinity();
};

}  // namespace swlw
