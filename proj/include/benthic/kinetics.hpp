#ifndef BENTHIC_KINETICS_HPP
#define BENTHIC_KINETICS_HPP

#include <array>
#include <cmath>
#include <complex>
#include <sstream>

#include <Eigen/Dense>

#include "benthic/errors.hpp"
#include "benthic/parameters.hpp"

namespace benthic {

namespace detail {

inline void check_kinetics_domain(double u, double v, const ParameterSet& p) {
    if (!std::isfinite(u) || !std::isfinite(v)) {
        throw DomainError("kinetics evaluated at a non-finite state");
    }
    // Newton iterates may dip below zero; the poles at u = -k and v = -1 may not be approached.
    if (u <= -0.5 * p.k || v <= -0.5) {
        std::ostringstream os;
        os << "kinetics evaluated outside u > -k/2, v > -1/2 at (" << u << ", " << v << ")";
        throw DomainError(os.str());
    }
}

/// Derivatives 0..3 of the activity-weighted uptake P(u) = (gamma + (1-gamma) u/(k+u)) u.
inline std::array<double, 4> uptake_derivatives(double u, const ParameterSet& p) {
    const double s = p.k + u;
    const double a = 1.0 - p.gamma;
    return {p.gamma * u + a * u * u / s,
            p.gamma + a * (2.0 * p.k * u + u * u) / (s * s),
            a * 2.0 * p.k * p.k / (s * s * s),
            -a * 6.0 * p.k * p.k / (s * s * s * s)};
}

/// Derivatives 0..3 of the nutrient saturation Q(v) = v/(1+v).
inline std::array<double, 4> saturation_derivatives(double v) {
    const double s = 1.0 + v;
    return {v / s, 1.0 / (s * s), -2.0 / (s * s * s), 6.0 / (s * s * s * s)};
}

}  // namespace detail

/// Reaction term f = (g, h) of the rescaled system.
inline StateVector reaction(const StateVector& w, const ParameterSet& p) {
    detail::check_kinetics_domain(w.u, w.v, p);
    const double uptake = detail::uptake_derivatives(w.u, p)[0] * w.v / (1.0 + w.v);
    return {uptake - p.m * w.u + p.eps, -uptake + p.sigma * (p.v0 - w.v)};
}

/// All partial derivatives d_u^a d_v^b of g and h with a + b <= 3 at one state.
///
/// Both components share the product structure P(u) Q(v), so every mixed partial
/// of order >= 2 of h is the negative of the corresponding partial of g.
class DerivativeTensor {
public:
    DerivativeTensor() = default;

    DerivativeTensor(const StateVector& w, const ParameterSet& p) : state_(w) {
        detail::check_kinetics_domain(w.u, w.v, p);
        const auto P = detail::uptake_derivatives(w.u, p);
        const auto Q = detail::saturation_derivatives(w.v);
        for (int a = 0; a <= 3; ++a) {
            for (int b = 0; a + b <= 3; ++b) {
                g_[a][b] = P[a] * Q[b];
                h_[a][b] = -P[a] * Q[b];
            }
        }
        xi_ = P[1] * Q[0];
        theta_ = P[0] * Q[1];
        g_[0][0] += -p.m * w.u + p.eps;
        g_[1][0] -= p.m;
        h_[0][0] += p.sigma * (p.v0 - w.v);
        h_[0][1] -= p.sigma;
    }

    /// d_u^a d_v^b g at the expansion point; (0,0) is g itself.
    double g(int a, int b) const { return g_.at(a).at(b); }
    double h(int a, int b) const { return h_.at(a).at(b); }

    /// Both components of d_u^a d_v^b f.
    Eigen::Vector2d f(int a, int b) const { return {g(a, b), h(a, b)}; }

    double xi() const noexcept { return xi_; }
    double theta() const noexcept { return theta_; }
    const StateVector& state() const noexcept { return state_; }

    /// (g_u g_v; h_u h_v) = (xi - m, theta; -xi, -theta - sigma).
    Eigen::Matrix2d jacobian() const {
        Eigen::Matrix2d J;
        J << g_[1][0], g_[0][1], h_[1][0], h_[0][1];
        return J;
    }

private:
    std::array<std::array<double, 4>, 4> g_{};
    std::array<std::array<double, 4>, 4> h_{};
    double xi_ = 0.0;
    double theta_ = 0.0;
    StateVector state_{};
};

inline DerivativeTensor derivatives(const StateVector& w, const ParameterSet& p) { return DerivativeTensor(w, p); }

template <typename T>
using Vec2 = Eigen::Matrix<T, 2, 1>;

/// Symmetric bilinear form of the second-order Taylor term: f(w* + x) = f(w*) + J x + B(x, x) + ...
template <typename T>
Vec2<T> bilinear_B(const Vec2<T>& p, const Vec2<T>& q, const DerivativeTensor& d) {
    Vec2<T> out;
    for (int c = 0; c < 2; ++c) {
        auto D = [&](int a, int b) { return c == 0 ? d.g(a, b) : d.h(a, b); };
        out[c] = T(0.5 * D(1, 1)) * (p[0] * q[1] + p[1] * q[0]) +
                 T(0.5) * (T(D(2, 0)) * (p[0] * q[0]) + T(D(0, 2)) * (p[1] * q[1]));
    }
    return out;
}

/// Symmetric trilinear form of the third-order Taylor term.
template <typename T>
Vec2<T> trilinear_C(const Vec2<T>& p, const Vec2<T>& q, const Vec2<T>& r, const DerivativeTensor& d) {
    Vec2<T> out;
    for (int c = 0; c < 2; ++c) {
        auto D = [&](int a, int b) { return T(c == 0 ? d.g(a, b) : d.h(a, b)); };
        out[c] = (D(3, 0) * p[0] * q[0] * r[0] + D(0, 3) * p[1] * q[1] * r[1] +
                  D(2, 1) * (p[0] * q[0] * r[1] + r[0] * p[0] * q[1] + q[0] * r[0] * p[1]) +
                  D(1, 2) * (p[0] * q[1] * r[1] + r[0] * p[1] * q[1] + q[0] * r[1] * p[1])) /
                 T(6.0);
    }
    return out;
}

}  // namespace benthic

#endif
