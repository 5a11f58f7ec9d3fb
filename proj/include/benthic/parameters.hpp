#ifndef BENTHIC_PARAMETERS_HPP
#define BENTHIC_PARAMETERS_HPP

#include <cmath>
#include <string>

#include "benthic/errors.hpp"

namespace benthic {

/// Kinetic and diffusion parameters of the bacteria-nutrient system.
///
/// Defaults are the standard set (k = 1, v0 = 4.125, eps = 0.005, m = 0.3175,
/// delta_u = 2e-5, delta_v = 1e-3). sigma and gamma are the two parameters
/// that are varied; the diffusion ratio is always derived, never stored.
struct ParameterSet {
    double k = 1.0;
    double v0 = 4.125;
    double eps = 0.005;
    double m = 0.3175;
    double delta_u = 2e-5;
    double delta_v = 1e-3;
    double sigma = 0.1;
    double gamma = 0.25;

    double delta() const noexcept { return delta_v / delta_u; }

    static ParameterSet standard(double sigma, double gamma) {
        ParameterSet p;
        p.sigma = sigma;
        p.gamma = gamma;
        return p;
    }

    ParameterSet with_sigma(double s) const {
        ParameterSet p = *this;
        p.sigma = s;
        return p;
    }

    /// Throws DomainError unless every field is finite and positive, gamma <= 1
    /// and delta_u < delta_v.
    void validate() const {
        auto positive = [](double x, const char* name) {
            if (!std::isfinite(x) || x <= 0.0) {
                throw DomainError(std::string("parameter ") + name + " must be finite and positive");
            }
        };
        positive(k, "k");
        positive(v0, "v0");
        positive(eps, "eps");
        positive(m, "m");
        positive(delta_u, "delta_u");
        positive(delta_v, "delta_v");
        positive(sigma, "sigma");
        positive(gamma, "gamma");
        if (gamma > 1.0) throw DomainError("parameter gamma must lie in (0, 1]");
        if (!(delta_u < delta_v)) throw DomainError("delta_u must be smaller than delta_v");
    }

    bool operator==(const ParameterSet&) const = default;
};

/// Bacteria density u and nutrient concentration v at one point.
struct StateVector {
    double u = 0.0;
    double v = 0.0;

    bool operator==(const StateVector&) const = default;
};

}  // namespace benthic

#endif
