#ifndef VSPIKE_NONLINEARITY_HPP
#define VSPIKE_NONLINEARITY_HPP

#include <cmath>
#include <stdexcept>

namespace vspike {

// Vorticity function family gamma(t) = t - |t|^p t.  Normalized so that
// gamma(0) = 0 and gamma'(0) = 1; odd in t.
struct NonlinearitySpec {
    int p = 2;

    NonlinearitySpec() = default;
    explicit NonlinearitySpec(int p_) : p(p_) {
        if (p < 1) throw std::invalid_argument("NonlinearitySpec: p must be >= 1");
    }
};

inline double gamma_eval(const NonlinearitySpec& spec, double t) {
    return t - std::pow(std::abs(t), spec.p) * t;
}

inline double gamma_prime(const NonlinearitySpec& spec, double t) {
    return 1.0 - (spec.p + 1) * std::pow(std::abs(t), spec.p);
}

} // namespace vspike

#endif
