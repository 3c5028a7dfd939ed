#include <cmath>
#include <vector>

#include "pdmsym/jet.hpp"

namespace pdm {

namespace {

std::vector<double> udiv(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> r(a.size(), 0.0);
    for (size_t k = 0; k < a.size(); ++k) {
        double acc = a[k];
        for (size_t j = 1; j <= k; ++j) acc -= b[j] * r[k - j];
        r[k] = acc / b[0];
    }
    return r;
}

}  // namespace

std::vector<double> series_sqrt(double u0, int order) {
    if (!(u0 > 0.0)) throw EvalError("sqrt of non-positive value");
    std::vector<double> t(order + 1);
    t[0] = std::sqrt(u0);
    for (int k = 1; k <= order; ++k)
        t[k] = t[k - 1] * (1.5 / k - 1.0) / u0;  // binom(1/2,k) recurrence
    return t;
}

std::vector<double> series_exp(double u0, int order) {
    std::vector<double> t(order + 1);
    t[0] = std::exp(u0);
    for (int k = 1; k <= order; ++k) t[k] = t[k - 1] / k;
    return t;
}

std::vector<double> series_ln(double u0, int order) {
    if (!(u0 > 0.0)) throw EvalError("ln of non-positive value");
    std::vector<double> t(order + 1);
    t[0] = std::log(u0);
    double p = 1.0;
    for (int k = 1; k <= order; ++k) {
        p /= u0;
        t[k] = (k % 2 ? p : -p) / k;
    }
    return t;
}

std::vector<double> series_sin(double u0, int order) {
    std::vector<double> t(order + 1);
    const double cyc[4] = {std::sin(u0), std::cos(u0), -std::sin(u0), -std::cos(u0)};
    double fact = 1.0;
    for (int k = 0; k <= order; ++k) {
        if (k) fact *= k;
        t[k] = cyc[k % 4] / fact;
    }
    return t;
}

std::vector<double> series_cos(double u0, int order) {
    std::vector<double> t(order + 1);
    const double cyc[4] = {std::cos(u0), -std::sin(u0), -std::cos(u0), std::sin(u0)};
    double fact = 1.0;
    for (int k = 0; k <= order; ++k) {
        if (k) fact *= k;
        t[k] = cyc[k % 4] / fact;
    }
    return t;
}

std::vector<double> series_atan(double u0, int order) {
    // Integrate the table of 1/(1+u^2) termwise.
    std::vector<double> one(order + 1, 0.0), den(order + 1, 0.0);
    one[0] = 1.0;
    den[0] = 1.0 + u0 * u0;
    if (order >= 1) den[1] = 2.0 * u0;
    if (order >= 2) den[2] = 1.0;
    const std::vector<double> d = udiv(one, den);
    std::vector<double> t(order + 1);
    t[0] = std::atan(u0);
    for (int k = 1; k <= order; ++k) t[k] = d[k - 1] / k;
    return t;
}

}  // namespace pdm
