#include "nlclaw/mobility.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace nlclaw {

namespace {

double horner(const std::vector<double>& c, double x) {
    double v = 0.0;
    for (std::size_t i = c.size(); i-- > 0;) v = v * x + c[i];
    return v;
}

double horner_derivative(const std::vector<double>& c, double x) {
    double v = 0.0;
    for (std::size_t i = c.size(); i-- > 1;) v = v * x + double(i) * c[i];
    return v;
}

double sgn(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

}  // namespace

Mobility Mobility::polynomial(std::vector<double> coeffs) {
    Mobility m;
    m.kind_ = Kind::polynomial;
    m.coeffs_ = std::move(coeffs);
    double csum = 0.0;
    for (double c : m.coeffs_) csum += std::abs(c);
    std::size_t deg = m.coeffs_.empty() ? 0 : m.coeffs_.size() - 1;
    m.growth_exponent_ = std::max<double>(double(deg), 1.0);
    m.growth_constant_ = std::max(csum, 1.0);
    m.validate();
    return m;
}

Mobility Mobility::power(double mexp) {
    if (!(mexp > 0.0))
        throw unsupported_error("mobility: power exponent must be positive");
    if (mexp < 1.0)
        throw unsupported_error(
            "mobility: power exponent below 1 gives an unbounded derivative at 0");
    Mobility m;
    m.kind_ = Kind::power;
    m.exponent_ = mexp;
    m.growth_exponent_ = mexp;
    m.growth_constant_ = 1.0;
    m.validate();
    return m;
}

Mobility Mobility::logistic() {
    Mobility m;
    m.kind_ = Kind::logistic;
    m.growth_exponent_ = 2.0;
    m.growth_constant_ = 2.0;
    m.validate();
    return m;
}

Mobility Mobility::logistic_power(double alpha) {
    if (!(alpha >= 1.0))
        throw unsupported_error("mobility: logistic-power exponent must be >= 1");
    Mobility m;
    m.kind_ = Kind::logistic_power;
    m.exponent_ = alpha;
    m.growth_exponent_ = alpha + 1.0;
    m.growth_constant_ = std::pow(2.0, alpha + 1.0);
    m.validate();
    return m;
}

double Mobility::operator()(double xi) const {
    switch (kind_) {
        case Kind::polynomial:
            return horner(coeffs_, xi);
        case Kind::power:
            if (xi < 0.0)
                throw std::domain_error(
                    "mobility: power kind evaluated at a negative argument");
            return std::pow(xi, exponent_);
        case Kind::logistic:
            return xi * (1.0 - xi);
        case Kind::logistic_power:
            return xi * sgn(1.0 - xi) * std::pow(std::abs(1.0 - xi), exponent_);
    }
    return 0.0;
}

double Mobility::derivative(double xi) const {
    switch (kind_) {
        case Kind::polynomial:
            return horner_derivative(coeffs_, xi);
        case Kind::power:
            if (xi < 0.0)
                throw std::domain_error(
                    "mobility: power kind evaluated at a negative argument");
            return exponent_ * std::pow(xi, exponent_ - 1.0);
        case Kind::logistic:
            return 1.0 - 2.0 * xi;
        case Kind::logistic_power: {
            double r = std::abs(1.0 - xi);
            return sgn(1.0 - xi) * std::pow(r, exponent_) -
                   exponent_ * xi * std::pow(r, exponent_ - 1.0);
        }
    }
    return 0.0;
}

void Mobility::eval_arrays(std::span<const double> u, std::span<double> f,
                           std::span<double> fp) const {
    const long n = long(u.size());
    switch (kind_) {
        case Kind::polynomial:
#pragma omp parallel for schedule(static) if (n > 1 << 15)
            for (long i = 0; i < n; ++i) {
                f[i] = horner(coeffs_, u[i]);
                fp[i] = horner_derivative(coeffs_, u[i]);
            }
            break;
        case Kind::power: {
            const double m = exponent_;
            const double nan = std::numeric_limits<double>::quiet_NaN();
#pragma omp parallel for schedule(static) if (n > 1 << 15)
            for (long i = 0; i < n; ++i) {
                double x = u[i];
                if (x < 0.0) {
                    f[i] = nan;
                    fp[i] = nan;
                } else {
                    f[i] = std::pow(x, m);
                    fp[i] = m * std::pow(x, m - 1.0);
                }
            }
            break;
        }
        case Kind::logistic:
#pragma omp parallel for schedule(static) if (n > 1 << 15)
            for (long i = 0; i < n; ++i) {
                f[i] = u[i] * (1.0 - u[i]);
                fp[i] = 1.0 - 2.0 * u[i];
            }
            break;
        case Kind::logistic_power: {
            const double a = exponent_;
#pragma omp parallel for schedule(static) if (n > 1 << 15)
            for (long i = 0; i < n; ++i) {
                double r = std::abs(1.0 - u[i]);
                double s = sgn(1.0 - u[i]);
                f[i] = u[i] * s * std::pow(r, a);
                fp[i] = s * std::pow(r, a) - a * u[i] * std::pow(r, a - 1.0);
            }
            break;
        }
    }
}

Mobility::Bounds Mobility::bounds(double M) const {
    if (!(M >= 0.0)) throw unsupported_error("mobility bounds: M must be >= 0");
    switch (kind_) {
        case Kind::power:
            return {std::pow(M, exponent_), exponent_ * std::pow(M, exponent_ - 1.0)};
        case Kind::logistic:
            return {M * (1.0 + M), 1.0 + 2.0 * M};
        case Kind::logistic_power: {
            double a = exponent_;
            std::vector<double> cf = {-M, M};
            std::vector<double> cfp = {-M, M};
            double ustar = 1.0 / (1.0 + a);
            if (ustar <= M) cf.push_back(ustar);
            double ustar2 = 2.0 / (1.0 + a);
            if (ustar2 <= M) cfp.push_back(ustar2);
            if (1.0 <= M) cfp.push_back(1.0);
            Bounds b{0.0, 0.0};
            for (double x : cf) b.sup_f = std::max(b.sup_f, std::abs((*this)(x)));
            for (double x : cfp) b.sup_fprime = std::max(b.sup_fprime, std::abs(derivative(x)));
            return b;
        }
        case Kind::polynomial: {
            Bounds b{0.0, 0.0};
            const int samples = 4096;
            for (int i = 0; i <= samples; ++i) {
                double x = -M + 2.0 * M * double(i) / samples;
                b.sup_f = std::max(b.sup_f, std::abs(horner(coeffs_, x)));
                b.sup_fprime = std::max(b.sup_fprime, std::abs(horner_derivative(coeffs_, x)));
            }
            return b;
        }
    }
    return {0.0, 0.0};
}

void Mobility::validate() const {
    const int samples = 2000;
    const double lo = kind_ == Kind::power ? 0.0 : -10.0;
    const double hi = 10.0;
    for (int i = 0; i <= samples; ++i) {
        double x = lo + (hi - lo) * double(i) / samples;
        double fx = (*this)(x);
        double fpx = derivative(x);
        if (!std::isfinite(fx) || !std::isfinite(fpx))
            throw unsupported_error("mobility: f or f' non-finite on the validation grid");
        double cap = growth_constant_ * (1.0 + std::pow(std::abs(x), growth_exponent_));
        if (std::abs(fx) > cap)
            throw unsupported_error("mobility: growth bound violated on the validation grid");
    }
}

}  // namespace nlclaw
