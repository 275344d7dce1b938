#pragma once

#include <span>
#include <vector>

#include "nlclaw/core.hpp"

namespace nlclaw {

/// Nonlinear mobility f with evaluator, derivative, and growth metadata.
/// Construction validates |f(xi)| <= C (1 + |xi|^alpha) and finiteness of f, f'
/// on a sampled interval ([-10, 10]; [0, 10] for the power kind).
class Mobility {
  public:
    enum class Kind { polynomial, power, logistic, logistic_power };

    /// f(xi) = c0 + c1 xi + ... (empty list is the zero mobility).
    static Mobility polynomial(std::vector<double> coeffs);
    /// f(xi) = xi^m on xi >= 0; negative arguments are a domain error.
    /// Requires m >= 1 so f' stays finite at 0.
    static Mobility power(double m);
    /// f(xi) = xi (1 - xi).
    static Mobility logistic();
    /// f(xi) = xi sgn(1-xi) |1-xi|^alpha, alpha >= 1 (equals xi (1-xi)^alpha
    /// on the model range xi <= 1; sign-preserving extension keeps f in C^1).
    static Mobility logistic_power(double alpha);

    double operator()(double xi) const;
    double derivative(double xi) const;

    /// Bulk evaluation for stage loops. Never throws: domain violations
    /// (power mobility at xi < 0) evaluate to NaN so positivity loss surfaces
    /// as a blowup flag downstream.
    void eval_arrays(std::span<const double> u, std::span<double> f,
                     std::span<double> fp) const;

    struct Bounds {
        double sup_f;
        double sup_fprime;
    };
    /// sup of |f| and |f'| over [-M, M] (power kind: over [0, M]).
    /// Closed form per kind; polynomial uses dense sampling.
    Bounds bounds(double M) const;

    Kind kind() const { return kind_; }
    /// m (power) or alpha (logistic_power).
    double exponent() const { return exponent_; }
    double growth_exponent() const { return growth_exponent_; }
    double growth_constant() const { return growth_constant_; }
    const std::vector<double>& coefficients() const { return coeffs_; }

  private:
    Mobility() = default;
    void validate() const;

    Kind kind_ = Kind::logistic;
    double exponent_ = 0.0;
    std::vector<double> coeffs_;
    double growth_exponent_ = 1.0;
    double growth_constant_ = 1.0;
};

}  // namespace nlclaw
