#pragma once

#include <span>
#include <string>
#include <vector>

#include "nlclaw/initial_data.hpp"
#include "nlclaw/solver.hpp"

namespace nlclaw {

/// Monitor curve: an a-priori bound evaluated along requested times.
struct BoundCurve {
    enum class Kind { linfty, tv };
    Kind kind = Kind::linfty;
    std::vector<double> times;
    std::vector<double> values;
    bool truncated = false;     // ODE blew up before the last requested time
    double blowup_time = 0.0;   // meaningful when truncated
};

struct LinftyCurve {
    BoundCurve curve;
    double doubling_time = 0.0;  // +inf when the bound never doubles
};

/// Integrates y' = c y (1 + y^alpha), y(0) = u0_linf, with adaptive classic
/// Runge-Kutta; doubling_time is located by bisection on the dense output.
LinftyCurve linfty_bound_curve(double u0_linf, double alpha, double c_times_divtv,
                               std::span<const double> times);

/// Which terms of the growth rate the TV envelope integrates.
enum class TvBoundTerms { full, divergence, gradient };

/// A(t) = integral_0^t [sup|f|(M(s)) div_tv + sup|f'|(M(s)) tv_K M(s)] ds with
/// M(s) the L-infinity bound curve; returns e^{A(t)} TV(u0).
BoundCurve tv_bound_curve(const Problem& p, const BoundCurve& linf_curve,
                          std::span<const double> times,
                          TvBoundTerms terms = TvBoundTerms::full);

struct RateStudy {
    std::vector<double> epsilons;
    double ref_epsilon = 0.0;
    std::vector<double> distances;  // sup over output times of L1 distance to the reference
    double fitted_slope = 0.0;
    double fitted_constant = 0.0;
    double r_squared = 0.0;
    bool aborted = false;           // a run blew up; distances holds the completed prefix
    std::string abort_reason;
};

/// Runs each epsilon (strictly decreasing, >= 4 entries) plus a reference on
/// the same grid and fits log(distance) against log(epsilon). The reference
/// is the self-finest run at min(epsilons)/16, or an external trajectory on
/// the study's output times. The horizon must sit below the L-infinity bound
/// doubling time (ode_constant scales the bound ODE).
RateStudy rate_study(const Problem& p, std::span<const double> epsilons, double T,
                     double ode_constant = 1.0);
RateStudy rate_study(const Problem& p, std::span<const double> epsilons, double T,
                     std::span<const State> external_reference, double ref_epsilon,
                     double ode_constant = 1.0);

/// Output times used by the studies: count uniform samples ending at T.
std::vector<double> study_times(double T, int count = 17);

struct NamedPerturbation {
    std::string name;
    Field delta;
};

/// shift (one-cell cyclic shift difference), amplitude (relative scaling),
/// bump (localized Gaussian), each scaled to |delta|_L1 <= 0.05 |u0|_L1.
std::vector<NamedPerturbation> standard_perturbations(const Field& u0);

struct StabilityRow {
    std::string name;
    double initial_distance = 0.0;
    double sup_distance = 0.0;
    double ratio = 0.0;
    bool skipped = false;
    std::string note;
};

struct StabilityStudy {
    std::vector<StabilityRow> rows;
    double prediction = 0.0;  // Gronwall amplification bound
    bool all_within_bound = true;
};

/// Runs u0 and u0 + delta for each perturbation and reports the L1
/// amplification ratio sup_t d(u,v) / d(u0,v0) against the Gronwall
/// prediction exp(T [TV_bound sup|f'| |K|_inf + sup|f| div_tv]) built from
/// the propagated bound curves.
StabilityStudy stability_study(const Problem& p,
                               std::span<const NamedPerturbation> perturbations,
                               double T, double ode_constant = 1.0);

/// d=1 torus of unit length, logistic mobility, smoothing-kernel force
/// (K = grad (1 - Lap)^{-1}); u0 values must lie in [0, 1].
Problem preset_hks(int n, double epsilon, double T, const U0Spec& u0);

/// d=1 torus of unit length, power mobility xi^m, Coulomb-gradient force
/// (K = -grad (-Lap)^{-1} on mean-zero data); u0 must be strictly positive.
Problem preset_cgv(int n, double m_exponent, double epsilon, double T,
                   const U0Spec& u0);

}  // namespace nlclaw
