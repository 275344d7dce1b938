#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "nlclaw/core.hpp"
#include "nlclaw/mobility.hpp"
#include "nlclaw/solver.hpp"

namespace nlclaw {

/// Kruzhkov constant k; entropy eta_k(u) = |u - k| and companion flux
/// q_k(u) = sgn(u - k)(f(u) - f(k)), with sgn(0) = 0.
struct KruzhkovLevel {
    double k = 0.0;
};

double kruzhkov_eta(double k, double u);
double kruzhkov_q(double k, double u, const Mobility& f);

struct EntropyResidualResult {
    double max_positive = 0.0;  // largest positive mollified residual seen
    double worst_level = 0.0;
    double worst_time = 0.0;
    Field worst_residual;       // smoothed residual field at the worst (level, time)
};

/// Discrete Kruzhkov residual of a trajectory:
///   R = D_t eta + div_h(q * V) + (sgn(u-k) f(u) - q) div V,  V = K*u,
/// with centered time differencing, the solver's interface flux applied to
/// (eta, q), and a 3-cell box smoothing pass per axis. Needs >= 3 uniformly
/// spaced snapshots.
EntropyResidualResult entropy_residual(std::span<const State> trajectory,
                                       const Problem& problem,
                                       std::span<const KruzhkovLevel> levels);

/// One doubled-variable integral test instance: transport field V, profiles
/// a (in x) and b (in y), nonnegative weight psi, compactly supported test
/// bump phi.
struct LemmaInstance {
    Grid grid;
    VectorField V;
    Field a;
    Field b;
    Field psi;
    Field phi;
    Mobility mobility = Mobility::logistic();
};

struct LemmaCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    double slack = 0.0;
    bool pass = false;
};

/// lhs = h^{2d} sum_{x,y} div_y[psi(x+y) phi(x-y) V(x)] . sgn(a(x)-b(y)) (f(a(x)) - f(b(y)))
/// with central differences in y; rhs = max|psi| ||phi||_1 TV(b) max|V| sup|f'|,
/// the sup over [-2||b||_inf, 2||b||_inf]. pass = lhs <= rhs + slack,
/// slack = 0.05 (|lhs| + rhs) + 1e-8.
LemmaCheck check_lemma_a(const LemmaInstance& inst);

/// Same with the factor V(x) - V(y) inside the divergence;
/// rhs = max|psi| sup|f'| TV(b) lipschitz_estimate(V) M1(phi),
/// M1(phi) = h^d sum |x| |phi(x)|.
LemmaCheck check_lemma_b(const LemmaInstance& inst);

/// Randomized instance: piecewise-constant profiles, smooth trigonometric V,
/// positive sinusoidal psi, signed quartic bump phi strictly inside the
/// fundamental cell, logistic mobility.
LemmaInstance random_lemma_instance(const Grid& grid, std::uint64_t seed);

/// Space/time mollifier pair built on the quartic bump (15/16)(1-s^2)^2,
/// each scaled profile discretely renormalized to unit mass on its lattice.
struct MollifierPair {
    double delta = 0.0;        // space half-width
    double eta = 0.0;          // time half-width
    double space_scale = 1.0;  // renormalization factors
    double time_scale = 1.0;

    double phi_space(double x) const;
    double dphi_space(double x) const;
    double phi_time(double t) const;
    double dphi_time(double t) const;
};

/// Renormalizes the space profile on the cell-difference lattice {k h} and
/// the time profile on {m snapshot_dt}. 1-d grids only.
MollifierPair make_mollifier_pair(const Grid& grid, double snapshot_dt,
                                  double delta, double eta);

/// Five-term doubled Kruzhkov functional Delta_{delta,eta}(T) comparing two
/// trajectories on a shared 1-d grid with shared uniform output times
/// (n <= 128, <= 64 snapshots), with midpoint quadrature in space and
/// trapezoid in time. Nonnegative (up to quadrature) when v is an entropy
/// solution; bounded below by -C eps/delta for a viscous v.
double kuznetsov_delta(std::span<const State> u_trajectory,
                       std::span<const State> v_trajectory,
                       const Problem& problem, const MollifierPair& mollifier);

/// sup_t ||u(t + lag) - u(t)||_L1 over a uniformly spaced trajectory; the lag
/// must be an integer multiple of the snapshot spacing, within the span.
double time_modulus(std::span<const State> trajectory, double lag);

}  // namespace nlclaw
