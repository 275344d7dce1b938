#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nlclaw/convolve.hpp"
#include "nlclaw/core.hpp"
#include "nlclaw/interaction.hpp"
#include "nlclaw/mobility.hpp"

namespace nlclaw {

/// One evolution problem: du/dt + div(f(u) K*u) = eps * Lap(u) on the torus.
struct Problem {
    Grid grid;
    Field u0;
    InteractionKernel kernel;
    Mobility mobility;
    double epsilon = 0.0;
    double horizon = 0.0;
    double cfl_advection = 0.45;
    double cfl_diffusion = 0.45;
    double blowup_threshold = 1e6;
    /// Fraction of the torus regarded as the physical region when emulating
    /// compact support; 1.0 disables the check (torus-native models).
    double support_fraction = 0.5;
};

void validate_problem(const Problem& p);

struct State {
    double time = 0.0;
    Field u;
    long step_count = 0;
    bool blown_up = false;
};

struct DiagnosticsRow {
    double t, dt, mass, l1, linf, tv, entropy_residual_max, force_linf;
    bool blown_up;
};
using DiagnosticsSeries = std::vector<DiagnosticsRow>;

struct RunResult {
    std::vector<State> snapshots;
    DiagnosticsSeries diagnostics;
    bool support_ok = true;
};

/// Stable step size from the current state:
///   min( cfl_advection * h / (sum over axes of max|f'(u) V_a| + max|f(u)| h |div V|),
///        cfl_diffusion * h^2 / (2 d eps) ).
/// Returns +infinity when both limits are free.
double cfl_dt(const State& s, const Problem& p);

/// One two-stage SSP Runge-Kutta step with local Lax-Friedrichs fluxes and an
/// explicit second-order Laplacian. The force is recomputed once per stage.
/// Non-finite or threshold-exceeding results flag the state, not an exception.
State step(const State& s, const Problem& p, double dt);

/// March from u0 to the horizon, emitting snapshots at exactly the requested
/// times (strictly increasing, within [0, horizon]). Blowup truncates the run
/// and appends the flagged state. Identical inputs give bitwise identical
/// trajectories on one platform.
RunResult run(const Problem& p, std::span<const double> output_times);

struct PicardResult {
    Field terminal;
    /// Contraction factor per iteration starting at the second:
    /// |v^(j+1) - v^j|_X / |v^j - v^(j-1)|_X with X = sup over substeps of
    /// max(L1, Linf).
    std::vector<double> contraction_factors;
    bool contractive = true;
    /// Short-horizon contraction threshold eps / (4 |K|_L1^2 (R sup|f'| + sup|f|)^2)
    /// with R = 2 max(|u0|_L1, |u0|_Linf) and sups over [-2R, 2R].
    double threshold = 0.0;
};

/// Mild-solution fixed-point iterator on [0, t_short] (requires epsilon > 0):
/// F(v)(t) = heat(t) u0 - integral_0^t heat(t-s) div(f(v) K*v)(s) ds with
/// right-endpoint quadrature on a fixed substep grid and spectral heat factors.
PicardResult picard_iterate(const Problem& p, double t_short, int iterations,
                            int substeps = 64);

struct BlowupReport {
    double time;
    double linf;
};
std::optional<BlowupReport> detect_blowup(const DiagnosticsSeries& d, const Problem& p);

/// Spectral heat semigroup e^(eps t Lap) applied to a field.
Field heat_evolve(const Field& f, double epsilon, double t);

/// CSV with header t,dt,mass,l1,linf,tv,entropy_residual_max,force_linf,blown_up.
void write_diagnostics_csv(const std::string& path, const DiagnosticsSeries& d);

}  // namespace nlclaw
