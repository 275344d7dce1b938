#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "nlclaw/field_ops.hpp"
#include "nlclaw/lab.hpp"

using namespace nlclaw;

namespace {

U0Spec sine_spec(double mean, double amp) {
    U0Spec s;
    s.kind = U0Spec::Kind::sine;
    s.mean = mean;
    s.amplitude = amp;
    s.frequency = 1;
    return s;
}

}  // namespace

TEST_CASE("growth ODE closed form, quadratic regime") {
    // y' = y(1 + y), y(0) = 1  =>  y(t) = e^t / (2 - e^t), valid below ln 2
    std::vector<double> times;
    for (int i = 0; i <= 6; ++i) times.push_back(0.1 * i);
    LinftyCurve lc = linfty_bound_curve(1.0, 1.0, 1.0, times);
    REQUIRE(lc.curve.values.size() == times.size());
    CHECK(!lc.curve.truncated);
    for (std::size_t i = 0; i < times.size(); ++i) {
        const double e = std::exp(times[i]);
        CHECK(lc.curve.values[i] == doctest::Approx(e / (2.0 - e)).epsilon(1e-8));
    }
    CHECK(lc.doubling_time == doctest::Approx(std::log(4.0 / 3.0)).epsilon(1e-8));
}

TEST_CASE("growth ODE closed form, exponential regime") {
    // alpha = 0: y' = 2 c y  =>  y = y0 e^{2 c t}
    const double c = 0.7, y0 = 0.3;
    std::vector<double> times{0.0, 0.25, 0.5, 1.0};
    LinftyCurve lc = linfty_bound_curve(y0, 0.0, c, times);
    for (std::size_t i = 0; i < times.size(); ++i)
        CHECK(lc.curve.values[i] ==
              doctest::Approx(y0 * std::exp(2.0 * c * times[i])).epsilon(1e-8));
    CHECK(lc.doubling_time == doctest::Approx(std::log(2.0) / (2.0 * c)).epsilon(1e-8));
}

TEST_CASE("growth ODE degenerate inputs") {
    std::vector<double> times{0.0, 1.0, 7.5};
    LinftyCurve flat = linfty_bound_curve(2.5, 1.0, 0.0, times);
    for (double v : flat.curve.values) CHECK(v == 2.5);
    CHECK(std::isinf(flat.doubling_time));

    LinftyCurve zero = linfty_bound_curve(0.0, 1.0, 3.0, times);
    for (double v : zero.curve.values) CHECK(v == 0.0);
    CHECK(std::isinf(zero.doubling_time));
}

TEST_CASE("growth ODE blowup is reported, not hidden") {
    std::vector<double> times;
    for (int i = 0; i <= 10; ++i) times.push_back(0.1 * i);  // past ln 2
    LinftyCurve lc = linfty_bound_curve(1.0, 1.0, 1.0, times);
    CHECK(lc.curve.truncated);
    CHECK(lc.curve.blowup_time == doctest::Approx(std::log(2.0)).epsilon(1e-6));
    CHECK(lc.curve.times.back() < std::log(2.0));
    for (double v : lc.curve.values) CHECK(std::isfinite(v));
}

TEST_CASE("growth ODE input validation") {
    std::vector<double> times{0.0, 1.0};
    CHECK_THROWS_AS(linfty_bound_curve(-1.0, 1.0, 1.0, times), error);
    CHECK_THROWS_AS(linfty_bound_curve(1.0, -0.5, 1.0, times), error);
    CHECK_THROWS_AS(linfty_bound_curve(1.0, 1.0, -1.0, times), error);
    CHECK_THROWS_AS(linfty_bound_curve(1.0, 1.0, 1.0, std::vector<double>{}), error);
    CHECK_THROWS_AS(linfty_bound_curve(1.0, 1.0, 1.0, std::vector<double>{-0.5, 1.0}),
                    error);
    CHECK_THROWS_AS(linfty_bound_curve(1.0, 1.0, 1.0, std::vector<double>{1.0, 0.5}),
                    error);
}

TEST_CASE("variation envelope with zero mobility stays put") {
    Problem p = preset_hks(64, 1e-3, 1.0, sine_spec(0.5, 0.4));
    p.mobility = Mobility::polynomial({});
    const double tv0 = total_variation(p.u0);
    std::vector<double> times{0.0, 0.5, 1.0};
    LinftyCurve lc = linfty_bound_curve(norm_linf(p.u0), 0.0, 0.0, times);
    BoundCurve tv = tv_bound_curve(p, lc.curve, times);
    REQUIRE(tv.values.size() == 3);
    for (double v : tv.values) CHECK(v == tv0);
    CHECK(tv.kind == BoundCurve::Kind::tv);
}

TEST_CASE("variation envelope closed form at frozen amplitude") {
    // c = 0 freezes M(s) at 1, so A(t) = t * g with a constant rate g that we
    // can assemble from the same public statistics the envelope uses
    Problem p = preset_hks(64, 1e-3, 1.0, sine_spec(0.5, 0.5));
    const double tv0 = total_variation(p.u0);
    std::vector<double> times{0.0, 0.3, 0.6, 1.0};
    LinftyCurve lc = linfty_bound_curve(1.0, 1.0, 0.0, times);

    const KernelStats& st = p.kernel.stats();
    const Mobility::Bounds b = p.mobility.bounds(1.0);
    const double g_div = b.sup_f * st.div_tv;
    const double g_grad = b.sup_fprime * st.tv * 1.0;

    BoundCurve full = tv_bound_curve(p, lc.curve, times, TvBoundTerms::full);
    BoundCurve divo = tv_bound_curve(p, lc.curve, times, TvBoundTerms::divergence);
    BoundCurve grad = tv_bound_curve(p, lc.curve, times, TvBoundTerms::gradient);
    for (std::size_t i = 0; i < times.size(); ++i) {
        const double t = times[i];
        CHECK(full.values[i] ==
              doctest::Approx(std::exp(t * (g_div + g_grad)) * tv0).epsilon(1e-10));
        CHECK(divo.values[i] == doctest::Approx(std::exp(t * g_div) * tv0).epsilon(1e-10));
        CHECK(grad.values[i] == doctest::Approx(std::exp(t * g_grad) * tv0).epsilon(1e-10));
    }
}

TEST_CASE("variation envelope input validation") {
    Problem p = preset_hks(32, 1e-3, 1.0, sine_spec(0.5, 0.4));
    std::vector<double> times{0.0, 1.0};
    LinftyCurve lc = linfty_bound_curve(1.0, 1.0, 0.0, times);

    BoundCurve wrong = lc.curve;
    wrong.kind = BoundCurve::Kind::tv;
    CHECK_THROWS_AS(tv_bound_curve(p, wrong, times), error);
    CHECK_THROWS_AS(tv_bound_curve(p, lc.curve, std::vector<double>{0.0, 2.0}),
                    resolution_error);
    CHECK_THROWS_AS(tv_bound_curve(p, lc.curve, std::vector<double>{}), error);
}

TEST_CASE("study time grids") {
    std::vector<double> t = study_times(0.8);
    REQUIRE(t.size() == 17);
    CHECK(t.front() == 0.0);
    CHECK(t.back() == 0.8);
    for (std::size_t i = 1; i < t.size(); ++i)
        CHECK(t[i] - t[i - 1] == doctest::Approx(0.05).epsilon(1e-12));
    CHECK(study_times(1.0, 2).size() == 2);
    CHECK_THROWS_AS(study_times(0.0), error);
    CHECK_THROWS_AS(study_times(1.0, 1), error);
}

TEST_CASE("vanishing-viscosity study on pure diffusion") {
    // zero mobility: u_eps(t) = heat(eps t) u0, so the distance to the far
    // finer reference scales like eps itself and the fit should say so
    Problem p = preset_hks(64, 1e-3, 0.05, sine_spec(0.5, 0.4));
    p.mobility = Mobility::polynomial({});
    std::vector<double> eps{4e-3, 2e-3, 1e-3, 5e-4};
    RateStudy rs = rate_study(p, eps, 0.05);
    CHECK(!rs.aborted);
    REQUIRE(rs.distances.size() == 4);
    CHECK(rs.ref_epsilon == eps.back() / 16.0);
    CHECK(rs.fitted_slope == doctest::Approx(1.0).epsilon(0.1));
    CHECK(rs.r_squared > 0.99);
    for (std::size_t i = 1; i < rs.distances.size(); ++i)
        CHECK(rs.distances[i] < rs.distances[i - 1]);

    // handing the same reference in explicitly reproduces the study
    Problem pr = p;
    pr.epsilon = rs.ref_epsilon;
    pr.horizon = 0.05;
    RunResult ref = run(pr, study_times(0.05));
    RateStudy ext = rate_study(p, eps, 0.05, ref.snapshots, rs.ref_epsilon);
    CHECK(ext.fitted_slope == doctest::Approx(rs.fitted_slope).epsilon(1e-12));
    for (std::size_t i = 0; i < 4; ++i)
        CHECK(ext.distances[i] == rs.distances[i]);
}

TEST_CASE("vanishing-viscosity study input validation") {
    Problem p = preset_hks(32, 1e-3, 0.05, sine_spec(0.5, 0.4));
    std::vector<double> three{4e-3, 2e-3, 1e-3};
    CHECK_THROWS_AS(rate_study(p, three, 0.05), error);
    std::vector<double> rising{1e-3, 2e-3, 4e-3, 8e-3};
    CHECK_THROWS_AS(rate_study(p, rising, 0.05), error);
    std::vector<double> repeat{4e-3, 2e-3, 2e-3, 1e-3};
    CHECK_THROWS_AS(rate_study(p, repeat, 0.05), error);
    std::vector<double> eps{4e-3, 2e-3, 1e-3, 5e-4};
    CHECK_THROWS_AS(rate_study(p, eps, 0.0), error);
    // horizon beyond the amplitude-doubling guard
    CHECK_THROWS_AS(rate_study(p, eps, 50.0), error);

    Grid g = p.grid;
    std::vector<State> bad_ref{{0.0, Field(g, 0.5), 0, false}};
    CHECK_THROWS_AS(rate_study(p, eps, 0.05, bad_ref, 1e-5), shape_error);
}

TEST_CASE("catalogued perturbations stay small") {
    Problem p = preset_hks(128, 1e-3, 0.1, sine_spec(0.5, 0.4));
    std::vector<NamedPerturbation> perts = standard_perturbations(p.u0);
    REQUIRE(perts.size() == 3);
    CHECK(perts[0].name == "shift");
    CHECK(perts[1].name == "amplitude");
    CHECK(perts[2].name == "bump");
    const double cap = 0.05 * norm_l1(p.u0);
    for (const auto& pert : perts) {
        CHECK(norm_l1(pert.delta) <= cap * (1.0 + 1e-12));
        CHECK(norm_l1(pert.delta) > 0.0);
        CHECK(all_finite(pert.delta));
    }
}

TEST_CASE("perturbation growth stays below the a-priori amplification") {
    Problem p = preset_hks(128, 1e-3, 0.1, sine_spec(0.5, 0.4));
    std::vector<NamedPerturbation> perts = standard_perturbations(p.u0);
    StabilityStudy st = stability_study(p, perts, 0.1);
    CHECK(st.prediction >= 1.0);
    CHECK(std::isfinite(st.prediction));
    REQUIRE(st.rows.size() == 3);
    for (const auto& row : st.rows) {
        CHECK(!row.skipped);
        CHECK(row.initial_distance > 0.0);
        CHECK(row.ratio <= st.prediction);
    }
    CHECK(st.all_within_bound);
}

TEST_CASE("zero perturbations are skipped, oversized ones rejected") {
    Problem p = preset_hks(64, 1e-3, 0.05, sine_spec(0.5, 0.4));
    std::vector<NamedPerturbation> perts;
    perts.push_back({"null", Field(p.grid, 0.0)});
    StabilityStudy st = stability_study(p, perts, 0.05);
    REQUIRE(st.rows.size() == 1);
    CHECK(st.rows[0].skipped);
    CHECK(st.all_within_bound);

    perts.clear();
    perts.push_back({"huge", Field(p.grid, 0.2)});  // 40% of |u0|_L1
    CHECK_THROWS_AS(stability_study(p, perts, 0.05), error);
}

TEST_CASE("smoothing-kernel preset") {
    Problem p = preset_hks(64, 1e-3, 0.5, sine_spec(0.5, 0.4));
    CHECK(p.grid.dim == 1);
    CHECK(p.grid.n == 64);
    CHECK(p.grid.length == 1.0);
    CHECK(p.kernel.tag() == KernelTag::hks);
    CHECK(p.mobility.kind() == Mobility::Kind::logistic);
    CHECK(p.epsilon == 1e-3);
    CHECK(p.horizon == 0.5);

    CHECK_THROWS_AS(preset_hks(64, 1e-3, 0.5, sine_spec(0.5, 0.7)),
                    invalid_field_error);  // dips below 0
}

TEST_CASE("Coulomb-gradient preset") {
    Problem p = preset_cgv(64, 2.0, 1e-3, 0.5, sine_spec(1.0, 0.5));
    CHECK(p.kernel.tag() == KernelTag::cgv);
    CHECK(p.mobility.kind() == Mobility::Kind::power);

    CHECK_THROWS_AS(preset_cgv(64, 2.0, 1e-3, 0.5, sine_spec(0.5, 0.6)),
                    invalid_field_error);  // touches zero

    // constant positive data is stationary for the zero-mean force
    U0Spec c;
    c.kind = U0Spec::Kind::constant;
    c.value = 1.3;
    Problem pc = preset_cgv(64, 2.0, 1e-3, 0.05, c);
    RunResult r = run(pc, std::vector<double>{0.05});
    REQUIRE(r.snapshots.size() == 1);
    CHECK(distance_linf(r.snapshots[0].u, pc.u0) <= 1e-13);
}
