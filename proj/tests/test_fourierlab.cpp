#include "cancelkit/fourierlab.hpp"

#include <gtest/gtest.h>

#include <numbers>

using namespace cancelkit;

namespace {

constexpr double pi = std::numbers::pi;

CatalogParams params(int n, std::optional<int> m = {}) {
    CatalogParams p;
    p.n = n;
    p.m = m;
    return p;
}

template <class F>
GridField sample(int n, std::size_t N, std::size_t dim, F&& f) {
    GridField u(n, N, dim);
    std::vector<double> x(static_cast<std::size_t>(n));
    for (std::size_t idx = 0; idx < u.points(); ++idx) {
        std::size_t rest = idx;
        for (int i = n - 1; i >= 0; --i) {
            x[static_cast<std::size_t>(i)] = u.coordinate(rest % N);
            rest /= N;
        }
        for (std::size_t c = 0; c < dim; ++c) u(c, idx) = f(c, x.data());
    }
    return u;
}

double max_diff(const GridField& a, const GridField& b) {
    double m = 0;
    for (std::size_t i = 0; i < a.values.size(); ++i) m = std::max(m, std::abs(a.values[i] - b.values[i]));
    return m;
}

OperatorSpec scalar_partial(int n, int axis) {
    OperatorSpec op;
    op.n = n;
    op.k = 1;
    op.dim_v = op.dim_e = 1;
    MultiIndex a(static_cast<std::size_t>(n), 0);
    a[static_cast<std::size_t>(axis)] = 1;
    op.terms.emplace(a, RatMatrix{{1}});
    return op;
}

}  // namespace

TEST(GridField, RejectsBadSizes) {
    EXPECT_THROW(GridField(2, 12, 1), std::invalid_argument);
    EXPECT_THROW(GridField(0, 8, 1), std::invalid_argument);
    EXPECT_NO_THROW(GridField(3, 8, 2));
}

TEST(GridField, FrequencyOrder) {
    EXPECT_EQ(frequency(0, 8), 0);
    EXPECT_EQ(frequency(3, 8), 3);
    EXPECT_EQ(frequency(4, 8), -4);
    EXPECT_EQ(frequency(7, 8), -1);
}

TEST(ApplySymbol, LaplacianOfProductOfSines) {
    // Delta sin(x1) sin(2 x2) = -5 sin(x1) sin(2 x2)
    const auto u = sample(2, 32, 1, [](std::size_t, const double* x) { return cplx(std::sin(x[0]) * std::sin(2 * x[1]), 0); });
    const auto out = apply_symbol(catalog("laplacian", params(2)), u);
    auto expect = u;
    for (auto& v : expect.values) v *= -5;
    EXPECT_LT(max_diff(out, expect), 1e-12);
}

TEST(ApplySymbol, GradientOfCosine) {
    const auto u = sample(2, 16, 1, [](std::size_t, const double* x) { return cplx(std::cos(3 * x[1]), 0); });
    const auto out = apply_symbol(catalog("gradient", params(2)), u);
    const auto expect = sample(2, 16, 2, [](std::size_t c, const double* x) { return cplx(c == 0 ? 0 : -3 * std::sin(3 * x[1]), 0); });
    EXPECT_LT(max_diff(out, expect), 1e-12);
}

TEST(ApplySymbol, ShapeMismatchThrows) {
    GridField u(2, 8, 2);
    EXPECT_THROW(apply_symbol(catalog("laplacian", params(2)), u), DimensionError);
}

TEST(ApplySymbol, Linear) {
    std::mt19937_64 rng(7);
    const auto op = catalog("hodge", params(3, 1));
    for (int t = 0; t < 5; ++t) {
        const auto u = random_band_limited(3, 16, op.dim_v, rng);
        const auto v = random_band_limited(3, 16, op.dim_v, rng);
        auto w = u;
        for (std::size_t i = 0; i < w.values.size(); ++i) w.values[i] = 2.0 * u.values[i] - 3.0 * v.values[i];
        auto lhs = apply_symbol(op, w);
        const auto au = apply_symbol(op, u), av = apply_symbol(op, v);
        for (std::size_t i = 0; i < lhs.values.size(); ++i) lhs.values[i] -= 2.0 * au.values[i] - 3.0 * av.values[i];
        EXPECT_LT(lp_norm(lhs, 2), 1e-9 * lp_norm(au, 2));
    }
}

TEST(SolvePseudo, InvertsLaplacianModes) {
    const auto f = sample(2, 32, 1, [](std::size_t, const double* x) { return cplx(std::cos(x[0] + 2 * x[1]) + 4, 0); });
    const auto u = solve_pseudo(catalog("laplacian", params(2)), f);
    const auto expect = sample(2, 32, 1, [](std::size_t, const double* x) { return cplx(-std::cos(x[0] + 2 * x[1]) / 5, 0); });
    EXPECT_LT(max_diff(u, expect), 1e-12);
}

TEST(SolvePseudo, ConstantMapsToZero) {
    GridField f(2, 16, 1);
    for (auto& v : f.values) v = 3;
    const auto u = solve_pseudo(catalog("laplacian", params(2)), f);
    EXPECT_LT(lp_norm(u, HUGE_VAL), 1e-14);
}

TEST(SolvePseudo, RoundTripOnEllipticOperators) {
    std::mt19937_64 rng(3);
    for (const auto& op : {catalog("hodge", params(3, 1)), catalog("sym_grad", params(2)), catalog("cauchy_riemann")}) {
        auto u = project_modes(random_band_limited(op.n, 32, op.dim_v, rng));
        const auto back = solve_pseudo(op, apply_symbol(op, u));
        EXPECT_LT(max_diff(back, u), 1e-8) << op.name;
    }
}

TEST(SolvePseudo, NonEllipticThrows) {
    GridField f(2, 16, 1);
    f.values[5] = 1;
    try {
        solve_pseudo(scalar_partial(2, 0), f);
        FAIL();
    } catch (const std::domain_error& e) {
        EXPECT_NE(std::string(e.what()).find("not elliptic"), std::string::npos);
    }
}

TEST(Norms, ConstantField) {
    for (int n : {1, 2, 3}) {
        GridField u(n, 8, 1);
        for (auto& v : u.values) v = -2;
        for (double p : {1.0, 1.5, 2.0, 4.0}) EXPECT_NEAR(lp_norm(u, p), 2 * std::pow(2 * pi, n / p), 1e-10);
        EXPECT_DOUBLE_EQ(lp_norm(u, HUGE_VAL), 2);
    }
}

TEST(Norms, RejectsSmallExponent) {
    GridField u(2, 8, 1);
    EXPECT_THROW(lp_norm(u, 0.5), std::invalid_argument);
}

TEST(Norms, HomogeneousInTheField) {
    std::mt19937_64 rng(11);
    auto u = random_band_limited(2, 32, 3, rng);
    const double base = lp_norm(u, 1.5), hb = hardy_norm(u, 1);
    for (auto& v : u.values) v *= -2.5;
    EXPECT_NEAR(lp_norm(u, 1.5), 2.5 * base, 1e-10 * base);
    EXPECT_NEAR(hardy_norm(u, 1), 2.5 * hb, 1e-10 * hb);
}

TEST(Norms, ParsevalMatchesRiemannSum) {
    std::mt19937_64 rng(5);
    for (int n : {1, 2, 3}) {
        const auto u = random_band_limited(n, 16, 2, rng);
        const double a = lp_norm(u, 2), b = spectral_l2_norm(u);
        EXPECT_NEAR(a, b, 1e-10 * a);
    }
}

TEST(Norms, RealFieldsAreConjugateSymmetric) {
    std::mt19937_64 rng(9);
    const auto u = random_band_limited(2, 32, 2, rng);
    EXPECT_LT(conjugate_symmetry_defect(u), 1e-10);
    auto w = u;
    w.values[1] += cplx(0, 1);
    EXPECT_GT(conjugate_symmetry_defect(w), 1e-3);
}

TEST(Norms, HardyOfSmallBumpsGrows) {
    // sum rho_delta / |x| on the torus: ~ 1/delta for a unit mass bump
    double prev = 0;
    for (double delta : {0.8, 0.4, 0.2}) {
        const double v = hardy_norm(mollifier(2, 256, delta), 1);
        EXPECT_GT(v, 1.5 * prev);
        prev = v;
    }
}

TEST(Norms, HardyConvergesToTheRadialIntegral) {
    // unit mass bump of radius 1 against 1/|x| in 2D: int rho(r) dr / int rho(r) r dr, by the midpoint rule
    double num = 0, den = 0;
    const int m = 200000;
    for (int i = 0; i < m; ++i) {
        const double r = (i + 0.5) / m, w = std::exp(1 / (r * r - 1));
        num += w;
        den += w * r;
    }
    const double exact = num / den;
    const double e128 = std::abs(hardy_norm(mollifier(2, 128, 1.0), 1) - exact);
    const double e256 = std::abs(hardy_norm(mollifier(2, 256, 1.0), 1) - exact);
    EXPECT_LT(e256, 0.6 * e128);
    EXPECT_LT(e256, 0.02 * exact);
}

TEST(Mollifier, UnitMassAndSupport) {
    for (int n : {1, 2, 3}) {
        const auto m = mollifier(n, 32, 0.9);
        EXPECT_NEAR(lp_norm(m, 1), 1, 1e-12);
        for (std::size_t i = 0; i < m.points(); ++i)
            if (m.radius(i) >= 0.9) {
                EXPECT_EQ(m.values[i], cplx(0, 0));
            }
    }
}

TEST(DerivativeTensor, HessianOfSine) {
    // u = sin x1 in 2D: D^2 u has the single entry -sin x1, and the weighted tensor norm is its L^2 norm pi sqrt 2
    const auto u = sample(2, 32, 1, [](std::size_t, const double* x) { return cplx(std::sin(x[0]), 0); });
    EXPECT_NEAR(lp_norm(derivative_tensor(u, 2), 2), pi * std::sqrt(2.0), 1e-10);
    EXPECT_NEAR(lp_norm(derivative_tensor(u, 0), 2), pi * std::sqrt(2.0), 1e-10);
}

TEST(DerivativeTensor, WeightsGiveTheFrobeniusNorm) {
    // u = sin(x1 + x2): every second derivative is -u, full Hessian has Frobenius norm 2|u|
    const auto u = sample(2, 32, 1, [](std::size_t, const double* x) { return cplx(std::sin(x[0] + x[1]), 0); });
    EXPECT_NEAR(lp_norm(derivative_tensor(u, 2), 2), 2 * lp_norm(u, 2), 1e-10);
}

TEST(ProjectModes, RemovesMean) {
    GridField u(2, 8, 1);
    for (auto& v : u.values) v = 1;
    u.values[3] = 5;
    const auto p = project_modes(u);
    cplx s = 0;
    for (const auto& v : p.values) s += v;
    EXPECT_LT(std::abs(s), 1e-12);
    EXPECT_TRUE(p.mean_zero);
}

TEST(ProbeL2, LaplacianRatiosAreOne) {
    const auto r = probe_l2(catalog("laplacian", params(2)), 30, 1);
    for (double x : r.ratios) EXPECT_NEAR(x, 1, 1e-8);
    EXPECT_TRUE(r.pass);
}

TEST(ProbeL2, BoundedByTheEllipticityConstant) {
    for (const auto& op : {catalog("hodge", params(4, 2)), catalog("sym_grad", params(2)), catalog("cauchy_riemann")}) {
        const auto r = probe_l2(op, 30, 2);
        EXPECT_TRUE(r.pass) << op.name << " " << r.statistic << " vs " << r.threshold;
    }
}

TEST(ProbeL2, SymGradSingleModesAttainTheConstant) {
    // sigma_min of the symmetric gradient is 1/sqrt 2 everywhere, so single eigen-mode trials sit at C
    const auto r = probe_l2(catalog("sym_grad", params(2)), 30, 4);
    EXPECT_NEAR(r.statistic, r.details["ellipticity_constant"].get<double>(), 1e-8);
}

TEST(ProbeL2, DeterministicForASeed) {
    const auto op = catalog("sym_grad", params(3));
    EXPECT_EQ(to_json(probe_l2(op, 20, 8, 16)).dump(), to_json(probe_l2(op, 20, 8, 16)).dump());
    EXPECT_NE(to_json(probe_l2(op, 20, 8, 16)).dump(), to_json(probe_l2(op, 20, 9, 16)).dump());
}

TEST(EndpointProbe, ParameterRange) {
    EXPECT_THROW(probe_sobolev(catalog("sym_grad", params(2)), 1), std::invalid_argument);
    EXPECT_THROW(probe_hardy(catalog("laplacian", params(2)), 0), std::invalid_argument);
    EXPECT_THROW(endpoint_probe("other", catalog("laplacian", params(2)), 1, 3, 64, 1), std::invalid_argument);
}

TEST(EndpointProbe, LaplacianRatiosIncrease) {
    const auto r = probe_sobolev(catalog("laplacian", params(2)), 1, 3, 128);
    ASSERT_EQ(r.ratios.size(), 3u);
    for (double g : r.growth) EXPECT_GT(g, 1.0);
    EXPECT_FALSE(r.details["cancelling"].get<bool>());
}

TEST(EndpointProbe, CancellingSymGradStaysBounded) {
    const auto s = probe_sobolev(catalog("sym_grad", params(2)), 0, 3, 512);
    EXPECT_TRUE(s.pass) << s.statistic;
    const auto h = probe_hardy(catalog("sym_grad", params(2)), 0, 3, 512);
    EXPECT_TRUE(h.pass) << h.statistic;
}

TEST(EndpointProbe, StableUnderRefinement) {
    const auto op = catalog("sym_grad", params(2));
    const auto a = endpoint_probe("sobolev", op, 0, 3, 512, 1, 1);
    const auto b = endpoint_probe("sobolev", op, 0, 3, 1024, 1, 1);
    for (std::size_t i = 0; i < a.ratios.size(); ++i) EXPECT_NEAR(a.ratios[i], b.ratios[i], 0.1 * b.ratios[i]);
}

TEST(Duality, RequiresAnAnnihilator) {
    const auto a = catalog("gradient", params(2));
    EXPECT_THROW(probe_duality(symbol(catalog("laplacian", params(2))), a, 5), std::invalid_argument);
}

TEST(Duality, ConstantTestFieldGivesZero) {
    const auto f = times_vector(mollifier(2, 64, 0.5), Eigen::Vector2d(1, 0));
    GridField phi(2, 64, 2);
    for (auto& v : phi.values) v = 7;
    EXPECT_EQ(duality_ratio(f, phi), 0);
}

TEST(Duality, DivergenceFreeFieldsStayBounded) {
    const auto a = catalog("gradient", params(2));
    const auto r = probe_duality(compatibility_operator(a).L, a, 40, 1, 128);
    EXPECT_TRUE(r.details["bounded_pass"].get<bool>()) << r.statistic;
    EXPECT_LE(r.statistic, kDualitySpread);
}

TEST(Duality, ControlRatiosIncrease) {
    const auto a = catalog("gradient", params(2));
    const auto r = probe_duality(compatibility_operator(a).L, a, 4, 1, 256);
    const auto c = r.details["control_ratios"].get<std::vector<double>>();
    for (std::size_t i = 1; i < c.size(); ++i) EXPECT_GT(c[i], c[i - 1]);
}

TEST(KernelProbe, LogCaseRejected) {
    EXPECT_THROW(kernel_probe(catalog("laplacian", params(2))), std::invalid_argument);
}

TEST(KernelProbe, GradientAndCauchyRiemannSlopes) {
    for (const auto& op : {catalog("gradient", params(2)), catalog("cauchy_riemann")}) {
        const auto r = kernel_probe(op, 256);
        EXPECT_NEAR(r.statistic, -1, kSlopeTolerance) << op.name;
        EXPECT_TRUE(r.pass);
    }
}

TEST(ProbeReport, JsonAndCsvShape) {
    const auto r = kernel_probe(catalog("gradient", params(2)), 256);
    const auto j = to_json(r);
    std::vector<std::string> keys;
    for (const auto& [k, v] : j.items()) keys.push_back(k);
    const std::vector<std::string> expect{"probe", "operator", "params", "scales", "ratios", "growth", "criterion",
                                          "statistic", "threshold", "pass", "details"};
    EXPECT_EQ(keys, expect);
    const auto csv = to_csv(r);
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "index,scale,ratio");
    EXPECT_EQ(static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')), r.ratios.size() + 1);
}
