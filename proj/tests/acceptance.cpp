// Acceptance run: one PASS/FAIL line per criterion.
// Usage: acceptance [criterion...]; no argument runs all ten. Exit status 1 if any selected criterion fails.

#include "cancelkit/cancellation.hpp"
#include "cancelkit/fourierlab.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>

using namespace cancelkit;

namespace {

constexpr double pi = std::numbers::pi;

// Pinned tolerances.
constexpr double kRuntimeClassify = 60;      // s, criterion 1
constexpr double kWeakMagnitudeTol = 1e-6;   // criterion 5
constexpr double kWeakZeroTol = 1e-8;
constexpr double kPATol = 1e-6;
constexpr int kWeakLevel = 6;
constexpr double kL2Slack = 1e-6;            // criterion 7
constexpr double kL2UnitTol = 1e-8;
constexpr int kL2Trials = 100;
constexpr std::size_t kL2Grid = 64;
constexpr double kRuntimeL2 = 120;
constexpr double kRuntimeProbe = 60;         // criterion 8, per probe
constexpr int kDualityTrials = 200;
constexpr double kAreaTol = 1e-10;           // criterion 10
constexpr double kMomentTol = 1e-10;
constexpr double kSecondMomentTol = 1e-8;

struct Outcome {
    bool pass = true;
    std::ostringstream notes;

    void check(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            notes << " [fail: " << what << "]";
        }
    }
};

OperatorSpec op(const std::string& name, std::optional<int> n = {}, std::optional<int> m = {}, std::optional<Rational> lambda = {},
                std::optional<int> k = {}) {
    CatalogParams p;
    p.n = n;
    p.m = m;
    p.lambda = lambda;
    p.k = k;
    return catalog(name, p);
}

std::string label(const OperatorSpec& a) {
    std::string s = a.name + "(n=" + std::to_string(a.n);
    for (const auto& [key, v] : a.params)
        if (key != "n") s += "," + key + "=" + to_string(v);
    return s + ")";
}

double seconds_since(std::chrono::steady_clock::time_point t) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

EllipticityVerdict certify(const OperatorSpec& a) {
    double delta = 0.1;
    EllipticityVerdict v;
    for (int i = 0; i < 5; ++i, delta /= 2) {
        v = certify_elliptic(a, delta);
        if (v.status != EllipticStatus::Inconclusive) break;
    }
    return v;
}

struct TableRow {
    OperatorSpec op;
    bool elliptic;
    std::optional<bool> cancelling;  // unset: no asserted value
};

std::vector<TableRow> classification_table() {
    const auto q = [](long p, long d) { return make_rational(p, d); };
    return {
        {op("gradient", 2), true, true},
        {op("gradient", 3), true, true},
        {op("grad_k", 2, {}, {}, 2), true, true},
        {op("laplacian", 2), true, false},
        {op("laplacian", 3), true, false},
        {op("cauchy_riemann"), true, false},
        {op("hodge", 4, 1), true, false},
        {op("hodge", 4, 2), true, true},
        {op("hodge", 4, 3), true, false},
        {op("hodge", 3, 1), true, false},
        {op("hodge", 3, 2), true, false},
        {op("sym_grad", 2), true, true},
        {op("sym_grad", 3), true, true},
        {op("dev_sym_grad", 2, {}, q(-1, 2)), true, false},
        {op("dev_sym_grad", 2, {}, q(-1, 4)), true, true},
        {op("dev_sym_grad", 2, {}, q(0, 1)), true, true},
        {op("dev_sym_grad", 3, {}, q(-1, 3)), true, true},
        {op("dirac_laplace3"), true, false},
        {op("mazya", 3), true, std::nullopt},
    };
}

Outcome criterion1() {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    for (const auto& row : classification_table()) {
        const auto v = certify(row.op);
        const auto c = is_cancelling(row.op);
        o.check(v.status == (row.elliptic ? EllipticStatus::CertifiedElliptic : EllipticStatus::Counterexample),
                label(row.op) + " elliptic verdict " + to_string(v.status));
        if (row.cancelling) {
            o.check(c.cancelling == *row.cancelling, label(row.op) + " cancelling");
        } else {
            const auto s = sampled_image_intersection(row.op, 1);
            o.check(c.cross_check && s.subspace == c.intersection, label(row.op) + " exact/sampled disagree");
            o.notes << " " << label(row.op) << " cancelling=" << (c.cancelling ? "true" : "false") << " (sampled agrees)";
        }
    }
    const double t = seconds_since(t0);
    o.notes << " runtime=" << t << "s";
    o.check(t < kRuntimeClassify, "runtime");
    return o;
}

Outcome criterion2() {
    Outcome o;
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<int> num(-9, 9), den(1, 9);
    std::size_t count = 0;
    for (const auto& row : classification_table()) {
        if (!row.elliptic) continue;
        const auto& a = row.op;
        const auto c = compatibility_operator(a);
        o.check(is_zero_polymat(c.L * symbol(a)), label(a) + " L A != 0");
        const int expected = 2 * a.k * static_cast<int>(a.dim_v);
        o.check(c.degree == expected && (!c.L.degree() || *c.L.degree() == expected), label(a) + " deg L");
        for (int t = 0; t < 20; ++t) {
            std::vector<Rational> xi(static_cast<std::size_t>(a.n));
            bool nonzero = false;
            while (!nonzero) {
                for (auto& x : xi) {
                    x = make_rational(num(rng), den(rng));
                    nonzero = nonzero || x != 0;
                }
            }
            o.check(kernel_basis(c.L.eval(xi)) == image_basis(symbol_at(a, xi)), label(a) + " ker L(xi) != A(xi)[V]");
        }
        ++count;
    }
    o.notes << " operators=" << count << " points=20 each";
    return o;
}

std::vector<OperatorSpec> cocancelling_annihilators() {
    return {op("divergence", 2),         op("divergence", 3),         op("divergence", 4),     op("ext_derivative", 3, 0),
            op("ext_derivative", 3, 1),  op("ext_derivative", 3, 2),  op("ext_derivative", 4, 2), op("saint_venant", 2),
            op("saint_venant", 3),       op("div_pow", 2, {}, {}, 2), op("div_pow", 3, {}, {}, 2), op("div_pow", 2, {}, {}, 3)};
}

Outcome criterion3() {
    Outcome o;
    for (const auto& l : cocancelling_annihilators()) o.check(cocancel_kernel(symbol(l)).is_zero(), label(l));
    const auto z = op("zero", 2, 2);
    const auto k = cocancel_kernel(symbol(z));
    o.check(!k.is_zero() && k.dim() == z.dim_e, "zero operator");
    o.notes << " annihilators=" << cocancelling_annihilators().size() << " zero kernel dim=" << k.dim();
    return o;
}

Outcome criterion4() {
    Outcome o;
    for (const auto& l : cocancelling_annihilators()) {
        const auto L = symbol(l);
        const auto q = RatMatrix::identity(L.cols());
        try {
            const auto d = decompose_identity(L, q, 1);
            o.check(decomposition_residual(L, q, d).is_zero(), label(l) + " residual");
            o.notes << " " << label(l) << ":m=" << d.m;
        } catch (const DecompositionError& e) {
            o.check(false, label(l) + " " + e.what());
        }
    }
    const auto z = symbol(op("zero", 2, 2));
    try {
        decompose_identity(z, RatMatrix::identity(z.cols()), 1);
        o.check(false, "zero operator decomposed");
    } catch (const DecompositionError& e) {
        const auto& w = e.witness;
        const bool nonzero = std::any_of(w.begin(), w.end(), [](const Rational& x) { return x != 0; });
        const auto lw = coefficient_stack(z).apply(w);
        const bool killed = std::all_of(lw.begin(), lw.end(), [](const Rational& x) { return x == 0; });
        o.check(nonzero && killed, "zero operator witness");
    }
    return o;
}

Outcome criterion5() {
    Outcome o;
    const auto lap = op("laplacian", 2);
    const auto w = weak_cancellation_test(lap, kWeakLevel);
    o.check(!w.integrals.empty(), "laplacian intersection empty");
    for (const auto& i : w.integrals) o.check(std::abs(i.magnitude - 2 * pi) <= kWeakMagnitudeTol, "laplacian magnitude");
    o.check(!w.verdict, "laplacian weakly cancelling");
    if (!w.integrals.empty()) o.notes << " laplacian |I|=" << w.integrals[0].magnitude;

    const auto dl = op("dirac_laplace3");
    const auto wd = weak_cancellation_test(dl, kWeakLevel);
    double worst = 0;
    for (const auto& i : wd.integrals) worst = std::max(worst, i.magnitude);
    o.check(!wd.integrals.empty() && worst < kWeakZeroTol, "dirac_laplace3 magnitude");
    o.check(wd.verdict && !is_cancelling(dl).cancelling, "dirac_laplace3 verdicts");
    o.notes << " dirac_laplace3 max|I|=" << worst;

    std::size_t vacuous = 0;
    for (const auto& row : classification_table()) {
        const auto c = is_cancelling(row.op);
        if (!c.cancelling) continue;
        if (row.op.k < row.op.n) {
            ++vacuous;  // condition only defined for k >= n
            continue;
        }
        const auto r = weak_cancellation_test(row.op, c.intersection, kWeakLevel);
        o.check(r.verdict && r.integrals.empty(), label(row.op) + " vacuous");
        ++vacuous;
    }
    o.notes << " cancelling vacuous=" << vacuous;

    const auto pa = p_a_on_intersection(lap, kWeakLevel);
    const bool shape = pa.size() == 1 && pa[0].coefficients.size() == 1 && pa[0].coefficients[0].second.size() == 1;
    o.check(shape, "P_A shape");
    if (shape) {
        const auto c = pa[0].coefficients[0].second[0];
        o.check(std::abs(c - std::complex<double>(-1 / (2 * pi), 0)) <= kPATol, "P_A value");
        o.notes << " P_A=" << c.real();
    }
    return o;
}

Outcome criterion6() {
    Outcome o;
    OperatorSpec b;
    b.n = 2;
    b.k = 2;
    b.dim_v = b.dim_e = 1;
    b.name = "d11";
    b.terms.emplace(MultiIndex{2, 0}, RatMatrix{{1}});
    const auto lap = op("laplacian", 2);
    const auto r = factorization_obstruction(lap, b);
    o.check(!r.l.has_value() && r.witness.size() == 1, "laplacian / d11 factorizes");
    if (r.witness.size() == 1) {
        const auto& p = r.witness[0];
        const Rational c20 = p.coefficient({2, 0}), c02 = p.coefficient({0, 2}), c11 = p.coefficient({1, 1});
        o.check(c20 != 0 && c02 == -c20 && c11 == 0, "witness not a multiple of x1^2 - x2^2");
        const auto ap = apply_to_polynomial(lap, r.witness), bp = apply_to_polynomial(b, r.witness);
        o.check(ap[0] == 0 && bp[0] != 0, "A(D)P = 0, B(D)P != 0");
        o.notes << " P=" << to_string(c20) << "*(x1^2 - x2^2) B(D)P=" << to_string(bp[0]);
    }
    const auto same = factorization_obstruction(lap, lap);
    o.check(same.l && *same.l == RatMatrix::identity(1), "A = B gives identity");
    return o;
}

Outcome criterion7() {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    for (const auto& row : classification_table()) {
        if (!row.elliptic || row.op.n > 3) continue;
        const auto r = probe_l2(row.op, kL2Trials, 1, kL2Grid);
        const double c = r.details["ellipticity_constant"].get<double>();
        o.check(r.statistic <= c * (1 + kL2Slack), label(row.op) + " max ratio above C");
        if (row.op.name == "laplacian" || row.op.name == "hodge") o.check(std::abs(r.statistic - 1) <= kL2UnitTol, label(row.op) + " max != 1");
    }
    const double t = seconds_since(t0);
    o.notes << " runtime=" << t << "s";
    o.check(t < kRuntimeL2, "runtime");
    return o;
}

Outcome criterion8() {
    Outcome o;
    auto timed = [&](const std::string& what, const std::function<ProbeReport()>& f) {
        const auto t0 = std::chrono::steady_clock::now();
        const auto r = f();
        const double t = seconds_since(t0);
        o.notes << " " << what << ": stat=" << r.statistic << (r.pass ? " ok" : " red") << " (" << t << "s)";
        o.check(r.pass, what);
        o.check(t < kRuntimeProbe, what + " runtime");
        return r;
    };
    const auto lap = op("laplacian", 2), hodge = op("hodge", 4, 2);
    timed("sobolev laplacian(2) growth", [&] { return probe_sobolev(lap, 1, 3, 256); });
    timed("sobolev hodge(4,2) spread", [&] { return probe_sobolev(hodge, 0, 3, 32); });
    timed("hardy laplacian(2) growth", [&] { return probe_hardy(lap, 1, 3, 256); });
    timed("hardy hodge(4,2) spread", [&] { return probe_hardy(hodge, 0, 3, 32); });
    const auto grad = op("gradient", 2);
    const auto t0 = std::chrono::steady_clock::now();
    const auto d = probe_duality(compatibility_operator(grad).L, grad, kDualityTrials, 1, 256, 3);
    const double t = seconds_since(t0);
    const bool bounded = d.details["bounded_pass"].get<bool>();
    const bool control = d.details["control_pass"].get<bool>();
    o.notes << " duality bounded: max/median=" << d.statistic << (bounded ? " ok" : " red")
            << " control min growth=" << d.details["control_min_growth"].get<double>() << (control ? " ok" : " red") << " (" << t << "s)";
    o.check(bounded && d.statistic <= kDualitySpread, "duality bounded");
    o.check(control, "duality control growth");
    o.check(t < kRuntimeProbe, "duality runtime");
    return o;
}

Outcome criterion9() {
    Outcome o;
    const std::vector<std::pair<OperatorSpec, double>> cases{{op("gradient", 2), -1}, {op("hodge", 3, 1), -2}, {op("laplacian", 3), -1}};
    for (const auto& [a, slope] : cases) {
        const auto r = kernel_probe(a, 256);
        o.check(std::abs(r.statistic - slope) <= kSlopeTolerance, label(a));
        o.notes << " " << label(a) << " slope=" << r.statistic;
    }
    return o;
}

Outcome criterion10() {
    Outcome o;
    for (int n : {2, 3}) {
        const auto rule = sphere_rule(n, 6);
        double area = 0;
        for (double w : rule.weights) area += w;
        const double exact = n == 2 ? 2 * pi : 4 * pi;
        o.check(std::abs(area - exact) <= kAreaTol, "area S^" + std::to_string(n - 1));
        double worst = 0;
        for (int d = 1; d <= 9; d += 2)
            for (const auto& beta : multi_indices(n, d)) {
                double s = 0;
                for (std::size_t i = 0; i < rule.size(); ++i) {
                    double m = rule.weights[i];
                    for (int j = 0; j < n; ++j) m *= std::pow(rule.nodes[i](j), beta[static_cast<std::size_t>(j)]);
                    s += m;
                }
                worst = std::max(worst, std::abs(s));
            }
        o.check(worst < kMomentTol, "odd moments S^" + std::to_string(n - 1));
        o.notes << " S^" << n - 1 << ": area err=" << std::abs(area - exact) << " odd max=" << worst;
    }
    const auto rule = sphere_rule(3, 6);
    double s = 0;
    for (std::size_t i = 0; i < rule.size(); ++i) s += rule.weights[i] * rule.nodes[i](0) * rule.nodes[i](0);
    o.check(std::abs(s - 4 * pi / 3) <= kSecondMomentTol, "second moment");
    o.notes << " int xi1^2 err=" << std::abs(s - 4 * pi / 3);
    return o;
}

const std::vector<std::pair<const char*, std::function<Outcome()>>>& criteria() {
    static const std::vector<std::pair<const char*, std::function<Outcome()>>> c{
        {"classification table", criterion1}, {"compatibility identity", criterion2}, {"cocancellation verdicts", criterion3},
        {"decomposition of identity", criterion4}, {"weak cancellation", criterion5}, {"factorization obstruction", criterion6},
        {"L2 probe", criterion7}, {"endpoint dichotomy probes", criterion8}, {"kernel homogeneity", criterion9},
        {"quadrature sanity", criterion10}};
    return c;
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<int> which;
    for (int i = 1; i < argc; ++i) which.push_back(std::atoi(argv[i]));
    if (which.empty())
        for (int i = 1; i <= 10; ++i) which.push_back(i);
    bool all = true;
    for (int i : which) {
        if (i < 1 || i > 10) {
            std::cerr << "no criterion " << i << "\n";
            return 2;
        }
        const auto& [name, run] = criteria()[static_cast<std::size_t>(i - 1)];
        Outcome o;
        try {
            o = run();
        } catch (const std::exception& e) {
            o.pass = false;
            o.notes << " exception: " << e.what();
        }
        std::cout << "criterion " << i << " (" << name << "): " << (o.pass ? "PASS" : "FAIL") << " |" << o.notes.str() << std::endl;
        all = all && o.pass;
    }
    return all ? 0 : 1;
}
