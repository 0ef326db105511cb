#pragma once

// Compatibility operators, cancellation and cocancellation, decompositions of
// the identity, factorization obstructions and weak cancellation.

#include "cancelkit/ellipticity.hpp"
#include "cancelkit/quadrature.hpp"

#include <complex>
#include <random>

namespace cancelkit {

struct CompatibilityOperator {
    HomoPolyMatrix L;       // dim_e x dim_e
    HomoPoly det;           // det(A* A)
    int degree = 0;         // 2 k dim_v, also when L vanishes identically
};

/// L = det(A*A) id - A adj(A*A) A*, so that L A = 0 and ker L(xi) = A(xi)[V].
inline CompatibilityOperator compatibility_operator(const OperatorSpec& op) {
    const auto a = symbol(op);
    const auto at = a.transpose();
    auto [det, adj] = polymat_det_adj(at * a);
    if (det.is_zero()) throw std::domain_error("det(A*A) vanishes identically; operator is nowhere elliptic");
    CompatibilityOperator c;
    c.L = det * HomoPolyMatrix::identity(op.n, op.dim_e) - a * adj * at;
    c.det = std::move(det);
    c.degree = 2 * op.k * static_cast<int>(op.dim_v);
    return c;
}

/// {e : L(xi) e = 0 for all xi}, read off the stacked monomial coefficients.
inline Subspace cocancel_kernel(const HomoPolyMatrix& L) { return kernel_basis(coefficient_stack(L)); }

/// Seeded sample points with entries in {-9..9}/{1..9}, never the zero vector.
class RationalSampler {
public:
    explicit RationalSampler(std::uint64_t seed) : rng_(seed) {}
    std::vector<Rational> operator()(int n) {
        std::uniform_int_distribution<long> num(-9, 9), den(1, 9);
        for (;;) {
            std::vector<Rational> xi(static_cast<std::size_t>(n));
            bool nonzero = false;
            for (auto& x : xi) {
                x = make_rational(num(rng_), den(rng_));
                nonzero = nonzero || x != 0;
            }
            if (nonzero) return xi;
        }
    }

private:
    std::mt19937_64 rng_;
};

struct SampledIntersection {
    Subspace subspace;
    std::size_t samples = 0;  // samples drawn before three unchanged repeats
};

/// Intersects images A(xi_i)[V] until three consecutive samples change nothing.
inline SampledIntersection sampled_image_intersection(const OperatorSpec& op, std::uint64_t seed) {
    RationalSampler draw(seed);
    SampledIntersection out{Subspace::full(op.dim_e), 0};
    int unchanged = 0;
    bool first = true;
    while (unchanged < 3) {
        const auto next = intersect(out.subspace, image_basis(symbol_at(op, draw(op.n))));
        if (!first && next == out.subspace) {
            ++unchanged;
        } else {
            unchanged = 0;
            out.subspace = next;
            ++out.samples;
        }
        first = false;
    }
    return out;
}

struct CancellingResult {
    bool cancelling = false;
    Subspace intersection;
    Subspace sampled;
    std::size_t samples = 0;
    bool cross_check = false;  // exact and sampled routes agree
    CompatibilityOperator compat;
};

/*
 * Exact: the image intersection is the common kernel of L. The sampled
 * intersection is computed independently and reported alongside.
 */
inline CancellingResult is_cancelling(const OperatorSpec& op, std::uint64_t seed = 1) {
    CancellingResult r;
    r.compat = compatibility_operator(op);
    r.intersection = cocancel_kernel(r.compat.L);
    const auto s = sampled_image_intersection(op, seed);
    r.sampled = s.subspace;
    r.samples = s.samples;
    r.cross_check = r.sampled == r.intersection;
    r.cancelling = r.intersection.is_zero();
    return r;
}

struct Decomposition {
    std::size_t m = 0;
    std::vector<std::vector<Rational>> xis;
    std::vector<RatMatrix> qs;
};

/// Raised when Q does not vanish on the common kernel of L; carries e with L e = 0, Q e != 0.
class DecompositionError : public std::domain_error {
public:
    DecompositionError(const std::string& what, std::vector<Rational> w) : std::domain_error(what), witness(std::move(w)) {}
    std::vector<Rational> witness;
};

/// Residual Q - sum_j Q_j L(xi_j).
inline RatMatrix decomposition_residual(const HomoPolyMatrix& L, const RatMatrix& Q, const Decomposition& d) {
    RatMatrix r = Q;
    for (std::size_t j = 0; j < d.m; ++j) r = r - d.qs[j] * L.eval(d.xis[j]);
    return r;
}

namespace cancel_detail {

inline std::optional<Decomposition> solve_at(const HomoPolyMatrix& L, const RatMatrix& Q, const std::vector<std::vector<Rational>>& xis) {
    RatMatrix stack(0, L.cols());
    for (const auto& xi : xis) stack = vstack(stack, L.eval(xi));
    const auto x = solve_exact(stack.transpose(), Q.transpose());
    if (!x) return std::nullopt;
    const auto xt = x->transpose();
    Decomposition d;
    d.m = xis.size();
    d.xis = xis;
    for (std::size_t j = 0; j < xis.size(); ++j) {
        RatMatrix qj(Q.rows(), L.rows());
        for (std::size_t r = 0; r < Q.rows(); ++r)
            for (std::size_t c = 0; c < L.rows(); ++c) qj(r, c) = xt(r, j * L.rows() + c);
        d.qs.push_back(std::move(qj));
    }
    return d;
}

inline void check_precondition(const HomoPolyMatrix& L, const RatMatrix& Q) {
    if (Q.cols() != L.cols()) throw DimensionError("Q must act on the domain of L");
    const auto ker = cocancel_kernel(L);
    for (std::size_t j = 0; j < ker.dim(); ++j) {
        const auto e = ker.basis_vector(j);
        bool nonzero = false;
        for (const auto& x : Q.apply(e)) nonzero = nonzero || x != 0;
        if (nonzero) throw DecompositionError("Q does not vanish on the common kernel of L", e);
    }
}

}  // namespace cancel_detail

/// Decomposition at caller-chosen points; nullopt when those points do not suffice.
inline std::optional<Decomposition> decompose_identity_at(const HomoPolyMatrix& L, const RatMatrix& Q,
                                                          const std::vector<std::vector<Rational>>& xis) {
    cancel_detail::check_precondition(L, Q);
    return cancel_detail::solve_at(L, Q, xis);
}

/*
 * Finds xi_1..xi_m and Q_j with Q = sum_j Q_j L(xi_j). m starts at
 * ceil(dim / rank L(xi_1)) and grows by one per failed exact solve.
 */
inline Decomposition decompose_identity(const HomoPolyMatrix& L, const RatMatrix& Q, std::uint64_t seed = 1) {
    cancel_detail::check_precondition(L, Q);
    if (Q.is_zero()) return {};
    RationalSampler draw(seed);
    std::vector<std::vector<Rational>> xis{draw(L.n())};
    std::size_t r = rank_exact(L.eval(xis[0]));
    for (int tries = 0; r == 0 && tries < 50; ++tries) {
        xis[0] = draw(L.n());
        r = rank_exact(L.eval(xis[0]));
    }
    if (r == 0) throw std::logic_error("L vanishes at every sample point");
    const std::size_t dim = L.cols();
    const std::size_t start = (dim + r - 1) / r;
    const std::size_t cap = dim * (static_cast<std::size_t>(L.degree().value_or(0)) + 1);
    while (xis.size() < start) xis.push_back(draw(L.n()));
    for (;;) {
        if (auto d = cancel_detail::solve_at(L, Q, xis)) {
            if (!decomposition_residual(L, Q, *d).is_zero()) throw std::logic_error("decomposition residual nonzero");
            return *d;
        }
        if (xis.size() >= cap) throw std::logic_error("decomposition exceeded the sample cap");
        xis.push_back(draw(L.n()));
    }
}

struct FactorizationResult {
    std::optional<RatMatrix> l;                 // B(xi) = l A(xi)
    std::vector<HomoPoly> witness;              // P, one component per V coordinate
    std::vector<Rational> e;                    // B(D) P
};

/// The constant A(D)P = sum_alpha A_alpha alpha! c_alpha for P homogeneous of degree k.
inline std::vector<Rational> apply_to_polynomial(const OperatorSpec& op, const std::vector<HomoPoly>& p) {
    if (p.size() != op.dim_v) throw DimensionError("polynomial has wrong number of components");
    std::vector<Rational> out(op.dim_e, 0);
    for (const auto& [alpha, a] : op.terms)
        for (std::size_t j = 0; j < op.dim_v; ++j) {
            const Rational c = p[j].coefficient(alpha) * Rational(multi_factorial(alpha));
            if (c == 0) continue;
            for (std::size_t i = 0; i < op.dim_e; ++i) out[i] += a(i, j) * c;
        }
    return out;
}

/*
 * Decides whether B(xi) = l A(xi) for a constant l. Otherwise returns a
 * degree-k polynomial P with A(D)P = 0 and B(D)P = e != 0.
 */
inline FactorizationResult factorization_obstruction(const OperatorSpec& a, const OperatorSpec& b) {
    if (a.n != b.n || a.k != b.k || a.dim_v != b.dim_v) throw DimensionError("operators must share n, k and dim V");
    const auto alphas = multi_indices(a.n, a.k);
    const std::size_t dv = a.dim_v;
    RatMatrix big_a(a.dim_e, alphas.size() * dv), big_b(b.dim_e, alphas.size() * dv);
    for (std::size_t t = 0; t < alphas.size(); ++t) {
        auto fill = [&](const OperatorSpec& op, RatMatrix& big) {
            auto it = op.terms.find(alphas[t]);
            if (it == op.terms.end()) return;
            for (std::size_t i = 0; i < op.dim_e; ++i)
                for (std::size_t j = 0; j < dv; ++j) big(i, t * dv + j) = it->second(i, j);
        };
        fill(a, big_a);
        fill(b, big_b);
    }
    FactorizationResult out;
    if (auto lt = solve_exact(big_a.transpose(), big_b.transpose())) {
        out.l = lt->transpose();
        return out;
    }
    const auto ker = kernel_basis(big_a);
    for (std::size_t j = 0; j < ker.dim(); ++j) {
        auto w = ker.basis_vector(j);
        const auto bw = big_b.apply(w);
        if (std::all_of(bw.begin(), bw.end(), [](const Rational& x) { return x == 0; })) continue;
        // c_alpha = w_alpha / alpha!, then a primitive integer multiple with leading coefficient > 0
        std::vector<Rational> c(w.size());
        for (std::size_t t = 0; t < alphas.size(); ++t)
            for (std::size_t i = 0; i < dv; ++i) c[t * dv + i] = w[t * dv + i] / Rational(multi_factorial(alphas[t]));
        Integer l = 1, g = 0;
        for (const auto& x : c) l = lcm(l, Integer(x.get_den()));
        for (const auto& x : c) g = gcd(g, Integer(x.get_num() * (l / x.get_den())));
        Rational s = Rational(l) / Rational(g);
        for (const auto& x : c)
            if (x != 0) {
                if (x < 0) s = -s;
                break;
            }
        out.witness.assign(dv, HomoPoly(a.n));
        for (std::size_t t = 0; t < alphas.size(); ++t)
            for (std::size_t i = 0; i < dv; ++i) out.witness[i] += HomoPoly::monomial(a.n, alphas[t], c[t * dv + i] * s);
        out.e = apply_to_polynomial(b, out.witness);
        return out;
    }
    throw std::logic_error("inconsistent factorization system without an obstruction");
}

struct WeakIntegral {
    std::vector<Rational> e;
    Eigen::VectorXd value;  // flattened (k-n)-tensor of V vectors
    double magnitude = 0;
    double error = 0;
};

struct WeakCancellationResult {
    Subspace intersection;
    std::vector<WeakIntegral> integrals;
    double tolerance_floor = 1e-8;
    bool verdict = true;
};

namespace cancel_detail {

inline void require_log_case(const OperatorSpec& op) {
    if (op.k < op.n) throw std::invalid_argument("weak cancellation needs k >= n; the condition is vacuous otherwise");
}

inline Eigen::VectorXd to_vector(const std::vector<Rational>& e) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(e.size()));
    for (std::size_t i = 0; i < e.size(); ++i) v(static_cast<Eigen::Index>(i)) = e[i].get_d();
    return v;
}

// xi^{(x) j} (x) A(xi)^{-1} e, flattened with the V index fastest.
inline Eigen::VectorXd weak_integrand(const NumericSymbol& a, const Eigen::VectorXd& xi, const Eigen::VectorXd& e, int j) {
    const Eigen::VectorXd u = pseudo_inverse_apply(a(xi), e);
    Eigen::VectorXd t = u;
    for (int s = 0; s < j; ++s) {
        Eigen::VectorXd next(t.size() * xi.size());
        for (Eigen::Index i = 0; i < xi.size(); ++i) next.segment(i * t.size(), t.size()) = xi(i) * t;
        t = std::move(next);
    }
    return t;
}

}  // namespace cancel_detail

/*
 * Integrates xi^{(k-n)} A(xi)^{-1} e over S^{n-1} for each basis vector e of
 * the image intersection, at rule levels `level` and `level + 1`. The
 * condition holds when every |I_e| <= max(10 * error, tolerance floor).
 */
inline WeakCancellationResult weak_cancellation_test(const OperatorSpec& op, const Subspace& intersection, int level = 6,
                                                     double floor = 1e-8) {
    cancel_detail::require_log_case(op);
    WeakCancellationResult r;
    r.intersection = intersection;
    r.tolerance_floor = floor;
    if (intersection.is_zero()) return r;
    const NumericSymbol a(op);
    const auto coarse = sphere_rule(op.n, level), fine = sphere_rule(op.n, level + 1);
    const int j = op.k - op.n;
    for (std::size_t b = 0; b < intersection.dim(); ++b) {
        WeakIntegral w;
        w.e = intersection.basis_vector(b);
        const auto ev = cancel_detail::to_vector(w.e);
        auto f = [&](const Eigen::VectorXd& xi) { return cancel_detail::weak_integrand(a, xi, ev, j); };
        const Eigen::VectorXd i0 = integrate_sphere(coarse, f);
        w.value = integrate_sphere(fine, f);
        w.magnitude = w.value.norm();
        w.error = (w.value - i0).norm();
        r.verdict = r.verdict && w.magnitude <= std::max(10 * w.error, floor);
        r.integrals.push_back(std::move(w));
    }
    return r;
}

inline WeakCancellationResult weak_cancellation_test(const OperatorSpec& op, int level = 6, double floor = 1e-8) {
    cancel_detail::require_log_case(op);
    return weak_cancellation_test(op, is_cancelling(op).intersection, level, floor);
}

struct PACoefficients {
    std::vector<Rational> e;
    std::vector<std::pair<MultiIndex, std::vector<std::complex<double>>>> coefficients;  // x^beta -> V vector
};

/*
 * Coefficients of P_A(x)[e] = int <xi,x>^{k-n} A(xi)^{-1} e / ((k-n)! (2 pi i)^n):
 * the x^beta coefficient is int xi^beta A(xi)^{-1} e / (beta! (2 pi i)^n).
 */
inline std::vector<PACoefficients> p_a_on_intersection(const OperatorSpec& op, const Subspace& intersection, int level = 6) {
    cancel_detail::require_log_case(op);
    std::vector<PACoefficients> out;
    const NumericSymbol a(op);
    const auto rule = sphere_rule(op.n, level);
    const std::complex<double> norm = std::pow(std::complex<double>(0, 2 * std::numbers::pi), op.n);
    const auto betas = multi_indices(op.n, op.k - op.n);
    for (std::size_t b = 0; b < intersection.dim(); ++b) {
        PACoefficients pc;
        pc.e = intersection.basis_vector(b);
        const auto ev = cancel_detail::to_vector(pc.e);
        for (const auto& beta : betas) {
            const Eigen::VectorXd v = integrate_sphere(rule, [&](const Eigen::VectorXd& xi) {
                double m = 1;
                for (std::size_t i = 0; i < beta.size(); ++i) m *= std::pow(xi(static_cast<Eigen::Index>(i)), beta[i]);
                return Eigen::VectorXd(m * pseudo_inverse_apply(a(xi), ev));
            });
            std::vector<std::complex<double>> c(static_cast<std::size_t>(v.size()));
            const double bf = multi_factorial(beta).get_d();
            for (Eigen::Index i = 0; i < v.size(); ++i) c[static_cast<std::size_t>(i)] = v(i) / (bf * norm);
            pc.coefficients.emplace_back(beta, std::move(c));
        }
        out.push_back(std::move(pc));
    }
    return out;
}

inline std::vector<PACoefficients> p_a_on_intersection(const OperatorSpec& op, int level = 6) {
    cancel_detail::require_log_case(op);
    return p_a_on_intersection(op, is_cancelling(op).intersection, level);
}

}  // namespace cancelkit
