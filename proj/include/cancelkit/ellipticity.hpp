#pragma once

// Injective ellipticity: certification on sphere nets, exact counterexamples,
// the ellipticity constant and the pseudo-inverse symbol.

#include "cancelkit/operators.hpp"
#include "cancelkit/quadrature.hpp"

#include <Eigen/SVD>

#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <string>

namespace cancelkit {

/// Smallest singular value of A as a map on its columns.
inline double sigma_min(const Eigen::MatrixXd& a) {
    if (a.cols() == 0) return std::numeric_limits<double>::infinity();
    if (a.rows() < a.cols()) return 0.0;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
    return svd.singularValues()(a.cols() - 1);
}

/// A finite set of unit vectors with every point of S^{n-1} within `radius` of some node.
struct SphereNet {
    int n = 0;
    double radius = 0;
    std::vector<Eigen::VectorXd> nodes;
};

namespace net_detail {

inline Eigen::VectorXd vec(std::initializer_list<double> v) {
    Eigen::VectorXd x(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double d : v) x(i++) = d;
    return x;
}

inline std::vector<Eigen::VectorXd> circle(int m) {
    std::vector<Eigen::VectorXd> pts;
    for (int j = 0; j < m; ++j) {
        const double t = 2 * std::numbers::pi * j / m;
        pts.push_back(vec({std::cos(t), std::sin(t)}));
    }
    return pts;
}

// Chord covering radius of m equispaced points on the circle.
inline double circle_radius(int m) { return 2 * std::sin(std::numbers::pi / (2.0 * m)); }

inline std::vector<std::array<Eigen::Vector3d, 3>> icosahedron() {
    const double p = (1 + std::sqrt(5.0)) / 2;
    std::vector<Eigen::Vector3d> v{{-1, p, 0}, {1, p, 0}, {-1, -p, 0}, {1, -p, 0}, {0, -1, p}, {0, 1, p},
                                   {0, -1, -p}, {0, 1, -p}, {p, 0, -1}, {p, 0, 1}, {-p, 0, -1}, {-p, 0, 1}};
    for (auto& x : v) x.normalize();
    const int f[20][3] = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
                          {11, 10, 2}, {10, 7, 6}, {7, 1, 8},   {3, 9, 4}, {3, 4, 2},   {3, 2, 6}, {3, 6, 8},
                          {3, 8, 9},  {4, 9, 5},  {2, 4, 11}, {6, 2, 10}, {8, 6, 7},  {9, 8, 1}};
    std::vector<std::array<Eigen::Vector3d, 3>> tris;
    for (const auto& t : f) tris.push_back({v[static_cast<std::size_t>(t[0])], v[static_cast<std::size_t>(t[1])], v[static_cast<std::size_t>(t[2])]});
    return tris;
}

// Every sphere point projects from a flat triangle T; its distance to the nearest
// vertex is at most circumradius(T) / dist(0, plane(T)).
inline double triangle_bound(const Eigen::Vector3d& a, const Eigen::Vector3d& b, const Eigen::Vector3d& c) {
    const double ab = (b - a).norm(), bc = (c - b).norm(), ca = (a - c).norm();
    const Eigen::Vector3d nrm = (b - a).cross(c - a);
    const double area2 = nrm.norm();
    const double circum = ab * bc * ca / (2 * area2);
    const double plane = std::abs(nrm.dot(a)) / area2;
    return circum / plane;
}

inline SphereNet icosphere(int freq) {
    SphereNet net;
    net.n = 3;
    std::map<std::array<long long, 3>, Eigen::Vector3d> unique;
    auto key = [](const Eigen::Vector3d& x) {
        return std::array<long long, 3>{std::llround(x(0) * 1e9), std::llround(x(1) * 1e9), std::llround(x(2) * 1e9)};
    };
    double worst = 0;
    for (const auto& t : icosahedron()) {
        auto point = [&](int i, int j) {
            // barycentric (i, j, freq - i - j) / freq
            Eigen::Vector3d q = (t[0] * (freq - i - j) + t[1] * i + t[2] * j) / freq;
            return Eigen::Vector3d(q.normalized());
        };
        for (int i = 0; i <= freq; ++i)
            for (int j = 0; i + j <= freq; ++j) {
                const auto p = point(i, j);
                unique.emplace(key(p), p);
                if (i + j < freq) worst = std::max(worst, triangle_bound(p, point(i + 1, j), point(i, j + 1)));
                if (i + j + 2 <= freq) worst = std::max(worst, triangle_bound(point(i + 1, j), point(i + 1, j + 1), point(i, j + 1)));
            }
    }
    for (const auto& [k, p] : unique) net.nodes.push_back(p);
    net.radius = worst;
    return net;
}

}  // namespace net_detail

/*
 * delta-net of S^{n-1} for n <= 4 with covering radius at most delta.
 * n=4 uses points (cos t u, sin t w) with u, w on circle nets; the radius is
 * dt/2 + circle radius.
 */
inline SphereNet sphere_net(int n, double delta) {
    using namespace net_detail;
    if (!(delta > 0)) throw std::invalid_argument("net radius must be positive");
    if (n > 4) throw std::invalid_argument("certified ellipticity is limited to n <= 4; use sampled verdict");
    SphereNet net;
    net.n = n;
    if (n == 1) {
        net.nodes = {vec({1.0}), vec({-1.0})};
        net.radius = 0;
    } else if (n == 2) {
        int m = std::max(3, static_cast<int>(std::ceil(std::numbers::pi / delta)));
        while (circle_radius(m) > delta) ++m;
        net.nodes = circle(m);
        net.radius = circle_radius(m);
    } else if (n == 3) {
        int freq = 1;
        for (;; ++freq) {
            net = icosphere(freq);
            if (net.radius <= delta) break;
        }
    } else {
        const double half = delta / 2;
        int m = 3;
        while (circle_radius(m) > half) ++m;
        const int steps = static_cast<int>(std::ceil((std::numbers::pi / 2) / (2 * (delta - circle_radius(m)))));
        const auto c = circle(m);
        for (int s = 0; s <= steps; ++s) {
            const double t = (std::numbers::pi / 2) * s / steps;
            const double ct = std::cos(t), st = std::sin(t);
            for (std::size_t a = 0; a < c.size(); ++a) {
                if (s == steps && a > 0) break;  // u irrelevant when cos t = 0
                for (std::size_t b = 0; b < c.size(); ++b) {
                    if (s == 0 && b > 0) break;  // w irrelevant when sin t = 0
                    Eigen::VectorXd x(4);
                    x << ct * c[a](0), ct * c[a](1), st * c[b](0), st * c[b](1);
                    net.nodes.push_back(x);
                }
            }
        }
        net.radius = (std::numbers::pi / 2) / steps / 2 + circle_radius(m);
    }
    return net;
}

enum class EllipticStatus { CertifiedElliptic, Counterexample, Inconclusive };

inline const char* to_string(EllipticStatus s) {
    switch (s) {
        case EllipticStatus::CertifiedElliptic: return "certified_elliptic";
        case EllipticStatus::Counterexample: return "counterexample";
        default: return "inconclusive";
    }
}

struct EllipticWitness {
    std::vector<Rational> xi;
    std::vector<Rational> v;
};

struct EllipticityVerdict {
    EllipticStatus status = EllipticStatus::Inconclusive;
    std::optional<double> constant;
    std::optional<EllipticWitness> witness;
    double delta = 0;            // covering radius of the net actually used
    std::size_t net_size = 0;
    double min_sigma = 0;        // over net nodes
    double min_det = 0;          // min of det(A*A) over net nodes
    double lipschitz_det = 0;    // d * sum |c_alpha|
    double lipschitz_symbol = 0; // k * |T|_HS
    std::string route;           // "det" or "symbol" when certified
};

/// g(xi) = det(A(xi)^T A(xi)), exactly.
inline HomoPoly normal_determinant(const OperatorSpec& op) {
    const auto a = symbol(op);
    return polymat_det_adj(a.transpose() * a).det;
}

namespace ell_detail {

// Best rational approximation p/q of x with q <= qmax (continued fractions).
inline Rational rationalize(double x, long qmax) {
    long h0 = 0, h1 = 1, k0 = 1, k1 = 0;
    double r = x;
    for (int it = 0; it < 64; ++it) {
        const double a = std::floor(r);
        if (std::abs(a) > 1e15) break;
        const long ai = static_cast<long>(a);
        const long h2 = ai * h1 + h0, k2 = ai * k1 + k0;
        if (k2 > qmax) break;
        h0 = h1;
        h1 = h2;
        k0 = k1;
        k1 = k2;
        const double frac = r - a;
        if (frac < 1e-14) break;
        r = 1 / frac;
    }
    return make_rational(h1, k1);
}

inline std::optional<EllipticWitness> exact_kernel(const OperatorSpec& op, const std::vector<Rational>& xi) {
    bool nonzero = false;
    for (const auto& x : xi) nonzero = nonzero || x != 0;
    if (!nonzero) return std::nullopt;
    const auto ker = kernel_basis(symbol_at(op, xi));
    if (ker.is_zero()) return std::nullopt;
    // integer-scaled first kernel vector
    auto v = ker.basis_vector(0);
    Integer l = 1;
    for (const auto& c : v) l = lcm(l, Integer(c.get_den()));
    for (auto& c : v) c *= l;
    return EllipticWitness{xi, v};
}

// Pattern search minimizing sigma_min(A(xi)) on the sphere.
inline Eigen::VectorXd local_minimize(const NumericSymbol& a, Eigen::VectorXd xi, double step) {
    double best = sigma_min(a(xi));
    const auto n = xi.size();
    for (int round = 0; round < 400 && step > 1e-13; ++round) {
        bool improved = false;
        for (Eigen::Index i = 0; i < n; ++i)
            for (double s : {step, -step}) {
                Eigen::VectorXd y = xi;
                y(i) += s;
                y.normalize();
                const double v = sigma_min(a(y));
                if (v < best) {
                    best = v;
                    xi = y;
                    improved = true;
                }
            }
        if (!improved) step /= 2;
    }
    return xi;
}

inline std::optional<EllipticWitness> search_rational(const OperatorSpec& op, const Eigen::VectorXd& xi) {
    // scale so the largest coordinate is 1, then rationalize coordinatewise
    Eigen::Index imax = 0;
    xi.cwiseAbs().maxCoeff(&imax);
    const Eigen::VectorXd y = xi / xi(imax);
    for (long qmax : {1L, 2L, 4L, 8L, 16L, 64L, 256L, 1024L}) {
        std::vector<Rational> q(static_cast<std::size_t>(y.size()));
        for (Eigen::Index i = 0; i < y.size(); ++i) q[static_cast<std::size_t>(i)] = rationalize(y(i), qmax);
        if (auto w = exact_kernel(op, q)) return w;
    }
    // widen: a local grid of rational perturbations around the small-denominator guess
    std::vector<Rational> base(static_cast<std::size_t>(y.size()));
    for (Eigen::Index i = 0; i < y.size(); ++i) base[static_cast<std::size_t>(i)] = rationalize(y(i), 16);
    for (long den : {8L, 16L, 32L}) {
        const auto n = base.size();
        std::vector<int> off(n, -1);
        for (;;) {
            auto q = base;
            for (std::size_t i = 0; i < n; ++i) q[i] += make_rational(off[i], den);
            if (auto w = exact_kernel(op, q)) return w;
            std::size_t i = 0;
            while (i < n && off[i] == 1) off[i++] = -1;
            if (i == n) break;
            ++off[i];
        }
    }
    return std::nullopt;
}

}  // namespace ell_detail

/*
 * Certifies injective ellipticity on a net of S^{n-1} with covering radius delta.
 * Two rigorous routes: det(A*A) positivity with the coefficient-sum Lipschitz
 * bound, and sigma_min positivity with the Lipschitz bound k |T|_HS of the
 * symbol. Failing both, a float minimizer is rationalized and tested exactly.
 */
inline EllipticityVerdict certify_elliptic(const OperatorSpec& op, double delta = 0.1) {
    op.validate(true);
    if (op.n > 4) throw std::invalid_argument("certified ellipticity is limited to n <= 4; use sampled verdict");
    EllipticityVerdict out;
    if (op.dim_e < op.dim_v) {
        // kernel is never trivial; any rational direction is a witness
        std::vector<Rational> xi(static_cast<std::size_t>(op.n), 0);
        xi[0] = 1;
        out.status = EllipticStatus::Counterexample;
        out.witness = ell_detail::exact_kernel(op, xi);
        return out;
    }
    const NumericSymbol a(op);
    const auto net = sphere_net(op.n, delta);
    out.delta = net.radius;
    out.net_size = net.nodes.size();

    const HomoPoly g = normal_determinant(op);
    const int d = 2 * op.k * static_cast<int>(op.dim_v);
    out.lipschitz_det = d * g.coefficient_l1().get_d();
    out.lipschitz_symbol = op.k * std::sqrt(a.tensor_norm_squared());

    double min_sigma = std::numeric_limits<double>::infinity(), min_g = min_sigma, max_inv = 0;
    std::size_t arg = 0;
    for (std::size_t i = 0; i < net.nodes.size(); ++i) {
        const auto& x = net.nodes[i];
        const double s = sigma_min(a(x));
        const double gv = g.eval(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())));
        if (s < min_sigma) {
            min_sigma = s;
            arg = i;
        }
        min_g = std::min(min_g, gv);
        if (s > 0) max_inv = std::max(max_inv, 1 / s);
    }
    out.min_sigma = min_sigma;
    out.min_det = min_g;

    // float evaluation slack
    const double scale = std::sqrt(a.tensor_norm_squared()) + 1;
    const double margin = 1e-9 * scale;
    const double g_margin = 1e-9 * (g.coefficient_l1().get_d() + 1);
    if (min_g - out.lipschitz_det * net.radius - g_margin > 0) {
        out.status = EllipticStatus::CertifiedElliptic;
        out.route = "det";
    } else if (min_sigma - out.lipschitz_symbol * net.radius - margin > 0) {
        out.status = EllipticStatus::CertifiedElliptic;
        out.route = "symbol";
    }
    if (out.status == EllipticStatus::CertifiedElliptic) {
        out.constant = max_inv;
        return out;
    }

    const auto xi = ell_detail::local_minimize(a, net.nodes[arg], std::max(net.radius, 1e-3));
    const double s = sigma_min(a(xi));
    if (min_g <= 0 || s < 1e-10 * scale) {
        if (auto w = ell_detail::search_rational(op, xi)) {
            out.status = EllipticStatus::Counterexample;
            out.witness = std::move(w);
        }
    }
    return out;
}

struct EllipticityConstant {
    double constant = 0;
    Eigen::VectorXd xi;
};

/// max over the nodes of 1 / sigma_min(A(xi)).
inline EllipticityConstant ellipticity_constant(const OperatorSpec& op, const SphereRule& rule) {
    const NumericSymbol a(op);
    EllipticityConstant out;
    for (const auto& x : rule.nodes) {
        const double s = sigma_min(a(x));
        if (s < 1e-10) throw std::domain_error("not elliptic: sigma_min vanishes on the sphere");
        if (1 / s > out.constant) {
            out.constant = 1 / s;
            out.xi = x;
        }
    }
    return out;
}

/// Sweep using a sphere rule for n >= 2 and the two points +-1 for n = 1.
inline EllipticityConstant ellipticity_constant(const OperatorSpec& op, int level = 6) {
    if (op.n >= 2) return ellipticity_constant(op, sphere_rule(op.n, level));
    SphereRule r;
    r.n = 1;
    Eigen::VectorXd p(1), m(1);
    p << 1;
    m << -1;
    r.nodes = {p, m};
    r.weights = {1, 1};
    return ellipticity_constant(op, r);
}

/// (A^T A)^{-1} A^T at xi, exactly.
inline RatMatrix pseudo_inverse_at(const OperatorSpec& op, const std::vector<Rational>& xi) {
    const auto a = symbol_at(op, xi);
    const auto at = a.transpose();
    const auto x = solve_exact(at * a, at);
    if (!x || rank_exact(at * a) < op.dim_v) {
        std::string s = "(";
        for (std::size_t i = 0; i < xi.size(); ++i) s += (i ? "," : "") + to_string(xi[i]);
        throw std::domain_error("normal matrix singular at xi = " + s + ")");
    }
    return *x;
}

/// Float pseudo-inverse applied to e, (A^T A)^{-1} A^T e.
inline Eigen::VectorXd pseudo_inverse_apply(const Eigen::MatrixXd& a, const Eigen::VectorXd& e) {
    return (a.transpose() * a).ldlt().solve(a.transpose() * e);
}

}  // namespace cancelkit
