#pragma once

// Quadrature on the unit sphere S^{n-1}.

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

namespace cancelkit {

/// Surface measure 2 pi^{n/2} / Gamma(n/2) of S^{n-1}.
inline double sphere_area(int n) {
    return 2.0 * std::pow(std::numbers::pi, n / 2.0) / std::tgamma(n / 2.0);
}

struct SphereRule {
    int n = 0;
    int level = 0;
    std::vector<Eigen::VectorXd> nodes;
    std::vector<double> weights;

    std::size_t size() const { return nodes.size(); }
};

/// Gauss-Legendre nodes and weights on [-1, 1] (Newton on P_m).
inline void gauss_legendre(int m, std::vector<double>& x, std::vector<double>& w) {
    x.assign(static_cast<std::size_t>(m), 0.0);
    w.assign(static_cast<std::size_t>(m), 0.0);
    for (int i = 0; i < (m + 1) / 2; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (m + 0.5));
        double dp = 0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1, p1 = 0;
            for (int j = 0; j < m; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1) * z * p1 - j * p2) / (j + 1);
            }
            dp = m * (z * p0 - p1) / (z * z - 1);
            const double dz = p0 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        double p0 = 1, p1 = 0;
        for (int j = 0; j < m; ++j) {
            const double p2 = p1;
            p1 = p0;
            p0 = ((2.0 * j + 1) * z * p1 - j * p2) / (j + 1);
        }
        dp = m * (z * p0 - p1) / (z * z - 1);
        const auto a = static_cast<std::size_t>(i), b = static_cast<std::size_t>(m - 1 - i);
        x[a] = -z;
        x[b] = z;
        w[a] = w[b] = 2 / ((1 - z * z) * dp * dp);
    }
}

/*
 * n = 2: 2^level equispaced angles.
 * n = 3: level Gauss-Legendre nodes in cos(theta) times 2*level azimuths.
 * n >= 4: 2^(level+3) seeded Gaussian directions plus their antipodes, equal weights.
 */
inline SphereRule sphere_rule(int n, int level) {
    if (n < 2) throw std::invalid_argument("sphere_rule needs n >= 2");
    if (level < 1 || level > 24) throw std::invalid_argument("sphere_rule level out of range");
    SphereRule r;
    r.n = n;
    r.level = level;
    const double area = sphere_area(n);
    if (n == 2) {
        const int m = 1 << level;
        for (int j = 0; j < m; ++j) {
            const double t = 2 * std::numbers::pi * j / m;
            Eigen::VectorXd v(2);
            v << std::cos(t), std::sin(t);
            r.nodes.push_back(v);
            r.weights.push_back(area / m);
        }
    } else if (n == 3) {
        std::vector<double> z, wz;
        gauss_legendre(level, z, wz);
        const int naz = 2 * level;
        for (std::size_t i = 0; i < z.size(); ++i) {
            const double s = std::sqrt(1 - z[i] * z[i]);
            for (int j = 0; j < naz; ++j) {
                const double phi = 2 * std::numbers::pi * (j + 0.5) / naz;
                Eigen::VectorXd v(3);
                v << s * std::cos(phi), s * std::sin(phi), z[i];
                r.nodes.push_back(v);
                r.weights.push_back(wz[i] * 2 * std::numbers::pi / naz);
            }
        }
    } else {
        const std::size_t pairs = std::size_t{1} << (level + 3);
        std::mt19937_64 rng(0x5eedULL + static_cast<std::uint64_t>(n) * 1000 + static_cast<std::uint64_t>(level));
        std::normal_distribution<double> g;
        for (std::size_t p = 0; p < pairs; ++p) {
            Eigen::VectorXd v(n);
            do {
                for (int i = 0; i < n; ++i) v(i) = g(rng);
            } while (v.norm() < 1e-8);
            v.normalize();
            r.nodes.push_back(v);
            r.nodes.push_back(-v);
        }
        r.weights.assign(r.nodes.size(), area / static_cast<double>(r.nodes.size()));
    }
    return r;
}

/// Weighted sum of f over the rule, accumulated in node order.
template <class F>
auto integrate_sphere(const SphereRule& rule, F&& f) {
    using T = std::decay_t<decltype(f(rule.nodes.front()))>;
    T acc = f(rule.nodes.front()) * rule.weights.front();
    for (std::size_t i = 1; i < rule.size(); ++i) acc += f(rule.nodes[i]) * rule.weights[i];
    return acc;
}

}  // namespace cancelkit
