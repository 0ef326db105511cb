#pragma once

// Periodic laboratory on the torus [-pi, pi)^n: spectral application of A(D)
// and of its pseudo-inverse, Riemann-sum norms, and the inequality probes.
//
// Convention: u(x) = sum_m c_m e^{i<m,x>}, m in Z^n, so A(D) acts on c_m by
// i^k A(m). Nyquist modes are dropped by every multiplier.

#include "cancelkit/cancellation.hpp"
#include "cancelkit/ellipticity.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <fftw3.h>

#include "json.hpp"

#include <algorithm>
#include <complex>
#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace cancelkit {

using cplx = std::complex<double>;

struct GridField {
    int n = 0;
    std::size_t size = 0;  // points per axis
    std::size_t value_dim = 0;
    std::vector<cplx> values;  // component-major: values[c * points() + idx], first axis slowest
    bool mean_zero = false;

    GridField() = default;
    GridField(int n_, std::size_t size_, std::size_t dim) : n(n_), size(size_), value_dim(dim) {
        if (n < 1) throw std::invalid_argument("grid dimension must be positive");
        if (size < 2 || (size & (size - 1)) != 0) throw std::invalid_argument("grid size must be a power of two");
        values.assign(dim * points(), cplx(0, 0));
    }

    std::size_t points() const {
        std::size_t p = 1;
        for (int i = 0; i < n; ++i) p *= size;
        return p;
    }
    double h() const { return 2 * std::numbers::pi / static_cast<double>(size); }
    double cell() const { return std::pow(h(), n); }
    double coordinate(std::size_t j) const { return -std::numbers::pi + h() * static_cast<double>(j); }

    cplx& operator()(std::size_t c, std::size_t idx) { return values[c * points() + idx]; }
    const cplx& operator()(std::size_t c, std::size_t idx) const { return values[c * points() + idx]; }

    /// |x| for the representative of grid point idx in [-pi, pi)^n.
    double radius(std::size_t idx) const {
        double r2 = 0;
        for (int i = n - 1; i >= 0; --i) {
            const double x = coordinate(idx % size);
            r2 += x * x;
            idx /= size;
        }
        return std::sqrt(r2);
    }

    double pointwise_norm(std::size_t idx) const {
        double s = 0;
        const std::size_t p = points();
        for (std::size_t c = 0; c < value_dim; ++c) s += std::norm(values[c * p + idx]);
        return std::sqrt(s);
    }
};

namespace fft_detail {

inline void transform(GridField& u, int sign) {
    if (u.value_dim == 0) return;
    std::vector<int> dims(static_cast<std::size_t>(u.n), static_cast<int>(u.size));
    auto* data = reinterpret_cast<fftw_complex*>(u.values.data());
    const int dist = static_cast<int>(u.points());
    fftw_plan p = fftw_plan_many_dft(u.n, dims.data(), static_cast<int>(u.value_dim), data, nullptr, 1, dist, data, nullptr, 1,
                                     dist, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_execute(p);
    fftw_destroy_plan(p);
}

}  // namespace fft_detail

/// Fourier coefficients c_m (DFT / N^n) in FFTW index order.
inline GridField spectrum(GridField u) {
    fft_detail::transform(u, FFTW_FORWARD);
    const double s = 1.0 / static_cast<double>(u.points());
    for (auto& v : u.values) v *= s;
    return u;
}

inline GridField synthesize(GridField c) {
    fft_detail::transform(c, FFTW_BACKWARD);
    return c;
}

inline int frequency(std::size_t j, std::size_t size) {
    return j < size / 2 ? static_cast<int>(j) : static_cast<int>(j) - static_cast<int>(size);
}

/// Calls f(idx, m, nyquist) over all modes; m holds the frequencies as doubles.
template <class F>
void for_each_mode(int n, std::size_t size, F&& f) {
    std::vector<std::size_t> j(static_cast<std::size_t>(n), 0);
    std::vector<double> m(static_cast<std::size_t>(n), 0);
    std::size_t total = 1;
    for (int i = 0; i < n; ++i) total *= size;
    int nyq = 0;
    for (std::size_t idx = 0; idx < total; ++idx) {
        f(idx, m.data(), nyq > 0);
        for (int i = n - 1; i >= 0; --i) {
            const auto a = static_cast<std::size_t>(i);
            if (j[a] == size / 2) --nyq;
            if (++j[a] < size) {
                if (j[a] == size / 2) ++nyq;
                m[a] = frequency(j[a], size);
                break;
            }
            j[a] = 0;
            m[a] = 0;
        }
    }
}

inline cplx ipow(int k) {
    static const cplx units[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    return units[((k % 4) + 4) % 4];
}

/*
 * out_m = M(m) u_m mode by mode. The functor receives the frequency and the
 * coefficient as a dim x 2 (real, imag) matrix and fills out_dim x 2.
 */
template <class F>
GridField apply_multiplier(const GridField& u, std::size_t out_dim, F&& mult) {
    const GridField s = spectrum(u);
    GridField out(u.n, u.size, out_dim);
    const std::size_t p = u.points();
    Eigen::MatrixXd in(static_cast<Eigen::Index>(u.value_dim), 2), res(static_cast<Eigen::Index>(out_dim), 2);
    for_each_mode(u.n, u.size, [&](std::size_t idx, const double* m, bool nyquist) {
        if (nyquist) return;
        for (std::size_t c = 0; c < u.value_dim; ++c) {
            in(static_cast<Eigen::Index>(c), 0) = s.values[c * p + idx].real();
            in(static_cast<Eigen::Index>(c), 1) = s.values[c * p + idx].imag();
        }
        res.setZero();
        mult(m, in, res);
        for (std::size_t c = 0; c < out_dim; ++c)
            out.values[c * p + idx] = cplx(res(static_cast<Eigen::Index>(c), 0), res(static_cast<Eigen::Index>(c), 1));
    });
    return synthesize(std::move(out));
}

namespace fft_detail {

inline void rotate(Eigen::MatrixXd& v, cplx z) {
    for (Eigen::Index i = 0; i < v.rows(); ++i) {
        const cplx w = z * cplx(v(i, 0), v(i, 1));
        v(i, 0) = w.real();
        v(i, 1) = w.imag();
    }
}

inline bool is_zero_mode(const double* m, int n) {
    for (int i = 0; i < n; ++i)
        if (m[i] != 0) return false;
    return true;
}

inline std::string mode_string(const double* m, int n) {
    std::string s = "(";
    for (int i = 0; i < n; ++i) s += (i ? "," : "") + std::to_string(static_cast<long>(m[i]));
    return s + ")";
}

}  // namespace fft_detail

inline GridField apply_symbol(const OperatorSpec& op, const GridField& u) {
    if (u.value_dim != op.dim_v || u.n != op.n) throw DimensionError("field shape does not match the operator domain");
    const NumericSymbol a(op);
    Eigen::MatrixXd am(static_cast<Eigen::Index>(op.dim_e), static_cast<Eigen::Index>(op.dim_v));
    const cplx ik = ipow(op.k);
    auto out = apply_multiplier(u, op.dim_e, [&](const double* m, const Eigen::MatrixXd& in, Eigen::MatrixXd& res) {
        a.eval_into(m, am);
        res.noalias() = am * in;
        fft_detail::rotate(res, ik);
    });
    out.mean_zero = true;
    return out;
}

/// u_m = A(m)^+ f_m / i^k for m != 0, u_0 = 0.
inline GridField solve_pseudo(const OperatorSpec& op, const GridField& f) {
    if (f.value_dim != op.dim_e || f.n != op.n) throw DimensionError("field shape does not match the operator target");
    const NumericSymbol a(op);
    const auto dv = static_cast<Eigen::Index>(op.dim_v);
    Eigen::MatrixXd am(static_cast<Eigen::Index>(op.dim_e), dv), gram(dv, dv);
    Eigen::LDLT<Eigen::MatrixXd> ldlt(dv);
    const cplx back = 1.0 / ipow(op.k);
    auto out = apply_multiplier(f, op.dim_v, [&](const double* m, const Eigen::MatrixXd& in, Eigen::MatrixXd& res) {
        if (fft_detail::is_zero_mode(m, op.n)) return;
        a.eval_into(m, am);
        gram.noalias() = am.transpose() * am;
        ldlt.compute(gram);
        const double scale = gram.diagonal().maxCoeff();
        if (ldlt.info() != Eigen::Success || ldlt.vectorD().minCoeff() <= 1e-13 * scale)
            throw std::domain_error("not elliptic: symbol singular at mode " + fft_detail::mode_string(m, op.n));
        res.noalias() = am.transpose() * in;
        ldlt.solveInPlace(res);
        fft_detail::rotate(res, back);
    });
    out.mean_zero = true;
    return out;
}

/// D^l u with components (beta, c) weighted by sqrt(l!/beta!), so the pointwise norm is |D^l u|.
inline GridField derivative_tensor(const GridField& u, int ell) {
    if (ell < 0) throw std::invalid_argument("derivative order must be nonnegative");
    if (ell == 0) return u;
    const auto betas = multi_indices(u.n, ell);
    std::vector<double> w;
    for (const auto& b : betas) w.push_back(std::sqrt(factorial(ell).get_d() / multi_factorial(b).get_d()));
    const cplx il = ipow(ell);
    const std::size_t dim = u.value_dim;
    return apply_multiplier(u, betas.size() * dim, [&](const double* m, const Eigen::MatrixXd& in, Eigen::MatrixXd& res) {
        for (std::size_t b = 0; b < betas.size(); ++b) {
            double mono = w[b];
            for (int i = 0; i < u.n; ++i)
                for (int e = 0; e < betas[b][static_cast<std::size_t>(i)]; ++e) mono *= m[i];
            res.middleRows(static_cast<Eigen::Index>(b * dim), static_cast<Eigen::Index>(dim)) = mono * in;
        }
        fft_detail::rotate(res, il);
    });
}

/// Drops the zero and Nyquist modes; equal to solve_pseudo(op, apply_symbol(op, u)) for elliptic op.
inline GridField project_modes(const GridField& u) {
    auto out = apply_multiplier(u, u.value_dim, [&](const double* m, const Eigen::MatrixXd& in, Eigen::MatrixXd& res) {
        if (!fft_detail::is_zero_mode(m, u.n)) res = in;
    });
    out.mean_zero = true;
    return out;
}

inline GridField real_part(GridField u) {
    for (auto& v : u.values) v = cplx(v.real(), 0);
    return u;
}

inline GridField subtract_mean(GridField u) {
    const std::size_t p = u.points();
    for (std::size_t c = 0; c < u.value_dim; ++c) {
        cplx s = 0;
        for (std::size_t i = 0; i < p; ++i) s += u.values[c * p + i];
        s /= static_cast<double>(p);
        for (std::size_t i = 0; i < p; ++i) u.values[c * p + i] -= s;
    }
    u.mean_zero = true;
    return u;
}

/// Riemann sum (sum |u|^p h^n)^{1/p}; p = infinity gives the max.
inline double lp_norm(const GridField& u, double p) {
    if (!(p >= 1)) throw std::invalid_argument("lp_norm needs p >= 1");
    const std::size_t pts = u.points();
    if (std::isinf(p)) {
        double m = 0;
        for (std::size_t i = 0; i < pts; ++i) m = std::max(m, u.pointwise_norm(i));
        return m;
    }
    double s = 0;
    for (std::size_t i = 0; i < pts; ++i) s += std::pow(u.pointwise_norm(i), p);
    return std::pow(s * u.cell(), 1 / p);
}

/// sum |u(x)| / max(|x|, h)^a h^n.
inline double hardy_norm(const GridField& u, double a) {
    const double h = u.h();
    double s = 0;
    for (std::size_t i = 0; i < u.points(); ++i) s += u.pointwise_norm(i) / std::pow(std::max(u.radius(i), h), a);
    return s * u.cell();
}

/// L^2 norm from the Fourier coefficients.
inline double spectral_l2_norm(const GridField& u) {
    const GridField s = spectrum(u);
    double t = 0;
    for (const auto& v : s.values) t += std::norm(v);
    return std::sqrt(t * std::pow(2 * std::numbers::pi, u.n));
}

/// max |c_m - conj(c_{-m})|; zero for real fields.
inline double conjugate_symmetry_defect(const GridField& u) {
    const GridField s = spectrum(u);
    const std::size_t p = u.points(), N = u.size;
    double worst = 0;
    for (std::size_t idx = 0; idx < p; ++idx) {
        std::size_t rest = idx, neg = 0, stride = 1;
        for (int i = 0; i < u.n; ++i) {
            const std::size_t j = rest % N;
            rest /= N;
            neg += ((N - j) % N) * stride;
            stride *= N;
        }
        for (std::size_t c = 0; c < u.value_dim; ++c) worst = std::max(worst, std::abs(s.values[c * p + idx] - std::conj(s.values[c * p + neg])));
    }
    return worst;
}

/// sum <f, g> h^n (real parts).
inline double inner_product(const GridField& f, const GridField& g) {
    if (f.values.size() != g.values.size()) throw DimensionError("inner product of differently shaped fields");
    double s = 0;
    for (std::size_t i = 0; i < f.values.size(); ++i) s += (f.values[i] * std::conj(g.values[i])).real();
    return s * f.cell();
}

/// Scalar field times a fixed vector.
inline GridField times_vector(const GridField& scalar, const Eigen::VectorXd& e) {
    GridField out(scalar.n, scalar.size, static_cast<std::size_t>(e.size()));
    const std::size_t p = scalar.points();
    for (std::size_t c = 0; c < out.value_dim; ++c)
        for (std::size_t i = 0; i < p; ++i) out.values[c * p + i] = scalar.values[i] * e(static_cast<Eigen::Index>(c));
    return out;
}

/// exp(1/(|x/delta|^2 - 1)) on |x| < delta, scaled to unit discrete L^1 mass.
inline GridField mollifier(int n, std::size_t size, double delta) {
    GridField u(n, size, 1);
    double mass = 0;
    for (std::size_t i = 0; i < u.points(); ++i) {
        const double t = u.radius(i) / delta;
        if (t < 1) {
            u.values[i] = std::exp(1 / (t * t - 1));
            mass += u.values[i].real();
        }
    }
    mass *= u.cell();
    for (auto& v : u.values) v /= mass;
    return u;
}

/// Real band-limited field: random Gaussian coefficients for 0 < |m|_inf <= band, damped by (1+|m|^2)^{-s/2}.
inline GridField random_band_limited(int n, std::size_t size, std::size_t dim, std::mt19937_64& rng, int band, double s) {
    GridField c(n, size, dim);
    std::normal_distribution<double> normal;
    const std::size_t p = c.points();
    for_each_mode(n, size, [&](std::size_t idx, const double* m, bool nyquist) {
        if (nyquist || fft_detail::is_zero_mode(m, n)) return;
        double inf = 0, r2 = 0;
        for (int i = 0; i < n; ++i) {
            inf = std::max(inf, std::abs(m[i]));
            r2 += m[i] * m[i];
        }
        if (inf > band) return;
        const double damp = std::pow(1 + r2, -s / 2);
        for (std::size_t k = 0; k < dim; ++k) {
            const double re = normal(rng), im = normal(rng);
            c.values[k * p + idx] = damp * cplx(re, im);
        }
    });
    auto u = real_part(synthesize(std::move(c)));
    u.mean_zero = true;
    return u;
}

inline GridField random_band_limited(int n, std::size_t size, std::size_t dim, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> band(1, std::max(1, static_cast<int>(size) / 2 - 1));
    std::uniform_real_distribution<double> decay(0, 3);
    const int b = band(rng);
    const double s = decay(rng);
    return random_band_limited(n, size, dim, rng, b, s);
}

// ---------------------------------------------------------------------------
// probes

struct ProbeReport {
    std::string probe;
    std::string op_name;
    nlohmann::ordered_json params = nlohmann::ordered_json::object();
    std::vector<double> scales;  // one entry per ratio when the probe runs over scales
    std::vector<double> ratios;
    std::vector<double> growth;
    std::string criterion;
    double statistic = 0;
    double threshold = 0;
    bool pass = false;
    nlohmann::ordered_json details = nlohmann::ordered_json::object();
};

inline nlohmann::ordered_json to_json(const ProbeReport& r) {
    nlohmann::ordered_json j;
    j["probe"] = r.probe;
    j["operator"] = r.op_name;
    j["params"] = r.params;
    if (!r.scales.empty()) j["scales"] = r.scales;
    j["ratios"] = r.ratios;
    j["growth"] = r.growth;
    j["criterion"] = r.criterion;
    j["statistic"] = r.statistic;
    j["threshold"] = r.threshold;
    j["pass"] = r.pass;
    if (!r.details.empty()) j["details"] = r.details;
    return j;
}

/// index,scale,ratio per line.
inline std::string to_csv(const ProbeReport& r) {
    std::ostringstream os;
    os.precision(17);
    os << "index,scale,ratio\n";
    for (std::size_t i = 0; i < r.ratios.size(); ++i) {
        os << i << ',';
        if (i < r.scales.size()) os << r.scales[i];
        os << ',' << r.ratios[i] << '\n';
    }
    return os.str();
}

constexpr double kGrowthThreshold = 1.3;
constexpr double kSpreadThreshold = 3.0;
constexpr double kDualitySpread = 5.0;
constexpr double kSlopeTolerance = 0.15;

inline std::size_t default_grid(int n) {
    switch (n) {
        case 1:
        case 2: return 256;
        case 3: return 64;
        case 4: return 32;
        default: return 16;
    }
}

namespace probe_detail {

inline std::vector<double> growth_factors(const std::vector<double>& r) {
    std::vector<double> g;
    for (std::size_t i = 1; i < r.size(); ++i) g.push_back(r[i - 1] > 0 ? r[i] / r[i - 1] : std::numeric_limits<double>::infinity());
    return g;
}

inline double min_of(const std::vector<double>& v) { return v.empty() ? 0 : *std::min_element(v.begin(), v.end()); }
inline double max_of(const std::vector<double>& v) { return v.empty() ? 0 : *std::max_element(v.begin(), v.end()); }

inline double median(std::vector<double> v) {
    if (v.empty()) return 0;
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : (v[m - 1] + v[m]) / 2;
}

inline Eigen::VectorXd to_float(const std::vector<Rational>& v) {
    Eigen::VectorXd x(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) x(static_cast<Eigen::Index>(i)) = v[i].get_d();
    return x;
}

inline std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace probe_detail

/*
 * max over random fields of |D^k u|_2 / |A(D)u|_2, evaluated mode-wise by
 * Parseval. Every tenth trial is a single mode along the weakest singular
 * direction of A(m).
 */
inline ProbeReport probe_l2(const OperatorSpec& op, int trials = 100, std::uint64_t seed = 1, std::size_t grid = 0) {
    if (trials < 1) throw std::invalid_argument("trials must be positive");
    const auto c = ellipticity_constant(op);
    const std::size_t N = grid ? grid : (op.n <= 3 ? 64 : op.n == 4 ? 16 : 8);
    GridField shape(op.n, N, 0);  // validates the grid size
    const NumericSymbol a(op);
    const auto dv = static_cast<Eigen::Index>(op.dim_v);

    std::vector<std::vector<double>> modes;
    std::vector<double> weight, grams;
    Eigen::MatrixXd am(static_cast<Eigen::Index>(op.dim_e), dv), g(dv, dv);
    for_each_mode(op.n, N, [&](std::size_t, const double* m, bool nyquist) {
        if (nyquist || fft_detail::is_zero_mode(m, op.n)) return;
        modes.emplace_back(m, m + op.n);
        double r2 = 0;
        for (int i = 0; i < op.n; ++i) r2 += m[i] * m[i];
        weight.push_back(std::pow(r2, op.k));
        a.eval_into(m, am);
        g.noalias() = am.transpose() * am;
        grams.insert(grams.end(), g.data(), g.data() + g.size());
    });

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    std::uniform_int_distribution<std::size_t> pick(0, modes.size() - 1);
    std::uniform_int_distribution<int> band(1, std::max(1, static_cast<int>(N) / 2 - 1));
    std::uniform_real_distribution<double> decay(0, 3);

    ProbeReport r;
    r.probe = "l2";
    r.op_name = op.name;
    r.params["grid"] = N;
    r.params["trials"] = trials;
    r.params["seed"] = seed;
    Eigen::VectorXd re(dv), im(dv);
    for (int t = 0; t < trials; ++t) {
        double num = 0, den = 0;
        if (t % 10 == 0) {
            const std::size_t q = pick(rng);
            const Eigen::Map<const Eigen::MatrixXd> gq(grams.data() + q * static_cast<std::size_t>(dv * dv), dv, dv);
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gq);
            num = weight[q];
            den = es.eigenvalues()(0);
            if (den <= 0) throw std::domain_error("not elliptic: symbol singular at a lattice mode");
        } else {
            const int b = band(rng);
            const double s = decay(rng);
            for (std::size_t q = 0; q < modes.size(); ++q) {
                double inf = 0, r2 = 0;
                for (double x : modes[q]) {
                    inf = std::max(inf, std::abs(x));
                    r2 += x * x;
                }
                if (inf > b) continue;
                const double damp = std::pow(1 + r2, -s / 2);
                for (Eigen::Index i = 0; i < dv; ++i) {
                    re(i) = damp * normal(rng);
                    im(i) = damp * normal(rng);
                }
                const Eigen::Map<const Eigen::MatrixXd> gq(grams.data() + q * static_cast<std::size_t>(dv * dv), dv, dv);
                num += weight[q] * (re.squaredNorm() + im.squaredNorm());
                den += re.dot(gq * re) + im.dot(gq * im);
            }
        }
        r.ratios.push_back(std::sqrt(num / den));
    }
    r.criterion = "max ratio <= ellipticity_constant * (1 + 1e-6)";
    r.statistic = probe_detail::max_of(r.ratios);
    r.threshold = c.constant * (1 + 1e-6);
    r.pass = r.statistic <= r.threshold;
    r.details["ellipticity_constant"] = c.constant;
    return r;
}

/*
 * Sobolev and Hardy probes. Non-cancelling operators: u = A(D)^+ (rho_delta e)
 * for e in the image intersection, expected to blow up as delta = 2^-s shrinks.
 * Cancelling operators: u = rho_delta v for random v, expected to stay bounded.
 */
inline ProbeReport endpoint_probe(const std::string& kind, const OperatorSpec& op, int ell, int scales, std::size_t grid,
                                  std::uint64_t seed, int trials = 4) {
    if (kind != "sobolev" && kind != "hardy") throw std::invalid_argument("unknown endpoint probe " + kind);
    const int j = op.k - ell;
    if (ell < 0 || j <= 0 || j >= op.n)
        throw std::invalid_argument("parameter range: need 0 < k - ell < n (k = " + std::to_string(op.k) + ", ell = " + std::to_string(ell) +
                                    ", n = " + std::to_string(op.n) + ")");
    if (scales < 2) throw std::invalid_argument("need at least 2 scales");
    if (trials < 1) throw std::invalid_argument("trials must be positive");
    const std::size_t N = grid ? grid : default_grid(op.n);
    const double p = static_cast<double>(op.n) / (op.n - j);
    const auto cancel = is_cancelling(op, seed);

    auto measure = [&](const GridField& u) {
        const GridField au = real_part(apply_symbol(op, u));
        const GridField du = real_part(derivative_tensor(u, ell));
        const double num = kind == "sobolev" ? lp_norm(du, p) : hardy_norm(du, j);
        const double den = lp_norm(au, 1);
        return den > 0 ? num / den : 0.0;
    };

    ProbeReport r;
    r.probe = kind;
    r.op_name = op.name;
    r.params["ell"] = ell;
    r.params["scales"] = scales;
    r.params["grid"] = N;
    r.params["seed"] = seed;
    r.details["cancelling"] = cancel.cancelling;
    r.details[kind == "sobolev" ? "exponent" : "weight_exponent"] = kind == "sobolev" ? p : static_cast<double>(j);

    if (!cancel.cancelling) {
        Eigen::VectorXd e = probe_detail::to_float(cancel.intersection.basis_vector(0));
        e.normalize();
        r.details["family"] = "pseudo_inverse_of_concentrating_intersection_data";
        r.details["e"] = probe_detail::to_std(e);
        for (int s = 0; s < scales; ++s) {
            const double delta = std::ldexp(1.0, -s);
            const GridField f = subtract_mean(times_vector(mollifier(op.n, N, delta), e));
            r.scales.push_back(delta);
            r.ratios.push_back(measure(real_part(solve_pseudo(op, f))));
        }
        r.growth = probe_detail::growth_factors(r.ratios);
        r.criterion = "blow-up: every consecutive growth factor >= 1.3";
        r.statistic = probe_detail::min_of(r.growth);
        r.threshold = kGrowthThreshold;
        r.pass = r.statistic >= r.threshold;
        return r;
    }

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    std::vector<Eigen::VectorXd> vs;
    for (int t = 0; t < trials; ++t) {
        Eigen::VectorXd v(static_cast<Eigen::Index>(op.dim_v));
        for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = normal(rng);
        vs.push_back(v.normalized());
    }
    r.params["trials"] = trials;
    r.details["family"] = "concentrating_bump_times_random_vector";
    for (int s = 0; s < scales; ++s) {
        const double delta = std::ldexp(1.0, -s);
        const GridField bump = mollifier(op.n, N, delta);
        double worst = 0;
        for (const auto& v : vs) {
            const GridField u = real_part(project_modes(times_vector(bump, v)));
            worst = std::max(worst, measure(u));
        }
        r.scales.push_back(delta);
        r.ratios.push_back(worst);
    }
    r.growth = probe_detail::growth_factors(r.ratios);
    r.criterion = "bounded: max/min ratio across scales <= 3";
    const double lo = probe_detail::min_of(r.ratios);
    r.statistic = lo > 0 ? probe_detail::max_of(r.ratios) / lo : std::numeric_limits<double>::infinity();
    r.threshold = kSpreadThreshold;
    r.pass = r.statistic <= r.threshold;
    return r;
}

inline ProbeReport probe_sobolev(const OperatorSpec& op, int ell, int scales = 3, std::size_t grid = 0, std::uint64_t seed = 1) {
    return endpoint_probe("sobolev", op, ell, scales, grid, seed);
}

inline ProbeReport probe_hardy(const OperatorSpec& op, int ell, int scales = 3, std::size_t grid = 0, std::uint64_t seed = 1) {
    return endpoint_probe("hardy", op, ell, scales, grid, seed);
}

/// |sum <f, phi>| / (|f|_1 |D phi|_n) with phi made mean-zero; 0 when the denominator vanishes.
inline double duality_ratio(const GridField& f, const GridField& phi) {
    const GridField z = subtract_mean(phi);
    const double den = lp_norm(f, 1) * lp_norm(real_part(derivative_tensor(z, 1)), f.n);
    if (den <= 0) return 0;
    return std::abs(inner_product(f, z)) / den;
}

/// ln(1 / max(|x|, delta)) on |x| < 1, zero outside.
inline GridField log_test_field(int n, std::size_t size, double delta) {
    GridField u(n, size, 1);
    for (std::size_t i = 0; i < u.points(); ++i) {
        const double r = u.radius(i);
        if (r < 1) u.values[i] = -std::log(std::max(r, delta));
    }
    return u;
}

/// Bump of width delta times a random affine vector field v0 + sum_i v_i x_i / delta, centred at c.
inline GridField random_compact_field(int n, std::size_t size, std::size_t dim, double delta, std::mt19937_64& rng) {
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> shift(-0.5, 0.5);
    Eigen::MatrixXd coef(static_cast<Eigen::Index>(dim), n + 1);
    for (Eigen::Index i = 0; i < coef.size(); ++i) coef(i) = normal(rng);
    std::vector<double> c(static_cast<std::size_t>(n));
    for (auto& x : c) x = shift(rng);
    GridField u(n, size, dim);
    const std::size_t p = u.points();
    std::vector<double> y(static_cast<std::size_t>(n));
    for (std::size_t idx = 0; idx < p; ++idx) {
        std::size_t rest = idx;
        double r2 = 0;
        for (int i = n - 1; i >= 0; --i) {
            y[static_cast<std::size_t>(i)] = (u.coordinate(rest % size) - c[static_cast<std::size_t>(i)]) / delta;
            rest /= size;
            r2 += y[static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(i)];
        }
        if (r2 >= 1) continue;
        const double b = std::exp(1 / (r2 - 1));
        for (std::size_t k = 0; k < dim; ++k) {
            double v = coef(static_cast<Eigen::Index>(k), 0);
            for (int i = 0; i < n; ++i) v += coef(static_cast<Eigen::Index>(k), i + 1) * y[static_cast<std::size_t>(i)];
            u.values[k * p + idx] = b * v;
        }
    }
    return u;
}

/*
 * Duality probe for an annihilator L with L A = 0. Bounded part: f = A(D)u for
 * a random compact u at a random dyadic width, paired with phi = |D|^{-1} f;
 * the ratio is dilation invariant, so trials at different widths compare.
 * Control: unconstrained f = rho_delta e against the critical test field
 * ln(1/max(|x|, delta)) e.
 */
inline ProbeReport probe_duality(const HomoPolyMatrix& l, const OperatorSpec& a, int trials = 200, std::uint64_t seed = 1,
                                 std::size_t grid = 0, int scales = 3) {
    if (a.n < 2) throw std::invalid_argument("duality probe needs n >= 2");
    if (l.cols() != a.dim_e) throw DimensionError("annihilator columns must match the operator target");
    if (!is_zero_polymat(polymat_mul(l, symbol(a)))) throw std::invalid_argument("L A is not identically zero");
    if (trials < 1 || scales < 2) throw std::invalid_argument("need trials >= 1 and scales >= 2");
    const std::size_t N = grid ? grid : default_grid(a.n);

    ProbeReport r;
    r.probe = "duality";
    r.op_name = a.name;
    r.params["trials"] = trials;
    r.params["scales"] = scales;
    r.params["grid"] = N;
    r.params["seed"] = seed;

    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> width(1, scales);
    for (int t = 0; t < trials; ++t) {
        const double delta = std::ldexp(1.0, -width(rng));
        const GridField u = random_compact_field(a.n, N, a.dim_v, delta, rng);
        const GridField f = real_part(apply_symbol(a, u));
        const GridField phi = real_part(apply_multiplier(f, a.dim_e, [&](const double* m, const Eigen::MatrixXd& in, Eigen::MatrixXd& res) {
            double r2 = 0;
            for (int i = 0; i < a.n; ++i) r2 += m[i] * m[i];
            if (r2 > 0) res = in / std::sqrt(r2);
        }));
        r.ratios.push_back(duality_ratio(f, phi));
    }
    const double med = probe_detail::median(r.ratios);
    const double spread = med > 0 ? probe_detail::max_of(r.ratios) / med : std::numeric_limits<double>::infinity();

    Eigen::VectorXd e = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(a.dim_e));
    e(0) = 1;
    std::vector<double> control, deltas;
    for (int s = 0; s < scales; ++s) {
        const double delta = std::ldexp(1.0, -(s + 1));
        const GridField f = subtract_mean(times_vector(mollifier(a.n, N, delta), e));
        const GridField phi = times_vector(log_test_field(a.n, N, delta), e);
        deltas.push_back(delta);
        control.push_back(duality_ratio(f, phi));
    }
    r.growth = probe_detail::growth_factors(control);
    const double control_growth = probe_detail::min_of(r.growth);

    r.criterion = "bounded: max/median <= 5; control: every consecutive growth factor >= 1.3";
    r.statistic = spread;
    r.threshold = kDualitySpread;
    r.pass = spread <= kDualitySpread && control_growth >= kGrowthThreshold;
    r.details["median"] = med;
    r.details["bounded_pass"] = spread <= kDualitySpread;
    r.details["control_scales"] = deltas;
    r.details["control_ratios"] = control;
    r.details["control_min_growth"] = control_growth;
    r.details["control_pass"] = control_growth >= kGrowthThreshold;
    return r;
}

/*
 * Homogeneity of the kernel g = sum_m W(m) A(m)^+ / i^k e^{i<m,x>} (2 pi)^-n.
 * g is sampled on the coordinate axes through per-axis sums of the multiplier;
 * the fit uses |g(r e) - g(2r e)|, which drops the constant the torus adds to g,
 * over 8h <= r, 2r <= 64h.
 */
inline ProbeReport kernel_probe(const OperatorSpec& op, std::size_t grid = 256, bool window = true) {
    if (op.k >= op.n) throw std::invalid_argument("log case not probed: need k < n");
    const std::size_t N = grid;
    GridField shape(op.n, N, 0);
    const double h = shape.h();
    if (64 * h >= std::numbers::pi) throw std::invalid_argument("kernel probe needs grid >= 256 so that 64h stays inside the torus");
    const NumericSymbol a(op);
    const auto dv = static_cast<Eigen::Index>(op.dim_v), de = static_cast<Eigen::Index>(op.dim_e);
    Eigen::MatrixXd am(de, dv), gram(dv, dv), pinv(dv, de);
    Eigen::LDLT<Eigen::MatrixXd> ldlt(dv);
    const double cutoff = static_cast<double>(N) / 2;

    // acc[i][j]: sum of W A^+ over modes with m_i = frequency(j)
    std::vector<std::vector<Eigen::MatrixXd>> acc(static_cast<std::size_t>(op.n),
                                                  std::vector<Eigen::MatrixXd>(N, Eigen::MatrixXd::Zero(dv, de)));
    std::vector<std::size_t> jdx(static_cast<std::size_t>(op.n));
    for_each_mode(op.n, N, [&](std::size_t idx, const double* m, bool nyquist) {
        if (nyquist || fft_detail::is_zero_mode(m, op.n)) return;
        double r2 = 0;
        for (int i = 0; i < op.n; ++i) r2 += m[i] * m[i];
        double w = 1;
        if (window) {
            const double rr = std::sqrt(r2);
            if (rr >= cutoff) return;
            w = 0.5 * (1 + std::cos(std::numbers::pi * rr / cutoff));
        }
        a.eval_into(m, am);
        gram.noalias() = am.transpose() * am;
        ldlt.compute(gram);
        if (ldlt.info() != Eigen::Success || ldlt.vectorD().minCoeff() <= 1e-13 * gram.diagonal().maxCoeff())
            throw std::domain_error("not elliptic: symbol singular at mode " + fft_detail::mode_string(m, op.n));
        pinv = am.transpose();
        ldlt.solveInPlace(pinv);
        std::size_t rest = idx;
        for (int i = op.n - 1; i >= 0; --i) {
            jdx[static_cast<std::size_t>(i)] = rest % N;
            rest /= N;
        }
        for (int i = 0; i < op.n; ++i) acc[static_cast<std::size_t>(i)][jdx[static_cast<std::size_t>(i)]] += w * pinv;
    });

    const cplx phase = 1.0 / ipow(op.k);
    const double norm = std::pow(2 * std::numbers::pi, -op.n);
    // g(t e_i), real part
    auto kernel_at = [&](int i, double t) {
        Eigen::MatrixXd g = Eigen::MatrixXd::Zero(dv, de);
        for (std::size_t j = 0; j < N; ++j) {
            const double mj = frequency(j, N);
            g += (phase * std::exp(cplx(0, mj * t))).real() * acc[static_cast<std::size_t>(i)][j];
        }
        return Eigen::MatrixXd(norm * g);
    };

    ProbeReport r;
    r.probe = "kernel";
    r.op_name = op.name;
    r.params["grid"] = N;
    r.params["window"] = window ? "raised_cosine" : "none";
    std::vector<double> xs, ys, plain_y;
    for (int q = 0; q <= 8; ++q) {
        const double rad = 8 * h * std::pow(2.0, q / 4.0);
        double mean = 0;
        for (int i = 0; i < op.n; ++i)
            for (double sgn : {1.0, -1.0}) {
                const Eigen::MatrixXd g1 = kernel_at(i, sgn * rad), g2 = kernel_at(i, 2 * sgn * rad);
                const double d = (g1 - g2).norm();
                xs.push_back(std::log(rad));
                ys.push_back(std::log(d));
                plain_y.push_back(std::log(g1.norm()));
                mean += d;
            }
        r.scales.push_back(rad);
        r.ratios.push_back(mean / (2 * op.n));
    }
    auto slope = [&](const std::vector<double>& y) {
        double mx = 0, my = 0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            mx += xs[i];
            my += y[i];
        }
        mx /= static_cast<double>(xs.size());
        my /= static_cast<double>(xs.size());
        double sxy = 0, sxx = 0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            sxy += (xs[i] - mx) * (y[i] - my);
            sxx += (xs[i] - mx) * (xs[i] - mx);
        }
        return sxy / sxx;
    };
    const double expected = op.k - op.n;
    r.criterion = "|slope - (k - n)| <= 0.15";
    r.statistic = slope(ys);
    r.threshold = kSlopeTolerance;
    r.pass = std::abs(r.statistic - expected) <= kSlopeTolerance;
    r.details["expected_slope"] = expected;
    r.details["plain_slope"] = slope(plain_y);
    return r;
}

}  // namespace cancelkit
