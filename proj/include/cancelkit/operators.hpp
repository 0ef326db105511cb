#pragma once

// Homogeneous constant-coefficient operators A(D) = sum_{|alpha|=k} A_alpha d^alpha,
// their symbols, and the named operator catalog.

#include "cancelkit/polymat.hpp"

#include <Eigen/Dense>

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace cancelkit {

/// Multi-index keyed terms, x1-heavy monomials first.
using TermMap = std::map<MultiIndex, RatMatrix, std::greater<>>;

struct OperatorSpec {
    int n = 0;
    int k = 0;
    std::size_t dim_v = 0;
    std::size_t dim_e = 0;
    TermMap terms;
    std::string name;
    std::vector<std::pair<std::string, Rational>> params;

    /// Throws std::invalid_argument naming the first offending term.
    void validate(bool allow_zero = false) const {
        if (n < 1 || n > detail::kMaxVars) throw std::invalid_argument("n must lie in 1.." + std::to_string(detail::kMaxVars));
        if (k < 0) throw std::invalid_argument("order k must be nonnegative");
        if (dim_v == 0 || dim_e == 0) throw std::invalid_argument("dim_v and dim_e must be positive");
        bool any_nonzero = false;
        for (const auto& [alpha, a] : terms) {
            const std::string where = "term alpha=" + index_string(alpha);
            if (static_cast<int>(alpha.size()) != n) throw std::invalid_argument(where + ": length differs from n");
            for (int e : alpha)
                if (e < 0) throw std::invalid_argument(where + ": negative exponent");
            if (degree_of(alpha) != k)
                throw std::invalid_argument(where + ": |alpha| = " + std::to_string(degree_of(alpha)) + " but k = " + std::to_string(k));
            if (a.rows() != dim_e || a.cols() != dim_v)
                throw std::invalid_argument(where + ": matrix shape must be dim_e x dim_v");
            any_nonzero = any_nonzero || !a.is_zero();
        }
        if (!any_nonzero && !allow_zero) throw std::invalid_argument("operator has no nonzero coefficient");
    }

    std::optional<Rational> param(const std::string& key) const {
        for (const auto& [k2, v] : params)
            if (k2 == key) return v;
        return std::nullopt;
    }

    static std::string index_string(const MultiIndex& alpha) {
        std::string s = "(";
        for (std::size_t i = 0; i < alpha.size(); ++i) s += (i ? "," : "") + std::to_string(alpha[i]);
        return s + ")";
    }
};

/// A(xi) as an exact polynomial matrix of shape dim_e x dim_v.
inline HomoPolyMatrix symbol(const OperatorSpec& op) {
    HomoPolyMatrix s(op.n, op.dim_e, op.dim_v);
    std::vector<HomoPoly> entries(op.dim_e * op.dim_v, HomoPoly(op.n));
    for (const auto& [alpha, a] : op.terms)
        for (std::size_t i = 0; i < op.dim_e; ++i)
            for (std::size_t j = 0; j < op.dim_v; ++j)
                if (a(i, j) != 0) entries[i * op.dim_v + j] += HomoPoly::monomial(op.n, alpha, a(i, j));
    for (std::size_t i = 0; i < op.dim_e; ++i)
        for (std::size_t j = 0; j < op.dim_v; ++j) s.set(i, j, entries[i * op.dim_v + j]);
    return s;
}

/// Reads the A_alpha back from a polynomial matrix whose entries have degree k.
inline OperatorSpec from_symbol(const HomoPolyMatrix& m, int k, std::string name = {}) {
    OperatorSpec op;
    op.n = m.n();
    op.k = k;
    op.dim_e = m.rows();
    op.dim_v = m.cols();
    op.name = std::move(name);
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            for (const auto& [alpha, c] : m(i, j).terms()) {
                auto it = op.terms.try_emplace(alpha, op.dim_e, op.dim_v).first;
                it->second(i, j) = c;
            }
    return op;
}

namespace detail {

inline Rational monomial_value(const MultiIndex& alpha, std::span<const Rational> xi) {
    Rational v = 1;
    for (std::size_t i = 0; i < alpha.size(); ++i)
        for (int e = 0; e < alpha[i]; ++e) v *= xi[i];
    return v;
}

}  // namespace detail

inline RatMatrix symbol_at(const OperatorSpec& op, std::span<const Rational> xi) {
    if (static_cast<int>(xi.size()) != op.n) throw DimensionError("xi length differs from n");
    RatMatrix out(op.dim_e, op.dim_v);
    for (const auto& [alpha, a] : op.terms) {
        const Rational w = detail::monomial_value(alpha, xi);
        if (w == 0) continue;
        out = out + a * w;
    }
    return out;
}
inline RatMatrix symbol_at(const OperatorSpec& op, const std::vector<Rational>& xi) {
    return symbol_at(op, std::span<const Rational>(xi));
}

/// Adjoint for the standard inner products on V and E.
inline RatMatrix adjoint_at(const OperatorSpec& op, const std::vector<Rational>& xi) { return symbol_at(op, xi).transpose(); }

/// The formal adjoint operator, whose symbol is A(xi)^T.
inline OperatorSpec adjoint(const OperatorSpec& op) {
    OperatorSpec t = op;
    std::swap(t.dim_v, t.dim_e);
    for (auto& [alpha, a] : t.terms) a = a.transpose();
    t.name = op.name.empty() ? std::string{} : op.name + "*";
    return t;
}

/// Double-precision symbol evaluation for the numeric modules.
class NumericSymbol {
public:
    NumericSymbol() = default;
    explicit NumericSymbol(const OperatorSpec& op) : n_(op.n), k_(op.k), rows_(op.dim_e), cols_(op.dim_v) {
        for (const auto& [alpha, a] : op.terms) {
            if (a.is_zero()) continue;
            Eigen::MatrixXd m(a.rows(), a.cols());
            for (std::size_t i = 0; i < a.rows(); ++i)
                for (std::size_t j = 0; j < a.cols(); ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = a(i, j).get_d();
            alphas_.push_back(alpha);
            mats_.push_back(std::move(m));
        }
    }

    int n() const { return n_; }
    int k() const { return k_; }
    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    Eigen::MatrixXd operator()(const double* xi) const {
        Eigen::MatrixXd out = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows_), static_cast<Eigen::Index>(cols_));
        for (std::size_t t = 0; t < alphas_.size(); ++t) {
            double w = 1;
            for (int i = 0; i < n_; ++i)
                for (int e = 0; e < alphas_[t][static_cast<std::size_t>(i)]; ++e) w *= xi[i];
            if (w != 0) out.noalias() += w * mats_[t];
        }
        return out;
    }
    Eigen::MatrixXd operator()(const Eigen::VectorXd& xi) const { return (*this)(xi.data()); }

    /// Same as operator() into a preallocated rows() x cols() matrix.
    void eval_into(const double* xi, Eigen::MatrixXd& out) const {
        out.setZero();
        for (std::size_t t = 0; t < alphas_.size(); ++t) {
            double w = 1;
            for (int i = 0; i < n_; ++i)
                for (int e = 0; e < alphas_[t][static_cast<std::size_t>(i)]; ++e) w *= xi[i];
            if (w != 0) out += w * mats_[t];
        }
    }

    /// sum_alpha (alpha!/k!) |A_alpha|_F^2, the squared Hilbert-Schmidt norm of the symmetric tensor.
    double tensor_norm_squared() const {
        double s = 0;
        const double kf = factorial(k_).get_d();
        for (std::size_t t = 0; t < alphas_.size(); ++t) s += multi_factorial(alphas_[t]).get_d() / kf * mats_[t].squaredNorm();
        return s;
    }

private:
    int n_ = 0;
    int k_ = 0;
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<MultiIndex> alphas_;
    std::vector<Eigen::MatrixXd> mats_;
};

/*
 * Exterior algebra helpers. Basis of Lambda^m R^n: increasing index subsets,
 * listed lexicographically.
 */
namespace forms {

inline std::vector<std::vector<int>> subsets(int n, int m) {
    std::vector<std::vector<int>> out;
    if (m < 0 || m > n) return out;
    std::vector<int> cur(static_cast<std::size_t>(m));
    std::function<void(int, int)> rec = [&](int pos, int start) {
        if (pos == m) {
            out.push_back(cur);
            return;
        }
        for (int i = start; i < n; ++i) {
            cur[static_cast<std::size_t>(pos)] = i;
            rec(pos + 1, i + 1);
        }
    };
    rec(0, 0);
    return out;
}

inline std::size_t index_of(const std::vector<std::vector<int>>& basis, const std::vector<int>& s) {
    return static_cast<std::size_t>(std::lower_bound(basis.begin(), basis.end(), s) - basis.begin());
}

/// Matrix of e_i ^ (.) : Lambda^m -> Lambda^{m+1}.
inline RatMatrix wedge(int n, int m, int i) {
    const auto from = subsets(n, m), to = subsets(n, m + 1);
    RatMatrix w(to.size(), from.size());
    for (std::size_t c = 0; c < from.size(); ++c) {
        const auto& s = from[c];
        if (std::find(s.begin(), s.end(), i) != s.end()) continue;
        auto t = s;
        const auto pos = std::lower_bound(t.begin(), t.end(), i) - t.begin();
        t.insert(t.begin() + pos, i);
        w(index_of(to, t), c) = (pos % 2 == 0) ? 1 : -1;
    }
    return w;
}

/// Matrix of e_i interior (.) : Lambda^m -> Lambda^{m-1}.
inline RatMatrix interior(int n, int m, int i) {
    const auto from = subsets(n, m), to = subsets(n, m - 1);
    RatMatrix w(to.size(), from.size());
    for (std::size_t c = 0; c < from.size(); ++c) {
        const auto& s = from[c];
        const auto it = std::find(s.begin(), s.end(), i);
        if (it == s.end()) continue;
        const auto pos = it - s.begin();
        auto t = s;
        t.erase(t.begin() + pos);
        w(index_of(to, t), c) = (pos % 2 == 0) ? 1 : -1;
    }
    return w;
}

}  // namespace forms

struct CatalogParams {
    std::optional<int> n;
    std::optional<int> k;
    std::optional<int> m;
    std::optional<Rational> lambda;
};

namespace catalog_detail {

inline MultiIndex unit(int n, int i, int mult = 1) {
    MultiIndex a(static_cast<std::size_t>(n), 0);
    a[static_cast<std::size_t>(i)] = mult;
    return a;
}

inline int need(const std::optional<int>& v, const char* what, const std::string& op) {
    if (!v) throw std::invalid_argument(op + " requires parameter " + what);
    return *v;
}

inline void require_range(int v, int lo, int hi, const char* what, const std::string& op) {
    if (v < lo || v > hi)
        throw std::invalid_argument(op + ": " + what + " = " + std::to_string(v) + " outside " + std::to_string(lo) + ".." +
                                    std::to_string(hi));
}

inline std::size_t ipow(std::size_t b, int e) {
    std::size_t r = 1;
    for (int i = 0; i < e; ++i) r *= b;
    return r;
}

inline OperatorSpec make(int n, int k, std::size_t dim_v, std::size_t dim_e, std::string name) {
    OperatorSpec op;
    op.n = n;
    op.k = k;
    op.dim_v = dim_v;
    op.dim_e = dim_e;
    op.name = std::move(name);
    return op;
}

inline RatMatrix& slot(OperatorSpec& op, const MultiIndex& alpha) {
    return op.terms.try_emplace(alpha, op.dim_e, op.dim_v).first->second;
}

// D^k u for scalar u, as the full tensor of k-th partials (row index i1..ik in base n).
inline OperatorSpec grad_k(int n, int k) {
    auto op = make(n, k, 1, ipow(static_cast<std::size_t>(n), k), k == 1 ? "gradient" : "grad_k");
    for (std::size_t row = 0; row < op.dim_e; ++row) {
        MultiIndex alpha(static_cast<std::size_t>(n), 0);
        std::size_t r = row;
        for (int j = 0; j < k; ++j) {
            ++alpha[r % static_cast<std::size_t>(n)];
            r /= static_cast<std::size_t>(n);
        }
        slot(op, alpha)(row, 0) = 1;
    }
    return op;
}

inline OperatorSpec laplacian(int n) {
    auto op = make(n, 2, 1, 1, "laplacian");
    for (int i = 0; i < n; ++i) slot(op, unit(n, i, 2))(0, 0) = 1;
    return op;
}

// (xi_1 + i xi_2) v / 2 with C realified as R^2.
inline OperatorSpec cauchy_riemann() {
    auto op = make(2, 1, 2, 2, "cauchy_riemann");
    const Rational h = make_rational(1, 2);
    auto& a1 = slot(op, unit(2, 0));
    a1(0, 0) = h;
    a1(1, 1) = h;
    auto& a2 = slot(op, unit(2, 1));
    a2(0, 1) = -h;
    a2(1, 0) = h;
    return op;
}

// v -> (xi ^ v, xi interior v) on Lambda^m, output Lambda^{m+1} then Lambda^{m-1}.
inline OperatorSpec hodge(int n, int m) {
    const std::size_t dv = forms::subsets(n, m).size();
    const std::size_t up = forms::subsets(n, m + 1).size();
    const std::size_t down = forms::subsets(n, m - 1).size();
    auto op = make(n, 1, dv, up + down, "hodge");
    for (int i = 0; i < n; ++i) {
        auto& a = slot(op, unit(n, i));
        if (up) {
            const auto w = forms::wedge(n, m, i);
            for (std::size_t r = 0; r < up; ++r)
                for (std::size_t c = 0; c < dv; ++c) a(r, c) = w(r, c);
        }
        if (down) {
            const auto w = forms::interior(n, m, i);
            for (std::size_t r = 0; r < down; ++r)
                for (std::size_t c = 0; c < dv; ++c) a(up + r, c) = w(r, c);
        }
    }
    return op;
}

inline OperatorSpec ext_derivative(int n, int m) {
    const auto from = forms::subsets(n, m).size(), to = forms::subsets(n, m + 1).size();
    auto op = make(n, 1, from, to, "ext_derivative");
    for (int i = 0; i < n; ++i) slot(op, unit(n, i)) = forms::wedge(n, m, i);
    return op;
}

// (xi v^T + v xi^T)/2 + lambda <xi, v> id, into full n x n matrices (row-major).
inline OperatorSpec dev_sym_grad(int n, const Rational& lambda, std::string name) {
    const auto N = static_cast<std::size_t>(n);
    auto op = make(n, 1, N, N * N, std::move(name));
    const Rational h = make_rational(1, 2);
    for (int l = 0; l < n; ++l) {
        auto& a = slot(op, unit(n, l));
        const auto L = static_cast<std::size_t>(l);
        for (std::size_t p = 0; p < N; ++p) {
            a(L * N + p, p) += h;
            a(p * N + L, p) += h;
        }
        for (std::size_t i = 0; i < N; ++i) a(i * N + i, L) += lambda;
    }
    return op;
}

inline OperatorSpec divergence(int n) {
    auto op = make(n, 1, static_cast<std::size_t>(n), 1, "divergence");
    for (int i = 0; i < n; ++i) slot(op, unit(n, i))(0, static_cast<std::size_t>(i)) = 1;
    return op;
}

// Acting on full n x n matrix fields e, output indexed (i,j,k,l):
// e_ij xi_k xi_l + e_kl xi_i xi_j - e_il xi_j xi_k - e_jk xi_i xi_l.
inline OperatorSpec saint_venant(int n) {
    const auto N = static_cast<std::size_t>(n);
    HomoPolyMatrix s(n, N * N * N * N, N * N);
    auto x = [&](std::size_t i) { return HomoPoly::variable(n, static_cast<int>(i)); };
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j)
            for (std::size_t k = 0; k < N; ++k)
                for (std::size_t l = 0; l < N; ++l) {
                    const std::size_t row = ((i * N + j) * N + k) * N + l;
                    std::map<std::size_t, HomoPoly> acc;
                    auto add = [&](std::size_t a, std::size_t b, const HomoPoly& p) {
                        acc.try_emplace(a * N + b, HomoPoly(n)).first->second += p;
                    };
                    add(i, j, x(k) * x(l));
                    add(k, l, x(i) * x(j));
                    add(i, l, -(x(j) * x(k)));
                    add(j, k, -(x(i) * x(l)));
                    for (auto& [col, p] : acc) s.set(row, col, p);
                }
    return from_symbol(s, 2, "saint_venant");
}

// tau[xi, ..., xi] on symmetric k-tensors, coordinates tau_alpha indexed by multi_indices(n, k).
inline OperatorSpec div_pow(int n, int k) {
    const auto idx = multi_indices(n, k);
    auto op = make(n, k, idx.size(), 1, "div_pow");
    const Integer kf = factorial(k);
    for (std::size_t c = 0; c < idx.size(); ++c) slot(op, idx[c])(0, c) = Rational(kf) / Rational(multi_factorial(idx[c]));
    return op;
}

// u -> (Delta u, grad div u).
inline OperatorSpec mazya(int n) {
    const auto N = static_cast<std::size_t>(n);
    auto op = make(n, 2, N, 2 * N, "mazya");
    for (int i = 0; i < n; ++i) {
        auto& a = slot(op, unit(n, i, 2));
        for (std::size_t p = 0; p < N; ++p) a(p, p) += 1;
    }
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j) {
            MultiIndex alpha(N, 0);
            ++alpha[i];
            ++alpha[j];
            slot(op, alpha)(N + i, j) += 1;
        }
    return op;
}

// Left multiplication by the pure quaternion xi_1 i + xi_2 j + xi_3 k, times |xi|^2.
inline OperatorSpec dirac_laplace3() {
    const RatMatrix qi{{0, -1, 0, 0}, {1, 0, 0, 0}, {0, 0, 0, -1}, {0, 0, 1, 0}};
    const RatMatrix qj{{0, 0, -1, 0}, {0, 0, 0, 1}, {1, 0, 0, 0}, {0, -1, 0, 0}};
    const RatMatrix qk{{0, 0, 0, -1}, {0, 0, -1, 0}, {0, 1, 0, 0}, {1, 0, 0, 0}};
    const HomoPolyMatrix dirac = HomoPoly::variable(3, 0) * HomoPolyMatrix::constant(3, qi) +
                                 HomoPoly::variable(3, 1) * HomoPolyMatrix::constant(3, qj) +
                                 HomoPoly::variable(3, 2) * HomoPolyMatrix::constant(3, qk);
    return from_symbol(HomoPoly::norm_squared(3) * dirac, 3, "dirac_laplace3");
}

inline OperatorSpec zero(int n, std::size_t dim) {
    auto op = make(n, 1, dim, dim, "zero");
    for (int i = 0; i < n; ++i) slot(op, unit(n, i));
    return op;
}

}  // namespace catalog_detail

inline const std::vector<std::string>& catalog_names() {
    static const std::vector<std::string> names{"gradient", "grad_k",      "laplacian",     "cauchy_riemann", "hodge",
                                                "sym_grad", "dev_sym_grad", "divergence",   "ext_derivative", "saint_venant",
                                                "div_pow",  "mazya",        "dirac_laplace3", "zero"};
    return names;
}

/// Operators whose natural role is an annihilator (input to cocancellation).
inline bool is_annihilator_name(const std::string& name) {
    return name == "divergence" || name == "ext_derivative" || name == "saint_venant" || name == "div_pow" || name == "zero";
}

/*
 * Builds a named operator. Parameters: n (dimension), k (order, grad_k and
 * div_pow), m (form degree for hodge/ext_derivative, fibre dimension for
 * zero), lambda (dev_sym_grad, default -1/n).
 */
inline OperatorSpec catalog(const std::string& name, const CatalogParams& p = {}) {
    using namespace catalog_detail;
    auto fixed_n = [&](int value) {
        if (p.n && *p.n != value) throw std::invalid_argument(name + " is defined only for n = " + std::to_string(value));
        return value;
    };
    const int max_n = detail::kMaxVars;
    OperatorSpec op;
    if (name == "gradient") {
        const int n = need(p.n, "n", name);
        require_range(n, 1, max_n, "n", name);
        if (p.k && *p.k != 1) throw std::invalid_argument("gradient has order 1; use grad_k");
        op = grad_k(n, 1);
    } else if (name == "grad_k") {
        const int n = need(p.n, "n", name), k = need(p.k, "k", name);
        require_range(n, 1, max_n, "n", name);
        require_range(k, 1, 6, "k", name);
        op = grad_k(n, k);
        op.name = "grad_k";
        op.params.emplace_back("k", k);
    } else if (name == "laplacian") {
        const int n = need(p.n, "n", name);
        require_range(n, 1, max_n, "n", name);
        op = laplacian(n);
    } else if (name == "cauchy_riemann") {
        fixed_n(2);
        op = cauchy_riemann();
    } else if (name == "hodge") {
        const int n = need(p.n, "n", name), m = need(p.m, "m", name);
        require_range(n, 1, max_n, "n", name);
        require_range(m, 0, n, "m", name);
        op = hodge(n, m);
        op.params.emplace_back("m", m);
    } else if (name == "ext_derivative") {
        const int n = need(p.n, "n", name), m = need(p.m, "m", name);
        require_range(n, 1, max_n, "n", name);
        require_range(m, 0, n - 1, "m", name);
        op = ext_derivative(n, m);
        op.params.emplace_back("m", m);
    } else if (name == "sym_grad") {
        const int n = need(p.n, "n", name);
        require_range(n, 1, max_n, "n", name);
        op = dev_sym_grad(n, 0, "sym_grad");
    } else if (name == "dev_sym_grad") {
        const int n = need(p.n, "n", name);
        require_range(n, 1, max_n, "n", name);
        const Rational lambda = p.lambda.value_or(make_rational(-1, n));
        op = dev_sym_grad(n, lambda, "dev_sym_grad");
        op.params.emplace_back("lambda", lambda);
    } else if (name == "divergence") {
        const int n = need(p.n, "n", name);
        require_range(n, 1, max_n, "n", name);
        op = divergence(n);
    } else if (name == "saint_venant") {
        const int n = need(p.n, "n", name);
        require_range(n, 1, 4, "n", name);
        op = saint_venant(n);
    } else if (name == "div_pow") {
        const int n = need(p.n, "n", name), k = need(p.k, "k", name);
        require_range(n, 1, max_n, "n", name);
        require_range(k, 1, 6, "k", name);
        op = div_pow(n, k);
        op.params.emplace_back("k", k);
    } else if (name == "mazya") {
        const int n = need(p.n, "n", name);
        require_range(n, 1, max_n, "n", name);
        op = mazya(n);
    } else if (name == "dirac_laplace3") {
        fixed_n(3);
        op = dirac_laplace3();
    } else if (name == "zero") {
        const int n = need(p.n, "n", name);
        require_range(n, 1, max_n, "n", name);
        const int dim = p.m.value_or(1);
        require_range(dim, 1, 64, "m", name);
        op = zero(n, static_cast<std::size_t>(dim));
        op.params.emplace_back("m", dim);
    } else {
        throw std::invalid_argument("unknown catalog operator '" + name + "'");
    }
    op.params.insert(op.params.begin(), {"n", op.n});
    op.validate(true);
    return op;
}

}  // namespace cancelkit
