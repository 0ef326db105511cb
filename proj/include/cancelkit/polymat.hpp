#pragma once

// Homogeneous multivariate polynomials with rational coefficients and
// matrices of them.

#include "cancelkit/exactalg.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

namespace cancelkit {

/// Exponent vector (alpha_1, ..., alpha_n).
using MultiIndex = std::vector<int>;

inline int degree_of(const MultiIndex& alpha) {
    int d = 0;
    for (int a : alpha) d += a;
    return d;
}

/// All multi-indices of length n and degree d, graded-lexicographic
/// (x_1^d first).
inline std::vector<MultiIndex> multi_indices(int n, int d) {
    std::vector<MultiIndex> out;
    MultiIndex cur(static_cast<std::size_t>(n), 0);
    std::function<void(int, int)> rec = [&](int pos, int remaining) {
        if (pos == n - 1) {
            cur[static_cast<std::size_t>(pos)] = remaining;
            out.push_back(cur);
            return;
        }
        for (int a = remaining; a >= 0; --a) {
            cur[static_cast<std::size_t>(pos)] = a;
            rec(pos + 1, remaining - a);
        }
    };
    if (n == 0) {
        if (d == 0) out.emplace_back();
        return out;
    }
    rec(0, d);
    return out;
}

inline Integer factorial(int k) {
    Integer f = 1;
    for (int i = 2; i <= k; ++i) f *= i;
    return f;
}

/// alpha! = alpha_1! ... alpha_n!
inline Integer multi_factorial(const MultiIndex& alpha) {
    Integer f = 1;
    for (int a : alpha) f *= factorial(a);
    return f;
}

namespace detail {

// Exponents packed one byte each, x_1 in the most significant byte, so that
// for equal total degree the integer order is the lexicographic order.
constexpr int kMaxVars = 8;
constexpr int kMaxExponent = 255;

inline std::uint64_t pack(const MultiIndex& alpha) {
    if (alpha.size() > kMaxVars) throw DimensionError("at most 8 variables are supported");
    std::uint64_t key = 0;
    for (std::size_t i = 0; i < alpha.size(); ++i) {
        if (alpha[i] < 0 || alpha[i] > kMaxExponent) throw DimensionError("exponent out of range");
        key |= static_cast<std::uint64_t>(alpha[i]) << (8 * (kMaxVars - 1 - i));
    }
    return key;
}

inline MultiIndex unpack(std::uint64_t key, int n) {
    MultiIndex alpha(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) alpha[static_cast<std::size_t>(i)] = static_cast<int>((key >> (8 * (kMaxVars - 1 - i))) & 0xff);
    return alpha;
}

inline int exponent(std::uint64_t key, int i) { return static_cast<int>((key >> (8 * (kMaxVars - 1 - i))) & 0xff); }

inline bool divides(std::uint64_t small, std::uint64_t big, int n) {
    for (int i = 0; i < n; ++i)
        if (exponent(small, i) > exponent(big, i)) return false;
    return true;
}

}  // namespace detail

/*
 * Homogeneous polynomial in n variables. Terms are kept sorted in descending
 * graded-lex order with no zero coefficients. The zero polynomial has no
 * degree and is compatible with every degree.
 */
class HomoPoly {
public:
    using Term = std::pair<std::uint64_t, Rational>;

    explicit HomoPoly(int n = 0) : n_(n) {
        if (n < 0 || n > detail::kMaxVars) throw DimensionError("polynomial variable count out of range");
    }

    static HomoPoly monomial(int n, const MultiIndex& alpha, const Rational& c) {
        if (static_cast<int>(alpha.size()) != n) throw DimensionError("multi-index length differs from variable count");
        HomoPoly p(n);
        if (c != 0) {
            p.terms_.emplace_back(detail::pack(alpha), c);
            p.degree_ = degree_of(alpha);
        }
        return p;
    }
    static HomoPoly constant(int n, const Rational& c) { return monomial(n, MultiIndex(static_cast<std::size_t>(n), 0), c); }
    static HomoPoly variable(int n, int i) {
        MultiIndex a(static_cast<std::size_t>(n), 0);
        a[static_cast<std::size_t>(i)] = 1;
        return monomial(n, a, 1);
    }
    /// |xi|^2 = xi_1^2 + ... + xi_n^2
    static HomoPoly norm_squared(int n) {
        HomoPoly p(n);
        for (int i = 0; i < n; ++i) {
            MultiIndex a(static_cast<std::size_t>(n), 0);
            a[static_cast<std::size_t>(i)] = 2;
            p += monomial(n, a, 1);
        }
        return p;
    }

    int n() const { return n_; }
    std::optional<int> degree() const { return degree_; }
    bool is_zero() const { return terms_.empty(); }
    std::size_t term_count() const { return terms_.size(); }
    const std::vector<Term>& raw_terms() const { return terms_; }

    std::vector<std::pair<MultiIndex, Rational>> terms() const {
        std::vector<std::pair<MultiIndex, Rational>> out;
        out.reserve(terms_.size());
        for (const auto& [k, c] : terms_) out.emplace_back(detail::unpack(k, n_), c);
        return out;
    }

    Rational coefficient(const MultiIndex& alpha) const {
        const auto key = detail::pack(alpha);
        auto it = std::lower_bound(terms_.begin(), terms_.end(), key,
                                   [](const Term& t, std::uint64_t k) { return t.first > k; });
        if (it != terms_.end() && it->first == key) return it->second;
        return 0;
    }

    /// Sum of absolute values of the coefficients.
    Rational coefficient_l1() const {
        Rational s = 0;
        for (const auto& t : terms_) s += abs(t.second);
        return s;
    }

    Rational eval(std::span<const Rational> xi) const {
        check_point(xi.size());
        Rational acc = 0;
        std::vector<std::vector<Rational>> powers = power_table(xi);
        for (const auto& [k, c] : terms_) {
            Rational t = c;
            for (int i = 0; i < n_; ++i) {
                const int e = detail::exponent(k, i);
                if (e) t *= powers[static_cast<std::size_t>(i)][static_cast<std::size_t>(e)];
            }
            acc += t;
        }
        return acc;
    }

    double eval(std::span<const double> xi) const {
        check_point(xi.size());
        double acc = 0;
        for (const auto& [k, c] : terms_) {
            double t = c.get_d();
            for (int i = 0; i < n_; ++i) {
                const int e = detail::exponent(k, i);
                for (int r = 0; r < e; ++r) t *= xi[static_cast<std::size_t>(i)];
            }
            acc += t;
        }
        return acc;
    }

    HomoPoly derivative(int i) const {
        HomoPoly out(n_);
        const std::uint64_t unit = std::uint64_t{1} << (8 * (detail::kMaxVars - 1 - i));
        for (const auto& [k, c] : terms_) {
            const int e = detail::exponent(k, i);
            if (e == 0) continue;
            out.terms_.emplace_back(k - unit, c * e);
        }
        if (!out.terms_.empty()) out.degree_ = *degree_ - 1;
        return out;
    }

    HomoPoly& operator+=(const HomoPoly& o) { return accumulate(o, 1); }
    HomoPoly& operator-=(const HomoPoly& o) { return accumulate(o, -1); }
    HomoPoly& operator*=(const Rational& s) {
        if (s == 0) {
            terms_.clear();
            degree_.reset();
        } else {
            for (auto& t : terms_) t.second *= s;
        }
        return *this;
    }
    HomoPoly operator-() const {
        HomoPoly r = *this;
        for (auto& t : r.terms_) t.second = -t.second;
        return r;
    }

    friend HomoPoly operator+(HomoPoly a, const HomoPoly& b) { return a += b; }
    friend HomoPoly operator-(HomoPoly a, const HomoPoly& b) { return a -= b; }
    friend HomoPoly operator*(HomoPoly a, const Rational& s) { return a *= s; }
    friend HomoPoly operator*(const Rational& s, HomoPoly a) { return a *= s; }

    friend HomoPoly operator*(const HomoPoly& a, const HomoPoly& b) {
        if (a.n_ != b.n_) throw DimensionError("polynomial variable count mismatch");
        HomoPoly out(a.n_);
        if (a.is_zero() || b.is_zero()) return out;
        std::unordered_map<std::uint64_t, Rational> acc;
        acc.reserve(a.terms_.size() * b.terms_.size());
        Rational prod;
        for (const auto& [ka, ca] : a.terms_)
            for (const auto& [kb, cb] : b.terms_) {
                prod = ca * cb;
                acc[ka + kb] += prod;
            }
        out.terms_.reserve(acc.size());
        for (auto& [k, c] : acc)
            if (c != 0) out.terms_.emplace_back(k, std::move(c));
        std::sort(out.terms_.begin(), out.terms_.end(), [](const Term& x, const Term& y) { return x.first > y.first; });
        if (!out.terms_.empty()) out.degree_ = *a.degree_ + *b.degree_;
        return out;
    }

    friend bool operator==(const HomoPoly& a, const HomoPoly& b) { return a.n_ == b.n_ && a.terms_ == b.terms_; }

    /*
     * Exact quotient a / b. Throws if b does not divide a. Repeatedly cancels
     * the leading term of the remainder; a nonzero remainder whose leading
     * monomial is not a multiple of lt(b) proves non-divisibility.
     */
    friend HomoPoly divide_exact(const HomoPoly& a, const HomoPoly& b) {
        if (b.is_zero()) throw std::domain_error("polynomial division by zero");
        if (a.n_ != b.n_) throw DimensionError("polynomial variable count mismatch");
        HomoPoly q(a.n_);
        if (a.is_zero()) return q;
        std::map<std::uint64_t, Rational, std::greater<>> rem(a.terms_.begin(), a.terms_.end());
        const auto& [lk, lc] = b.terms_.front();
        const Rational inv_lc = 1 / lc;
        while (!rem.empty()) {
            auto it = rem.begin();
            if (!detail::divides(lk, it->first, a.n_)) throw std::domain_error("polynomial division is not exact");
            const std::uint64_t qk = it->first - lk;
            const Rational qc = it->second * inv_lc;
            q.terms_.emplace_back(qk, qc);
            for (const auto& [bk, bc] : b.terms_) {
                auto [pos, inserted] = rem.try_emplace(qk + bk, 0);
                pos->second -= qc * bc;
                if (pos->second == 0) rem.erase(pos);
            }
        }
        q.degree_ = *a.degree_ - *b.degree_;
        return q;
    }

private:
    void check_point(std::size_t len) const {
        if (static_cast<int>(len) != n_) throw DimensionError("evaluation point length differs from variable count");
    }

    std::vector<std::vector<Rational>> power_table(std::span<const Rational> xi) const {
        const int d = degree_.value_or(0);
        std::vector<std::vector<Rational>> p(static_cast<std::size_t>(n_), std::vector<Rational>(static_cast<std::size_t>(d + 1)));
        for (int i = 0; i < n_; ++i) {
            p[static_cast<std::size_t>(i)][0] = 1;
            for (int e = 1; e <= d; ++e)
                p[static_cast<std::size_t>(i)][static_cast<std::size_t>(e)] = p[static_cast<std::size_t>(i)][static_cast<std::size_t>(e - 1)] * xi[static_cast<std::size_t>(i)];
        }
        return p;
    }

    HomoPoly& accumulate(const HomoPoly& o, int sign) {
        if (o.n_ != n_) throw DimensionError("polynomial variable count mismatch");
        if (o.is_zero()) return *this;
        if (!is_zero() && *degree_ != *o.degree_) throw DimensionError("adding homogeneous polynomials of different degree");
        std::vector<Term> merged;
        merged.reserve(terms_.size() + o.terms_.size());
        std::size_t i = 0, j = 0;
        while (i < terms_.size() || j < o.terms_.size()) {
            if (j == o.terms_.size() || (i < terms_.size() && terms_[i].first > o.terms_[j].first)) {
                merged.push_back(std::move(terms_[i++]));
            } else if (i == terms_.size() || o.terms_[j].first > terms_[i].first) {
                merged.emplace_back(o.terms_[j].first, sign > 0 ? o.terms_[j].second : Rational(-o.terms_[j].second));
                ++j;
            } else {
                Rational c = sign > 0 ? Rational(terms_[i].second + o.terms_[j].second) : Rational(terms_[i].second - o.terms_[j].second);
                if (c != 0) merged.emplace_back(terms_[i].first, std::move(c));
                ++i;
                ++j;
            }
        }
        terms_ = std::move(merged);
        degree_ = terms_.empty() ? std::nullopt : o.degree_;
        return *this;
    }

    int n_;
    std::optional<int> degree_;
    std::vector<Term> terms_;
};

/// Matrix of homogeneous polynomials in a common set of n variables.
class HomoPolyMatrix {
public:
    HomoPolyMatrix() = default;
    HomoPolyMatrix(int n, std::size_t rows, std::size_t cols)
        : n_(n), rows_(rows), cols_(cols), entries_(rows * cols, HomoPoly(n)) {}

    static HomoPolyMatrix identity(int n, std::size_t size) {
        HomoPolyMatrix m(n, size, size);
        for (std::size_t i = 0; i < size; ++i) m.set(i, i, HomoPoly::constant(n, 1));
        return m;
    }
    /// Degree-0 matrix with the given constant entries.
    static HomoPolyMatrix constant(int n, const RatMatrix& c) {
        HomoPolyMatrix m(n, c.rows(), c.cols());
        for (std::size_t i = 0; i < c.rows(); ++i)
            for (std::size_t j = 0; j < c.cols(); ++j) m.set(i, j, HomoPoly::constant(n, c(i, j)));
        return m;
    }

    int n() const { return n_; }
    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    const HomoPoly& operator()(std::size_t r, std::size_t c) const { return entries_[r * cols_ + c]; }

    void set(std::size_t r, std::size_t c, HomoPoly p) {
        if (p.n() != n_) throw DimensionError("entry variable count mismatch");
        if (!p.is_zero()) {
            const auto d = degree();
            auto& slot = entries_[r * cols_ + c];
            const bool replacing_only_nonzero = !slot.is_zero() && nonzero_count() == 1;
            if (d && *d != *p.degree() && !replacing_only_nonzero)
                throw DimensionError("polynomial matrix entries must share one degree");
        }
        entries_[r * cols_ + c] = std::move(p);
    }

    std::optional<int> degree() const {
        for (const auto& p : entries_)
            if (!p.is_zero()) return p.degree();
        return std::nullopt;
    }
    std::size_t nonzero_count() const {
        return static_cast<std::size_t>(std::count_if(entries_.begin(), entries_.end(), [](const HomoPoly& p) { return !p.is_zero(); }));
    }

    HomoPolyMatrix transpose() const {
        HomoPolyMatrix t(n_, cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t.entries_[j * rows_ + i] = (*this)(i, j);
        return t;
    }

    RatMatrix eval(std::span<const Rational> xi) const {
        RatMatrix m(rows_, cols_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) m(i, j) = (*this)(i, j).eval(xi);
        return m;
    }
    RatMatrix eval(const std::vector<Rational>& xi) const { return eval(std::span<const Rational>(xi)); }

    friend HomoPolyMatrix operator*(const HomoPolyMatrix& a, const HomoPolyMatrix& b) {
        if (a.cols_ != b.rows_ || a.n_ != b.n_) throw DimensionError("polynomial matrix product shape mismatch");
        HomoPolyMatrix c(a.n_, a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t j = 0; j < b.cols_; ++j) {
                HomoPoly s(a.n_);
                for (std::size_t l = 0; l < a.cols_; ++l) {
                    const auto& x = a(i, l);
                    const auto& y = b(l, j);
                    if (x.is_zero() || y.is_zero()) continue;
                    s += x * y;
                }
                c.entries_[i * c.cols_ + j] = std::move(s);
            }
        return c;
    }
    friend HomoPolyMatrix operator+(const HomoPolyMatrix& a, const HomoPolyMatrix& b) { return combine(a, b, 1); }
    friend HomoPolyMatrix operator-(const HomoPolyMatrix& a, const HomoPolyMatrix& b) { return combine(a, b, -1); }
    friend HomoPolyMatrix operator*(const HomoPoly& s, const HomoPolyMatrix& m) {
        HomoPolyMatrix out(m.n_, m.rows_, m.cols_);
        if (s.is_zero()) return out;
        for (std::size_t k = 0; k < m.entries_.size(); ++k)
            if (!m.entries_[k].is_zero()) out.entries_[k] = s * m.entries_[k];
        return out;
    }
    friend bool operator==(const HomoPolyMatrix& a, const HomoPolyMatrix& b) {
        return a.n_ == b.n_ && a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.entries_ == b.entries_;
    }

private:
    static HomoPolyMatrix combine(const HomoPolyMatrix& a, const HomoPolyMatrix& b, int sign) {
        if (a.rows_ != b.rows_ || a.cols_ != b.cols_ || a.n_ != b.n_) throw DimensionError("polynomial matrix sum shape mismatch");
        HomoPolyMatrix c = a;
        for (std::size_t k = 0; k < c.entries_.size(); ++k) {
            if (sign > 0)
                c.entries_[k] += b.entries_[k];
            else
                c.entries_[k] -= b.entries_[k];
        }
        return c;
    }

    int n_ = 0;
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<HomoPoly> entries_;
};

inline HomoPolyMatrix polymat_mul(const HomoPolyMatrix& a, const HomoPolyMatrix& b) { return a * b; }

/// True iff every stored coefficient is zero.
inline bool is_zero_polymat(const HomoPolyMatrix& m) {
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            if (!m(i, j).is_zero()) return false;
    return true;
}

/// Distinct monomials appearing anywhere in m, graded-lex descending.
inline std::vector<std::uint64_t> monomial_support(const HomoPolyMatrix& m) {
    std::vector<std::uint64_t> keys;
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            for (const auto& t : m(i, j).raw_terms()) keys.push_back(t.first);
    std::sort(keys.begin(), keys.end(), std::greater<>());
    keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
    return keys;
}

/*
 * Stacks, monomial by monomial in graded-lex order, the constant coefficient
 * matrices of m. The kernel of the result is {e : m(xi) e = 0 identically}.
 */
inline RatMatrix coefficient_stack(const HomoPolyMatrix& m) {
    const auto keys = monomial_support(m);
    RatMatrix s(keys.size() * m.rows(), m.cols());
    for (std::size_t t = 0; t < keys.size(); ++t)
        for (std::size_t i = 0; i < m.rows(); ++i)
            for (std::size_t j = 0; j < m.cols(); ++j) {
                const auto& terms = m(i, j).raw_terms();
                auto it = std::lower_bound(terms.begin(), terms.end(), keys[t],
                                           [](const HomoPoly::Term& x, std::uint64_t k) { return x.first > k; });
                if (it != terms.end() && it->first == keys[t]) s(t * m.rows() + i, j) = it->second;
            }
    return s;
}

struct DetAdj {
    HomoPoly det;
    HomoPolyMatrix adj;
};

namespace detail {

// Determinant of the submatrix on `rows` x `cols` by Laplace expansion along
// the first listed row, memoized over column subsets; zero entries are skipped.
inline HomoPoly minor_det(const HomoPolyMatrix& m, const std::vector<std::size_t>& rows, const std::vector<std::size_t>& cols) {
    const std::size_t k = rows.size();
    if (k == 0) return HomoPoly::constant(m.n(), 1);
    std::unordered_map<std::uint32_t, HomoPoly> memo;
    std::function<HomoPoly(std::size_t, std::uint32_t)> rec = [&](std::size_t r, std::uint32_t mask) -> HomoPoly {
        if (r == k) return HomoPoly::constant(m.n(), 1);
        if (auto it = memo.find(mask); it != memo.end()) return it->second;
        HomoPoly acc(m.n());
        int sign = 1;
        for (std::size_t c = 0; c < k; ++c) {
            if (mask & (1u << c)) continue;
            const auto& entry = m(rows[r], cols[c]);
            if (!entry.is_zero()) {
                HomoPoly sub = rec(r + 1, mask | (1u << c));
                if (!sub.is_zero()) {
                    HomoPoly t = entry * sub;
                    if (sign > 0) acc += t; else acc -= t;
                }
            }
            sign = -sign;
        }
        memo.emplace(mask, acc);
        return acc;
    };
    return rec(0, 0);
}

inline DetAdj det_adj_cofactor(const HomoPolyMatrix& m) {
    const std::size_t n = m.rows();
    std::vector<std::size_t> all(n);
    for (std::size_t i = 0; i < n; ++i) all[i] = i;
    DetAdj out{minor_det(m, all, all), HomoPolyMatrix(m.n(), n, n)};
    if (n == 1) {
        out.adj.set(0, 0, HomoPoly::constant(m.n(), 1));
        return out;
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            std::vector<std::size_t> rows, cols;
            for (std::size_t r = 0; r < n; ++r)
                if (r != j) rows.push_back(r);
            for (std::size_t c = 0; c < n; ++c)
                if (c != i) cols.push_back(c);
            HomoPoly c = minor_det(m, rows, cols);
            if ((i + j) % 2) c = -c;
            out.adj.set(i, j, std::move(c));
        }
    return out;
}

/*
 * Fraction-free Gauss-Jordan on [M | I] over the polynomial ring. Every
 * division is exact; at the end the left block is d*I and the right block is
 * d*M^{-1}, with d = det(M) up to the row-swap sign. Returns nullopt when M
 * is singular (no nonzero pivot available).
 */
inline std::optional<DetAdj> det_adj_bareiss(const HomoPolyMatrix& m) {
    const std::size_t n = m.rows();
    const int vars = m.n();
    std::vector<std::vector<HomoPoly>> a(n, std::vector<HomoPoly>(2 * n, HomoPoly(vars)));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) a[i][j] = m(i, j);
        a[i][n + i] = HomoPoly::constant(vars, 1);
    }
    HomoPoly prev = HomoPoly::constant(vars, 1);
    int sign = 1;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        while (p < n && a[p][k].is_zero()) ++p;
        if (p == n) return std::nullopt;
        if (p != k) {
            std::swap(a[p], a[k]);
            sign = -sign;
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (i == k) continue;
            for (std::size_t j = 0; j < 2 * n; ++j) {
                if (j == k) continue;
                HomoPoly t(vars);
                if (!a[i][j].is_zero()) t = a[k][k] * a[i][j];
                if (!a[i][k].is_zero() && !a[k][j].is_zero()) t -= a[i][k] * a[k][j];
                a[i][j] = divide_exact(t, prev);
            }
            a[i][k] = HomoPoly(vars);
        }
        prev = a[k][k];
    }
    // Every diagonal entry of the left block now equals the last pivot d.
    const HomoPoly d = a[n - 1][n - 1];
    DetAdj out{sign > 0 ? d : -d, HomoPolyMatrix(vars, n, n)};
    for (std::size_t i = 0; i < n; ++i) {
        if (!(a[i][i] == d)) throw std::logic_error("fraction-free elimination lost its diagonal invariant");
        for (std::size_t j = 0; j < n; ++j) out.adj.set(i, j, sign > 0 ? a[i][n + j] : -a[i][n + j]);
    }
    return out;
}

}  // namespace detail

/*
 * Determinant and adjugate with m * adj = adj * m = det * I. Cofactor
 * expansion up to 4x4, fraction-free elimination above that (falling back to
 * cofactors when det vanishes identically).
 */
inline DetAdj polymat_det_adj(const HomoPolyMatrix& m) {
    if (m.rows() != m.cols()) throw DimensionError("determinant of a non-square matrix");
    if (m.rows() == 0) return {HomoPoly::constant(m.n(), 1), HomoPolyMatrix(m.n(), 0, 0)};
    if (m.rows() <= 4) return detail::det_adj_cofactor(m);
    if (auto r = detail::det_adj_bareiss(m)) return *std::move(r);
    return detail::det_adj_cofactor(m);
}

}  // namespace cancelkit
