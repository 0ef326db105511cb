#pragma once

// Exact rational linear algebra: matrices over Q, fraction-free elimination,
// kernels, images, canonical subspaces and exact linear solves.

#include <gmpxx.h>

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cancelkit {

using Integer = mpz_class;
using Rational = mpq_class;

/// Raised when shapes or arguments are inconsistent.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

inline Rational make_rational(long num, long den = 1) {
    if (den == 0) throw std::domain_error("zero denominator");
    Rational q(num, den);
    q.canonicalize();
    return q;
}

/// Parses "p", "-p" or "p/q" into a canonical rational.
inline Rational parse_rational(std::string_view text) {
    std::string s(text);
    s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }), s.end());
    if (s.empty()) throw std::invalid_argument("empty rational literal");
    const auto slash = s.find('/');
    auto valid_int = [](const std::string& t) {
        if (t.empty()) return false;
        std::size_t i = (t[0] == '-' || t[0] == '+') ? 1 : 0;
        if (i == t.size()) return false;
        return std::all_of(t.begin() + static_cast<long>(i), t.end(), [](unsigned char c) { return std::isdigit(c); });
    };
    std::string num = slash == std::string::npos ? s : s.substr(0, slash);
    std::string den = slash == std::string::npos ? "1" : s.substr(slash + 1);
    if (!valid_int(num) || !valid_int(den)) throw std::invalid_argument("malformed rational literal '" + std::string(text) + "'");
    if (num[0] == '+') num.erase(0, 1);
    if (den[0] == '+') den.erase(0, 1);
    Integer n(num), d(den);
    if (d == 0) throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
    Rational q(n, d);
    q.canonicalize();
    return q;
}

/// "p/q", or "p" when the denominator is one.
inline std::string to_string(const Rational& q) {
    if (q.get_den() == 1) return q.get_num().get_str();
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

/// Dense row-major matrix of rationals.
class RatMatrix {
public:
    RatMatrix() = default;
    RatMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
    RatMatrix(std::initializer_list<std::initializer_list<Rational>> init) {
        rows_ = init.size();
        cols_ = rows_ ? init.begin()->size() : 0;
        data_.reserve(rows_ * cols_);
        for (const auto& row : init) {
            if (row.size() != cols_) throw DimensionError("ragged matrix literal");
            data_.insert(data_.end(), row.begin(), row.end());
        }
    }

    static RatMatrix identity(std::size_t n) {
        RatMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
        return m;
    }
    static RatMatrix column_vector(const std::vector<Rational>& v) {
        RatMatrix m(v.size(), 1);
        for (std::size_t i = 0; i < v.size(); ++i) m(i, 0) = v[i];
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return rows_ == 0 || cols_ == 0; }

    Rational& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const Rational& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
    const std::vector<Rational>& data() const { return data_; }

    bool is_zero() const {
        return std::all_of(data_.begin(), data_.end(), [](const Rational& q) { return q == 0; });
    }

    RatMatrix transpose() const {
        RatMatrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    std::vector<Rational> column(std::size_t j) const {
        std::vector<Rational> v(rows_);
        for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
        return v;
    }

    RatMatrix& operator+=(const RatMatrix& o) {
        require_same_shape(o, "+");
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
        return *this;
    }
    RatMatrix& operator-=(const RatMatrix& o) {
        require_same_shape(o, "-");
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
        return *this;
    }
    RatMatrix& operator*=(const Rational& s) {
        for (auto& q : data_) q *= s;
        return *this;
    }

    friend RatMatrix operator+(RatMatrix a, const RatMatrix& b) { return a += b; }
    friend RatMatrix operator-(RatMatrix a, const RatMatrix& b) { return a -= b; }
    friend RatMatrix operator*(RatMatrix a, const Rational& s) { return a *= s; }
    friend RatMatrix operator*(const Rational& s, RatMatrix a) { return a *= s; }
    friend RatMatrix operator*(const RatMatrix& a, const RatMatrix& b) {
        if (a.cols_ != b.rows_) throw DimensionError("matrix product shape mismatch");
        RatMatrix c(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t l = 0; l < a.cols_; ++l) {
                const Rational& ail = a(i, l);
                if (ail == 0) continue;
                for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += ail * b(l, j);
            }
        return c;
    }
    friend bool operator==(const RatMatrix& a, const RatMatrix& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
    }

    std::vector<Rational> apply(const std::vector<Rational>& v) const {
        if (v.size() != cols_) throw DimensionError("matrix-vector shape mismatch");
        std::vector<Rational> out(rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j)
                if (v[j] != 0) out[i] += (*this)(i, j) * v[j];
        return out;
    }

    std::string str() const {
        std::ostringstream os;
        os << '[';
        for (std::size_t i = 0; i < rows_; ++i) {
            os << (i ? ", [" : "[");
            for (std::size_t j = 0; j < cols_; ++j) os << (j ? ", " : "") << to_string((*this)(i, j));
            os << ']';
        }
        os << ']';
        return os.str();
    }

private:
    void require_same_shape(const RatMatrix& o, const char* op) const {
        if (rows_ != o.rows_ || cols_ != o.cols_)
            throw DimensionError(std::string("shape mismatch in matrix ") + op);
    }

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Rational> data_;
};

inline RatMatrix vstack(const RatMatrix& a, const RatMatrix& b) {
    if (a.rows() == 0) return b;
    if (b.rows() == 0) return a;
    if (a.cols() != b.cols()) throw DimensionError("vstack column mismatch");
    RatMatrix m(a.rows() + b.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) m(i, j) = a(i, j);
    for (std::size_t i = 0; i < b.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) m(a.rows() + i, j) = b(i, j);
    return m;
}

inline RatMatrix hstack(const RatMatrix& a, const RatMatrix& b) {
    if (a.cols() == 0 && a.rows() == 0) return b;
    if (b.cols() == 0 && b.rows() == 0) return a;
    if (a.rows() != b.rows()) throw DimensionError("hstack row mismatch");
    RatMatrix m(a.rows(), a.cols() + b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) m(i, j) = a(i, j);
        for (std::size_t j = 0; j < b.cols(); ++j) m(i, a.cols() + j) = b(i, j);
    }
    return m;
}

/// Reduced row echelon form together with its pivot columns.
struct Echelon {
    RatMatrix rref;
    std::vector<std::size_t> pivots;
};

/*
 * Row reduction in two phases.
 *
 * Phase one clears denominators row by row and runs Bareiss fraction-free
 * elimination over the integers, so every intermediate entry is a minor of
 * the scaled input and stays small. Phase two normalizes the echelon form to
 * the unique reduced form; divisions happen only there.
 */
inline Echelon row_reduce(const RatMatrix& m) {
    const std::size_t rows = m.rows(), cols = m.cols();
    std::vector<std::vector<Integer>> a(rows, std::vector<Integer>(cols));
    for (std::size_t i = 0; i < rows; ++i) {
        Integer lcm = 1;
        for (std::size_t j = 0; j < cols; ++j) mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), m(i, j).get_den_mpz_t());
        for (std::size_t j = 0; j < cols; ++j) a[i][j] = m(i, j).get_num() * (lcm / m(i, j).get_den());
    }

    std::vector<std::size_t> pivots;
    Integer prev = 1;
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t p = r;
        while (p < rows && a[p][c] == 0) ++p;
        if (p == rows) continue;
        std::swap(a[p], a[r]);
        for (std::size_t i = r + 1; i < rows; ++i) {
            for (std::size_t j = c + 1; j < cols; ++j) {
                a[i][j] = a[r][c] * a[i][j] - a[i][c] * a[r][j];
                mpz_divexact(a[i][j].get_mpz_t(), a[i][j].get_mpz_t(), prev.get_mpz_t());
            }
            a[i][c] = 0;
        }
        prev = a[r][c];
        pivots.push_back(c);
        ++r;
    }

    RatMatrix out(pivots.size(), cols);
    for (std::size_t i = 0; i < pivots.size(); ++i)
        for (std::size_t j = 0; j < cols; ++j) out(i, j) = Rational(a[i][j]);
    for (std::size_t i = pivots.size(); i-- > 0;) {
        const std::size_t pc = pivots[i];
        const Rational inv = 1 / out(i, pc);
        for (std::size_t j = pc; j < cols; ++j) out(i, j) *= inv;
        for (std::size_t u = 0; u < i; ++u) {
            const Rational f = out(u, pc);
            if (f == 0) continue;
            for (std::size_t j = pc; j < cols; ++j) out(u, j) -= f * out(i, j);
        }
    }
    return {std::move(out), std::move(pivots)};
}

inline std::size_t rank_exact(const RatMatrix& m) { return row_reduce(m).pivots.size(); }

/*
 * Linear subspace of Q^d. The basis is stored as columns in reduced column
 * echelon form (the transpose is an RREF), which is unique per subspace, so
 * operator== is subspace equality.
 */
class Subspace {
public:
    explicit Subspace(std::size_t ambient_dim = 0) : ambient_(ambient_dim), basis_(ambient_dim, 0) {}

    /// Span of the columns of `generators` (need not be independent).
    static Subspace span(const RatMatrix& generators) {
        Subspace s(generators.rows());
        if (generators.cols() == 0) return s;
        const Echelon e = row_reduce(generators.transpose());
        s.basis_ = e.rref.transpose();
        return s;
    }
    static Subspace span(std::size_t ambient, const std::vector<std::vector<Rational>>& vectors) {
        RatMatrix g(ambient, vectors.size());
        for (std::size_t j = 0; j < vectors.size(); ++j) {
            if (vectors[j].size() != ambient) throw DimensionError("vector length differs from ambient dimension");
            for (std::size_t i = 0; i < ambient; ++i) g(i, j) = vectors[j][i];
        }
        return span(g);
    }
    static Subspace full(std::size_t ambient) { return span(RatMatrix::identity(ambient)); }

    std::size_t ambient_dim() const { return ambient_; }
    std::size_t dim() const { return basis_.cols(); }
    bool is_zero() const { return dim() == 0; }
    bool is_full() const { return dim() == ambient_; }
    const RatMatrix& basis() const { return basis_; }
    std::vector<Rational> basis_vector(std::size_t j) const { return basis_.column(j); }

    bool contains(const std::vector<Rational>& v) const {
        if (v.size() != ambient_) throw DimensionError("vector length differs from ambient dimension");
        return rank_exact(hstack(basis_, RatMatrix::column_vector(v))) == dim();
    }
    bool is_subspace_of(const Subspace& other) const {
        if (other.ambient_ != ambient_) throw DimensionError("ambient dimension mismatch");
        return rank_exact(hstack(other.basis_, basis_)) == other.dim();
    }

    friend bool operator==(const Subspace& a, const Subspace& b) {
        return a.ambient_ == b.ambient_ && a.basis_ == b.basis_;
    }

private:
    std::size_t ambient_;
    RatMatrix basis_;
};

/// {x : m x = 0}, with dim = cols - rank.
inline Subspace kernel_basis(const RatMatrix& m) {
    const std::size_t cols = m.cols();
    const Echelon e = row_reduce(m);
    std::vector<bool> is_pivot(cols, false);
    for (auto p : e.pivots) is_pivot[p] = true;
    RatMatrix gens(cols, cols - e.pivots.size());
    std::size_t g = 0;
    for (std::size_t f = 0; f < cols; ++f) {
        if (is_pivot[f]) continue;
        gens(f, g) = 1;
        for (std::size_t i = 0; i < e.pivots.size(); ++i) gens(e.pivots[i], g) = -e.rref(i, f);
        ++g;
    }
    return Subspace::span(gens);
}

/// Column space of m.
inline Subspace image_basis(const RatMatrix& m) { return Subspace::span(m); }

/// Rows spanning the orthogonal complement: s = ker(complement_equations(s)).
inline RatMatrix complement_equations(const Subspace& s) {
    if (s.dim() == 0) return RatMatrix::identity(s.ambient_dim());
    return kernel_basis(s.basis().transpose()).basis().transpose();
}

/// a ∩ b as the kernel of the stacked complement equations.
inline Subspace intersect(const Subspace& a, const Subspace& b) {
    if (a.ambient_dim() != b.ambient_dim()) throw DimensionError("intersect: ambient dimension mismatch");
    const RatMatrix eqs = vstack(complement_equations(a), complement_equations(b));
    if (eqs.rows() == 0) return Subspace::full(a.ambient_dim());
    return kernel_basis(eqs);
}

/*
 * Solves m X = rhs exactly. Returns std::nullopt when the system is
 * inconsistent; otherwise the particular solution with free variables zero.
 */
inline std::optional<RatMatrix> solve_exact(const RatMatrix& m, const RatMatrix& rhs) {
    if (m.rows() != rhs.rows()) throw DimensionError("solve_exact: row count mismatch");
    const std::size_t n = m.cols();
    const Echelon e = row_reduce(hstack(m, rhs));
    for (auto p : e.pivots)
        if (p >= n) return std::nullopt;
    RatMatrix x(n, rhs.cols());
    for (std::size_t i = 0; i < e.pivots.size(); ++i)
        for (std::size_t j = 0; j < rhs.cols(); ++j) x(e.pivots[i], j) = e.rref(i, n + j);
    return x;
}

}  // namespace cancelkit
