#pragma once

// Seeded generators shared by the property-style tests.

#include "cancelkit/polymat.hpp"

#include <random>

namespace cancelkit::testing {

class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

    Rational rational(int num_bound = 9, int den_bound = 9) {
        return make_rational(integer(-num_bound, num_bound), integer(1, den_bound));
    }

    std::vector<Rational> vector(std::size_t n) {
        std::vector<Rational> v(n);
        for (auto& x : v) x = rational();
        return v;
    }

    std::vector<Rational> nonzero_vector(std::size_t n) {
        for (;;) {
            auto v = vector(n);
            for (const auto& x : v)
                if (x != 0) return v;
        }
    }

    RatMatrix matrix(std::size_t rows, std::size_t cols, double zero_fraction = 0.0) {
        RatMatrix m(rows, cols);
        std::bernoulli_distribution zero(zero_fraction);
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t j = 0; j < cols; ++j) m(i, j) = zero(rng_) ? Rational(0) : rational();
        return m;
    }

    /// Random matrix of the given rank (product of random factors).
    RatMatrix matrix_of_rank(std::size_t rows, std::size_t cols, std::size_t rank) {
        return matrix(rows, rank) * matrix(rank, cols);
    }

    HomoPoly poly(int n, int degree, int max_terms = 4) {
        HomoPoly p(n);
        const auto monos = multi_indices(n, degree);
        const int terms = integer(1, max_terms);
        for (int t = 0; t < terms; ++t) {
            const auto& a = monos[static_cast<std::size_t>(integer(0, static_cast<int>(monos.size()) - 1))];
            p += HomoPoly::monomial(n, a, rational());
        }
        return p;
    }

    HomoPolyMatrix polymat(int n, std::size_t rows, std::size_t cols, int degree, int max_terms = 3) {
        HomoPolyMatrix m(n, rows, cols);
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t j = 0; j < cols; ++j) m.set(i, j, poly(n, degree, max_terms));
        return m;
    }

    std::mt19937_64& engine() { return rng_; }

private:
    std::mt19937_64 rng_;
};

inline RatMatrix mat(std::initializer_list<std::initializer_list<long>> rows) {
    RatMatrix m(rows.size(), rows.size() ? rows.begin()->size() : 0);
    std::size_t i = 0;
    for (const auto& r : rows) {
        std::size_t j = 0;
        for (long v : r) m(i, j++) = v;
        ++i;
    }
    return m;
}

}  // namespace cancelkit::testing
