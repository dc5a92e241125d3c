#pragma once

#include "fedosov/coords.hpp"

#include <boost/container/small_vector.hpp>

#include <cstdint>
#include <numeric>

namespace fedosov {

/// Exponent map in the fixed canonical generator order of an AlgebraContext.
/// A generator whose parity+form degree is odd is self-annihilating and never
/// carries an exponent above 1.
class Monomial {
public:
    using Exps = boost::container::small_vector<std::uint8_t, 24>;

    Monomial() = default;
    explicit Monomial(int width) : e_(width, std::uint8_t{0}) {}

    int width() const { return static_cast<int>(e_.size()); }
    int exponent(int pos) const { return e_[pos]; }
    void set_exponent(int pos, int v) { e_[pos] = static_cast<std::uint8_t>(v); }
    bool is_unit() const {
        for (auto v : e_)
            if (v) return false;
        return true;
    }

    int hbar_power() const { return e_.empty() ? 0 : e_[0]; }

    int parity(const AlgebraContext& ctx) const {
        int s = 0;
        for (int p = 0; p < width(); ++p) s += e_[p] * ctx.parity_at(p);
        return s & 1;
    }

    int form_degree(const AlgebraContext& ctx) const {
        int s = 0;
        for (int p = 0; p < width(); ++p) s += e_[p] * ctx.form_degree_at(p);
        return s;
    }

    int fedosov_degree(const AlgebraContext& ctx) const {
        int s = 0;
        for (int p = 0; p < width(); ++p) s += e_[p] * ctx.fedosov_degree_at(p);
        return s;
    }

    /// Count of fiber variables over all families.
    int y_degree(const AlgebraContext& ctx) const {
        int s = 0;
        for (int p = 1 + 2 * ctx.dim(); p < width(); ++p) s += e_[p];
        return s;
    }

    int even_x_degree(const AlgebraContext& ctx) const {
        int s = 0;
        for (int p = 1; p <= ctx.dim(); ++p)
            if (ctx.is_even_x_at(p)) s += e_[p];
        return s;
    }

    friend bool operator==(const Monomial& a, const Monomial& b) { return a.e_ == b.e_; }
    friend bool operator!=(const Monomial& a, const Monomial& b) { return !(a.e_ == b.e_); }
    friend bool operator<(const Monomial& a, const Monomial& b) {
        return std::lexicographical_compare(a.e_.begin(), a.e_.end(), b.e_.begin(), b.e_.end());
    }

    const Exps& raw() const { return e_; }
    Exps& raw() { return e_; }

private:
    Exps e_;
};

/// Koszul weight of a pair of generator positions: parities multiply and form
/// degrees multiply; a transposition contributes (-1)^{eps*eps + p*p}.
inline int koszul_weight(const AlgebraContext& ctx, int pos_a, int pos_b) {
    return (ctx.parity_at(pos_a) * ctx.parity_at(pos_b) + ctx.form_degree_at(pos_a) * ctx.form_degree_at(pos_b)) & 1;
}

} // namespace fedosov
