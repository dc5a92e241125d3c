#pragma once

#include "fedosov/errors.hpp"
#include "fedosov/scalar.hpp"

#include <limits>
#include <memory>
#include <string>
#include <vector>

namespace fedosov {

/// Jet validity: the even-coordinate Taylor order up to which an element's
/// coefficients are trusted.  kExact marks exact polynomial data.
using Validity = int;
inline constexpr Validity kExact = std::numeric_limits<int>::max();

inline Validity min_validity(Validity a, Validity b) { return a < b ? a : b; }

/// One coordinate chart: ordered names, Grassmann parities, and exact
/// basepoint values for the even coordinates (odd coordinates have none).
struct CoordinateSystem {
    std::vector<std::string> names;
    std::vector<int> parities;    // 0 or 1 per coordinate
    std::vector<Rational> basepoint; // meaningful for even slots only

    int dim() const { return static_cast<int>(names.size()); }

    static CoordinateSystem make(std::vector<std::string> names, std::vector<int> parities,
                                 std::vector<Rational> basepoint = {}) {
        CoordinateSystem cs;
        cs.names = std::move(names);
        cs.parities = std::move(parities);
        if (cs.parities.size() != cs.names.size())
            throw ValidationError("coordinate_system", "parity list length does not match names");
        for (std::size_t a = 0; a < cs.names.size(); ++a)
            for (std::size_t b = a + 1; b < cs.names.size(); ++b)
                if (cs.names[a] == cs.names[b])
                    throw ValidationError("coordinate_system", "duplicate coordinate name " + cs.names[a]);
        cs.basepoint = std::move(basepoint);
        cs.basepoint.resize(cs.names.size(), Rational(0));
        return cs;
    }

    friend bool operator==(const CoordinateSystem& a, const CoordinateSystem& b) {
        return a.names == b.names && a.parities == b.parities && a.basepoint == b.basepoint;
    }
};

/// Ambient truncation data consulted by every arithmetic operation.
struct TruncationContext {
    int max_degree = 8; // Fedosov degree cap, applied eagerly in products
    int jet_order = 8;  // validity assigned when a matrix inversion produces a jet

    friend bool operator==(const TruncationContext& a, const TruncationContext& b) {
        return a.max_degree == b.max_degree && a.jet_order == b.jet_order;
    }
};

/// Generator of the algebra: hbar, a coordinate deviation x^i, a one-form
/// basis element c^i, or a fiber variable y^i.  Fiber variables come in
/// independent families; family 0 is the standard one, extra families serve
/// as renamed copies for product formulas and tensor calculus.
struct Generator {
    enum class Kind { hbar, x, c, y };
    Kind kind = Kind::hbar;
    int coord = 0;
    int family = 0; // for Kind::y only

    static Generator hbar() { return {Kind::hbar, 0, 0}; }
    static Generator x(int i) { return {Kind::x, i, 0}; }
    static Generator c(int i) { return {Kind::c, i, 0}; }
    static Generator y(int i, int family = 0) { return {Kind::y, i, family}; }

    friend bool operator==(const Generator& a, const Generator& b) {
        return a.kind == b.kind && a.coord == b.coord && a.family == b.family;
    }
};

/// A coordinate system together with truncation data and a number of fiber
/// families, with per-position attribute tables for the canonical generator
/// order  hbar < x(0..) < c(0..) < y(0..) < y'(0..) < ...
class AlgebraContext {
public:
    AlgebraContext(CoordinateSystem coords, TruncationContext trunc, int y_families = 1)
        : coords_(std::move(coords)), trunc_(trunc), families_(y_families) {
        if (trunc_.max_degree < 0 || trunc_.jet_order < 0)
            throw ValidationError("truncation", "orders must be non-negative");
        const int d = coords_.dim();
        width_ = 1 + (2 + families_) * d;
        parity_.assign(width_, 0);
        form_.assign(width_, 0);
        deg_.assign(width_, 0);
        even_x_.assign(width_, 0);
        deg_[0] = 2; // hbar
        for (int i = 0; i < d; ++i) {
            parity_[1 + i] = coords_.parities[i];
            even_x_[1 + i] = coords_.parities[i] == 0 ? 1 : 0;
            parity_[1 + d + i] = coords_.parities[i];
            form_[1 + d + i] = 1;
            for (int f = 0; f < families_; ++f) {
                parity_[1 + (2 + f) * d + i] = coords_.parities[i];
                deg_[1 + (2 + f) * d + i] = 1;
            }
        }
        self_ann_.assign(width_, 0);
        for (int p = 0; p < width_; ++p) self_ann_[p] = (parity_[p] + form_[p]) % 2;
    }

    const CoordinateSystem& coords() const { return coords_; }
    const TruncationContext& truncation() const { return trunc_; }
    int dim() const { return coords_.dim(); }
    int families() const { return families_; }
    int width() const { return width_; }
    int max_degree() const { return trunc_.max_degree; }
    int jet_order() const { return trunc_.jet_order; }

    int position(const Generator& g) const {
        const int d = dim();
        switch (g.kind) {
            case Generator::Kind::hbar: return 0;
            case Generator::Kind::x: return 1 + g.coord;
            case Generator::Kind::c: return 1 + d + g.coord;
            case Generator::Kind::y: return 1 + (2 + g.family) * d + g.coord;
        }
        return 0;
    }

    Generator generator_at(int pos) const {
        const int d = dim();
        if (pos == 0) return Generator::hbar();
        pos -= 1;
        if (pos < d) return Generator::x(pos);
        pos -= d;
        if (pos < d) return Generator::c(pos);
        pos -= d;
        return Generator::y(pos % d, pos / d);
    }

    int parity_at(int pos) const { return parity_[pos]; }
    int form_degree_at(int pos) const { return form_[pos]; }
    int fedosov_degree_at(int pos) const { return deg_[pos]; }
    bool self_annihilating_at(int pos) const { return self_ann_[pos] != 0; }
    bool is_even_x_at(int pos) const { return even_x_[pos] != 0; }
    bool is_hbar(int pos) const { return pos == 0; }
    bool is_x_block(int pos) const { return pos >= 1 && pos < 1 + dim(); }
    bool is_c_block(int pos) const { return pos >= 1 + dim() && pos < 1 + 2 * dim(); }
    bool is_y_block(int pos) const { return pos >= 1 + 2 * dim(); }

    int parity(const Generator& g) const { return parity_[position(g)]; }
    int form_degree(const Generator& g) const { return form_[position(g)]; }
    int fedosov_degree(const Generator& g) const { return deg_[position(g)]; }

    friend bool operator==(const AlgebraContext& a, const AlgebraContext& b) {
        return a.coords_ == b.coords_ && a.trunc_ == b.trunc_ && a.families_ == b.families_;
    }

private:
    CoordinateSystem coords_;
    TruncationContext trunc_;
    int families_;
    int width_;
    std::vector<int> parity_, form_, deg_, even_x_, self_ann_;
};

using ContextPtr = std::shared_ptr<const AlgebraContext>;

inline ContextPtr make_context(CoordinateSystem coords, TruncationContext trunc, int y_families = 1) {
    return std::make_shared<AlgebraContext>(std::move(coords), trunc, y_families);
}

inline ContextPtr with_families(const ContextPtr& ctx, int y_families) {
    return std::make_shared<AlgebraContext>(ctx->coords(), ctx->truncation(), y_families);
}

inline ContextPtr with_max_degree(const ContextPtr& ctx, int max_degree) {
    TruncationContext t = ctx->truncation();
    t.max_degree = max_degree;
    return std::make_shared<AlgebraContext>(ctx->coords(), t, ctx->families());
}

inline bool same_context(const ContextPtr& a, const ContextPtr& b) {
    return a == b || (a && b && *a == *b);
}

inline void require_same_context(const ContextPtr& a, const ContextPtr& b, const char* op) {
    if (!same_context(a, b)) throw ValidationError("context_mismatch", std::string("in ") + op);
}

} // namespace fedosov
