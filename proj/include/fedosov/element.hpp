#pragma once

#include "fedosov/coords.hpp"
#include "fedosov/errors.hpp"
#include "fedosov/monomial.hpp"
#include "fedosov/scalar.hpp"

#include <map>
#include <optional>
#include <utility>
#include <vector>

namespace fedosov {

/// Canonical sum of exact-coefficient monomials with a tracked jet validity.
/// Invariants: no zero coefficients, no term above the ambient Fedosov degree
/// cap, and for finite validity no term above that even-x degree.
class Element {
public:
    using Terms = std::map<Monomial, Scalar>;

    Element() = default;
    explicit Element(ContextPtr ctx, Validity v = kExact) : ctx_(std::move(ctx)), validity_(v) {}

    static Element zero(ContextPtr ctx, Validity v = kExact) { return Element(std::move(ctx), v); }

    static Element constant(ContextPtr ctx, Scalar s, Validity v = kExact) {
        Element e(std::move(ctx), v);
        e.insert_term(Monomial(e.ctx_->width()), std::move(s));
        return e;
    }

    static Element unit(ContextPtr ctx) { return constant(std::move(ctx), Scalar(1)); }

    static Element generator(ContextPtr ctx, const Generator& g, Validity v = kExact) {
        Element e(std::move(ctx), v);
        Monomial m(e.ctx_->width());
        m.set_exponent(e.ctx_->position(g), 1);
        e.insert_term(std::move(m), Scalar(1));
        return e;
    }

    static Element hbar(const ContextPtr& ctx) { return generator(ctx, Generator::hbar()); }
    static Element x(const ContextPtr& ctx, int i) { return generator(ctx, Generator::x(i)); }
    static Element c(const ContextPtr& ctx, int i) { return generator(ctx, Generator::c(i)); }
    static Element y(const ContextPtr& ctx, int i, int family = 0) {
        return generator(ctx, Generator::y(i, family));
    }

    /// Canonical single-term element from a generator word: sorts the word
    /// into canonical order accumulating Koszul signs, zero if a
    /// self-annihilating generator repeats.
    static Element from_word(const ContextPtr& ctx, const std::vector<Generator>& word, Scalar coef,
                             Validity v = kExact) {
        Element e(ctx, v);
        Monomial m(ctx->width());
        int sign = 0;
        for (const Generator& g : word) {
            const int pos = ctx->position(g);
            if (m.exponent(pos) > 0 && ctx->self_annihilating_at(pos)) return e; // zero
            // the new factor enters at the right end and moves left past
            // every stored factor with a higher canonical position
            for (int p = pos + 1; p < ctx->width(); ++p)
                if (m.exponent(p)) sign ^= (m.exponent(p) * koszul_weight(*ctx, pos, p)) & 1;
            m.set_exponent(pos, m.exponent(pos) + 1);
        }
        if (sign) coef = -coef;
        e.insert_term(std::move(m), std::move(coef));
        return e;
    }

    const ContextPtr& context() const { return ctx_; }
    const Terms& terms() const { return terms_; }
    Validity validity() const { return validity_; }
    bool is_zero() const { return terms_.empty(); }
    std::size_t term_count() const { return terms_.size(); }

    /// Keeps stored terms, re-applying truncation for the given validity.
    Element with_validity(Validity v) const {
        Element out(ctx_, v);
        for (const auto& [m, c] : terms_) out.insert_term(m, c);
        return out;
    }

    void insert_term(Monomial m, Scalar coef) {
        if (coef.is_zero()) return;
        if (m.fedosov_degree(*ctx_) > ctx_->max_degree()) return;
        if (validity_ != kExact && m.even_x_degree(*ctx_) > validity_) return;
        auto [it, fresh] = terms_.try_emplace(std::move(m), coef);
        if (!fresh) {
            it->second += coef;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }

    Element operator-() const {
        Element out(ctx_, validity_);
        for (const auto& [m, c] : terms_) out.terms_.emplace(m, -c);
        return out;
    }

    friend Element add(const Element& a, const Element& b) {
        require_same_context(a.ctx_, b.ctx_, "add");
        Element out(a.ctx_, min_validity(a.validity_, b.validity_));
        for (const auto& [m, c] : a.terms_) out.insert_term(m, c);
        for (const auto& [m, c] : b.terms_) out.insert_term(m, c);
        return out;
    }

    friend Element sub(const Element& a, const Element& b) {
        require_same_context(a.ctx_, b.ctx_, "sub");
        Element out(a.ctx_, min_validity(a.validity_, b.validity_));
        for (const auto& [m, c] : a.terms_) out.insert_term(m, c);
        for (const auto& [m, c] : b.terms_) out.insert_term(m, -c);
        return out;
    }

    friend Element scale(const Element& a, const Scalar& s) {
        Element out(a.ctx_, a.validity_);
        if (s.is_zero()) return out;
        for (const auto& [m, c] : a.terms_) out.terms_.emplace(m, c * s);
        return out;
    }

    friend Element mul(const Element& a, const Element& b) {
        require_same_context(a.ctx_, b.ctx_, "mul");
        const AlgebraContext& ctx = *a.ctx_;
        Element out(a.ctx_, min_validity(a.validity_, b.validity_));
        if (a.terms_.empty() || b.terms_.empty()) return out;

        struct Entry {
            int pos, exp;
        };
        struct Side {
            const Monomial* mono;
            const Scalar* coef;
            int degree;
            int even_x;
            boost::container::small_vector<Entry, 12> nz;
        };
        auto explode = [&ctx](const Terms& terms) {
            std::vector<Side> sides;
            sides.reserve(terms.size());
            for (const auto& [m, c] : terms) {
                Side s{&m, &c, m.fedosov_degree(ctx), m.even_x_degree(ctx), {}};
                for (int p = 0; p < m.width(); ++p)
                    if (m.exponent(p)) s.nz.push_back({p, m.exponent(p)});
                sides.push_back(std::move(s));
            }
            return sides;
        };
        const auto left = explode(a.terms_);
        const auto right = explode(b.terms_);
        const int dmax = ctx.max_degree();
        const Validity v = out.validity_;

        Monomial merged(ctx.width());
        for (const Side& u : left) {
            for (const Side& w : right) {
                if (u.degree + w.degree > dmax) continue;
                if (v != kExact && u.even_x + w.even_x > v) continue;
                // nilpotency across the two factors
                bool dead = false;
                int sign = 0;
                for (const Entry& q : w.nz) {
                    if (u.mono->exponent(q.pos) && ctx.self_annihilating_at(q.pos)) {
                        dead = true;
                        break;
                    }
                    // factor q of the right word crosses every left factor
                    // with a strictly higher canonical position
                    for (const Entry& p : u.nz) {
                        if (p.pos <= q.pos) continue;
                        sign ^= (p.exp * q.exp * koszul_weight(ctx, p.pos, q.pos)) & 1;
                    }
                }
                if (dead) continue;
                merged = *u.mono;
                for (const Entry& q : w.nz) merged.set_exponent(q.pos, merged.exponent(q.pos) + q.exp);
                Scalar coef = (*u.coef) * (*w.coef);
                if (sign) coef = -coef;
                out.insert_term(merged, std::move(coef));
            }
        }
        return out;
    }

    friend bool operator==(const Element& a, const Element& b) {
        return same_context(a.ctx_, b.ctx_) && a.validity_ == b.validity_ && a.terms_ == b.terms_;
    }
    friend bool operator!=(const Element& a, const Element& b) { return !(a == b); }

private:
    ContextPtr ctx_;
    Terms terms_;
    Validity validity_ = kExact;
};

/// True when no stored term survives; the trusted part of a-b vanishes.
inline bool equal_as_series(const Element& a, const Element& b) { return sub(a, b).is_zero(); }

// ---------------------------------------------------------------------------
// graded left/right partial derivatives (kernel primitives)
// ---------------------------------------------------------------------------

namespace detail {
inline Validity deriv_validity(const Element& a, const AlgebraContext& ctx, int pos, const char* who) {
    if (ctx.is_even_x_at(pos) && a.validity() != kExact) {
        if (a.validity() == 0) throw JetExhaustedError(who);
        return a.validity() - 1;
    }
    return a.validity();
}
} // namespace detail

/// Left derivative: move one factor g to the leftmost position accumulating
/// Koszul signs, strip it, multiply by its exponent.
inline Element deriv_left(const Element& a, const Generator& g) {
    const AlgebraContext& ctx = *a.context();
    if (g.kind == Generator::Kind::hbar) throw ValidationError("deriv", "no derivative in hbar");
    const int pos = ctx.position(g);
    Element out(a.context(), detail::deriv_validity(a, ctx, pos, "deriv_left"));
    for (const auto& [m, c] : a.terms()) {
        const int e = m.exponent(pos);
        if (!e) continue;
        int sign = 0;
        for (int p = 0; p < pos; ++p)
            if (m.exponent(p)) sign ^= (m.exponent(p) * koszul_weight(ctx, pos, p)) & 1;
        Monomial stripped = m;
        stripped.set_exponent(pos, e - 1);
        Scalar coef = c * Scalar(e);
        if (sign) coef = -coef;
        out.insert_term(std::move(stripped), std::move(coef));
    }
    return out;
}

/// Right derivative: mirror of deriv_left, one factor commuted to the right
/// end and stripped there.
inline Element deriv_right(const Element& a, const Generator& g) {
    const AlgebraContext& ctx = *a.context();
    if (g.kind == Generator::Kind::hbar) throw ValidationError("deriv", "no derivative in hbar");
    const int pos = ctx.position(g);
    Element out(a.context(), detail::deriv_validity(a, ctx, pos, "deriv_right"));
    for (const auto& [m, c] : a.terms()) {
        const int e = m.exponent(pos);
        if (!e) continue;
        int sign = 0;
        for (int p = pos + 1; p < m.width(); ++p)
            if (m.exponent(p)) sign ^= (m.exponent(p) * koszul_weight(ctx, pos, p)) & 1;
        Monomial stripped = m;
        stripped.set_exponent(pos, e - 1);
        Scalar coef = c * Scalar(e);
        if (sign) coef = -coef;
        out.insert_term(std::move(stripped), std::move(coef));
    }
    return out;
}

// ---------------------------------------------------------------------------
// projections and substitutions
// ---------------------------------------------------------------------------

/// Terms with form degree m and fiber degree n (the A_{mn} component).
inline Element project_bidegree(const Element& a, int m, int n) {
    Element out(a.context(), a.validity());
    for (const auto& [mono, c] : a.terms())
        if (mono.form_degree(*a.context()) == m && mono.y_degree(*a.context()) == n) out.insert_term(mono, c);
    return out;
}

/// Terms of Fedosov degree exactly n.
inline Element project_fedosov(const Element& a, int n) {
    Element out(a.context(), a.validity());
    for (const auto& [mono, c] : a.terms())
        if (mono.fedosov_degree(*a.context()) == n) out.insert_term(mono, c);
    return out;
}

/// Terms of Fedosov degree at most n.
inline Element truncate_degree(const Element& a, int n) {
    Element out(a.context(), a.validity());
    for (const auto& [mono, c] : a.terms())
        if (mono.fedosov_degree(*a.context()) <= n) out.insert_term(mono, c);
    return out;
}

/// Terms whose hbar power is exactly k, with the hbar factor removed.
inline Element hbar_coefficient(const Element& a, int k) {
    Element out(a.context(), a.validity());
    for (const auto& [mono, c] : a.terms()) {
        if (mono.hbar_power() != k) continue;
        Monomial m = mono;
        m.set_exponent(0, 0);
        out.insert_term(std::move(m), c);
    }
    return out;
}

enum class GeneratorClass { y, c };

/// Restriction y = 0 (or c = 0): drops every term containing a generator of
/// the given class, any family.
inline Element substitute_zero(const Element& a, GeneratorClass cls) {
    const AlgebraContext& ctx = *a.context();
    Element out(a.context(), a.validity());
    for (const auto& [mono, c] : a.terms()) {
        bool keep = true;
        for (int p = 1 + ctx.dim(); p < mono.width() && keep; ++p) {
            if (!mono.exponent(p)) continue;
            if (cls == GeneratorClass::c ? ctx.is_c_block(p) : ctx.is_y_block(p)) keep = false;
        }
        if (keep) out.insert_term(mono, c);
    }
    return out;
}

// ---------------------------------------------------------------------------
// grading report
// ---------------------------------------------------------------------------

struct TermGrading {
    Monomial monomial;
    int parity;
    int form_degree;
    int fedosov_degree;
};

struct GradingReport {
    std::vector<TermGrading> terms;
    std::optional<int> parity;         // set when all terms agree
    std::optional<int> form_degree;    // likewise
    std::optional<int> fedosov_degree; // likewise
};

inline GradingReport gradings(const Element& a) {
    GradingReport r;
    const AlgebraContext& ctx = *a.context();
    bool first = true;
    int eps = 0, p = 0, deg = 0;
    bool h_eps = true, h_p = true, h_deg = true;
    for (const auto& [mono, c] : a.terms()) {
        (void)c;
        TermGrading t{mono, mono.parity(ctx), mono.form_degree(ctx), mono.fedosov_degree(ctx)};
        if (first) {
            eps = t.parity;
            p = t.form_degree;
            deg = t.fedosov_degree;
            first = false;
        } else {
            h_eps &= t.parity == eps;
            h_p &= t.form_degree == p;
            h_deg &= t.fedosov_degree == deg;
        }
        r.terms.push_back(std::move(t));
    }
    if (!first) {
        if (h_eps) r.parity = eps;
        if (h_p) r.form_degree = p;
        if (h_deg) r.fedosov_degree = deg;
    }
    return r;
}

/// Parity of a (parity-)homogeneous element; throws if mixed.
inline int parity_of(const Element& a) {
    auto g = gradings(a);
    if (a.is_zero()) return 0;
    if (!g.parity) throw ValidationError("parity_of", "element is not parity-homogeneous");
    return *g.parity;
}

// ---------------------------------------------------------------------------
// context transport
// ---------------------------------------------------------------------------

/// Rebuilds the element in another context, applying fn to each generator.
/// The target truncation is re-applied; Koszul signs from any reordering are
/// produced by canonical normalization of the mapped word.
template <typename Fn>
Element map_generators(const Element& a, const ContextPtr& target, Fn&& fn) {
    const AlgebraContext& src = *a.context();
    Element out(target, a.validity());
    std::vector<Generator> word;
    for (const auto& [mono, coef] : a.terms()) {
        word.clear();
        for (int p = 0; p < mono.width(); ++p)
            for (int e = 0; e < mono.exponent(p); ++e) word.push_back(fn(src.generator_at(p)));
        Element t = Element::from_word(target, word, coef, a.validity());
        for (const auto& [m2, c2] : t.terms()) out.insert_term(m2, c2);
    }
    return out;
}

/// Identity embedding into a context over the same coordinates (more fiber
/// families or a different truncation).
inline Element to_context(const Element& a, const ContextPtr& target) {
    return map_generators(a, target, [](const Generator& g) { return g; });
}

/// Renames fiber family `from` to `to` (the target slots must be free).
inline Element rename_family(const Element& a, const ContextPtr& target, int from, int to) {
    return map_generators(a, target, [&](Generator g) {
        if (g.kind == Generator::Kind::y && g.family == from) g.family = to;
        return g;
    });
}

} // namespace fedosov
