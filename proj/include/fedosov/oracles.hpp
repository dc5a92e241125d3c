#pragma once

// Independent reference computations used to certify the main engine.  This
// header deliberately depends only on the graded-algebra kernel; a build
// check in the test suite fails if the circ/star implementation headers ever
// leak into this translation path.

#include "fedosov/element.hpp"

#include <functional>
#include <string>
#include <vector>

namespace fedosov {

/// Moyal-type product on flat charts (Gamma = 0, constant m), computed
/// directly in the x variables:
///
///   f star g = sum_t (1/t!) (f [d^r/dx^j (i hbar/2) m^{jk} d^l/dx^k]^t g)
///
/// realized on explicit tensor-pair lists.  Shares nothing with the
/// fiberwise product implementation beyond the kernel arithmetic.
inline Element flat_star(const Element& f, const Element& g, const std::vector<std::vector<Scalar>>& m_const) {
    const ContextPtr& ctx = f.context();
    require_same_context(ctx, g.context(), "flat_star");
    const int d = ctx->dim();

    // (i hbar / 2) m^{jk}, an even constant element
    std::vector<Element> weight(d * d, Element::zero(ctx));
    for (int j = 0; j < d; ++j)
        for (int k = 0; k < d; ++k) {
            if (m_const[j][k].is_zero()) continue;
            weight[j * d + k] =
                scale(Element::hbar(ctx), m_const[j][k] * Scalar(Rational(0), rational(1, 2)));
        }

    Element total = mul(f, g);
    std::vector<std::pair<Element, Element>> pairs{{f, g}};
    Rational factorial(1);
    const int tmax = ctx->max_degree() / 2;
    for (int t = 1; t <= tmax && !pairs.empty(); ++t) {
        std::vector<std::pair<Element, Element>> next;
        for (const auto& [u, v] : pairs)
            for (int j = 0; j < d; ++j) {
                Element du = deriv_right(u, Generator::x(j));
                if (du.is_zero()) continue;
                for (int k = 0; k < d; ++k) {
                    if (weight[j * d + k].is_zero()) continue;
                    Element dv = deriv_left(v, Generator::x(k));
                    if (dv.is_zero()) continue;
                    next.emplace_back(mul(du, weight[j * d + k]), std::move(dv));
                }
            }
        pairs = std::move(next);
        if (pairs.empty()) break;
        factorial *= t;
        const Scalar w = Scalar(Rational(1) / factorial);
        for (const auto& [u, v] : pairs) total = add(total, scale(mul(u, v), w));
    }
    return total;
}

// ---------------------------------------------------------------------------
// exhaustive derivative-convention check
// ---------------------------------------------------------------------------

struct DerivativeCallbacks {
    std::function<Element(const Element&, const Generator&)> left = [](const Element& a, const Generator& g) {
        return deriv_left(a, g);
    };
    std::function<Element(const Element&, const Generator&)> right = [](const Element& a, const Generator& g) {
        return deriv_right(a, g);
    };
};

struct DerivativeCheckResult {
    bool passed = true;
    std::string witness; // offending word, shortest first
};

namespace detail {

inline Element reverse_word_element(const Element& a) {
    const ContextPtr& ctx = a.context();
    Element out(ctx, a.validity());
    std::vector<Generator> word;
    for (const auto& [mono, coef] : a.terms()) {
        word.clear();
        for (int p = mono.width() - 1; p >= 0; --p)
            for (int e = 0; e < mono.exponent(p); ++e) word.push_back(ctx->generator_at(p));
        Element t = Element::from_word(ctx, word, coef, a.validity());
        for (const auto& [m2, c2] : t.terms()) out.insert_term(m2, c2);
    }
    return out;
}

inline std::string word_string(const ContextPtr& ctx, const std::vector<Generator>& word) {
    std::string s;
    for (const Generator& g : word) {
        if (!s.empty()) s += "*";
        switch (g.kind) {
            case Generator::Kind::hbar: s += "hbar"; break;
            case Generator::Kind::x: s += ctx->coords().names[g.coord]; break;
            case Generator::Kind::c: s += "c[" + ctx->coords().names[g.coord] + "]"; break;
            case Generator::Kind::y: s += "y[" + ctx->coords().names[g.coord] + "]"; break;
        }
    }
    return s.empty() ? "1" : s;
}

} // namespace detail

/// Enumerates every word up to max_len over the chart's x, c, y generators
/// and checks, against first principles:
///   - the graded Leibniz rule for the left derivative on every split,
///   - the graded Leibniz rule for the right derivative on every split,
///   - right = reverse . left . reverse on every word.
/// The derivative implementations are injectable so a deliberately mutated
/// kernel is caught with a shortest witness.
inline DerivativeCheckResult enumerate_check_derivatives(const ContextPtr& ctx, int max_len,
                                                         const DerivativeCallbacks& cb = {}) {
    DerivativeCheckResult result;
    const int d = ctx->dim();
    std::vector<Generator> gens;
    for (int i = 0; i < d; ++i) {
        gens.push_back(Generator::x(i));
        gens.push_back(Generator::c(i));
        gens.push_back(Generator::y(i));
    }

    std::vector<std::vector<Generator>> words{{}};
    for (int len = 1; len <= max_len; ++len) {
        std::vector<std::vector<Generator>> grown;
        for (const auto& w : words)
            if (static_cast<int>(w.size()) == len - 1)
                for (const Generator& g : gens) {
                    auto w2 = w;
                    w2.push_back(g);
                    grown.push_back(std::move(w2));
                }
        words.insert(words.end(), grown.begin(), grown.end());
    }

    auto fail = [&](const std::vector<Generator>& w) {
        if (result.passed) {
            result.passed = false;
            result.witness = detail::word_string(ctx, w);
        }
    };

    for (const auto& w : words) {
        Element m = Element::from_word(ctx, w, Scalar(1));
        if (m.is_zero()) continue;
        for (const Generator& g : gens) {
            const int kg_base = ctx->parity(g);
            const int pg = ctx->form_degree(g);
            // Leibniz over every split of the word
            for (std::size_t s = 0; s <= w.size(); ++s) {
                std::vector<Generator> lw(w.begin(), w.begin() + s), rw(w.begin() + s, w.end());
                Element u = Element::from_word(ctx, lw, Scalar(1));
                Element v = Element::from_word(ctx, rw, Scalar(1));
                if (u.is_zero() || v.is_zero()) continue;
                const auto& um = u.terms().begin()->first;
                const auto& vm = v.terms().begin()->first;
                const int sign_u = (kg_base * um.parity(*ctx) + pg * (um.form_degree(*ctx) & 1)) & 1;
                const int sign_v = (kg_base * vm.parity(*ctx) + pg * (vm.form_degree(*ctx) & 1)) & 1;

                Element lhs = cb.left(mul(u, v), g);
                Element rhs = add(mul(cb.left(u, g), v),
                                  sign_u ? -mul(u, cb.left(v, g)) : mul(u, cb.left(v, g)));
                if (!equal_as_series(lhs, rhs)) fail(w);

                Element lhs_r = cb.right(mul(u, v), g);
                Element rhs_r = add(mul(u, cb.right(v, g)),
                                    sign_v ? -mul(cb.right(u, g), v) : mul(cb.right(u, g), v));
                if (!equal_as_series(lhs_r, rhs_r)) fail(w);
            }
            // cross-check of the two derivatives through word reversal
            Element direct = cb.right(m, g);
            Element via_reverse = detail::reverse_word_element(cb.left(detail::reverse_word_element(m), g));
            if (!equal_as_series(direct, via_reverse)) fail(w);
        }
        if (!result.passed) break;
    }
    return result;
}

} // namespace fedosov
