#ifndef FEDOSOV_MOYAL_HPP
#define FEDOSOV_MOYAL_HPP

#include "fedosov/calculus.hpp"
#include "fedosov/element.hpp"

#include <array>
#include <vector>

namespace fedosov {

/// Exact division by i*hbar: lowers every hbar exponent by one and rotates
/// the coefficient by 1/i = -i.  Every term must carry hbar.
inline Element div_ihbar(const Element& a) {
    Element out(a.context(), a.validity());
    for (const auto& [mono, coef] : a.terms()) {
        if (mono.hbar_power() < 1) throw HbarDivisionError("term without hbar factor");
        Monomial m = mono;
        m.set_exponent(0, m.exponent(0) - 1);
        out.insert_term(std::move(m), coef * Scalar(Rational(0), Rational(-1)));
    }
    return out;
}

/// The fiberwise product
///
///   a o b = a exp[ d^r/dy^j (i hbar/2) m^{jk} d^l/dy^k ] b ,
///
/// realized on a doubled fiber-variable set: b's y variables are renamed to a
/// second family y', the even one-step operator P is applied repeatedly with
/// 1/k! weights, and y' is identified with y at the end.
///
/// Sign realization.  On a product F = u * v' (u carrying y, v' carrying y'),
/// the triple-product step  (u d^r/dy^j) M^{jk} (d^l/dy'^k v')  equals
///
///   M^{jk} * (-1)^{eps_j * eps(G)} * d^l/dy'^k (G),   G = d^r/dy^j (F),
///
/// by moving M^{jk} (parity eps_j + eps_k) to the front and cancelling the
/// crossing signs of the two global derivatives; the parity twist on G is
/// applied per term.  The step is pinned by the first-order triple-product
/// form and by the associativity suite.
class CircOperator {
public:
    CircOperator() = default;

    CircOperator(ContextPtr base, const ElementMatrix& m_up) : base_(std::move(base)) {
        if (base_->families() != 1) throw ValidationError("circ", "base context must have one fiber family");
        doubled_ = with_families(base_, 2);
        const int d = base_->dim();
        m_doubled_ = ElementMatrix(doubled_, d);
        const Scalar half_i_hbar = Scalar(Rational(0), rational(1, 2));
        for (int j = 0; j < d; ++j)
            for (int k = 0; k < d; ++k) {
                const Element& entry = m_up.at(j, k);
                if (entry.is_zero()) continue;
                m_doubled_.at(j, k) = scale(mul(Element::hbar(doubled_), to_context(entry, doubled_)), half_i_hbar);
            }
    }

    const ContextPtr& base_context() const { return base_; }

    Element circ(const Element& a, const Element& b) const {
        require_same_context(a.context(), base_, "circ");
        require_same_context(b.context(), base_, "circ");
        Element f = mul(to_context(a, doubled_), rename_family(b, doubled_, 0, 1));
        Element total = f;
        Element power = std::move(f);
        Rational factorial(1);
        const int kmax = base_->max_degree() / 2;
        for (int k = 1; k <= kmax && !power.is_zero(); ++k) {
            power = step(power);
            if (power.is_zero()) break;
            factorial *= k;
            total = add(total, scale(power, Scalar(Rational(1) / factorial)));
        }
        return collapse(total);
    }

    /// Graded commutator [a o, b] computed per (parity, form parity)
    /// homogeneous component; every term of the result carries hbar.
    Element commutator(const Element& a, const Element& b) const {
        Element out = Element::zero(base_, min_validity(a.validity(), b.validity()));
        for (const Element& ah : split_eps_p(a))
            for (const Element& bh : split_eps_p(b)) {
                const AlgebraContext& ctx = *base_;
                const auto& am = ah.terms().begin()->first;
                const auto& bm = bh.terms().begin()->first;
                const int sign =
                    (am.parity(ctx) * bm.parity(ctx) + (am.form_degree(ctx) & 1) * (bm.form_degree(ctx) & 1)) & 1;
                Element ab = circ(ah, bh);
                Element ba = circ(bh, ah);
                out = add(out, sign ? add(ab, ba) : sub(ab, ba));
            }
        return out;
    }

private:
    /// One application of the bidifferential step in the doubled algebra.
    Element step(const Element& f) const {
        const int d = base_->dim();
        Element out = Element::zero(doubled_, f.validity());
        for (int j = 0; j < d; ++j) {
            Element g = deriv_right(f, Generator::y(j, 0));
            if (g.is_zero()) continue;
            if (base_->coords().parities[j]) g = parity_twist(g);
            for (int k = 0; k < d; ++k) {
                const Element& mjk = m_doubled_.at(j, k);
                if (mjk.is_zero()) continue;
                Element h = deriv_left(g, Generator::y(k, 1));
                if (h.is_zero()) continue;
                out = add(out, mul(mjk, h));
            }
        }
        return out;
    }

    static Element parity_twist(const Element& g) {
        Element out(g.context(), g.validity());
        for (const auto& [mono, coef] : g.terms())
            out.insert_term(mono, mono.parity(*g.context()) ? -coef : coef);
        return out;
    }

    Element collapse(const Element& f) const {
        return map_generators(f, base_, [](Generator g) {
            if (g.kind == Generator::Kind::y) g.family = 0;
            return g;
        });
    }

    std::vector<Element> split_eps_p(const Element& a) const {
        std::array<Element, 4> buckets{Element::zero(base_, a.validity()), Element::zero(base_, a.validity()),
                                       Element::zero(base_, a.validity()), Element::zero(base_, a.validity())};
        const AlgebraContext& ctx = *base_;
        for (const auto& [mono, coef] : a.terms())
            buckets[2 * mono.parity(ctx) + (mono.form_degree(ctx) & 1)].insert_term(mono, coef);
        std::vector<Element> out;
        for (auto& b : buckets)
            if (!b.is_zero()) out.push_back(std::move(b));
        return out;
    }

    ContextPtr base_;
    ContextPtr doubled_;
    ElementMatrix m_doubled_;
};

} // namespace fedosov

#endif // FEDOSOV_MOYAL_HPP
