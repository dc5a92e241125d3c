#pragma once

#include "fedosov/element.hpp"

#include <functional>
#include <map>
#include <vector>

namespace fedosov {

/// Square matrix of elements, indexed by coordinate pairs.
struct ElementMatrix {
    int dim = 0;
    std::vector<Element> entries;

    ElementMatrix() = default;
    ElementMatrix(const ContextPtr& ctx, int d) : dim(d), entries(d * d, Element::zero(ctx)) {}
    const Element& at(int i, int j) const { return entries[i * dim + j]; }
    Element& at(int i, int j) { return entries[i * dim + j]; }
};

/// Christoffel symbols for one chart in one algebra context.  Input is the
/// raised symbol Gamma^k_{ij}; the reordered symbol and the composite
/// one-form operator coefficients are derived here.
class ChristoffelField {
public:
    ChristoffelField() = default;

    ChristoffelField(ContextPtr ctx, std::function<Element(int k, int i, int j)> raised)
        : ctx_(std::move(ctx)), dim_(ctx_->dim()) {
        raised_.assign(dim_ * dim_ * dim_, Element::zero(ctx_));
        reordered_.assign(dim_ * dim_ * dim_, Element::zero(ctx_));
        zero_ = true;
        for (int k = 0; k < dim_; ++k)
            for (int i = 0; i < dim_; ++i)
                for (int j = 0; j < dim_; ++j) {
                    Element g = raised(k, i, j);
                    require_same_context(g.context(), ctx_, "christoffel");
                    if (!g.is_zero()) zero_ = false;
                    // Gamma_i^k_j = (-1)^{eps_i eps_k} Gamma^k_{ij}
                    const int sign = ctx_->coords().parities[i] * ctx_->coords().parities[k];
                    reordered_[idx(i, k, j)] = sign ? -g : g;
                    raised_[idx(k, i, j)] = std::move(g);
                }
        y_op_.assign(dim_ * ctx_->families(), Element::zero(ctx_));
        for (int f = 0; f < ctx_->families(); ++f)
            for (int k = 0; k < dim_; ++k) {
                Element acc = Element::zero(ctx_);
                for (int i = 0; i < dim_; ++i)
                    for (int j = 0; j < dim_; ++j) {
                        const Element& g = reordered(i, k, j);
                        if (g.is_zero()) continue;
                        acc = add(acc, mul(mul(Element::c(ctx_, i), g), Element::y(ctx_, j, f)));
                    }
                y_op_[f * dim_ + k] = std::move(acc);
            }
    }

    const ContextPtr& context() const { return ctx_; }
    int dim() const { return dim_; }
    bool is_flat_input() const { return zero_; }
    const Element& raised(int k, int i, int j) const { return raised_[idx(k, i, j)]; }
    const Element& reordered(int i, int k, int j) const { return reordered_[idx(i, k, j)]; }
    /// Coefficient of the fiber-sector derivative in the composite operator:
    /// sum_{i,j} c^i Gamma_i^k_j y^j, per fiber family.
    const Element& y_operator_coefficient(int k, int family = 0) const { return y_op_[family * dim_ + k]; }

private:
    int idx(int a, int b, int c) const { return (a * dim_ + b) * dim_ + c; }

    ContextPtr ctx_;
    int dim_ = 0;
    bool zero_ = true;
    std::vector<Element> raised_, reordered_, y_op_;
};

// ---------------------------------------------------------------------------
// first-order operators
// ---------------------------------------------------------------------------

/// de Rham differential  d = c^i d^l/dx^i.
inline Element exterior_d(const Element& a) {
    const ContextPtr& ctx = a.context();
    Element out = Element::zero(ctx, a.validity());
    for (int i = 0; i < ctx->dim(); ++i)
        out = add(out, mul(Element::c(ctx, i), deriv_left(a, Generator::x(i))));
    return out;
}

/// Koszul-Tate differential  delta = c^i d^l/dy^i  (family 0).
inline Element delta(const Element& a) {
    const ContextPtr& ctx = a.context();
    Element out = Element::zero(ctx, a.validity());
    for (int i = 0; i < ctx->dim(); ++i)
        out = add(out, mul(Element::c(ctx, i), deriv_left(a, Generator::y(i))));
    return out;
}

/// Contraction  delta* = y^j d^l/dc^j, dual to delta under y <-> c.
inline Element delta_star(const Element& a) {
    const ContextPtr& ctx = a.context();
    Element out = Element::zero(ctx, a.validity());
    for (int j = 0; j < ctx->dim(); ++j)
        out = add(out, mul(Element::y(ctx, j), deriv_left(a, Generator::c(j))));
    return out;
}

/// Homotopy operator: (1/(m+n)) delta* on the (m,n) component, zero on (0,0).
inline Element delta_inv(const Element& a) {
    const ContextPtr& ctx = a.context();
    std::map<int, Element> buckets; // keyed by m+n
    for (const auto& [mono, coef] : a.terms()) {
        const int mn = mono.form_degree(*ctx) + mono.y_degree(*ctx);
        if (mn == 0) continue;
        auto [it, fresh] = buckets.try_emplace(mn, Element::zero(ctx, a.validity()));
        it->second.insert_term(mono, coef);
    }
    Element out = Element::zero(ctx, a.validity());
    for (const auto& [mn, component] : buckets)
        out = add(out, scale(delta_star(component), Scalar(rational(1, mn))));
    return out;
}

/// Composite one-form connection  nabla = d - c^i Gamma_i^k_j y^j d^l/dy^k
/// (torsion-free realization), correcting every fiber family of the context.
inline Element nabla(const Element& a, const ChristoffelField& gamma) {
    Element out = exterior_d(a);
    if (gamma.is_flat_input()) return out;
    const ContextPtr& ctx = a.context();
    for (int f = 0; f < ctx->families(); ++f)
        for (int k = 0; k < ctx->dim(); ++k) {
            const Element& coef = gamma.y_operator_coefficient(k, f);
            if (coef.is_zero()) continue;
            out = sub(out, mul(coef, deriv_left(a, Generator::y(k, f))));
        }
    return out;
}

/// Full covariant derivative component
///   nabla_i = d^l/dx^i - Gamma_i^k_j c^j d^l/dc^k - Gamma_i^k_j y^j d^l/dy^k,
/// with the fiber correction applied to every y family of the context.
inline Element nabla_component(const Element& a, const ChristoffelField& gamma, int i) {
    const ContextPtr& ctx = a.context();
    Element out = deriv_left(a, Generator::x(i));
    for (int k = 0; k < ctx->dim(); ++k)
        for (int j = 0; j < ctx->dim(); ++j) {
            const Element& g = gamma.reordered(i, k, j);
            if (g.is_zero()) continue;
            out = sub(out, mul(mul(g, Element::c(ctx, j)), deriv_left(a, Generator::c(k))));
            for (int f = 0; f < ctx->families(); ++f)
                out = sub(out, mul(mul(g, Element::y(ctx, j, f)), deriv_left(a, Generator::y(k, f))));
        }
    return out;
}

/// c^i nabla_i with the full component realization (keeps the c-sector term;
/// coincides with nabla exactly when the connection is torsion-free).
inline Element nabla_via_components(const Element& a, const ChristoffelField& gamma) {
    const ContextPtr& ctx = a.context();
    Element out = Element::zero(ctx, a.validity());
    for (int i = 0; i < ctx->dim(); ++i)
        out = add(out, mul(Element::c(ctx, i), nabla_component(a, gamma, i)));
    return out;
}

/// Poisson bracket  {a,b} = (a d^r/dy^i) omega^{ij} (d^l/dy^j b).
inline Element poisson(const Element& a, const Element& b, const ElementMatrix& omega_up) {
    const ContextPtr& ctx = a.context();
    require_same_context(ctx, b.context(), "poisson");
    Element out = Element::zero(ctx, min_validity(a.validity(), b.validity()));
    for (int i = 0; i < ctx->dim(); ++i) {
        Element da = deriv_right(a, Generator::y(i));
        if (da.is_zero()) continue;
        for (int j = 0; j < ctx->dim(); ++j) {
            const Element& w = omega_up.at(i, j);
            if (w.is_zero()) continue;
            Element db = deriv_left(b, Generator::y(j));
            if (db.is_zero()) continue;
            out = add(out, mul(mul(da, w), db));
        }
    }
    return out;
}

} // namespace fedosov
