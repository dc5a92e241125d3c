#ifndef FEDOSOV_FEDOSOV_HPP
#define FEDOSOV_FEDOSOV_HPP

#include "fedosov/calculus.hpp"
#include "fedosov/element.hpp"
#include "fedosov/geometry.hpp"
#include "fedosov/moyal.hpp"

#include <string>
#include <vector>

namespace fedosov {

/// The deformation one-form r of the flat connection D = nabla - delta +
/// (1/i hbar)[r o, .].  Sectors 0..2 vanish and (delta* r) = 0.
struct DeformationOneForm {
    Element r; // in the public (base) context
    Element sector(int n) const { return project_fedosov(r, n); }
};

/// A quantized symbol: the unique D-horizontal zero-form with boundary value
/// a|_{y=0} = f.
struct HorizontalSection {
    Element a;      // public context, sectors up to the public degree cap
    Element symbol; // the boundary value f
};

struct SolverOptions {
    /// Extra Fedosov degrees carried internally so that the published sectors
    /// are exact despite the degree shifts of the hbar divisions.
    int headroom = 2;
    /// Skip the chart validation (for deliberately broken test inputs).
    bool validate_input = true;
};

/// Geometry, curvature and the solved deformation one-form for one chart.
/// Internal arithmetic runs at max_degree + headroom; published elements are
/// truncated back to the chart's max_degree.
class FlatConnection {
public:
    FlatConnection(const GeometrySpec& spec, SolverOptions opts = {})
        : spec_(&spec), base_(spec.context()), headroom_(opts.headroom) {
        derived_ = derive_structures(spec);
        if (opts.validate_input) validate(spec, derived_).require();
        curvature_ = riemann(spec, derived_);

        work_ = with_max_degree(base_, base_->max_degree() + headroom_);
        derived_work_ = derive_structures(spec, work_);
        curvature_work_ = riemann(spec, derived_work_);
        circ_work_ = CircOperator(work_, derived_work_.m_up);
        solve();
        deformation_.r = publish(r_work_);
    }

    const GeometrySpec& spec() const { return *spec_; }
    const ContextPtr& base_context() const { return base_; }
    const ContextPtr& work_context() const { return work_; }
    const DerivedStructures& derived() const { return derived_; }
    const CurvatureData& curvature() const { return curvature_; }
    const DeformationOneForm& deformation() const { return deformation_; }
    const CircOperator& circ_operator() const { return circ_work_; }

    /// Fiberwise product of two public-context elements.
    Element circ(const Element& a, const Element& b) const {
        return publish(circ_work_.circ(to_context(a, work_), to_context(b, work_)));
    }

    /// D a = nabla a - delta a + (1/i hbar)[r o, a].
    Element apply_D(const Element& a) const { return publish(apply_D_work(to_context(a, work_))); }

    /// Checks the Abelian condition R_D + C + omega = 0 through max_degree
    /// and samples D^2 = 0 on the supplied elements.
    ValidationReport check_flatness(const std::vector<Element>& samples = {}) const {
        ValidationReport report;
        Element e = add(curvature_work_.hamiltonian, derived_work_.abelian_form);
        e = add(e, sub(nabla(r_work_, derived_work_.gamma), delta(r_work_)));
        Element rr = circ_work_.commutator(r_work_, r_work_);
        if (!rr.is_zero()) e = add(e, scale(div_ihbar(rr), Scalar(rational(1, 2))));
        report.add("abelian_condition", truncate_degree(e, base_->max_degree()).is_zero());

        const int window = std::min(base_->max_degree(), base_->max_degree() + headroom_ - 4);
        bool ok = true;
        std::string at;
        int idx = 0;
        for (const Element& s : samples) {
            Element dd = apply_D_work(apply_D_work(to_context(s, work_)));
            if (!truncate_degree(dd, window).is_zero()) {
                ok = false;
                at = "sample " + std::to_string(idx) + " (window degree " + std::to_string(window) + ")";
                break;
            }
            ++idx;
        }
        report.add("d_squared_zero", ok, at);
        return report;
    }

    /// Theorem-2 recursion: the unique horizontal section over the symbol f.
    HorizontalSection quantize(const Element& f) const {
        require_symbol(f);
        Element aw = quantize_work(to_context(f, work_));
        return HorizontalSection{publish(aw), f};
    }

    /// Restriction to y = 0 (horizontal sections are zero-forms, so the
    /// c-restriction is vacuous).
    static Element dequantize(const HorizontalSection& s) {
        return substitute_zero(substitute_zero(s.a, GeneratorClass::y), GeneratorClass::c);
    }

    /// f * g = (Q(f) o Q(g))|_{y=0}, trusted through hbar^(max_degree/2).
    Element star(const Element& f, const Element& g) const {
        require_symbol(f);
        require_symbol(g);
        Element qf = quantize_work(to_context(f, work_));
        Element qg = quantize_work(to_context(g, work_));
        Element prod = circ_work_.circ(qf, qg);
        return publish(substitute_zero(prod, GeneratorClass::y));
    }

    /// [f *, g] = f*g - (-1)^{eps_f eps_g} g*f, per parity component.
    Element star_commutator(const Element& f, const Element& g) const {
        Element out = Element::zero(base_, min_validity(f.validity(), g.validity()));
        for (const Element& fh : split_parity(f))
            for (const Element& gh : split_parity(g)) {
                const int sign = parity_of(fh) * parity_of(gh);
                Element fg = star(fh, gh);
                Element gf = star(gh, fh);
                out = add(out, sign & 1 ? add(fg, gf) : sub(fg, gf));
            }
        return out;
    }

private:
    Element publish(const Element& w) const { return to_context(truncate_degree(w, base_->max_degree()), base_); }

    void require_symbol(const Element& f) const {
        require_same_context(f.context(), base_, "symbol");
        for (const auto& [mono, coef] : f.terms()) {
            (void)coef;
            if (mono.form_degree(*base_) != 0 || mono.y_degree(*base_) != 0)
                throw ValidationError("symbol_shape", "symbols are functions of x and hbar only");
        }
    }

    Element apply_D_work(const Element& a) const {
        Element out = sub(nabla(a, derived_work_.gamma), delta(a));
        Element comm = circ_work_.commutator(r_work_, a);
        if (!comm.is_zero()) out = add(out, div_ihbar(comm));
        return out;
    }

    std::vector<Element> split_parity(const Element& a) const {
        Element even(base_, a.validity()), odd(base_, a.validity());
        for (const auto& [mono, coef] : a.terms())
            (mono.parity(*base_) ? odd : even).insert_term(mono, coef);
        std::vector<Element> out;
        if (!even.is_zero()) out.push_back(std::move(even));
        if (!odd.is_zero()) out.push_back(std::move(odd));
        return out;
    }

    /// Fixed-point form of the r-equation
    ///   delta r = R + C + nabla r + (1/2 i hbar)[r o, r],
    /// iterated as r <- delta_inv(RHS).  Sector n+1 of the update depends
    /// only on sectors <= n, so the iteration freezes degree by degree; the
    /// stabilized prefix of each RHS is asserted delta-closed.
    void solve() {
        const int dmax = work_->max_degree();
        const Element source = add(curvature_work_.hamiltonian, derived_work_.abelian_form);
        Element r = Element::zero(work_);
        bool converged = false;
        for (int it = 0; it <= dmax + 2; ++it) {
            Element rhs = add(source, nabla(r, derived_work_.gamma));
            Element rr = circ_work_.commutator(r, r);
            if (!rr.is_zero()) rhs = add(rhs, scale(div_ihbar(rr), Scalar(rational(1, 2))));
            const int trusted = std::min(it + 2, dmax - 2);
            if (!delta(truncate_degree(rhs, trusted)).is_zero())
                throw ValidationError("r_consistency",
                                      "right-hand side not delta-closed at iteration " + std::to_string(it));
            Element next = delta_inv(rhs);
            if (next == r) {
                converged = true;
                break;
            }
            r = std::move(next);
        }
        if (!converged) throw NoConvergenceError("r-equation");
        r_work_ = std::move(r);

        for (int n = 0; n <= 2; ++n)
            if (!project_fedosov(r_work_, n).is_zero())
                throw ValidationError("r_sectors", "sector " + std::to_string(n) + " of r does not vanish");
        if (!delta_star(r_work_).is_zero()) throw ValidationError("r_gauge", "(delta* r) != 0");
        for (const auto& [mono, coef] : r_work_.terms()) {
            (void)coef;
            if (mono.form_degree(*work_) != 1) throw ValidationError("r_form_degree", "r must be a one-form");
        }
    }

    /// Theorem-2 fixed point  a <- f + delta_inv(nabla a + (1/i hbar)[r o, a]).
    Element quantize_work(const Element& f) const {
        const int dmax = work_->max_degree();
        Element a = f;
        for (int it = 0; it <= dmax + 2; ++it) {
            Element rhs = nabla(a, derived_work_.gamma);
            Element comm = circ_work_.commutator(r_work_, a);
            if (!comm.is_zero()) rhs = add(rhs, div_ihbar(comm));
            const int trusted = std::min(it, dmax - 2);
            if (!delta(truncate_degree(rhs, trusted)).is_zero())
                throw ValidationError("quantize_consistency",
                                      "right-hand side not delta-closed at iteration " + std::to_string(it));
            Element next = add(f, delta_inv(rhs));
            if (next == a) return a;
            a = std::move(next);
        }
        throw NoConvergenceError("horizontal section recursion");
    }

    const GeometrySpec* spec_;
    ContextPtr base_;
    int headroom_;
    ContextPtr work_;
    DerivedStructures derived_, derived_work_;
    CurvatureData curvature_, curvature_work_;
    CircOperator circ_work_;
    Element r_work_;
    DeformationOneForm deformation_;
};

/// Classical Poisson bracket of two symbols,
/// {f,g} = (f d^r/dx^j) omega_(0)^{jk} (d^l/dx^k g)  with omega at hbar = 0.
inline Element classical_poisson(const Element& f, const Element& g, const DerivedStructures& ds) {
    const ContextPtr& ctx = f.context();
    Element out = Element::zero(ctx, min_validity(f.validity(), g.validity()));
    for (int j = 0; j < ctx->dim(); ++j) {
        Element df = deriv_right(f, Generator::x(j));
        if (df.is_zero()) continue;
        for (int k = 0; k < ctx->dim(); ++k) {
            Element w0 = to_context(ds.omega_up_h0.at(j, k), ctx);
            if (w0.is_zero()) continue;
            Element dg = deriv_left(g, Generator::x(k));
            if (dg.is_zero()) continue;
            out = add(out, mul(mul(df, w0), dg));
        }
    }
    return out;
}

} // namespace fedosov

#endif // FEDOSOV_FEDOSOV_HPP
