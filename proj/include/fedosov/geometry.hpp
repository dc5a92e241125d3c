#pragma once

#include "fedosov/calculus.hpp"
#include "fedosov/element.hpp"

#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fedosov {

// ---------------------------------------------------------------------------
// validation reporting
// ---------------------------------------------------------------------------

struct CheckResult {
    std::string name;
    bool passed;
    std::string detail; // first offending component, empty when passed
};

struct ValidationReport {
    std::vector<CheckResult> checks;

    void add(std::string name, bool passed, std::string detail = "") {
        checks.push_back({std::move(name), passed, std::move(detail)});
    }
    bool all_passed() const {
        for (const auto& c : checks)
            if (!c.passed) return false;
        return true;
    }
    const CheckResult* first_failure() const {
        for (const auto& c : checks)
            if (!c.passed) return &c;
        return nullptr;
    }
    /// Throws E_VALIDATION naming the first failed check.
    void require() const {
        if (const CheckResult* f = first_failure()) throw ValidationError(f->name, f->detail);
    }
    void merge(const ValidationReport& other) {
        checks.insert(checks.end(), other.checks.begin(), other.checks.end());
    }
};

namespace detail {
inline std::string index_tuple(std::initializer_list<int> idx) {
    std::ostringstream os;
    os << "(";
    bool first = true;
    for (int v : idx) {
        if (!first) os << ",";
        os << v + 1; // 1-based in diagnostics, matching the spec-file syntax
        first = false;
    }
    os << ")";
    return os.str();
}
} // namespace detail

// ---------------------------------------------------------------------------
// chart input
// ---------------------------------------------------------------------------

/// Chart data: multiplicative tensor m^{ij}, Christoffel symbols Gamma^k_{ij}
/// and an optional Abelian two-form C_{ij}, all functions of x and hbar only.
class GeometrySpec {
public:
    using EntryFn = std::function<Element(int, int)>;
    using GammaFn = std::function<Element(int, int, int)>;

    GeometrySpec(CoordinateSystem coords, TruncationContext trunc, const EntryFn& m_entries,
                 const GammaFn& gamma_entries, const EntryFn* abelian_entries = nullptr)
        : coords_(std::move(coords)), trunc_(trunc), ctx_(make_context(coords_, trunc_)) {
        const int d = coords_.dim();
        m_up_ = ElementMatrix(ctx_, d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                m_up_.at(i, j) = m_entries(i, j);
                check_entry(m_up_.at(i, j), parity_sum({i, j}), "m", {i, j});
            }
        gamma_.assign(d * d * d, Element::zero(ctx_));
        for (int k = 0; k < d; ++k)
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) {
                    Element g = gamma_entries(k, i, j);
                    check_entry(g, parity_sum({k, i, j}), "Gamma", {k, i, j});
                    gamma_[(k * d + i) * d + j] = std::move(g);
                }
        if (abelian_entries) {
            has_abelian_ = true;
            abelian_ = ElementMatrix(ctx_, d);
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) {
                    abelian_.at(i, j) = (*abelian_entries)(i, j);
                    check_entry(abelian_.at(i, j), parity_sum({i, j}), "C", {i, j});
                }
        }
    }

    const CoordinateSystem& coords() const { return coords_; }
    const TruncationContext& truncation() const { return trunc_; }
    const ContextPtr& context() const { return ctx_; }
    int dim() const { return coords_.dim(); }
    const ElementMatrix& m_up() const { return m_up_; }
    const Element& gamma(int k, int i, int j) const { return gamma_[(k * dim() + i) * dim() + j]; }
    bool has_abelian() const { return has_abelian_; }
    const ElementMatrix& abelian() const { return abelian_; }

private:
    int parity_sum(std::initializer_list<int> idx) const {
        int s = 0;
        for (int v : idx) s += coords_.parities[v];
        return s & 1;
    }

    void check_entry(const Element& e, int want_parity, const char* what, std::initializer_list<int> idx) const {
        require_same_context(e.context(), ctx_, "geometry entry");
        const AlgebraContext& ctx = *ctx_;
        for (const auto& [mono, coef] : e.terms()) {
            (void)coef;
            if (mono.form_degree(ctx) != 0 || mono.y_degree(ctx) != 0)
                throw ValidationError(std::string(what) + "_entry_shape",
                                      "entry " + detail::index_tuple(idx) + " must depend on x and hbar only");
            if (mono.parity(ctx) != want_parity)
                throw ValidationError(std::string(what) + "_entry_parity",
                                      "entry " + detail::index_tuple(idx) + " has a term of wrong parity");
        }
    }

    CoordinateSystem coords_;
    TruncationContext trunc_;
    ContextPtr ctx_;
    ElementMatrix m_up_;
    std::vector<Element> gamma_;
    bool has_abelian_ = false;
    ElementMatrix abelian_;
};

// ---------------------------------------------------------------------------
// derived structures
// ---------------------------------------------------------------------------

struct DerivedStructures {
    ContextPtr ctx;
    ElementMatrix m_up;
    ElementMatrix m_transpose;
    ElementMatrix omega_up;   // antisymmetric part of m
    ElementMatrix g_up;       // symmetric part of m
    ElementMatrix omega_down; // inverse of omega_up
    ElementMatrix omega_tilde;
    ElementMatrix omega_up_h0; // omega_up at hbar = 0 (classical limit)
    Element omega_form;        // (1/2) c^i omega_{ij} c^j
    Element varpi;             // c^i omega_{ij} y^j
    ChristoffelField gamma;
    std::vector<Element> gamma_lowered; // Gamma_{k,ij}, indexed (k*d+i)*d+j
    bool has_abelian = false;
    ElementMatrix abelian_entries;
    Element abelian_form; // (1/2) c^i C_{ij} c^j, zero by default

    const Element& lowered(int k, int i, int j) const {
        const int d = ctx->dim();
        return gamma_lowered[(k * d + i) * d + j];
    }
};

namespace detail {

inline Scalar scalar_part(const Element& e) {
    for (const auto& [mono, coef] : e.terms())
        if (mono.is_unit()) return coef;
    return Scalar(0);
}

inline Element drop_scalar_part(const Element& e) {
    Element out(e.context(), e.validity());
    for (const auto& [mono, coef] : e.terms())
        if (!mono.is_unit()) out.insert_term(mono, coef);
    return out;
}

/// Exact Gauss-Jordan inverse over the Gaussian rationals.
inline std::vector<Scalar> invert_scalar_matrix(std::vector<Scalar> a, int d) {
    std::vector<Scalar> inv(d * d, Scalar(0));
    for (int i = 0; i < d; ++i) inv[i * d + i] = Scalar(1);
    for (int col = 0; col < d; ++col) {
        int pivot = -1;
        for (int row = col; row < d; ++row)
            if (!a[row * d + col].is_zero()) {
                pivot = row;
                break;
            }
        if (pivot < 0) throw DegenerateError("omega_0 is not invertible");
        if (pivot != col)
            for (int j = 0; j < d; ++j) {
                std::swap(a[pivot * d + j], a[col * d + j]);
                std::swap(inv[pivot * d + j], inv[col * d + j]);
            }
        const Scalar p = a[col * d + col];
        for (int j = 0; j < d; ++j) {
            a[col * d + j] = a[col * d + j] / p;
            inv[col * d + j] = inv[col * d + j] / p;
        }
        for (int row = 0; row < d; ++row) {
            if (row == col || a[row * d + col].is_zero()) continue;
            const Scalar f = a[row * d + col];
            for (int j = 0; j < d; ++j) {
                a[row * d + j] -= f * a[col * d + j];
                inv[row * d + j] -= f * inv[col * d + j];
            }
        }
    }
    return inv;
}

} // namespace detail

/// Derives every structure the construction needs from (m, Gamma, C):
/// omega^{ij} with its exact inverse (around the basepoint value, by a
/// terminating Neumann series in the filtered correction), the two-form, the
/// generator varpi and the reordered/lowered Christoffel symbols.
inline DerivedStructures derive_structures(const GeometrySpec& spec, ContextPtr ctx = nullptr) {
    if (!ctx) ctx = spec.context();
    const int d = spec.dim();
    const auto& parities = ctx->coords().parities;
    DerivedStructures ds;
    ds.ctx = ctx;

    ds.m_up = ElementMatrix(ctx, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) ds.m_up.at(i, j) = to_context(spec.m_up().at(i, j), ctx);

    ds.m_transpose = ElementMatrix(ctx, d);
    ds.omega_up = ElementMatrix(ctx, d);
    ds.g_up = ElementMatrix(ctx, d);
    const Scalar half = Scalar(rational(1, 2));
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            Element t = ds.m_up.at(j, i);
            if (parities[i] * parities[j]) t = -t;
            ds.m_transpose.at(i, j) = t;
            ds.omega_up.at(i, j) = scale(sub(ds.m_up.at(i, j), t), half);
            ds.g_up.at(i, j) = scale(add(ds.m_up.at(i, j), t), half);
        }

    // Split omega = omega_0 + N with omega_0 the basepoint value at hbar=0,
    // odd-x=0; invert omega_0 exactly, then sum the terminating Neumann
    // series for the full inverse.  The series terminates because every term
    // of N carries hbar, an odd coordinate, or a positive even-x degree.
    std::vector<Scalar> w0(d * d);
    bool jets_needed = false;
    int odd_count = 0;
    for (int i = 0; i < d; ++i)
        if (parities[i]) ++odd_count;
    ElementMatrix correction(ctx, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            w0[i * d + j] = detail::scalar_part(ds.omega_up.at(i, j));
            correction.at(i, j) = detail::drop_scalar_part(ds.omega_up.at(i, j));
            for (const auto& [mono, coef] : correction.at(i, j).terms()) {
                (void)coef;
                if (mono.even_x_degree(*ctx) > 0) jets_needed = true;
            }
        }
    const std::vector<Scalar> w0inv = detail::invert_scalar_matrix(w0, d);
    const Validity v_inv = jets_needed ? ctx->jet_order() : kExact;

    ElementMatrix w0inv_m(ctx, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) w0inv_m.at(i, j) = Element::constant(ctx, w0inv[i * d + j], v_inv);

    auto matmul = [&](const ElementMatrix& a, const ElementMatrix& b) {
        ElementMatrix out(ctx, d);
        for (int i = 0; i < d; ++i)
            for (int k = 0; k < d; ++k) {
                Element acc = Element::zero(ctx, v_inv);
                for (int j = 0; j < d; ++j) {
                    if (a.at(i, j).is_zero() || b.at(j, k).is_zero()) continue;
                    acc = add(acc, mul(a.at(i, j), b.at(j, k)));
                }
                out.at(i, k) = std::move(acc);
            }
        return out;
    };
    auto matrices_equal = [&](const ElementMatrix& a, const ElementMatrix& b) {
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                if (!equal_as_series(a.at(i, j), b.at(i, j))) return false;
        return true;
    };

    ElementMatrix inverse = w0inv_m;
    const int max_passes =
        ctx->max_degree() / 2 + odd_count + (jets_needed ? ctx->jet_order() : 0) + 2;
    bool settled = false;
    for (int pass = 0; pass < max_passes; ++pass) {
        // A <- W0^{-1} - A N W0^{-1}, the fixed point of A (W0 + N) = 1
        ElementMatrix next = matmul(matmul(inverse, correction), w0inv_m);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) next.at(i, j) = sub(w0inv_m.at(i, j), next.at(i, j));
        if (matrices_equal(next, inverse)) {
            settled = true;
            break;
        }
        inverse = std::move(next);
    }
    if (!settled) throw JetExhaustedError("omega inverse Neumann series did not terminate");
    ds.omega_down = std::move(inverse);

    // post-checks: two-sided-enough inverse and graded skewsymmetry
    for (int i = 0; i < d; ++i)
        for (int k = 0; k < d; ++k) {
            Element acc = Element::zero(ctx, v_inv);
            for (int j = 0; j < d; ++j)
                acc = add(acc, mul(ds.omega_down.at(i, j), ds.omega_up.at(j, k)));
            Element expect = i == k ? Element::constant(ctx, Scalar(1), v_inv) : Element::zero(ctx, v_inv);
            if (!equal_as_series(acc, expect))
                throw ValidationError("omega_inverse", "omega_{ij} omega^{jk} != delta at " + detail::index_tuple({i, k}));
        }
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            // omega_{ij} = (-1)^{(eps_i+1)(eps_j+1)} omega_{ji}
            Element rhs = ds.omega_down.at(j, i);
            if (((parities[i] + 1) * (parities[j] + 1)) & 1) rhs = -rhs;
            if (!equal_as_series(ds.omega_down.at(i, j), rhs))
                throw ValidationError("omega_skewsymmetry", "at " + detail::index_tuple({i, j}));
        }

    ds.omega_tilde = ElementMatrix(ctx, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            ds.omega_tilde.at(i, j) = parities[j] ? -ds.omega_down.at(i, j) : ds.omega_down.at(i, j);

    ds.omega_up_h0 = ElementMatrix(ctx, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) ds.omega_up_h0.at(i, j) = hbar_coefficient(ds.omega_up.at(i, j), 0);

    ds.omega_form = Element::zero(ctx);
    ds.varpi = Element::zero(ctx);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            const Element& w = ds.omega_down.at(i, j);
            if (w.is_zero()) continue;
            ds.omega_form = add(ds.omega_form, scale(mul(mul(Element::c(ctx, i), w), Element::c(ctx, j)), half));
            ds.varpi = add(ds.varpi, mul(mul(Element::c(ctx, i), w), Element::y(ctx, j)));
        }

    ds.gamma = ChristoffelField(ctx, [&](int k, int i, int j) { return to_context(spec.gamma(k, i, j), ctx); });
    ds.gamma_lowered.assign(d * d * d, Element::zero(ctx));
    for (int k = 0; k < d; ++k)
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                Element acc = Element::zero(ctx);
                for (int n = 0; n < d; ++n) {
                    const Element& g = ds.gamma.raised(n, i, j);
                    if (g.is_zero() || ds.omega_down.at(k, n).is_zero()) continue;
                    acc = add(acc, mul(ds.omega_down.at(k, n), g));
                }
                if (parities[j]) acc = -acc;
                ds.gamma_lowered[(k * d + i) * d + j] = std::move(acc);
            }

    ds.has_abelian = spec.has_abelian();
    ds.abelian_form = Element::zero(ctx);
    if (ds.has_abelian) {
        ds.abelian_entries = ElementMatrix(ctx, d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                ds.abelian_entries.at(i, j) = to_context(spec.abelian().at(i, j), ctx);
                const Element& cij = ds.abelian_entries.at(i, j);
                if (cij.is_zero()) continue;
                ds.abelian_form =
                    add(ds.abelian_form, scale(mul(mul(Element::c(ctx, i), cij), Element::c(ctx, j)), half));
            }
    }
    return ds;
}

// ---------------------------------------------------------------------------
// validation
// ---------------------------------------------------------------------------

/// Runs the compatibility checks on a chart: the connection preserves m, is
/// torsion-free and preserves the lowered two-form; omega is closed and its
/// inverse satisfies the Jacobi identity; the optional Abelian two-form is
/// skew, closed and vanishes at Fedosov degree zero.
inline ValidationReport validate(const GeometrySpec& spec, const DerivedStructures& ds) {
    ValidationReport report;
    const ContextPtr& ctx = ds.ctx;
    const int d = ctx->dim();
    const auto& eps = ctx->coords().parities;
    auto neg_if = [](Element e, int s) { return s & 1 ? -e : e; };

    // (a) nabla_i m^{jk} = 0
    {
        bool ok = true;
        std::string at;
        for (int i = 0; i < d && ok; ++i)
            for (int j = 0; j < d && ok; ++j)
                for (int k = 0; k < d && ok; ++k) {
                    Element e = deriv_left(ds.m_up.at(j, k), Generator::x(i));
                    for (int n = 0; n < d; ++n) {
                        if (!ds.gamma.reordered(i, j, n).is_zero() && !ds.m_up.at(n, k).is_zero())
                            e = add(e, mul(ds.gamma.reordered(i, j, n), ds.m_up.at(n, k)));
                        if (!ds.gamma.reordered(i, k, n).is_zero() && !ds.m_up.at(j, n).is_zero())
                            e = add(e, neg_if(mul(ds.gamma.reordered(i, k, n), ds.m_up.at(j, n)),
                                              eps[j] * (eps[k] + eps[n])));
                    }
                    if (!e.is_zero()) {
                        ok = false;
                        at = detail::index_tuple({i, j, k});
                    }
                }
        report.add("nabla_preserves_m", ok, at);
    }

    // (b) torsion-free: T^k_{ij} = Gamma^k_{ij} + (-1)^{(eps_i+1)(eps_j+1)} Gamma^k_{ji} = 0
    {
        bool ok = true;
        std::string at;
        for (int k = 0; k < d && ok; ++k)
            for (int i = 0; i < d && ok; ++i)
                for (int j = 0; j < d && ok; ++j) {
                    Element t =
                        add(ds.gamma.raised(k, i, j), neg_if(ds.gamma.raised(k, j, i), (eps[i] + 1) * (eps[j] + 1)));
                    if (!t.is_zero()) {
                        ok = false;
                        at = detail::index_tuple({k, i, j});
                    }
                }
        report.add("torsion_free", ok, at);
    }

    // (c) nabla_i omega~_{jk} = d_i omega~_{jk} - (-1)^{eps_i eps_j} Gamma_{j,ik}
    //                                          + (-1)^{eps_j eps_k + eps_i eps_k} Gamma_{k,ij} = 0
    {
        bool ok = true;
        std::string at;
        for (int i = 0; i < d && ok; ++i)
            for (int j = 0; j < d && ok; ++j)
                for (int k = 0; k < d && ok; ++k) {
                    Element e = deriv_left(ds.omega_tilde.at(j, k), Generator::x(i));
                    e = sub(e, neg_if(ds.lowered(j, i, k), eps[i] * eps[j]));
                    e = add(e, neg_if(ds.lowered(k, i, j), eps[j] * eps[k] + eps[i] * eps[k]));
                    if (!e.is_zero()) {
                        ok = false;
                        at = detail::index_tuple({i, j, k});
                    }
                }
        report.add("nabla_preserves_omega", ok, at);
    }

    // (d) d omega = 0, as a consistency corollary
    report.add("omega_closed", exterior_d(ds.omega_form).is_zero());

    // (e) Jacobi identity for omega^{ij}
    {
        bool ok = true;
        std::string at;
        for (int i = 0; i < d && ok; ++i)
            for (int j = 0; j < d && ok; ++j)
                for (int k = 0; k < d && ok; ++k) {
                    Element e = Element::zero(ctx);
                    const int idx[3][3] = {{i, j, k}, {j, k, i}, {k, i, j}};
                    for (const auto& t : idx) {
                        for (int n = 0; n < d; ++n) {
                            if (ds.omega_up.at(t[0], n).is_zero()) continue;
                            Element djk = deriv_left(ds.omega_up.at(t[1], t[2]), Generator::x(n));
                            if (djk.is_zero()) continue;
                            e = add(e, neg_if(mul(ds.omega_up.at(t[0], n), djk), eps[t[0]] * eps[t[2]]));
                        }
                    }
                    if (!e.is_zero()) {
                        ok = false;
                        at = detail::index_tuple({i, j, k});
                    }
                }
        report.add("poisson_jacobi", ok, at);
    }

    // (f) Abelian two-form checks
    if (ds.has_abelian) {
        bool skew = true;
        std::string at;
        for (int i = 0; i < d && skew; ++i)
            for (int j = 0; j < d && skew; ++j) {
                Element e = sub(ds.abelian_entries.at(i, j),
                                neg_if(ds.abelian_entries.at(j, i), (eps[i] + 1) * (eps[j] + 1)));
                if (!e.is_zero()) {
                    skew = false;
                    at = detail::index_tuple({i, j});
                }
            }
        report.add("abelian_skew", skew, at);
        report.add("abelian_closed", exterior_d(ds.abelian_form).is_zero());
        report.add("abelian_leading_zero", project_fedosov(ds.abelian_form, 0).is_zero());
    }
    return report;
}

// ---------------------------------------------------------------------------
// curvature
// ---------------------------------------------------------------------------

struct CurvatureData {
    ContextPtr ctx;
    std::vector<Element> riemann_up;   // R^n_{ijk}, indexed ((n*d+i)*d+j)*d+k
    std::vector<Element> riemann_pair; // R_{ij,kn}, indexed ((i*d+j)*d+k)*d+n
    Element hamiltonian;               // (1/4) y^n y^k c^j c^i R_{ij,kn}

    const Element& up(int n, int i, int j, int k) const {
        const int d = ctx->dim();
        return riemann_up[((n * d + i) * d + j) * d + k];
    }
    const Element& pair(int i, int j, int k, int n) const {
        const int d = ctx->dim();
        return riemann_pair[((i * d + j) * d + k) * d + n];
    }
    /// R_{ijk}^n, the index order used by the Bianchi identities.
    Element reindexed(int i, int j, int k, int n) const {
        const auto& eps = ctx->coords().parities;
        const int s = eps[k] * (eps[n] + 1) + eps[n] * (eps[i] + eps[j]);
        return s & 1 ? -up(n, i, j, k) : up(n, i, j, k);
    }
};

/// Riemann tensor of the chart connection in all index orderings used here,
/// plus the curvature Hamiltonian in A_{22}.
inline CurvatureData riemann(const GeometrySpec& spec, const DerivedStructures& ds) {
    const ContextPtr& ctx = ds.ctx;
    const int d = ctx->dim();
    const auto& eps = ctx->coords().parities;
    auto neg_if = [](Element e, int s) { return s & 1 ? -e : e; };

    CurvatureData curv;
    curv.ctx = ctx;
    curv.riemann_up.assign(d * d * d * d, Element::zero(ctx));

    // R^n_{ijk} = (-1)^{eps_n eps_i} d_i Gamma^n_{jk} + Gamma^n_{im} Gamma^m_{jk} - (-1)^{eps_i eps_j} (i<->j)
    auto half_term = [&](int n, int i, int j, int k) {
        Element e = neg_if(deriv_left(ds.gamma.raised(n, j, k), Generator::x(i)), eps[n] * eps[i]);
        for (int m = 0; m < d; ++m) {
            if (ds.gamma.raised(n, i, m).is_zero() || ds.gamma.raised(m, j, k).is_zero()) continue;
            e = add(e, mul(ds.gamma.raised(n, i, m), ds.gamma.raised(m, j, k)));
        }
        return e;
    };
    for (int n = 0; n < d; ++n)
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                for (int k = 0; k < d; ++k)
                    curv.riemann_up[((n * d + i) * d + j) * d + k] =
                        sub(half_term(n, i, j, k), neg_if(half_term(n, j, i, k), eps[i] * eps[j]));

    // R_{ij,kn} = R_{ijk}^m omega~_{mn}
    curv.riemann_pair.assign(d * d * d * d, Element::zero(ctx));
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            for (int k = 0; k < d; ++k)
                for (int n = 0; n < d; ++n) {
                    Element acc = Element::zero(ctx);
                    for (int m = 0; m < d; ++m) {
                        Element r = curv.reindexed(i, j, k, m);
                        if (r.is_zero() || ds.omega_tilde.at(m, n).is_zero()) continue;
                        acc = add(acc, mul(r, ds.omega_tilde.at(m, n)));
                    }
                    curv.riemann_pair[((i * d + j) * d + k) * d + n] = std::move(acc);
                }

    curv.hamiltonian = Element::zero(ctx);
    const Scalar quarter = Scalar(rational(1, 4));
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            for (int k = 0; k < d; ++k)
                for (int n = 0; n < d; ++n) {
                    const Element& r = curv.pair(i, j, k, n);
                    if (r.is_zero()) continue;
                    Element word = Element::from_word(
                        ctx, {Generator::y(n), Generator::y(k), Generator::c(j), Generator::c(i)}, quarter);
                    curv.hamiltonian = add(curv.hamiltonian, mul(word, r));
                }
    return curv;
}

// ---------------------------------------------------------------------------
// covariant derivative of a rank-4 covariant tensor (via fiber families)
// ---------------------------------------------------------------------------

namespace detail {

/// Encodes the lowered curvature tensor as the two-fiber-family element
///
///   E = sum_{i,j,m,n}  c^j c^i y_{(0)}^m y_{(1)}^n  B_{ij,mn} .
///
/// The antisymmetric pair rides on the one-form slots and the last two slots
/// stay polarized on independent fiber families, so nabla acting on E
/// produces exactly the graded cyclic combination of covariant derivatives
/// that the second Bianchi identity asserts to vanish.
inline Element encode_pair_tensor(const ContextPtr& two_family,
                                  const std::function<Element(int, int, int, int)>& component) {
    const int d = two_family->dim();
    Element out = Element::zero(two_family);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            for (int m = 0; m < d; ++m)
                for (int n = 0; n < d; ++n) {
                    Element comp = component(i, j, m, n);
                    if (comp.is_zero()) continue;
                    Element word = Element::from_word(two_family,
                                                      {Generator::c(j), Generator::c(i), Generator::y(m, 0),
                                                       Generator::y(n, 1)},
                                                      Scalar(1));
                    out = add(out, mul(word, to_context(comp, two_family)));
                }
    return out;
}

} // namespace detail

/// All checks on computed curvature: both Bianchi identities, delta- and
/// nabla-closedness of the Hamiltonian, the pair symmetry, and the operator
/// identity nabla^2 a = {R, a} on the supplied sample elements.
inline ValidationReport check_curvature(const GeometrySpec& spec, const DerivedStructures& ds,
                                        const CurvatureData& curv, const std::vector<Element>& samples = {}) {
    ValidationReport report;
    const ContextPtr& ctx = ds.ctx;
    const int d = ctx->dim();
    const auto& eps = ctx->coords().parities;
    auto neg_if = [](Element e, int s) { return s & 1 ? -e : e; };

    // first Bianchi: cyclic_{ijk} (-1)^{eps_i eps_k} R_{ijk}^n = 0
    {
        bool ok = true;
        std::string at;
        for (int i = 0; i < d && ok; ++i)
            for (int j = 0; j < d && ok; ++j)
                for (int k = 0; k < d && ok; ++k)
                    for (int n = 0; n < d && ok; ++n) {
                        Element e = neg_if(curv.reindexed(i, j, k, n), eps[i] * eps[k]);
                        e = add(e, neg_if(curv.reindexed(j, k, i, n), eps[j] * eps[i]));
                        e = add(e, neg_if(curv.reindexed(k, i, j, n), eps[k] * eps[j]));
                        if (!e.is_zero()) {
                            ok = false;
                            at = detail::index_tuple({i, j, k, n});
                        }
                    }
        report.add("first_bianchi", ok, at);
    }

    // pair symmetry R_{ij,kn} = (-1)^{eps_k eps_n} R_{ij,nk}
    {
        bool ok = true;
        std::string at;
        for (int i = 0; i < d && ok; ++i)
            for (int j = 0; j < d && ok; ++j)
                for (int k = 0; k < d && ok; ++k)
                    for (int n = 0; n < d && ok; ++n) {
                        Element e = sub(curv.pair(i, j, k, n), neg_if(curv.pair(i, j, n, k), eps[k] * eps[n]));
                        if (!e.is_zero()) {
                            ok = false;
                            at = detail::index_tuple({i, j, k, n});
                        }
                    }
        report.add("riemann_pair_symmetry", ok, at);
    }

    // second Bianchi: the graded cyclic sum of nabla_k R_{ij,mn} over (i,j,k)
    // vanishes.  Realized by letting the one-form connection act on the
    // two-family encoding of the lowered tensor: the three-form output packs
    // exactly that cyclic combination per polarized (m,n) slot pair.
    {
        ContextPtr two_fam = with_families(ctx, 2);
        Element encoded = detail::encode_pair_tensor(
            two_fam, [&](int a, int b, int c, int e) { return curv.pair(a, b, c, e); });
        ChristoffelField gamma_ext(two_fam,
                                   [&](int k, int i, int j) { return to_context(spec.gamma(k, i, j), two_fam); });
        Element cyc = nabla(encoded, gamma_ext);
        bool ok = cyc.is_zero();
        std::string at;
        if (!ok) {
            for (int m = 0; m < d && at.empty(); ++m)
                for (int n = 0; n < d && at.empty(); ++n) {
                    Element comp = deriv_left(deriv_left(cyc, Generator::y(m, 0)), Generator::y(n, 1));
                    if (!project_bidegree(comp, 3, 0).is_zero()) at = "slots " + detail::index_tuple({m, n});
                }
        }
        report.add("second_bianchi", ok, at);
    }

    report.add("curvature_delta_closed", delta(curv.hamiltonian).is_zero());
    report.add("curvature_nabla_closed", nabla(curv.hamiltonian, ds.gamma).is_zero());

    // nabla^2 a = {R, a} on samples
    {
        bool ok = true;
        std::string at;
        int idx = 0;
        for (const Element& a : samples) {
            Element lhs = nabla(nabla(a, ds.gamma), ds.gamma);
            Element rhs = poisson(curv.hamiltonian, a, ds.omega_up);
            if (!equal_as_series(lhs, rhs)) {
                ok = false;
                at = "sample " + std::to_string(idx);
                break;
            }
            ++idx;
        }
        report.add("nabla_squared_hamiltonian", ok, at);
    }
    return report;
}

} // namespace fedosov
