#pragma once

#include "fedosov/element.hpp"

#include <cstdint>
#include <random>

namespace fedosov {

/// Deterministic sample source.  All draws go through modulo reduction of
/// mt19937_64 output, which is bit-stable across platforms.
class SampleRng {
public:
    explicit SampleRng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next(std::uint64_t bound) { return gen_() % bound; }
    long next_int(long lo, long hi) { return lo + static_cast<long>(next(static_cast<std::uint64_t>(hi - lo + 1))); }

    Scalar next_scalar(bool allow_imaginary = true) {
        long num = next_int(-5, 5);
        if (num == 0) num = 1;
        const long den = next_int(1, 3);
        if (allow_imaginary && next(4) == 0) return Scalar(rational(0), rational(num, den));
        return Scalar(rational(num, den));
    }

private:
    std::mt19937_64 gen_;
};

/// Random polynomial symbol: a function of x and (optionally) hbar.
inline Element random_symbol(const ContextPtr& ctx, SampleRng& rng, int max_x_degree, int max_hbar_power = 0,
                             int terms = 4) {
    Element out = Element::zero(ctx);
    const int d = ctx->dim();
    for (int t = 0; t < terms; ++t) {
        Monomial m(ctx->width());
        int budget = static_cast<int>(rng.next(static_cast<std::uint64_t>(max_x_degree + 1)));
        for (int step = 0; step < budget; ++step) {
            const int i = static_cast<int>(rng.next(d));
            const int pos = ctx->position(Generator::x(i));
            if (ctx->self_annihilating_at(pos) && m.exponent(pos) >= 1) continue;
            m.set_exponent(pos, m.exponent(pos) + 1);
        }
        if (max_hbar_power > 0) {
            const int h = static_cast<int>(rng.next(static_cast<std::uint64_t>(max_hbar_power + 1)));
            m.set_exponent(0, h);
        }
        out.insert_term(std::move(m), rng.next_scalar());
    }
    return out;
}

struct ElementSampleOptions {
    int terms = 5;
    int max_x_degree = 2;
    int max_y_degree = 3;
    int max_c_degree = 2;
    int max_hbar_power = 1;
    bool allow_c = true;
    bool allow_y = true;
};

/// Random element of the full algebra within the ambient truncation.
inline Element random_element(const ContextPtr& ctx, SampleRng& rng, const ElementSampleOptions& opt = {}) {
    Element out = Element::zero(ctx);
    const int d = ctx->dim();
    for (int t = 0; t < opt.terms; ++t) {
        Monomial m(ctx->width());
        auto bump = [&](const Generator& g) {
            const int pos = ctx->position(g);
            if (ctx->self_annihilating_at(pos) && m.exponent(pos) >= 1) return;
            m.set_exponent(pos, m.exponent(pos) + 1);
        };
        const int nx = static_cast<int>(rng.next(opt.max_x_degree + 1));
        for (int s = 0; s < nx; ++s) bump(Generator::x(static_cast<int>(rng.next(d))));
        if (opt.allow_c) {
            const int nc = static_cast<int>(rng.next(opt.max_c_degree + 1));
            for (int s = 0; s < nc; ++s) bump(Generator::c(static_cast<int>(rng.next(d))));
        }
        if (opt.allow_y) {
            const int ny = static_cast<int>(rng.next(opt.max_y_degree + 1));
            for (int s = 0; s < ny; ++s) bump(Generator::y(static_cast<int>(rng.next(d))));
        }
        m.set_exponent(0, static_cast<int>(rng.next(opt.max_hbar_power + 1)));
        if (m.fedosov_degree(*ctx) > ctx->max_degree()) m.set_exponent(0, 0);
        out.insert_term(std::move(m), rng.next_scalar());
    }
    return out;
}

/// Random element homogeneous in form degree (needed by graded Leibniz
/// properties); may return zero when the draw collapses.
inline Element random_form_homogeneous(const ContextPtr& ctx, SampleRng& rng, int form_degree,
                                       const ElementSampleOptions& opt = {}) {
    Element e = random_element(ctx, rng, opt);
    Element out(ctx, e.validity());
    for (const auto& [mono, coef] : e.terms())
        if (mono.form_degree(*ctx) == form_degree) out.insert_term(mono, coef);
    return out;
}

} // namespace fedosov
