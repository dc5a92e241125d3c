#pragma once

#include "support.hpp"

#include "fedosov/geometry.hpp"

namespace ft {

using namespace fedosov;

/// Flat Weyl chart: two even coordinates, m = ((0,1),(-1,0)), Gamma = 0.
inline GeometrySpec flat_weyl(int dmax = 8, int jet = 8) {
    CoordinateSystem cs = CoordinateSystem::make({"x1", "x2"}, {0, 0});
    auto ctx = make_context(cs, TruncationContext{dmax, jet});
    auto m = [ctx](int i, int j) {
        if (i == 0 && j == 1) return Element::unit(ctx);
        if (i == 1 && j == 0) return -Element::unit(ctx);
        return Element::zero(ctx);
    };
    auto gamma = [ctx](int, int, int) { return Element::zero(ctx); };
    return GeometrySpec(cs, TruncationContext{dmax, jet}, m, gamma);
}

/// Wick-type flat chart: m = ((1,1),(-1,1)) with nonzero symmetric part.
inline GeometrySpec flat_wick(int dmax = 8, int jet = 8) {
    CoordinateSystem cs = CoordinateSystem::make({"x1", "x2"}, {0, 0});
    auto ctx = make_context(cs, TruncationContext{dmax, jet});
    auto m = [ctx](int i, int j) {
        if (i == 1 && j == 0) return -Element::unit(ctx);
        return Element::unit(ctx);
    };
    auto gamma = [ctx](int, int, int) { return Element::zero(ctx); };
    return GeometrySpec(cs, TruncationContext{dmax, jet}, m, gamma);
}

/// Single odd coordinate with m = (1): the Clifford chart.
inline GeometrySpec flat_odd(int dmax = 8, int jet = 8) {
    CoordinateSystem cs = CoordinateSystem::make({"theta"}, {1});
    auto ctx = make_context(cs, TruncationContext{dmax, jet});
    auto m = [ctx](int, int) { return Element::unit(ctx); };
    auto gamma = [ctx](int, int, int) { return Element::zero(ctx); };
    return GeometrySpec(cs, TruncationContext{dmax, jet}, m, gamma);
}

/// hbar-scaled Weyl chart: m = (1+hbar)((0,1),(-1,0)).
inline GeometrySpec flat_hbar_scaled(int dmax = 8, int jet = 8) {
    CoordinateSystem cs = CoordinateSystem::make({"x1", "x2"}, {0, 0});
    auto ctx = make_context(cs, TruncationContext{dmax, jet});
    auto m = [ctx](int i, int j) {
        Element f = add(Element::unit(ctx), Element::hbar(ctx));
        if (i == 0 && j == 1) return f;
        if (i == 1 && j == 0) return -f;
        return Element::zero(ctx);
    };
    auto gamma = [ctx](int, int, int) { return Element::zero(ctx); };
    return GeometrySpec(cs, TruncationContext{dmax, jet}, m, gamma);
}

/// Curved even chart: constant omega, totally symmetric lowered Christoffel
/// Gamma_{1,12} = Gamma_{1,21} = Gamma_{2,11} = x1 (all other components
/// zero), raised to Gamma^1_{11} = x1, Gamma^2_{12} = Gamma^2_{21} = -x1.
/// The antisymmetrized derivative makes the curvature nonzero.
inline GeometrySpec curved_even(int dmax = 6, int jet = 8, bool with_abelian = false) {
    CoordinateSystem cs = CoordinateSystem::make({"x1", "x2"}, {0, 0});
    auto ctx = make_context(cs, TruncationContext{dmax, jet});
    auto m = [ctx](int i, int j) {
        if (i == 0 && j == 1) return Element::unit(ctx);
        if (i == 1 && j == 0) return -Element::unit(ctx);
        return Element::zero(ctx);
    };
    auto gamma = [ctx](int k, int i, int j) {
        if (k == 0 && i == 0 && j == 0) return Element::x(ctx, 0);
        if (k == 1 && ((i == 0 && j == 1) || (i == 1 && j == 0))) return -Element::x(ctx, 0);
        return Element::zero(ctx);
    };
    if (!with_abelian) return GeometrySpec(cs, TruncationContext{dmax, jet}, m, gamma);
    // admissible Abelian two-form: hbar times a constant two-form
    GeometrySpec::EntryFn abelian = [ctx](int i, int j) {
        if (i == 0 && j == 1) return Element::hbar(ctx);
        if (i == 1 && j == 0) return -Element::hbar(ctx);
        return Element::zero(ctx);
    };
    return GeometrySpec(cs, TruncationContext{dmax, jet}, m, gamma, &abelian);
}

/// Super curved chart: two even + one odd coordinate, constant omega with an
/// odd-odd block, and a Christoffel field curving both sectors:
///   lowered  Gamma_{1,12} = Gamma_{1,21} = Gamma_{2,11} = x1   (even family)
///   lowered  Gamma_{theta,11} = Gamma_{1,1theta} = Gamma_{1,theta1} = theta,
/// raised to Gamma^1_{11} = x1, Gamma^2_{12} = Gamma^2_{21} = -x1,
///           Gamma^theta_{11} = theta, Gamma^2_{1theta} = theta,
///           Gamma^2_{theta1} = -theta.
inline GeometrySpec curved_super(int dmax = 6, int jet = 8) {
    CoordinateSystem cs = CoordinateSystem::make({"x1", "x2", "theta"}, {0, 0, 1});
    auto ctx = make_context(cs, TruncationContext{dmax, jet});
    auto m = [ctx](int i, int j) {
        if (i == 0 && j == 1) return Element::unit(ctx);
        if (i == 1 && j == 0) return -Element::unit(ctx);
        if (i == 2 && j == 2) return Element::unit(ctx);
        return Element::zero(ctx);
    };
    auto gamma = [ctx](int k, int i, int j) {
        Element theta = Element::x(ctx, 2);
        if (k == 0 && i == 0 && j == 0) return Element::x(ctx, 0);
        if (k == 1 && ((i == 0 && j == 1) || (i == 1 && j == 0))) return -Element::x(ctx, 0);
        if (k == 2 && i == 0 && j == 0) return theta;
        if (k == 1 && i == 0 && j == 2) return theta;
        if (k == 1 && i == 2 && j == 0) return -theta;
        return Element::zero(ctx);
    };
    return GeometrySpec(cs, TruncationContext{dmax, jet}, m, gamma);
}

inline std::vector<Element> curvature_samples(const ContextPtr& ctx, std::uint64_t seed, int count) {
    SampleRng rng(seed);
    std::vector<Element> out;
    ElementSampleOptions opt;
    opt.max_hbar_power = 1;
    for (int t = 0; t < count; ++t) out.push_back(random_element(ctx, rng, opt));
    return out;
}

} // namespace ft
