#pragma once

#include "fedosov/calculus.hpp"
#include "fedosov/element.hpp"
#include "fedosov/sampling.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <vector>

namespace ft {

using namespace fedosov;

inline ContextPtr even2(int dmax = 8, int jet = 8) {
    return make_context(CoordinateSystem::make({"x1", "x2"}, {0, 0}), TruncationContext{dmax, jet});
}

inline ContextPtr odd1(int dmax = 8, int jet = 8) {
    return make_context(CoordinateSystem::make({"theta"}, {1}), TruncationContext{dmax, jet});
}

inline ContextPtr odd2(int dmax = 8, int jet = 8) {
    return make_context(CoordinateSystem::make({"th1", "th2"}, {1, 1}), TruncationContext{dmax, jet});
}

inline ContextPtr mixed3(int dmax = 8, int jet = 8) {
    return make_context(CoordinateSystem::make({"x1", "x2", "theta"}, {0, 0, 1}), TruncationContext{dmax, jet});
}

inline Element word(const ContextPtr& ctx, std::initializer_list<Generator> gens, long num = 1, long den = 1) {
    return Element::from_word(ctx, std::vector<Generator>(gens), Scalar(rational(num, den)));
}

/// Random single-monomial element (homogeneous in every grading).
inline Element random_monomial(const ContextPtr& ctx, SampleRng& rng, int max_len = 4) {
    const int d = ctx->dim();
    std::vector<Generator> w;
    const int len = static_cast<int>(rng.next(max_len + 1));
    for (int s = 0; s < len; ++s) {
        switch (rng.next(4)) {
            case 0: w.push_back(Generator::hbar()); break;
            case 1: w.push_back(Generator::x(static_cast<int>(rng.next(d)))); break;
            case 2: w.push_back(Generator::c(static_cast<int>(rng.next(d)))); break;
            default: w.push_back(Generator::y(static_cast<int>(rng.next(d)))); break;
        }
    }
    return Element::from_word(ctx, w, rng.next_scalar());
}

} // namespace ft

using namespace ft;
