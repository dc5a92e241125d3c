#include "support.hpp"

#include "fedosov/moyal.hpp"

using namespace fedosov;

namespace {

ElementMatrix weyl_m(const ContextPtr& ctx) {
    ElementMatrix m(ctx, 2);
    m.at(0, 1) = Element::unit(ctx);
    m.at(1, 0) = -Element::unit(ctx);
    return m;
}

ElementMatrix clifford_m(const ContextPtr& ctx) {
    ElementMatrix m(ctx, ctx->dim());
    for (int i = 0; i < ctx->dim(); ++i) m.at(i, i) = Element::unit(ctx);
    return m;
}

ElementMatrix mixed_m(const ContextPtr& ctx) {
    ElementMatrix m(ctx, 3);
    m.at(0, 1) = Element::unit(ctx);
    m.at(1, 0) = -Element::unit(ctx);
    m.at(2, 2) = Element::unit(ctx);
    return m;
}

/// First-order term of the product, straight from the triple-product form.
Element t1_direct(const Element& a, const Element& b, const ElementMatrix& m) {
    const ContextPtr& ctx = a.context();
    Element out = Element::zero(ctx, min_validity(a.validity(), b.validity()));
    const Scalar half_i = Scalar(Rational(0), rational(1, 2));
    for (int j = 0; j < ctx->dim(); ++j)
        for (int k = 0; k < ctx->dim(); ++k) {
            if (m.at(j, k).is_zero()) continue;
            Element weight = scale(mul(Element::hbar(ctx), m.at(j, k)), half_i);
            Element term = mul(mul(deriv_right(a, Generator::y(j)), weight), deriv_left(b, Generator::y(k)));
            out = add(out, term);
        }
    return out;
}

Element bounded_sample(const ContextPtr& ctx, SampleRng& rng, int max_deg) {
    ElementSampleOptions opt;
    opt.max_y_degree = 3;
    opt.max_hbar_power = 1;
    return truncate_degree(random_element(ctx, rng, opt), max_deg);
}

} // namespace

TEST_CASE("circ basics", "[moyal]") {
    auto ctx = even2();
    CircOperator op(ctx, weyl_m(ctx));
    SECTION("unit laws") {
        SampleRng rng(3);
        for (int t = 0; t < 10; ++t) {
            Element a = random_element(ctx, rng);
            CHECK(op.circ(a, Element::unit(ctx)) == a);
            CHECK(op.circ(Element::unit(ctx), a) == a);
        }
    }
    SECTION("canonical pair") {
        Element expect = add(mul(Element::y(ctx, 0), Element::y(ctx, 1)),
                             scale(Element::hbar(ctx), Scalar(Rational(0), rational(1, 2))));
        CHECK(op.circ(Element::y(ctx, 0), Element::y(ctx, 1)) == expect);
    }
    SECTION("first order matches the triple-product form") {
        // on entries with at most one fiber factor the series stops at T_1
        SampleRng rng(101);
        ElementSampleOptions opt;
        opt.max_y_degree = 1;
        opt.max_hbar_power = 1;
        for (int t = 0; t < 30; ++t) {
            Element a = random_element(ctx, rng, opt);
            Element b = random_element(ctx, rng, opt);
            CHECK(op.circ(a, b) == add(mul(a, b), t1_direct(a, b, weyl_m(ctx))));
        }
    }
}

TEST_CASE("circ on odd coordinates", "[moyal]") {
    SECTION("clifford square") {
        auto ctx = odd1();
        CircOperator op(ctx, clifford_m(ctx));
        Element expect = scale(Element::hbar(ctx), Scalar(Rational(0), rational(1, 2)));
        CHECK(op.circ(Element::y(ctx, 0), Element::y(ctx, 0)) == expect);
    }
    SECTION("first order triple product, mixed parities") {
        auto ctx = mixed3();
        CircOperator op(ctx, mixed_m(ctx));
        SampleRng rng(103);
        ElementSampleOptions opt;
        opt.max_y_degree = 1;
        opt.max_hbar_power = 0;
        for (int t = 0; t < 40; ++t) {
            Element a = random_element(ctx, rng, opt);
            Element b = random_element(ctx, rng, opt);
            CHECK(op.circ(a, b) == add(mul(a, b), t1_direct(a, b, mixed_m(ctx))));
        }
    }
}

TEST_CASE("circ associativity", "[moyal]") {
    auto check_assoc = [](const ContextPtr& ctx, const ElementMatrix& m, int trials, std::uint64_t seed) {
        CircOperator op(ctx, m);
        SampleRng rng(seed);
        for (int t = 0; t < trials; ++t) {
            Element a = bounded_sample(ctx, rng, ctx->max_degree());
            Element b = bounded_sample(ctx, rng, ctx->max_degree());
            Element c = bounded_sample(ctx, rng, ctx->max_degree());
            CHECK(op.circ(op.circ(a, b), c) == op.circ(a, op.circ(b, c)));
        }
    };
    SECTION("even Weyl chart") {
        auto ctx = even2();
        check_assoc(ctx, weyl_m(ctx), 15, 11);
    }
    SECTION("two odd coordinates") {
        auto ctx = odd2();
        check_assoc(ctx, clifford_m(ctx), 15, 13);
    }
    SECTION("mixed chart") {
        auto ctx = mixed3();
        check_assoc(ctx, mixed_m(ctx), 15, 17);
    }
    SECTION("x-dependent tensor") {
        auto ctx = even2();
        ElementMatrix m(ctx, 2);
        Element f = add(Element::unit(ctx), Element::x(ctx, 0));
        m.at(0, 1) = f;
        m.at(1, 0) = -f;
        check_assoc(ctx, m, 10, 19);
    }
    SECTION("hbar-dependent tensor") {
        auto ctx = even2();
        ElementMatrix m(ctx, 2);
        Element f = add(Element::unit(ctx), Element::hbar(ctx));
        m.at(0, 1) = f;
        m.at(1, 0) = -f;
        check_assoc(ctx, m, 10, 23);
    }
}

TEST_CASE("circ gradings", "[moyal]") {
    auto ctx = mixed3();
    CircOperator op(ctx, mixed_m(ctx));
    SampleRng rng(29);
    for (int t = 0; t < 60; ++t) {
        Element a = ft::random_monomial(ctx, rng, 3);
        Element b = ft::random_monomial(ctx, rng, 3);
        Element p = op.circ(a, b);
        if (a.is_zero() || b.is_zero() || p.is_zero()) continue;
        auto ga = gradings(a), gb = gradings(b), gp = gradings(p);
        // deg(a o b) >= deg a + deg b; parity and form degree are additive
        for (const auto& term : gp.terms) CHECK(term.fedosov_degree >= *ga.fedosov_degree + *gb.fedosov_degree);
        CHECK(*gp.parity == ((*ga.parity + *gb.parity) & 1));
        CHECK(*gp.form_degree == *ga.form_degree + *gb.form_degree);
    }
}

TEST_CASE("circ commutator", "[moyal]") {
    auto ctx = even2();
    CircOperator op(ctx, weyl_m(ctx));
    SECTION("unit is central") {
        SampleRng rng(31);
        Element a = random_element(ctx, rng);
        CHECK(op.commutator(Element::unit(ctx), a).is_zero());
        CHECK(op.commutator(a, Element::unit(ctx)).is_zero());
    }
    SECTION("canonical commutator") {
        Element expect = scale(Element::hbar(ctx), Scalar::i());
        CHECK(op.commutator(Element::y(ctx, 0), Element::y(ctx, 1)) == expect);
    }
    SECTION("every term carries hbar") {
        auto m3 = mixed3();
        CircOperator op3(m3, mixed_m(m3));
        SampleRng rng(37);
        for (int t = 0; t < 25; ++t) {
            Element a = random_element(m3, rng);
            Element b = random_element(m3, rng);
            Element comm = op3.commutator(a, b);
            for (const auto& [mono, coef] : comm.terms()) {
                (void)coef;
                CHECK(mono.hbar_power() >= 1);
            }
            if (!comm.is_zero()) CHECK(!div_ihbar(comm).is_zero());
        }
    }
    SECTION("commutator equals i hbar Poisson bracket on low fiber degree") {
        SampleRng rng(41);
        ElementSampleOptions opt;
        opt.max_y_degree = 2;
        opt.max_hbar_power = 0;
        opt.max_c_degree = 1;
        for (int t = 0; t < 25; ++t) {
            Element a = truncate_degree(random_element(ctx, rng, opt), ctx->max_degree() - 4);
            Element b = truncate_degree(random_element(ctx, rng, opt), ctx->max_degree() - 4);
            Element lhs = op.commutator(a, b);
            if (!lhs.is_zero())
                CHECK(div_ihbar(lhs) == poisson(a, b, weyl_m(ctx)));
            else
                CHECK(poisson(a, b, weyl_m(ctx)).is_zero());
        }
    }
    SECTION("graded Jacobi identity") {
        auto m3 = mixed3();
        CircOperator op3(m3, mixed_m(m3));
        SampleRng rng(43);
        for (int t = 0; t < 20; ++t) {
            Element a = ft::random_monomial(m3, rng, 3);
            Element b = ft::random_monomial(m3, rng, 3);
            Element c = ft::random_monomial(m3, rng, 3);
            if (a.is_zero() || b.is_zero() || c.is_zero()) continue;
            const auto& am = a.terms().begin()->first;
            const auto& bm = b.terms().begin()->first;
            const int sign = (am.parity(*m3) * bm.parity(*m3) +
                              (am.form_degree(*m3) & 1) * (bm.form_degree(*m3) & 1)) &
                             1;
            Element lhs = op3.commutator(a, op3.commutator(b, c));
            Element rhs = add(op3.commutator(op3.commutator(a, b), c),
                              sign ? -op3.commutator(b, op3.commutator(a, c))
                                   : op3.commutator(b, op3.commutator(a, c)));
            CHECK(lhs == rhs);
        }
    }
}

TEST_CASE("delta respects circ", "[moyal]") {
    auto m3 = mixed3(16);
    CircOperator op(m3, mixed_m(m3));
    SampleRng rng(47);
    for (int t = 0; t < 30; ++t) {
        const int p = static_cast<int>(rng.next(3));
        Element a = truncate_degree(random_form_homogeneous(m3, rng, p), 6);
        Element b = truncate_degree(random_element(m3, rng), 6);
        if (a.is_zero()) continue;
        Element lhs = delta(op.circ(a, b));
        Element rhs = add(op.circ(delta(a), b), (p & 1) ? -op.circ(a, delta(b)) : op.circ(a, delta(b)));
        CHECK(lhs == rhs);
    }
}

TEST_CASE("division by i hbar", "[moyal]") {
    auto ctx = even2();
    SECTION("examples") {
        Element ihy = scale(mul(Element::hbar(ctx), Element::y(ctx, 0)), Scalar::i());
        CHECK(div_ihbar(ihy) == Element::y(ctx, 0));
        Element h2c = mul(Element::hbar(ctx), mul(Element::hbar(ctx), Element::c(ctx, 0)));
        Element expect = scale(mul(Element::hbar(ctx), Element::c(ctx, 0)), Scalar(Rational(0), Rational(-1)));
        CHECK(div_ihbar(h2c) == expect);
    }
    SECTION("precondition violation") {
        CHECK_THROWS_AS(div_ihbar(Element::y(ctx, 0)), HbarDivisionError);
    }
    SECTION("inverse of multiplication by i hbar") {
        SampleRng rng(53);
        for (int t = 0; t < 20; ++t) {
            Element a = truncate_degree(random_element(ctx, rng), ctx->max_degree() - 2);
            Element ih = scale(Element::hbar(ctx), Scalar::i());
            CHECK(div_ihbar(mul(ih, a)) == a);
        }
    }
}
