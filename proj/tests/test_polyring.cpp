#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "desing/polyring.hpp"

#include <random>

using namespace desing;

namespace {

Poly P(const std::string& s) { return parse_poly(s); }

// order estimated by plugging random nonzero rationals into the generic variables
ExtNat sampled_order(const Poly& p, const std::vector<VarName>& vars, const std::set<VarName>& zero, std::mt19937& rng) {
    std::uniform_int_distribution<int> num(1, 97), den(1, 13);
    ExtNat best = ExtNat::infinity();
    for (int trial = 0; trial < 20; ++trial) {
        Poly q = p;
        for (auto& v : vars)
            if (!zero.count(v)) q = substitute(q, v, Poly(Rat(num(rng), den(rng))));
        if (q.is_zero()) continue;
        ExtNat o = ExtNat::of(min_degree(q));
        if (o < best) best = o;
    }
    return best;
}

Poly random_binomial(std::mt19937& rng, const std::vector<VarName>& vars, int maxe = 3) {
    std::uniform_int_distribution<int> e(0, maxe), c(-5, 5);
    Poly p;
    for (int t = 0; t < 2; ++t) {
        ExpVec m;
        for (auto& v : vars)
            if (long k = e(rng)) m[v] = k;
        int k = c(rng);
        p = p + Poly::monomial(m, k == 0 ? 1 : k);
    }
    return p;
}

}  // namespace

TEST_CASE("add and mul") {
    CHECK(P("x") + P("-x") == Poly());
    CHECK((P("z^2 - x*y^2") * Poly(1)) == P("z^2 - x*y^2"));
    CHECK((P("z - x") * P("z + x")) == P("z^2 - x^2"));
}

TEST_CASE("order at strata") {
    std::vector<VarName> v4{"x", "y", "z", "w"};
    CHECK(order_at_stratum(P("z^2*w - x*y^2"), StratumSpec::origin(v4)) == ExtNat::of(3));
    CHECK(order_at_stratum(Poly(), StratumSpec::origin(v4)).inf);
    std::vector<VarName> v3{"x", "y", "z"};
    auto p = P("z^2 - x^2*y^3");
    CHECK(order_at_stratum(p, StratumSpec::with_zero(v3, {"y", "z"})) == ExtNat::of(2));
    std::mt19937 rng(7);
    CHECK(sampled_order(p, v3, {"y", "z"}, rng) == ExtNat::of(2));
}

TEST_CASE("order along") {
    CHECK(order_along(P("z^2 - x^2*y^3"), {"z", "x"}) == ExtNat::of(2));
    auto g = P("z^3*w^2 - x^2*y^3");
    CHECK(order_along(g, {"x", "y", "z", "w"}) == ExtNat::of(min_degree(g)));
    // z^d - x^(d-1) y^d along z = 0: the second term does not vanish there
    CHECK(order_along(P("z^5 - x^4*y^5"), {"z"}) == ExtNat::of(0));
}

TEST_CASE("derivatives") {
    CHECK(diff(P("z^5"), "z") == P("5*z^4"));
    CHECK(logdiff(P("x^3*y"), "x") == P("3*x^3*y"));
    CHECK(diff(P("z^2*w - x*y^2"), "w") == P("z^2"));
}

TEST_CASE("blowup substitution") {
    std::set<VarName> all{"x", "y", "z", "w"};
    auto g0 = P("z^2*w - x*y^2");
    CHECK(blowup_subst(g0, all, "w") == P("z^2*w^3 - x*y^2*w^3"));
    CHECK(blowup_subst(g0, {"w"}, "w") == g0);
    CHECK(blowup_subst(P("z^2 - x*y^2"), all, "y") == P("y^2*z^2 - x*y^3"));
}

TEST_CASE("divide by exceptional power") {
    CHECK(divide_exc(P("z^2*w^3 - x*y^2*w^3"), "w", 3) == P("z^2 - x*y^2"));
    CHECK(divide_exc(P("z^2 - x*y^2"), "w", 0) == P("z^2 - x*y^2"));
    CHECK_THROWS_AS(divide_exc(P("z^2 - x*y^2"), "w", 1), NotDivisible);
}

TEST_CASE("monomial content") {
    CHECK(mono_content({P("x^2*y^3 - x^2*y^5*z")}, {"x", "y"}) == ExpVec{{"x", 2}, {"y", 3}});
    CHECK(mono_content({Poly(1)}, {"x"}).empty());
    CHECK(mono_content({P("x^3*y^4")}, {"x", "y"}) == ExpVec{{"x", 3}, {"y", 4}});
}

TEST_CASE("restriction") {
    CHECK(restrict(P("z^5 - x^4*y^5"), {"z"}) == P("-x^4*y^5"));
    CHECK(restrict(P("x*y + y^2"), {}) == P("x*y + y^2"));
    CHECK(restrict(P("x*y + y^2"), {"x", "y"}) == Poly());
}

TEST_CASE("parser") {
    CHECK(P("1/2*x*y^2 - 3") == scale(P("x*y^2 - 6"), Rat(1, 2)));
    CHECK(P("2 x y") == P("2*x*y"));
    CHECK_THROWS_AS(P("x^"), ParseError);
    CHECK_THROWS_AS(P("x + * y"), ParseError);
}

TEST_CASE("random-point oracle on binomials") {
    std::mt19937 rng(11);
    std::vector<VarName> vars{"a", "b", "c", "e", "f"};
    for (int k = 0; k < 100; ++k) {
        size_t n = 2 + k % 4;
        std::vector<VarName> vs(vars.begin(), vars.begin() + n);
        Poly p = random_binomial(rng, vs);
        for (unsigned mask = 0; mask < (1u << n); ++mask) {
            std::set<VarName> zero;
            for (size_t i = 0; i < n; ++i)
                if (mask >> i & 1) zero.insert(vs[i]);
            INFO(to_string(p), " at ", StratumSpec::with_zero(vs, zero).str());
            CHECK(order_at_stratum(p, StratumSpec::with_zero(vs, zero)) == sampled_order(p, vs, zero, rng));
        }
    }
}

TEST_CASE("Leibniz and order additivity") {
    std::mt19937 rng(3);
    std::vector<VarName> vs{"x", "y", "z"};
    for (int k = 0; k < 100; ++k) {
        Poly p = random_binomial(rng, vs), q = random_binomial(rng, vs);
        for (auto& v : vs) CHECK(diff(p * q, v) == diff(p, v) * q + p * diff(q, v));
        if (!p.is_zero() && !q.is_zero()) CHECK(min_degree(p * q) == min_degree(p) + min_degree(q));
    }
}
