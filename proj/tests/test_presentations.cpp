#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "desing/presentations.hpp"

#include <algorithm>

using namespace desing;

namespace {

Poly P(const std::string& s) { return parse_poly(s); }

Presentation pres(MarkedSet m, std::map<VarName, int> exc = {}, std::vector<VarName> contact = {}) {
    Presentation p;
    p.marked = std::move(m);
    p.exc = std::move(exc);
    p.contact_vars = std::move(contact);
    return p;
}

bool contains(const MarkedSet& F, const Poly& h, const Rat& mu) {
    return std::any_of(F.begin(), F.end(), [&](const MarkedFn& f) { return f.h == h && f.mu == mu; });
}

// up to a nonzero constant
bool contains_scaled(const MarkedSet& F, const Poly& h, const Rat& mu) {
    return std::any_of(F.begin(), F.end(), [&](const MarkedFn& f) {
        return f.mu == mu && !f.h.is_zero() && normalize_scalar(f.h) == normalize_scalar(h);
    });
}

std::vector<std::set<VarName>> zeros(const std::vector<StratumSpec>& ss) {
    std::vector<std::set<VarName>> z;
    for (auto& s : ss) z.push_back(s.zero);
    return z;
}

const std::vector<VarName> XYZW{"x", "y", "z", "w"};
const StratumSpec O4 = StratumSpec::origin(XYZW);

}  // namespace

TEST_CASE("mu_min") {
    CHECK(*mu_min(pres({{P("x^2*y^3"), 3}, {P("w"), 1}}), O4) == 1);
    CHECK_FALSE(mu_min(pres({}), O4).has_value());
    CHECK(*mu_min(pres({{P("x^2*y^2"), 3}}), O4) == Rat(4, 3));
}

TEST_CASE("mu along a divisor") {
    CHECK(mu_along_divisor(pres({{P("x^2*y^2"), 3}}, {{"y", 2}}), "y", O4) == Rat(2, 3));
    CHECK(mu_along_divisor(pres({{P("w"), 1}}, {{"x", 1}}), "x", O4) == 0);
    CHECK(mu_along_divisor(pres({{P("x^2*y^3"), 2}, {P("x^4"), 2}}, {{"x", 1}}), "x", O4) == 1);
}

TEST_CASE("nu") {
    CHECK(*nu(pres({{P("x^3*y^4"), 5}}, {{"y", 2}, {"x", 3}}), O4) == 0);
    auto p = pres({{P("x^2*y^3"), 3}, {P("w"), 1}});
    CHECK(*nu(p, O4) == *mu_min(p, O4));
    CHECK(*nu(pres({{P("x^2*y^2"), 3}}, {{"y", 2}}), O4) == Rat(2, 3));
}

TEST_CASE("companion monomial") {
    auto D = companion(pres({{P("x^3*y^4*w^2"), 5}}, {{"x", 3}, {"y", 2}, {"w", 4}}), O4);
    CHECK(D == FracMono{{"x", Rat(3, 5)}, {"y", Rat(4, 5)}, {"w", Rat(2, 5)}});
    CHECK(companion(pres({{P("x^3"), 2}}), O4).empty());
    CHECK(companion(pres({{P("x^2"), 2}, {P("x^3"), 2}}, {{"x", 1}}), O4) == FracMono{{"x", Rat(1)}});
}

TEST_CASE("residual") {
    // nu = 1: nothing changes
    auto p1 = pres({{P("x^2*y^2"), 3}, {P("w"), 1}});
    auto r1 = residual(p1, O4);
    CHECK(r1.marked.size() == 2);
    CHECK(contains(r1.marked, P("x^2*y^2"), 3));
    CHECK(contains(r1.marked, P("w"), 1));
    // d = 3: {(x^2 y^2, 3)} with y exceptional gives {(x^2, 2), (y^2, 1)}
    auto r2 = residual(pres({{P("x^2*y^2"), 3}}, {{"y", 2}}), O4);
    CHECK(contains(r2.marked, P("x^2"), 2));
    CHECK(contains(r2.marked, P("y^2"), 1));
    CHECK(*mu_min(r2, O4) == 1);
    // nu = 0: the companion power alone
    auto r3 = residual(pres({{P("x^3*y^4"), 5}}, {{"x", 1}, {"y", 2}}), O4);
    REQUIRE(r3.marked.size() == 1);
    CHECK(r3.marked[0].h == P("x^3*y^4"));
    CHECK(r3.marked[0].mu == 5);
}

TEST_CASE("delta") {
    std::vector<VarName> z{"z"};
    auto d1 = delta({{P("z^2"), 2}}, {}, z);
    CHECK(d1.size() == 2);
    CHECK(contains(d1, P("z^2"), 1));
    CHECK(contains(d1, P("2*z"), 1));
    auto d2 = delta({{P("x*y^2"), 3}}, {}, {"x", "y"});
    CHECK(contains(d2, P("y^2"), 2));
    auto d3 = delta({{P("x^2*y"), 3}}, {"x"}, {"x", "y"});
    CHECK(contains(d3, P("x^2*y"), 2));
    CHECK(contains(d3, P("2*x^2*y"), 2));
    CHECK(contains(d3, P("x^2"), 2));
}

TEST_CASE("delta closure") {
    MarkedSet F{{P("z^3*w - x"), 2}};
    CHECK(delta_closure(F, 0, {}, XYZW) == F);
    auto c = delta_closure({{P("z^4"), 4}}, 3, {}, {"z"});
    CHECK(contains_scaled(c, P("z"), 1));
    auto c2 = delta_closure({{P("x*y^2"), 3}}, 2, {}, {"x", "y"});
    CHECK(contains_scaled(c2, P("x"), 1));
    CHECK(contains_scaled(c2, P("y"), 1));
}

TEST_CASE("find contact") {
    CHECK(find_contact(pres({{P("z^3 - x^2*y^3"), 3}}), O4) == "z");
    CHECK(find_contact(pres({{P("w"), 1}}), O4) == "w");
    CHECK_THROWS_AS(find_contact(pres({{P("x^2*y^2 - z^2*w^2"), 4}}, {{"x", 1}, {"y", 2}, {"z", 3}, {"w", 4}}), O4),
                    ContactNotFound);
}

TEST_CASE("descend") {
    auto q = descend(pres({{P("z^3 - x^2*y^3"), 3}}), "z", O4);
    CHECK(q.contact_vars == std::vector<VarName>{"z"});
    CHECK(contains_scaled(q.marked, P("x^2*y^3"), 3));
    auto e = descend(pres({{P("z"), 1}}), "z", O4);
    CHECK(e.marked.empty());
    auto s = descend(pres({{P("z^2 - x*y^2"), 2}}), "z", StratumSpec::origin({"x", "y", "z"}));
    CHECK(contains_scaled(s.marked, P("x*y^2"), 2));
    CHECK(contains_scaled(s.marked, P("y^2"), 1));
    CHECK(contains_scaled(s.marked, P("x*y"), 1));
}

TEST_CASE("transforms") {
    auto p = pres({{P("x^2*y^2"), 3}}, {{"w", 1}});
    Morphism line;
    line.kind = MorphismKind::ProductWithLine;
    line.new_var = "t";
    auto q = transform(p, line, "t");
    CHECK(q.marked == p.marked);
    CHECK(q.exc.size() == 2);

    Morphism b;
    b.kind = MorphismKind::AdmissibleBlowup;
    b.centre = {"x", "y"};
    b.chart_var = "x";
    auto r = transform(pres({{P("x^2*y^2"), 3}}), b, "x");
    CHECK(r.marked[0].h == P("x*y^2"));
    CHECK(r.marked[0].mu == 3);
    CHECK(r.exc.count("x"));

    Morphism e;
    e.kind = MorphismKind::ExceptionalBlowup;
    e.h0 = "x";
    e.h1 = "y";
    e.chart_var = "y";
    auto s = transform(pres({{P("x^2 + y^3"), 2}}, {{"x", 1}, {"y", 2}}), e, "y");
    CHECK(s.marked[0].h == P("x^2*y^2 + y^3"));
}

TEST_CASE("equimultiple strata") {
    auto st = equimultiple_strata(pres({{P("x^2*y^3*w^2"), 5}}), {"x", "y", "w"});
    CHECK(zeros(st) == std::vector<std::set<VarName>>{{"w", "y"}, {"x", "y"}});
    auto full = equimultiple_strata(pres({}), {"x", "y"});
    REQUIRE(full.size() == 1);
    CHECK(full[0].zero.empty());
    // D^1 = x^(3/5) y^(4/5) w^(2/5) as the mark-5 monomial x^3 y^4 w^2
    auto c = equimultiple_strata(pres({{P("x^3*y^4*w^2"), 5}}), {"x", "y", "w"});
    CHECK(zeros(c) == std::vector<std::set<VarName>>{{"w", "x"}, {"w", "y"}, {"x", "y"}});
    CHECK_THROWS_AS(equimultiple_strata(pres({{P("x + y + w"), 1}}), {"x", "y", "w"}), UnsupportedInput);
}

TEST_CASE("equivalence refuter") {
    std::vector<VarName> v{"x", "y", "z"};
    auto p = pres({{P("z^2 - x*y^2"), 2}});
    std::set<MorphismKind> all{MorphismKind::AdmissibleBlowup, MorphismKind::ProductWithLine,
                               MorphismKind::ExceptionalBlowup};
    CHECK_FALSE(equivalence_refute(p, p, v, 2, all).witness);
    // Corollary 5.10 pair: P against P with first derivatives adjoined
    auto aug = pres(derivative_augment(p.marked, v));
    CHECK_FALSE(equivalence_refute(p, aug, v, 2, all).witness);
    // a genuinely different pair is refuted at once
    auto other = pres({{P("z^2 - x*y"), 2}});
    CHECK(equivalence_refute(p, other, v, 1, all).witness);
}
