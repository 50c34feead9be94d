#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "desing/cli.hpp"

using namespace desing;

namespace {

const std::vector<VarName> VARS{"x", "y", "w", "z"};

std::vector<Poly> family(long d) {
    auto s = [](long k) { return std::to_string(k); };
    return {parse_poly("z^" + s(d) + "*w^" + s(d - 1) + " - x^" + s(d - 1) + "*y^" + s(d))};
}

BranchRun branch(long d, const std::string& path, Variant v = Variant::BM) {
    auto br = follow_branch(family(d), VARS, path, v, d, false);
    REQUIRE(br.error.empty());
    return br;
}

std::set<VarName> all_vars() { return {VARS.begin(), VARS.end()}; }

InvValue inv_at(const BranchRun& br, Variant v, const std::set<VarName>& zero) {
    InvEngine eng(br.tower, v);
    return eng.at(br.lineage.back(), zero).value.base;
}

InvValue V(const std::string& s) { return InvValue::parse(s); }

}  // namespace

TEST_CASE("year-one U_w origin") {
    for (long d : {2, 3, 5, 7}) {
        auto br = branch(d, "w");
        auto want = "(" + std::to_string(d) + ",1; 1,0; " + rat_str(Rat(2 * d - 1, d)) + ",0; 1,0; inf)";
        CHECK(inv_at(br, Variant::BM, all_vars()) == V(want));
    }
}

TEST_CASE("year-four value in V") {
    for (long d : {4, 5, 6}) {
        auto br = branch(d, "wyxw");
        CHECK(inv_at(br, Variant::BM, all_vars()) == V("(" + std::to_string(d) + ",0; 0)"));
    }
    auto bv = branch(5, "wyxw", Variant::V);
    CHECK(inv_at(bv, Variant::V, all_vars()) == V("(5,0; 9/5,3; 1,0; 1,0; inf)"));
}

TEST_CASE("print and parse") {
    auto v = V("(3,1; 1,0; 5/3,0; 1,0; inf)");
    CHECK(v.str() == "(3,1; 1,0; 5/3,0; 1,0; inf)");
    CHECK(V(v.str()) == v);
    CHECK(V("(5,0; 0)").terminal == Terminal::Zero);
}

TEST_CASE("lexicographic comparison") {
    CHECK(compare(V("(3,1; 1,0; 0)"), V("(3,1; 1,0; 2/3,1; 1,0; inf)")) < 0);
    CHECK(compare(V("(3,1; 1,0; 0)"), V("(3,1; 1,0; 0)")) == 0);
    CHECK(compare(V("(3,0; 1,0; inf)"), V("(3,0; 1,0; 1,0; inf)")) > 0);
    ExtInv a{V("(5,0; 0)"), {0, 1, 1, 0}}, b{V("(5,0; 0)"), {0, 1, 0, 1}}, c{V("(5,0; 0)"), {0, 0, 1, 1}};
    CHECK(compare(a, b) == Order::Greater);
    CHECK(compare(b, c) == Order::Greater);
    CHECK(compare(a, a) == Order::Equal);
}

TEST_CASE("max locus in V") {
    auto br = branch(5, "wyxw");
    REQUIRE(br.loci.back().size() == 3);
    auto& top = br.loci.back().front();
    CHECK(top.stratum.zero == std::set<VarName>{"x", "y", "z"});
    CHECK(top.value.j_word == std::vector<int>{0, 1, 1, 0});
    for (auto& c : br.loci.back()) CHECK(c.value.base == V("(5,0; 0)"));
    CHECK(br.loci.back()[1].stratum.zero == std::set<VarName>{"y", "w", "z"});
    CHECK(br.loci.back()[2].stratum.zero == std::set<VarName>{"x", "w", "z"});
}

TEST_CASE("max locus in U_wywyw") {
    auto br = branch(5, "wywyw");
    REQUIRE(br.loci.back().size() == 2);
    CHECK(br.loci.back().front().stratum.zero == std::set<VarName>{"x", "y", "z"});
}

TEST_CASE("smooth chart has no locus") {
    auto t = init({parse_poly("z")}, {"x", "z"}, {});
    InvEngine eng(t, Variant::BM);
    for (auto& c : eng.max_locus(0, LocusFilter::Singular)) CHECK(c.value.base.iota.v < 2);
}

TEST_CASE("divisor data across blowups on the Villamayor branch") {
    auto br = branch(5, villamayor_drop_path(5), Variant::V);
    InvEngine eng(br.tower, Variant::V);
    for (size_t i = 1; i < br.lineage.size(); ++i) {
        INFO(br.tower.chart(br.lineage[i]).name);
        CHECK(lemma_3_7_check(eng, br.lineage[i]).empty());
    }
}

TEST_CASE("divisor data formulas") {
    // strict transform divisor keeps mu; fresh divisor gets mu_K + nu - 1 summed over J (J empty here)
    InvResult prev, now;
    LevelRecord lp, ln;
    lp.r = 2;
    lp.mu_by_id = {{1, Rat(3, 5)}};
    lp.nu_next = Rat(1);
    ln.r = 2;
    ln.nu_next = Rat(1);
    ln.mu_by_id = {{1, Rat(3, 5)}, {2, Rat(0)}};
    prev.value.base = now.value.base = V("(5,0; 9/5,3; 1,0; inf)");
    prev.trace.levels = {lp};
    now.trace.levels = {ln};
    BlowupRecord b;
    b.centre = {"z", "w"};
    b.chart_var = "w";
    b.new_divisor = 2;
    b.parent_divisors = {{"x", 1}};
    CHECK(lemma_3_7_check(prev, now, b).empty());
    now.trace.levels[0].mu_by_id[2] = Rat(1, 5);
    CHECK_FALSE(lemma_3_7_check(prev, now, b).empty());
    // with H_1 through the centre the fresh divisor inherits its mu
    b.centre.insert("x");
    now.trace.levels[0].mu_by_id[2] = Rat(3, 5);
    CHECK(lemma_3_7_check(prev, now, b).empty());
}

TEST_CASE("e_r! integrality over the worked branches") {
    for (auto p : {"wyxwxwx", "wywywx", "wywywy"}) {
        auto br = branch(5, p);
        InvEngine eng(br.tower, Variant::BM);
        for (int id : br.lineage) eng.max_locus(id);
        CHECK(eng.integrality_failures().empty());
    }
}
