#pragma once

#include "desing/presentations.hpp"

namespace desing {

enum class Variant { BM, V, EV_on_BM, EV_on_V };
enum class Mode { Principalize, Embedded, Weak };

bool uses_villamayor_block(Variant v);
bool uses_ev_filter(Variant v);
std::string to_string(Variant v);
std::string to_string(Mode m);
Variant parse_variant(const std::string& s);
Mode parse_mode(const std::string& s);

struct Chart {
    int id = 0;
    std::string name;
    int parent = -1;
    VarName branch_var;
    std::set<VarName> parent_centre;  // centre in the parent's coordinates
    std::vector<VarName> vars;
    std::map<VarName, int> divisor_map;
    std::vector<Poly> gens_strict, gens_weak, gens_total;
    ExpVec exc_factor;  // gens_total = exc_factor * gens_weak, generator-wise
    int year_created = 0;
    bool leaf = true;
    bool dead = false;
    std::vector<int> children;
};

struct Tower {
    std::vector<Chart> charts;
    DivisorRegistry divisors;
    Mode mode = Mode::Embedded;
    Variant variant = Variant::BM;
    int year = 0;

    const Chart& chart(int id) const { return charts.at(id); }
    int find_chart(const std::string& name) const;  // -1 if absent
    int max_divisor_id() const;
};

// image of a stratum of a child chart in its parent chart
std::set<VarName> image_in_parent(const Chart& child, const std::set<VarName>& zero);

}  // namespace desing
