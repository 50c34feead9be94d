#include "desing/atlas.hpp"

namespace desing {

bool uses_villamayor_block(Variant v) { return v == Variant::V || v == Variant::EV_on_V; }
bool uses_ev_filter(Variant v) { return v == Variant::EV_on_BM || v == Variant::EV_on_V; }

std::string to_string(Variant v) {
    switch (v) {
        case Variant::BM: return "bm";
        case Variant::V: return "v";
        case Variant::EV_on_BM: return "ev-bm";
        case Variant::EV_on_V: return "ev-v";
    }
    return "?";
}

std::string to_string(Mode m) {
    switch (m) {
        case Mode::Principalize: return "principalize";
        case Mode::Embedded: return "embedded";
        case Mode::Weak: return "weak";
    }
    return "?";
}

Variant parse_variant(const std::string& s) {
    if (s == "bm") return Variant::BM;
    if (s == "v") return Variant::V;
    if (s == "ev-bm") return Variant::EV_on_BM;
    if (s == "ev-v") return Variant::EV_on_V;
    throw UnsupportedInput("unknown variant: " + s);
}

Mode parse_mode(const std::string& s) {
    if (s == "principalize") return Mode::Principalize;
    if (s == "embedded") return Mode::Embedded;
    if (s == "weak") return Mode::Weak;
    throw UnsupportedInput("unknown mode: " + s);
}

int Tower::find_chart(const std::string& name) const {
    for (auto& c : charts)
        if (c.name == name) return c.id;
    return -1;
}

int Tower::max_divisor_id() const { return divisors.empty() ? 0 : divisors.rbegin()->first; }

std::set<VarName> image_in_parent(const Chart& child, const std::set<VarName>& zero) {
    if (!zero.count(child.branch_var)) return zero;
    std::set<VarName> z = zero;
    z.insert(child.parent_centre.begin(), child.parent_centre.end());
    return z;
}

}  // namespace desing
