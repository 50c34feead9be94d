#pragma once

#include "desing/polyring.hpp"

#include <optional>

namespace desing {

// nullopt stands for infinity
using RatInf = std::optional<Rat>;
std::string str(const RatInf& r);

struct Divisor {
    int id = 0;
    int birth_year = 0;
};
using DivisorRegistry = std::map<int, Divisor>;

struct MarkedFn {
    Poly h;
    Rat mu;
    bool inert() const { return mu <= 0; }
    friend bool operator==(const MarkedFn& a, const MarkedFn& b) { return a.h == b.h && a.mu == b.mu; }
    friend bool operator<(const MarkedFn& a, const MarkedFn& b) {
        if (a.h != b.h) return a.h < b.h;
        return a.mu < b.mu;
    }
};
using MarkedSet = std::vector<MarkedFn>;

struct Presentation {
    std::vector<VarName> contact_vars;
    MarkedSet marked;
    std::map<VarName, int> exc;  // variable -> divisor id
};

enum class MorphismKind { AdmissibleBlowup, ProductWithLine, ExceptionalBlowup };

struct Morphism {
    MorphismKind kind = MorphismKind::AdmissibleBlowup;
    std::set<VarName> centre;  // AdmissibleBlowup
    VarName chart_var;         // AdmissibleBlowup
    VarName new_var;           // ProductWithLine
    VarName h0, h1;            // ExceptionalBlowup
    std::string str() const;
};

// numeric invariants
RatInf mu_min(const Presentation& P, const StratumSpec& s);
Rat mu_along_divisor(const Presentation& P, const VarName& H, const StratumSpec& s);
RatInf nu(const Presentation& P, const StratumSpec& s);
FracMono companion(const Presentation& P, const StratumSpec& s);
Presentation residual(const Presentation& P, const StratumSpec& s);

// residual factorization over an explicit factor set with its multiplicities
MarkedSet residual_marked(const MarkedSet& H, const FracMono& muH, const Rat& nu);
// integral form (D_int, m) of a fractional monomial
std::pair<ExpVec, long> integral_power(const FracMono& D);

// derivative calculus
MarkedSet delta(const MarkedSet& F, const std::set<VarName>& exc_vars, const std::vector<VarName>& ambient_vars);
MarkedSet delta_closure(const MarkedSet& F, int k, const std::set<VarName>& exc_vars,
                        const std::vector<VarName>& ambient_vars);
// (h^(d/mu), d) for a common integral d; throws UnsupportedInput past the cap
MarkedSet common_mark(const MarkedSet& F, long* d_out = nullptr);
// F together with (dh/dx_i, mu-1) over the listed coordinates
MarkedSet derivative_augment(const MarkedSet& F, const std::vector<VarName>& coords);

VarName find_contact(const Presentation& P, const StratumSpec& s);
Presentation descend(const Presentation& P, const VarName& z, const StratumSpec& s);

// reduced forms used by the invariant engine
struct ContactChoice {
    VarName v;
    bool graph = false;
    Poly num;    // graph case: v = num / den
    ExpVec den;  // generic-variable monomial
};
std::optional<ContactChoice> locate_contact(const MarkedSet& G, const std::set<VarName>& active,
                                            const std::vector<VarName>& order, const std::set<VarName>& excluded,
                                            const std::set<VarName>& logset);
// restriction of f to N: den^K * f(v = num/den)
Poly contact_restrict(const Poly& f, const ContactChoice& c);
// Taylor parts along the contact hypersurface
MarkedSet level_parts(const MarkedSet& G, const ContactChoice& c);
// drop zero/inert, dedupe up to scalar keeping the larger mark, drop dominated monomials
MarkedSet prune_marked(const MarkedSet& G, const std::set<VarName>& active);

Presentation transform(const Presentation& P, const Morphism& m, const VarName& target_chart_var,
                       int new_divisor_id = -1);

std::vector<StratumSpec> equimultiple_strata(const Presentation& P, const std::vector<VarName>& chart_vars);

struct RefuteResult {
    std::optional<std::vector<Morphism>> witness;
    size_t explored = 0;
    size_t unclassified = 0;
};
RefuteResult equivalence_refute(const Presentation& P1, const Presentation& P2, const std::vector<VarName>& chart_vars,
                                int depth, const std::set<MorphismKind>& kinds);

std::string to_string(const MarkedFn& m, const std::vector<VarName>& order = {});
std::string to_string(const MarkedSet& F, const std::vector<VarName>& order = {});
std::string to_string(const Presentation& P, const DivisorRegistry* reg = nullptr,
                      const std::vector<VarName>& order = {});

}  // namespace desing
