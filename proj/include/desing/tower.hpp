#pragma once

#include "desing/invariant.hpp"

namespace desing {

struct YearBudgetExceeded : Error {
    using Error::Error;
};

struct CentreComponent {
    int chart = 0;
    std::set<VarName> zero;
};

struct Centre {
    std::vector<CentreComponent> components;
    ExtInv value;
    int year = 0;
    bool tie = false;  // two distinct components in one chart shared the top value
};

struct StopCondition {
    Mode mode = Mode::Embedded;
    bool reached = false;
    std::string witness;
};

// one row of the per-year table
struct TraceRow {
    int year = 0;
    std::string chart;
    std::string transform;
    std::string divisors;
    std::string inv;
    std::string centre;
};

struct RunResult {
    Tower tower;
    StopCondition stop;
    std::vector<Centre> centres;
    std::vector<TraceRow> rows;
    std::vector<std::string> violations;  // runtime assertion failures
    std::vector<std::string> notes;
    std::string error;  // non-empty if the run aborted
};

Tower init(const std::vector<Poly>& gens, const std::vector<VarName>& vars, const std::vector<VarName>& initial_E,
           Mode mode = Mode::Embedded, Variant variant = Variant::BM);

// active leaves: not blown up further and still meeting the support
std::vector<int> active_leaves(const Tower& t, InvEngine& eng);
// search filter in force for the tower's mode; nullopt when the stop condition holds
std::optional<LocusFilter> current_filter(const Tower& t, InvEngine& eng);

Centre select_centre(const Tower& t, InvEngine& eng);
Centre select_centre(const Tower& t);
// blow up one chart-local centre; creates one child per centre variable (or only `only`)
std::vector<int> blow_up_chart(Tower& t, int chart, const std::set<VarName>& centre, int divisor_id,
                               const std::optional<VarName>& only = std::nullopt);
std::vector<int> blow_up(Tower& t, const Centre& c);

// semicontinuity and strict decrease over freshly created charts
std::vector<std::string> check_new_charts(InvEngine& eng, const std::vector<int>& children, const ExtInv& centre_value);

RunResult run(Tower t, int max_years);

// local scheduling along a named chart path; divisor ids are depths
struct BranchRun {
    Tower tower;
    std::vector<int> lineage;  // chart ids, root first
    std::vector<std::vector<LocusComponent>> loci;  // per lineage chart
    std::vector<TraceRow> rows;
    std::vector<std::string> violations;
    std::string error;
    int drop_year = -1;  // first depth where the order at the origin falls below `order`
};
// order < 0 tracks the root order
BranchRun follow_branch(const std::vector<Poly>& gens, const std::vector<VarName>& vars, const std::string& path,
                        Variant variant, long order = -1, bool stop_at_drop = true, Mode mode = Mode::Embedded);

// deepest drop year over all branches through the chart named by `prefix`
struct ExploreResult {
    int deepest_drop = -1;
    size_t charts = 0;
    std::string deepest_path;
    std::vector<std::string> violations;
};
ExploreResult explore_drop(const std::vector<Poly>& gens, const std::vector<VarName>& vars, Variant variant,
                           long order, int max_depth, const std::string& prefix = "");

struct StructureResult {
    bool ok = false;
    int t = 0;
    std::vector<ExpVec> theta;
    std::string failure;
};
StructureResult lemma_6_3_structure_check(const Chart& c, const StratumSpec& s, const std::vector<Poly>& gens);
StructureResult lemma_6_3_structure_check(const Chart& c, const StratumSpec& s);

std::vector<std::set<VarName>> monomial_components(const FracMono& omega);

// presentation text
std::string centre_str(const std::set<VarName>& zero, const std::vector<VarName>& vars);
std::string divisors_str(const Chart& c);
std::string format_rows(const std::vector<TraceRow>& rows);
std::string to_dot(const Tower& t);
std::string to_json(const Tower& t, const std::vector<Centre>& centres);

}  // namespace desing
