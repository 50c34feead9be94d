#pragma once

#include "desing/tower.hpp"

#include <iosfwd>

namespace desing {

struct RunConfig {
    std::string ideal;
    std::string input;
    std::string family;
    std::optional<long> d;
    std::vector<VarName> vars;
    std::vector<VarName> E;
    Variant variant = Variant::BM;
    Mode mode = Mode::Embedded;
    int max_years = -1;  // -1: 12d for families, 200 otherwise
    std::string format = "table";
    std::string fixture;
    std::string path;  // follow one branch instead of the global run
    std::optional<std::pair<long, long>> sweep;
    bool sweep_report = false;
    long order = -1;  // order tracked by drop reports; defaults to d
    int verbosity = 0;
};

// replace the parameter d in exponents, e.g. "x^(d-1)" with d=5 gives "x^4"
std::string substitute_family(const std::string& family, long d);
std::vector<Poly> load_ideal(const RunConfig& cfg);
std::vector<Poly> load_ideal(const RunConfig& cfg, long d);
std::vector<VarName> default_vars(const std::vector<Poly>& gens);

// branch of the Villamayor run on z^d w^(d-1) - x^(d-1) y^d whose order first drops in year 9d-21
std::string villamayor_drop_path(long d);

struct FixtureDiff {
    std::vector<std::string> lines;
    bool empty() const { return lines.empty(); }
    std::string str() const;
};
// line-exact comparison of trace tables; a golden cell "*" matches anything
FixtureDiff fixture_diff(const std::string& trace, const std::string& golden);

struct DropPoint {
    int year = 0;
    std::string chart;
    ExtNat order;
    std::string inv;
};
struct DropReport {
    long d = 0;
    int drop_year = -1;
    std::string path;
    std::vector<DropPoint> points;
    std::vector<std::string> violations;
    std::string error;
};
DropReport drop_report(const RunConfig& cfg, long d);
std::string format_drop_report(const DropReport& r);

int run_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace desing
