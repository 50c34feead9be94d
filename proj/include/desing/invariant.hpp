#pragma once

#include "desing/atlas.hpp"


namespace desing {

enum class Terminal { None, Zero, Infinity };

// inv = (nu_1, s_1; nu_2, s_2; ...; terminal); nu_1 is iota
struct InvValue {
    ExtNat iota;
    std::vector<Rat> nus;   // nus[0] = iota when finite; nus[r-1] = nu_r
    std::vector<long> ss;   // ss[r-1] = s_r
    Terminal terminal = Terminal::None;
    std::optional<Rat> mu_final;

    struct Entry {
        bool inf = false;
        Rat v;
        friend bool operator==(const Entry& a, const Entry& b) { return a.inf == b.inf && (a.inf || a.v == b.v); }
        friend bool operator<(const Entry& a, const Entry& b) {
            if (a.inf) return false;
            return b.inf || a.v < b.v;
        }
    };
    // (nu_1, s_1, nu_2, s_2, ..., terminal entry)
    std::vector<Entry> flat() const;
    std::vector<Entry> prefix(size_t len) const;
    bool on_support() const { return iota.inf || iota.v > 0; }
    std::string str() const;
    // (d,1; 1,0; 5/3,0; 1,0; inf) ; terminal zero appends " mu=p/q"
    std::string str_with_mu() const;
    static InvValue parse(const std::string& s);
};

int compare(const InvValue& a, const InvValue& b);
bool operator==(const InvValue& a, const InvValue& b);

struct ExtInv {
    InvValue base;
    std::vector<int> j_word;  // indexed by divisor id - 1
    std::string str() const;
};

enum class Order { Less, Equal, Greater };
Order compare(const ExtInv& a, const ExtInv& b);

struct LevelRecord {
    int r = 0;
    std::vector<int> block;          // E^r
    long s = 0;
    int birth_year = 0;              // of inv_{r-1/2}
    std::vector<VarName> contact;    // N_r
    bool graph_contact = false;
    MarkedSet H;                     // H_r on N_r
    std::vector<int> factored;       // divisors factored in nu_{r+1}
    FracMono companion;              // mu_{r+1,H} by variable
    std::map<int, Rat> mu_by_id;     // same, keyed by divisor id
    RatInf mu_next;
    RatInf nu_next;
};

struct InvTrace {
    std::vector<LevelRecord> levels;
};

struct InvResult {
    ExtInv value;
    InvTrace trace;
};

struct LocusComponent {
    StratumSpec stratum;
    ExtInv value;
};

// restriction of the point set searched for the maximum
enum class LocusFilter { Support, Singular, OldDivisors };

class InvEngine {
public:
    InvEngine(const Tower& t, Variant v) : tower_(t), variant_(v) {}

    const InvResult& at(int chart, const std::set<VarName>& zero);
    int birth_year(int chart, const std::set<VarName>& zero, size_t level, const std::vector<InvValue::Entry>& cur);
    std::vector<LocusComponent> max_locus(int chart, LocusFilter f = LocusFilter::Support);
    std::vector<int> j_word(int chart, const std::set<VarName>& zero) const;

    // e_r! integrality failures seen so far
    const std::vector<std::string>& integrality_failures() const { return integrality_; }
    size_t memo_size() const { return memo_.size(); }
    Variant variant() const { return variant_; }
    const Tower& tower() const { return tower_; }

private:
    InvResult compute(int chart, const std::set<VarName>& zero);
    void check_integrality(const InvValue& v, int chart, const std::set<VarName>& zero);

    const Tower& tower_;
    Variant variant_;
    std::map<std::pair<int, std::set<VarName>>, InvResult> memo_;
    std::map<std::tuple<int, std::set<VarName>, size_t>, int> birth_memo_;
    std::map<std::pair<int, int>, std::vector<LocusComponent>> locus_memo_;
    std::vector<std::string> integrality_;
};

std::pair<ExtInv, InvTrace> compute_inv(const Tower& t, int chart, const StratumSpec& s, Variant v);
std::vector<LocusComponent> max_locus(const Tower& t, int chart, Variant v);

struct BlowupRecord {
    std::set<VarName> centre;
    VarName chart_var;
    int new_divisor = 0;
    std::map<VarName, int> parent_divisors;
};
// recompute mu_{r+1,H} over the Villamayor block from the previous year's values
std::vector<std::string> lemma_3_7_check(const InvResult& prev, const InvResult& now, const BlowupRecord& b);
// all strata of a chart against its parent
std::vector<std::string> lemma_3_7_check(InvEngine& eng, int chart);

}  // namespace desing
