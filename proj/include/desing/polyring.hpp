#pragma once

#include <gmpxx.h>

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace desing {

using Rat = mpq_class;
using VarName = std::string;

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ParseError : Error { using Error::Error; };
struct NotDivisible : Error { using Error::Error; };
struct UnsupportedInput : Error { using Error::Error; };
struct ContactNotFound : Error { using Error::Error; };
struct InternalError : Error { using Error::Error; };

// exponent vector; zero entries are never stored
using ExpVec = std::map<VarName, long>;

long degree(const ExpVec& e);
bool divides(const ExpVec& a, const ExpVec& b);  // a <= b componentwise
ExpVec exp_add(const ExpVec& a, const ExpVec& b);
ExpVec exp_sub(const ExpVec& a, const ExpVec& b);  // requires a >= b
long exp_of(const ExpVec& e, const VarName& v);

// graded lex: total degree first, then lexicographic on (name, exponent) pairs
struct GrLex {
    bool operator()(const ExpVec& a, const ExpVec& b) const;
};

struct Term {
    Rat coeff;
    ExpVec exps;
};

class Poly {
public:
    using TermMap = std::map<ExpVec, Rat, GrLex>;

    Poly() = default;
    Poly(const Rat& c);  // constant
    static Poly var(const VarName& v, long k = 1);
    static Poly monomial(const ExpVec& e, const Rat& c = 1);

    const TermMap& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    size_t size() const { return terms_.size(); }
    bool is_monomial() const { return terms_.size() == 1; }
    bool is_constant() const;
    std::set<VarName> vars() const;
    long max_exp(const VarName& v) const;

    void add_term(const ExpVec& e, const Rat& c);

    friend bool operator==(const Poly& a, const Poly& b) { return a.terms_ == b.terms_; }
    friend bool operator!=(const Poly& a, const Poly& b) { return !(a == b); }
    friend bool operator<(const Poly& a, const Poly& b);

private:
    TermMap terms_;
};

Poly operator+(const Poly& a, const Poly& b);
Poly operator-(const Poly& a, const Poly& b);
Poly operator-(const Poly& a);
Poly operator*(const Poly& a, const Poly& b);
Poly add(const Poly& p, const Poly& q);
Poly mul(const Poly& p, const Poly& q);
Poly scale(const Poly& p, const Rat& c);
Poly pow(const Poly& p, unsigned long k);
Poly mul_mono(const Poly& p, const ExpVec& e);

// leading coefficient scaled to 1; zero stays zero
Poly normalize_scalar(const Poly& p);

// nonnegative integer or infinity
struct ExtNat {
    bool inf = false;
    long v = 0;
    static ExtNat infinity() { return {true, 0}; }
    static ExtNat of(long x) { return {false, x}; }
    friend bool operator==(const ExtNat& a, const ExtNat& b) { return a.inf == b.inf && (a.inf || a.v == b.v); }
    friend bool operator<(const ExtNat& a, const ExtNat& b) {
        if (a.inf) return false;
        return b.inf || a.v < b.v;
    }
    std::string str() const;
};

enum class Status { Zero, Generic };

// coordinate stratum over an ordered chart variable list
struct StratumSpec {
    std::vector<VarName> vars;
    std::set<VarName> zero;

    static StratumSpec origin(const std::vector<VarName>& vars);
    static StratumSpec with_zero(const std::vector<VarName>& vars, const std::set<VarName>& z);
    bool is_zero(const VarName& v) const { return zero.count(v) > 0; }
    Status status(const VarName& v) const { return is_zero(v) ? Status::Zero : Status::Generic; }
    std::string str() const;  // "{z,y,x}" style, chart order
};

// sum of exponents over the given variables
long zero_degree(const ExpVec& e, const std::set<VarName>& zero);

ExtNat order_at_stratum(const Poly& p, const StratumSpec& s);
ExtNat order_in(const Poly& p, const std::set<VarName>& zero);
ExtNat order_along(const Poly& p, const std::set<VarName>& I);
long min_degree(const Poly& p);  // order at the origin of all variables; requires p != 0

Poly diff(const Poly& p, const VarName& v);
Poly logdiff(const Poly& p, const VarName& v);
Poly blowup_subst(const Poly& p, const std::set<VarName>& I, const VarName& i);
Poly divide_exc(const Poly& p, const VarName& v, long k);
ExpVec mono_content(const std::vector<Poly>& ps, const std::set<VarName>& allowed);
Poly restrict(const Poly& p, const std::set<VarName>& zeroed);
// replace v by q everywhere
Poly substitute(const Poly& p, const VarName& v, const Poly& q);

// fractional monomial, exponents >= 0
using FracMono = std::map<VarName, Rat>;
std::string to_string(const FracMono& m, const std::vector<VarName>& order = {});

// printer and parser for the text grammar
std::string to_string(const Poly& p);
std::string to_string(const Poly& p, const std::vector<VarName>& order);
std::string to_string(const ExpVec& e, const std::vector<VarName>& order = {});
std::string rat_str(const Rat& r);
Poly parse_poly(const std::string& s);
Rat parse_rat(const std::string& s);

}  // namespace desing
