#include "desing/polyring.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace desing {

long degree(const ExpVec& e) {
    long d = 0;
    for (auto& [v, k] : e) d += k;
    return d;
}

bool divides(const ExpVec& a, const ExpVec& b) {
    for (auto& [v, k] : a) {
        auto it = b.find(v);
        if (it == b.end() || it->second < k) return false;
    }
    return true;
}

ExpVec exp_add(const ExpVec& a, const ExpVec& b) {
    ExpVec r = a;
    for (auto& [v, k] : b) r[v] += k;
    return r;
}

ExpVec exp_sub(const ExpVec& a, const ExpVec& b) {
    ExpVec r = a;
    for (auto& [v, k] : b) {
        long& x = r[v];
        x -= k;
        if (x < 0) throw InternalError("exp_sub: negative exponent");
        if (x == 0) r.erase(v);
    }
    return r;
}

long exp_of(const ExpVec& e, const VarName& v) {
    auto it = e.find(v);
    return it == e.end() ? 0 : it->second;
}

bool GrLex::operator()(const ExpVec& a, const ExpVec& b) const {
    long da = degree(a), db = degree(b);
    if (da != db) return da < db;
    return a < b;
}

Poly::Poly(const Rat& c) {
    if (c != 0) terms_.emplace(ExpVec{}, c);
}

Poly Poly::var(const VarName& v, long k) {
    Poly p;
    ExpVec e;
    if (k > 0) e[v] = k;
    p.terms_.emplace(e, Rat(1));
    return p;
}

Poly Poly::monomial(const ExpVec& e, const Rat& c) {
    Poly p;
    p.add_term(e, c);
    return p;
}

bool Poly::is_constant() const {
    return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.empty());
}

std::set<VarName> Poly::vars() const {
    std::set<VarName> s;
    for (auto& [e, c] : terms_)
        for (auto& [v, k] : e) s.insert(v);
    return s;
}

long Poly::max_exp(const VarName& v) const {
    long m = 0;
    for (auto& [e, c] : terms_) m = std::max(m, exp_of(e, v));
    return m;
}

void Poly::add_term(const ExpVec& e, const Rat& c) {
    if (c == 0) return;
    auto it = terms_.find(e);
    if (it == terms_.end()) {
        terms_.emplace(e, c);
        return;
    }
    it->second += c;
    if (it->second == 0) terms_.erase(it);
}

bool operator<(const Poly& a, const Poly& b) {
    auto ia = a.terms_.begin(), ib = b.terms_.begin();
    GrLex lt;
    for (; ia != a.terms_.end() && ib != b.terms_.end(); ++ia, ++ib) {
        if (lt(ia->first, ib->first)) return true;
        if (lt(ib->first, ia->first)) return false;
        if (ia->second != ib->second) return ia->second < ib->second;
    }
    return ia == a.terms_.end() && ib != b.terms_.end();
}

Poly add(const Poly& p, const Poly& q) {
    Poly r = p;
    for (auto& [e, c] : q.terms()) r.add_term(e, c);
    return r;
}

Poly operator+(const Poly& a, const Poly& b) { return add(a, b); }
Poly operator-(const Poly& a) { return scale(a, -1); }
Poly operator-(const Poly& a, const Poly& b) { return add(a, -b); }

Poly mul(const Poly& p, const Poly& q) {
    Poly r;
    for (auto& [e1, c1] : p.terms())
        for (auto& [e2, c2] : q.terms()) r.add_term(exp_add(e1, e2), c1 * c2);
    return r;
}

Poly operator*(const Poly& a, const Poly& b) { return mul(a, b); }

Poly scale(const Poly& p, const Rat& c) {
    Poly r;
    if (c == 0) return r;
    for (auto& [e, k] : p.terms()) r.add_term(e, k * c);
    return r;
}

Poly pow(const Poly& p, unsigned long k) {
    Poly r(1), b = p;
    while (k) {
        if (k & 1) r = mul(r, b);
        k >>= 1;
        if (k) b = mul(b, b);
    }
    return r;
}

Poly mul_mono(const Poly& p, const ExpVec& m) {
    Poly r;
    for (auto& [e, c] : p.terms()) r.add_term(exp_add(e, m), c);
    return r;
}

Poly normalize_scalar(const Poly& p) {
    if (p.is_zero()) return p;
    Rat lc = p.terms().begin()->second;
    return scale(p, 1 / lc);
}

std::string ExtNat::str() const { return inf ? "inf" : std::to_string(v); }

StratumSpec StratumSpec::origin(const std::vector<VarName>& vars) {
    return {vars, std::set<VarName>(vars.begin(), vars.end())};
}

StratumSpec StratumSpec::with_zero(const std::vector<VarName>& vars, const std::set<VarName>& z) {
    return {vars, z};
}

std::string StratumSpec::str() const {
    // reverse chart order reads like {z=y=x=0}
    std::string s = "{";
    bool first = true;
    for (auto it = vars.rbegin(); it != vars.rend(); ++it) {
        if (!zero.count(*it)) continue;
        if (!first) s += ",";
        s += *it;
        first = false;
    }
    return s + "}";
}

long zero_degree(const ExpVec& e, const std::set<VarName>& zero) {
    long d = 0;
    for (auto& [v, k] : e)
        if (zero.count(v)) d += k;
    return d;
}

ExtNat order_in(const Poly& p, const std::set<VarName>& zero) {
    // terms with equal Zero-part have distinct Generic parts, so no group cancels
    if (p.is_zero()) return ExtNat::infinity();
    long best = -1;
    for (auto& [e, c] : p.terms()) {
        long d = zero_degree(e, zero);
        if (best < 0 || d < best) best = d;
    }
    return ExtNat::of(best);
}

ExtNat order_at_stratum(const Poly& p, const StratumSpec& s) { return order_in(p, s.zero); }

ExtNat order_along(const Poly& p, const std::set<VarName>& I) { return order_in(p, I); }

long min_degree(const Poly& p) {
    if (p.is_zero()) throw InternalError("min_degree of zero");
    return degree(p.terms().begin()->first);
}

Poly diff(const Poly& p, const VarName& v) {
    Poly r;
    for (auto& [e, c] : p.terms()) {
        long k = exp_of(e, v);
        if (k == 0) continue;
        ExpVec f = e;
        if (k == 1) f.erase(v);
        else f[v] = k - 1;
        r.add_term(f, c * k);
    }
    return r;
}

Poly logdiff(const Poly& p, const VarName& v) {
    Poly r;
    for (auto& [e, c] : p.terms()) {
        long k = exp_of(e, v);
        if (k) r.add_term(e, c * k);
    }
    return r;
}

Poly blowup_subst(const Poly& p, const std::set<VarName>& I, const VarName& i) {
    if (!I.count(i)) throw InternalError("blowup_subst: chart variable outside centre");
    Poly r;
    for (auto& [e, c] : p.terms()) {
        long extra = 0;
        for (auto& [v, k] : e)
            if (v != i && I.count(v)) extra += k;
        ExpVec f = e;
        if (extra) f[i] += extra;
        r.add_term(f, c);
    }
    return r;
}

Poly divide_exc(const Poly& p, const VarName& v, long k) {
    if (k == 0) return p;
    Poly r;
    for (auto& [e, c] : p.terms()) {
        long x = exp_of(e, v);
        if (x < k) throw NotDivisible("divide_exc: " + to_string(p) + " by " + v + "^" + std::to_string(k));
        ExpVec f = e;
        if (x == k) f.erase(v);
        else f[v] = x - k;
        r.add_term(f, c);
    }
    return r;
}

ExpVec mono_content(const std::vector<Poly>& ps, const std::set<VarName>& allowed) {
    ExpVec out;
    bool first = true;
    for (auto& p : ps) {
        for (auto& [e, c] : p.terms()) {
            if (first) {
                for (auto& [v, k] : e)
                    if (allowed.count(v)) out[v] = k;
                first = false;
                continue;
            }
            for (auto it = out.begin(); it != out.end();) {
                long k = exp_of(e, it->first);
                if (k == 0) it = out.erase(it);
                else {
                    it->second = std::min(it->second, k);
                    ++it;
                }
            }
        }
    }
    return out;
}

Poly restrict(const Poly& p, const std::set<VarName>& zeroed) {
    Poly r;
    for (auto& [e, c] : p.terms()) {
        bool keep = true;
        for (auto& [v, k] : e)
            if (zeroed.count(v)) keep = false;
        if (keep) r.add_term(e, c);
    }
    return r;
}

Poly substitute(const Poly& p, const VarName& v, const Poly& q) {
    Poly r;
    std::map<long, Poly> powers;
    for (auto& [e, c] : p.terms()) {
        long k = exp_of(e, v);
        ExpVec f = e;
        f.erase(v);
        if (k == 0) {
            r.add_term(f, c);
            continue;
        }
        auto it = powers.find(k);
        if (it == powers.end()) it = powers.emplace(k, pow(q, k)).first;
        r = add(r, scale(mul_mono(it->second, f), c));
    }
    return r;
}

std::string rat_str(const Rat& r) {
    Rat x = r;
    x.canonicalize();
    if (x.get_den() == 1) return x.get_num().get_str();
    return x.get_num().get_str() + "/" + x.get_den().get_str();
}

static std::vector<VarName> print_order(const ExpVec& e, const std::vector<VarName>& order) {
    std::vector<VarName> out;
    for (auto& v : order)
        if (e.count(v)) out.push_back(v);
    for (auto& [v, k] : e)
        if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
    return out;
}

std::string to_string(const ExpVec& e, const std::vector<VarName>& order) {
    if (e.empty()) return "1";
    std::string s;
    for (auto& v : print_order(e, order)) {
        if (!s.empty()) s += "*";
        s += v;
        long k = e.at(v);
        if (k != 1) s += "^" + std::to_string(k);
    }
    return s;
}

std::string to_string(const Poly& p, const std::vector<VarName>& order) {
    if (p.is_zero()) return "0";
    std::string s;
    bool first = true;
    for (auto& [e, c] : p.terms()) {
        Rat a = abs(c);
        bool neg = c < 0;
        if (first) s += neg ? "-" : "";
        else s += neg ? " - " : " + ";
        first = false;
        if (e.empty()) s += rat_str(a);
        else if (a == 1) s += to_string(e, order);
        else s += rat_str(a) + "*" + to_string(e, order);
    }
    return s;
}

std::string to_string(const Poly& p) { return to_string(p, {}); }

std::string to_string(const FracMono& m, const std::vector<VarName>& order) {
    ExpVec keys;
    for (auto& [v, r] : m)
        if (r != 0) keys[v] = 1;
    if (keys.empty()) return "1";
    std::string s;
    for (auto& v : print_order(keys, order)) {
        if (!s.empty()) s += "*";
        s += v;
        Rat r = m.at(v);
        if (r != 1) s += "^" + (r.get_den() == 1 ? rat_str(r) : "(" + rat_str(r) + ")");
    }
    return s;
}

namespace {

struct Lexer {
    const std::string& s;
    size_t i = 0;
    void skip() {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    }
    bool at_end() {
        skip();
        return i >= s.size();
    }
    char peek() {
        skip();
        return i < s.size() ? s[i] : '\0';
    }
    bool accept(char c) {
        if (peek() == c) {
            ++i;
            return true;
        }
        return false;
    }
    [[noreturn]] void fail(const std::string& what) {
        throw ParseError("parse error at column " + std::to_string(i) + ": " + what + " in \"" + s + "\"");
    }
    std::string integer() {
        skip();
        size_t j = i;
        while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
        if (j == i) fail("expected integer");
        std::string t = s.substr(i, j - i);
        i = j;
        return t;
    }
    std::string ident() {
        skip();
        size_t j = i;
        if (j >= s.size() || !std::isalpha(static_cast<unsigned char>(s[j]))) fail("expected variable");
        while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) ++j;
        std::string t = s.substr(i, j - i);
        i = j;
        return t;
    }
};

Poly parse_term(Lexer& lx) {
    Rat c(1);
    bool any = false;
    if (std::isdigit(static_cast<unsigned char>(lx.peek()))) {
        mpz_class num(lx.integer()), den(1);
        if (lx.accept('/')) {
            den = mpz_class(lx.integer());
            if (den == 0) lx.fail("zero denominator");
        }
        c = Rat(num, den);
        c.canonicalize();
        any = true;
    }
    ExpVec e;
    for (;;) {
        char ch = lx.peek();
        bool star = false;
        if (ch == '*') {
            if (!any) lx.fail("term starts with '*'");
            ++lx.i;
            star = true;
            ch = lx.peek();
        }
        if (!std::isalpha(static_cast<unsigned char>(ch))) {
            if (star) lx.fail("expected variable after '*'");
            break;
        }
        VarName v = lx.ident();
        long k = 1;
        if (lx.accept('^')) k = std::stol(lx.integer());
        if (k > 0) e[v] += k;
        any = true;
    }
    if (!any) lx.fail("empty term");
    return Poly::monomial(e, c);
}

}  // namespace

Poly parse_poly(const std::string& s) {
    Lexer lx{s};
    Poly r;
    bool first = true;
    while (!lx.at_end()) {
        int sign = 1;
        if (lx.accept('+')) sign = 1;
        else if (lx.accept('-')) sign = -1;
        else if (!first) lx.fail("expected '+' or '-'");
        r = add(r, scale(parse_term(lx), sign));
        first = false;
    }
    if (first) lx.fail("empty polynomial");
    return r;
}

Rat parse_rat(const std::string& s) {
    std::string t;
    for (char c : s)
        if (!std::isspace(static_cast<unsigned char>(c))) t += c;
    Rat r;
    try {
        r = Rat(t);
    } catch (...) {
        throw ParseError("bad rational: " + s);
    }
    r.canonicalize();
    return r;
}

}  // namespace desing
