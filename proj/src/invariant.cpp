#include "desing/invariant.hpp"

#include <algorithm>
#include <sstream>

namespace desing {

namespace {

constexpr long kHugeFactorial = 10000;

long content_of(const Poly& h, const VarName& v) {
    long m = -1;
    for (auto& [e, c] : h.terms()) {
        long k = exp_of(e, v);
        if (m < 0 || k < m) m = k;
    }
    return m < 0 ? 0 : m;
}

std::vector<std::set<VarName>> all_zero_sets(const std::vector<VarName>& vars) {
    std::vector<std::set<VarName>> out;
    size_t n = vars.size();
    for (size_t mask = 0; mask < (size_t(1) << n); ++mask) {
        std::set<VarName> z;
        for (size_t i = 0; i < n; ++i)
            if (mask & (size_t(1) << i)) z.insert(vars[i]);
        out.push_back(z);
    }
    return out;
}

bool passes(const InvValue& v, LocusFilter f) {
    if (!v.on_support()) return false;
    switch (f) {
        case LocusFilter::Support: return true;
        case LocusFilter::Singular: return v.iota.inf || v.iota.v >= 2;
        case LocusFilter::OldDivisors: return !v.ss.empty() && v.ss[0] > 0;
    }
    return true;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\n");
    return s.substr(a, b - a + 1);
}

}  // namespace

// ---- InvValue ----

std::vector<InvValue::Entry> InvValue::flat() const {
    std::vector<Entry> out;
    for (size_t r = 0; r < nus.size(); ++r) {
        if (r == 0 && iota.inf)
            out.push_back({true, 0});
        else
            out.push_back({false, nus[r]});
        if (r < ss.size()) out.push_back({false, Rat(ss[r])});
    }
    if (terminal == Terminal::Zero) out.push_back({false, 0});
    if (terminal == Terminal::Infinity) out.push_back({true, 0});
    return out;
}

std::vector<InvValue::Entry> InvValue::prefix(size_t len) const {
    auto f = flat();
    if (f.size() > len) f.resize(len);
    return f;
}

std::string InvValue::str() const {
    std::ostringstream os;
    os << "(";
    for (size_t r = 0; r < nus.size(); ++r) {
        if (r) os << "; ";
        os << (r == 0 && iota.inf ? std::string("inf") : rat_str(nus[r]));
        if (r < ss.size()) os << "," << ss[r];
    }
    if (terminal == Terminal::Zero) os << "; 0";
    if (terminal == Terminal::Infinity) os << "; inf";
    os << ")";
    return os.str();
}

std::string InvValue::str_with_mu() const {
    std::string s = str();
    if (terminal == Terminal::Zero && mu_final) s += " mu=" + rat_str(*mu_final);
    return s;
}

InvValue InvValue::parse(const std::string& text) {
    std::string s = trim(text);
    if (s.size() < 2 || s.front() != '(' || s.back() != ')') throw ParseError("inv value must be parenthesized");
    auto parts = split(s.substr(1, s.size() - 2), ';');
    InvValue v;
    for (size_t i = 0; i < parts.size(); ++i) {
        std::string p = trim(parts[i]);
        if (p.empty()) throw ParseError("empty inv component");
        bool last = i + 1 == parts.size();
        if (last && i > 0 && p.find(',') == std::string::npos) {
            if (p == "inf") v.terminal = Terminal::Infinity;
            else if (p == "0") v.terminal = Terminal::Zero;
            else throw ParseError("bad inv terminal: " + p);
            break;
        }
        auto ab = split(p, ',');
        if (ab.size() > 2) throw ParseError("bad inv pair: " + p);
        std::string a = trim(ab[0]);
        if (i == 0 && a == "inf") {
            v.iota = ExtNat::infinity();
            v.nus.push_back(0);
        } else {
            Rat q = parse_rat(a);
            if (i == 0) {
                if (q.get_den() != 1) throw ParseError("iota must be an integer");
                v.iota = ExtNat::of(q.get_num().get_si());
            }
            v.nus.push_back(q);
        }
        if (ab.size() == 2) v.ss.push_back(std::stol(trim(ab[1])));
    }
    return v;
}

int compare(const InvValue& a, const InvValue& b) {
    auto fa = a.flat(), fb = b.flat();
    size_t n = std::min(fa.size(), fb.size());
    for (size_t i = 0; i < n; ++i) {
        if (fa[i] < fb[i]) return -1;
        if (fb[i] < fa[i]) return 1;
    }
    if (fa.size() != fb.size()) return fa.size() < fb.size() ? -1 : 1;
    return 0;
}

bool operator==(const InvValue& a, const InvValue& b) { return compare(a, b) == 0; }

std::string ExtInv::str() const {
    std::ostringstream os;
    os << base.str() << " J=(";
    for (size_t i = 0; i < j_word.size(); ++i) os << (i ? "," : "") << j_word[i];
    os << ")";
    return os.str();
}

Order compare(const ExtInv& a, const ExtInv& b) {
    int c = compare(a.base, b.base);
    if (c) return c < 0 ? Order::Less : Order::Greater;
    size_t n = std::max(a.j_word.size(), b.j_word.size());
    for (size_t i = 0; i < n; ++i) {
        int x = i < a.j_word.size() ? a.j_word[i] : 0;
        int y = i < b.j_word.size() ? b.j_word[i] : 0;
        if (x != y) return x < y ? Order::Less : Order::Greater;
    }
    return Order::Equal;
}

// ---- engine ----

std::vector<int> InvEngine::j_word(int chart, const std::set<VarName>& zero) const {
    std::vector<int> w(tower_.max_divisor_id(), 0);
    for (auto& [v, id] : tower_.chart(chart).divisor_map)
        if (zero.count(v) && id >= 1) w[id - 1] = 1;
    return w;
}

const InvResult& InvEngine::at(int chart, const std::set<VarName>& zero) {
    auto key = std::make_pair(chart, zero);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    InvResult r = compute(chart, zero);
    return memo_.emplace(key, std::move(r)).first->second;
}

int InvEngine::birth_year(int chart, const std::set<VarName>& zero, size_t level,
                          const std::vector<InvValue::Entry>& cur) {
    auto key = std::make_tuple(chart, zero, level);
    auto it = birth_memo_.find(key);
    if (it != birth_memo_.end()) return it->second;
    int k = chart;
    std::set<VarName> zk = zero;
    while (true) {
        const Chart& ck = tower_.chart(k);
        if (ck.parent < 0) break;
        std::set<VarName> zp = image_in_parent(ck, zk);
        const InvResult& pr = at(ck.parent, zp);
        if (pr.value.base.prefix(level) != cur) break;
        k = ck.parent;
        zk = zp;
    }
    int y = tower_.chart(k).year_created;
    birth_memo_[key] = y;
    return y;
}

void InvEngine::check_integrality(const InvValue& v, int chart, const std::set<VarName>& zero) {
    if (v.iota.inf || v.nus.empty()) return;
    // e_1 = iota; e_{r+1} = max(e_r!, e_r! nu_{r+1})
    mpz_class e = v.nus[0].get_num();
    bool huge = false;
    for (size_t r = 1; r < v.nus.size(); ++r) {
        const Rat& nr = v.nus[r];
        mpz_class den = nr.get_den();
        bool ok;
        mpz_class fact;
        if (huge || e >= den) {
            ok = true;
        } else {
            mpz_fac_ui(fact.get_mpz_t(), e.get_ui());
            ok = mpz_divisible_p(fact.get_mpz_t(), den.get_mpz_t()) != 0;
        }
        if (!ok) {
            std::ostringstream os;
            os << "chart " << tower_.chart(chart).name << " stratum " << StratumSpec{tower_.chart(chart).vars, zero}.str()
               << ": e_" << r << "! * nu_" << r + 1 << " not integral for " << v.str();
            integrality_.push_back(os.str());
        }
        if (huge || e > kHugeFactorial) {
            huge = true;
            continue;
        }
        mpz_fac_ui(fact.get_mpz_t(), e.get_ui());
        Rat en = Rat(fact) * nr;
        mpz_class next = fact;
        if (en > Rat(fact)) next = en.get_num() / en.get_den();
        if (next > kHugeFactorial) huge = true;
        else e = next;
    }
}

InvResult InvEngine::compute(int chart, const std::set<VarName>& zero) {
    const Chart& ch = tower_.chart(chart);
    const auto& gens = tower_.mode == Mode::Embedded ? ch.gens_strict : ch.gens_weak;
    InvResult res;
    InvValue& val = res.value.base;
    res.value.j_word = j_word(chart, zero);

    ExtNat iota = ExtNat::infinity();
    for (auto& g : gens) {
        ExtNat o = order_in(g, zero);
        if (o < iota) iota = o;
    }
    if (iota.inf) throw UnsupportedInput("generators vanish identically in chart " + ch.name);
    val.iota = iota;
    val.nus.push_back(Rat(iota.v));
    if (iota.v == 0) return res;

    MarkedSet G;
    for (auto& g : gens)
        if (!g.is_zero()) G.push_back({g, Rat(iota.v)});
    std::set<VarName> active = zero;
    std::map<VarName, Poly> restr;  // eliminated contact variables restricted to the current N
    std::map<int, VarName> exc_rem;
    for (auto& [v, id] : ch.divisor_map)
        if (zero.count(v)) exc_rem[id] = v;

    const bool villamayor = uses_villamayor_block(variant_);
    const size_t n = ch.vars.size();
    for (int r = 1;; ++r) {
        if (size_t(r) > n + 1) throw InternalError("invariant exceeded dimension bound in chart " + ch.name);
        LevelRecord rec;
        rec.r = r;
        int i_r = birth_year(chart, zero, 2 * r - 1, val.flat());
        rec.birth_year = i_r;
        std::map<int, VarName> block, rest;
        for (auto& [id, v] : exc_rem) {
            int b = tower_.divisors.count(id) ? tower_.divisors.at(id).birth_year : 0;
            (b <= i_r ? block : rest)[id] = v;
        }
        for (auto& [id, v] : block) rec.block.push_back(id);
        rec.s = long(block.size());
        val.ss.push_back(rec.s);
        exc_rem = rest;

        std::map<int, VarName> factor_set = rest;
        if (villamayor) {
            int b = birth_year(chart, zero, 2 * r, val.flat());
            factor_set.clear();
            for (auto& [id, v] : rest) {
                int by = tower_.divisors.count(id) ? tower_.divisors.at(id).birth_year : 0;
                if (by > b) factor_set[id] = v;
            }
        }
        std::set<VarName> excluded, logset;
        for (auto& [id, v] : rest) excluded.insert(v);
        for (auto& [id, v] : (villamayor ? factor_set : rest)) logset.insert(v);

        auto contact = locate_contact(G, active, ch.vars, excluded, logset);
        if (!contact)
            throw ContactNotFound("no contact variable at " + StratumSpec{ch.vars, zero}.str() + " in chart " +
                                  ch.name + " level " + std::to_string(r));
        rec.contact.push_back(contact->v);
        rec.graph_contact = contact->graph;
        MarkedSet C = level_parts(G, *contact);
        active.erase(contact->v);
        for (auto& [v, p] : restr) p = contact_restrict(p, *contact);
        restr[contact->v] = contact_restrict(Poly::var(contact->v), *contact);
        for (auto& [id, v] : block) {
            Poly xh = restr.count(v) ? restr.at(v) : Poly::var(v);
            if (!xh.is_zero()) C.push_back({xh, Rat(1)});
        }
        MarkedSet H = prune_marked(C, active);
        rec.H = H;
        if (H.empty()) {
            val.terminal = Terminal::Infinity;
            res.trace.levels.push_back(rec);
            break;
        }
        std::optional<Rat> mu;
        for (auto& h : H) {
            ExtNat o = order_in(h.h, active);
            if (o.inf) continue;
            Rat q = Rat(o.v) / h.mu;
            if (!mu || q < *mu) mu = q;
        }
        if (!mu) throw InternalError("empty order minimum in chart " + ch.name);
        FracMono muH;
        Rat sum = 0, frac_sum = 0;
        for (auto& [id, v] : factor_set) {
            if (!active.count(v)) continue;
            std::optional<Rat> m;
            for (auto& h : H) {
                Rat q = Rat(content_of(h.h, v)) / h.mu;
                if (!m || q < *m) m = q;
            }
            rec.factored.push_back(id);
            rec.mu_by_id[id] = *m;
            if (*m != 0) muH[v] = *m;
            sum += *m;
            Rat fl = Rat(m->get_num() / m->get_den());
            frac_sum += *m - fl;
        }
        Rat nu_v = *mu - sum;
        if (uses_ev_filter(variant_) && frac_sum + nu_v < 1) nu_v = 0;
        rec.companion = muH;
        rec.mu_next = *mu;
        rec.nu_next = nu_v;
        res.trace.levels.push_back(rec);
        if (nu_v == 0) {
            val.terminal = Terminal::Zero;
            val.mu_final = sum;
            break;
        }
        val.nus.push_back(nu_v);
        G = prune_marked(residual_marked(H, muH, nu_v), active);
    }
    check_integrality(val, chart, zero);
    return res;
}

std::vector<LocusComponent> InvEngine::max_locus(int chart, LocusFilter f) {
    auto key = std::make_pair(chart, int(f));
    auto it = locus_memo_.find(key);
    if (it != locus_memo_.end()) return it->second;
    const Chart& ch = tower_.chart(chart);
    auto zs = all_zero_sets(ch.vars);
    const InvValue* best = nullptr;
    for (auto& z : zs) {
        const InvValue& v = at(chart, z).value.base;
        if (!passes(v, f)) continue;
        if (!best || compare(v, *best) > 0) best = &v;
    }
    std::vector<LocusComponent> out;
    if (best) {
        std::vector<std::set<VarName>> hits;
        for (auto& z : zs) {
            const InvValue& v = at(chart, z).value.base;
            if (passes(v, f) && compare(v, *best) == 0) hits.push_back(z);
        }
        for (auto& z : hits) {
            bool minimal = true;
            for (auto& y : hits)
                if (y.size() < z.size() && std::includes(z.begin(), z.end(), y.begin(), y.end())) minimal = false;
            if (!minimal) continue;
            out.push_back({StratumSpec{ch.vars, z}, ExtInv{*best, j_word(chart, z)}});
        }
        std::stable_sort(out.begin(), out.end(), [](const LocusComponent& a, const LocusComponent& b) {
            return compare(a.value, b.value) == Order::Greater;
        });
    }
    locus_memo_[key] = out;
    return out;
}

std::pair<ExtInv, InvTrace> compute_inv(const Tower& t, int chart, const StratumSpec& s, Variant v) {
    InvEngine eng(t, v);
    const InvResult& r = eng.at(chart, s.zero);
    return {r.value, r.trace};
}

std::vector<LocusComponent> max_locus(const Tower& t, int chart, Variant v) {
    InvEngine eng(t, v);
    return eng.max_locus(chart);
}

// ---- divisor data across a blowup ----

std::vector<std::string> lemma_3_7_check(const InvResult& prev, const InvResult& now, const BlowupRecord& b) {
    std::vector<std::string> out;
    const auto& lp = prev.trace.levels;
    const auto& ln = now.trace.levels;
    for (size_t k = 0; k < ln.size() && k < lp.size(); ++k) {
        size_t r = k + 1;
        if (now.value.base.prefix(2 * r) != prev.value.base.prefix(2 * r)) break;
        if (now.value.base.flat().size() < 2 * r) break;
        const LevelRecord& a = ln[k];
        const LevelRecord& p = lp[k];
        if (!a.nu_next || !p.nu_next) continue;
        for (auto& [id, m] : a.mu_by_id) {
            Rat expect;
            if (id == b.new_divisor) {
                expect = *p.nu_next - 1;
                for (auto& [kid, km] : p.mu_by_id) {
                    bool through = false;
                    for (auto& [v, pid] : b.parent_divisors)
                        if (pid == kid && b.centre.count(v)) through = true;
                    if (through) expect += km;
                }
            } else {
                auto it = p.mu_by_id.find(id);
                if (it == p.mu_by_id.end()) {
                    out.push_back("level " + std::to_string(r) + ": divisor " + std::to_string(id) +
                                  " missing from the previous block");
                    continue;
                }
                expect = it->second;
            }
            if (expect != m)
                out.push_back("level " + std::to_string(r) + ": divisor " + std::to_string(id) + " has mu " +
                              rat_str(m) + ", expected " + rat_str(expect));
        }
    }
    return out;
}

std::vector<std::string> lemma_3_7_check(InvEngine& eng, int chart) {
    std::vector<std::string> out;
    if (!uses_villamayor_block(eng.variant())) return out;
    const Tower& t = eng.tower();
    const Chart& c = t.chart(chart);
    if (c.parent < 0) return out;
    BlowupRecord b{c.parent_centre, c.branch_var, c.divisor_map.at(c.branch_var), t.chart(c.parent).divisor_map};
    for (auto& z : all_zero_sets(c.vars)) {
        const InvResult& now = eng.at(chart, z);
        if (!now.value.base.on_support()) continue;
        const InvResult& prev = eng.at(c.parent, image_in_parent(c, z));
        for (auto& msg : lemma_3_7_check(prev, now, b))
            out.push_back(c.name + " " + StratumSpec{c.vars, z}.str() + ": " + msg);
    }
    return out;
}

}  // namespace desing
