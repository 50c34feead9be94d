#include "desing/presentations.hpp"

#include <algorithm>
#include <deque>
#include <numeric>

namespace desing {

namespace {

constexpr long kMarkCap = 10000;

Rat ratio(const ExtNat& o, const Rat& mu) { return Rat(o.v) / mu; }

ExpVec project(const ExpVec& e, const std::set<VarName>& keep) {
    ExpVec r;
    for (auto& [v, k] : e)
        if (keep.count(v)) r[v] = k;
    return r;
}

long content_of(const Poly& h, const VarName& v) {
    long m = -1;
    for (auto& [e, c] : h.terms()) {
        long k = exp_of(e, v);
        if (m < 0 || k < m) m = k;
    }
    return m < 0 ? 0 : m;
}

mpz_class lcm_z(const mpz_class& a, const mpz_class& b) {
    mpz_class r;
    mpz_lcm(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return r;
}

Poly power_of(const Poly& h, long k) {
    if (k == 1) return h;
    if (h.is_monomial()) {
        auto& [e, c] = *h.terms().begin();
        ExpVec f;
        for (auto& [v, x] : e) f[v] = x * k;
        Rat ck;
        mpz_pow_ui(ck.get_num_mpz_t(), c.get_num_mpz_t(), k);
        mpz_pow_ui(ck.get_den_mpz_t(), c.get_den_mpz_t(), k);
        ck.canonicalize();
        return Poly::monomial(f, ck);
    }
    return pow(h, k);
}

void push_unique(MarkedSet& out, std::set<MarkedFn>& seen, MarkedFn m) {
    if (m.h.is_zero()) return;
    if (seen.insert(m).second) out.push_back(std::move(m));
}

}  // namespace

std::string str(const RatInf& r) { return r ? rat_str(*r) : "inf"; }

std::string Morphism::str() const {
    switch (kind) {
        case MorphismKind::AdmissibleBlowup: {
            std::string s = "blowup{";
            bool first = true;
            for (auto& v : centre) {
                s += (first ? "" : ",") + v;
                first = false;
            }
            return s + "}@" + chart_var;
        }
        case MorphismKind::ProductWithLine: return "line(" + new_var + ")";
        case MorphismKind::ExceptionalBlowup: return "exc(" + h0 + "," + h1 + ")@" + chart_var;
    }
    return "?";
}

RatInf mu_min(const Presentation& P, const StratumSpec& s) {
    RatInf best;
    for (auto& m : P.marked) {
        if (m.inert()) continue;
        ExtNat o = order_at_stratum(m.h, s);
        if (o.inf) continue;
        Rat r = ratio(o, m.mu);
        if (!best || r < *best) best = r;
    }
    return best;
}

Rat mu_along_divisor(const Presentation& P, const VarName& H, const StratumSpec&) {
    std::optional<Rat> best;
    for (auto& m : P.marked) {
        if (m.inert() || m.h.is_zero()) continue;
        Rat r = Rat(content_of(m.h, H)) / m.mu;
        if (!best || r < *best) best = r;
    }
    return best.value_or(Rat(0));
}

RatInf nu(const Presentation& P, const StratumSpec& s) {
    RatInf m = mu_min(P, s);
    if (!m) return m;
    Rat n = *m;
    for (auto& [v, id] : P.exc)
        if (s.is_zero(v)) n -= mu_along_divisor(P, v, s);
    return n;
}

FracMono companion(const Presentation& P, const StratumSpec& s) {
    FracMono D;
    for (auto& [v, id] : P.exc) {
        if (!s.is_zero(v)) continue;
        Rat r = mu_along_divisor(P, v, s);
        if (r != 0) D[v] = r;
    }
    return D;
}

std::pair<ExpVec, long> integral_power(const FracMono& D) {
    mpz_class m = 1;
    for (auto& [v, r] : D)
        if (r != 0) m = lcm_z(m, r.get_den());
    if (m > kMarkCap) throw UnsupportedInput("companion normalization exceeds mark cap");
    long mm = m.get_si();
    ExpVec e;
    for (auto& [v, r] : D) {
        if (r == 0) continue;
        Rat x = r * mm;
        e[v] = x.get_num().get_si();
    }
    return {e, mm};
}

MarkedSet residual_marked(const MarkedSet& H, const FracMono& muH, const Rat& nu_v) {
    auto [Dint, m] = integral_power(muH);
    if (nu_v == 0) return {MarkedFn{Poly::monomial(Dint), Rat(m)}};
    MarkedSet out;
    for (auto& el : H) {
        if (el.inert() || el.h.is_zero()) continue;
        mpz_class k = 1;
        for (auto& [v, r] : muH) {
            Rat x = el.mu * r;
            k = lcm_z(k, x.get_den());
        }
        if (k * el.mu > kMarkCap) throw UnsupportedInput("residual normalization exceeds mark cap");
        long kk = k.get_si();
        Poly g = power_of(el.h, kk);
        for (auto& [v, r] : muH) {
            Rat x = r * el.mu * kk;
            g = divide_exc(g, v, x.get_num().get_si());
        }
        out.push_back({g, el.mu * kk * nu_v});
    }
    if (nu_v < 1 && !Dint.empty()) out.push_back({Poly::monomial(Dint), Rat(m) * (1 - nu_v)});
    return out;
}

Presentation residual(const Presentation& P, const StratumSpec& s) {
    RatInf n = nu(P, s);
    if (!n) throw InternalError("residual: nu is infinite");
    Presentation R = P;
    R.marked = residual_marked(P.marked, companion(P, s), *n);
    return R;
}

MarkedSet delta(const MarkedSet& F, const std::set<VarName>& exc_vars, const std::vector<VarName>& ambient_vars) {
    MarkedSet out;
    std::set<MarkedFn> seen;
    for (auto& f : F) {
        if (f.inert()) continue;
        Rat m = f.mu - 1;
        push_unique(out, seen, {f.h, m});
        for (auto& v : ambient_vars) {
            Poly d = exc_vars.count(v) ? logdiff(f.h, v) : diff(f.h, v);
            push_unique(out, seen, {d, m});
        }
    }
    return out;
}

MarkedSet delta_closure(const MarkedSet& F, int k, const std::set<VarName>& exc_vars,
                        const std::vector<VarName>& ambient_vars) {
    MarkedSet out;
    std::set<MarkedFn> seen;
    for (auto& f : F) push_unique(out, seen, f);
    MarkedSet frontier = out;
    for (int q = 1; q <= k && !frontier.empty(); ++q) {
        MarkedSet next;
        for (auto& m : delta(frontier, exc_vars, ambient_vars))
            if (seen.insert(m).second) {
                out.push_back(m);
                next.push_back(m);
            }
        frontier = std::move(next);
    }
    return out;
}

MarkedSet common_mark(const MarkedSet& F, long* d_out) {
    mpz_class d = 1;
    for (auto& f : F)
        if (!f.inert()) d = lcm_z(d, f.mu.get_num());
    if (d > kMarkCap) throw UnsupportedInput("common mark exceeds cap");
    long dd = d.get_si();
    MarkedSet out;
    for (auto& f : F) {
        if (f.inert()) continue;
        Rat k = Rat(dd) / f.mu;
        out.push_back({power_of(f.h, k.get_num().get_si()), Rat(dd)});
    }
    if (d_out) *d_out = dd;
    return out;
}

MarkedSet derivative_augment(const MarkedSet& F, const std::vector<VarName>& coords) {
    MarkedSet out;
    std::set<MarkedFn> seen;
    for (auto& f : F) push_unique(out, seen, f);
    for (auto& f : F) {
        if (f.inert()) continue;
        for (auto& v : coords) push_unique(out, seen, {diff(f.h, v), f.mu - 1});
    }
    return out;
}

static std::vector<VarName> ambient_of(const Presentation& P, const StratumSpec& s) {
    std::vector<VarName> amb;
    for (auto& v : s.vars)
        if (std::find(P.contact_vars.begin(), P.contact_vars.end(), v) == P.contact_vars.end()) amb.push_back(v);
    return amb;
}

static std::set<VarName> exc_vars_of(const Presentation& P) {
    std::set<VarName> e;
    for (auto& [v, id] : P.exc) e.insert(v);
    return e;
}

VarName find_contact(const Presentation& P, const StratumSpec& s) {
    long d = 1;
    MarkedSet norm = common_mark(P.marked, &d);
    auto excv = exc_vars_of(P);
    MarkedSet cl = delta_closure(norm, static_cast<int>(d - 1), excv, ambient_of(P, s));
    for (auto it = s.vars.rbegin(); it != s.vars.rend(); ++it) {
        const VarName& v = *it;
        if (!s.is_zero(v) || excv.count(v)) continue;
        if (std::find(P.contact_vars.begin(), P.contact_vars.end(), v) != P.contact_vars.end()) continue;
        for (auto& m : cl) {
            if (!m.h.is_monomial()) continue;
            const ExpVec& e = m.h.terms().begin()->first;
            if (e.size() == 1 && e.begin()->first == v && e.begin()->second == 1) return v;
        }
    }
    throw ContactNotFound("no coordinate variable of order one in the derivative closure");
}

static MarkedSet dedupe_keep_max(const MarkedSet& F) {
    std::map<Poly, Rat> best;
    for (auto& f : F) {
        auto it = best.find(f.h);
        if (it == best.end() || it->second < f.mu) best[f.h] = f.mu;
    }
    MarkedSet out;
    for (auto& [h, mu] : best) out.push_back({h, mu});
    return out;
}

Presentation descend(const Presentation& P, const VarName& z, const StratumSpec& s) {
    long d = 1;
    MarkedSet norm = common_mark(P.marked, &d);
    MarkedSet cl = delta_closure(norm, static_cast<int>(d - 1), exc_vars_of(P), ambient_of(P, s));
    MarkedSet kept;
    for (auto& m : cl) {
        if (m.inert()) continue;
        Poly r = restrict(m.h, {z});
        if (r.is_zero()) continue;
        kept.push_back({normalize_scalar(r), m.mu});
    }
    Presentation Q = P;
    Q.contact_vars.push_back(z);
    Q.marked = dedupe_keep_max(kept);
    return Q;
}

std::optional<ContactChoice> locate_contact(const MarkedSet& G, const std::set<VarName>& active,
                                            const std::vector<VarName>& order, const std::set<VarName>& excluded,
                                            const std::set<VarName>& logset) {
    // coordinate contact: d^beta h = c*v*unit for some term of degree mu
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        const VarName& v = *it;
        if (!active.count(v) || excluded.count(v)) continue;
        for (auto& g : G) {
            if (g.inert() || g.h.is_zero() || g.mu.get_den() != 1) continue;
            ExtNat o = order_in(g.h, active);
            if (o.inf || Rat(o.v) != g.mu) continue;
            for (auto& [e, c] : g.h.terms()) {
                ExpVec tz = project(e, active);
                if (degree(tz) != o.v || exp_of(tz, v) == 0) continue;
                bool logged = false;
                for (auto& [u, k] : tz)
                    if (logset.count(u)) logged = true;
                if (logged) continue;
                ExpVec beta = exp_sub(tz, {{v, 1}});
                bool ok = true;
                for (auto& [e2, c2] : g.h.terms()) {
                    if (e2 == e) continue;
                    ExpVec t2 = project(e2, active);
                    if (divides(beta, t2) && exp_of(t2, v) == 0) ok = false;
                }
                if (ok) return ContactChoice{v, false, {}, {}};
            }
        }
    }
    // graph contact from a mark-one binomial c*v*u + c2*m
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        const VarName& v = *it;
        if (!active.count(v) || excluded.count(v)) continue;
        for (auto& g : G) {
            if (g.inert() || g.mu != 1 || g.h.size() != 2) continue;
            ExtNat o = order_in(g.h, active);
            if (o.inf || o.v != 1) continue;
            auto t1 = g.h.terms().begin();
            auto t2 = std::next(t1);
            for (int pass = 0; pass < 2; ++pass, std::swap(t1, t2)) {
                ExpVec tz = project(t1->first, active);
                if (tz != ExpVec{{v, 1}} || exp_of(t2->first, v) != 0) continue;
                ContactChoice ch{v, true, Poly::monomial(t2->first, -t2->second / t1->second),
                                 exp_sub(t1->first, {{v, 1}})};
                return ch;
            }
        }
    }
    return std::nullopt;
}

Poly contact_restrict(const Poly& f, const ContactChoice& c) {
    if (!c.graph) return restrict(f, {c.v});
    long K = f.max_exp(c.v);
    if (K == 0) return f;
    Poly out;
    for (auto& [e, coef] : f.terms()) {
        long k = exp_of(e, c.v);
        ExpVec rest = e;
        rest.erase(c.v);
        ExpVec dpow;
        for (auto& [u, x] : c.den) dpow[u] = x * (K - k);
        Poly term = mul_mono(pow(c.num, k), exp_add(rest, dpow));
        out = add(out, scale(term, coef));
    }
    return out;
}

MarkedSet level_parts(const MarkedSet& G, const ContactChoice& c) {
    MarkedSet out;
    for (auto& g : G) {
        if (g.inert() || g.h.is_zero()) continue;
        if (!c.graph) {
            std::map<long, Poly> levels;
            for (auto& [e, coef] : g.h.terms()) {
                long k = exp_of(e, c.v);
                ExpVec f = e;
                f.erase(c.v);
                levels[k].add_term(f, coef);
            }
            for (auto& [k, p] : levels)
                if (g.mu - k > 0) out.push_back({p, g.mu - k});
            continue;
        }
        Poly d = g.h;
        for (long k = 0; g.mu - k > 0 && !d.is_zero(); ++k) {
            Poly r = contact_restrict(d, c);
            if (!r.is_zero()) out.push_back({r, g.mu - k});
            d = diff(d, c.v);
        }
    }
    return out;
}

MarkedSet prune_marked(const MarkedSet& G, const std::set<VarName>& active) {
    std::map<Poly, Rat> best;
    for (auto& g : G) {
        if (g.inert() || g.h.is_zero()) continue;
        Poly h = g.h.is_monomial() ? Poly::monomial(project(g.h.terms().begin()->first, active))
                                   : normalize_scalar(g.h);
        auto it = best.find(h);
        if (it == best.end() || it->second < g.mu) best[h] = g.mu;
    }
    std::vector<std::pair<Poly, Rat>> items(best.begin(), best.end());
    std::vector<bool> drop(items.size(), false);
    for (size_t a = 0; a < items.size(); ++a) {
        if (!items[a].first.is_monomial()) continue;
        const ExpVec& ea = items[a].first.terms().begin()->first;
        for (size_t b = 0; b < items.size() && !drop[a]; ++b) {
            if (a == b || drop[b] || !items[b].first.is_monomial()) continue;
            const ExpVec& eb = items[b].first.terms().begin()->first;
            // q_a >= q_b componentwise means b already implies a
            bool dom = true, equal = true;
            std::set<VarName> keys;
            for (auto& [v, k] : ea) keys.insert(v);
            for (auto& [v, k] : eb) keys.insert(v);
            for (auto& v : keys) {
                Rat qa = Rat(exp_of(ea, v)) / items[a].second;
                Rat qb = Rat(exp_of(eb, v)) / items[b].second;
                if (qa < qb) dom = false;
                if (qa != qb) equal = false;
            }
            if (dom && (!equal || b < a)) drop[a] = true;
        }
    }
    MarkedSet out;
    for (size_t a = 0; a < items.size(); ++a)
        if (!drop[a]) out.push_back({items[a].first, items[a].second});
    return out;
}

Presentation transform(const Presentation& P, const Morphism& m, const VarName& target, int new_id) {
    if (new_id < 0) {
        new_id = 1;
        for (auto& [v, id] : P.exc) new_id = std::max(new_id, id + 1);
    }
    Presentation Q = P;
    switch (m.kind) {
        case MorphismKind::AdmissibleBlowup: {
            if (!m.centre.count(target)) throw InternalError("transform: chart variable outside centre");
            Q.marked.clear();
            for (auto& f : P.marked) {
                if (f.inert()) continue;
                long k = f.mu.get_den().get_si();
                Rat mu = f.mu * k;
                Poly h = blowup_subst(power_of(f.h, k), m.centre, target);
                Q.marked.push_back({divide_exc(h, target, mu.get_num().get_si()), mu});
            }
            Q.exc.erase(target);
            Q.exc[target] = new_id;
            break;
        }
        case MorphismKind::ProductWithLine: Q.exc[m.new_var] = new_id; break;
        case MorphismKind::ExceptionalBlowup: {
            if (!P.exc.count(m.h0) || !P.exc.count(m.h1))
                throw InternalError("transform: exceptional blowup needs two divisors");
            if (target != m.h0 && target != m.h1) throw InternalError("transform: bad chart for exceptional blowup");
            for (auto& f : Q.marked) f.h = blowup_subst(f.h, {m.h0, m.h1}, target);
            Q.exc[target] = new_id;
            break;
        }
    }
    return Q;
}

static bool stratum_ok(const MarkedSet& F, const std::set<VarName>& zero) {
    for (auto& f : F) {
        if (f.inert()) continue;
        ExtNat o = order_in(f.h, zero);
        if (!o.inf && Rat(o.v) < f.mu) return false;
    }
    return true;
}

static std::vector<std::set<VarName>> satisfying_zero_sets(const Presentation& P,
                                                           const std::vector<VarName>& chart_vars) {
    for (auto& f : P.marked)
        if (f.h.size() > 2) throw UnsupportedInput("marked function outside the binomial class: " + to_string(f.h));
    std::vector<VarName> free;
    std::set<VarName> base(P.contact_vars.begin(), P.contact_vars.end());
    for (auto& v : chart_vars)
        if (!base.count(v)) free.push_back(v);
    std::vector<std::set<VarName>> out;
    size_t n = free.size();
    for (size_t mask = 0; mask < (size_t(1) << n); ++mask) {
        std::set<VarName> z = base;
        for (size_t b = 0; b < n; ++b)
            if (mask >> b & 1) z.insert(free[b]);
        if (stratum_ok(P.marked, z)) out.push_back(z);
    }
    return out;
}

std::vector<StratumSpec> equimultiple_strata(const Presentation& P, const std::vector<VarName>& chart_vars) {
    auto all = satisfying_zero_sets(P, chart_vars);
    std::sort(all.begin(), all.end(), [](auto& a, auto& b) { return a.size() != b.size() ? a.size() < b.size() : a < b; });
    std::vector<std::set<VarName>> minimal;
    for (auto& z : all) {
        bool has_sub = false;
        for (auto& m : minimal)
            if (std::includes(z.begin(), z.end(), m.begin(), m.end())) has_sub = true;
        if (!has_sub) minimal.push_back(z);
    }
    std::vector<StratumSpec> out;
    for (auto& z : minimal) out.push_back(StratumSpec::with_zero(chart_vars, z));
    return out;
}

namespace {

struct RefuteState {
    Presentation p1, p2;
    std::vector<VarName> vars;
    std::vector<Morphism> seq;
    std::set<VarName> seeded;
};

std::vector<std::set<VarName>> zero_sets(const std::vector<StratumSpec>& ss) {
    std::vector<std::set<VarName>> out;
    for (auto& s : ss) out.push_back(s.zero);
    return out;
}

}  // namespace

RefuteResult equivalence_refute(const Presentation& P1, const Presentation& P2, const std::vector<VarName>& chart_vars,
                                int depth, const std::set<MorphismKind>& kinds) {
    RefuteResult res;
    std::deque<RefuteState> q;
    q.push_back({P1, P2, chart_vars, {}, {}});
    int line_counter = 0;
    while (!q.empty()) {
        RefuteState st = std::move(q.front());
        q.pop_front();
        ++res.explored;
        auto s1 = equimultiple_strata(st.p1, st.vars);
        auto s2 = equimultiple_strata(st.p2, st.vars);
        if (zero_sets(s1) != zero_sets(s2)) {
            res.witness = st.seq;
            return res;
        }
        if (static_cast<int>(st.seq.size()) >= depth) continue;
        int new_id = 1;
        for (auto* P : {&st.p1, &st.p2})
            for (auto& [v, id] : P->exc) new_id = std::max(new_id, id + 1);
        auto apply = [&](const Morphism& m, const VarName& chart, std::vector<VarName> vars, std::set<VarName> seeded) {
            try {
                RefuteState nx{transform(st.p1, m, chart, new_id), transform(st.p2, m, chart, new_id), std::move(vars),
                               st.seq, std::move(seeded)};
                nx.seq.push_back(m);
                q.push_back(std::move(nx));
            } catch (const NotDivisible&) {
                // centre left the locus for one side; that is itself a difference
                res.witness = st.seq;
                res.witness->push_back(m);
            }
        };
        if (kinds.count(MorphismKind::AdmissibleBlowup)) {
            std::set<VarName> contact(st.p1.contact_vars.begin(), st.p1.contact_vars.end());
            std::vector<std::set<VarName>> centres = zero_sets(s1);
            std::set<VarName> all(st.vars.begin(), st.vars.end());
            if (std::find(centres.begin(), centres.end(), all) == centres.end() && !s1.empty()) centres.push_back(all);
            for (auto& K : centres)
                for (auto& i : K) {
                    if (contact.count(i)) continue;
                    Morphism m;
                    m.kind = MorphismKind::AdmissibleBlowup;
                    m.centre = K;
                    m.chart_var = i;
                    apply(m, i, st.vars, st.seeded);
                    if (res.witness) return res;
                }
        }
        if (kinds.count(MorphismKind::ProductWithLine)) {
            Morphism m;
            m.kind = MorphismKind::ProductWithLine;
            m.new_var = "t" + std::to_string(++line_counter);
            auto vars = st.vars;
            vars.push_back(m.new_var);
            auto seeded = st.seeded;
            seeded.insert(m.new_var);
            apply(m, m.new_var, vars, seeded);
        }
        if (kinds.count(MorphismKind::ExceptionalBlowup)) {
            std::vector<VarName> ev;
            for (auto& [v, id] : st.p1.exc) ev.push_back(v);
            for (size_t a = 0; a < ev.size(); ++a)
                for (size_t b = a + 1; b < ev.size(); ++b) {
                    if (!st.seeded.count(ev[a]) && !st.seeded.count(ev[b])) {
                        ++res.unclassified;
                        continue;
                    }
                    for (auto& chart : {ev[a], ev[b]}) {
                        Morphism m;
                        m.kind = MorphismKind::ExceptionalBlowup;
                        m.h0 = ev[a];
                        m.h1 = ev[b];
                        m.chart_var = chart;
                        auto seeded = st.seeded;
                        seeded.insert(chart);
                        apply(m, chart, st.vars, seeded);
                        if (res.witness) return res;
                    }
                }
        }
    }
    return res;
}

std::string to_string(const MarkedFn& m, const std::vector<VarName>& order) {
    return "(" + to_string(m.h, order) + ", " + rat_str(m.mu) + ")";
}

std::string to_string(const MarkedSet& F, const std::vector<VarName>& order) {
    std::string s = "{";
    for (size_t i = 0; i < F.size(); ++i) s += (i ? ", " : "") + to_string(F[i], order);
    return s + "}";
}

std::string to_string(const Presentation& P, const DivisorRegistry* reg, const std::vector<VarName>& order) {
    std::string s = "contact: [";
    for (size_t i = 0; i < P.contact_vars.size(); ++i) s += (i ? ", " : "") + P.contact_vars[i];
    s += "]; marked: " + to_string(P.marked, order) + "; exc: {";
    bool first = true;
    for (auto& [v, id] : P.exc) {
        s += (first ? "" : ", ") + v + " -> divisor#" + std::to_string(id);
        if (reg && reg->count(id)) s += "@" + std::to_string(reg->at(id).birth_year);
        first = false;
    }
    return s + "}";
}

}  // namespace desing
