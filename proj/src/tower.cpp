#include "desing/tower.hpp"

#include <algorithm>
#include <functional>
#include <iomanip>
#include <sstream>

#include "json.hpp"

namespace desing {

namespace {

std::vector<std::set<VarName>> zero_sets_of(const std::vector<VarName>& vars) {
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

std::set<VarName> all_of(const std::vector<VarName>& vars) { return {vars.begin(), vars.end()}; }

const std::vector<Poly>& tracked_gens(const Tower& t, const Chart& c) {
    return t.mode == Mode::Embedded ? c.gens_strict : c.gens_weak;
}

bool off_support(const Tower& t, const Chart& c) {
    for (auto& g : tracked_gens(t, c))
        if (!g.is_zero() && min_degree(g) == 0) return true;
    return false;
}

long content_of(const Poly& h, const VarName& v) {
    long m = -1;
    for (auto& [e, c] : h.terms()) {
        long k = exp_of(e, v);
        if (m < 0 || k < m) m = k;
    }
    return m < 0 ? 0 : m;
}

std::vector<VarName> split_path(const std::string& path) {
    std::vector<VarName> out;
    if (path.find(',') != std::string::npos) {
        std::string cur;
        for (char c : path) {
            if (c == ',') {
                if (!cur.empty()) out.push_back(cur);
                cur.clear();
            } else if (c != ' ') {
                cur += c;
            }
        }
        if (!cur.empty()) out.push_back(cur);
    } else {
        for (char c : path)
            if (c != ' ') out.push_back(std::string(1, c));
    }
    return out;
}

std::optional<LocusFilter> chart_filter(const Tower& t, InvEngine& eng, int chart) {
    if (t.mode != Mode::Embedded) return LocusFilter::Support;
    if (!eng.max_locus(chart, LocusFilter::Singular).empty()) return LocusFilter::Singular;
    if (!eng.max_locus(chart, LocusFilter::OldDivisors).empty()) return LocusFilter::OldDivisors;
    return std::nullopt;
}

TraceRow make_row(const Tower& t, const Chart& c, const LocusComponent& top) {
    TraceRow r;
    r.year = c.year_created;
    r.chart = c.name;
    std::string s;
    for (auto& g : tracked_gens(t, c)) s += (s.empty() ? "" : ", ") + to_string(g, c.vars);
    r.transform = s;
    r.divisors = divisors_str(c);
    r.inv = top.value.base.str();
    r.centre = centre_str(top.stratum.zero, c.vars);
    return r;
}

void register_divisor(Tower& t, int id, int year) {
    if (!t.divisors.count(id)) t.divisors[id] = Divisor{id, year};
}

}  // namespace

Tower init(const std::vector<Poly>& gens, const std::vector<VarName>& vars, const std::vector<VarName>& initial_E,
           Mode mode, Variant variant) {
    if (gens.empty()) throw UnsupportedInput("no generators");
    if (vars.empty()) throw UnsupportedInput("no variables");
    std::set<VarName> vs(vars.begin(), vars.end());
    if (vs.size() != vars.size()) throw UnsupportedInput("repeated variable");
    for (auto& g : gens) {
        if (g.is_zero()) throw UnsupportedInput("zero generator");
        if (g.size() > 2) throw UnsupportedInput("generator outside the binomial class: " + to_string(g));
        for (auto& v : g.vars())
            if (!vs.count(v)) throw UnsupportedInput("variable " + v + " not declared");
    }
    Tower t;
    t.mode = mode;
    t.variant = variant;
    Chart root;
    root.id = 0;
    root.name = "U";
    root.vars = vars;
    root.gens_strict = root.gens_weak = root.gens_total = gens;
    int id = 0;
    for (auto& v : initial_E) {
        if (!vs.count(v)) throw UnsupportedInput("divisor variable " + v + " not declared");
        if (root.divisor_map.count(v)) throw UnsupportedInput("repeated divisor variable " + v);
        ++id;
        root.divisor_map[v] = id;
        t.divisors[id] = Divisor{id, 0};
    }
    root.dead = off_support(t, root);
    t.charts.push_back(root);
    return t;
}

std::vector<int> active_leaves(const Tower& t, InvEngine&) {
    std::vector<int> out;
    for (auto& c : t.charts)
        if (c.leaf && !c.dead) out.push_back(c.id);
    return out;
}

std::optional<LocusFilter> current_filter(const Tower& t, InvEngine& eng) {
    auto leaves = active_leaves(t, eng);
    if (leaves.empty()) return std::nullopt;
    if (t.mode != Mode::Embedded) return LocusFilter::Support;
    for (int c : leaves)
        if (!eng.max_locus(c, LocusFilter::Singular).empty()) return LocusFilter::Singular;
    for (int c : leaves)
        if (!eng.max_locus(c, LocusFilter::OldDivisors).empty()) return LocusFilter::OldDivisors;
    return std::nullopt;
}

Centre select_centre(const Tower& t, InvEngine& eng) {
    Centre out;
    auto f = current_filter(t, eng);
    if (!f) return out;
    std::vector<std::pair<int, LocusComponent>> tops;
    for (int c : active_leaves(t, eng)) {
        auto loci = eng.max_locus(c, *f);
        if (loci.empty()) continue;
        if (loci.size() > 1 && compare(loci[0].value, loci[1].value) == Order::Equal) out.tie = true;
        tops.push_back({c, loci[0]});
    }
    if (tops.empty()) return out;
    const ExtInv* best = &tops[0].second.value;
    for (auto& [c, l] : tops)
        if (compare(l.value, *best) == Order::Greater) best = &l.value;
    out.value = *best;
    for (auto& [c, l] : tops)
        if (compare(l.value, out.value) == Order::Equal) out.components.push_back({c, l.stratum.zero});
    out.year = t.year + 1;
    return out;
}

Centre select_centre(const Tower& t) {
    InvEngine eng(t, t.variant);
    return select_centre(t, eng);
}

std::vector<int> blow_up_chart(Tower& t, int chart, const std::set<VarName>& centre, int divisor_id,
                               const std::optional<VarName>& only) {
    if (centre.empty()) throw InternalError("empty centre");
    const Chart parent = t.charts.at(chart);
    int year = t.divisors.count(divisor_id) ? t.divisors.at(divisor_id).birth_year : t.year;
    long mu = -1;
    for (auto& g : parent.gens_weak) {
        ExtNat o = order_along(g, centre);
        if (!o.inf && (mu < 0 || o.v < mu)) mu = o.v;
    }
    if (mu < 0) mu = 0;
    std::vector<int> made;
    for (auto& i : parent.vars) {
        if (!centre.count(i)) continue;
        if (only && *only != i) continue;
        Chart c;
        c.id = int(t.charts.size());
        c.name = parent.parent < 0 ? "U_" + i : parent.name + i;
        c.parent = chart;
        c.branch_var = i;
        c.parent_centre = centre;
        c.vars = parent.vars;
        c.year_created = year;
        for (auto& g : parent.gens_total) c.gens_total.push_back(blowup_subst(g, centre, i));
        for (auto& g : parent.gens_weak) c.gens_weak.push_back(divide_exc(blowup_subst(g, centre, i), i, mu));
        c.gens_strict = c.gens_weak;
        Poly ef = blowup_subst(Poly::monomial(parent.exc_factor), centre, i);
        c.exc_factor = ef.terms().begin()->first;
        if (mu > 0) c.exc_factor = exp_add(c.exc_factor, {{i, mu}});
        c.divisor_map = parent.divisor_map;
        c.divisor_map.erase(i);
        c.divisor_map[i] = divisor_id;
        c.dead = off_support(t, c);
        t.charts.push_back(c);
        made.push_back(c.id);
    }
    Chart& p = t.charts.at(chart);
    p.leaf = false;
    for (int id : made) p.children.push_back(id);
    return made;
}

std::vector<int> blow_up(Tower& t, const Centre& c) {
    if (c.components.empty()) throw InternalError("blow_up with an empty centre");
    t.year += 1;
    int id = t.max_divisor_id() + 1;
    register_divisor(t, id, t.year);
    std::vector<int> made;
    for (auto& comp : c.components) {
        auto ch = blow_up_chart(t, comp.chart, comp.zero, id);
        made.insert(made.end(), ch.begin(), ch.end());
    }
    return made;
}

std::vector<std::string> check_new_charts(InvEngine& eng, const std::vector<int>& children, const ExtInv& centre_value) {
    std::vector<std::string> out;
    const Tower& t = eng.tower();
    for (int id : children) {
        const Chart& c = t.chart(id);
        if (c.dead) continue;
        auto origin = all_of(c.vars);
        const InvValue& a0 = eng.at(id, origin).value.base;
        const InvValue& b0 = eng.at(c.parent, image_in_parent(c, origin)).value.base;
        if (compare(a0, b0) > 0)
            out.push_back("semicontinuity: " + c.name + " origin " + a0.str() + " above image " + b0.str());
        for (auto& z : zero_sets_of(c.vars)) {
            if (!z.count(c.branch_var)) continue;
            const InvValue& a = eng.at(id, z).value.base;
            if (!a.on_support()) continue;
            const InvValue& b = eng.at(c.parent, image_in_parent(c, z)).value.base;
            if (compare(b, centre_value.base) != 0)
                out.push_back("centre value mismatch: " + c.name + " image of " + centre_str(z, c.vars) + " has " +
                              b.str() + ", centre " + centre_value.base.str());
            int cmp = compare(a, b);
            bool drop = cmp < 0;
            if (cmp == 0 && a.terminal == Terminal::Zero && a.mu_final && b.mu_final && *a.mu_final < *b.mu_final)
                drop = true;
            if (!drop)
                out.push_back("no strict decrease: " + c.name + " " + centre_str(z, c.vars) + " " + a.str_with_mu() +
                              " vs " + b.str_with_mu());
        }
    }
    return out;
}

RunResult run(Tower t0, int max_years) {
    RunResult res;
    res.tower = std::move(t0);
    Tower& t = res.tower;
    res.stop.mode = t.mode;
    InvEngine eng(t, t.variant);
    try {
        while (true) {
            Centre c = select_centre(t, eng);
            if (c.components.empty()) {
                res.stop.reached = true;
                break;
            }
            if (t.mode == Mode::Weak && c.value.base == InvValue::parse("(1,0; inf)")) {
                res.stop.reached = true;
                break;
            }
            if (t.year >= max_years) {
                res.error = "YearBudgetExceeded: " + std::to_string(max_years) + " years";
                break;
            }
            if (c.tie) res.notes.push_back("year " + std::to_string(t.year + 1) + ": tie between chart-local components");
            for (auto& comp : c.components) {
                const Chart& ch = t.chart(comp.chart);
                res.rows.push_back(make_row(t, ch, LocusComponent{StratumSpec{ch.vars, comp.zero}, c.value}));
            }
            auto made = blow_up(t, c);
            res.centres.push_back(c);
            bool stuck = false;
            for (auto& v : check_new_charts(eng, made, c.value)) {
                res.violations.push_back("year " + std::to_string(t.year) + ": " + v);
                stuck = stuck || v.rfind("no strict decrease", 0) == 0;
            }
            if (uses_villamayor_block(t.variant))
                for (int id : made)
                    for (auto& v : lemma_3_7_check(eng, id)) res.violations.push_back("lemma 3.7: " + v);
            // the true maximum sits off the coordinate strata (e.g. X a graph w = y^2 meeting old
            // divisors along a curve); the origin is blown up instead and the value repeats forever
            if (stuck) {
                res.error = "NonCoordinateCentre: maximum locus not a coordinate subspace in year " +
                            std::to_string(t.year);
                break;
            }
        }
    } catch (const Error& e) {
        res.error = e.what();
    }
    for (auto& s : eng.integrality_failures()) res.violations.push_back(s);

    if (res.stop.reached) {
        std::ostringstream w;
        if (t.mode == Mode::Principalize) {
            w << "every leaf has unit weak transform";
        } else if (t.mode == Mode::Embedded) {
            w << "strict transform smooth, no point with s_1 > 0";
        } else {
            size_t checked = 0, failed = 0;
            for (int id : active_leaves(t, eng)) {
                const Chart& c = t.chart(id);
                for (auto& z : zero_sets_of(c.vars)) {
                    if (!eng.at(id, z).value.base.on_support()) continue;
                    ++checked;
                    auto sr = lemma_6_3_structure_check(c, StratumSpec{c.vars, z});
                    if (!sr.ok) {
                        ++failed;
                        res.violations.push_back("structure check: " + c.name + " " + centre_str(z, c.vars) + ": " +
                                                 sr.failure);
                    }
                }
            }
            w << "max value (1,0; inf); structure check on " << checked << " strata, " << failed << " failures";
        }
        res.stop.witness = w.str();
    }
    return res;
}

BranchRun follow_branch(const std::vector<Poly>& gens, const std::vector<VarName>& vars, const std::string& path,
                        Variant variant, long order, bool stop_at_drop, Mode mode) {
    BranchRun br;
    br.tower = init(gens, vars, {}, mode, variant);
    Tower& t = br.tower;
    InvEngine eng(t, variant);
    auto letters = split_path(path);
    int cur = 0;
    br.lineage.push_back(0);
    try {
        ExtNat d0 = order < 0 ? eng.at(0, all_of(vars)).value.base.iota : ExtNat::of(order);
        for (size_t k = 0;; ++k) {
            const Chart& ch = t.chart(cur);
            ExtNat o = eng.at(cur, all_of(ch.vars)).value.base.iota;
            if (o < d0 && br.drop_year < 0) {
                br.drop_year = ch.year_created;
                if (stop_at_drop) break;
            }
            auto f = chart_filter(t, eng, cur);
            if (!f) break;
            auto loci = eng.max_locus(cur, *f);
            br.loci.push_back(loci);
            if (loci.empty()) break;
            br.rows.push_back(make_row(t, ch, loci[0]));
            if (k == letters.size()) break;
            const VarName& v = letters[k];
            const auto& centre = loci[0].stratum.zero;
            if (!centre.count(v)) {
                br.error = "branch letter " + v + " is not a centre variable in " + ch.name + " (centre " +
                           centre_str(centre, ch.vars) + ")";
                break;
            }
            int year = ch.year_created + 1;
            t.year = std::max(t.year, year);
            register_divisor(t, year, year);
            auto made = blow_up_chart(t, cur, centre, year, v);
            for (auto& s : check_new_charts(eng, made, loci[0].value))
                br.violations.push_back("year " + std::to_string(year) + ": " + s);
            if (uses_villamayor_block(variant))
                for (auto& s : lemma_3_7_check(eng, made[0])) br.violations.push_back("lemma 3.7: " + s);
            cur = made[0];
            br.lineage.push_back(cur);
        }
    } catch (const Error& e) {
        br.error = e.what();
    }
    for (auto& s : eng.integrality_failures()) br.violations.push_back(s);
    return br;
}

ExploreResult explore_drop(const std::vector<Poly>& gens, const std::vector<VarName>& vars, Variant variant,
                           long order, int max_depth, const std::string& prefix) {
    ExploreResult er;
    auto fixed = split_path(prefix);
    Tower t = init(gens, vars, {}, Mode::Embedded, variant);
    InvEngine eng(t, variant);
    ExtNat d0 = order < 0 ? eng.at(0, all_of(vars)).value.base.iota : ExtNat::of(order);
    std::function<void(int, int, const std::string&)> go = [&](int cur, int depth, const std::string& path) {
        const Chart& ch = t.chart(cur);
        ExtNat o = eng.at(cur, all_of(ch.vars)).value.base.iota;
        if (o < d0) {
            if (depth > er.deepest_drop) {
                er.deepest_drop = depth;
                er.deepest_path = path;
            }
            return;
        }
        if (depth >= max_depth) {
            er.violations.push_back("depth budget reached along " + path);
            return;
        }
        auto f = chart_filter(t, eng, cur);
        if (!f) return;
        auto loci = eng.max_locus(cur, *f);
        if (loci.empty()) return;
        int year = depth + 1;
        t.year = std::max(t.year, year);
        register_divisor(t, year, year);
        auto made = blow_up_chart(t, cur, loci[0].stratum.zero, year);
        for (auto& s : check_new_charts(eng, made, loci[0].value)) er.violations.push_back(s);
        for (int id : made) {
            if (t.chart(id).dead) continue;
            if (depth < static_cast<int>(fixed.size()) && t.chart(id).branch_var != fixed[depth]) continue;
            go(id, depth + 1, path + t.chart(id).branch_var);
        }
    };
    go(0, 0, "");
    er.charts = t.charts.size();
    for (auto& s : eng.integrality_failures()) er.violations.push_back(s);
    return er;
}

StructureResult lemma_6_3_structure_check(const Chart& c, const StratumSpec& s, const std::vector<Poly>& gens) {
    StructureResult r;
    std::set<VarName> exc;
    for (auto& [v, id] : c.divisor_map)
        if (s.is_zero(v)) exc.insert(v);
    std::vector<ExpVec> contents;
    std::set<VarName> linear;
    for (auto& g : gens) {
        if (g.is_zero()) continue;
        ExtNat o0 = order_in(g, s.zero);
        if (!o0.inf && o0.v == 0) {
            r.failure = "generator is a unit at the stratum";
            return r;
        }
        ExpVec m;
        Poly q = g;
        for (auto& v : exc) {
            long k = content_of(q, v);
            if (k > 0) {
                m[v] = k;
                q = divide_exc(q, v, k);
            }
        }
        ExtNat o = order_in(q, s.zero);
        if (o.inf || o.v != 1) {
            r.failure = "generator " + to_string(g, c.vars) + " is not an exceptional monomial times an order-one function";
            return r;
        }
        VarName lin;
        for (auto& [e, coef] : q.terms())
            if (zero_degree(e, s.zero) == 1)
                for (auto& [v, k] : e)
                    if (s.is_zero(v) && !exc.count(v) && lin.empty()) lin = v;
        if (lin.empty())
            for (auto& [e, coef] : q.terms())
                if (zero_degree(e, s.zero) == 1)
                    for (auto& [v, k] : e)
                        if (s.is_zero(v) && lin.empty()) lin = v;
        if (linear.count(lin)) {
            r.failure = "two generators share the linear coordinate " + lin;
            return r;
        }
        linear.insert(lin);
        contents.push_back(m);
    }
    std::sort(contents.begin(), contents.end(),
              [](const ExpVec& a, const ExpVec& b) { return degree(a) < degree(b); });
    if (!contents.empty() && !contents[0].empty()) {
        r.failure = "no generator is free of exceptional factors";
        return r;
    }
    for (size_t i = 1; i < contents.size(); ++i)
        if (!divides(contents[i - 1], contents[i])) {
            r.failure = "exceptional exponents are not a chain";
            return r;
        }
    r.ok = true;
    r.t = int(contents.size());
    r.theta.assign(contents.begin() + (contents.empty() ? 0 : 1), contents.end());
    return r;
}

StructureResult lemma_6_3_structure_check(const Chart& c, const StratumSpec& s) {
    return lemma_6_3_structure_check(c, s, c.gens_weak);
}

std::vector<std::set<VarName>> monomial_components(const FracMono& omega) {
    std::vector<VarName> vs;
    for (auto& [v, r] : omega)
        if (r > 0) vs.push_back(v);
    std::vector<std::set<VarName>> hits;
    for (auto& z : zero_sets_of(vs)) {
        Rat s = 0;
        for (auto& v : z) s += omega.at(v);
        if (!z.empty() && s >= 1) hits.push_back(z);
    }
    std::vector<std::set<VarName>> out;
    for (auto& z : hits) {
        bool minimal = true;
        for (auto& y : hits)
            if (y.size() < z.size() && std::includes(z.begin(), z.end(), y.begin(), y.end())) minimal = false;
        if (minimal) out.push_back(z);
    }
    return out;
}

std::string centre_str(const std::set<VarName>& zero, const std::vector<VarName>& vars) {
    if (!zero.empty() && zero.size() == vars.size()) return "{0}";
    std::string s = "{";
    bool first = true;
    for (auto it = vars.rbegin(); it != vars.rend(); ++it) {
        if (!zero.count(*it)) continue;
        s += (first ? "" : "=") + *it;
        first = false;
    }
    return s + "=0}";
}

std::string divisors_str(const Chart& c) {
    std::string s;
    for (auto& v : c.vars) {
        auto it = c.divisor_map.find(v);
        if (it == c.divisor_map.end()) continue;
        s += (s.empty() ? "" : " ") + v + ":H" + std::to_string(it->second);
    }
    return s.empty() ? "-" : s;
}

std::string format_rows(const std::vector<TraceRow>& rows) {
    // columns are separated by at least two spaces so fixture_diff can split them
    static const int w[] = {6, 24, 40, 24, 40};
    std::ostringstream os;
    auto cell = [&](const std::string& s, int width) {
        os << s;
        int pad = width - static_cast<int>(s.size());
        os << std::string(pad >= 2 ? pad : 2, ' ');
    };
    auto line = [&](const std::string& a, const std::string& b, const std::string& c, const std::string& d,
                    const std::string& e, const std::string& f) {
        cell(a, w[0]);
        cell(b, w[1]);
        cell(c, w[2]);
        cell(d, w[3]);
        cell(e, w[4]);
        os << f << "\n";
    };
    line("Year", "Chart", "Strict transform", "Exceptional", "inv", "Centre");
    for (auto& r : rows) line(std::to_string(r.year), r.chart, r.transform, r.divisors, r.inv, r.centre);
    return os.str();
}

std::string to_dot(const Tower& t) {
    std::ostringstream os;
    os << "digraph tower {\n";
    for (auto& c : t.charts) {
        std::string g;
        for (auto& p : c.gens_strict) g += (g.empty() ? "" : ", ") + to_string(p, c.vars);
        os << "  c" << c.id << " [label=\"" << c.name << "\\n" << g << "\\n" << divisors_str(c) << "\"";
        if (c.dead) os << " style=dashed";
        os << "];\n";
    }
    for (auto& c : t.charts)
        if (c.parent >= 0) os << "  c" << c.parent << " -> c" << c.id << " [label=\"" << c.branch_var << "\"];\n";
    os << "}\n";
    return os.str();
}

std::string to_json(const Tower& t, const std::vector<Centre>& centres) {
    using nlohmann::json;
    json j;
    j["mode"] = to_string(t.mode);
    j["variant"] = to_string(t.variant);
    j["charts"] = json::array();
    for (auto& c : t.charts) {
        json jc;
        jc["id"] = c.id;
        jc["name"] = c.name;
        jc["parent"] = c.parent;
        jc["branch_var"] = c.branch_var;
        jc["vars"] = c.vars;
        jc["year_created"] = c.year_created;
        jc["leaf"] = c.leaf;
        jc["dead"] = c.dead;
        json dm = json::object();
        for (auto& [v, id] : c.divisor_map) dm[v] = id;
        jc["divisors"] = dm;
        for (auto* key : {"strict", "weak", "total"}) {
            const auto& gs = std::string(key) == "strict" ? c.gens_strict
                             : std::string(key) == "weak" ? c.gens_weak
                                                          : c.gens_total;
            json arr = json::array();
            for (auto& g : gs) arr.push_back(to_string(g, c.vars));
            jc[key] = arr;
        }
        j["charts"].push_back(jc);
    }
    j["divisors"] = json::array();
    for (auto& [id, d] : t.divisors) j["divisors"].push_back({{"id", id}, {"birth_year", d.birth_year}});
    j["years"] = json::array();
    for (auto& c : centres) {
        json jy;
        jy["year"] = c.year;
        jy["value"] = c.value.base.str();
        json comps = json::array();
        for (auto& comp : c.components)
            comps.push_back({{"chart", t.chart(comp.chart).name},
                             {"centre", centre_str(comp.zero, t.chart(comp.chart).vars)}});
        jy["components"] = comps;
        j["years"].push_back(jy);
    }
    return j.dump(2);
}

}  // namespace desing
