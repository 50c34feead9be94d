#include "desing/cli.hpp"

#include <CLI11.hpp>

#include <cctype>
#include <fstream>
#include <iostream>
#include <regex>
#include <sstream>

namespace desing {

namespace {

// integer expressions in d: + - * and parentheses
struct ExprParser {
    const std::string& s;
    size_t i;
    long d;

    void ws() {
        while (i < s.size() && s[i] == ' ') ++i;
    }
    long primary() {
        ws();
        if (i >= s.size()) throw UnsupportedInput("family exponent ends early");
        if (s[i] == '(') {
            ++i;
            long v = sum();
            ws();
            if (i >= s.size() || s[i] != ')') throw UnsupportedInput("unbalanced parenthesis in family exponent");
            ++i;
            return v;
        }
        if (s[i] == '-') {
            ++i;
            return -primary();
        }
        if (s[i] == 'd' && (i + 1 >= s.size() || !std::isalnum(static_cast<unsigned char>(s[i + 1])))) {
            ++i;
            return d;
        }
        if (std::isdigit(static_cast<unsigned char>(s[i]))) {
            long v = 0;
            while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) v = v * 10 + (s[i++] - '0');
            return v;
        }
        throw UnsupportedInput(std::string("unexpected '") + s[i] + "' in family exponent");
    }
    long product() {
        long v = primary();
        for (;;) {
            ws();
            if (i < s.size() && s[i] == '*') {
                ++i;
                v *= primary();
            } else {
                return v;
            }
        }
    }
    long sum() {
        long v = product();
        for (;;) {
            ws();
            if (i < s.size() && (s[i] == '+' || s[i] == '-')) {
                char op = s[i++];
                long w = product();
                v = op == '+' ? v + w : v - w;
            } else {
                return v;
            }
        }
    }
};

std::vector<std::string> split_top(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    int depth = 0;
    for (char c : s) {
        if (c == '(') ++depth;
        if (c == ')') --depth;
        if (c == sep && depth == 0) {
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
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> cells(const std::string& line) {
    static const std::regex sep("\\s{2,}");
    std::vector<std::string> out;
    std::string t = trim(line);
    std::sregex_token_iterator it(t.begin(), t.end(), sep, -1), end;
    for (; it != end; ++it) out.push_back(*it);
    return out;
}

std::vector<std::string> table_lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        out.push_back(line);
    }
    return out;
}

std::vector<std::pair<long, long>> sweep_range(const RunConfig& cfg) {
    std::vector<std::pair<long, long>> v;
    if (cfg.sweep) {
        for (long d = cfg.sweep->first; d <= cfg.sweep->second; ++d) v.push_back({d, d});
    } else if (cfg.d) {
        v.push_back({*cfg.d, *cfg.d});
    }
    return v;
}

std::vector<VarName> parse_list(const std::string& s) {
    std::vector<VarName> out;
    for (auto& p : split_top(s, ',')) {
        std::string t = trim(p);
        if (!t.empty()) out.push_back(t);
    }
    return out;
}

std::string describe(const std::exception& e) {
    if (dynamic_cast<const UnsupportedInput*>(&e)) return std::string("UnsupportedInput: ") + e.what();
    if (dynamic_cast<const ParseError*>(&e)) return std::string("ParseError: ") + e.what();
    if (dynamic_cast<const ContactNotFound*>(&e)) return std::string("ContactNotFound: ") + e.what();
    if (dynamic_cast<const InternalError*>(&e)) return std::string("InternalError: ") + e.what();
    return e.what();
}

int max_years_for(const RunConfig& cfg, long d) {
    if (cfg.max_years > 0) return cfg.max_years;
    return d > 0 ? static_cast<int>(12 * d) : 200;
}

}  // namespace

std::string substitute_family(const std::string& family, long d) {
    if (d < 2) throw UnsupportedInput("family parameter d must be at least 2");
    std::string out;
    size_t i = 0;
    while (i < family.size()) {
        char c = family[i];
        if (c == '^') {
            out += '^';
            ExprParser p{family, i + 1, d};
            long v = p.primary();
            if (v < 0) throw UnsupportedInput("negative exponent after substituting d = " + std::to_string(d));
            out += std::to_string(v);
            i = p.i;
            continue;
        }
        if (c == 'd') {
            bool left = i > 0 && (std::isalnum(static_cast<unsigned char>(family[i - 1])) || family[i - 1] == '_');
            bool right = i + 1 < family.size() &&
                         (std::isalnum(static_cast<unsigned char>(family[i + 1])) || family[i + 1] == '_');
            if (!left && !right) throw UnsupportedInput("parameter d outside an exponent");
        }
        out += c;
        ++i;
    }
    return out;
}

std::vector<Poly> load_ideal(const RunConfig& cfg, long d) {
    std::string text;
    int given = !cfg.ideal.empty() + !cfg.input.empty() + !cfg.family.empty();
    if (given != 1) throw UnsupportedInput("exactly one of --ideal, --input, --family is required");
    if (!cfg.ideal.empty()) {
        text = cfg.ideal;
    } else if (!cfg.input.empty()) {
        std::ifstream f(cfg.input);
        if (!f) throw UnsupportedInput("cannot read " + cfg.input);
        std::string line;
        while (std::getline(f, line)) {
            auto h = line.find('#');
            if (h != std::string::npos) line = line.substr(0, h);
            if (trim(line).empty()) continue;
            text += (text.empty() ? "" : ",") + line;
        }
    } else {
        text = substitute_family(cfg.family, d);
    }
    std::vector<Poly> gens;
    for (auto& part : split_top(text, ',')) {
        if (trim(part).empty()) continue;
        gens.push_back(parse_poly(part));
    }
    if (gens.empty()) throw UnsupportedInput("empty ideal");
    for (auto& g : gens)
        if (g.is_zero()) throw UnsupportedInput("zero generator");
    return gens;
}

std::vector<Poly> load_ideal(const RunConfig& cfg) {
    if (!cfg.family.empty() && !cfg.d) throw UnsupportedInput("--family needs --d");
    return load_ideal(cfg, cfg.d.value_or(0));
}

std::vector<VarName> default_vars(const std::vector<Poly>& gens) {
    std::set<VarName> vs;
    for (auto& g : gens)
        for (auto& v : g.vars()) vs.insert(v);
    return {vs.begin(), vs.end()};
}

std::string villamayor_drop_path(long d) {
    if (d < 5) throw UnsupportedInput("the Villamayor drop branch needs d >= 5");
    std::string p = "wyxw";
    p += "wwwxwwxwwx";
    for (long k = 0; k < d - 5; ++k) p += "wx";
    p += std::string(static_cast<size_t>(7 * d - 25), 'w');
    return p;
}

std::string FixtureDiff::str() const {
    std::string s;
    for (auto& l : lines) s += l + "\n";
    return s;
}

FixtureDiff fixture_diff(const std::string& trace, const std::string& golden) {
    FixtureDiff out;
    auto got = table_lines(trace);
    auto want = table_lines(golden);
    std::vector<std::string> header = want.empty() ? std::vector<std::string>{} : cells(want[0]);
    auto label = [&](const std::vector<std::string>& c, size_t k) {
        if (k == 0) return std::string("header");
        return "year " + (c.empty() ? std::string("?") : c[0]);
    };
    size_t n = std::max(got.size(), want.size());
    for (size_t k = 0; k < n; ++k) {
        if (k >= got.size()) {
            out.lines.push_back(label(cells(want[k]), k) + ": missing from trace");
            continue;
        }
        if (k >= want.size()) {
            out.lines.push_back(label(cells(got[k]), k) + ": not in fixture");
            continue;
        }
        auto g = cells(got[k]);
        auto w = cells(want[k]);
        for (size_t j = 0; j < std::max(g.size(), w.size()); ++j) {
            std::string col = j < header.size() ? header[j] : "column " + std::to_string(j + 1);
            std::string a = j < w.size() ? w[j] : "";
            std::string b = j < g.size() ? g[j] : "";
            if (a == "*" || a == b) continue;
            out.lines.push_back(label(w, k) + ", " + col + ": expected '" + a + "', got '" + b + "'");
        }
    }
    return out;
}

DropReport drop_report(const RunConfig& cfg, long d) {
    DropReport r;
    r.d = d;
    try {
        auto gens = load_ideal(cfg, d);
        auto vars = cfg.vars.empty() ? default_vars(gens) : cfg.vars;
        long order = cfg.order > 0 ? cfg.order : d;
        if (uses_villamayor_block(cfg.variant)) {
            r.path = cfg.path.empty() ? villamayor_drop_path(d) : cfg.path;
        } else {
            auto ex = explore_drop(gens, vars, cfg.variant, order, max_years_for(cfg, d), cfg.path);
            r.violations = ex.violations;
            r.path = ex.deepest_path;
        }
        auto br = follow_branch(gens, vars, r.path, cfg.variant, order, true, cfg.mode);
        InvEngine eng(br.tower, cfg.variant);
        for (size_t k = 0; k < br.lineage.size(); ++k) {
            const Chart& c = br.tower.chart(br.lineage[k]);
            DropPoint p;
            p.year = c.year_created;
            p.chart = c.name;
            std::set<VarName> all(c.vars.begin(), c.vars.end());
            p.order = eng.at(c.id, all).value.base.iota;
            p.inv = k < br.rows.size() ? br.rows[k].inv : eng.at(c.id, all).value.base.str();
            r.points.push_back(p);
        }
        r.drop_year = br.drop_year;
        for (auto& v : br.violations) r.violations.push_back(v);
        if (!br.error.empty()) r.error = br.error;
    } catch (const Error& e) {
        r.error = e.what();
    }
    return r;
}

std::string format_drop_report(const DropReport& r) {
    std::ostringstream os;
    os << "# d = " << r.d << ", branch " << (r.path.empty() ? "-" : r.path) << "\n";
    os << std::left << std::setw(6) << "Year" << std::setw(8) << "Order" << std::setw(40) << "inv" << "Chart\n";
    for (auto& p : r.points)
        os << std::left << std::setw(6) << p.year << std::setw(8) << p.order.str() << std::setw(40) << p.inv
           << p.chart << "\n";
    if (r.drop_year >= 0)
        os << "drop year " << r.drop_year << "\n";
    else
        os << "no drop\n";
    if (!r.error.empty()) os << "error: " << r.error << "\n";
    return os.str();
}

int run_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Blowup towers for binomial ideals"};
    RunConfig cfg;
    std::string vars, E, variant = "bm", mode = "embedded", sweep;
    long d = 0;
    app.add_option("--ideal", cfg.ideal, "generators, comma separated");
    app.add_option("--input", cfg.input, "file with one generator per line");
    app.add_option("--family", cfg.family, "generators with exponents in d");
    app.add_option("--d", d, "family parameter")->check(CLI::Range(2L, 1000L));
    app.add_option("--vars", vars, "ordered variable list");
    app.add_option("--E", E, "initial divisor variables");
    app.add_option("--variant", variant, "bm|v|ev-bm|ev-v");
    app.add_option("--mode", mode, "principalize|embedded|weak");
    app.add_option("--max-years", cfg.max_years, "year budget");
    app.add_option("--format", cfg.format, "table|json|dot")->check(CLI::IsMember({"table", "json", "dot"}));
    app.add_option("--fixture", cfg.fixture, "golden table to diff against");
    app.add_option("--path", cfg.path, "follow one chart branch, e.g. wyxw");
    app.add_option("--sweep", sweep, "range d1..d2");
    app.add_flag("--sweep-report", cfg.sweep_report, "order-drop report along a branch");
    app.add_option("--order", cfg.order, "order tracked by the drop report (default d)");
    app.add_flag("-v,--verbose", cfg.verbosity, "more output");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        std::ostringstream o, er;
        int code = app.exit(e, o, er);
        out << o.str();
        err << er.str();
        return code == 0 ? 0 : 1;
    }

    try {
        cfg.variant = parse_variant(variant);
        cfg.mode = parse_mode(mode);
        if (d) cfg.d = d;
        cfg.vars = parse_list(vars);
        cfg.E = parse_list(E);
        if (!sweep.empty()) {
            auto dots = sweep.find("..");
            if (dots == std::string::npos) throw UnsupportedInput("--sweep expects d1..d2");
            long a = std::stol(sweep.substr(0, dots)), b = std::stol(sweep.substr(dots + 2));
            if (a < 2 || b < a) throw UnsupportedInput("--sweep range must satisfy 2 <= d1 <= d2");
            cfg.sweep = std::make_pair(a, b);
        }
        if (!cfg.family.empty() && !cfg.d && !cfg.sweep) throw UnsupportedInput("--family needs --d or --sweep");
        if (cfg.family.empty() && cfg.sweep) throw UnsupportedInput("--sweep needs --family");
    } catch (const std::exception& e) {
        err << "error: " << describe(e) << "\n";
        return 1;
    }

    try {
        if (cfg.sweep_report) {
            if (cfg.family.empty()) throw UnsupportedInput("--sweep-report needs --family");
            int code = 0;
            int prev = -1;
            for (auto [dd, _] : sweep_range(cfg)) {
                auto r = drop_report(cfg, dd);
                out << format_drop_report(r);
                if (prev >= 0 && r.drop_year >= 0) out << "difference " << r.drop_year - prev << "\n";
                prev = r.drop_year;
                for (auto& v : r.violations) err << "violation: " << v << "\n";
                if (!r.error.empty() || !r.violations.empty()) code = 1;
            }
            return code;
        }
        if (cfg.sweep) {
            int code = 0;
            for (auto [dd, _] : sweep_range(cfg)) {
                auto gens = load_ideal(cfg, dd);
                auto vs = cfg.vars.empty() ? default_vars(gens) : cfg.vars;
                auto res = run(init(gens, vs, cfg.E, cfg.mode, cfg.variant), max_years_for(cfg, dd));
                out << "d=" << dd << " years " << res.tower.year << " charts " << res.tower.charts.size()
                    << (res.stop.reached ? " reached" : " stopped: " + res.error) << "\n";
                if (!res.stop.reached) code = std::max(code, res.error.rfind("YearBudgetExceeded", 0) == 0 ? 2 : 1);
            }
            return code;
        }

        auto gens = load_ideal(cfg);
        auto vs = cfg.vars.empty() ? default_vars(gens) : cfg.vars;
        std::vector<TraceRow> rows;
        std::vector<std::string> violations;
        int code = 0;
        std::string text;
        if (!cfg.path.empty()) {
            auto br = follow_branch(gens, vs, cfg.path, cfg.variant, -1, false, cfg.mode);
            rows = br.rows;
            violations = br.violations;
            if (cfg.format == "json")
                text = to_json(br.tower, {});
            else if (cfg.format == "dot")
                text = to_dot(br.tower);
            else
                text = format_rows(rows);
            if (!br.error.empty()) {
                err << "error: " << br.error << "\n";
                code = 1;
            }
        } else {
            auto res = run(init(gens, vs, cfg.E, cfg.mode, cfg.variant), max_years_for(cfg, cfg.d.value_or(0)));
            rows = res.rows;
            violations = res.violations;
            if (cfg.format == "json")
                text = to_json(res.tower, res.centres);
            else if (cfg.format == "dot")
                text = to_dot(res.tower);
            else
                text = format_rows(rows) + "# years " + std::to_string(res.tower.year) + ", " +
                       (res.stop.reached ? "stop: " + res.stop.witness : "stopped: " + res.error) + "\n";
            if (cfg.verbosity)
                for (auto& n : res.notes) err << "note: " << n << "\n";
            if (!res.stop.reached) {
                err << "error: " << res.error << "\n";
                code = res.error.rfind("YearBudgetExceeded", 0) == 0 ? 2 : 1;
            }
        }
        out << text;
        for (auto& v : violations) err << "violation: " << v << "\n";
        if (!violations.empty() && code == 0) code = 1;
        if (!cfg.fixture.empty()) {
            std::ifstream f(cfg.fixture);
            if (!f) throw UnsupportedInput("cannot read fixture " + cfg.fixture);
            std::stringstream golden;
            golden << f.rdbuf();
            auto diff = fixture_diff(format_rows(rows), golden.str());
            if (!diff.empty()) {
                err << diff.str();
                if (code == 0) code = 1;
            } else {
                err << "fixture: no differences\n";
            }
        }
        return code;
    } catch (const YearBudgetExceeded& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << describe(e) << "\n";
        return 1;
    }
}

}  // namespace desing
