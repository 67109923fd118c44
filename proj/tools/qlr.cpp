#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "qlr/error.hpp"
#include "qlr/finite_qlr.hpp"
#include "qlr/lambda.hpp"
#include "qlr/ll.hpp"
#include "qlr/quantale.hpp"
#include "qlr/report.hpp"
#include "qlr/run_config.hpp"
#include "qlr/semantics.hpp"
#include "qlr/suites.hpp"
#include "qlr/valuation.hpp"

using namespace qlr;
using nlohmann::json;

namespace {

constexpr int kPass = 0;
constexpr int kAssertFail = 1;
constexpr int kUsage = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A syntax or type error attributed to an input, printed as origin:line:col: kind: message.
struct SourceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string strip_position(const PositionedError& e) {
    std::string w = e.what();
    auto p = w.find(": ");
    return p == std::string::npos ? w : w.substr(p + 2);
}

[[noreturn]] void rethrow_positioned(const std::string& origin) {
    try {
        throw;
    } catch (const SyntaxError& e) {
        throw SourceError(origin + ":" + std::to_string(e.line()) + ":" + std::to_string(e.column()) +
                          ": syntax error: " + strip_position(e));
    } catch (const TypeError& e) {
        throw SourceError(origin + ":" + std::to_string(e.line()) + ":" + std::to_string(e.column()) +
                          ": type error: " + strip_position(e));
    }
}

struct Source {
    std::string origin;
    TermP term;
    TypeP type; // null for contexts
};

Source load(const std::string& arg, bool inline_src, bool is_context = false) {
    Source s;
    std::string text;
    if (inline_src) {
        s.origin = "<inline>";
        text = arg;
    } else {
        s.origin = arg;
        std::ifstream in(arg, std::ios::binary);
        if (!in) throw UsageError("cannot open " + arg);
        std::stringstream ss;
        ss << in.rdbuf();
        text = ss.str();
    }
    try {
        s.term = parse_term(text);
        if (!is_context) s.type = typecheck(s.term);
    } catch (const PositionedError&) {
        rethrow_positioned(s.origin);
    }
    return s;
}

struct Common {
    RunConfigFlags flags;
    std::string model, format, config;
    std::size_t grid = 0;
    std::vector<double> radii;
    double tol = 0;
    std::uint64_t seed = 0;
    CLI::Option *o_model = nullptr, *o_format, *o_config, *o_grid, *o_radii, *o_tol, *o_seed;

    void attach(CLI::App* sc, bool with_model) {
        if (with_model) o_model = sc->add_option("--model", model, "q | qr | pv | ll");
        o_format = sc->add_option("--format", format, "text | json | csv");
        o_config = sc->add_option("--config", config, std::string("JSON config file (default: $") + kConfigEnv + ")");
        o_grid = sc->add_option("--grid", grid, "sampling resolution per argument (>= 3)");
        o_radii = sc->add_option("--radius,--radii", radii, "probe radii")->delimiter(',');
        o_tol = sc->add_option("--tol", tol, "comparison tolerance (> 0)");
        o_seed = sc->add_option("--seed", seed, "random seed");
    }

    RunConfig resolve() {
        if (o_model && o_model->count()) flags.model = model;
        if (o_format->count()) flags.format = format;
        if (o_config->count()) flags.config_path = config;
        if (o_grid->count()) flags.grid = grid;
        if (o_radii->count()) flags.radii = radii;
        if (o_tol->count()) flags.tol = tol;
        if (o_seed->count()) flags.seed = seed;
        try {
            return resolve_config(flags);
        } catch (const DomainError& e) {
            throw UsageError(e.what());
        }
    }
};

std::string join_reals(const std::vector<double>& v, const char* sep) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? sep : "") + fmt_real(v[i]);
    return out;
}

// ---------------------------------------------------------------- check

int cmd_check(const std::string& file, bool inline_src, const std::string& hole, const std::string& format) {
    Source s;
    TypeP type;
    if (hole.empty()) {
        s = load(file, inline_src);
        type = s.type;
    } else {
        s = load(file, inline_src, true);
        TypeP h;
        try {
            h = parse_type(hole);
        } catch (const PositionedError& e) {
            throw UsageError("bad --hole type: " + std::string(e.what()));
        }
        try {
            type = typecheck(s.term, {}, h);
        } catch (const PositionedError&) {
            rethrow_positioned(s.origin);
        }
    }
    if (format == "json")
        std::cout << json{{"command", "check"}, {"file", s.origin}, {"type", to_string(type)}}.dump(2) << '\n';
    else if (format == "csv")
        std::cout << "# qlr-check v1\nfile,type\n" << s.origin << ',' << to_string(type) << '\n';
    else
        std::cout << to_string(type) << '\n';
    return kPass;
}

// ---------------------------------------------------------------- eval

int cmd_eval(const std::string& file, bool inline_src, const std::vector<double>& args, const std::string& format) {
    Source s = load(file, inline_src);
    ValueP v = denote(s.term);
    TypeP result = s.type;
    if (!args.empty()) {
        auto n = first_order_arity(s.type);
        if (!n || *n != args.size())
            throw UsageError(s.origin + " has type " + to_string(s.type) + " but " + std::to_string(args.size()) +
                             " argument(s) were given");
        for (double a : args) v = apply_fn(v, real_value(a));
        result = real_type();
    }
    if (format == "json")
        std::cout << json{{"command", "eval"}, {"file", s.origin}, {"args", args}, {"type", to_string(result)}, {"value", to_string(v)}}
                         .dump(2)
                  << '\n';
    else if (format == "csv")
        std::cout << "# qlr-eval v1\nargs,type,value\n"
                  << join_reals(args, ";") << ',' << to_string(result) << ",\"" << to_string(v) << "\"\n";
    else
        std::cout << to_string(v) << '\n';
    return kPass;
}

// ---------------------------------------------------------------- dist

std::vector<double> expand_points(const std::vector<double>& at, std::size_t arity) {
    if (at.empty()) return std::vector<double>(arity, 0.0);
    if (at.size() == arity) return at;
    if (at.size() == 1) return std::vector<double>(arity, at[0]);
    throw UsageError("expected " + std::to_string(arity) + " --at values, got " + std::to_string(at.size()));
}

double ll_distance(const Source& a, const Source& b, const std::vector<double>& point) {
    LLValueP f = denoteLL(a.term), g = denoteLL(b.term);
    for (double x : point) {
        f = ll_call(f, ll_real(x));
        g = ll_call(g, ll_real(x));
    }
    return std::abs(as_real(f) - as_real(g));
}

int cmd_dist(const std::vector<std::string>& files, bool inline_src, const std::vector<double>& at, RunConfig cfg) {
    Source a = load(files[0], inline_src), b = load(files[1], inline_src);
    if (!type_equal(a.type, b.type))
        throw SourceError(b.origin + ": type error: has type " + to_string(b.type) + " but " + a.origin +
                          " has type " + to_string(a.type));
    auto arity = first_order_arity(a.type);
    if (!arity) throw UsageError("dist needs terms of type Real -> ... -> Real, got " + to_string(a.type));
    if (cfg.model == "pv" && *arity != 1) throw UsageError("model pv needs terms of type Real -> Real");
    std::vector<double> point = expand_points(at, *arity);

    ValueP f = denote(a.term), g = denote(b.term);
    json rows = json::array();
    for (double r : cfg.radii) {
        std::vector<Probe> probes;
        for (double x : point) probes.push_back({x, r});
        json row{{"point", point}, {"radius", r}};
        if (cfg.model == "q") {
            row["distance"] = distD(f, g, probes, cfg.grid);
        } else if (cfg.model == "qr") {
            row["distance"] = diff_at(distance_diff(f, g, a.type, true, cfg.grid), probes);
        } else if (cfg.model == "pv") {
            auto fn = [](const ValueP& v) { return [v](double x) { return as_real(apply_fn(v, real_value(x))); }; };
            Interval I = Interval::bounded(point[0] - r, point[0] + r);
            row["distance"] = liftedP(fn(f), fn(g), point[0], I, cfg.grid);
            row["m"] = liftedM(fn(f), fn(g), point[0], I, cfg.grid);
        } else {
            row["distance"] = ll_distance(a, b, point);
        }
        rows.push_back(std::move(row));
    }

    if (cfg.format == "json") {
        std::cout << json{{"command", "dist"}, {"model", cfg.model}, {"type", to_string(a.type)},
                          {"grid", cfg.grid},  {"rows", rows}}
                         .dump(2)
                  << '\n';
    } else if (cfg.format == "csv") {
        std::cout << "# qlr-dist v1 model=" << cfg.model << " grid=" << cfg.grid << "\npoint,radius,distance\n";
        for (const auto& r : rows)
            std::cout << join_reals(r["point"].get<std::vector<double>>(), ";") << ','
                      << fmt_real(r["radius"].get<double>()) << ',' << fmt_real(r["distance"].get<double>()) << '\n';
    } else {
        for (const auto& r : rows) {
            std::cout << "model=" << cfg.model << " x=" << join_reals(r["point"].get<std::vector<double>>(), ",")
                      << " r=" << fmt_real(r["radius"].get<double>())
                      << " distance=" << fmt_real(r["distance"].get<double>());
            if (r.contains("m")) std::cout << " m=" << fmt_real(r["m"].get<double>());
            std::cout << '\n';
        }
    }
    return kPass;
}

// ---------------------------------------------------------------- bound

struct BindSpec {
    std::string name;
    double value = 0;
    double radius = 0;
};

BindSpec parse_bind(const std::string& s) {
    auto eq = s.find('='), colon = s.find(':');
    if (eq == std::string::npos || colon == std::string::npos || colon < eq)
        throw UsageError("--bind expects name=value:radius, got '" + s + "'");
    BindSpec b;
    b.name = s.substr(0, eq);
    try {
        b.value = std::stod(s.substr(eq + 1, colon - eq - 1));
        b.radius = std::stod(s.substr(colon + 1));
    } catch (const std::exception&) {
        throw UsageError("--bind expects name=value:radius, got '" + s + "'");
    }
    return b;
}

int cmd_bound(const std::vector<std::string>& files, bool inline_src, const std::vector<std::string>& binds,
              double at, double probe_radius, RunConfig cfg) {
    if (cfg.model == "pv") throw UsageError("bound supports models q, qr and ll");
    Source ctx = load(files[0], inline_src, true);
    Source a = load(files[1], inline_src), b = load(files[2], inline_src);

    std::vector<BindSpec> fixed;
    for (const auto& s : binds) fixed.push_back(parse_bind(s));
    std::vector<std::string> open;
    for (const auto& v : free_vars(ctx.term)) {
        bool bound = false;
        for (const auto& f : fixed) bound = bound || f.name == v;
        if (!bound) open.push_back(v);
    }
    for (const auto& f : fixed) {
        auto fv = free_vars(ctx.term);
        if (std::find(fv.begin(), fv.end(), f.name) == fv.end())
            throw UsageError("--bind " + f.name + ": not a free variable of the context");
    }
    // Inputs without --bind take the value --at and each configured radius in turn.
    std::vector<double> radii = open.empty() ? std::vector<double>{0.0} : cfg.radii;

    json rows = json::array();
    bool all_hold = true;
    for (double r : radii) {
        std::vector<ContextInput> inputs;
        for (const auto& f : fixed) inputs.push_back({f.name, f.value, f.radius});
        for (const auto& v : open) inputs.push_back({v, at, r});
        json point = json::object(), radius = json::object();
        for (const auto& in : inputs) {
            point[in.name] = in.value;
            radius[in.name] = in.radius;
        }
        json row{{"point", point}, {"radius", radius}};
        try {
            if (cfg.model == "ll") {
                auto rep = localContextualityBound(ctx.term, a.term, b.term, inputs, probe_radius,
                                                   std::min<std::size_t>(cfg.grid, 201));
                bool ok = !rep.in_regime || rep.actual <= rep.bound + cfg.tol;
                row.update({{"bound", rep.bound},
                            {"observed", rep.actual},
                            {"margin", rep.bound - rep.actual},
                            {"holds", ok},
                            {"in_regime", rep.in_regime},
                            {"delta_t", rep.delta_t},
                            {"gate_distance", rep.gate_distance},
                            {"note", rep.note}});
                all_hold = all_hold && ok;
            } else {
                auto rep = contextualityBound(ctx.term, a.term, b.term, inputs,
                                              cfg.model == "qr" ? Model::Qr : Model::Q, cfg.grid);
                bool ok = rep.actual <= rep.bound + cfg.tol;
                row.update({{"bound", rep.bound},
                            {"observed", rep.actual},
                            {"margin", rep.margin()},
                            {"holds", ok}});
                all_hold = all_hold && ok;
            }
        } catch (const PositionedError&) {
            rethrow_positioned(ctx.origin);
        }
        rows.push_back(std::move(row));
    }

    if (cfg.format == "json") {
        std::cout << json{{"command", "bound"}, {"model", cfg.model}, {"grid", cfg.grid}, {"tol", cfg.tol},
                          {"passed", all_hold}, {"rows", rows}}
                         .dump(2)
                  << '\n';
    } else if (cfg.format == "csv") {
        std::cout << "# qlr-bound v1 model=" << cfg.model << " grid=" << cfg.grid << "\nradius,bound,observed,margin,holds";
        if (cfg.model == "ll") std::cout << ",in_regime";
        std::cout << '\n';
        for (const auto& r : rows) {
            std::string rad;
            for (const auto& [k, v] : r["radius"].items()) rad += (rad.empty() ? "" : ";") + k + "=" + fmt_real(v);
            std::cout << rad << ',' << fmt_real(r["bound"]) << ',' << fmt_real(r["observed"]) << ','
                      << fmt_real(r["margin"]) << ',' << (r["holds"].get<bool>() ? "true" : "false");
            if (cfg.model == "ll") std::cout << ',' << (r["in_regime"].get<bool>() ? "true" : "false");
            std::cout << '\n';
        }
    } else {
        for (const auto& r : rows) {
            std::string in;
            for (const auto& [k, v] : r["point"].items())
                in += " " + k + "=" + fmt_real(v) + "+-" + fmt_real(r["radius"][k]);
            std::cout << "model=" << cfg.model << (in.empty() ? "" : " inputs:") << in
                      << " bound=" << fmt_real(r["bound"]) << " actual=" << fmt_real(r["observed"])
                      << " margin=" << fmt_real(r["margin"]) << (r["holds"].get<bool>() ? " ok" : " VIOLATED");
            if (cfg.model == "ll") {
                std::cout << " gate=" << (r["in_regime"].get<bool>() ? "in-regime" : "out-of-regime")
                          << " delta_t=" << fmt_real(r["delta_t"]) << " gate_distance=" << fmt_real(r["gate_distance"]);
                if (!r["note"].get<std::string>().empty()) std::cout << " (" << r["note"].get<std::string>() << ")";
            }
            std::cout << '\n';
        }
    }
    return all_hold ? kPass : kAssertFail;
}

// ---------------------------------------------------------------- verify

struct NamedReport {
    std::string name;
    LawReport report;
    std::string csv;
};

int emit_reports(const std::vector<NamedReport>& reports, const RunConfig& cfg, const std::string& header) {
    bool ok = true;
    for (const auto& r : reports) ok = ok && r.report.all_passed();
    if (cfg.format == "json") {
        json arr = json::array();
        for (const auto& r : reports) {
            json j = to_json(r.report);
            j["name"] = r.name;
            if (!r.csv.empty()) j["csv"] = r.csv;
            arr.push_back(std::move(j));
        }
        std::cout << json{{"command", header}, {"passed", ok}, {"config", to_json(cfg)}, {"suites", arr}}.dump(2)
                  << '\n';
    } else if (cfg.format == "csv") {
        for (const auto& r : reports) std::cout << r.csv;
        std::cout << "# qlr-" << header << " v1\nsuite,law,passed,checked\n";
        for (const auto& r : reports)
            for (const auto& l : r.report.results)
                std::cout << r.name << ",\"" << l.law << "\"," << (l.passed ? "true" : "false") << ',' << l.checked
                          << '\n';
    } else {
        for (const auto& r : reports) {
            std::cout << format_text(r.report);
            if (!r.csv.empty()) std::cout << r.csv;
        }
        std::cout << (ok ? "all checks pass" : "some checks FAIL") << '\n';
    }
    return ok ? kPass : kAssertFail;
}

FiniteQlr load_qlr(const std::string& path) {
    std::ifstream probe(path);
    if (!probe) throw UsageError("cannot open " + path);
    try {
        return read_qlr_file(path);
    } catch (const PositionedError&) {
        rethrow_positioned(path);
    }
}

std::vector<std::string> axioms_for(const FiniteQlr& X, const std::vector<std::string>& requested,
                                    const std::string& path) {
    std::vector<std::string> ax = requested.empty() ? X.declared : requested;
    if (ax.empty()) throw UsageError(path + " declares no axioms; pass --axioms");
    for (const auto& a : ax)
        if (std::find(axiom_names().begin(), axiom_names().end(), a) == axiom_names().end())
            throw UsageError("unknown axiom '" + a + "'");
    return ax;
}

int cmd_verify(std::vector<std::string> suites, std::size_t max_size, const std::string& quantale,
               const std::string& qlr_file, const std::vector<std::string>& axioms, const RunConfig& cfg) {
    if (max_size < 1 || max_size > 4) throw UsageError("--max-size must be between 1 and 4");
    if (suites.empty() && quantale.empty() && qlr_file.empty()) suites = {"all"};
    std::vector<std::string> names;
    for (const auto& s : suites) {
        if (s == "all") {
            names = suite_names();
            break;
        }
        if (std::find(suite_names().begin(), suite_names().end(), s) == suite_names().end())
            throw UsageError("unknown suite '" + s + "'");
        if (std::find(names.begin(), names.end(), s) == names.end()) names.push_back(s);
    }

    std::vector<NamedReport> reports;
    SuiteOptions o;
    o.max_size = max_size;
    o.grid = cfg.grid;
    o.seed = cfg.seed;
    for (auto& s : run_suites(names, o)) reports.push_back({s.name, std::move(s.report), std::move(s.csv)});

    if (!quantale.empty()) {
        QuantaleDesc q;
        try {
            q = parse_quantale(quantale);
        } catch (const std::exception& e) {
            throw UsageError("bad --quantale: " + std::string(e.what()));
        }
        LawReport r = q.is_finite() && q.cardinality() <= FiniteQuantale::kMaxSize
                          ? check_quantale_laws(FiniteQuantale(q))
                          : check_quantale_laws(q, sample_elements(q, 10, cfg.seed), cfg.tol);
        r.subject = q.to_string();
        reports.push_back({"quantale:" + q.to_string(), std::move(r), {}});
    }
    if (!qlr_file.empty()) {
        FiniteQlr X = load_qlr(qlr_file);
        LawReport r = checkAxioms(X, axioms_for(X, axioms, qlr_file));
        r.subject = qlr_file;
        reports.push_back({"qlr:" + qlr_file, std::move(r), {}});
    }
    return emit_reports(reports, cfg, "verify");
}

// ---------------------------------------------------------------- counterexample

int cmd_fig1(const std::string& figure, double at, const std::vector<double>& radii, const RunConfig& cfg) {
    std::vector<char> figs;
    if (figure == "a" || figure == "both") figs.push_back('a');
    if (figure == "b" || figure == "both") figs.push_back('b');
    if (figs.empty()) throw UsageError("--figure must be a, b or both");
    bool found_all = true;
    json out = json::object();
    std::string csv, text;
    for (char w : figs) {
        std::vector<Fig1Row> rows;
        bool found = false;
        for (double r : radii) {
            rows.push_back(reproduceFig1(w, at, r, cfg.grid));
            found = found || rows.back().violated;
        }
        found_all = found_all && found;
        json arr = json::array();
        for (const auto& r : rows) arr.push_back(to_json(r));
        out[std::string(1, w)] = {{"violated", found}, {"rows", arr}};
        csv += fig1_csv(w, rows);
        text += std::string("figure ") + w + (w == 'a' ? " (PMS4 for d): " : " (triangle for e): ") +
                (found ? "violation found" : "no violation") + '\n';
    }
    if (cfg.format == "json")
        std::cout << json{{"command", "counterexample fig1"}, {"grid", cfg.grid}, {"figures", out}}.dump(2) << '\n';
    else if (cfg.format == "csv")
        std::cout << csv;
    else
        std::cout << csv << text;
    return found_all ? kPass : kAssertFail;
}

int cmd_nonadditive(const RunConfig& cfg) {
    auto w = nonAdditivityWitness(cfg.grid);
    bool ok = w.superadditive() && w.subadditive();
    if (cfg.format == "json") {
        std::cout << json{{"command", "counterexample nonadditive"},
                          {"grid", cfg.grid},
                          {"Df_0_1", w.f1},
                          {"Df_0_2", w.f2},
                          {"Dg_0_1", w.g1},
                          {"Dg_0_2", w.g2},
                          {"superadditive", w.superadditive()},
                          {"subadditive", w.subadditive()}}
                         .dump(2)
                  << '\n';
    } else if (cfg.format == "csv") {
        std::cout << "# qlr-nonadditive v1\nfunction,alpha,derivative\nf,1," << fmt_real(w.f1) << "\nf,2,"
                  << fmt_real(w.f2) << "\ng,1," << fmt_real(w.g1) << "\ng,2," << fmt_real(w.g2) << '\n';
    } else {
        std::cout << "D(f)(0,1)=" << fmt_real(w.f1) << " D(f)(0,2)=" << fmt_real(w.f2)
                  << (w.superadditive() ? " > " : " <= ") << "2*D(f)(0,1)\n"
                  << "D(g)(0,1)=" << fmt_real(w.g1) << " D(g)(0,2)=" << fmt_real(w.g2)
                  << (w.subadditive() ? " < " : " >= ") << "2*D(g)(0,1)\n";
    }
    return ok ? kPass : kAssertFail;
}

int cmd_axioms(const std::string& path, const std::vector<std::string>& axioms, const RunConfig& cfg) {
    FiniteQlr X = load_qlr(path);
    LawReport r = checkAxioms(X, axioms_for(X, axioms, path));
    r.subject = path;
    std::vector<const LawResult*> failures;
    for (const auto& l : r.results)
        if (!l.passed) failures.push_back(&l);
    if (cfg.format == "json") {
        json arr = json::array();
        for (const auto* l : failures) arr.push_back({{"axiom", l->law}, {"witness", l->witness}});
        std::cout << json{{"command", "counterexample axioms"}, {"file", path}, {"found", !failures.empty()},
                          {"failures", arr}}
                         .dump(2)
                  << '\n';
    } else if (cfg.format == "csv") {
        std::cout << "# qlr-axioms v1\naxiom,witness\n";
        for (const auto* l : failures) std::cout << l->law << ",\"" << l->witness << "\"\n";
    } else {
        if (failures.empty()) std::cout << "no counterexample: all requested axioms hold\n";
        for (const auto* l : failures) std::cout << l->law << ": " << l->witness << '\n';
    }
    return failures.empty() ? kAssertFail : kPass;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quantitative logical relations for the simply typed lambda calculus over the reals", "qlr"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "qlr 0.1.0");

    bool inline_src = false;
    auto add_inline = [&](CLI::App* sc) {
        sc->add_flag("-e,--inline", inline_src, "treat term arguments as source text instead of file paths");
    };

    std::string file, hole, check_format = "text";
    auto* check = app.add_subcommand("check", "parse and typecheck a term");
    check->add_option("file", file, "term file")->required();
    check->add_option("--hole", hole, "type of the hole [] when the file is a context");
    Common check_c;
    check_c.attach(check, false);
    add_inline(check);

    std::vector<double> args;
    auto* eval = app.add_subcommand("eval", "evaluate a closed term, optionally applied to real arguments");
    eval->add_option("file", file, "term file")->required();
    eval->add_option("--arg", args, "real argument (repeat for each)");
    Common eval_c;
    eval_c.attach(eval, false);
    add_inline(eval);

    std::vector<std::string> files;
    std::vector<double> at;
    auto* dist = app.add_subcommand("dist", "distance between two terms in a model at a probe");
    dist->add_option("files", files, "two term files")->required()->expected(2);
    dist->add_option("--at", at, "probe point (one per argument, or one for all)")->delimiter(',');
    Common dist_c;
    dist_c.attach(dist, true);
    add_inline(dist);

    std::vector<std::string> binds;
    double bound_at = 0, probe_radius = 1.0;
    auto* bound = app.add_subcommand("bound", "contextual bound for C[t] against C[u]");
    bound->add_option("files", files, "context, t and u files")->required()->expected(3);
    bound->add_option("--bind", binds, "free context variable: name=value:radius");
    bound->add_option("--at", bound_at, "value of free context variables without --bind");
    bound->add_option("--probe-radius", probe_radius, "half-width of the LL gate probe box")
        ->check(CLI::PositiveNumber);
    Common bound_c;
    bound_c.attach(bound, true);
    add_inline(bound);

    std::vector<std::string> suites, axioms;
    std::size_t max_size = 3;
    std::string quantale, qlr_file;
    auto* verify = app.add_subcommand("verify", "run property suites, quantale laws or axiom checks");
    verify->add_option("--suite", suites, "all | " + [] {
        std::string s;
        for (const auto& n : suite_names()) s += (s.empty() ? "" : " | ") + n;
        return s;
    }())->delimiter(',');
    verify->add_option("--max-size", max_size, "carrier bound for exhaustive finite enumeration");
    verify->add_option("--quantale", quantale, "quantale descriptor, e.g. chain:4 or product(two,chain:2)");
    verify->add_option("--qlr", qlr_file, "finite QLR space file; checks its declared axioms");
    verify->add_option("--axioms", axioms, "axioms to check instead of the declared ones")->delimiter(',');
    Common verify_c;
    verify_c.attach(verify, false);

    auto* cex = app.add_subcommand("counterexample", "search for and report counterexamples");
    cex->require_subcommand(1);
    std::string figure = "both";
    double fig_at = 0;
    std::vector<double> fig_radii = {0.0, 0.5, 1.0, 1.5, 2.0};
    auto* fig1 = cex->add_subcommand("fig1", "the cosine triples: PMS4 for d (figure a), triangle for e (figure b)");
    fig1->add_option("--figure", figure, "a | b | both");
    fig1->add_option("--at", fig_at, "point x");
    Common fig1_c;
    fig1_c.attach(fig1, false);
    auto* nonadd = cex->add_subcommand("nonadditive", "derivatives that are neither sub- nor superadditive");
    Common nonadd_c;
    nonadd_c.attach(nonadd, false);
    auto* ax = cex->add_subcommand("axioms", "first failing axiom witness of a finite QLR space");
    ax->add_option("file", qlr_file, "finite QLR space file")->required();
    ax->add_option("--axioms", axioms, "axioms to check instead of the declared ones")->delimiter(',');
    Common ax_c;
    ax_c.attach(ax, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kPass : kUsage;
    }

    try {
        if (*check) return cmd_check(file, inline_src, hole, check_c.resolve().format);
        if (*eval) return cmd_eval(file, inline_src, args, eval_c.resolve().format);
        if (*dist) return cmd_dist(files, inline_src, at, dist_c.resolve());
        if (*bound) return cmd_bound(files, inline_src, binds, bound_at, probe_radius, bound_c.resolve());
        if (*verify) return cmd_verify(suites, max_size, quantale, qlr_file, axioms, verify_c.resolve());
        if (*fig1) {
            RunConfig cfg = fig1_c.resolve();
            return cmd_fig1(figure, fig_at, fig1_c.o_radii->count() ? cfg.radii : fig_radii, cfg);
        }
        if (*nonadd) return cmd_nonadditive(nonadd_c.resolve());
        if (*ax) return cmd_axioms(qlr_file, axioms, ax_c.resolve());
    } catch (const SourceError& e) {
        std::cerr << e.what() << '\n';
        return kAssertFail;
    } catch (const TypeError& e) {
        std::cerr << "type error: " << e.what() << '\n';
        return kAssertFail;
    } catch (const UsageError& e) {
        std::cerr << "qlr: error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "qlr: error: " << e.what() << '\n';
        return kUsage;
    }
    return kUsage;
}
