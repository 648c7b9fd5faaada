// Command-line front end: generate sequences, run the asymptotic analysis,
// drive the Diophantine constructions, and search/certify common terms.
// Inputs are JSON (specs, expressions, algebraic numbers); outputs are CSV or
// JSON with deterministic formatting.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "nlrs/json_io.hpp"

using namespace nlrs;

namespace {

Json load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open config file: " + path);
    Json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw SchemaError("config", e.what());
    }
    return j;
}

void write_output(const std::string& out_path, const std::string& text) {
    if (out_path.empty() || out_path == "-") {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') std::cout << "\n";
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw InvalidInput("cannot open output file: " + out_path);
    out << text;
}

std::string decimal_of_rat(const Rat& q, int digits = 20) {
    RealEnclosure e = RealEnclosure::exact(q, 256);
    return mpfr_decimal(e.mid().lo(), MPFR_RNDD, digits);
}

struct Options {
    std::string config;
    std::string out;
    std::string format = "json";
    long count = 100;
    long precision_cap = 0;
    int depth = 3;
    std::string c_str;
    std::string d2_str = "2";
    long kmax = 100, mmax = 100;
    unsigned long bound = 64;
    int workers = 1;

    PrecisionPolicy policy() const {
        PrecisionPolicy p = PrecisionPolicy::standard();
        if (precision_cap > 0) p = p.with_cap(static_cast<mpfr_prec_t>(precision_cap));
        return p;
    }
    Rat c_value(const Json& cfg, const char* key, const Rat& dflt) const {
        if (!c_str.empty()) return parse_rational(c_str);
        if (cfg.contains(key)) return parse_rational(cfg.at(key).get<std::string>());
        return dflt;
    }
};

void add_common(CLI::App* cmd, Options& o) {
    cmd->add_option("--config", o.config, "JSON input file");
    cmd->add_option("--out", o.out, "output path (default stdout)");
    cmd->add_option("--format", o.format, "csv | json");
    cmd->add_option("--count", o.count, "number of terms (N)");
    cmd->add_option("--precision-cap", o.precision_cap, "precision cap in bits");
    cmd->add_option("--depth", o.depth, "construction depth");
    cmd->add_option("--c", o.c_str, "constant C (rational)");
    cmd->add_option("--d2", o.d2_str, "constant d2 (rational)");
    cmd->add_option("--kmax", o.kmax, "search range for k");
    cmd->add_option("--mmax", o.mmax, "search range for m");
    cmd->add_option("--bound", o.bound, "exponent bound for independence tests");
    cmd->add_option("--workers", o.workers, "worker count for the search");
}

int run_generate(const Options& o) {
    Json cfg = load_config(o.config);
    NlrsSpec spec = spec_from_json(cfg);
    auto seq = generate(spec, static_cast<size_t>(o.count), o.policy());
    if (o.format == "csv") {
        std::ostringstream csv;
        csv << "n,a_n,e_n,e_n_exact\n";
        for (size_t n = 0; n < seq.size(); ++n) {
            csv << n << "," << seq.values[n].get_str() << ",";
            if (seq.errors_are_exact) {
                csv << decimal_of_rat(seq.errors_exact[n]) << ","
                    << seq.errors_exact[n].get_str();
            } else {
                RealEnclosure e = seq.error_enclosure(n, 192);
                csv << mpfr_decimal(e.mid().lo(), MPFR_RNDD, 20) << ",";
            }
            csv << "\n";
        }
        write_output(o.out, csv.str());
    } else {
        Json j;
        j["spec"] = spec_json(seq.spec);
        Json vals = Json::array();
        for (const auto& v : seq.values) vals.push_back(v.get_str());
        j["values"] = vals;
        if (seq.errors_are_exact) {
            Json errs = Json::array();
            for (const auto& e : seq.errors_exact) errs.push_back(e.get_str());
            j["errors"] = errs;
        }
        j["apriori_error_bound"] = seq.apriori_bound.get_str();
        j["observed_error_bound"] = seq.observed_bound.get_str();
        write_output(o.out, j.dump(2));
    }
    return 0;
}

int run_analyze(const Options& o) {
    Json cfg = load_config(o.config);
    NlrsSpec spec = spec_from_json(cfg);
    size_t scan = static_cast<size_t>(o.count);
    // generate extra terms so that the correction-series tail cannot swamp
    // the residual scan near its end
    size_t margin = 64 + scan / 2;
    auto seq = generate(spec, scan + margin, o.policy());
    auto rep = asymptotic_coefficients(spec, seq, -64, Rat(1, 2), scan);
    write_output(o.out, binet_report_json(rep).dump(2));
    return 0;
}

int run_construct_shift(const Options& o) {
    Json cfg = load_config(o.config);
    RealInput a = RealInput::from_expr(expr_from_json(cfg.at("a"), "a"));
    RealInput b = RealInput::from_expr(expr_from_json(cfg.at("b"), "b"));
    Rat C = o.c_value(cfg, "C", Rat(6, 5));
    auto shift = construct_shift(a, b, C, o.depth);
    write_output(o.out, shift_json(shift).dump(2));
    return 0;
}

int run_construct_gamma(const Options& o) {
    Json cfg = load_config(o.config);
    auto alpha = algebraic_from_json(cfg.at("alpha"), "alpha");
    auto beta = algebraic_from_json(cfg.at("beta"), "beta");
    Rat C = o.c_value(cfg, "C", Rat(21, 20));
    auto g = construct_gamma(alpha, beta, C, o.depth, o.bound);
    write_output(o.out, gamma_json(g).dump(2));
    return 0;
}

int run_construct_fluctuate(const Options& o) {
    Json cfg = load_config(o.config);
    std::vector<AlgebraicNumber> etas;
    for (const auto& e : cfg.at("etas")) etas.push_back(algebraic_from_json(e, "etas"));
    std::vector<ComplexFn> gammas;
    for (const auto& g : cfg.at("gammas")) {
        Expr ex = expr_from_json(g, "gammas");
        gammas.push_back(ex.refiner());
    }
    Rat d2 = parse_rational(o.d2_str);
    if (cfg.contains("d2")) d2 = parse_rational(cfg.at("d2").get<std::string>());
    auto t = construct_fluctuating_tail(etas, gammas, d2, o.depth);
    write_output(o.out, fluct_json(t).dump(2));
    return 0;
}

int run_construct_zeros(const Options& o) {
    Json cfg = load_config(o.config);
    Rat rho = parse_rational(cfg.at("rho").get<std::string>());
    auto eta = algebraic_from_json(cfg.at("eta"), "eta");
    Rat C = o.c_value(cfg, "C", Rat(2));
    size_t covered = cfg.contains("covered") ? cfg.at("covered").get<size_t>() : 0;
    auto z = build_zero_rich(rho, eta, C, o.depth, covered);
    Json j;
    j["spec"] = spec_json(z.spec);
    Json zi = Json::array();
    for (size_t i = 0; i < z.zero_indices.size(); ++i)
        zi.push_back(Json{{"n", z.zero_indices[i].get_str()},
                          {"exact_cancellation", static_cast<bool>(z.zero_exact[i])}});
    j["certified_zeros"] = zi;
    j["covered_range"] = z.covered.size() - 1;
    j["max_abs_covered"] = z.max_abs.get_str();
    j["trace"] = fluct_json(z.tail);
    write_output(o.out, j.dump(2));
    return 0;
}

int run_common_search(const Options& o) {
    Json cfg = load_config(o.config);
    NlrsSpec sa = spec_from_json(cfg.at("a"));
    NlrsSpec sb = spec_from_json(cfg.at("b"));
    size_t K = static_cast<size_t>(o.kmax), M = static_cast<size_t>(o.mmax);
    auto qa = generate(sa, K, o.policy());
    auto qb = generate(sb, M, o.policy());
    auto sols = search_common(qa, qb, K, M, o.workers);
    write_output(o.out, solutions_json(sols).dump(2));
    return 0;
}

int run_common_counterexample(const Options& o) {
    Json cfg = load_config(o.config);
    auto alpha = algebraic_from_json(cfg.at("alpha"), "alpha");
    auto beta = algebraic_from_json(cfg.at("beta"), "beta");
    Rat C = o.c_value(cfg, "C", Rat(21, 20));
    auto ce = build_counterexample_pair(alpha, beta, C, o.depth);
    Json j;
    j["a_spec"] = spec_json(ce.a_spec);
    j["b_spec"] = spec_json(ce.b_spec);
    j["u"] = ce.u.get_str();
    j["solutions"] = solutions_json(ce.verified);
    Json tp = Json::array();
    for (const auto& [k, m] : ce.trace_pairs)
        tp.push_back(Json::array({k.get_str(), m.get_str()}));
    j["trace_pairs"] = tp;
    j["line_fit"] = linefit_json(ce.line);
    j["gamma"] = gamma_json(ce.gamma);
    write_output(o.out, j.dump(2));
    return 0;
}

int run_common_gaps(const Options& o) {
    Json cfg = load_config(o.config);
    NlrsSpec sa = spec_from_json(cfg.at("a"));
    NlrsSpec sb = spec_from_json(cfg.at("b"));
    size_t scan = std::max<size_t>(64, static_cast<size_t>(o.count));
    auto qa = generate(sa, scan + scan / 2 + 64, o.policy());
    auto qb = generate(sb, scan + scan / 2 + 64, o.policy());
    auto ra = asymptotic_coefficients(sa, qa, -64, Rat(1, 2), scan);
    auto rb = asymptotic_coefficients(sb, qb, -64, Rat(1, 2), scan);
    auto gc = gap_constants(gap_data_from_report(sa, ra), gap_data_from_report(sb, rb), o.bound);
    Json j = gap_constants_json(gc);
    // optional certificate over a bounded search
    size_t K = static_cast<size_t>(o.kmax), M = static_cast<size_t>(o.mmax);
    if (K < qa.size() && M < qb.size()) {
        auto sols = search_common(qa, qb, K, M, o.workers);
        j["solutions"] = solutions_json(sols);
        auto viol = gap_certificate_check(sols, gc);
        Json vj = Json::array();
        for (const auto& v : viol)
            vj.push_back(Json{{"first", Json::array({v.first.k.get_str(), v.first.m.get_str()})},
                              {"second", Json::array({v.second.k.get_str(), v.second.m.get_str()})}});
        j["violations"] = vj;
        if (!viol.empty()) {
            write_output(o.out, j.dump(2));
            return 1;  // scripting contract: nonzero on certificate violation
        }
    }
    write_output(o.out, j.dump(2));
    return 0;
}

int run_common_matveev(const Options& o) {
    Json cfg = load_config(o.config);
    MatveevInput in;
    for (const auto& g : cfg.at("gammas")) in.gammas.push_back(algebraic_from_json(g, "gammas"));
    for (const auto& b : cfg.at("b")) in.b.push_back(Int(b.get<std::string>()));
    if (cfg.contains("D")) in.D = Int(cfg.at("D").get<std::string>());
    if (cfg.contains("B")) in.B = Int(cfg.at("B").get<std::string>());
    auto v = matveev_lower_bound(in);
    Json j;
    j["log_lambda_lower_bound"] = enclosure_json(v, 30);
    write_output(o.out, j.dump(2));
    return 0;
}

int run_common_linefit(const Options& o) {
    Json cfg = load_config(o.config);
    std::vector<SolutionPair> pairs;
    for (const auto& p : cfg.at("pairs"))
        pairs.push_back({Int(p.at(0).get<std::string>()), Int(p.at(1).get<std::string>())});
    size_t tol = cfg.contains("tolerance") ? cfg.at("tolerance").get<size_t>() : 0;
    auto f = rational_line_fit(pairs, tol);
    write_output(o.out, linefit_json(f).dump(2));
    return 0;
}

int run_heights(const Options& o) {
    Json cfg = load_config(o.config);
    Json out = Json::array();
    for (const auto& v : cfg.at("values")) {
        auto a = algebraic_from_json(v, "values");
        out.push_back(Json{{"input", v}, {"height", enclosure_json(height(a, -64))}});
    }
    write_output(o.out, out.dump(2));
    return 0;
}

int run_cf(const Options& o) {
    Json cfg = load_config(o.config);
    RealInput x = RealInput::from_expr(expr_from_json(cfg.at("x"), "x"));
    size_t terms = cfg.contains("terms") ? cfg.at("terms").get<size_t>()
                                         : static_cast<size_t>(o.count);
    auto r = continued_fraction_certified(x, terms, o.policy());
    Json j;
    Json q = Json::array();
    for (const auto& a : r.quotients) q.push_back(a.get_str());
    j["quotients"] = q;
    Json cv = Json::array();
    for (const auto& [p, qd] : r.convergents)
        cv.push_back(Json::array({p.get_str(), qd.get_str()}));
    j["convergents"] = cv;
    j["exact"] = r.exact;
    write_output(o.out, j.dump(2));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"nearly linear recurrence sequence toolkit"};
    app.require_subcommand(1);
    Options o;

    auto* gen = app.add_subcommand("generate", "generate a sequence from a spec");
    add_common(gen, o);
    auto* ana = app.add_subcommand("analyze", "asymptotic coefficient report");
    add_common(ana, o);
    auto* con = app.add_subcommand("construct", "Diophantine constructions");
    con->require_subcommand(1);
    auto* c_shift = con->add_subcommand("shift", "affine approximation constant");
    add_common(c_shift, o);
    auto* c_gamma = con->add_subcommand("gamma", "scaled power approximation constant");
    add_common(c_gamma, o);
    auto* c_fl = con->add_subcommand("fluctuate", "fluctuating-tail coefficient");
    add_common(c_fl, o);
    auto* c_z = con->add_subcommand("zeros", "zero-rich sequence factory");
    add_common(c_z, o);
    auto* com = app.add_subcommand("common", "common terms of two sequences");
    com->require_subcommand(1);
    auto* m_search = com->add_subcommand("search", "exact common-term search");
    add_common(m_search, o);
    auto* m_ce = com->add_subcommand("counterexample", "two sequences with many common terms");
    add_common(m_ce, o);
    auto* m_gaps = com->add_subcommand("gaps", "gap constants and certificate");
    add_common(m_gaps, o);
    auto* m_mat = com->add_subcommand("matveev", "explicit log-linear-form lower bound");
    add_common(m_mat, o);
    auto* m_lf = com->add_subcommand("linefit", "rational line through index pairs");
    add_common(m_lf, o);
    auto* hts = app.add_subcommand("heights", "absolute logarithmic heights");
    add_common(hts, o);
    auto* cf = app.add_subcommand("cf", "certified continued fraction");
    add_common(cf, o);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (gen->parsed()) return run_generate(o);
        if (ana->parsed()) return run_analyze(o);
        if (c_shift->parsed()) return run_construct_shift(o);
        if (c_gamma->parsed()) return run_construct_gamma(o);
        if (c_fl->parsed()) return run_construct_fluctuate(o);
        if (c_z->parsed()) return run_construct_zeros(o);
        if (m_search->parsed()) return run_common_search(o);
        if (m_ce->parsed()) return run_common_counterexample(o);
        if (m_gaps->parsed()) return run_common_gaps(o);
        if (m_mat->parsed()) return run_common_matveev(o);
        if (m_lf->parsed()) return run_common_linefit(o);
        if (hts->parsed()) return run_heights(o);
        if (cf->parsed()) return run_cf(o);
    } catch (const AmbiguousRounding& e) {
        std::cerr << "error (ambiguous rounding): " << e.what() << "\n";
        return 2;
    } catch (const PrecisionCapExceeded& e) {
        std::cerr << "error (precision cap): " << e.what() << "\n";
        return 2;
    } catch (const SchemaError& e) {
        std::cerr << "error (schema): " << e.what() << "\n";
        return 3;
    } catch (const InvalidSpec& e) {
        std::cerr << "error (invalid spec): " << e.what() << "\n";
        return 3;
    } catch (const IsolationError& e) {
        std::cerr << "error (isolation): " << e.what() << "\n";
        return 3;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
