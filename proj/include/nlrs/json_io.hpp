#pragma once

#include <string>

#include <json.hpp>

#include "nlrs/common_terms.hpp"

namespace nlrs {

using Json = nlohmann::ordered_json;

// ---- primitive renderers (deterministic decimal output) ----

inline std::string mpfr_decimal(mpfr_srcptr v, mpfr_rnd_t rnd, int digits = 24) {
    char* buf = nullptr;
    mpfr_asprintf(&buf, rnd == MPFR_RNDD ? "%.*RDe" : "%.*RUe", digits, v);
    std::string s(buf);
    mpfr_free_str(buf);
    return s;
}

inline Json enclosure_json(const RealEnclosure& e, int digits = 24) {
    Json j;
    j["lo"] = mpfr_decimal(e.lo(), MPFR_RNDD, digits);
    j["hi"] = mpfr_decimal(e.hi(), MPFR_RNDU, digits);
    return j;
}

inline Json enclosure_json(const ComplexEnclosure& e, int digits = 24) {
    Json j;
    j["re"] = enclosure_json(e.re, digits);
    j["im"] = enclosure_json(e.im, digits);
    return j;
}

// ---- algebraic numbers ----

inline Json algebraic_json(const AlgebraicNumber& a) {
    Json j;
    Json mp = Json::array();
    for (const auto& c : a.minpoly()) mp.push_back(c.get_str());
    j["minpoly"] = mp;
    ComplexEnclosure box = a.enclosure(-64);
    if (a.is_real()) {
        j["approx"] = mpfr_decimal(box.re.mid().lo(), MPFR_RNDD, 30);
    } else {
        j["approx"] = Json{{"re", mpfr_decimal(box.re.mid().lo(), MPFR_RNDD, 30)},
                           {"im", mpfr_decimal(box.im.mid().lo(), MPFR_RNDD, 30)}};
    }
    j["radius"] = "1e-12";
    return j;
}

inline Rat rat_from_json(const Json& j, const std::string& field) {
    if (!j.is_string()) throw SchemaError(field, "expected a rational string");
    return parse_rational(j.get<std::string>());
}

inline AlgebraicNumber algebraic_from_json(const Json& j, const std::string& field) {
    if (j.is_string()) return AlgebraicNumber::from_rational(parse_rational(j.get<std::string>()));
    if (!j.is_object() || !j.contains("minpoly")) throw SchemaError(field, "expected an algebraic number");
    ZPoly mp;
    for (const auto& c : j.at("minpoly")) mp.push_back(Int(c.get<std::string>()));
    if (zdegree(mp) == 1) {
        Rat r(-mp[0], mp[1]);
        r.canonicalize();
        return AlgebraicNumber::from_rational(r);
    }
    Rat radius = j.contains("radius") ? parse_rational(j.at("radius").get<std::string>())
                                      : Rat(1, 1000);
    Rat re(0), im(0);
    const Json& ap = j.at("approx");
    if (ap.is_string()) {
        re = parse_rational(ap.get<std::string>());
    } else {
        re = parse_rational(ap.at("re").get<std::string>());
        if (ap.contains("im")) im = parse_rational(ap.at("im").get<std::string>());
    }
    ComplexEnclosure box{RealEnclosure::from_endpoints_rat(re - radius, re + radius, 128),
                         RealEnclosure::from_endpoints_rat(im - radius, im + radius, 128)};
    try {
        return AlgebraicNumber::from_minpoly(mp, box);
    } catch (const IsolationError&) {
        throw;
    } catch (const Error& e) {
        throw SchemaError(field, e.what());
    }
}

// ---- expressions ----

inline Json expr_json(const Expr& e) {
    using Op = Expr::Op;
    const auto& n = e.node();
    auto opname = [](Op o) -> const char* {
        switch (o) {
            case Op::Add: return "add";
            case Op::Sub: return "sub";
            case Op::Mul: return "mul";
            case Op::Div: return "div";
            case Op::Neg: return "neg";
            case Op::Conj: return "conj";
            case Op::ReOf: return "re";
            case Op::ImOf: return "im";
            case Op::Log: return "log";
            case Op::Exp: return "exp";
            case Op::Sqrt: return "sqrt";
            case Op::Sin: return "sin";
            case Op::Cos: return "cos";
            default: return "?";
        }
    };
    switch (n.op) {
        case Op::Const:
            if (n.cim == 0) return Json(n.cre.get_str());
            return Json{{"re", n.cre.get_str()}, {"im", n.cim.get_str()}};
        case Op::Algebraic: return Json{{"alg", algebraic_json(*n.alg)}};
        case Op::Box: {
            Json j;
            j["box"] = enclosure_json(*n.box, 40);
            return j;
        }
        case Op::Pi: return Json{{"op", "pi"}};
        case Op::PowInt: {
            Json j;
            j["op"] = "pow";
            j["base"] = expr_json(n.kids[0]);
            j["exp"] = n.expo.get_str();
            return j;
        }
        default: {
            Json j;
            j["op"] = opname(n.op);
            Json args = Json::array();
            for (const auto& k : n.kids) args.push_back(expr_json(k));
            j["args"] = args;
            return j;
        }
    }
}

inline Expr expr_from_json(const Json& j, const std::string& field) {
    if (j.is_string()) return Expr::constant(parse_rational(j.get<std::string>()));
    if (!j.is_object()) throw SchemaError(field, "expected an expression");
    if (j.contains("re") && !j.contains("op"))
        return Expr::constant(parse_rational(j.at("re").get<std::string>()),
                              j.contains("im") ? parse_rational(j.at("im").get<std::string>())
                                               : Rat(0));
    if (j.contains("alg")) return Expr::algebraic(algebraic_from_json(j.at("alg"), field));
    if (j.contains("box")) {
        const Json& b = j.at("box");
        auto side = [&](const char* comp) {
            mpfr_t lo, hi;
            mpfr_init2(lo, 192);
            mpfr_init2(hi, 192);
            mpfr_set_str(lo, b.at(comp).at("lo").get<std::string>().c_str(), 10, MPFR_RNDD);
            mpfr_set_str(hi, b.at(comp).at("hi").get<std::string>().c_str(), 10, MPFR_RNDU);
            RealEnclosure r = RealEnclosure::from_mpfr(lo, hi, 192);
            mpfr_clears(lo, hi, nullptr);
            return r;
        };
        return Expr::box(ComplexEnclosure{side("re"), side("im")});
    }
    if (!j.contains("op")) throw SchemaError(field, "expression without an op");
    std::string op = j.at("op").get<std::string>();
    if (op == "pi") return Expr::pi();
    if (op == "pow")
        return Expr::pow(expr_from_json(j.at("base"), field), Int(j.at("exp").get<std::string>()));
    std::vector<Expr> args;
    for (const auto& a : j.at("args")) args.push_back(expr_from_json(a, field));
    auto need = [&](size_t n_args) {
        if (args.size() != n_args) throw SchemaError(field, "wrong arity for " + op);
    };
    if (op == "add") { need(2); return args[0] + args[1]; }
    if (op == "sub") { need(2); return args[0] - args[1]; }
    if (op == "mul") { need(2); return args[0] * args[1]; }
    if (op == "div") { need(2); return args[0] / args[1]; }
    if (op == "neg") { need(1); return -args[0]; }
    if (op == "conj") { need(1); return Expr::conj(args[0]); }
    if (op == "re") { need(1); return Expr::re(args[0]); }
    if (op == "im") { need(1); return Expr::im(args[0]); }
    if (op == "log") { need(1); return Expr::log(args[0]); }
    if (op == "exp") { need(1); return Expr::exp(args[0]); }
    if (op == "sqrt") { need(1); return Expr::sqrt(args[0]); }
    if (op == "sin") { need(1); return Expr::sin(args[0]); }
    if (op == "cos") { need(1); return Expr::cos(args[0]); }
    throw SchemaError(field, "unknown op '" + op + "'");
}

// ---- sequence specs ----

inline Json spec_json(const NlrsSpec& s) {
    Json j;
    j["degree"] = s.degree;
    Json cs = Json::array();
    for (const auto& c : s.coefficients) {
        if (coef_is_rational(c))
            cs.push_back(coef_rational(c).get_str());
        else
            cs.push_back(Json{{"alg", algebraic_json(std::get<AlgebraicNumber>(c))}});
    }
    j["coefficients"] = cs;
    Json init = Json::array();
    for (const auto& v : s.initial) init.push_back(v.get_str());
    j["initial"] = init;
    switch (s.rule) {
        case RuleKind::Srs: j["rule"] = "srs"; break;
        case RuleKind::Target: j["rule"] = "target"; break;
        case RuleKind::ExplicitErrors: j["rule"] = "explicit_errors"; break;
    }
    if (s.rule == RuleKind::Target) {
        Json ts = Json::array();
        for (const auto& t : s.targets) {
            Json tj;
            tj["gamma"] = expr_json(t.gamma);
            tj["alpha"] = algebraic_json(t.alpha);
            ts.push_back(tj);
        }
        j["targets"] = ts;
        j["rounding"] = s.rounding == TargetRounding::Floor ? "floor" : "nearest";
        j["offset"] = s.offset.get_str();
    }
    if (s.rule == RuleKind::ExplicitErrors) {
        Json es = Json::array();
        for (const auto& e : s.errors) es.push_back(e.get_str());
        j["errors"] = es;
        j["error_bound"] = s.error_bound.get_str();
    }
    return j;
}

inline NlrsSpec spec_from_json(const Json& j) {
    NlrsSpec s;
    if (!j.is_object()) throw SchemaError("spec", "expected an object");
    if (!j.contains("degree")) throw SchemaError("degree");
    if (!j.at("degree").is_number_integer()) throw SchemaError("degree", "expected an integer");
    s.degree = j.at("degree").get<long>();
    if (!j.contains("coefficients")) throw SchemaError("coefficients");
    for (const auto& c : j.at("coefficients")) {
        if (c.is_string())
            s.coefficients.emplace_back(parse_rational(c.get<std::string>()));
        else if (c.is_object() && c.contains("alg"))
            s.coefficients.emplace_back(algebraic_from_json(c.at("alg"), "coefficients"));
        else
            throw SchemaError("coefficients", "expected rational string or algebraic");
    }
    if (j.contains("initial"))
        for (const auto& v : j.at("initial")) s.initial.push_back(rat_from_json(v, "initial"));
    if (!j.contains("rule")) throw SchemaError("rule");
    std::string rule = j.at("rule").get<std::string>();
    if (rule == "srs") {
        s.rule = RuleKind::Srs;
    } else if (rule == "target") {
        s.rule = RuleKind::Target;
        if (!j.contains("targets")) throw SchemaError("targets");
        for (const auto& t : j.at("targets")) {
            TargetTerm term;
            term.gamma = expr_from_json(t.at("gamma"), "targets.gamma");
            term.alpha = algebraic_from_json(t.at("alpha"), "targets.alpha");
            s.targets.push_back(std::move(term));
        }
        std::string r = j.contains("rounding") ? j.at("rounding").get<std::string>() : "floor";
        if (r == "floor")
            s.rounding = TargetRounding::Floor;
        else if (r == "nearest")
            s.rounding = TargetRounding::NearestHalfUp;
        else
            throw SchemaError("rounding", "expected 'floor' or 'nearest'");
        if (j.contains("offset")) s.offset = Int(j.at("offset").get<std::string>());
    } else if (rule == "explicit_errors") {
        s.rule = RuleKind::ExplicitErrors;
        if (j.contains("errors"))
            for (const auto& e : j.at("errors")) s.errors.push_back(rat_from_json(e, "errors"));
        if (j.contains("error_bound"))
            s.error_bound = rat_from_json(j.at("error_bound"), "error_bound");
    } else {
        throw SchemaError("rule", "unknown rule '" + rule + "'");
    }
    try {
        s.validate();
    } catch (const InvalidSpec& e) {
        throw SchemaError("spec", e.what());
    }
    return s;
}

// ---- reports ----

inline Json binet_report_json(const BinetReport& rep) {
    Json j;
    j["degree"] = rep.degree;
    j["r1"] = rep.r1;
    j["r2"] = rep.r2;
    Json roots = Json::array(), ghat = Json::array(), gtil = Json::array(),
         cvals = Json::array(), betas = Json::array();
    for (const auto& e : rep.entries) {
        Json r;
        r["value"] = enclosure_json(e.root.enclosure(-64));
        r["modulus_class"] = e.mod_class == ModClass::Greater1
                                 ? "greater_one"
                                 : (e.mod_class == ModClass::Equal1 ? "equal_one" : "less_one");
        roots.push_back(r);
        ghat.push_back(enclosure_json(e.g_hat));
        gtil.push_back(enclosure_json(e.g_tilde));
        if (e.c_alpha) {
            Json c = enclosure_json(*e.c_alpha);
            c["tail_radius"] = e.c_tail_upper.get_str();
            cvals.push_back(c);
        } else {
            cvals.push_back(nullptr);
        }
        if (e.beta) {
            Json b = enclosure_json(*e.beta);
            b["nonvanishing"] = e.beta_nonzero;
            betas.push_back(b);
        } else {
            betas.push_back(nullptr);
        }
    }
    j["roots"] = roots;
    j["g_hat"] = ghat;
    j["g_tilde"] = gtil;
    j["c_values"] = cvals;
    j["betas"] = betas;
    Json rs;
    rs["max_residual"] = rep.residuals.max_residual.get_str();
    rs["bound_const"] = rep.residuals.bound_const.get_str();
    rs["bound_linear"] = rep.residuals.bound_linear.get_str();
    rs["growth_class"] = rep.residuals.growth_class;
    rs["exceedance_threshold"] = rep.residuals.exceedance_threshold.get_str();
    rs["exceedance_count"] = rep.residuals.exceedance_count;
    Json wm = Json::array();
    for (const auto& [n, v] : rep.residuals.window_max)
        wm.push_back(Json{{"from", n}, {"max", v.get_str()}});
    rs["window_max"] = wm;
    Json dt = Json::array();
    for (const auto& [n, v] : rep.residuals.divergence_trace)
        dt.push_back(Json{{"n", n}, {"value", v.get_str()}});
    rs["divergence_trace"] = dt;
    j["residual_stats"] = rs;
    return j;
}

inline Json dio_stage_json(const DioStage& st) {
    Json j;
    j["k"] = st.k.get_str();
    j["m"] = st.m.get_str();
    j["k_cum"] = st.k_cum.get_str();
    j["m_cum"] = st.m_cum.get_str();
    j["log2_eps"] = st.log2_eps.get_str();
    j["log_target"] = enclosure_json(st.log_target);
    if (st.achieved_exact_zero)
        j["achieved"] = "exact_zero";
    else if (st.log_achieved)
        j["log_achieved"] = enclosure_json(*st.log_achieved);
    j["verified"] = st.verified;
    if (st.dropped) j["dropped"] = true;
    return j;
}

inline Json shift_json(const ShiftConstruction& s) {
    Json j;
    j["C"] = s.C.get_str();
    Json st = Json::array();
    for (const auto& x : s.stages) st.push_back(dio_stage_json(x));
    j["stages"] = st;
    j["c"] = enclosure_json(s.c_value, 40);
    j["tail_log2"] = s.tail_log2.get_str();
    return j;
}

inline Json gamma_json(const GammaConstruction& g) {
    Json j;
    j["C"] = g.C.get_str();
    j["shift"] = shift_json(g.shift);
    j["gamma"] = enclosure_json(g.gamma_value, 40);
    Json pr = Json::array();
    for (const auto& x : g.pairs) pr.push_back(dio_stage_json(x));
    j["pairs"] = pr;
    return j;
}

inline Json fluct_json(const FluctuatingTail& t) {
    Json j;
    j["d2"] = t.d2.get_str();
    Json st = Json::array();
    for (const auto& x : t.stages) {
        Json s;
        s["n"] = x.n.get_str();
        s["log2_threshold"] = x.log2_threshold.get_str();
        s["log_target"] = enclosure_json(x.log_target);
        if (x.achieved_exact_zero)
            s["achieved"] = "exact_zero";
        else if (x.log_achieved)
            s["log_achieved"] = enclosure_json(*x.log_achieved);
        s["verified"] = x.verified;
        st.push_back(s);
    }
    j["stages"] = st;
    j["gamma_r"] = enclosure_json(t.gamma_value, 40);
    j["tail_log2"] = t.tail_log2.get_str();
    return j;
}

inline Json solutions_json(const SolutionSet& s) {
    Json j;
    j["K"] = s.K.get_str();
    j["M"] = s.M.get_str();
    Json ps = Json::array();
    for (const auto& p : s.pairs) ps.push_back(Json::array({p.k.get_str(), p.m.get_str()}));
    j["pairs"] = ps;
    return j;
}

inline Json gap_constants_json(const GapConstants& g) {
    Json j;
    j["K0"] = g.K0.get_str();
    j["K1"] = g.K1.get_str();
    j["K2"] = g.K2.get_str();
    j["K1_statement"] = g.K1_statement.get_str();
    j["K2_statement"] = g.K2_statement.get_str();
    j["eps"] = g.eps.get_str();
    Json chain;
    chain["C1"] = g.C1.get_str();
    chain["C2"] = g.C2.get_str();
    chain["C3"] = g.C3.get_str();
    chain["C4"] = g.C4.get_str();
    chain["C5"] = g.C5.get_str();
    chain["C6"] = g.C6.get_str();
    chain["C7"] = g.C7.get_str();
    chain["C8"] = g.C8.get_str();
    chain["C9"] = g.C9.get_str();
    chain["C10"] = g.C10.get_str();
    chain["C11"] = g.C11.get_str();
    j["chain"] = chain;
    j["note"] = g.note;
    return j;
}

inline Json linefit_json(const std::optional<LineFit>& f) {
    if (!f) return Json{{"line", nullptr}};
    Json j;
    j["line"] = Json{{"u", f->u.get_str()}, {"v", f->v.get_str()}, {"w", f->w.get_str()}};
    Json ex = Json::array();
    for (size_t i : f->exceptions) ex.push_back(i);
    j["exceptions"] = ex;
    return j;
}

}  // namespace nlrs
