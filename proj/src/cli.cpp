#include "potsys/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

namespace potsys {

namespace {

[[noreturn]] void inputFail(int line, int col, const std::string& msg) {
    std::ostringstream os;
    os << line << ":" << col << ": " << msg;
    fail(Error::Kind::Input, os.str());
}

[[noreturn]] void inputFail(const DocValue& v, const std::string& msg) {
    inputFail(v.line, v.col, msg);
}

const DocValue& require(const DocBlock& b, const std::string& key) {
    const DocValue* v = b.find(key);
    if (!v) inputFail(b.line, b.col, "missing required key '" + key + "'");
    return *v;
}

std::vector<std::string> stringList(const DocValue& v) {
    std::vector<std::string> out;
    for (const auto& e : v.asList()) out.push_back(e->asString());
    return out;
}

Rational parseRational(const DocValue& v) {
    Expr e;
    try {
        e = parse_expression(v.asString(), SymbolTable{});
    } catch (const Error& err) {
        inputFail(v, std::string("expected a rational constant: ") + err.what());
    }
    if (!e.den().isOne() || e.num().terms.size() > 1 ||
        (!e.num().terms.empty() && !e.num().terms.begin()->first.factors.empty()))
        inputFail(v, "expected a rational constant");
    return leadingCoeff(e);
}

Expr parseExpr(const DocValue& v, const SymbolTable& table, const Subst& bindings) {
    Expr e;
    try {
        e = parse_expression(v.asString(), table);
    } catch (const Error& err) {
        // re-anchor the expression-local position at the document entry
        inputFail(v, err.what());
    }
    return substitute(e, bindings);
}

/// "mu(t,x)" -> name + argument names
UnknownFunc parseUnknownDecl(const DocValue& v) {
    const std::string& s = v.asString();
    auto open = s.find('(');
    if (open == std::string::npos || s.back() != ')')
        inputFail(v, "expected an unknown declaration like mu(t,x)");
    UnknownFunc u;
    u.name = s.substr(0, open);
    std::string args = s.substr(open + 1, s.size() - open - 2);
    std::string cur;
    for (char c : args + ",") {
        if (c == ',') {
            if (cur.empty()) inputFail(v, "empty argument name in unknown declaration");
            u.args.push_back(cur);
            cur.clear();
        } else if (c != ' ') {
            cur += c;
        }
    }
    if (u.name.empty() || u.args.empty())
        inputFail(v, "expected an unknown declaration like mu(t,x)");
    return u;
}

GroupSchema interpretGroup(const DocBlock& g, const SymbolTable& base) {
    GroupSchema schema;
    schema.coeffNames = stringList(require(g, "coefficients"));
    if (schema.coeffNames.empty()) inputFail(g.line, g.col, "empty coefficient list");

    SymbolTable ruleTable = base;
    for (const auto& c : schema.coeffNames) ruleTable.symbols.insert(c);

    for (const DocValue* rv : g.findAll("rule")) {
        const DocBlock& r = rv->asBlock();
        NormalizationRule rule;
        rule.name = require(r, "name").asString();
        SymbolTable tab = ruleTable;
        if (const DocValue* kind = r.find("kind")) {
            if (kind->asString() == "rotation")
                rule.kind = RuleKind::Rotation;
            else if (kind->asString() != "affine")
                inputFail(*kind, "rule kind must be 'affine' or 'rotation'");
        }
        if (rule.kind == RuleKind::Rotation) {
            rule.param = require(r, "param").asString();
            tab.symbols.insert(rule.param);
            rule.factor = parseExpr(require(r, "factor"), tab, {});
            const auto& m = require(r, "matrix").asList();
            if (m.size() != 4)
                inputFail(require(r, "matrix"), "rotation matrix needs 4 entries");
            for (const auto& e : m) rule.matrix.push_back(parseExpr(*e, tab, {}));
            rule.potentialScaling = require(r, "potential_scaling").asBool();
        }
        rule.guard = parse_guard(require(r, "guard").asString(), schema.coeffNames);
        if (const DocValue* s = r.find("subst_t")) rule.subst["t"] = parseExpr(*s, tab, {});
        if (const DocValue* s = r.find("subst_x")) rule.subst["x"] = parseExpr(*s, tab, {});
        if (const DocValue* s = r.find("scale")) rule.scale = parseExpr(*s, tab, {});
        const DocValue& eff = require(r, "effect");
        for (const auto& e : eff.asList()) rule.effect.push_back(parseExpr(*e, tab, {}));
        if (rule.effect.size() != schema.coeffNames.size())
            inputFail(eff, "effect tuple size must match the coefficient list");
        schema.rules.push_back(std::move(rule));
    }
    if (schema.rules.empty()) inputFail(g.line, g.col, "group block declares no rules");
    return schema;
}

Subst interpretBindings(const DocBlock& scope, const Problem& p) {
    Subst bindings;
    for (const DocValue* bv : scope.findAll("bind")) {
        const DocBlock& b = bv->asBlock();
        const std::string& fname = require(b, "name").asString();
        auto it = p.table.functions.find(fname);
        if (it == p.table.functions.end())
            inputFail(require(b, "name"), "bind of undeclared function " + fname);
        SymbolTable tab;
        tab.symbols = p.table.symbols;
        for (const auto& f : it->second.formals) tab.symbols.insert(f);
        FuncBinding fb;
        fb.formals = it->second.formals;
        fb.body = parseExpr(require(b, "value"), tab, {});
        if (bindings.functions.count(fname))
            inputFail(*bv, "duplicate binding for " + fname);
        bindings.functions[fname] = std::move(fb);
    }
    return bindings;
}

SymmetryJob interpretSymmetries(const DocBlock& s, const Problem& p) {
    SymmetryJob job;
    for (const auto& e : require(s, "combination").asList())
        job.combination.push_back(parseRational(*e));
    if (job.combination.size() != p.vectors.size())
        inputFail(require(s, "combination"),
                  "combination size must match the conserved-vector list");
    if (const DocValue* n = s.find("potential")) job.potentialName = n->asString();
    job.bindings = interpretBindings(s, p);

    SymbolTable fieldTable = p.table;
    fieldTable.jets.dependents.push_back(job.potentialName);

    for (const DocValue* fv : s.findAll("field")) {
        const DocBlock& f = fv->asBlock();
        CandidateField cand;
        cand.name = require(f, "name").asString();
        SymbolTable tab = fieldTable;
        for (const DocValue* uv : f.findAll("unknown")) {
            UnknownFunc u = parseUnknownDecl(*uv);
            tab.functions[u.name] = FunctionDecl{u.args};
            cand.field.unknowns.push_back(std::move(u));
        }
        if (const DocValue* e = f.find("xi"))
            cand.field.xi = parseExpr(*e, tab, job.bindings);
        if (const DocValue* e = f.find("tau"))
            cand.field.tau = parseExpr(*e, tab, job.bindings);
        for (const auto& [key, val] : f.entries)
            if (key.rfind("eta_", 0) == 0)
                cand.field.eta[key.substr(4)] = parseExpr(*val, tab, job.bindings);
        const std::string& exp = require(f, "expect").asString();
        if (exp == "symmetry")
            cand.expect = Expectation::Symmetry;
        else if (exp == "not-symmetry")
            cand.expect = Expectation::NotSymmetry;
        else if (exp == "claimed")
            cand.expect = Expectation::Claimed;
        else if (exp == "determining")
            cand.expect = Expectation::Determining;
        else
            inputFail(require(f, "expect"),
                      "expect must be symmetry, not-symmetry, claimed, or determining");
        for (const DocValue* rv : f.findAll("relation"))
            cand.expectedRelations.push_back(parseExpr(*rv, tab, job.bindings));
        if (cand.expect == Expectation::Determining && cand.expectedRelations.empty())
            inputFail(*fv, "expect = determining requires relation entries");
        job.fields.push_back(std::move(cand));
    }
    if (job.fields.empty()) inputFail(s.line, s.col, "symmetries block declares no fields");
    return job;
}

} // namespace

Problem interpret_problem(const DocBlock& doc) {
    const DocValue& fmt = require(doc, "problem_format");
    if (fmt.asInt() != 1) inputFail(fmt, "unsupported problem_format (expected 1)");

    Problem p;
    p.name = require(doc, "name").asString();

    auto indep = stringList(require(doc, "independent"));
    if (indep.size() != 2)
        inputFail(require(doc, "independent"), "exactly two independent variables expected");
    JetContext ctx;
    ctx.t = indep[0];
    ctx.x = indep[1];
    ctx.dependents = stringList(require(doc, "dependent"));
    if (ctx.dependents.empty())
        inputFail(require(doc, "dependent"), "at least one dependent variable expected");

    p.table.symbols = {ctx.t, ctx.x};
    if (const DocValue* params = doc.find("parameter"))
        for (const auto& name : stringList(*params))
            if (!p.table.symbols.insert(name).second)
                inputFail(*params, "duplicate declaration of " + name);
    p.table.jets = ctx;

    for (const DocValue* fv : doc.findAll("function")) {
        const DocBlock& f = fv->asBlock();
        const std::string& name = require(f, "name").asString();
        if (p.table.functions.count(name) || p.table.symbols.count(name))
            inputFail(require(f, "name"), "duplicate declaration of " + name);
        p.table.functions[name] = FunctionDecl{stringList(require(f, "args"))};
    }

    Subst bindings = interpretBindings(doc, p);

    p.system.ctx = ctx;
    for (const DocValue* ev : doc.findAll("equation")) {
        const DocBlock& e = ev->asBlock();
        const DocValue& leadVal = require(e, "lead");
        auto lead = parseJetName(leadVal.asString(), ctx);
        if (!lead || lead->order() == 0)
            inputFail(leadVal, "lead must be a positive-order jet coordinate");
        p.system.equations.push_back(
            {*lead, parseExpr(require(e, "rhs"), p.table, bindings)});
    }
    if (p.system.equations.empty())
        inputFail(doc.line, doc.col, "no equation blocks");

    for (const DocValue* cvv : doc.findAll("conserved_vector")) {
        const DocBlock& c = cvv->asBlock();
        ConservedVector cv;
        cv.T = parseExpr(require(c, "T"), p.table, bindings);
        cv.X = parseExpr(require(c, "X"), p.table, bindings);
        if (const DocValue* ch = c.find("char")) {
            for (const auto& e : ch->asList()) cv.chars.push_back(parseExpr(*e, p.table, bindings));
            if (cv.chars.size() != p.system.equations.size())
                inputFail(*ch, "char tuple size must match the equation count");
        }
        p.vectors.push_back(std::move(cv));
    }

    if (const DocValue* g = doc.find("group")) p.schema = interpretGroup(g->asBlock(), p.table);
    if (const DocValue* gc = doc.find("generate_combined")) p.generateCombined = gc->asBool();
    if (const DocValue* s = doc.find("symmetries"))
        p.symmetries = interpretSymmetries(s->asBlock(), p);
    return p;
}

Problem load_problem(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(Error::Kind::Input, "cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return interpret_problem(parse_document(buf.str()));
}

// --- Reporting -------------------------------------------------------------

namespace {

/// Accumulates the report in both styles from one emit path so that text and
/// machine output cannot drift apart. Machine lines are "key value" with a
/// stable key order; text lines are "key: value" under section headings.
class Reporter {
public:
    explicit Reporter(bool machine) : machine_(machine) {
        os_ << (machine_ ? "potsys-report 1\n" : "potsys report (format 1)\n");
    }

    void section(const std::string& name) {
        if (machine_)
            os_ << "section " << name << "\n";
        else
            os_ << "\n== " << name << " ==\n";
    }

    void kv(const std::string& key, const std::string& value) {
        if (machine_)
            os_ << key << " " << value << "\n";
        else
            os_ << key << ": " << value << "\n";
    }

    std::string str() const { return os_.str(); }

private:
    bool machine_;
    std::ostringstream os_;
};

std::string rationalStr(const Rational& r) {
    std::ostringstream os;
    os << r;
    return os.str();
}

std::string tupleStr(const std::vector<Rational>& t) {
    std::string out;
    for (size_t i = 0; i < t.size(); ++i) {
        if (i) out += ",";
        out += rationalStr(t[i]);
    }
    return out;
}

std::string passFail(bool ok) { return ok ? "pass" : "fail"; }

bool runVerify(const Problem& p, Reporter& rep, int depth) {
    rep.section("verify");
    bool ok = true;
    for (size_t i = 0; i < p.vectors.size(); ++i) {
        const std::string base = "vector." + std::to_string(i + 1);
        CheckReport div = verify_divergence(p.vectors[i], p.system, depth);
        rep.kv(base + ".divergence", passFail(div.pass));
        for (const Expr& r : div.residuals) rep.kv(base + ".divergence.residual", to_string(r));
        ok = ok && div.pass;
        if (p.vectors[i].hasChar()) {
            CheckReport ch = verify_characteristic(p.vectors[i], p.system);
            rep.kv(base + ".characteristic", passFail(ch.pass));
            for (const Expr& r : ch.residuals)
                rep.kv(base + ".characteristic.residual", to_string(r));
            ok = ok && ch.pass;
        }
    }
    rep.kv("verify.result", passFail(ok));
    return ok;
}

bool runCanonicalize(const Problem& p, Reporter& rep, CanonicalSet& canon) {
    if (!p.schema) fail(Error::Kind::Input, "problem file declares no group block");
    rep.section("canonicalize");
    canon = canonicalize(*p.schema, p.vectors, p.system.ctx);
    rep.kv("classes", std::to_string(canon.classes.size()));
    rep.kv("soundness-checks", std::to_string(canon.rulesChecked));
    bool ok = true;
    for (size_t i = 0; i < canon.classes.size(); ++i) {
        const CanonicalClass& cl = canon.classes[i];
        const std::string base = "class." + std::to_string(i + 1);
        rep.kv(base + ".tuple", tupleStr(cl.tuple));
        for (const Expr& ch : cl.chars) rep.kv(base + ".char", to_string(ch));
        std::string prov;
        for (size_t j = 0; j < cl.provenance.size(); ++j)
            prov += (j ? "," : "") + cl.provenance[j];
        rep.kv(base + ".rules", prov.empty() ? "-" : prov);
        // canonical representatives must be fixed points of the reduction
        CanonicalSet again = canonicalize_from(*p.schema, p.vectors, p.system.ctx, cl.tuple);
        bool fixed = again.classes.size() == 1 && again.classes[0].tuple == cl.tuple;
        rep.kv(base + ".fixedpoint", passFail(fixed));
        ok = ok && fixed;
    }
    CollapseReport col = collapse_check(canon);
    rep.kv("collapse.basis", std::to_string(col.basisSize));
    rep.kv("collapse.classes", std::to_string(col.classCount));
    rep.kv("collapse.collapsed", col.collapsed ? "yes" : "no");
    rep.kv("canonicalize.result", passFail(ok));
    return ok;
}

bool runGenerate(const Problem& p, Reporter& rep, const CanonicalSet& canon) {
    rep.section("generate");
    auto systems = enumerate_potential_systems(p.system, p.vectors, canon);
    for (size_t i = 0; i < systems.size(); ++i) {
        const std::string base = "system." + std::to_string(i + 1);
        rep.kv(base + ".potential", systems[i].potentials.front());
        rep.kv(base + ".complete", systems[i].complete ? "yes" : "no");
        for (const std::string& line : describe_equations(systems[i]))
            rep.kv(base + ".equation", line);
    }
    if (p.generateCombined) {
        PotentialSystem combined = combined_potential_system(p.system, p.vectors, canon);
        rep.kv("combined.complete", combined.complete ? "yes" : "no");
        for (const std::string& line : describe_equations(combined))
            rep.kv("combined.equation", line);
    }
    rep.kv("generate.result", "pass");
    return true;
}

bool runSymmetries(const Problem& p, Reporter& rep, int depth) {
    if (!p.symmetries) fail(Error::Kind::Input, "problem file declares no symmetries block");
    const SymmetryJob& job = *p.symmetries;
    rep.section("symmetries");
    rep.kv("combination", tupleStr(job.combination));

    std::vector<Expr> coeffs;
    for (const Rational& r : job.combination) coeffs.push_back(Expr(r));
    ConservedVector cv = linear_combination(coeffs, p.vectors);
    cv.T = substitute(cv.T, job.bindings);
    cv.X = substitute(cv.X, job.bindings);
    for (Expr& ch : cv.chars) ch = substitute(ch, job.bindings);

    PdeSystem base = p.system;
    for (PdeEquation& eq : base.equations) eq.rhs = substitute(eq.rhs, job.bindings);

    PotentialSystem ps = build_potential_system(base, {cv}, {job.potentialName});
    for (const Expr& ch : cv.chars) rep.kv("char", to_string(ch));
    rep.kv("complete", ps.complete ? "yes" : "no");

    bool ok = true;
    for (const CandidateField& cand : job.fields) {
        const std::string basek = "field." + cand.name;
        DeterminingSystem det = check_symmetry(cand.field, ps, depth);
        rep.kv(basek + ".status", det.isSymmetry() ? "symmetry" : "residual");
        for (const DeterminingEquation& eq : det.equations)
            rep.kv(basek + ".residual", "[" + eq.jetMonomial + "] " + to_string(eq.relation));
        std::string result;
        switch (cand.expect) {
        case Expectation::Symmetry:
            result = passFail(det.isSymmetry());
            break;
        case Expectation::NotSymmetry:
            result = passFail(!det.isSymmetry());
            break;
        case Expectation::Claimed:
            // an outside claim: a nonzero residual is reported as a flagged
            // discrepancy, not a failure of this run
            result = det.isSymmetry() ? "pass" : "flagged";
            break;
        case Expectation::Determining:
            result = passFail(!det.isSymmetry() &&
                              same_relation_span(det.relations(), cand.expectedRelations));
            break;
        }
        rep.kv(basek + ".expect", result);
        if (result == "fail") ok = false;
        if (det.isSymmetry())
            rep.kv(basek + ".potential",
                   is_potential_symmetry(cand.field, ps, depth) ? "true" : "false");
    }
    rep.kv("symmetries.result", passFail(ok));
    return ok;
}

} // namespace

int run(const CliOptions& opts, std::ostream& out, std::ostream& err) {
    Reporter rep(opts.report == "machine");
    bool ok = true;
    try {
        if (opts.report != "machine" && opts.report != "text")
            fail(Error::Kind::Input, "--report must be text or machine");
        Problem p = load_problem(opts.file);
        rep.kv("problem", p.name);
        rep.kv("command", opts.command);

        CanonicalSet canon;
        if (opts.command == "verify") {
            ok = runVerify(p, rep, opts.depth);
        } else if (opts.command == "canonicalize") {
            ok = runCanonicalize(p, rep, canon);
        } else if (opts.command == "generate") {
            ok = runCanonicalize(p, rep, canon) && ok;
            ok = runGenerate(p, rep, canon) && ok;
        } else if (opts.command == "symmetries") {
            ok = runSymmetries(p, rep, opts.depth);
        } else if (opts.command == "all") {
            ok = runVerify(p, rep, opts.depth) && ok;
            if (p.schema) {
                ok = runCanonicalize(p, rep, canon) && ok;
                ok = runGenerate(p, rep, canon) && ok;
            }
            if (p.symmetries) ok = runSymmetries(p, rep, opts.depth) && ok;
        } else {
            fail(Error::Kind::Input, "unknown command " + opts.command);
        }
        rep.kv("result", passFail(ok));
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return e.kind() == Error::Kind::Input ? 2 : 1;
    }

    std::string report = rep.str();
    out << report;
    if (!opts.golden.empty()) {
        std::ifstream in(opts.golden, std::ios::binary);
        if (!in) {
            err << "error: cannot open golden file " << opts.golden << "\n";
            return 2;
        }
        std::ostringstream buf;
        buf << in.rdbuf();
        if (buf.str() != report) {
            err << "golden mismatch against " << opts.golden << "\n";
            return 1;
        }
    }
    return ok ? 0 : 1;
}

int run_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"conservation-law and potential-symmetry toolkit"};
    CliOptions opts;
    app.add_option("command", opts.command, "verify | canonicalize | generate | symmetries | all")
        ->required();
    app.add_option("file", opts.file, "problem file")->required();
    app.add_option("--report", opts.report, "report style: text | machine")
        ->check(CLI::IsMember({"text", "machine"}));
    app.add_option("--golden", opts.golden, "compare the report against this file");
    app.add_option("--depth", opts.depth, "reduction depth override");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        std::ostringstream os;
        int code = app.exit(e, os, os);
        (code == 0 ? out : err) << os.str();
        return code == 0 ? 0 : 2;
    }
    return run(opts, out, err);
}

} // namespace potsys
