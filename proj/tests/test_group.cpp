#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "potsys/group.hpp"
#include "potsys/parse.hpp"

using namespace potsys;

namespace {

Expr sym(const char* n) { return Expr::symbol(n); }

JetContext uCtx() { return JetContext{"t", "x", {"u"}}; }

// u_t = A'(u) u_x^2 + A(u) u_xx
PdeSystem diffusionSystem() {
    Expr u = sym("u"), ux = sym("u_x"), uxx = sym("u_xx");
    PdeSystem sys;
    sys.ctx = uCtx();
    sys.equations.push_back(
        {JetVar{"u", 1, 0}, makeFunc("A", {u}, {1}) * ux * ux + makeFunc("A", {u}, {0}) * uxx});
    return sys;
}

// u_tt = f'(u) u_x^2 + f(u) u_xx
PdeSystem waveSystem() {
    Expr u = sym("u"), ux = sym("u_x"), uxx = sym("u_xx");
    PdeSystem sys;
    sys.ctx = uCtx();
    sys.equations.push_back(
        {JetVar{"u", 2, 0}, makeFunc("f", {u}, {1}) * ux * ux + makeFunc("f", {u}, {0}) * uxx});
    return sys;
}

// Densities and fluxes admitted by the diffusion equation, with multipliers.
ConservedVector diffusionCvU() {
    Expr u = sym("u"), ux = sym("u_x");
    ConservedVector cv;
    cv.T = u;
    cv.X = -makeFunc("A", {u}, {0}) * ux;
    cv.chars = {Expr(1)};
    return cv;
}

ConservedVector diffusionCvXU() {
    Expr u = sym("u"), ux = sym("u_x"), x = sym("x");
    ConservedVector cv;
    cv.T = x * u;
    cv.X = -x * makeFunc("A", {u}, {0}) * ux + makeAntiDeriv("A", "u");
    cv.chars = {x};
    return cv;
}

// The four vectors admitted by the nonlinear wave equation.
std::vector<ConservedVector> waveBasis() {
    Expr u = sym("u"), ut = sym("u_t"), ux = sym("u_x");
    Expr t = sym("t"), x = sym("x");
    Expr f = makeFunc("f", {u}, {0});
    Expr intf = makeAntiDeriv("f", "u");
    ConservedVector c1{ut, -f * ux, {Expr(1)}};
    ConservedVector c2{t * ut - u, -t * f * ux, {t}};
    ConservedVector c3{x * ut, -(x * f * ux - intf), {x}};
    ConservedVector c4{x * (t * ut - u), -t * (x * f * ux - intf), {t * x}};
    return {c1, c2, c3, c4};
}

GroupSchema diffusionSchema() {
    std::vector<std::string> names{"c1", "c2"};
    SymbolTable tab;
    tab.symbols = {"c1", "c2", "t", "x"};
    auto ex = [&](const std::string& s) { return parse_expression(s, tab); };
    NormalizationRule toU;
    toU.name = "normalize-constant";
    toU.guard = parse_guard("c2 == 0 && c1 != 0", names);
    toU.scale = ex("1/c1");
    toU.effect = {ex("1"), ex("0")};
    NormalizationRule toXU;
    toXU.name = "normalize-linear";
    toXU.guard = parse_guard("c2 != 0", names);
    toXU.subst["x"] = ex("x - c1/c2");
    toXU.scale = ex("1/c2");
    toXU.effect = {ex("0"), ex("1")};
    return GroupSchema{names, {toU, toXU}};
}

GroupSchema waveSchema() {
    // slots follow the basis order (multipliers 1, t, x, t*x), so the
    // coefficient named c1 multiplies t*x, matching lambda = c1 t x + c2 x +
    // c3 t + c4
    std::vector<std::string> names{"c4", "c3", "c2", "c1"};
    SymbolTable tab;
    tab.symbols = {"c1", "c2", "c3", "c4", "t", "x"};
    auto ex = [&](const std::string& s) { return parse_expression(s, tab); };
    auto mk = [&](const char* name, const char* guard,
                  std::initializer_list<std::pair<const char*, const char*>> subs,
                  const char* scale, std::initializer_list<const char*> eff) {
        NormalizationRule r;
        r.name = name;
        r.guard = parse_guard(guard, names);
        for (auto& [v, e] : subs) r.subst[v] = ex(e);
        r.scale = ex(scale);
        for (auto* e : eff) r.effect.push_back(ex(e));
        return r;
    };
    std::vector<NormalizationRule> rules;
    rules.push_back(mk("tx-translate", "c1 != 0",
                       {{"t", "t - c2/c1"}, {"x", "x - c3/c1"}}, "1/c1",
                       {"c4/c1 - c2*c3/c1^2", "0", "0", "1"}));
    rules.push_back(mk("tx-rescale", "c1 != 0 && c2 == 0 && c3 == 0 && c4 != 0",
                       {{"t", "c4*t/c1"}}, "1/c4", {"1", "0", "0", "1"}));
    rules.push_back(mk("x-translate", "c1 == 0 && c2 != 0", {{"x", "x - c4/c2"}},
                       "1/c2", {"0", "c3/c2", "1", "0"}));
    rules.push_back(mk("x-rescale", "c1 == 0 && c2 != 0 && c3 != 0",
                       {{"t", "c2*t/c3"}}, "1/c2", {"c4/c2", "1", "1", "0"}));
    rules.push_back(mk("t-translate", "c1 == 0 && c2 == 0 && c3 != 0",
                       {{"t", "t - c4/c3"}}, "1/c3", {"0", "1", "0", "0"}));
    rules.push_back(mk("constant-rescale", "c1 == 0 && c2 == 0 && c3 == 0 && c4 != 0",
                       {}, "1/c4", {"1", "0", "0", "0"}));
    return GroupSchema{names, rules};
}

// Convection-diffusion pair rotated into each other by time shifts.
struct RotationFixture {
    PdeSystem sys;
    std::vector<ConservedVector> basis;
    GroupSchema schema;
};

RotationFixture rotationFixture() {
    SymbolTable tab;
    tab.symbols = {"t", "x", "mu", "delta"};
    tab.jets = uCtx();
    tab.functions["A"] = FunctionDecl{{"u"}};
    auto ex = [&](const std::string& s) { return parse_expression(s, tab); };

    Expr f = ex("exp(mu*arctan(x)) * (x^2 + 1)^(-3/2)");
    Expr h = ex("exp(mu*arctan(x)) * (x^2 + 1)^(-1/2)");

    RotationFixture fx;
    fx.sys.ctx = uCtx();
    fx.sys.equations.push_back(
        {JetVar{"u", 1, 0},
         (ex("Diff(A,u) * u_x^2 + A(u) * u_xx") + h * ex("u_x")) / f});

    Expr p = ex("exp(mu*t) * (x*cos(t) + sin(t))");
    Expr q = ex("exp(mu*t) * (x*sin(t) - cos(t))");
    Expr flux = ex("A(u)*u_x") + h * ex("u");
    ConservedVector cv1{p * f * ex("u"), -p * flux + ex("exp(mu*t)*cos(t)*Int(A,u)"),
                        {p * f}};
    ConservedVector cv2{q * f * ex("u"), -q * flux + ex("exp(mu*t)*sin(t)*Int(A,u)"),
                        {q * f}};
    fx.basis = {cv1, cv2};

    std::vector<std::string> names{"c1", "c2"};
    NormalizationRule rot;
    rot.name = "time-rotation";
    rot.kind = RuleKind::Rotation;
    rot.guard = parse_guard("c1 != 0 || c2 != 0", names);
    rot.subst["t"] = ex("t - delta");
    rot.param = "delta";
    rot.factor = ex("exp(-mu*delta)");
    rot.matrix = {ex("cos(delta)"), ex("sin(delta)"), ex("-sin(delta)"), ex("cos(delta)")};
    rot.potentialScaling = true;
    rot.effect = {Expr(1), Expr(0)};
    fx.schema = GroupSchema{names, {rot}};
    return fx;
}

void expectError(const std::function<void()>& fn, Error::Kind kind,
                 const std::string& needle) {
    try {
        fn();
        FAIL_CHECK("expected an error containing '" << needle << "'");
    } catch (const Error& e) {
        CHECK(e.kind() == kind);
        std::string msg = e.what();
        INFO("message: " << msg);
        CHECK(msg.find(needle) != std::string::npos);
    }
}

} // namespace

TEST_CASE("guard parsing") {
    std::vector<std::string> names{"c1", "c2", "c3"};
    Guard g = parse_guard("c1 != 0 && c2 == 0 || c3 != 0", names);
    REQUIRE(g.size() == 2);
    REQUIRE(g[0].size() == 2);
    CHECK(g[0][0].comp == 0);
    CHECK_FALSE(g[0][0].isZero);
    CHECK(g[0][1].comp == 1);
    CHECK(g[0][1].isZero);
    REQUIRE(g[1].size() == 1);
    CHECK(g[1][0].comp == 2);

    expectError([&] { parse_guard("c9 != 0", names); }, Error::Kind::Input,
                "unknown coefficient");
    expectError([&] { parse_guard("c1 != 1", names); }, Error::Kind::Input,
                "against 0");
}

TEST_CASE("identity transformation is the identity") {
    PdeSystem sys = diffusionSystem();
    ConservedVector cv = diffusionCvXU();
    ConservedVector out = apply_transformation(PointTransformation{}, cv, sys);
    CHECK(out.T == cv.T);
    CHECK(out.X == cv.X);
    REQUIRE(out.chars.size() == 1);
    CHECK(out.chars[0] == cv.chars[0]);
}

TEST_CASE("time translation mixes the wave vectors linearly") {
    PdeSystem sys = waveSystem();
    auto basis = waveBasis();
    PointTransformation g;
    g.tShift = Expr(2); // new t = old t + 2, i.e. substitute t -> t - 2
    ConservedVector out = apply_transformation(g, basis[3], sys);
    // x((t-2)u_t - u) = T4 - 2 T3, and likewise for flux and multiplier
    CHECK(out.T == basis[3].T - Expr(2) * basis[2].T);
    CHECK(out.X == basis[3].X - Expr(2) * basis[2].X);
    CHECK(out.chars[0] == basis[3].chars[0] - Expr(2) * basis[2].chars[0]);
    // it still closes on solutions of the (translation invariant) equation
    CHECK(verify_divergence(out, sys).pass);
}

TEST_CASE("anisotropic scaling preserves the divergence identity") {
    // t -> 4t, x -> 2x leaves u_t = (A u_x)_x invariant
    PdeSystem sys = diffusionSystem();
    PointTransformation g;
    g.tScale = Expr(4);
    g.xScale = Expr(2);
    ConservedVector out = apply_transformation(g, diffusionCvU(), sys);
    CHECK(out.T == Expr(4) * sym("u"));
    CHECK(verify_divergence(out, sys).pass);

    g.nonzero.push_back(Expr(0));
    expectError([&] { apply_transformation(g, diffusionCvU(), sys); },
                Error::Kind::Constraint, "constraint violated");
}

TEST_CASE("diffusion combinations reduce to two classes") {
    PdeSystem sys = diffusionSystem();
    std::vector<ConservedVector> basis{diffusionCvU(), diffusionCvXU()};
    GroupSchema schema = diffusionSchema();
    CanonicalSet canon = canonicalize(schema, basis, sys.ctx);

    REQUIRE(canon.classes.size() == 2);
    CHECK(canon.classes[0].tuple == std::vector<Rational>{1, 0});
    CHECK(canon.classes[1].tuple == std::vector<Rational>{0, 1});
    CHECK(canon.classes[0].chars[0] == Expr(1));
    CHECK(canon.classes[1].chars[0] == sym("x"));
    CHECK(canon.basisSize == 2);
    CHECK(canon.rulesChecked >= 2);
    CHECK_FALSE(collapse_check(canon).collapsed);

    for (const auto& cls : canon.classes) {
        CanonicalSet again = canonicalize_from(schema, basis, sys.ctx, cls.tuple);
        REQUIRE(again.classes.size() == 1);
        CHECK(again.classes[0].tuple == cls.tuple);
    }
    // a generic concrete combination lands in the generic class
    CanonicalSet one = canonicalize_from(schema, basis, sys.ctx, {Rational(3), Rational(2)});
    REQUIRE(one.classes.size() == 1);
    CHECK(one.classes[0].tuple == std::vector<Rational>{0, 1});
    CanonicalSet two = canonicalize_from(schema, basis, sys.ctx, {Rational(5), Rational(0)});
    REQUIRE(two.classes.size() == 1);
    CHECK(two.classes[0].tuple == std::vector<Rational>{1, 0});
    // the zero combination is trivial and produces no class
    CHECK(canonicalize_from(schema, basis, sys.ctx, {Rational(0), Rational(0)})
              .classes.empty());
}

TEST_CASE("wave combinations reduce to six classes in degeneracy order") {
    PdeSystem sys = waveSystem();
    auto basis = waveBasis();
    GroupSchema schema = waveSchema();
    CanonicalSet canon = canonicalize(schema, basis, sys.ctx);

    Expr t = sym("t"), x = sym("x");
    std::vector<Expr> expected{Expr(1), t, x, x + t, t * x, t * x + Expr(1)};
    REQUIRE(canon.classes.size() == expected.size());
    for (size_t i = 0; i < expected.size(); ++i) {
        INFO("class " << i);
        CHECK(canon.classes[i].chars[0] == expected[i]);
    }
    CHECK(canon.classes[0].tuple == std::vector<Rational>{1, 0, 0, 0});
    CHECK(canon.classes[5].tuple == std::vector<Rational>{1, 0, 0, 1});
    CHECK(canon.rulesChecked >= 6);

    for (const auto& cls : canon.classes) {
        CanonicalSet again = canonicalize_from(schema, basis, sys.ctx, cls.tuple);
        REQUIRE(again.classes.size() == 1);
        CHECK(again.classes[0].tuple == cls.tuple);
    }
    // lambda = 6tx + 3x + 2t + 1 normalizes to tx + 0x + 0t + 0 (constant
    // part 1/6 - 3*2/36 = 0)
    CanonicalSet got = canonicalize_from(schema, basis, sys.ctx,
                                         {Rational(1), Rational(2), Rational(3), Rational(6)});
    REQUIRE(got.classes.size() == 1);
    CHECK(got.classes[0].chars[0] == t * x);
    // lambda = 2tx + 2 keeps its constant: -> tx + 1
    CanonicalSet kept = canonicalize_from(schema, basis, sys.ctx,
                                          {Rational(2), Rational(0), Rational(0), Rational(2)});
    REQUIRE(kept.classes.size() == 1);
    CHECK(kept.classes[0].chars[0] == t * x + Expr(1));
}

TEST_CASE("unsound and incomplete rule lists are rejected") {
    PdeSystem sys = diffusionSystem();
    std::vector<ConservedVector> basis{diffusionCvU(), diffusionCvXU()};

    GroupSchema bad = diffusionSchema();
    bad.rules[1].effect = {Expr(1), Expr(0)}; // claims the wrong class
    expectError([&] { canonicalize(bad, basis, sys.ctx); }, Error::Kind::Constraint,
                "unsound");

    GroupSchema partial = diffusionSchema();
    partial.rules.erase(partial.rules.begin()); // loses the c2 == 0 region
    expectError([&] { canonicalize(partial, basis, sys.ctx); }, Error::Kind::Constraint,
                "not exhaustive");

    GroupSchema skewed = diffusionSchema();
    SymbolTable tab;
    tab.symbols = {"c1", "c2", "t", "x"};
    skewed.rules[1].subst["x"] = parse_expression("x - c1*t/c2", tab);
    expectError([&] { canonicalize(skewed, basis, sys.ctx); }, Error::Kind::Constraint,
                "depends on");
}

TEST_CASE("verified rotation collapses the pair to one class") {
    RotationFixture fx = rotationFixture();

    // the fixture data itself is consistent: both vectors close on solutions
    // and satisfy the multiplier identity
    for (const auto& cv : fx.basis) {
        CHECK(verify_divergence(cv, fx.sys).pass);
        CHECK(verify_characteristic(cv, fx.sys).pass);
    }

    CanonicalSet canon = canonicalize(fx.schema, fx.basis, fx.sys.ctx);
    REQUIRE(canon.classes.size() == 1);
    CHECK(canon.classes[0].tuple == std::vector<Rational>{1, 0});
    CHECK(canon.classes[0].chars[0] == fx.basis[0].chars[0]);
    CollapseReport rep = collapse_check(canon);
    CHECK(rep.collapsed);
    CHECK(rep.basisSize == 2);
    CHECK(rep.classCount == 1);

    RotationFixture broken = rotationFixture();
    SymbolTable tab;
    tab.symbols = {"mu", "delta"};
    broken.schema.rules[0].factor = parse_expression("exp(mu*delta)", tab);
    expectError([&] { canonicalize(broken.schema, broken.basis, broken.sys.ctx); },
                Error::Kind::Constraint, "unsound");

    RotationFixture unscaled = rotationFixture();
    unscaled.schema.rules[0].potentialScaling = false;
    expectError([&] { canonicalize(unscaled.schema, unscaled.basis, unscaled.sys.ctx); },
                Error::Kind::Input, "potential scaling");
}
