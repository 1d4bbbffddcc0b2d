#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "potsys/potential.hpp"
#include "potsys/parse.hpp"

using namespace potsys;

namespace {

Expr sym(const char* n) { return Expr::symbol(n); }

JetContext uCtx() { return JetContext{"t", "x", {"u"}}; }

PdeSystem diffusionSystem() {
    Expr u = sym("u"), ux = sym("u_x"), uxx = sym("u_xx");
    PdeSystem sys;
    sys.ctx = uCtx();
    sys.equations.push_back(
        {JetVar{"u", 1, 0}, makeFunc("A", {u}, {1}) * ux * ux + makeFunc("A", {u}, {0}) * uxx});
    return sys;
}

PdeSystem waveSystem() {
    Expr u = sym("u"), ux = sym("u_x"), uxx = sym("u_xx");
    PdeSystem sys;
    sys.ctx = uCtx();
    sys.equations.push_back(
        {JetVar{"u", 2, 0}, makeFunc("f", {u}, {1}) * ux * ux + makeFunc("f", {u}, {0}) * uxx});
    return sys;
}

ConservedVector diffusionCvU() {
    Expr u = sym("u"), ux = sym("u_x");
    return {u, -makeFunc("A", {u}, {0}) * ux, {Expr(1)}};
}

ConservedVector diffusionCvXU() {
    Expr u = sym("u"), ux = sym("u_x"), x = sym("x");
    return {x * u, -x * makeFunc("A", {u}, {0}) * ux + makeAntiDeriv("A", "u"), {x}};
}

std::vector<ConservedVector> waveBasis() {
    Expr u = sym("u"), ut = sym("u_t"), ux = sym("u_x");
    Expr t = sym("t"), x = sym("x");
    Expr f = makeFunc("f", {u}, {0});
    Expr intf = makeAntiDeriv("f", "u");
    return {{ut, -f * ux, {Expr(1)}},
            {t * ut - u, -t * f * ux, {t}},
            {x * ut, -(x * f * ux - intf), {x}},
            {x * (t * ut - u), -t * (x * f * ux - intf), {t * x}}};
}

CanonicalSet concreteClasses(std::vector<std::vector<Rational>> tuples, size_t basisSize,
                             const std::vector<ConservedVector>& basis) {
    CanonicalSet canon;
    canon.basisSize = basisSize;
    for (auto& tup : tuples) {
        CanonicalClass cls;
        cls.tuple = tup;
        for (size_t c = 0; c < basis[0].chars.size(); ++c) {
            Expr lam(0);
            for (size_t i = 0; i < basis.size(); ++i)
                lam = lam + Expr(tup[i]) * basis[i].chars[c];
            cls.chars.push_back(lam);
        }
        canon.classes.push_back(std::move(cls));
    }
    return canon;
}

} // namespace

TEST_CASE("single potential extends the diffusion equation") {
    PdeSystem base = diffusionSystem();
    PotentialSystem ps = build_potential_system(base, {diffusionCvU()}, {"v"});

    REQUIRE(ps.system.equations.size() == 3);
    CHECK(ps.system.ctx.isDependent("v"));
    CHECK(ps.potentials == std::vector<std::string>{"v"});
    CHECK(ps.complete);

    const PdeEquation& vx = ps.system.equations[1];
    const PdeEquation& vt = ps.system.equations[2];
    CHECK(vx.lead == JetVar{"v", 0, 1});
    CHECK(vx.rhs == sym("u"));
    CHECK(vt.lead == JetVar{"v", 1, 0});
    CHECK(vt.rhs == makeFunc("A", {sym("u")}, {0}) * sym("u_x"));

    // the cross-derivative of the new equations agrees modulo the base system
    Expr cross = total_derivative(vx.rhs, "t", ps.system.ctx) -
                 total_derivative(vt.rhs, "x", ps.system.ctx);
    CHECK(reduce_mod_system(cross, base).isZero());
}

TEST_CASE("canonical classes enumerate into numbered potential systems") {
    PdeSystem base = diffusionSystem();
    std::vector<ConservedVector> basis{diffusionCvU(), diffusionCvXU()};
    CanonicalSet canon = concreteClasses({{1, 0}, {0, 1}}, 2, basis);

    auto systems = enumerate_potential_systems(base, basis, canon);
    REQUIRE(systems.size() == 2);
    CHECK(systems[0].potentials == std::vector<std::string>{"v1"});
    CHECK(systems[1].potentials == std::vector<std::string>{"v2"});
    CHECK(systems[0].system.equations[1].rhs == sym("u"));
    CHECK(systems[1].system.equations[1].rhs == sym("x") * sym("u"));
    CHECK(systems[1].system.equations[2].rhs ==
          sym("x") * makeFunc("A", {sym("u")}, {0}) * sym("u_x") - makeAntiDeriv("A", "u"));

    PotentialSystem both = combined_potential_system(base, basis, canon);
    REQUIRE(both.system.equations.size() == 5);
    CHECK(both.potentials == (std::vector<std::string>{"v1", "v2"}));
    CHECK(both.complete);
    CHECK(both.system.equations[3].lead == JetVar{"v2", 0, 1});
    CHECK(both.system.equations[3].rhs == sym("x") * sym("u"));
}

TEST_CASE("wave classes produce the expected second-order extensions") {
    PdeSystem base = waveSystem();
    auto basis = waveBasis();
    CanonicalSet canon = concreteClasses({{1, 0, 0, 0},
                                          {0, 1, 0, 0},
                                          {0, 0, 1, 0},
                                          {0, 1, 1, 0},
                                          {0, 0, 0, 1},
                                          {1, 0, 0, 1}},
                                         4, basis);
    auto systems = enumerate_potential_systems(base, basis, canon);
    REQUIRE(systems.size() == 6);

    Expr u = sym("u"), ut = sym("u_t"), ux = sym("u_x");
    Expr t = sym("t"), x = sym("x");
    Expr f = makeFunc("f", {u}, {0});
    Expr intf = makeAntiDeriv("f", "u");

    CHECK(systems[0].system.equations[1].rhs == ut);
    CHECK(systems[0].system.equations[2].rhs == f * ux);
    CHECK(systems[1].system.equations[1].rhs == t * ut - u);
    CHECK(systems[1].system.equations[2].rhs == t * f * ux);
    CHECK(systems[3].system.equations[1].rhs == x * ut + t * ut - u);
    CHECK(systems[3].system.equations[2].rhs == x * f * ux - intf + t * f * ux);
    CHECK(systems[5].system.equations[1].rhs == x * (t * ut - u) + ut);
    CHECK(systems[5].system.equations[2].rhs == t * (x * f * ux - intf) + f * ux);
    for (const auto& ps : systems) CHECK(ps.complete);
}

TEST_CASE("equation listings are stable and readable") {
    PdeSystem base = diffusionSystem();
    PotentialSystem ps = build_potential_system(base, {diffusionCvXU()}, {"v2"});
    auto lines = describe_equations(ps);
    REQUIRE(lines.size() == 3);
    CHECK(lines[1] == "v2_x = u*x");
    CHECK(lines[2] == "v2_t = -Int(A,u) + u_x*x*A(u)");
}

TEST_CASE("ill-posed potential requests are rejected") {
    PdeSystem base = diffusionSystem();

    ConservedVector open{sym("u"), Expr(0), {}};
    CHECK_THROWS_AS(build_potential_system(base, {open}, {"v"}), Error);

    CHECK_THROWS_AS(build_potential_system(base, {diffusionCvU()}, {"u"}), Error);
    CHECK_THROWS_AS(build_potential_system(base, {diffusionCvU()}, {"x"}), Error);
    CHECK_THROWS_AS(
        build_potential_system(base, {diffusionCvU(), diffusionCvU()}, {"v1", "v1"}), Error);

    // a gauge vector carries the zero multiplier: it closes, but introducing
    // it alongside a genuine one adds nothing
    Expr H = sym("u") * sym("x");
    ConservedVector gauge{total_derivative(H, "x", base.ctx),
                          -total_derivative(H, "t", base.ctx),
                          {Expr(0)}};
    CHECK(verify_divergence(gauge, base).pass);
    PotentialSystem lone = build_potential_system(base, {gauge}, {"w"});
    CHECK_FALSE(lone.complete);
    CHECK_THROWS_AS(
        build_potential_system(base, {diffusionCvU(), gauge}, {"v", "w"}), Error);
}
