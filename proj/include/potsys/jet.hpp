#pragma once

#include <optional>
#include <string>
#include <vector>

#include "potsys/expr.hpp"

namespace potsys {

/// A jet coordinate: derivative of dependent variable `dep` taken `dt` times
/// in time and `dx` times in space. (0,0) is the variable itself.
/// Text form: dep + "_" + "t"*dt + "x"*dx, e.g. u_txx; order zero is "u".
struct JetVar {
    std::string dep;
    int dt = 0;
    int dx = 0;

    int order() const { return dt + dx; }
    friend bool operator==(const JetVar& a, const JetVar& b) {
        return a.dep == b.dep && a.dt == b.dt && a.dx == b.dx;
    }
};

std::string jetName(const JetVar& j);

/// Independent/dependent variable declarations shared by all jet operations.
struct JetContext {
    std::string t = "t";
    std::string x = "x";
    std::vector<std::string> dependents;

    bool isDependent(const std::string& name) const;
};

/// Parses a symbol name as a jet coordinate of a declared dependent
/// variable; nullopt when the name is not a jet coordinate.
std::optional<JetVar> parseJetName(const std::string& name, const JetContext& ctx);

Expr jetSymbol(const JetVar& j);

/// Highest jet order appearing in e (0 when no jets are present).
int jetOrder(const Expr& e, const JetContext& ctx);

/// Total derivative D_w for w one of ctx.t / ctx.x:
/// D_w e = de/dw + sum over jets J of (de/dJ) * J_w.
Expr total_derivative(const Expr& e, const std::string& w, const JetContext& ctx);

/// One equation in solved form: lead = rhs, with lead a jet coordinate that
/// does not occur in any right-hand side after reduction.
struct PdeEquation {
    JetVar lead;
    Expr rhs;
};

struct PdeSystem {
    JetContext ctx;
    std::vector<PdeEquation> equations;
    int order() const;
};

/// Rewrites every occurrence of a leading jet (or a total-derivative
/// consequence of one) by its solved form until a fixed point. The depth
/// bound defaults to 3 * max(order of e, 1) rewriting sweeps; exceeding it
/// raises an error naming the offending jet variable.
Expr reduce_mod_system(const Expr& e, const PdeSystem& sys, int depthOverride = -1);

} // namespace potsys
