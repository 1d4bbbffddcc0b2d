#include "potsys/jet.hpp"

#include <algorithm>

namespace potsys {

std::string jetName(const JetVar& j) {
    if (j.order() == 0) return j.dep;
    std::string s = j.dep + "_";
    s.append(static_cast<size_t>(j.dt), 't');
    s.append(static_cast<size_t>(j.dx), 'x');
    return s;
}

bool JetContext::isDependent(const std::string& name) const {
    return std::find(dependents.begin(), dependents.end(), name) != dependents.end();
}

std::optional<JetVar> parseJetName(const std::string& name, const JetContext& ctx) {
    if (ctx.isDependent(name)) return JetVar{name, 0, 0};
    auto us = name.rfind('_');
    if (us == std::string::npos) return std::nullopt;
    std::string dep = name.substr(0, us);
    if (!ctx.isDependent(dep)) return std::nullopt;
    JetVar j{dep, 0, 0};
    size_t i = us + 1;
    if (i == name.size()) return std::nullopt;
    // t's must precede x's so each derivative has a unique name
    while (i < name.size() && name[i] == 't') {
        ++j.dt;
        ++i;
    }
    while (i < name.size() && name[i] == 'x') {
        ++j.dx;
        ++i;
    }
    if (i != name.size()) return std::nullopt;
    return j;
}

Expr jetSymbol(const JetVar& j) { return Expr::symbol(jetName(j)); }

int jetOrder(const Expr& e, const JetContext& ctx) {
    std::map<std::string, bool> syms;
    collectSymbols(e, syms);
    int order = 0;
    for (const auto& [name, _] : syms)
        if (auto j = parseJetName(name, ctx)) order = std::max(order, j->order());
    return order;
}

Expr total_derivative(const Expr& e, const std::string& w, const JetContext& ctx) {
    bool isT = w == ctx.t;
    if (!isT && w != ctx.x)
        fail(Error::Kind::Input, "total derivative direction must be " + ctx.t +
                                     " or " + ctx.x + ", got " + w);
    Expr result = diff(e, w);
    std::map<std::string, bool> syms;
    collectSymbols(e, syms);
    for (const auto& [name, _] : syms) {
        auto j = parseJetName(name, ctx);
        if (!j) continue;
        Expr partial = diff(e, name);
        if (partial.isZero()) continue;
        JetVar bumped = *j;
        (isT ? bumped.dt : bumped.dx) += 1;
        result = result + partial * jetSymbol(bumped);
    }
    return result;
}

int PdeSystem::order() const {
    int o = 0;
    for (const auto& eq : equations) o = std::max(o, eq.lead.order());
    return o;
}

namespace {

// The solved form whose lead the jet j extends, if any; first equation in
// declaration order wins so reduction is deterministic.
const PdeEquation* findRewrite(const JetVar& j, const PdeSystem& sys) {
    for (const auto& eq : sys.equations)
        if (eq.lead.dep == j.dep && j.dt >= eq.lead.dt && j.dx >= eq.lead.dx)
            return &eq;
    return nullptr;
}

// D_t^a D_x^b applied to rhs (time derivatives first; the operators
// commute, the order only fixes the intermediate forms).
Expr consequence(const PdeEquation& eq, const JetVar& j, const JetContext& ctx) {
    Expr r = eq.rhs;
    for (int k = 0; k < j.dt - eq.lead.dt; ++k) r = total_derivative(r, ctx.t, ctx);
    for (int k = 0; k < j.dx - eq.lead.dx; ++k) r = total_derivative(r, ctx.x, ctx);
    return r;
}

} // namespace

Expr reduce_mod_system(const Expr& e, const PdeSystem& sys, int depthOverride) {
    int depth = depthOverride > 0 ? depthOverride
                                  : 3 * std::max(jetOrder(e, sys.ctx), 1);
    Expr cur = e;
    for (int sweep = 0;; ++sweep) {
        std::map<std::string, bool> syms;
        collectSymbols(cur, syms);
        Subst s;
        std::string firstHit;
        for (const auto& [name, _] : syms) {
            auto j = parseJetName(name, sys.ctx);
            if (!j) continue;
            const PdeEquation* eq = findRewrite(*j, sys);
            if (!eq) continue;
            if (firstHit.empty()) firstHit = name;
            s.symbols[name] = consequence(*eq, *j, sys.ctx);
        }
        if (s.symbols.empty()) return cur;
        if (sweep >= depth)
            fail(Error::Kind::DepthExceeded,
                 "reduction depth bound exceeded while rewriting jet variable " +
                     firstHit);
        cur = substitute(cur, s);
    }
}

} // namespace potsys
