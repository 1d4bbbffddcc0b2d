#include "potsys/conservation.hpp"

namespace potsys {

Expr equationResidual(const PdeEquation& eq) { return jetSymbol(eq.lead) - eq.rhs; }

CheckReport verify_divergence(const ConservedVector& cv, const PdeSystem& sys,
                              int depthOverride) {
    Expr div = total_derivative(cv.T, sys.ctx.t, sys.ctx) +
               total_derivative(cv.X, sys.ctx.x, sys.ctx);
    Expr res = reduce_mod_system(div, sys, depthOverride);
    if (res.isZero()) return {true, {}};
    return {false, {res}};
}

CheckReport verify_characteristic(const ConservedVector& cv, const PdeSystem& sys) {
    if (!cv.hasChar())
        fail(Error::Kind::Input, "conserved vector carries no multiplier tuple");
    if (cv.chars.size() != sys.equations.size())
        fail(Error::Kind::Input, "multiplier tuple size does not match the system");
    Expr res = total_derivative(cv.T, sys.ctx.t, sys.ctx) +
               total_derivative(cv.X, sys.ctx.x, sys.ctx);
    for (size_t m = 0; m < sys.equations.size(); ++m)
        res = res - cv.chars[m] * equationResidual(sys.equations[m]);
    if (res.isZero()) return {true, {}};
    return {false, {res}};
}

bool is_trivial_characteristic(const std::vector<Expr>& lambda, const PdeSystem& sys,
                               int depthOverride) {
    for (const Expr& l : lambda)
        if (!reduce_mod_system(l, sys, depthOverride).isZero()) return false;
    return true;
}

bool equivalent_by_characteristic(const std::vector<Expr>& a,
                                  const std::vector<Expr>& b, const PdeSystem& sys) {
    if (a.size() != b.size())
        fail(Error::Kind::Input, "multiplier tuples of different size");
    std::vector<Expr> d;
    d.reserve(a.size());
    for (size_t i = 0; i < a.size(); ++i) d.push_back(a[i] - b[i]);
    return is_trivial_characteristic(d, sys);
}

CheckReport check_equivalence(const ConservedVector& cv, const ConservedVector& cvPrime,
                              const EquivalenceWitness& w, const PdeSystem& sys) {
    CheckReport r{true, {}};
    Expr tHat = reduce_mod_system(w.That, sys);
    Expr xHat = reduce_mod_system(w.Xhat, sys);
    if (!tHat.isZero()) {
        r.pass = false;
        r.residuals.push_back(tHat);
    }
    if (!xHat.isZero()) {
        r.pass = false;
        r.residuals.push_back(xHat);
    }
    Expr tId = cvPrime.T - (cv.T + w.That + total_derivative(w.H, sys.ctx.x, sys.ctx));
    Expr xId = cvPrime.X - (cv.X + w.Xhat - total_derivative(w.H, sys.ctx.t, sys.ctx));
    if (!tId.isZero()) {
        r.pass = false;
        r.residuals.push_back(tId);
    }
    if (!xId.isZero() && r.pass) {
        r.pass = false;
        r.residuals.push_back(xId);
    } else if (!xId.isZero()) {
        r.residuals.push_back(xId);
    }
    return r;
}

ConservedVector linear_combination(const std::vector<Expr>& coeffs,
                                   const std::vector<ConservedVector>& cvs) {
    if (coeffs.size() != cvs.size())
        fail(Error::Kind::Input, "coefficient count does not match vector count");
    ConservedVector out;
    out.T = Expr(0);
    out.X = Expr(0);
    bool allChars = !cvs.empty();
    for (const auto& cv : cvs)
        if (!cv.hasChar()) allChars = false;
    if (allChars) out.chars.assign(cvs[0].chars.size(), Expr(0));
    for (size_t i = 0; i < cvs.size(); ++i) {
        out.T = out.T + coeffs[i] * cvs[i].T;
        out.X = out.X + coeffs[i] * cvs[i].X;
        if (allChars) {
            if (cvs[i].chars.size() != out.chars.size())
                fail(Error::Kind::Input, "multiplier tuples of different size");
            for (size_t m = 0; m < out.chars.size(); ++m)
                out.chars[m] = out.chars[m] + coeffs[i] * cvs[i].chars[m];
        }
    }
    return out;
}

} // namespace potsys
