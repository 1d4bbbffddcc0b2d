#pragma once

#include <string>
#include <vector>

#include "potsys/jet.hpp"

namespace potsys {

/// Density/flux pair with the sign convention D_t T + D_x X = 0 on
/// solutions. The optional multiplier tuple (one entry per equation of the
/// system) makes the divergence an identity: D_t T + D_x X = sum(char_m * L_m).
struct ConservedVector {
    Expr T;
    Expr X;
    std::vector<Expr> chars;

    bool hasChar() const { return !chars.empty(); }
};

struct CheckReport {
    bool pass = false;
    std::vector<Expr> residuals; // empty on pass
};

/// L_m = lead - rhs of equation m.
Expr equationResidual(const PdeEquation& eq);

/// Pass iff D_t T + D_x X reduces to 0 modulo the system.
CheckReport verify_divergence(const ConservedVector& cv, const PdeSystem& sys,
                              int depthOverride = -1);

/// Pass iff D_t T + D_x X - sum(char_m * L_m) normalizes to 0 identically
/// (no reduction modulo the system). Requires a multiplier tuple.
CheckReport verify_characteristic(const ConservedVector& cv, const PdeSystem& sys);

/// A multiplier tuple is trivial when every component vanishes on solutions.
bool is_trivial_characteristic(const std::vector<Expr>& lambda, const PdeSystem& sys,
                               int depthOverride = -1);

/// Conserved vectors are equivalent iff the difference of their multiplier
/// tuples is trivial (for totally nondegenerate systems).
bool equivalent_by_characteristic(const std::vector<Expr>& a,
                                  const std::vector<Expr>& b, const PdeSystem& sys);

/// Caller-supplied certificate for cv' ~ cv:
/// T' = T + That + D_x H and X' = X + Xhat - D_t H, with That and Xhat
/// vanishing on solutions.
struct EquivalenceWitness {
    Expr H;
    Expr That;
    Expr Xhat;
};

CheckReport check_equivalence(const ConservedVector& cv, const ConservedVector& cvPrime,
                              const EquivalenceWitness& w, const PdeSystem& sys);

/// Componentwise sum(coeffs[i] * cvs[i]); multiplier tuples combine the same
/// way when every input carries one.
ConservedVector linear_combination(const std::vector<Expr>& coeffs,
                                   const std::vector<ConservedVector>& cvs);

} // namespace potsys
