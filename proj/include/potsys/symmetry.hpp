#pragma once

#include "potsys/potential.hpp"

#include <map>
#include <string>
#include <vector>

namespace potsys {

/// Unspecified function appearing in generator coefficients (e.g. mu(t,x)),
/// kept opaque with formal partial derivatives.
struct UnknownFunc {
    std::string name;
    std::vector<std::string> args;
};

/// Infinitesimal point generator xi d/dt + tau d/dx + sum eta_a d/du^a.
/// Coefficients are functions of the independent variables and the
/// (order-zero) dependent variables only.
struct VectorField {
    Expr xi = Expr(0);
    Expr tau = Expr(0);
    std::map<std::string, Expr> eta; // dependent name -> coefficient
    std::vector<UnknownFunc> unknowns;
};

/// First Lie prolongation: the coefficient attached to each first-order jet
/// u^a_w, namely D_w(eta_a) - u^a_t D_w(xi) - u^a_x D_w(tau). Only order 1
/// is supported here; higher jets appearing inside a solved second-order
/// system are prolonged internally by check_symmetry.
std::map<std::string, Expr> prolong(const VectorField& vf, const JetContext& ctx,
                                    int order);

/// One split residual of the symmetry condition: the coefficient of a free
/// jet monomial after reducing the prolonged action modulo the system.
struct DeterminingEquation {
    std::string jetMonomial; // "1" for the jet-free part
    Expr relation;
};

struct DeterminingSystem {
    std::vector<DeterminingEquation> equations;

    bool isSymmetry() const { return equations.empty(); }
    std::vector<Expr> relations() const;
};

/// Applies the prolonged generator to every equation residual lead - rhs,
/// reduces modulo the system (including differential consequences of the
/// solved forms), clears denominators, and splits by monomials in the
/// remaining free jet variables. Empty result == vf generates a symmetry.
DeterminingSystem check_symmetry(const VectorField& vf, const PdeSystem& sys,
                                 int depthOverride = -1);

/// For a complete potential system the base equations are differential
/// consequences of the potential ones, so the condition is imposed on the
/// potential equations only (the base equations still drive the reduction).
/// Incomplete systems fall back to checking every equation.
DeterminingSystem check_symmetry(const VectorField& vf, const PotentialSystem& ps,
                                 int depthOverride = -1);

/// Exact span equality over the rationals of two lists of relations (each
/// side must reduce into the row space of the other). Used to compare a
/// computed determining system against an expected one modulo rescaling
/// and recombination.
bool same_relation_span(const std::vector<Expr>& got, const std::vector<Expr>& expected);

/// True iff the verified symmetry moves the base variables in a way that
/// genuinely involves a potential: xi, tau, or the coefficient of a
/// non-potential dependent depends on one of ps.potentials. Errors if vf is
/// not a symmetry of the system.
bool is_potential_symmetry(const VectorField& vf, const PotentialSystem& ps,
                           int depthOverride = -1);

/// Lie bracket on point fields: coefficients X1(c2) - X2(c1).
VectorField commutator(const VectorField& a, const VectorField& b,
                       const JetContext& ctx);

} // namespace potsys
