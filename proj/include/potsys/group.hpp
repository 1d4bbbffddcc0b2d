#pragma once

#include <string>
#include <vector>

#include "potsys/conservation.hpp"
#include "potsys/parse.hpp"

namespace potsys {

/// Affine diagonal point transformation: new_t = tScale*t + tShift,
/// new_x = xScale*x + xShift, new_u = uScale*u, together with an overall
/// multiplier on the conservation law (covering u-scaling and declared
/// potential scaling) and optional rescalings of arbitrary elements.
struct PointTransformation {
    Expr tScale = Expr(1);
    Expr tShift = Expr(0);
    Expr xScale = Expr(1);
    Expr xShift = Expr(0);
    Expr uScale = Expr(1);
    Expr clScale = Expr(1);
    std::map<std::string, ElementMap> elements;
    std::vector<Expr> nonzero; // constraint expressions that must not vanish
};

/// Transformed conserved vector, re-expressed in the original variable
/// names. Multiplier tuples transform as clScale * subst(lambda), i.e.
/// relative to the substituted (not re-normalized) equations.
ConservedVector apply_transformation(const PointTransformation& g,
                                     const ConservedVector& cv, const PdeSystem& sys);

// --- Rule-driven canonicalization -----------------------------------------

/// Atomic guard condition on one combination coefficient: c_i == 0 or != 0.
struct GuardAtom {
    size_t comp;
    bool isZero;
};
using GuardConj = std::vector<GuardAtom>;
/// Disjunction of conjunctions, e.g. "c1 != 0 || c2 != 0".
using Guard = std::vector<GuardConj>;

Guard parse_guard(const std::string& text, const std::vector<std::string>& coeffNames);

enum class RuleKind { Affine, Rotation };

/// One verified normalization step. Affine rules declare substitutions for
/// t and/or x plus an overall scale; the claimed effect on the coefficient
/// tuple is machine-checked against the action on the combination
/// characteristic before every application. Rotation rules declare a
/// one-parameter shift whose induced action on a two-vector basis is a
/// rotation matrix times a scalar factor; the tool verifies the matrix
/// identities on the conserved vectors themselves and requires a declared
/// potential scaling to absorb the radius.
struct NormalizationRule {
    std::string name;
    RuleKind kind = RuleKind::Affine;
    Guard guard;
    std::map<std::string, Expr> subst; // variable -> replacement
    Expr scale = Expr(1);
    std::vector<Expr> effect;
    // rotation rules only:
    std::string param;
    Expr factor = Expr(1);
    std::vector<Expr> matrix; // row-major 2x2 in the rotation parameter
    bool potentialScaling = false;
};

struct GroupSchema {
    std::vector<std::string> coeffNames;
    std::vector<NormalizationRule> rules;
};

struct CanonicalClass {
    std::vector<Rational> tuple;
    std::vector<Expr> chars;              // combination multiplier tuple
    std::vector<std::string> provenance;  // rule names applied, in order
};

struct CanonicalSet {
    std::vector<CanonicalClass> classes;
    size_t basisSize = 0;
    size_t rulesChecked = 0; // soundness checks performed during the run
};

/// Reduces the generic combination sum(c_i * basis_i) to canonical
/// representatives by replaying the rule list. Branches on undetermined
/// guards (zero branch explored first, so the deterministic class order
/// starts at the "most degenerate" tuple), checks every applied rule's
/// soundness symbolically, requires every leaf tuple to be fully concrete
/// (otherwise: non-exhaustive rule list error), drops the all-zero leaf as
/// trivial, and merges duplicate leaves.
CanonicalSet canonicalize(const GroupSchema& schema,
                          const std::vector<ConservedVector>& basis,
                          const JetContext& ctx);

/// Same reduction, starting from a fully concrete coefficient tuple
/// (used to check that canonical representatives are fixed points).
CanonicalSet canonicalize_from(const GroupSchema& schema,
                               const std::vector<ConservedVector>& basis,
                               const JetContext& ctx,
                               const std::vector<Rational>& tuple);

struct CollapseReport {
    size_t basisSize = 0;
    size_t classCount = 0;
    bool collapsed = false; // fewer classes than basis dimensions
};

CollapseReport collapse_check(const CanonicalSet& canon);

} // namespace potsys
