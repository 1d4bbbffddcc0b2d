#pragma once

#include "potsys/conservation.hpp"
#include "potsys/group.hpp"

#include <string>
#include <vector>

namespace potsys {

/// A base system extended by potential variables: each conserved vector
/// (T, X) contributes a new dependent v with v_x = T and v_t = -X, so that
/// the cross-derivative condition v_xt = v_tx is exactly the divergence
/// identity D_t T + D_x X = 0 on solutions.
struct PotentialSystem {
    PdeSystem system;                    // base equations followed by potential ones
    std::vector<std::string> potentials; // new dependents, in introduction order
    /// True when every solution of the base system lifts to the extended
    /// system: a single base equation whose conserved vector carries a
    /// verified multiplier that does not vanish on solutions.
    bool complete = false;
};

/// Extends `base` by one potential per conserved vector. Preconditions
/// (checked, Error on failure): every name is a fresh dependent, every
/// vector closes on solutions of `base` (cross-derivative consistency),
/// and no vector's multiplier tuple is trivial when several potentials are
/// introduced at once (a degenerate vector adds no independent potential).
PotentialSystem build_potential_system(const PdeSystem& base,
                                       const std::vector<ConservedVector>& cvs,
                                       const std::vector<std::string>& names);

/// One single-potential system per canonical class, in canonical-set order,
/// with potentials named v1, v2, ... The conserved vector of class k is the
/// combination of `basis` by the class tuple.
std::vector<PotentialSystem> enumerate_potential_systems(
    const PdeSystem& base, const std::vector<ConservedVector>& basis,
    const CanonicalSet& canon);

/// The simultaneous system introducing every canonical class potential.
PotentialSystem combined_potential_system(const PdeSystem& base,
                                          const std::vector<ConservedVector>& basis,
                                          const CanonicalSet& canon);

/// Stable listing "lead = rhs" for every equation, potential equations in
/// v_x, v_t order after the base equations.
std::vector<std::string> describe_equations(const PotentialSystem& ps);

} // namespace potsys
