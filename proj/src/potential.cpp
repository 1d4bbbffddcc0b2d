#include "potsys/potential.hpp"

namespace potsys {

PotentialSystem build_potential_system(const PdeSystem& base,
                                       const std::vector<ConservedVector>& cvs,
                                       const std::vector<std::string>& names) {
    if (cvs.empty()) fail(Error::Kind::Input, "no conserved vectors to build potentials from");
    if (cvs.size() != names.size())
        fail(Error::Kind::Input, "potential name count does not match vector count");

    PotentialSystem ps;
    ps.system = base;
    bool complete = base.equations.size() == 1;

    for (size_t k = 0; k < cvs.size(); ++k) {
        const ConservedVector& cv = cvs[k];
        const std::string& v = names[k];
        if (ps.system.ctx.isDependent(v) || v == base.ctx.t || v == base.ctx.x)
            fail(Error::Kind::Input, "potential name " + v + " is already in use");

        CheckReport div = verify_divergence(cv, base);
        if (!div.pass)
            fail(Error::Kind::Constraint,
                 "potential " + v + ": conserved vector does not close on solutions, "
                                    "so the cross-derivative condition fails");

        if (cv.hasChar()) {
            if (!verify_characteristic(cv, base).pass)
                fail(Error::Kind::Constraint,
                     "potential " + v + ": declared multiplier does not reproduce the "
                                        "divergence");
            if (is_trivial_characteristic(cv.chars, base)) {
                if (cvs.size() > 1)
                    fail(Error::Kind::Constraint,
                         "potential " + v + ": trivial multiplier adds no independent "
                                            "potential");
                complete = false;
            }
        } else {
            complete = false;
        }

        ps.system.ctx.dependents.push_back(v);
        ps.system.equations.push_back({JetVar{v, 0, 1}, cv.T});
        ps.system.equations.push_back({JetVar{v, 1, 0}, -cv.X});
        ps.potentials.push_back(v);
    }

    ps.complete = complete;
    return ps;
}

namespace {

ConservedVector classVector(const std::vector<ConservedVector>& basis,
                            const CanonicalClass& cls) {
    if (cls.tuple.size() != basis.size())
        fail(Error::Kind::Input, "canonical tuple size does not match basis");
    std::vector<Expr> coeffs;
    coeffs.reserve(cls.tuple.size());
    for (const Rational& c : cls.tuple) coeffs.push_back(Expr(c));
    return linear_combination(coeffs, basis);
}

} // namespace

std::vector<PotentialSystem> enumerate_potential_systems(
    const PdeSystem& base, const std::vector<ConservedVector>& basis,
    const CanonicalSet& canon) {
    std::vector<PotentialSystem> out;
    for (size_t k = 0; k < canon.classes.size(); ++k) {
        std::string name = "v" + std::to_string(k + 1);
        out.push_back(
            build_potential_system(base, {classVector(basis, canon.classes[k])}, {name}));
    }
    return out;
}

PotentialSystem combined_potential_system(const PdeSystem& base,
                                          const std::vector<ConservedVector>& basis,
                                          const CanonicalSet& canon) {
    std::vector<ConservedVector> cvs;
    std::vector<std::string> names;
    for (size_t k = 0; k < canon.classes.size(); ++k) {
        cvs.push_back(classVector(basis, canon.classes[k]));
        names.push_back("v" + std::to_string(k + 1));
    }
    return build_potential_system(base, cvs, names);
}

std::vector<std::string> describe_equations(const PotentialSystem& ps) {
    std::vector<std::string> lines;
    lines.reserve(ps.system.equations.size());
    for (const PdeEquation& eq : ps.system.equations)
        lines.push_back(jetName(eq.lead) + " = " + to_string(eq.rhs));
    return lines;
}

} // namespace potsys
