#include "potsys/symmetry.hpp"

#include <algorithm>

namespace potsys {

namespace {

void requirePointCoefficient(const Expr& e, const JetContext& ctx, const char* what) {
    std::map<std::string, bool> syms;
    collectSymbols(e, syms);
    for (const auto& [name, _] : syms) {
        auto j = parseJetName(name, ctx);
        if (j && j->order() > 0)
            fail(Error::Kind::Input,
                 std::string("generator coefficient for ") + what +
                     " contains the jet variable " + name + " (point fields only)");
    }
}

void requirePointField(const VectorField& vf, const JetContext& ctx) {
    requirePointCoefficient(vf.xi, ctx, ctx.t.c_str());
    requirePointCoefficient(vf.tau, ctx, ctx.x.c_str());
    for (const auto& [dep, e] : vf.eta) {
        if (!ctx.isDependent(dep))
            fail(Error::Kind::Input, "generator moves undeclared dependent " + dep);
        requirePointCoefficient(e, ctx, dep.c_str());
    }
}

/// Prolonged coefficients for jets of any order, computed on demand via
/// eta^{J+w} = D_w(eta^J) - u_{J+t} D_w(xi) - u_{J+x} D_w(tau).
struct Prolongation {
    const VectorField& vf;
    const JetContext& ctx;
    std::map<std::string, Expr> memo;

    Expr coef(const JetVar& j) {
        std::string key = jetName(j);
        auto it = memo.find(key);
        if (it != memo.end()) return it->second;
        Expr out(0);
        if (j.order() == 0) {
            auto e = vf.eta.find(j.dep);
            if (e != vf.eta.end()) out = e->second;
        } else {
            JetVar parent = j;
            std::string w;
            if (j.dt > 0) {
                parent.dt--;
                w = ctx.t;
            } else {
                parent.dx--;
                w = ctx.x;
            }
            Expr base = coef(parent);
            out = total_derivative(base, w, ctx) -
                  jetSymbol(JetVar{j.dep, parent.dt + 1, parent.dx}) *
                      total_derivative(vf.xi, w, ctx) -
                  jetSymbol(JetVar{j.dep, parent.dt, parent.dx + 1}) *
                      total_derivative(vf.tau, w, ctx);
        }
        memo.emplace(key, out);
        return out;
    }

    /// Action of the prolonged field on an arbitrary jet expression.
    Expr apply(const Expr& e) {
        Expr out = vf.xi * diff(e, ctx.t) + vf.tau * diff(e, ctx.x);
        std::map<std::string, bool> syms;
        collectSymbols(e, syms);
        for (const auto& [name, _] : syms) {
            auto j = parseJetName(name, ctx);
            if (!j) continue;
            Expr d = diff(e, name);
            if (d.isZero()) continue;
            out = out + coef(*j) * d;
        }
        return out;
    }
};

bool isPositiveJetAtom(const AtomPtr& a, const JetContext& ctx) {
    if (a->kind != AtomKind::Symbol) return false;
    auto j = parseJetName(a->name, ctx);
    return j && j->order() > 0;
}

} // namespace

std::map<std::string, Expr> prolong(const VectorField& vf, const JetContext& ctx,
                                    int order) {
    if (order != 1)
        fail(Error::Kind::Input,
             "prolongation is exposed for order 1 only (higher jets are handled "
             "inside the symmetry check)");
    requirePointField(vf, ctx);
    Prolongation pro{vf, ctx, {}};
    std::map<std::string, Expr> out;
    for (const std::string& dep : ctx.dependents) {
        out[jetName(JetVar{dep, 1, 0})] = pro.coef(JetVar{dep, 1, 0});
        out[jetName(JetVar{dep, 0, 1})] = pro.coef(JetVar{dep, 0, 1});
    }
    return out;
}

std::vector<Expr> DeterminingSystem::relations() const {
    std::vector<Expr> out;
    out.reserve(equations.size());
    for (const auto& eq : equations) out.push_back(eq.relation);
    return out;
}

namespace {

DeterminingSystem checkOnEquations(const VectorField& vf, const PdeSystem& sys,
                                   size_t firstEquation, int depthOverride) {
    requirePointField(vf, sys.ctx);
    Prolongation pro{vf, sys.ctx, {}};
    DeterminingSystem det;

    for (size_t e = firstEquation; e < sys.equations.size(); ++e) {
        const PdeEquation& eq = sys.equations[e];
        Expr r = pro.apply(jetSymbol(eq.lead) - eq.rhs);
        r = reduce_mod_system(r, sys, depthOverride);
        if (r.isZero()) continue;

        // split the numerator by its free-jet monomial content: the residual
        // vanishes identically iff every coefficient group vanishes
        std::map<Monomial, Poly, MonoLess> groups;
        for (const auto& [mono, c] : r.num().terms) {
            Monomial jets, rest;
            for (const auto& f : mono.factors)
                (isPositiveJetAtom(f.first, sys.ctx) ? jets : rest).factors.push_back(f);
            groups[jets] = detail::polyAdd(groups[jets], detail::polyFromMono(rest, c));
        }
        for (const auto& [jets, poly] : groups) {
            if (poly.isZero()) continue;
            Expr rel = Expr::fromPoly(poly);
            rel = rel / Expr(leadingCoeff(rel)); // monic for stable comparison
            std::string key =
                jets.empty() ? "1" : to_string(Expr::fromPoly(detail::polyFromMono(jets)));
            bool dup = false;
            for (const auto& have : det.equations)
                if (have.relation == rel) dup = true;
            if (!dup) det.equations.push_back({key, rel});
        }
    }
    return det;
}

} // namespace

DeterminingSystem check_symmetry(const VectorField& vf, const PdeSystem& sys,
                                 int depthOverride) {
    return checkOnEquations(vf, sys, 0, depthOverride);
}

DeterminingSystem check_symmetry(const VectorField& vf, const PotentialSystem& ps,
                                 int depthOverride) {
    size_t first = 0;
    if (ps.complete && ps.system.equations.size() >= 2 * ps.potentials.size())
        first = ps.system.equations.size() - 2 * ps.potentials.size();
    return checkOnEquations(vf, ps.system, first, depthOverride);
}

namespace {

using Row = std::vector<Rational>;

// reduce v against the rows (each with a leading pivot column); true if v
// reduces to zero
bool reducesToZero(Row v, const std::vector<Row>& rows, const std::vector<size_t>& pivots) {
    for (size_t r = 0; r < rows.size(); ++r) {
        const Rational& c = v[pivots[r]];
        if (c == 0) continue;
        Rational factor = c / rows[r][pivots[r]];
        for (size_t k = 0; k < v.size(); ++k) v[k] -= factor * rows[r][k];
    }
    return std::all_of(v.begin(), v.end(), [](const Rational& c) { return c == 0; });
}

struct RowBasis {
    std::vector<Row> rows;
    std::vector<size_t> pivots;

    void insert(Row v) {
        for (size_t r = 0; r < rows.size(); ++r) {
            const Rational& c = v[pivots[r]];
            if (c == 0) continue;
            Rational factor = c / rows[r][pivots[r]];
            for (size_t k = 0; k < v.size(); ++k) v[k] -= factor * rows[r][k];
        }
        for (size_t k = 0; k < v.size(); ++k)
            if (v[k] != 0) {
                pivots.push_back(k);
                rows.push_back(std::move(v));
                return;
            }
    }
};

} // namespace

bool same_relation_span(const std::vector<Expr>& got, const std::vector<Expr>& expected) {
    // vectorize the (denominator-cleared) relations over their shared
    // monomial support
    std::map<Monomial, size_t, MonoLess> index;
    auto scan = [&](const std::vector<Expr>& es) {
        for (const Expr& e : es)
            for (const auto& [m, _] : e.num().terms)
                if (!index.count(m)) {
                    size_t next = index.size();
                    index[m] = next;
                }
    };
    scan(got);
    scan(expected);
    auto vec = [&](const Expr& e) {
        Row v(index.size(), Rational(0));
        for (const auto& [m, c] : e.num().terms) v[index[m]] = c;
        return v;
    };
    auto contains = [&](const std::vector<Expr>& big, const std::vector<Expr>& small) {
        RowBasis basis;
        for (const Expr& e : big) basis.insert(vec(e));
        for (const Expr& e : small)
            if (!reducesToZero(vec(e), basis.rows, basis.pivots)) return false;
        return true;
    };
    return contains(got, expected) && contains(expected, got);
}

bool is_potential_symmetry(const VectorField& vf, const PotentialSystem& ps,
                           int depthOverride) {
    DeterminingSystem det = check_symmetry(vf, ps, depthOverride);
    if (!det.isSymmetry())
        fail(Error::Kind::Input,
             "field is not a symmetry of the extended system, so the potential "
             "dependence test does not apply");
    auto isPotential = [&](const std::string& name) {
        return std::find(ps.potentials.begin(), ps.potentials.end(), name) !=
               ps.potentials.end();
    };
    for (const std::string& v : ps.potentials) {
        if (dependsOn(vf.xi, v) || dependsOn(vf.tau, v)) return true;
        for (const auto& [dep, e] : vf.eta)
            if (!isPotential(dep) && dependsOn(e, v)) return true;
    }
    return false;
}

VectorField commutator(const VectorField& a, const VectorField& b,
                       const JetContext& ctx) {
    requirePointField(a, ctx);
    requirePointField(b, ctx);
    auto act = [&](const VectorField& f, const Expr& e) {
        Expr out = f.xi * diff(e, ctx.t) + f.tau * diff(e, ctx.x);
        for (const auto& [dep, c] : f.eta) out = out + c * diff(e, dep);
        return out;
    };
    VectorField out;
    out.xi = act(a, b.xi) - act(b, a.xi);
    out.tau = act(a, b.tau) - act(b, a.tau);
    for (const std::string& dep : ctx.dependents) {
        Expr ea = a.eta.count(dep) ? a.eta.at(dep) : Expr(0);
        Expr eb = b.eta.count(dep) ? b.eta.at(dep) : Expr(0);
        Expr c = act(a, eb) - act(b, ea);
        if (!c.isZero()) out.eta[dep] = c;
    }
    out.unknowns = a.unknowns;
    out.unknowns.insert(out.unknowns.end(), b.unknowns.begin(), b.unknowns.end());
    return out;
}

} // namespace potsys
