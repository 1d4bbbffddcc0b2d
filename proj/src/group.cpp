#include "potsys/group.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace potsys {

namespace {

Expr powExpr(const Expr& base, int k) { return powInt(base, k); }

} // namespace

ConservedVector apply_transformation(const PointTransformation& g,
                                     const ConservedVector& cv, const PdeSystem& sys) {
    for (const Expr& c : g.nonzero)
        if (c.isZero())
            fail(Error::Kind::Constraint,
                 "transformation parameter constraint violated (expression is zero)");
    if (g.tScale.isZero() || g.xScale.isZero() || g.uScale.isZero() || g.clScale.isZero())
        fail(Error::Kind::Constraint, "transformation scales must be nonzero");

    Subst s;
    const JetContext& ctx = sys.ctx;
    s.symbols[ctx.t] = (Expr::symbol(ctx.t) - g.tShift) / g.tScale;
    s.symbols[ctx.x] = (Expr::symbol(ctx.x) - g.xShift) / g.xScale;
    s.elements = g.elements;

    std::map<std::string, bool> syms;
    collectSymbols(cv.T, syms);
    collectSymbols(cv.X, syms);
    for (const Expr& l : cv.chars) collectSymbols(l, syms);
    for (const auto& [name, _] : syms) {
        auto j = parseJetName(name, ctx);
        if (!j) continue;
        // new_u^(i,j) = uScale * tScale^-i * xScale^-j * u^(i,j), inverted
        Expr factor = powExpr(g.tScale, j->dt) * powExpr(g.xScale, j->dx) / g.uScale;
        s.symbols[name] = factor * Expr::symbol(name);
    }

    ConservedVector out;
    out.T = g.clScale * g.tScale * substitute(cv.T, s);
    out.X = g.clScale * g.xScale * substitute(cv.X, s);
    for (const Expr& l : cv.chars) out.chars.push_back(g.clScale * substitute(l, s));
    return out;
}

// ---------------------------------------------------------------------------
// Guards
// ---------------------------------------------------------------------------

Guard parse_guard(const std::string& text, const std::vector<std::string>& coeffNames) {
    Guard guard;
    GuardConj conj;
    size_t i = 0;
    auto skipWs = [&] {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    };
    auto failAt = [&](const std::string& msg) -> void {
        fail(Error::Kind::Input, "guard '" + text + "': " + msg);
    };
    for (;;) {
        skipWs();
        size_t start = i;
        while (i < text.size() &&
               (std::isalnum(static_cast<unsigned char>(text[i])) || text[i] == '_'))
            ++i;
        std::string name = text.substr(start, i - start);
        auto it = std::find(coeffNames.begin(), coeffNames.end(), name);
        if (it == coeffNames.end()) failAt("unknown coefficient '" + name + "'");
        skipWs();
        bool isZero;
        if (text.compare(i, 2, "==") == 0) {
            isZero = true;
        } else if (text.compare(i, 2, "!=") == 0) {
            isZero = false;
        } else {
            failAt("expected == or !=");
        }
        i += 2;
        skipWs();
        if (i >= text.size() || text[i] != '0') failAt("comparisons must be against 0");
        ++i;
        conj.push_back({static_cast<size_t>(it - coeffNames.begin()), isZero});
        skipWs();
        if (i >= text.size()) break;
        if (text.compare(i, 2, "&&") == 0) {
            i += 2;
            continue;
        }
        if (text.compare(i, 2, "||") == 0) {
            i += 2;
            guard.push_back(std::move(conj));
            conj.clear();
            continue;
        }
        failAt("expected && or ||");
    }
    guard.push_back(std::move(conj));
    return guard;
}

namespace {

// ---------------------------------------------------------------------------
// Canonicalization worklist
// ---------------------------------------------------------------------------

struct Know {
    enum class S { Known, NonZero, Unknown } s = S::Unknown;
    Rational value;
};

struct State {
    std::vector<Know> know;
    std::vector<std::string> provenance;
};

enum class TV { True, False, Open };

TV evalAtom(const GuardAtom& a, const std::vector<Know>& know) {
    const Know& k = know[a.comp];
    switch (k.s) {
    case Know::S::Known:
        return ((k.value == 0) == a.isZero) ? TV::True : TV::False;
    case Know::S::NonZero:
        return a.isZero ? TV::False : TV::True;
    case Know::S::Unknown:
        return TV::Open;
    }
    return TV::Open;
}

// True / False, or Open with the first undetermined atom to branch on.
std::pair<TV, size_t> evalGuard(const Guard& g, const std::vector<Know>& know) {
    bool anyOpen = false;
    size_t branchComp = 0;
    for (const GuardConj& conj : g) {
        bool conjFalse = false;
        bool conjOpen = false;
        size_t openComp = 0;
        for (const GuardAtom& a : conj) {
            TV v = evalAtom(a, know);
            if (v == TV::False) {
                conjFalse = true;
                break;
            }
            if (v == TV::Open && !conjOpen) {
                conjOpen = true;
                openComp = a.comp;
            }
        }
        if (conjFalse) continue;
        if (!conjOpen) return {TV::True, 0};
        if (!anyOpen) {
            anyOpen = true;
            branchComp = openComp;
        }
    }
    if (anyOpen) return {TV::Open, branchComp};
    return {TV::False, 0};
}

class Canonicalizer {
public:
    Canonicalizer(const GroupSchema& schema, const std::vector<ConservedVector>& basis,
                  const JetContext& ctx)
        : schema_(schema), basis_(basis), ctx_(ctx) {
        n_ = schema.coeffNames.size();
        if (basis.size() != n_)
            fail(Error::Kind::Input, "basis size does not match coefficient count");
        for (const auto& cv : basis) {
            if (!cv.hasChar())
                fail(Error::Kind::Input,
                     "canonicalization requires every basis vector to carry a multiplier");
            if (cv.chars.size() != basis[0].chars.size())
                fail(Error::Kind::Input, "multiplier tuples of different size in basis");
        }
    }

    CanonicalSet run() {
        State init;
        init.know.assign(n_, Know{});
        process(init, 0);
        dedupe();
        out_.basisSize = n_;
        return out_;
    }

    CanonicalSet runFrom(const std::vector<Rational>& tuple) {
        if (tuple.size() != n_)
            fail(Error::Kind::Input, "coefficient tuple has wrong size");
        State init;
        init.know.reserve(n_);
        for (const Rational& v : tuple) init.know.push_back({Know::S::Known, v});
        process(init, 0);
        dedupe();
        out_.basisSize = n_;
        return out_;
    }

private:
    const GroupSchema& schema_;
    const std::vector<ConservedVector>& basis_;
    const JetContext& ctx_;
    size_t n_ = 0;
    CanonicalSet out_;

    Expr component(const State& st, size_t i) const {
        if (st.know[i].s == Know::S::Known) return Expr(st.know[i].value);
        return Expr::symbol(schema_.coeffNames[i]);
    }

    Subst knownSubst(const State& st) const {
        Subst s;
        for (size_t i = 0; i < n_; ++i)
            if (st.know[i].s == Know::S::Known)
                s.symbols[schema_.coeffNames[i]] = Expr(st.know[i].value);
        return s;
    }

    std::vector<Expr> instantiateEffect(const NormalizationRule& r, const State& st) const {
        if (r.effect.size() != n_)
            fail(Error::Kind::Input, "rule " + r.name + ": effect tuple has wrong size");
        Subst s = knownSubst(st);
        std::vector<Expr> eff;
        eff.reserve(n_);
        for (const Expr& e : r.effect) eff.push_back(substitute(e, s));
        return eff;
    }

    bool makesProgress(const State& st, const std::vector<Expr>& eff) const {
        for (size_t i = 0; i < n_; ++i)
            if (eff[i] != component(st, i)) return true;
        return false;
    }

    void checkAffineShape(const NormalizationRule& r, const std::string& var,
                          const Expr& repl) const {
        std::string other = var == ctx_.t ? ctx_.x : ctx_.t;
        if (dependsOn(repl, other))
            fail(Error::Kind::Constraint, "rule " + r.name + ": substitution for " + var +
                                              " depends on " + other +
                                              " (only diagonal affine maps are allowed)");
        Expr lin = diff(repl, var);
        if (lin.isZero() || !diff(lin, var).isZero())
            fail(Error::Kind::Constraint,
                 "rule " + r.name + ": substitution for " + var + " is not affine");
    }

    void checkAffineSoundness(const NormalizationRule& r, const State& st,
                              const std::vector<Expr>& eff) const {
        Subst known = knownSubst(st);
        Expr scale = substitute(r.scale, known);
        if (scale.isZero())
            fail(Error::Kind::Constraint, "rule " + r.name + ": scale vanishes");
        Subst varsub;
        for (const auto& [var, repl] : r.subst) {
            if (var != ctx_.t && var != ctx_.x)
                fail(Error::Kind::Input,
                     "rule " + r.name + ": substitution of unknown variable " + var);
            Expr inst = substitute(repl, known);
            checkAffineShape(r, var, inst);
            varsub.symbols[var] = inst;
        }
        size_t m = basis_[0].chars.size();
        for (size_t comp = 0; comp < m; ++comp) {
            Expr lamOld(0);
            Expr claimed(0);
            for (size_t i = 0; i < n_; ++i) {
                lamOld = lamOld + component(st, i) * basis_[i].chars[comp];
                claimed = claimed + eff[i] * basis_[i].chars[comp];
            }
            Expr transformed = scale * substitute(lamOld, varsub);
            Expr residual = transformed - claimed;
            if (!residual.isZero())
                fail(Error::Kind::Constraint,
                     "rule " + r.name + " is unsound: transformed combination differs "
                                        "from claimed effect by " +
                         to_string(residual));
        }
    }

    void checkRotationSoundness(const NormalizationRule& r, const State& st,
                                const std::vector<Expr>& eff) const {
        if (n_ != 2 || r.matrix.size() != 4)
            fail(Error::Kind::Input,
                 "rule " + r.name + ": rotation rules need a 2-vector basis and a 2x2 matrix");
        if (!r.potentialScaling)
            fail(Error::Kind::Input,
                 "rule " + r.name +
                     ": rotation rules require a declared potential scaling to absorb "
                     "the radius");
        if (r.param.empty())
            fail(Error::Kind::Input, "rule " + r.name + ": rotation parameter missing");
        if (r.subst.size() != 1)
            fail(Error::Kind::Input,
                 "rule " + r.name + ": rotation rules shift exactly one variable");
        const auto& [var, repl] = *r.subst.begin();
        if (var != ctx_.t && var != ctx_.x)
            fail(Error::Kind::Input,
                 "rule " + r.name + ": substitution of unknown variable " + var);
        checkAffineShape(r, var, repl);
        Subst shift;
        shift.symbols[var] = repl;
        const Expr& m00 = r.matrix[0];
        const Expr& m01 = r.matrix[1];
        const Expr& m10 = r.matrix[2];
        const Expr& m11 = r.matrix[3];
        if (m00 != m11 || m01 != -m10 || m00 * m00 + m01 * m01 != Expr(1))
            fail(Error::Kind::Constraint,
                 "rule " + r.name + ": declared matrix is not a rotation");
        if (r.factor.isZero())
            fail(Error::Kind::Constraint, "rule " + r.name + ": factor vanishes");
        // verify the induced linear action on the conserved vectors themselves
        auto checkComponent = [&](const Expr& v0, const Expr& v1, const Expr& vi, size_t row,
                                  const char* what) {
            const Expr& a = row == 0 ? m00 : m10;
            const Expr& b = row == 0 ? m01 : m11;
            Expr lhs = substitute(vi, shift);
            Expr rhs = r.factor * (a * v0 + b * v1);
            if (lhs != rhs)
                fail(Error::Kind::Constraint,
                     "rule " + r.name + " is unsound on component " + what +
                         ": residual " + to_string(lhs - rhs));
        };
        for (size_t i = 0; i < 2; ++i) {
            checkComponent(basis_[0].T, basis_[1].T, basis_[i].T, i, "T");
            checkComponent(basis_[0].X, basis_[1].X, basis_[i].X, i, "X");
            for (size_t c = 0; c < basis_[0].chars.size(); ++c)
                checkComponent(basis_[0].chars[c], basis_[1].chars[c], basis_[i].chars[c],
                               i, "char");
        }
        // the conclusion step (choosing the shift amount and the potential
        // scaling that maps any nonzero pair to the effect) needs the effect
        // to be a single concrete representative
        for (const Expr& e : eff)
            if (!e.rationalValue())
                fail(Error::Kind::Input,
                     "rule " + r.name + ": rotation effect must be a concrete tuple");
    }

    void applyKnowledge(State& st, const std::vector<Expr>& eff) const {
        std::vector<Know> next(n_);
        for (size_t i = 0; i < n_; ++i) {
            if (auto v = eff[i].rationalValue()) {
                next[i] = {Know::S::Known, *v};
                continue;
            }
            // exact single-coefficient passthrough keeps its knowledge
            bool inherited = false;
            for (size_t j = 0; j < n_; ++j) {
                if (eff[i] == Expr::symbol(schema_.coeffNames[j])) {
                    next[i] = st.know[j];
                    inherited = true;
                    break;
                }
            }
            if (!inherited) {
                // generic expression in nonzero/unknown coefficients
                next[i] = {Know::S::Unknown, Rational(0)};
            }
        }
        st.know = std::move(next);
    }

    void process(State st, int depth) {
        if (depth > 200)
            fail(Error::Kind::Internal, "canonicalization did not terminate");
        for (;;) {
            bool applied = false;
            for (const NormalizationRule& r : schema_.rules) {
                auto [tv, branchComp] = evalGuard(r.guard, st.know);
                if (tv == TV::False) continue;
                if (tv == TV::Open) {
                    // zero branch first: the most degenerate tuples come out
                    // first in the class order
                    State zero = st;
                    zero.know[branchComp] = {Know::S::Known, Rational(0)};
                    process(std::move(zero), depth + 1);
                    State nz = st;
                    nz.know[branchComp] = {Know::S::NonZero, Rational(0)};
                    process(std::move(nz), depth + 1);
                    return;
                }
                std::vector<Expr> eff = instantiateEffect(r, st);
                if (!makesProgress(st, eff)) continue;
                if (r.kind == RuleKind::Affine)
                    checkAffineSoundness(r, st, eff);
                else
                    checkRotationSoundness(r, st, eff);
                out_.rulesChecked++;
                applyKnowledge(st, eff);
                st.provenance.push_back(r.name);
                applied = true;
                break;
            }
            if (!applied) break;
        }
        emitLeaf(st);
    }

    std::string describe(const State& st) const {
        std::string s;
        for (size_t i = 0; i < n_; ++i) {
            if (!s.empty()) s += ", ";
            s += schema_.coeffNames[i];
            switch (st.know[i].s) {
            case Know::S::Known: {
                std::ostringstream os;
                os << st.know[i].value;
                s += " = " + os.str();
                break;
            }
            case Know::S::NonZero:
                s += " != 0";
                break;
            case Know::S::Unknown:
                s += " unconstrained";
                break;
            }
        }
        return s;
    }

    void emitLeaf(const State& st) {
        CanonicalClass cls;
        bool allZero = true;
        for (size_t i = 0; i < n_; ++i) {
            if (st.know[i].s != Know::S::Known)
                fail(Error::Kind::Constraint,
                     "rule list is not exhaustive: no rule resolves the region " +
                         describe(st));
            cls.tuple.push_back(st.know[i].value);
            if (st.know[i].value != 0) allZero = false;
        }
        if (allZero) return; // the trivial combination
        size_t m = basis_[0].chars.size();
        for (size_t comp = 0; comp < m; ++comp) {
            Expr lam(0);
            for (size_t i = 0; i < n_; ++i)
                lam = lam + Expr(cls.tuple[i]) * basis_[i].chars[comp];
            cls.chars.push_back(lam);
        }
        cls.provenance = st.provenance;
        out_.classes.push_back(std::move(cls));
    }

    void dedupe() {
        std::vector<CanonicalClass> unique;
        for (auto& c : out_.classes) {
            bool dup = false;
            for (const auto& u : unique)
                if (u.tuple == c.tuple) dup = true;
            if (!dup) unique.push_back(std::move(c));
        }
        out_.classes = std::move(unique);
    }
};

} // namespace

CanonicalSet canonicalize(const GroupSchema& schema,
                          const std::vector<ConservedVector>& basis,
                          const JetContext& ctx) {
    return Canonicalizer(schema, basis, ctx).run();
}

CanonicalSet canonicalize_from(const GroupSchema& schema,
                               const std::vector<ConservedVector>& basis,
                               const JetContext& ctx,
                               const std::vector<Rational>& tuple) {
    return Canonicalizer(schema, basis, ctx).runFrom(tuple);
}

CollapseReport collapse_check(const CanonicalSet& canon) {
    CollapseReport r;
    r.basisSize = canon.basisSize;
    r.classCount = canon.classes.size();
    r.collapsed = r.classCount < r.basisSize;
    return r;
}

} // namespace potsys
