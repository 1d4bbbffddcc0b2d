#include "potsys/expr.hpp"

#include <algorithm>
#include <ostream>
#include <numeric>
#include <sstream>

namespace potsys {

namespace {

using detail::leadingTerm;
using detail::polyAdd;
using detail::polyConst;
using detail::polyDivExact;
using detail::polyFromMono;
using detail::polyMulFree;
using detail::polyMulReduced;
using detail::polyNeg;
using detail::polyOne;
using detail::reduceAlgebraic;

int kindRank(AtomKind k) { return static_cast<int>(k); }

bool isAlgebraic(const Atom& a) {
    return a.kind == AtomKind::Sin || a.kind == AtomKind::Root;
}

Rational ratAbs(const Rational& r) { return r < 0 ? Rational(-r) : r; }

} // namespace

int cmpRational(const Rational& a, const Rational& b) {
    if (a < b) return -1;
    if (b < a) return 1;
    return 0;
}

int cmpAtom(const Atom& a, const Atom& b) {
    if (&a == &b) return 0;
    if (a.kind != b.kind) return kindRank(a.kind) < kindRank(b.kind) ? -1 : 1;
    switch (a.kind) {
    case AtomKind::Symbol:
        return a.name.compare(b.name) < 0 ? -1 : (a.name == b.name ? 0 : 1);
    case AtomKind::Arctan:
    case AtomKind::Exp:
    case AtomKind::Sin:
    case AtomKind::Cos:
        return cmpExpr(a.args[0], b.args[0]);
    case AtomKind::Root: {
        if (a.rootIndex != b.rootIndex) return a.rootIndex < b.rootIndex ? -1 : 1;
        return cmpPoly(a.base, b.base);
    }
    case AtomKind::Func: {
        if (int c = a.name.compare(b.name); c != 0) return c < 0 ? -1 : 1;
        if (a.args.size() != b.args.size())
            return a.args.size() < b.args.size() ? -1 : 1;
        for (size_t i = 0; i < a.dord.size(); ++i)
            if (a.dord[i] != b.dord[i]) return a.dord[i] < b.dord[i] ? -1 : 1;
        for (size_t i = 0; i < a.args.size(); ++i)
            if (int c = cmpExpr(a.args[i], b.args[i]); c != 0) return c;
        return 0;
    }
    case AtomKind::AntiDeriv: {
        if (int c = a.name.compare(b.name); c != 0) return c < 0 ? -1 : 1;
        int c = a.var.compare(b.var);
        return c < 0 ? -1 : (c == 0 ? 0 : 1);
    }
    }
    fail(Error::Kind::Internal, "cmpAtom: unknown kind");
}

int cmpAtomPtr(const AtomPtr& a, const AtomPtr& b) {
    if (a == b) return 0;
    return cmpAtom(*a, *b);
}

// Lexicographic monomial order: the largest atom present is the most
// significant position. This is a proper monomial order (compatible with
// multiplication), which leading-term division in gcdPoly relies on.
int cmpMono(const Monomial& a, const Monomial& b) {
    auto ia = a.factors.rbegin(), ea = a.factors.rend();
    auto ib = b.factors.rbegin(), eb = b.factors.rend();
    while (ia != ea && ib != eb) {
        int c = cmpAtomPtr(ia->first, ib->first);
        if (c > 0) return 1;  // a has a positive power of a larger atom
        if (c < 0) return -1;
        if (int e = cmpRational(ia->second, ib->second); e != 0) return e;
        ++ia;
        ++ib;
    }
    if (ia != ea) return 1;
    if (ib != eb) return -1;
    return 0;
}

int cmpPoly(const Poly& a, const Poly& b) {
    if (a.terms.size() != b.terms.size())
        return a.terms.size() < b.terms.size() ? -1 : 1;
    auto ia = a.terms.begin();
    auto ib = b.terms.begin();
    for (; ia != a.terms.end(); ++ia, ++ib) {
        if (int c = cmpMono(ia->first, ib->first); c != 0) return c;
        if (int c = cmpRational(ia->second, ib->second); c != 0) return c;
    }
    return 0;
}

int cmpExpr(const Expr& a, const Expr& b) {
    if (int c = cmpPoly(a.num(), b.num()); c != 0) return c;
    return cmpPoly(a.den(), b.den());
}

// ---------------------------------------------------------------------------
// Polynomial plumbing
// ---------------------------------------------------------------------------

namespace detail {

Poly polyOne() { return polyConst(Rational(1)); }

Poly polyConst(const Rational& c) {
    Poly p;
    if (c != 0) p.terms.emplace(Monomial{}, c);
    return p;
}

Poly polyFromMono(Monomial m, const Rational& coeff) {
    Poly p;
    if (coeff != 0) p.terms.emplace(std::move(m), coeff);
    return p;
}

Poly polyAdd(const Poly& a, const Poly& b) {
    Poly r = a;
    for (const auto& [m, c] : b.terms) {
        auto it = r.terms.find(m);
        if (it == r.terms.end()) {
            r.terms.emplace(m, c);
        } else {
            it->second += c;
            if (it->second == 0) r.terms.erase(it);
        }
    }
    return r;
}

Poly polyNeg(const Poly& a) {
    Poly r = a;
    for (auto& [m, c] : r.terms) c = -c;
    return r;
}

} // namespace detail

namespace {

Monomial monoMul(const Monomial& a, const Monomial& b) {
    Monomial r;
    r.factors.reserve(a.factors.size() + b.factors.size());
    auto ia = a.factors.begin(), ea = a.factors.end();
    auto ib = b.factors.begin(), eb = b.factors.end();
    while (ia != ea && ib != eb) {
        int c = cmpAtomPtr(ia->first, ib->first);
        if (c < 0) {
            r.factors.push_back(*ia++);
        } else if (c > 0) {
            r.factors.push_back(*ib++);
        } else {
            Rational e = ia->second + ib->second;
            if (e != 0) r.factors.emplace_back(ia->first, e);
            ++ia;
            ++ib;
        }
    }
    for (; ia != ea; ++ia) r.factors.push_back(*ia);
    for (; ib != eb; ++ib) r.factors.push_back(*ib);
    return r;
}

// a / b; nullopt when not divisible (in the free ring).
std::optional<Monomial> monoDiv(const Monomial& a, const Monomial& b) {
    Monomial r;
    auto ia = a.factors.begin(), ea = a.factors.end();
    for (const auto& [atom, eb] : b.factors) {
        while (ia != ea && cmpAtomPtr(ia->first, atom) < 0) r.factors.push_back(*ia++);
        if (ia == ea || cmpAtomPtr(ia->first, atom) != 0) return std::nullopt;
        Rational e = ia->second - eb;
        if (e < 0) return std::nullopt;
        if (e != 0) r.factors.emplace_back(atom, e);
        ++ia;
    }
    for (; ia != ea; ++ia) r.factors.push_back(*ia);
    return r;
}

Monomial monoGcd(const Monomial& a, const Monomial& b) {
    Monomial r;
    auto ia = a.factors.begin(), ea = a.factors.end();
    auto ib = b.factors.begin(), eb = b.factors.end();
    while (ia != ea && ib != eb) {
        int c = cmpAtomPtr(ia->first, ib->first);
        if (c < 0) {
            ++ia;
        } else if (c > 0) {
            ++ib;
        } else {
            Rational e = std::min(ia->second, ib->second);
            if (e != 0) r.factors.emplace_back(ia->first, e);
            ++ia;
            ++ib;
        }
    }
    return r;
}

Monomial monoContent(const Poly& p) {
    Monomial c;
    bool first = true;
    for (const auto& [m, _] : p.terms) {
        if (first) {
            c = m;
            first = false;
        } else {
            c = monoGcd(c, m);
        }
        if (c.empty()) break;
    }
    return c;
}

Poly divByMono(const Poly& p, const Monomial& m) {
    if (m.empty()) return p;
    Poly r;
    for (const auto& [mm, c] : p.terms) {
        auto q = monoDiv(mm, m);
        if (!q) fail(Error::Kind::Internal, "divByMono: not divisible");
        r.terms.emplace(*q, c);
    }
    return r;
}

Rational monoExponent(const Monomial& m, const AtomPtr& atom) {
    for (const auto& [a, e] : m.factors)
        if (cmpAtomPtr(a, atom) == 0) return e;
    return Rational(0);
}

Monomial monoWithout(const Monomial& m, const AtomPtr& atom) {
    Monomial r;
    for (const auto& f : m.factors)
        if (cmpAtomPtr(f.first, atom) != 0) r.factors.push_back(f);
    return r;
}

Monomial monoWithExponent(const Monomial& m, const AtomPtr& atom, const Rational& e) {
    Monomial r = monoWithout(m, atom);
    if (e != 0) {
        r.factors.emplace_back(atom, e);
        std::sort(r.factors.begin(), r.factors.end(),
                  [](const auto& x, const auto& y) { return cmpAtomPtr(x.first, y.first) < 0; });
    }
    return r;
}

AtomPtr cosAtomFor(const Expr& arg) {
    auto a = std::make_shared<Atom>();
    a->kind = AtomKind::Cos;
    a->args = {arg};
    return a;
}

Poly powFree(const Poly& p, long k) {
    Poly r = polyOne();
    Poly b = p;
    while (k > 0) {
        if (k & 1) r = polyMulFree(r, b);
        b = polyMulFree(b, b);
        k >>= 1;
    }
    return r;
}

} // namespace

namespace detail {

Poly polyMulFree(const Poly& a, const Poly& b) {
    Poly r;
    for (const auto& [ma, ca] : a.terms) {
        for (const auto& [mb, cb] : b.terms) {
            Monomial m = monoMul(ma, mb);
            Rational c = ca * cb;
            auto it = r.terms.find(m);
            if (it == r.terms.end()) {
                r.terms.emplace(std::move(m), c);
            } else {
                it->second += c;
                if (it->second == 0) r.terms.erase(it);
            }
        }
    }
    return r;
}

// Rewrites sin^2 -> 1 - cos^2 and root^q -> base until all algebraic
// exponents are in range. Terminates: the rewrites never reintroduce the
// eliminated atom.
Poly reduceAlgebraic(const Poly& p) {
    Poly out;
    std::vector<std::pair<Monomial, Rational>> work(p.terms.begin(), p.terms.end());
    while (!work.empty()) {
        auto [m, c] = work.back();
        work.pop_back();
        const std::pair<AtomPtr, Rational>* red = nullptr;
        long bound = 0;
        for (const auto& f : m.factors) {
            if (f.first->kind == AtomKind::Sin && f.second >= 2) {
                red = &f;
                bound = 2;
                break;
            }
            if (f.first->kind == AtomKind::Root && f.second >= f.first->rootIndex) {
                red = &f;
                bound = f.first->rootIndex;
                break;
            }
        }
        if (!red) {
            auto it = out.terms.find(m);
            if (it == out.terms.end()) {
                out.terms.emplace(std::move(m), c);
            } else {
                it->second += c;
                if (it->second == 0) out.terms.erase(it);
            }
            continue;
        }
        const AtomPtr atom = red->first;
        long e = static_cast<long>(numerator(red->second));
        long k = e / bound;
        long r = e % bound;
        Poly base;
        if (atom->kind == AtomKind::Sin) {
            // sin^2 = 1 - cos^2
            Monomial cm;
            cm.factors.emplace_back(cosAtomFor(atom->args[0]), Rational(2));
            base = polyAdd(polyOne(), polyFromMono(cm, Rational(-1)));
        } else {
            base = atom->base;
        }
        Monomial rest = monoWithExponent(m, atom, Rational(r));
        Poly expanded = polyMulFree(polyFromMono(rest, c), powFree(base, k));
        for (auto& t : expanded.terms) work.emplace_back(t.first, t.second);
    }
    return out;
}

Poly polyMulReduced(const Poly& a, const Poly& b) {
    return reduceAlgebraic(polyMulFree(a, b));
}

std::pair<Monomial, Rational> leadingTerm(const Poly& p) {
    if (p.isZero()) fail(Error::Kind::Internal, "leadingTerm of zero");
    auto it = p.terms.rbegin();
    return {it->first, it->second};
}

Poly polyDivExact(const Poly& p, const Poly& d) {
    if (d.isZero()) fail(Error::Kind::Internal, "polyDivExact by zero");
    Poly q;
    Poly r = p;
    auto [dm, dc] = leadingTerm(d);
    int guard = 0;
    while (!r.isZero()) {
        if (++guard > 200000) fail(Error::Kind::Internal, "polyDivExact: runaway");
        auto [rm, rc] = leadingTerm(r);
        auto qm = monoDiv(rm, dm);
        if (!qm) fail(Error::Kind::Internal, "polyDivExact: not divisible");
        Rational qc = rc / dc;
        q.terms.emplace(*qm, qc);
        r = polyAdd(r, polyMulFree(polyFromMono(*qm, -qc), d));
    }
    return q;
}

} // namespace detail

// ---------------------------------------------------------------------------
// GCD over the free polynomial ring
// ---------------------------------------------------------------------------

namespace {

Poly monicOf(const Poly& p) {
    if (p.isZero()) return p;
    Rational lc = leadingTerm(p).second;
    Poly r = p;
    for (auto& [m, c] : r.terms) c /= lc;
    return r;
}

struct AtomPtrLess {
    bool operator()(const AtomPtr& a, const AtomPtr& b) const {
        return cmpAtomPtr(a, b) < 0;
    }
};

void collectAtomsOf(const Poly& p, std::map<AtomPtr, long, AtomPtrLess>& denoms) {
    for (const auto& [m, _] : p.terms) {
        for (const auto& [a, e] : m.factors) {
            Integer d = denominator(e);
            long dl = d.convert_to<long>();
            auto [it, inserted] = denoms.emplace(a, dl);
            if (!inserted) it->second = std::lcm(it->second, dl);
        }
    }
}

Poly scaleExponents(const Poly& p, const std::map<AtomPtr, long, AtomPtrLess>& sc, bool up) {
    Poly r;
    for (const auto& [m, c] : p.terms) {
        Monomial mm = m;
        for (auto& [a, e] : mm.factors) {
            auto it = sc.find(a);
            if (it != sc.end() && it->second != 1)
                e = up ? Rational(e * it->second) : Rational(e / it->second);
        }
        r.terms.emplace(std::move(mm), c);
    }
    return r;
}

Poly gcdScaled(const Poly& a, const Poly& b);

long degreeIn(const Poly& p, const AtomPtr& v) {
    Rational d(0);
    for (const auto& [m, _] : p.terms) d = std::max(d, monoExponent(m, v));
    return static_cast<long>(numerator(d));
}

// Univariate view in v with polynomial coefficients.
std::vector<Poly> toUni(const Poly& p, const AtomPtr& v) {
    std::vector<Poly> u(static_cast<size_t>(degreeIn(p, v)) + 1);
    for (const auto& [m, c] : p.terms) {
        long e = static_cast<long>(numerator(monoExponent(m, v)));
        Monomial rest = monoWithout(m, v);
        u[static_cast<size_t>(e)] =
            polyAdd(u[static_cast<size_t>(e)], polyFromMono(rest, c));
    }
    return u;
}

Poly fromUni(const std::vector<Poly>& u, const AtomPtr& v) {
    Poly r;
    for (size_t e = 0; e < u.size(); ++e) {
        if (u[e].isZero()) continue;
        Monomial ve;
        if (e > 0) ve.factors.emplace_back(v, Rational(static_cast<long>(e)));
        r = polyAdd(r, polyMulFree(u[e], polyFromMono(ve)));
    }
    return r;
}

void trimUni(std::vector<Poly>& u) {
    while (!u.empty() && u.back().isZero()) u.pop_back();
}

Poly uniContent(const std::vector<Poly>& u) {
    Poly c;
    for (const auto& coeff : u) {
        if (coeff.isZero()) continue;
        c = c.isZero() ? coeff : gcdScaled(c, coeff);
        if (c.isOne()) break;
    }
    return monicOf(c);
}

std::vector<Poly> uniDivCoeffs(const std::vector<Poly>& u, const Poly& d) {
    std::vector<Poly> r(u.size());
    for (size_t i = 0; i < u.size(); ++i)
        if (!u[i].isZero()) r[i] = polyDivExact(u[i], d);
    return r;
}

std::vector<Poly> pseudoRem(std::vector<Poly> r, const std::vector<Poly>& y) {
    const Poly& lcY = y.back();
    const size_t degY = y.size() - 1;
    int guard = 0;
    while (r.size() > degY) {
        if (++guard > 4000) fail(Error::Kind::Internal, "pseudoRem: runaway");
        Poly lcR = r.back();
        size_t shift = r.size() - 1 - degY;
        std::vector<Poly> nr(r.size() - 1);
        for (size_t i = 0; i + 1 < r.size(); ++i) {
            Poly t = polyMulFree(r[i], lcY);
            if (i >= shift) t = polyAdd(t, polyNeg(polyMulFree(lcR, y[i - shift])));
            nr[i] = std::move(t);
        }
        r = std::move(nr);
        trimUni(r);
        if (r.empty()) break;
    }
    return r;
}

Poly gcdPP(const Poly& a, const Poly& b) {
    if (a.isConstant() || b.isConstant()) return polyOne();
    // main variable: the largest atom present
    AtomPtr v;
    for (const Poly* p : {&a, &b}) {
        for (const auto& [m, _] : p->terms) {
            if (m.empty()) continue;
            const AtomPtr& top = m.factors.back().first;
            if (!v || cmpAtomPtr(top, v) > 0) v = top;
        }
    }
    long da = degreeIn(a, v);
    long db = degreeIn(b, v);
    if (da == 0 || db == 0) {
        if (da == 0) {
            auto u = toUni(b, v);
            return gcdScaled(a, uniContent(u));
        }
        auto u = toUni(a, v);
        return gcdScaled(uniContent(u), b);
    }
    auto ua = toUni(a, v);
    auto ub = toUni(b, v);
    Poly contA = uniContent(ua);
    Poly contB = uniContent(ub);
    auto ppA = uniDivCoeffs(ua, contA);
    auto ppB = uniDivCoeffs(ub, contB);
    Poly cont = gcdScaled(contA, contB);
    auto* x = &ppA;
    auto* y = &ppB;
    if (x->size() < y->size()) std::swap(x, y);
    std::vector<Poly> X = *x, Y = *y;
    Poly g;
    int guard = 0;
    while (true) {
        if (++guard > 1000) fail(Error::Kind::Internal, "gcdPP: runaway");
        auto r = pseudoRem(X, Y);
        if (r.empty()) {
            g = fromUni(Y, v);
            break;
        }
        if (r.size() == 1) {
            g = polyOne();
            break;
        }
        // primitive part of r
        Poly rp = fromUni(r, v);
        Monomial mc = monoContent(rp);
        rp = divByMono(rp, mc);
        auto ru = toUni(rp, v);
        Poly rc = uniContent(ru);
        if (!rc.isOne()) ru = uniDivCoeffs(ru, rc);
        X = std::move(Y);
        Y = std::move(ru);
    }
    if (g.isConstant()) return monicOf(cont);
    // make g primitive
    Monomial mc = monoContent(g);
    g = divByMono(g, mc);
    auto gu = toUni(g, v);
    Poly gc = uniContent(gu);
    if (!gc.isOne()) g = fromUni(uniDivCoeffs(gu, gc), v);
    return monicOf(polyMulFree(cont, g));
}

// --- Heuristic gcd (evaluation at a large integer + xi-adic lifting) ------
//
// The primitive PRS above is a correct fallback, but its recursive content
// computations explode combinatorially on fractions in many variables. The
// evaluation-based gcd handles those cases in polynomial time; every
// candidate is verified by exact division, so a heuristic miss only means
// falling back to the PRS.

Poly polyMulInt(const Poly& p, const Integer& k) {
    Poly r;
    for (const auto& [m, c] : p.terms) r.terms.emplace(m, c * Rational(k));
    return r;
}

Poly polyDivInt(const Poly& p, const Integer& k) {
    Poly r;
    for (const auto& [m, c] : p.terms) r.terms.emplace(m, c / Rational(k));
    return r;
}

// gcd of the (integer) numerators; coefficients must have denominator 1
Integer intContent(const Poly& p) {
    Integer g = 0;
    for (const auto& [m, c] : p.terms) {
        g = boost::multiprecision::gcd(g, numerator(c));
        if (g == 1) break;
    }
    return g;
}

Integer maxNorm(const Poly& p) {
    Integer n = 0;
    for (const auto& [m, c] : p.terms) n = std::max<Integer>(n, boost::multiprecision::abs(numerator(c)));
    return n;
}

std::optional<Poly> tryDivide(const Poly& p, const Poly& d) {
    Poly q;
    Poly r = p;
    auto [dm, dc] = leadingTerm(d);
    int guard = 0;
    while (!r.isZero()) {
        if (++guard > 200000) return std::nullopt;
        auto [rm, rc] = leadingTerm(r);
        auto qm = monoDiv(rm, dm);
        if (!qm) return std::nullopt;
        Rational qc = rc / dc;
        q.terms.emplace(*qm, qc);
        r = polyAdd(r, polyMulFree(polyFromMono(*qm, -qc), d));
    }
    return q;
}

AtomPtr maxAtomOf(const Poly& a, const Poly& b) {
    AtomPtr v;
    for (const Poly* p : {&a, &b})
        for (const auto& [m, _] : p->terms) {
            if (m.empty()) continue;
            const AtomPtr& top = m.factors.back().first;
            if (!v || cmpAtomPtr(top, v) > 0) v = top;
        }
    return v;
}

Poly evalAtInt(const Poly& p, const AtomPtr& v, const Integer& xi) {
    Poly r;
    for (const auto& [m, c] : p.terms) {
        long e = static_cast<long>(numerator(monoExponent(m, v)));
        Rational scaled = c;
        if (e > 0)
            scaled *= Rational(boost::multiprecision::pow(xi, static_cast<unsigned>(e)));
        r = polyAdd(r, polyFromMono(monoWithout(m, v), scaled));
    }
    return r;
}

Integer smodInt(const Integer& a, const Integer& m) {
    Integer r = a % m;
    if (r < 0) r += m;
    if (2 * r >= m) r -= m;
    return r;
}

Poly smodPoly(const Poly& p, const Integer& m) {
    Poly r;
    for (const auto& [mono, c] : p.terms) {
        Integer s = smodInt(numerator(c), m);
        if (s != 0) r.terms.emplace(mono, Rational(s));
    }
    return r;
}

// interpret gamma as a xi-adic expansion of a polynomial in v
std::optional<Poly> liftXiAdic(Poly gamma, const AtomPtr& v, const Integer& xi) {
    Poly g;
    long e = 0;
    while (!gamma.isZero()) {
        if (e > 2000) return std::nullopt;
        Poly digit = smodPoly(gamma, xi);
        for (const auto& [m, c] : digit.terms) {
            Monomial mm = m;
            if (e > 0) mm.factors.emplace_back(v, Rational(e)); // v is the top atom
            g.terms.emplace(std::move(mm), c);
        }
        gamma = polyDivInt(polyAdd(gamma, polyNeg(digit)), xi);
        ++e;
    }
    return g;
}

// a, b: nonzero polynomials with integer coefficients and integer exponents
std::optional<Poly> heuGcd(Poly a, Poly b, int depth) {
    if (depth > 24) return std::nullopt;
    Integer ca = intContent(a);
    Integer cb = intContent(b);
    Integer cg = boost::multiprecision::gcd(ca, cb);
    a = polyDivInt(a, ca);
    b = polyDivInt(b, cb);
    AtomPtr v = maxAtomOf(a, b);
    if (!v) return polyConst(Rational(cg)); // both reduced to +-1

    Integer xi = 2 * std::min(maxNorm(a), maxNorm(b)) + 29;
    for (int tries = 0; tries < 6; ++tries) {
        if (boost::multiprecision::msb(xi) > 60000) return std::nullopt;
        Poly A = evalAtInt(a, v, xi);
        Poly B = evalAtInt(b, v, xi);
        if (!A.isZero() && !B.isZero()) {
            if (auto gamma = heuGcd(A, B, depth + 1)) {
                if (auto g = liftXiAdic(*gamma, v, xi)) {
                    Integer c = intContent(*g);
                    if (c != 0) {
                        Poly gp = polyDivInt(*g, c);
                        if (tryDivide(a, gp) && tryDivide(b, gp))
                            return polyMulInt(gp, cg);
                    }
                }
            }
        }
        xi = xi * 73794 / 27011 + 3; // grow irregularly to dodge unlucky points
    }
    return std::nullopt;
}

// entry point: clear denominators (gcd is only defined up to a rational
// factor) and try the heuristic before the PRS
std::optional<Poly> heuGcdEntry(const Poly& a, const Poly& b) {
    auto clear = [](const Poly& p) {
        Integer l = 1;
        for (const auto& [m, c] : p.terms)
            l = boost::multiprecision::lcm(l, denominator(c));
        return polyMulInt(p, l);
    };
    return heuGcd(clear(a), clear(b), 0);
}

Poly gcdScaled(const Poly& a, const Poly& b) {
    if (a.isZero()) return monicOf(b);
    if (b.isZero()) return monicOf(a);
    Monomial ca = monoContent(a);
    Monomial cb = monoContent(b);
    Monomial cg = monoGcd(ca, cb);
    Poly pa = divByMono(a, ca);
    Poly pb = divByMono(b, cb);
    Poly g;
    if (auto h = heuGcdEntry(pa, pb))
        g = std::move(*h);
    else
        g = gcdPP(pa, pb);
    return monicOf(polyMulFree(g, polyFromMono(cg)));
}

} // namespace

namespace detail {

Poly gcdPoly(const Poly& a, const Poly& b) {
    if (a.isZero()) return monicOf(b);
    if (b.isZero()) return monicOf(a);
    std::map<AtomPtr, long, AtomPtrLess> denoms;
    collectAtomsOf(a, denoms);
    collectAtomsOf(b, denoms);
    bool needScale = false;
    for (const auto& [_, d] : denoms)
        if (d != 1) needScale = true;
    if (!needScale) return gcdScaled(a, b);
    Poly sa = scaleExponents(a, denoms, true);
    Poly sb = scaleExponents(b, denoms, true);
    Poly g = gcdScaled(sa, sb);
    return scaleExponents(g, denoms, false);
}

} // namespace detail

// ---------------------------------------------------------------------------
// Canonical fractions
// ---------------------------------------------------------------------------

namespace {

AtomPtr findAlgebraicPtrInDen(const Poly& den) {
    for (const auto& [m, _] : den.terms)
        for (const auto& [a, e] : m.factors)
            if (isAlgebraic(*a)) return a;
    return nullptr;
}

// Negates every monomial carrying an odd power of `atom` (the conjugate map
// s -> -s for a square-root-like atom).
Poly conjugate(const Poly& p, const AtomPtr& atom) {
    Poly r;
    for (const auto& [m, c] : p.terms) {
        Rational e = monoExponent(m, atom);
        bool odd = (numerator(e) % 2) != 0;
        r.terms.emplace(m, odd ? Rational(-c) : c);
    }
    return r;
}

// Rationalizes the denominator: sin and square-root atoms are cleared via
// conjugation (their defining relation is quadratic); higher roots are
// cleared only when they divide every monomial uniformly.
void clearAlgebraicDen(Poly& num, Poly& den) {
    int guard = 0;
    while (AtomPtr atom = findAlgebraicPtrInDen(den)) {
        if (++guard > 500) fail(Error::Kind::Internal, "clearAlgebraicDen: runaway");
        long q = atom->kind == AtomKind::Sin ? 2 : atom->rootIndex;
        if (q == 2) {
            Poly conj = conjugate(den, atom);
            num = polyMulReduced(num, conj);
            den = polyMulReduced(den, conj);
            continue;
        }
        // q > 2: only uniform content is supported
        Rational e = monoExponent(den.terms.begin()->first, atom);
        for (const auto& [m, _] : den.terms)
            if (monoExponent(m, atom) != e)
                fail(Error::Kind::OutsideFragment,
                     "cannot rationalize a denominator containing a root of index > 2");
        Monomial boost;
        boost.factors.emplace_back(atom, Rational(q) - e);
        Poly bp = polyFromMono(boost);
        num = polyMulReduced(num, bp);
        den = polyMulReduced(den, bp);
    }
}

} // namespace

Poly Expr::onePoly() { return detail::polyOne(); }

Expr::Expr(long v) : num_(polyConst(Rational(v))), den_(polyOne()) {}
Expr::Expr(const Rational& v) : num_(polyConst(v)), den_(polyOne()) {}

Expr Expr::symbol(const std::string& name) {
    Monomial m;
    m.factors.emplace_back(makeSymbolAtom(name), Rational(1));
    return fromParts(polyFromMono(m), polyOne());
}

Expr Expr::fromPoly(Poly p) { return fromParts(std::move(p), detail::polyOne()); }

Expr Expr::fromParts(Poly num, Poly den) {
    num = reduceAlgebraic(num);
    den = reduceAlgebraic(den);
    if (den.isZero()) fail(Error::Kind::DivisionByZero, "division by zero");
    Expr e;
    if (num.isZero()) return e;
    clearAlgebraicDen(num, den);
    Poly g = detail::gcdPoly(num, den);
    if (!g.isOne()) {
        num = polyDivExact(num, g);
        den = polyDivExact(den, g);
    }
    Rational lc = leadingTerm(den).second;
    if (lc != 1) {
        for (auto& [m, c] : num.terms) c /= lc;
        for (auto& [m, c] : den.terms) c /= lc;
    }
    e.num_ = std::move(num);
    e.den_ = std::move(den);
    return e;
}

std::optional<Rational> Expr::rationalValue() const {
    if (!isRational()) return std::nullopt;
    if (num_.isZero()) return Rational(0);
    return num_.terms.begin()->second;
}

Expr operator+(const Expr& a, const Expr& b) {
    Poly n = polyAdd(polyMulReduced(a.num_, b.den_), polyMulReduced(b.num_, a.den_));
    return Expr::fromParts(std::move(n), polyMulReduced(a.den_, b.den_));
}

Expr operator-(const Expr& a, const Expr& b) { return a + (-b); }

Expr Expr::operator-() const {
    Expr e;
    e.num_ = polyNeg(num_);
    e.den_ = den_;
    return e;
}

Expr operator*(const Expr& a, const Expr& b) {
    return Expr::fromParts(polyMulReduced(a.num_, b.num_),
                           polyMulReduced(a.den_, b.den_));
}

Expr operator/(const Expr& a, const Expr& b) {
    if (b.isZero()) fail(Error::Kind::DivisionByZero, "division by zero expression");
    return Expr::fromParts(polyMulReduced(a.num_, b.den_),
                           polyMulReduced(a.den_, b.num_));
}

Expr powInt(const Expr& e, long k) {
    if (k == 0) return Expr(1);
    if (k < 0) return Expr(1) / powInt(e, -k);
    Expr r(1);
    Expr b = e;
    while (k > 0) {
        if (k & 1) r = r * b;
        b = b * b;
        k >>= 1;
    }
    return r;
}

// ---------------------------------------------------------------------------
// Atom constructors
// ---------------------------------------------------------------------------

AtomPtr makeSymbolAtom(const std::string& name) {
    auto a = std::make_shared<Atom>();
    a->kind = AtomKind::Symbol;
    a->name = name;
    return a;
}

namespace detail {

Expr exprFromAtomPow(const AtomPtr& a, const Rational& e) {
    if (e == 0) return Expr(1);
    Monomial m;
    m.factors.emplace_back(a, ratAbs(e));
    if (e > 0) return Expr::fromParts(polyFromMono(m), polyOne());
    return Expr::fromParts(polyOne(), polyFromMono(m));
}

} // namespace detail

Rational leadingCoeff(const Expr& e) {
    if (e.isZero()) return Rational(0);
    return leadingTerm(e.num()).second;
}

Expr makeExp(const Expr& arg) {
    if (arg.isZero()) return Expr(1);
    if (arg.den().isOne()) {
        // exp is additive over terms; each term c*M becomes exp(M)^c
        Expr result(1);
        for (const auto& [m, c] : arg.num().terms) {
            auto a = std::make_shared<Atom>();
            a->kind = AtomKind::Exp;
            a->args = {Expr::fromPoly(polyFromMono(m))};
            result = result * detail::exprFromAtomPow(a, c);
        }
        return result;
    }
    Rational lc = leadingCoeff(arg);
    Expr primitive = arg / Expr(lc);
    auto a = std::make_shared<Atom>();
    a->kind = AtomKind::Exp;
    a->args = {primitive};
    return detail::exprFromAtomPow(a, lc);
}

namespace {

// Shared construction for sin/cos with sign normalization, addition
// formulas over polynomial arguments, and integer multiple-angle expansion.
Expr makeTrig(const Expr& arg, bool sine);

Expr trigAtom(const Expr& arg, bool sine) {
    auto a = std::make_shared<Atom>();
    a->kind = sine ? AtomKind::Sin : AtomKind::Cos;
    a->args = {arg};
    return detail::exprFromAtomPow(a, Rational(1));
}

Expr makeTrig(const Expr& arg, bool sine) {
    if (arg.isZero()) return sine ? Expr(0) : Expr(1);
    if (leadingCoeff(arg) < 0) {
        Expr r = makeTrig(-arg, sine);
        return sine ? -r : r;
    }
    if (arg.den().isOne()) {
        const Poly& p = arg.num();
        if (p.terms.size() > 1) {
            auto it = p.terms.rbegin();
            Expr lead = Expr::fromPoly(polyFromMono(it->first, it->second));
            Expr rest = arg - lead;
            Expr sl = makeTrig(lead, true), cl = makeTrig(lead, false);
            Expr sr = makeTrig(rest, true), cr = makeTrig(rest, false);
            return sine ? sl * cr + cl * sr : cl * cr - sl * sr;
        }
        auto [m, c] = *p.terms.begin();
        if (c > 1) {
            if (c > 256)
                fail(Error::Kind::OutsideFragment,
                     "trig argument coefficient too large to expand");
            Expr unit = Expr::fromPoly(polyFromMono(m));
            Expr rest = arg - unit;
            Expr su = makeTrig(unit, true), cu = makeTrig(unit, false);
            Expr sr = makeTrig(rest, true), cr = makeTrig(rest, false);
            return sine ? su * cr + cu * sr : cu * cr - su * sr;
        }
    }
    return trigAtom(arg, sine);
}

} // namespace

Expr makeSin(const Expr& arg) { return makeTrig(arg, true); }
Expr makeCos(const Expr& arg) { return makeTrig(arg, false); }

Expr makeArctan(const Expr& arg) {
    if (arg.isZero()) return Expr(0);
    if (leadingCoeff(arg) < 0) return -makeArctan(-arg);
    auto a = std::make_shared<Atom>();
    a->kind = AtomKind::Arctan;
    a->args = {arg};
    return detail::exprFromAtomPow(a, Rational(1));
}

Expr makeFunc(const std::string& name, std::vector<Expr> args, std::vector<int> dord) {
    if (args.empty()) fail(Error::Kind::Input, "function application needs arguments");
    if (dord.empty()) dord.assign(args.size(), 0);
    if (dord.size() != args.size())
        fail(Error::Kind::Internal, "makeFunc: dord/args size mismatch");
    auto a = std::make_shared<Atom>();
    a->kind = AtomKind::Func;
    a->name = name;
    a->args = std::move(args);
    a->dord = std::move(dord);
    return detail::exprFromAtomPow(a, Rational(1));
}

Expr makeAntiDeriv(const std::string& funcName, const std::string& varName) {
    auto a = std::make_shared<Atom>();
    a->kind = AtomKind::AntiDeriv;
    a->name = funcName;
    a->var = varName;
    return detail::exprFromAtomPow(a, Rational(1));
}

// ---------------------------------------------------------------------------
// Rational powers and roots
// ---------------------------------------------------------------------------

namespace {

std::optional<Integer> exactRoot(const Integer& n, long q) {
    if (n == 0) return Integer(0);
    if (n < 0) return std::nullopt;
    // binary search for the integer q-th root, then verify exactness
    Integer lo = 0, hi = n + 1;
    while (lo + 1 < hi) {
        Integer mid = (lo + hi) / 2;
        if (boost::multiprecision::pow(mid, static_cast<unsigned>(q)) <= n)
            lo = mid;
        else
            hi = mid;
    }
    if (boost::multiprecision::pow(lo, static_cast<unsigned>(q)) == n) return lo;
    return std::nullopt;
}

Expr rootAtomPow(const Poly& base, long p, long q);

Expr rootRational(const Rational& c, long q) {
    if (c == 0) return Expr(0);
    if (c < 0) {
        if (q % 2 == 0)
            fail(Error::Kind::OutsideFragment, "even root of a negative constant");
        return -rootRational(-c, q);
    }
    auto rn = exactRoot(numerator(c), q);
    auto rd = exactRoot(denominator(c), q);
    if (rn && rd) return Expr(Rational(*rn, *rd));
    return rootAtomPow(polyConst(c), 1, q);
}

// base^(p/q) where base is a nonempty polynomial with leading coefficient 1
// and no monomial content, or a single-atom / constant polynomial.
Expr rootAtomPow(const Poly& base, long p, long q) {
    long g = std::gcd(p, q);
    p /= g;
    q /= g;
    if (q == 1) {
        Expr b = Expr::fromPoly(base);
        return powInt(b, p);
    }
    auto a = std::make_shared<Atom>();
    a->kind = AtomKind::Root;
    a->rootIndex = static_cast<int>(q);
    a->base = base;
    long whole = p / q;
    long rem = p % q;
    Expr result(1);
    if (whole != 0) result = powInt(Expr::fromPoly(base), whole);
    if (rem != 0) result = result * detail::exprFromAtomPow(a, Rational(rem));
    return result;
}

// atom^(p/q) for a single atom factor.
Expr rootOfAtomFactor(const AtomPtr& atom, const Rational& k, long q) {
    switch (atom->kind) {
    case AtomKind::Exp:
        return detail::exprFromAtomPow(atom, k / q);
    case AtomKind::Root: {
        long kk = static_cast<long>(numerator(k));
        return rootAtomPow(atom->base, kk, q * atom->rootIndex);
    }
    default: {
        Monomial m;
        m.factors.emplace_back(atom, Rational(1));
        long kk = static_cast<long>(numerator(k));
        return rootAtomPow(polyFromMono(m), kk, q);
    }
    }
}

Expr rootExpr(const Poly& p, long q) {
    if (p.isZero()) return Expr(0);
    Rational lc = leadingTerm(p).second;
    Poly p1 = p;
    for (auto& [m, c] : p1.terms) c /= lc;
    Monomial content = monoContent(p1);
    Poly p2 = divByMono(p1, content);
    Expr result = rootRational(lc, q);
    for (const auto& [a, e] : content.factors)
        result = result * rootOfAtomFactor(a, e, q);
    if (!p2.isOne()) result = result * rootAtomPow(p2, 1, q);
    return result;
}

} // namespace

Expr powRat(const Expr& e, const Rational& r) {
    Integer den = denominator(r);
    if (den == 1) return powInt(e, static_cast<long>(numerator(r)));
    if (e.isZero()) {
        if (r > 0) return Expr(0);
        fail(Error::Kind::DivisionByZero, "negative power of zero");
    }
    if (r < 0) return Expr(1) / powRat(e, -r);
    long q = den.convert_to<long>();
    long p = numerator(r).convert_to<long>();
    Expr rn = rootExpr(e.num(), q);
    Expr rd = rootExpr(e.den(), q);
    return powInt(rn, p) / powInt(rd, p);
}

// ---------------------------------------------------------------------------
// Differentiation
// ---------------------------------------------------------------------------

namespace {

Expr diffPolyE(const Poly& p, const std::string& v);

Expr diffAtomArg(const Expr& arg, const std::string& v) { return diff(arg, v); }

// d/dv of the single factor atom^e times the remaining monomial `restE`.
Expr diffFactor(const AtomPtr& atom, const Rational& e, const Expr& restE,
                const std::string& v) {
    switch (atom->kind) {
    case AtomKind::Symbol: {
        if (atom->name != v) return Expr(0);
        return Expr(e) * detail::exprFromAtomPow(atom, e - 1) * restE;
    }
    case AtomKind::Exp: {
        Expr da = diffAtomArg(atom->args[0], v);
        if (da.isZero()) return Expr(0);
        return Expr(e) * da * detail::exprFromAtomPow(atom, e) * restE;
    }
    case AtomKind::Sin: {
        Expr da = diffAtomArg(atom->args[0], v);
        if (da.isZero()) return Expr(0);
        Expr cosA = detail::exprFromAtomPow(cosAtomFor(atom->args[0]), Rational(1));
        return Expr(e) * detail::exprFromAtomPow(atom, e - 1) * cosA * da * restE;
    }
    case AtomKind::Cos: {
        Expr da = diffAtomArg(atom->args[0], v);
        if (da.isZero()) return Expr(0);
        Expr sinA = makeSin(atom->args[0]);
        return -Expr(e) * detail::exprFromAtomPow(atom, e - 1) * sinA * da * restE;
    }
    case AtomKind::Arctan: {
        Expr da = diffAtomArg(atom->args[0], v);
        if (da.isZero()) return Expr(0);
        Expr onePlus = Expr(1) + atom->args[0] * atom->args[0];
        return Expr(e) * detail::exprFromAtomPow(atom, e - 1) * da / onePlus * restE;
    }
    case AtomKind::Root: {
        Expr db = diffPolyE(atom->base, v);
        if (db.isZero()) return Expr(0);
        Expr baseE = Expr::fromPoly(atom->base);
        Expr self = detail::exprFromAtomPow(atom, e);
        return Expr(e / atom->rootIndex) * self * db / baseE * restE;
    }
    case AtomKind::Func: {
        Expr total(0);
        for (size_t i = 0; i < atom->args.size(); ++i) {
            Expr da = diffAtomArg(atom->args[i], v);
            if (da.isZero()) continue;
            std::vector<int> d2 = atom->dord;
            d2[i] += 1;
            total = total + makeFunc(atom->name, atom->args, d2) * da;
        }
        if (total.isZero()) return Expr(0);
        return Expr(e) * detail::exprFromAtomPow(atom, e - 1) * total * restE;
    }
    case AtomKind::AntiDeriv: {
        if (atom->var != v) return Expr(0);
        Expr f = makeFunc(atom->name, {Expr::symbol(atom->var)}, {0});
        return Expr(e) * detail::exprFromAtomPow(atom, e - 1) * f * restE;
    }
    }
    fail(Error::Kind::Internal, "diffFactor: unknown atom kind");
}

Expr diffMono(const Monomial& m, const std::string& v) {
    Expr total(0);
    for (size_t i = 0; i < m.factors.size(); ++i) {
        Monomial rest;
        for (size_t j = 0; j < m.factors.size(); ++j)
            if (j != i) rest.factors.push_back(m.factors[j]);
        Expr restE = Expr::fromPoly(polyFromMono(rest));
        total = total + diffFactor(m.factors[i].first, m.factors[i].second, restE, v);
    }
    return total;
}

Expr diffPolyE(const Poly& p, const std::string& v) {
    Expr total(0);
    for (const auto& [m, c] : p.terms) {
        if (m.empty()) continue;
        total = total + Expr(c) * diffMono(m, v);
    }
    return total;
}

} // namespace

Expr diff(const Expr& e, const std::string& v) {
    Expr num = Expr::fromPoly(e.num());
    Expr den = Expr::fromPoly(e.den());
    Expr dn = diffPolyE(e.num(), v);
    Expr dd = diffPolyE(e.den(), v);
    if (dd.isZero()) return dn / den;
    return (dn * den - num * dd) / (den * den);
}

// ---------------------------------------------------------------------------
// Substitution
// ---------------------------------------------------------------------------

namespace {

Expr rebuildExpr(const Expr& e, const Subst& s);

Expr rebuildPolyE(const Poly& p, const Subst& s);

Expr antiderivative(const Expr& body, const std::string& formal) {
    // only polynomial dependence on the formal is supported
    if (dependsOn(Expr::fromPoly(body.den()), formal))
        fail(Error::Kind::OutsideFragment,
             "antiderivative of a non-polynomial function binding");
    Expr result(0);
    AtomPtr fa = makeSymbolAtom(formal);
    for (const auto& [m, c] : body.num().terms) {
        Rational e(0);
        Monomial rest;
        for (const auto& [a, k] : m.factors) {
            if (a->kind == AtomKind::Symbol && a->name == formal) {
                e = k;
            } else {
                if (dependsOn(detail::exprFromAtomPow(a, k), formal))
                    fail(Error::Kind::OutsideFragment,
                         "antiderivative outside the polynomial fragment");
                rest.factors.push_back({a, k});
            }
        }
        Expr term = Expr(c / (e + 1)) * Expr::fromPoly(polyFromMono(rest)) *
                    detail::exprFromAtomPow(fa, e + 1);
        result = result + term;
    }
    result = result / Expr::fromPoly(body.den());
    return result;
}

Expr rebuildAtomPow(const AtomPtr& a, const Rational& e, const Subst& s) {
    switch (a->kind) {
    case AtomKind::Symbol: {
        auto it = s.symbols.find(a->name);
        Expr base = it != s.symbols.end() ? it->second : detail::exprFromAtomPow(a, Rational(1));
        return powInt(base, static_cast<long>(numerator(e)));
    }
    case AtomKind::Exp:
        return makeExp(Expr(e) * rebuildExpr(a->args[0], s));
    case AtomKind::Sin:
        return powInt(makeSin(rebuildExpr(a->args[0], s)), static_cast<long>(numerator(e)));
    case AtomKind::Cos:
        return powInt(makeCos(rebuildExpr(a->args[0], s)), static_cast<long>(numerator(e)));
    case AtomKind::Arctan:
        return powInt(makeArctan(rebuildExpr(a->args[0], s)), static_cast<long>(numerator(e)));
    case AtomKind::Root: {
        Expr base = rebuildPolyE(a->base, s);
        return powRat(base, e / a->rootIndex);
    }
    case AtomKind::Func: {
        std::vector<Expr> args;
        args.reserve(a->args.size());
        for (const auto& arg : a->args) args.push_back(rebuildExpr(arg, s));
        auto fb = s.functions.find(a->name);
        if (fb != s.functions.end()) {
            const FuncBinding& b = fb->second;
            if (b.formals.size() != args.size())
                fail(Error::Kind::Input, "function binding arity mismatch for " + a->name);
            Expr val = b.body;
            for (size_t i = 0; i < args.size(); ++i)
                for (int k = 0; k < a->dord[i]; ++k) val = diff(val, b.formals[i]);
            Subst inner;
            for (size_t i = 0; i < args.size(); ++i) inner.symbols[b.formals[i]] = args[i];
            val = substitute(val, inner);
            return powInt(val, static_cast<long>(numerator(e)));
        }
        auto em = s.elements.find(a->name);
        if (em != s.elements.end()) {
            const ElementMap& t = em->second;
            if (args.size() != 1)
                fail(Error::Kind::OutsideFragment,
                     "arbitrary-element map on a multi-argument function");
            Expr newArg = t.argScale * args[0] + t.argShift;
            Expr val = makeFunc(a->name, {newArg}, a->dord) * t.factor *
                       powInt(t.argScale, a->dord[0]);
            return powInt(val, static_cast<long>(numerator(e)));
        }
        return powInt(makeFunc(a->name, std::move(args), a->dord),
                      static_cast<long>(numerator(e)));
    }
    case AtomKind::AntiDeriv: {
        std::string var = a->var;
        auto sv = s.symbols.find(var);
        if (sv != s.symbols.end()) {
            // only renaming to another plain symbol keeps us in the fragment
            const Expr& rep = sv->second;
            bool plain = rep.den().isOne() && rep.num().terms.size() == 1 &&
                         rep.num().terms.begin()->second == 1 &&
                         rep.num().terms.begin()->first.factors.size() == 1 &&
                         rep.num().terms.begin()->first.factors[0].first->kind ==
                             AtomKind::Symbol &&
                         rep.num().terms.begin()->first.factors[0].second == 1;
            if (!plain)
                fail(Error::Kind::OutsideFragment,
                     "substituting a compound expression into an antiderivative variable");
            var = rep.num().terms.begin()->first.factors[0].first->name;
        }
        auto fb = s.functions.find(a->name);
        if (fb != s.functions.end()) {
            const FuncBinding& b = fb->second;
            if (b.formals.size() != 1)
                fail(Error::Kind::OutsideFragment,
                     "antiderivative of a multi-argument function binding");
            Expr anti = antiderivative(b.body, b.formals[0]);
            Subst inner;
            inner.symbols[b.formals[0]] = Expr::symbol(var);
            Expr val = substitute(anti, inner);
            return powInt(val, static_cast<long>(numerator(e)));
        }
        auto em = s.elements.find(a->name);
        if (em != s.elements.end()) {
            const ElementMap& t = em->second;
            if (!t.argShift.isZero())
                fail(Error::Kind::OutsideFragment,
                     "arbitrary-element shift through an antiderivative");
            Expr val = makeAntiDeriv(a->name, var) * t.factor / t.argScale;
            return powInt(val, static_cast<long>(numerator(e)));
        }
        return powInt(makeAntiDeriv(a->name, var), static_cast<long>(numerator(e)));
    }
    }
    fail(Error::Kind::Internal, "rebuildAtomPow: unknown kind");
}

Expr rebuildPolyE(const Poly& p, const Subst& s) {
    Expr total(0);
    for (const auto& [m, c] : p.terms) {
        Expr term(c);
        for (const auto& [a, e] : m.factors) term = term * rebuildAtomPow(a, e, s);
        total = total + term;
    }
    return total;
}

Expr rebuildExpr(const Expr& e, const Subst& s) {
    Expr n = rebuildPolyE(e.num(), s);
    Expr d = rebuildPolyE(e.den(), s);
    if (d.isZero())
        fail(Error::Kind::DivisionByZero, "substitution produced a zero denominator");
    return n / d;
}

} // namespace

Expr substitute(const Expr& e, const Subst& s) {
    if (s.emptyMaps()) return e;
    return rebuildExpr(e, s);
}

// ---------------------------------------------------------------------------
// Inspection
// ---------------------------------------------------------------------------

namespace {

void collectSymbolsAtom(const Atom& a, std::map<std::string, bool>& out);

void collectSymbolsPoly(const Poly& p, std::map<std::string, bool>& out) {
    for (const auto& [m, _] : p.terms)
        for (const auto& [a, e] : m.factors) collectSymbolsAtom(*a, out);
}

void collectSymbolsAtom(const Atom& a, std::map<std::string, bool>& out) {
    switch (a.kind) {
    case AtomKind::Symbol:
        out[a.name] = true;
        return;
    case AtomKind::Root:
        collectSymbolsPoly(a.base, out);
        return;
    case AtomKind::AntiDeriv:
        out[a.var] = true;
        return;
    default:
        for (const Expr& arg : a.args) {
            collectSymbolsPoly(arg.num(), out);
            collectSymbolsPoly(arg.den(), out);
        }
        return;
    }
}

} // namespace

void collectSymbols(const Expr& e, std::map<std::string, bool>& out) {
    collectSymbolsPoly(e.num(), out);
    collectSymbolsPoly(e.den(), out);
}

bool dependsOn(const Expr& e, const std::string& symbolName) {
    std::map<std::string, bool> syms;
    collectSymbols(e, syms);
    return syms.count(symbolName) > 0;
}

// ---------------------------------------------------------------------------
// Printing
// ---------------------------------------------------------------------------

namespace {

std::string ratToString(const Rational& r) {
    std::ostringstream os;
    os << r;
    return os.str();
}

std::string printAtomPow(const AtomPtr& a, const Rational& e);

std::string printMono(const Monomial& m) {
    std::string s;
    for (const auto& [a, e] : m.factors) {
        if (!s.empty()) s += "*";
        s += printAtomPow(a, e);
    }
    return s;
}

std::string printTerm(const Rational& absCoeff, const Monomial& m) {
    if (m.empty()) return ratToString(absCoeff);
    std::string ms = printMono(m);
    if (absCoeff == 1) return ms;
    return ratToString(absCoeff) + "*" + ms;
}

std::string printPoly(const Poly& p) {
    if (p.isZero()) return "0";
    std::string s;
    // descending monomial order so the leading term comes first
    for (auto it = p.terms.rbegin(); it != p.terms.rend(); ++it) {
        const Rational& c = it->second;
        if (s.empty()) {
            if (c < 0) s += "-";
        } else {
            s += c < 0 ? " - " : " + ";
        }
        s += printTerm(ratAbs(c), it->first);
    }
    return s;
}

std::string printExprStr(const Expr& e);

std::string printAtomPow(const AtomPtr& a, const Rational& e) {
    std::string base;
    switch (a->kind) {
    case AtomKind::Symbol:
        base = a->name;
        break;
    case AtomKind::Arctan:
        base = "arctan(" + printExprStr(a->args[0]) + ")";
        break;
    case AtomKind::Exp:
        // absorb the exponent into the argument
        return "exp(" + printExprStr(Expr(e) * a->args[0]) + ")";
    case AtomKind::Sin:
        base = "sin(" + printExprStr(a->args[0]) + ")";
        break;
    case AtomKind::Cos:
        base = "cos(" + printExprStr(a->args[0]) + ")";
        break;
    case AtomKind::Root: {
        std::string b = printPoly(a->base);
        if (a->rootIndex == 2) {
            base = "sqrt(" + b + ")";
        } else {
            base = "(" + b + ")^(1/" + std::to_string(a->rootIndex) + ")";
        }
        break;
    }
    case AtomKind::Func: {
        bool plainDeriv = true;
        int totalOrder = 0;
        for (int d : a->dord) totalOrder += d;
        for (const Expr& arg : a->args) {
            bool plain = arg.den().isOne() && arg.num().terms.size() == 1 &&
                         arg.num().terms.begin()->second == 1 &&
                         arg.num().terms.begin()->first.factors.size() == 1 &&
                         arg.num().terms.begin()->first.factors[0].first->kind ==
                             AtomKind::Symbol &&
                         arg.num().terms.begin()->first.factors[0].second == 1;
            if (!plain) plainDeriv = false;
        }
        if (totalOrder == 0) {
            base = a->name + "(";
            for (size_t i = 0; i < a->args.size(); ++i) {
                if (i) base += ",";
                base += printExprStr(a->args[i]);
            }
            base += ")";
        } else if (plainDeriv) {
            base = "Diff(" + a->name;
            for (size_t i = 0; i < a->args.size(); ++i) {
                const auto& sym =
                    a->args[i].num().terms.begin()->first.factors[0].first->name;
                for (int k = 0; k < a->dord[i]; ++k) base += "," + sym;
            }
            base += ")";
        } else {
            base = "DiffAt(" + a->name;
            for (size_t i = 0; i < a->args.size(); ++i)
                base += "," + std::to_string(a->dord[i]) + ":" + printExprStr(a->args[i]);
            base += ")";
        }
        break;
    }
    case AtomKind::AntiDeriv:
        base = "Int(" + a->name + "," + a->var + ")";
        break;
    }
    if (e == 1) return base;
    Integer den = denominator(e);
    if (den == 1 && e > 0) return base + "^" + ratToString(e);
    return base + "^(" + ratToString(e) + ")";
}

std::string printExprStr(const Expr& e) {
    if (e.den().isOne()) return printPoly(e.num());
    std::string n = e.num().terms.size() == 1 ? printPoly(e.num())
                                              : "(" + printPoly(e.num()) + ")";
    bool denSimple = e.den().terms.size() == 1 &&
                     e.den().terms.begin()->second == 1 &&
                     e.den().terms.begin()->first.factors.size() == 1 &&
                     e.den().terms.begin()->first.factors[0].second == 1;
    std::string d = denSimple ? printPoly(e.den()) : "(" + printPoly(e.den()) + ")";
    return n + "/" + d;
}

} // namespace

std::string to_string(const Expr& e) { return printExprStr(e); }
std::string to_string(const Poly& p) { return printPoly(p); }
std::ostream& operator<<(std::ostream& os, const Expr& e) { return os << printExprStr(e); }

} // namespace potsys
