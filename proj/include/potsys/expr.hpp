#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "potsys/error.hpp"

namespace potsys {

using Rational = boost::multiprecision::cpp_rational;
using Integer = boost::multiprecision::cpp_int;

struct Atom;
using AtomPtr = std::shared_ptr<const Atom>;

int cmpRational(const Rational& a, const Rational& b);
int cmpAtom(const Atom& a, const Atom& b);
int cmpAtomPtr(const AtomPtr& a, const AtomPtr& b);

/// Power product of atoms. Factors are kept sorted ascending by the fixed
/// atom order; exponents are nonzero, positive, and integral except for
/// exp-kernel atoms (which carry rational exponents).
struct Monomial {
    std::vector<std::pair<AtomPtr, Rational>> factors;

    bool empty() const { return factors.empty(); }
};

int cmpMono(const Monomial& a, const Monomial& b);

struct MonoLess {
    bool operator()(const Monomial& a, const Monomial& b) const {
        return cmpMono(a, b) < 0;
    }
};

/// Sparse multivariate polynomial over the rationals in atom monomials.
struct Poly {
    std::map<Monomial, Rational, MonoLess> terms;

    bool isZero() const { return terms.empty(); }
    bool isConstant() const {
        return terms.empty() || (terms.size() == 1 && terms.begin()->first.empty());
    }
    bool isOne() const {
        return terms.size() == 1 && terms.begin()->first.empty() &&
               terms.begin()->second == 1;
    }
};

int cmpPoly(const Poly& a, const Poly& b);

/// Canonical expression: a reduced fraction of polynomials.
///
/// Invariants: den is nonzero, free of algebraic atoms (sin, roots),
/// gcd(num, den) = 1 in the free polynomial ring, den has leading
/// coefficient 1, and every monomial has its algebraic exponents reduced
/// (sin appears at most linearly, root exponents below their index).
/// Equal expressions (within the fragment) have identical representations.
class Expr {
public:
    Expr() : num_(), den_(onePoly()) {}
    Expr(long v);
    Expr(const Rational& v);

    static Expr symbol(const std::string& name);
    /// Builds the canonical fraction from raw parts; applies all reductions.
    static Expr fromParts(Poly num, Poly den);
    static Expr fromPoly(Poly p);

    const Poly& num() const { return num_; }
    const Poly& den() const { return den_; }

    bool isZero() const { return num_.isZero(); }
    bool isRational() const { return num_.isConstant() && den_.isOne(); }
    /// Value when isRational(), otherwise nullopt.
    std::optional<Rational> rationalValue() const;

    friend Expr operator+(const Expr& a, const Expr& b);
    friend Expr operator-(const Expr& a, const Expr& b);
    friend Expr operator*(const Expr& a, const Expr& b);
    friend Expr operator/(const Expr& a, const Expr& b);
    Expr operator-() const;
    Expr& operator+=(const Expr& b) { *this = *this + b; return *this; }
    Expr& operator-=(const Expr& b) { *this = *this - b; return *this; }
    Expr& operator*=(const Expr& b) { *this = *this * b; return *this; }
    Expr& operator/=(const Expr& b) { *this = *this / b; return *this; }

    friend bool operator==(const Expr& a, const Expr& b) { return cmpExpr(a, b) == 0; }
    friend bool operator!=(const Expr& a, const Expr& b) { return cmpExpr(a, b) != 0; }

    friend int cmpExpr(const Expr& a, const Expr& b);

private:
    static Poly onePoly();
    Poly num_, den_;
};

enum class AtomKind {
    Symbol,   ///< variable / parameter / jet coordinate
    Arctan,   ///< arctan(arg)
    Exp,      ///< exp(c * arg), c = monomial exponent, arg primitive
    Sin,      ///< sin(arg)
    Cos,      ///< cos(arg)
    Root,     ///< base^(1/q), base a monic content-free polynomial
    Func,     ///< f(args...) with formal derivative orders per argument
    AntiDeriv ///< Int(f, var): formal antiderivative of f in var
};

struct Atom {
    AtomKind kind;
    std::string name;       // Symbol / Func / AntiDeriv function name
    std::string var;        // AntiDeriv integration variable
    int rootIndex = 0;      // Root: q >= 2
    Poly base;              // Root base polynomial
    std::vector<Expr> args; // kernel or function arguments
    std::vector<int> dord;  // Func: derivative order per argument
};

AtomPtr makeSymbolAtom(const std::string& name);

// --- Canonicalizing constructors ---------------------------------------
Expr makeExp(const Expr& arg);
Expr makeSin(const Expr& arg);
Expr makeCos(const Expr& arg);
Expr makeArctan(const Expr& arg);
Expr makeFunc(const std::string& name, std::vector<Expr> args, std::vector<int> dord);
Expr makeAntiDeriv(const std::string& funcName, const std::string& varName);
Expr powInt(const Expr& e, long k);
Expr powRat(const Expr& e, const Rational& r);

// --- Calculus ------------------------------------------------------------
/// Partial derivative with respect to the named symbol; all other symbols
/// (including jet coordinates) are treated as constants.
Expr diff(const Expr& e, const std::string& symbolName);

struct FuncBinding {
    std::vector<std::string> formals;
    Expr body;
};

/// Arbitrary-element transformation used when a group element rescales an
/// arbitrary function: f(u) -> factor * f(argScale * u + argShift).
struct ElementMap {
    Expr factor = Expr(1);
    Expr argScale = Expr(1);
    Expr argShift = Expr(0);
};

struct Subst {
    std::map<std::string, Expr> symbols;
    std::map<std::string, FuncBinding> functions;
    std::map<std::string, ElementMap> elements;

    bool emptyMaps() const {
        return symbols.empty() && functions.empty() && elements.empty();
    }
};

/// Simultaneous substitution followed by renormalization.
Expr substitute(const Expr& e, const Subst& s);

// --- Inspection ----------------------------------------------------------
/// Collects all Symbol atom names occurring anywhere in e, including inside
/// kernel and function arguments.
void collectSymbols(const Expr& e, std::map<std::string, bool>& out);
bool dependsOn(const Expr& e, const std::string& symbolName);

/// Leading rational coefficient of the numerator (0 for the zero expression).
Rational leadingCoeff(const Expr& e);

// --- Printing ------------------------------------------------------------
std::string to_string(const Expr& e);
std::string to_string(const Poly& p);
std::ostream& operator<<(std::ostream& os, const Expr& e);

// Internal polynomial helpers shared between translation units.
namespace detail {
Poly polyOne();
Poly polyConst(const Rational& c);
Poly polyFromMono(Monomial m, const Rational& coeff = Rational(1));
Poly polyAdd(const Poly& a, const Poly& b);
Poly polyNeg(const Poly& a);
Poly polyMulFree(const Poly& a, const Poly& b);
Poly polyMulReduced(const Poly& a, const Poly& b);
Poly reduceAlgebraic(const Poly& p);
Poly gcdPoly(const Poly& a, const Poly& b);
Poly polyDivExact(const Poly& p, const Poly& d);
std::pair<Monomial, Rational> leadingTerm(const Poly& p);
Expr exprFromAtomPow(const AtomPtr& a, const Rational& e);
} // namespace detail

} // namespace potsys
