#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "potsys/expr.hpp"
#include "potsys/jet.hpp"

namespace potsys {

/// Declared arbitrary function: name plus formal argument names. A bare use
/// of the name in an expression is shorthand for applying it to its formals.
struct FunctionDecl {
    std::vector<std::string> formals;
};

/// Names an expression is allowed to reference. Jet coordinates of the
/// declared dependent variables are recognized structurally (u_t, v1_x, ...).
struct SymbolTable {
    std::set<std::string> symbols; // independents, dependents, parameters
    JetContext jets;               // enables jet-coordinate names when non-empty
    std::map<std::string, FunctionDecl> functions;
};

/// Parses the infix expression grammar: `+ - * / ^`, integer literals
/// (rationals via division), parentheses, kernels exp/sin/cos/arctan/sqrt,
/// declared function application `A(u)`, `Diff(A,u,...)` for formal
/// derivatives, `Int(A,u)` for the formal antiderivative. Exponents must be
/// rational constants. Errors carry 1-based line:column positions.
Expr parse_expression(const std::string& text, const SymbolTable& table);

// --- Problem-file document tree -------------------------------------------
// The .pot format is a list of `key = value` / `key { ... }` entries, where
// values are strings, integers, booleans, lists, or nested blocks. Order is
// preserved and duplicate keys are allowed (interpretation decides).

struct DocValue;
using DocValuePtr = std::shared_ptr<DocValue>;

struct DocBlock {
    std::vector<std::pair<std::string, DocValuePtr>> entries;
    int line = 0, col = 0;

    const DocValue* find(const std::string& key) const;
    std::vector<const DocValue*> findAll(const std::string& key) const;
};

struct DocValue {
    std::variant<std::string, long, bool, std::vector<DocValuePtr>, DocBlock> v;
    int line = 0, col = 0;

    const std::string& asString() const;
    long asInt() const;
    bool asBool() const;
    const std::vector<DocValuePtr>& asList() const;
    const DocBlock& asBlock() const;
};

DocBlock parse_document(const std::string& text);

/// Renders a document back to text; re-parsing the result yields an
/// identical tree (round-trip).
std::string print_document(const DocBlock& doc);

} // namespace potsys
