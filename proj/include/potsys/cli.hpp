#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "potsys/group.hpp"
#include "potsys/potential.hpp"
#include "potsys/symmetry.hpp"

namespace potsys {

/// What the problem file claims about a candidate field. The run fails when
/// a `symmetry` / `not-symmetry` / `determining` expectation is violated;
/// a `claimed` field that fails verification is only flagged in the report
/// (the claim comes from outside and the residual is the interesting part).
enum class Expectation { Symmetry, NotSymmetry, Claimed, Determining };

struct CandidateField {
    std::string name;
    VectorField field;
    Expectation expect = Expectation::Symmetry;
    std::vector<Expr> expectedRelations; // for Determining
};

/// A symmetry job: lift the base system by the conserved-vector combination
/// with the given coefficients (optionally with arbitrary functions bound to
/// closed forms first), then check each candidate field.
struct SymmetryJob {
    std::vector<Rational> combination; // over the conserved-vector basis
    std::string potentialName = "v";
    Subst bindings; // function bindings applied to this job only
    std::vector<CandidateField> fields;
};

struct Problem {
    std::string name;
    PdeSystem system;
    SymbolTable table; // t, x, parameters, declared functions, jets
    std::vector<ConservedVector> vectors;
    std::optional<GroupSchema> schema;
    bool generateCombined = false;
    std::optional<SymmetryJob> symmetries;
};

/// Interprets a parsed document as a problem. Throws Error (Input kind) with
/// the offending key's position on any structural or semantic defect.
Problem interpret_problem(const DocBlock& doc);
Problem load_problem(const std::string& path);

struct CliOptions {
    std::string command; // verify | canonicalize | generate | symmetries | all
    std::string file;
    std::string report = "text"; // text | machine
    std::string golden;          // compare the report against this file
    int depth = -1;              // reduction depth override
};

/// Runs one command and writes the report to `out` and diagnostics to `err`.
/// Returns the process exit code: 0 all checks pass, 1 a verification
/// failed or the golden comparison mismatched, 2 input error.
int run(const CliOptions& opts, std::ostream& out, std::ostream& err);

/// argv-level entry point (parses flags, then calls run).
int run_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace potsys
