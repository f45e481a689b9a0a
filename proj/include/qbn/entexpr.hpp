#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "qbn/errors.hpp"

namespace qbn {

// AST for compound entropy expressions over the operators
// comma (join), colon (mutual) and bar (conditional).
// Precedence, highest first: comma, colon, bar; all left-associative.
struct EntropyExpr {
    enum class Kind { Atom, Comma, Colon, Bar };

    Kind kind = Kind::Atom;
    std::string name;              // Atom only
    std::shared_ptr<EntropyExpr> lhs, rhs;

    static EntropyExpr atom(std::string n);
    static EntropyExpr comma(EntropyExpr a, EntropyExpr b);
    static EntropyExpr colon(EntropyExpr a, EntropyExpr b);
    static EntropyExpr bar(EntropyExpr a, EntropyExpr b);
    // comma-join of a list of variable names
    static EntropyExpr joint(const std::vector<std::string>& names);

    bool structurally_equal(const EntropyExpr& o) const;
};

EntropyExpr parse_expr(const std::string& text);

// One +-1 weighted joint-entropy term: coeff * H(atoms).
struct JointTerm {
    int coeff = 0;
    std::vector<std::string> atoms;  // sorted, non-empty, unique
};

// Canonical signed sum of joint-entropy terms. Terms are sorted, merged,
// and zero coefficients removed.
struct SignedJointSum {
    std::vector<JointTerm> terms;

    bool operator==(const SignedJointSum& o) const;
};

// Expands a compound expression into a signed sum of plain joint entropies.
// Works by mapping the expression to a region of the Boolean algebra over
// its atoms (comma = union, colon = intersection, bar = difference) and
// decomposing the region's measure by inclusion-exclusion over unions.
SignedJointSum expand(const EntropyExpr& expr);

// Evaluates a signed sum against a caller-supplied joint entropy H(atoms).
double evaluate(const SignedJointSum& sum,
                const std::function<double(const std::vector<std::string>&)>& joint);

// h(p) = -p log2 p - (1-p) log2 (1-p), with 0 log 0 = 0.
double binary_entropy(double p);

}  // namespace qbn
