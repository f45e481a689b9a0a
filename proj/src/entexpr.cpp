#include "qbn/entexpr.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>

namespace qbn {

EntropyExpr EntropyExpr::atom(std::string n) {
    EntropyExpr e;
    e.kind = Kind::Atom;
    e.name = std::move(n);
    return e;
}

static EntropyExpr binary(EntropyExpr::Kind k, EntropyExpr a, EntropyExpr b) {
    EntropyExpr e;
    e.kind = k;
    e.lhs = std::make_shared<EntropyExpr>(std::move(a));
    e.rhs = std::make_shared<EntropyExpr>(std::move(b));
    return e;
}

EntropyExpr EntropyExpr::comma(EntropyExpr a, EntropyExpr b) {
    return binary(Kind::Comma, std::move(a), std::move(b));
}
EntropyExpr EntropyExpr::colon(EntropyExpr a, EntropyExpr b) {
    return binary(Kind::Colon, std::move(a), std::move(b));
}
EntropyExpr EntropyExpr::bar(EntropyExpr a, EntropyExpr b) {
    return binary(Kind::Bar, std::move(a), std::move(b));
}

EntropyExpr EntropyExpr::joint(const std::vector<std::string>& names) {
    if (names.empty()) throw EmptyExpression("joint() needs at least one variable");
    EntropyExpr e = atom(names[0]);
    for (size_t i = 1; i < names.size(); ++i) e = comma(std::move(e), atom(names[i]));
    return e;
}

bool EntropyExpr::structurally_equal(const EntropyExpr& o) const {
    if (kind != o.kind) return false;
    if (kind == Kind::Atom) return name == o.name;
    return lhs->structurally_equal(*o.lhs) && rhs->structurally_equal(*o.rhs);
}

// ---- parser -------------------------------------------------------------

namespace {

class Parser {
  public:
    explicit Parser(const std::string& text) : text_(text) {}

    EntropyExpr parse() {
        EntropyExpr e = parse_bar();
        skip_ws();
        if (pos_ != text_.size()) fail("unexpected trailing input");
        return e;
    }

  private:
    EntropyExpr parse_bar() {
        EntropyExpr e = parse_colon();
        while (accept('|')) e = EntropyExpr::bar(std::move(e), parse_colon());
        return e;
    }
    EntropyExpr parse_colon() {
        EntropyExpr e = parse_comma();
        while (accept(':')) e = EntropyExpr::colon(std::move(e), parse_comma());
        return e;
    }
    EntropyExpr parse_comma() {
        EntropyExpr e = parse_primary();
        while (accept(',')) e = EntropyExpr::comma(std::move(e), parse_primary());
        return e;
    }
    EntropyExpr parse_primary() {
        skip_ws();
        if (accept('(')) {
            EntropyExpr e = parse_bar();
            skip_ws();
            if (!accept(')')) fail("expected ')'");
            return e;
        }
        if (pos_ >= text_.size()) fail("expected a variable name");
        char c = text_[pos_];
        if (!std::isalpha(static_cast<unsigned char>(c)) && c != '_')
            fail("expected a variable name");
        size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
            ++pos_;
        return EntropyExpr::atom(text_.substr(start, pos_ - start));
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }
    bool accept(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    [[noreturn]] void fail(const std::string& msg) { throw SyntaxError(msg, pos_); }

    const std::string& text_;
    size_t pos_ = 0;
};

}  // namespace

EntropyExpr parse_expr(const std::string& text) { return Parser(text).parse(); }

// ---- expansion ----------------------------------------------------------

namespace {

void collect_atoms(const EntropyExpr& e, std::vector<std::string>& atoms) {
    if (e.kind == EntropyExpr::Kind::Atom) {
        if (std::find(atoms.begin(), atoms.end(), e.name) == atoms.end()) atoms.push_back(e.name);
        return;
    }
    if (!e.lhs || !e.rhs) throw EmptyExpression("malformed expression node");
    collect_atoms(*e.lhs, atoms);
    collect_atoms(*e.rhs, atoms);
}

// A region is a set of non-empty cells of the Boolean algebra over n atoms;
// cell c (bitmask) is the locus covered by exactly the atoms set in c.
std::vector<bool> region_of(const EntropyExpr& e, const std::vector<std::string>& atoms) {
    size_t cells = size_t(1) << atoms.size();
    if (e.kind == EntropyExpr::Kind::Atom) {
        size_t bit = std::find(atoms.begin(), atoms.end(), e.name) - atoms.begin();
        std::vector<bool> r(cells, false);
        for (size_t c = 1; c < cells; ++c) r[c] = (c >> bit) & 1;
        return r;
    }
    std::vector<bool> a = region_of(*e.lhs, atoms);
    std::vector<bool> b = region_of(*e.rhs, atoms);
    std::vector<bool> r(cells, false);
    for (size_t c = 1; c < cells; ++c) {
        switch (e.kind) {
            case EntropyExpr::Kind::Comma: r[c] = a[c] || b[c]; break;
            case EntropyExpr::Kind::Colon: r[c] = a[c] && b[c]; break;
            case EntropyExpr::Kind::Bar: r[c] = a[c] && !b[c]; break;
            default: break;
        }
    }
    return r;
}

}  // namespace

bool SignedJointSum::operator==(const SignedJointSum& o) const {
    if (terms.size() != o.terms.size()) return false;
    for (size_t i = 0; i < terms.size(); ++i)
        if (terms[i].coeff != o.terms[i].coeff || terms[i].atoms != o.terms[i].atoms) return false;
    return true;
}

SignedJointSum expand(const EntropyExpr& expr) {
    if (expr.kind != EntropyExpr::Kind::Atom && (!expr.lhs || !expr.rhs))
        throw EmptyExpression("empty expression");
    std::vector<std::string> atoms;
    collect_atoms(expr, atoms);
    if (atoms.empty()) throw EmptyExpression("expression has no variables");
    if (atoms.size() > 16) throw DomainError("too many distinct variables in expression");

    const size_t n = atoms.size();
    const uint32_t full = uint32_t((size_t(1) << n) - 1);
    std::vector<bool> region = region_of(expr, atoms);

    // The measure of cell T decomposes over joint entropies of unions:
    //   m(T) = -sum_{S subset of T} (-1)^{|T|-|S|} H(atoms of V\S)
    // so accumulate signed coefficients keyed by the union set V\S.
    std::map<uint32_t, long long> coeff;
    for (uint32_t t = 1; t <= full; ++t) {
        if (!region[t]) continue;
        // iterate over subsets s of t
        uint32_t s = t;
        while (true) {
            uint32_t g = full & ~s;
            if (g != 0) {
                int bits_ts = __builtin_popcount(t) - __builtin_popcount(s);
                coeff[g] += (bits_ts % 2 == 0) ? -1 : 1;
            }
            if (s == 0) break;
            s = (s - 1) & t;
        }
    }

    SignedJointSum out;
    for (const auto& [mask, c] : coeff) {
        if (c == 0) continue;
        JointTerm term;
        term.coeff = int(c);
        for (size_t i = 0; i < n; ++i)
            if ((mask >> i) & 1) term.atoms.push_back(atoms[i]);
        std::sort(term.atoms.begin(), term.atoms.end());
        out.terms.push_back(std::move(term));
    }
    std::sort(out.terms.begin(), out.terms.end(), [](const JointTerm& a, const JointTerm& b) {
        if (a.atoms.size() != b.atoms.size()) return a.atoms.size() < b.atoms.size();
        return a.atoms < b.atoms;
    });
    return out;
}

double evaluate(const SignedJointSum& sum,
                const std::function<double(const std::vector<std::string>&)>& joint) {
    double v = 0;
    for (const auto& t : sum.terms) v += double(t.coeff) * joint(t.atoms);
    return v;
}

double binary_entropy(double p) {
    if (p < -1e-12 || p > 1.0 + 1e-12) throw DomainError("binary_entropy argument outside [0,1]");
    p = std::min(1.0, std::max(0.0, p));
    double h = 0;
    if (p > 0) h -= p * std::log2(p);
    if (p < 1) h -= (1 - p) * std::log2(1 - p);
    return h;
}

}  // namespace qbn
