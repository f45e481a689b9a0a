#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "qbn/density.hpp"
#include "qbn/infotheory.hpp"
#include "qbn/measure.hpp"
#include "qbn/netcore.hpp"

namespace qbn {

// Text format for nets: one `[node <name>]` block per node carrying
//   states = d1 [x d2 ...]
//   parents = p1, p2, ...        (line may be empty)
//   matrix =                      (then one row per node state, columns in
//                                  lexicographic parent-tuple order)
// Complex literals are `a`, `a+bi` or `a-bi`.
QbNet load_net(std::istream& in);
QbNet load_net_file(const std::string& path);
void save_net(const QbNet& net, std::ostream& out);
void save_net_file(const QbNet& net, const std::string& path);

// Matrix dump: TSV lines "row col re im", row-major.
void dump_matrix_tsv(const Mat& m, std::ostream& out);
Mat read_matrix_tsv(std::istream& in, int rows, int cols);

// POM file: header "dim d, outcomes m", then m complete matrices in the
// TSV dump format.
Pom load_pom(std::istream& in);
Pom load_pom_file(const std::string& path);
void save_pom(const Pom& pom, std::ostream& out);

// Ensemble file: header "dim d, signals n", a line of n weights, then n
// matrices in the TSV dump format.
Ensemble load_ensemble(std::istream& in);
Ensemble load_ensemble_file(const std::string& path);
void save_ensemble(const Ensemble& e, std::ostream& out);

// Reduction recipes: semicolon-separated steps applied left to right, e.g.
//   trace(n1,n2); esum(n3); project(n4=0)
struct RecipeStep {
    enum class Kind { Trace, Esum, Project };
    Kind kind;
    std::vector<std::string> nodes;
    int state = 0;  // Project only
};
std::vector<RecipeStep> parse_recipe(const std::string& text);
DensityMatrix apply_recipe(const QbNet& net, const std::vector<RecipeStep>& recipe);

Cplx parse_complex(const std::string& token);
std::string format_complex(Cplx v);

}  // namespace qbn
