#include "qbn/netfile.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace qbn {

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(trim(cur));
    return out;
}

[[noreturn]] void parse_fail(const std::string& msg, size_t line) {
    throw SyntaxError(msg + " (line " + std::to_string(line) + ")", line);
}

std::ifstream open_or_throw(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open file: " + path);
    return in;
}

}  // namespace

Cplx parse_complex(const std::string& token) {
    // optional sign, decimal real, optional (+|-)decimal i
    const char* p = token.c_str();
    char* end = nullptr;
    double re = std::strtod(p, &end);
    if (end == p) throw SyntaxError("malformed complex literal: " + token, 0);
    if (*end == '\0') return Cplx(re, 0.0);
    const char* q = end;
    char* end2 = nullptr;
    double im = std::strtod(q, &end2);
    if (end2 == q || *end2 != 'i' || *(end2 + 1) != '\0')
        throw SyntaxError("malformed complex literal: " + token, 0);
    return Cplx(re, im);
}

std::string format_complex(Cplx v) {
    char buf[80];
    if (v.imag() == 0.0) {
        std::snprintf(buf, sizeof buf, "%.17g", v.real());
    } else {
        std::snprintf(buf, sizeof buf, "%.17g%+.17gi", v.real(), v.imag());
    }
    return buf;
}

// ---- net format -----------------------------------------------------------

QbNet load_net(std::istream& in) {
    struct Block {
        NodeSpec spec;
        std::vector<std::vector<Cplx>> rows;
        size_t line;
    };
    std::vector<Block> blocks;
    Block* cur = nullptr;
    bool in_matrix = false;

    std::string raw;
    size_t lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string line = trim(raw);
        if (line.empty() || line[0] == '#') continue;

        if (line.front() == '[') {
            if (line.back() != ']') parse_fail("unterminated node header", lineno);
            std::string inner = trim(line.substr(1, line.size() - 2));
            if (inner.rfind("node", 0) != 0) parse_fail("expected [node <name>]", lineno);
            std::string name = trim(inner.substr(4));
            if (name.empty()) parse_fail("node needs a name", lineno);
            blocks.push_back({{name, {}, {}}, {}, lineno});
            cur = &blocks.back();
            in_matrix = false;
            continue;
        }
        if (!cur) parse_fail("content before the first [node] block", lineno);

        size_t eq = line.find('=');
        std::string key = eq == std::string::npos ? "" : trim(line.substr(0, eq));
        if (!in_matrix && key == "states") {
            for (const auto& part : split(line.substr(eq + 1), 'x')) {
                try {
                    cur->spec.shape.push_back(std::stoi(part));
                } catch (...) {
                    parse_fail("bad state dimension", lineno);
                }
            }
        } else if (!in_matrix && key == "parents") {
            std::string rest = trim(line.substr(eq + 1));
            if (!rest.empty())
                for (const auto& p : split(rest, ','))
                    if (!p.empty()) cur->spec.parents.push_back(p);
        } else if (!in_matrix && key == "matrix") {
            in_matrix = true;
            std::string rest = trim(line.substr(eq + 1));
            if (!rest.empty()) parse_fail("matrix rows start on the following lines", lineno);
        } else if (in_matrix) {
            std::vector<Cplx> row;
            std::istringstream ss(line);
            std::string tok;
            while (ss >> tok) {
                try {
                    row.push_back(parse_complex(tok));
                } catch (const SyntaxError& e) {
                    parse_fail(e.what(), lineno);
                }
            }
            cur->rows.push_back(std::move(row));
        } else {
            parse_fail("unrecognized line", lineno);
        }
    }
    if (blocks.empty()) throw SyntaxError("no [node] blocks found", 0);

    std::vector<NodeSpec> specs;
    for (const auto& b : blocks) {
        if (b.spec.shape.empty()) parse_fail("node " + b.spec.name + " lacks states", b.line);
        specs.push_back(b.spec);
    }
    LabeledDag dag(specs);
    std::vector<Mat> mats;
    for (const auto& b : blocks) {
        uint64_t cols = 1;
        for (const auto& p : b.spec.parents) cols *= uint64_t(dag.node(dag.index_of(p)).dim());
        int rows = b.spec.shape.empty() ? 0 : NodeSpec{b.spec.name, b.spec.shape, {}}.dim();
        if (int(b.rows.size()) != rows)
            parse_fail("node " + b.spec.name + " expects one matrix row per state", b.line);
        Mat m(rows, int(cols));
        for (int r = 0; r < rows; ++r) {
            if (b.rows[r].size() != cols)
                parse_fail("node " + b.spec.name + " has a row of the wrong width", b.line);
            for (uint64_t c = 0; c < cols; ++c) m(r, int(c)) = b.rows[r][c];
        }
        mats.push_back(std::move(m));
    }
    return QbNet(std::move(dag), std::move(mats));
}

QbNet load_net_file(const std::string& path) {
    std::ifstream in = open_or_throw(path);
    return load_net(in);
}

void save_net(const QbNet& net, std::ostream& out) {
    for (int i = 0; i < net.size(); ++i) {
        const NodeSpec& n = net.dag().node(i);
        out << "[node " << n.name << "]\n";
        out << "states = ";
        for (size_t k = 0; k < n.shape.size(); ++k)
            out << (k ? " x " : "") << n.shape[k];
        out << "\n";
        out << "parents = ";
        for (size_t k = 0; k < n.parents.size(); ++k) out << (k ? "," : "") << n.parents[k];
        out << "\n";
        out << "matrix =\n";
        const Mat& m = net.matrix(i);
        for (int r = 0; r < m.rows(); ++r) {
            for (int c = 0; c < m.cols(); ++c) out << (c ? " " : "") << format_complex(m(r, c));
            out << "\n";
        }
        out << "\n";
    }
}

void save_net_file(const QbNet& net, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write file: " + path);
    save_net(net, out);
}

// ---- matrix dumps ------------------------------------------------------------

void dump_matrix_tsv(const Mat& m, std::ostream& out) {
    char buf[128];
    for (int r = 0; r < m.rows(); ++r)
        for (int c = 0; c < m.cols(); ++c) {
            std::snprintf(buf, sizeof buf, "%d\t%d\t%.17g\t%.17g\n", r, c, m(r, c).real(),
                          m(r, c).imag());
            out << buf;
        }
}

Mat read_matrix_tsv(std::istream& in, int rows, int cols) {
    Mat m(rows, cols);
    for (int k = 0; k < rows * cols; ++k) {
        int r, c;
        double re, im;
        if (!(in >> r >> c >> re >> im)) throw SyntaxError("truncated matrix dump", 0);
        if (r < 0 || r >= rows || c < 0 || c >= cols)
            throw SyntaxError("matrix dump index out of range", 0);
        m(r, c) = Cplx(re, im);
    }
    return m;
}

// ---- POM and ensemble files ------------------------------------------------------

namespace {

void parse_header(std::istream& in, const std::string& second_key, int& dim, int& count) {
    std::string line;
    do {
        if (!std::getline(in, line)) throw SyntaxError("missing header", 0);
        line = trim(line);
    } while (line.empty() || line[0] == '#');
    int got = std::sscanf(line.c_str(), ("dim %d, " + second_key + " %d").c_str(), &dim, &count);
    if (got != 2) throw SyntaxError("expected header 'dim d, " + second_key + " m'", 0);
    if (dim < 1 || count < 1) throw SyntaxError("header values must be positive", 0);
}

}  // namespace

Pom load_pom(std::istream& in) {
    Pom p;
    int m = 0;
    parse_header(in, "outcomes", p.dim, m);
    for (int k = 0; k < m; ++k) p.elements.push_back(read_matrix_tsv(in, p.dim, p.dim));
    return p;
}

Pom load_pom_file(const std::string& path) {
    std::ifstream in = open_or_throw(path);
    return load_pom(in);
}

void save_pom(const Pom& pom, std::ostream& out) {
    out << "dim " << pom.dim << ", outcomes " << pom.outcomes() << "\n";
    for (const auto& f : pom.elements) dump_matrix_tsv(f, out);
}

Ensemble load_ensemble(std::istream& in) {
    Ensemble e;
    int n = 0;
    parse_header(in, "signals", e.dim, n);
    for (int k = 0; k < n; ++k) {
        double w;
        if (!(in >> w)) throw SyntaxError("missing ensemble weight", 0);
        e.weights.push_back(w);
    }
    for (int k = 0; k < n; ++k) e.signals.push_back(read_matrix_tsv(in, e.dim, e.dim));
    e.check();
    return e;
}

Ensemble load_ensemble_file(const std::string& path) {
    std::ifstream in = open_or_throw(path);
    return load_ensemble(in);
}

void save_ensemble(const Ensemble& e, std::ostream& out) {
    out << "dim " << e.dim << ", signals " << e.size() << "\n";
    for (size_t i = 0; i < e.weights.size(); ++i) {
        char buf[48];
        std::snprintf(buf, sizeof buf, "%.17g", e.weights[i]);
        out << (i ? " " : "") << buf;
    }
    out << "\n";
    for (const auto& s : e.signals) dump_matrix_tsv(s, out);
}

// ---- recipes -----------------------------------------------------------------------

std::vector<RecipeStep> parse_recipe(const std::string& text) {
    std::vector<RecipeStep> steps;
    for (const auto& part : split(text, ';')) {
        if (part.empty()) continue;
        size_t open = part.find('(');
        if (open == std::string::npos || part.back() != ')')
            throw SyntaxError("recipe step needs the form op(args): " + part, 0);
        std::string op = trim(part.substr(0, open));
        std::string args = part.substr(open + 1, part.size() - open - 2);
        RecipeStep step;
        if (op == "trace") {
            step.kind = RecipeStep::Kind::Trace;
        } else if (op == "esum") {
            step.kind = RecipeStep::Kind::Esum;
        } else if (op == "project") {
            step.kind = RecipeStep::Kind::Project;
        } else {
            throw SyntaxError("unknown recipe step: " + op, 0);
        }
        if (step.kind == RecipeStep::Kind::Project) {
            size_t eq = args.find('=');
            if (eq == std::string::npos)
                throw SyntaxError("project needs the form project(node=state)", 0);
            step.nodes.push_back(trim(args.substr(0, eq)));
            try {
                step.state = std::stoi(trim(args.substr(eq + 1)));
            } catch (...) {
                throw SyntaxError("bad projection state in recipe", 0);
            }
        } else {
            for (const auto& n : split(args, ','))
                if (!n.empty()) step.nodes.push_back(n);
            if (step.nodes.empty()) throw SyntaxError(op + " needs at least one node", 0);
        }
        steps.push_back(std::move(step));
    }
    if (steps.empty()) throw SyntaxError("empty reduction recipe", 0);
    return steps;
}

DensityMatrix apply_recipe(const QbNet& net, const std::vector<RecipeStep>& recipe) {
    // Steps touch distinct axes, so one fused reduction is equivalent to the
    // left-to-right composition.
    NetReduction red;
    for (const auto& step : recipe) {
        switch (step.kind) {
            case RecipeStep::Kind::Trace: red.trace(step.nodes); break;
            case RecipeStep::Kind::Esum: red.esum(step.nodes); break;
            case RecipeStep::Kind::Project:
                red.project_state(step.nodes[0], step.state);
                break;
        }
    }
    return red.run(net);
}

}  // namespace qbn
