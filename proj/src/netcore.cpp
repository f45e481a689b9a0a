#include "qbn/netcore.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace qbn {

namespace {
constexpr double kNormTol = 1e-9;
}  // namespace

LabeledDag::LabeledDag(std::vector<NodeSpec> nodes) : nodes_(std::move(nodes)) {
    std::set<std::string> seen;
    for (const auto& n : nodes_) {
        if (n.name.empty()) throw Error("node with empty name");
        if (!seen.insert(n.name).second) throw Error("duplicate node name: " + n.name);
        if (n.shape.empty()) throw Error("node " + n.name + " has empty state shape");
        for (int d : n.shape)
            if (d < 1) throw Error("node " + n.name + " has a non-positive dimension");
    }
    parent_idx_.resize(nodes_.size());
    for (size_t i = 0; i < nodes_.size(); ++i) {
        for (const auto& p : nodes_[i].parents) {
            if (p == nodes_[i].name) throw Error("node " + p + " lists itself as parent");
            parent_idx_[i].push_back(index_of(p));
        }
    }
}

int LabeledDag::index_of(const std::string& name) const {
    for (size_t i = 0; i < nodes_.size(); ++i)
        if (nodes_[i].name == name) return int(i);
    throw UnknownAxis("unknown node: " + name);
}

bool LabeledDag::has_node(const std::string& name) const {
    for (const auto& n : nodes_)
        if (n.name == name) return true;
    return false;
}

std::vector<int> topological_order(const LabeledDag& dag) {
    const int n = dag.size();
    std::vector<int> pending(n);
    for (int i = 0; i < n; ++i) pending[i] = int(dag.parent_indices(i).size());
    std::vector<std::vector<int>> children(n);
    for (int i = 0; i < n; ++i)
        for (int p : dag.parent_indices(i)) children[p].push_back(i);

    std::vector<int> order;
    order.reserve(n);
    std::vector<bool> placed(n, false);
    // Kahn's algorithm, scanning in declaration order for determinism.
    for (int round = 0; round < n; ++round) {
        int pick = -1;
        for (int i = 0; i < n; ++i)
            if (!placed[i] && pending[i] == 0) {
                pick = i;
                break;
            }
        if (pick < 0) throw CycleDetected("graph contains a directed cycle");
        placed[pick] = true;
        order.push_back(pick);
        for (int c : children[pick]) --pending[c];
    }
    return order;
}

NodeClassification classify_nodes(const LabeledDag& dag) {
    std::vector<bool> has_out(dag.size(), false);
    for (int i = 0; i < dag.size(); ++i)
        for (int p : dag.parent_indices(i)) has_out[p] = true;
    NodeClassification c;
    for (int i = 0; i < dag.size(); ++i)
        (has_out[i] ? c.internal : c.external).push_back(i);
    return c;
}

double ValidationReport::worst() const {
    double w = 0;
    for (const auto& v : violations) w = std::max(w, v.residual);
    return w;
}

static void check_matrix_shapes(const LabeledDag& dag, const std::vector<Mat>& mats) {
    if (int(mats.size()) != dag.size()) throw DimensionMismatch("one matrix per node required");
    for (int i = 0; i < dag.size(); ++i) {
        uint64_t cols = 1;
        for (int p : dag.parent_indices(i)) cols *= uint64_t(dag.node(p).dim());
        if (mats[i].rows() != dag.node(i).dim() || uint64_t(mats[i].cols()) != cols)
            throw DimensionMismatch("node matrix shape mismatch at node " + dag.node(i).name);
    }
}

QbNet::QbNet(LabeledDag dag, std::vector<Mat> matrices)
    : dag_(std::move(dag)), matrices_(std::move(matrices)) {
    check_matrix_shapes(dag_, matrices_);
    topological_order(dag_);  // rejects cycles
}

CbNet::CbNet(LabeledDag dag, std::vector<Mat> matrices)
    : dag_(std::move(dag)), matrices_(std::move(matrices)) {
    check_matrix_shapes(dag_, matrices_);
    topological_order(dag_);
}

uint64_t QbNet::story_count() const {
    uint64_t c = 1;
    for (const auto& n : dag_.nodes()) {
        c *= uint64_t(n.dim());
        if (c > (uint64_t(1) << 40)) return c;  // saturate well above every cap
    }
    return c;
}

template <typename Net>
static int flat_state_impl(const Net& net, const Story& s, int i) {
    const NodeSpec& n = net.dag().node(i);
    if (int(s.states.size()) != net.dag().size() ||
        s.states[i].size() != n.shape.size())
        throw DimensionMismatch("story shape mismatch");
    for (size_t c = 0; c < n.shape.size(); ++c)
        if (s.states[i][c] < 0 || s.states[i][c] >= n.shape[c])
            throw DimensionMismatch("story state out of range at node " + n.name);
    return int(flatten_index(n.shape, s.states[i]));
}

template <typename Net>
static int column_impl(const Net& net, const Story& s, int i) {
    uint64_t col = 0;
    for (int p : net.dag().parent_indices(i))
        col = col * uint64_t(net.dag().node(p).dim()) + uint64_t(net.flat_state(s, p));
    return int(col);
}

int QbNet::flat_state(const Story& s, int i) const { return flat_state_impl(*this, s, i); }
int QbNet::column_of(const Story& s, int i) const { return column_impl(*this, s, i); }
int CbNet::flat_state(const Story& s, int i) const { return flat_state_impl(*this, s, i); }
int CbNet::column_of(const Story& s, int i) const { return column_impl(*this, s, i); }

Story story_from_flat(const LabeledDag& dag, const std::vector<int>& flat_states) {
    if (int(flat_states.size()) != dag.size()) throw DimensionMismatch("story length mismatch");
    Story s;
    s.states.resize(dag.size());
    for (int i = 0; i < dag.size(); ++i) {
        if (flat_states[i] < 0 || flat_states[i] >= dag.node(i).dim())
            throw DimensionMismatch("flat state out of range at node " + dag.node(i).name);
        s.states[i] = unflatten_index(dag.node(i).shape, uint64_t(flat_states[i]));
    }
    return s;
}

Cplx story_amplitude(const QbNet& net, const Story& s) {
    Cplx a = 1.0;
    for (int i = 0; i < net.size(); ++i)
        a *= net.matrix(i)(net.flat_state(s, i), net.column_of(s, i));
    return a;
}

double story_probability(const CbNet& net, const Story& s) {
    double p = 1.0;
    for (int i = 0; i < net.size(); ++i)
        p *= std::real(net.matrix(i)(net.flat_state(s, i), net.column_of(s, i)));
    return p;
}

CbNet parent_cb_net(const QbNet& net) {
    std::vector<Mat> mats;
    mats.reserve(net.size());
    for (int i = 0; i < net.size(); ++i) {
        Mat m(net.matrix(i).rows(), net.matrix(i).cols());
        for (int r = 0; r < m.rows(); ++r)
            for (int c = 0; c < m.cols(); ++c) m(r, c) = std::norm(net.matrix(i)(r, c));
        mats.push_back(std::move(m));
    }
    return CbNet(net.dag(), std::move(mats));
}

ValidationReport validate(const QbNet& net) {
    ValidationReport rep;
    for (int i = 0; i < net.size(); ++i) {
        const Mat& m = net.matrix(i);
        double worst = 0;
        for (int c = 0; c < m.cols(); ++c) {
            double s = 0;
            for (int r = 0; r < m.rows(); ++r) s += std::norm(m(r, c));
            worst = std::max(worst, std::abs(s - 1.0));
        }
        if (worst > kNormTol)
            rep.violations.push_back({"column-norm", net.dag().node(i).name, worst});
    }

    // Global story-amplitude norms, by exhaustive enumeration.
    NodeClassification cls = classify_nodes(net.dag());
    std::vector<int> ext_dims;
    for (int x : cls.external) ext_dims.push_back(net.dag().node(x).dim());
    uint64_t ext_total = total_dim(ext_dims);
    if (ext_total <= (uint64_t(1) << 20)) {
        double norm_all = 0;
        CVec io_sums(ext_total, Cplx(0));
        bool complete = for_each_story(net, [&](const std::vector<int>& flat, Cplx amp) {
            norm_all += std::norm(amp);
            uint64_t e = 0;
            for (int x : cls.external) e = e * uint64_t(net.dag().node(x).dim()) + uint64_t(flat[x]);
            io_sums[e] += amp;
        });
        if (complete) {
            double r = std::abs(norm_all - 1.0);
            if (r > kNormTol) rep.violations.push_back({"story-norm", "", r});
            double io = 0;
            for (const auto& v : io_sums) io += std::norm(v);
            double rio = std::abs(io - 1.0);
            if (rio > kNormTol) rep.violations.push_back({"io-norm", "", rio});
        } else {
            rep.violations.push_back({"story-norm-unchecked (net too large)", "", 0.0});
        }
    }
    return rep;
}

ValidationReport validate(const CbNet& net) {
    ValidationReport rep;
    for (int i = 0; i < net.size(); ++i) {
        const Mat& m = net.matrix(i);
        double worst_sum = 0, worst_neg = 0, worst_imag = 0;
        for (int c = 0; c < m.cols(); ++c) {
            double s = 0;
            for (int r = 0; r < m.rows(); ++r) {
                worst_imag = std::max(worst_imag, std::abs(m(r, c).imag()));
                double v = m(r, c).real();
                if (v < 0) worst_neg = std::max(worst_neg, -v);
                s += v;
            }
            worst_sum = std::max(worst_sum, std::abs(s - 1.0));
        }
        const std::string& name = net.dag().node(i).name;
        if (worst_imag > kNormTol) rep.violations.push_back({"non-real", name, worst_imag});
        if (worst_neg > 1e-12) rep.violations.push_back({"negative-entry", name, worst_neg});
        if (worst_sum > kNormTol) rep.violations.push_back({"column-sum", name, worst_sum});
    }
    return rep;
}

}  // namespace qbn
