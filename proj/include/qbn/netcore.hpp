#pragma once

#include <string>
#include <vector>

#include "qbn/linalg.hpp"

namespace qbn {

// A node of the labelled graph: name, state shape (composite states carry a
// multi-component shape; total dimension is the product) and the ordered
// parent list.
struct NodeSpec {
    std::string name;
    std::vector<int> shape;
    std::vector<std::string> parents;

    int dim() const {
        int d = 1;
        for (int s : shape) d *= s;
        return d;
    }
};

// Acyclic labelled graph; arrows are implied by the per-node parent lists.
class LabeledDag {
  public:
    explicit LabeledDag(std::vector<NodeSpec> nodes);

    int size() const { return int(nodes_.size()); }
    const NodeSpec& node(int i) const { return nodes_[i]; }
    const std::vector<NodeSpec>& nodes() const { return nodes_; }
    int index_of(const std::string& name) const;  // throws UnknownAxis
    bool has_node(const std::string& name) const;
    const std::vector<int>& parent_indices(int i) const { return parent_idx_[i]; }

  private:
    std::vector<NodeSpec> nodes_;
    std::vector<std::vector<int>> parent_idx_;
};

// Node indices ordered so every node follows all of its parents; ties break
// by declaration order. Throws CycleDetected.
std::vector<int> topological_order(const LabeledDag& dag);

struct NodeClassification {
    std::vector<int> internal;  // nodes with at least one outgoing arrow
    std::vector<int> external;  // nodes with none
};
NodeClassification classify_nodes(const LabeledDag& dag);

// One joint assignment of states to all nodes, per component.
struct Story {
    std::vector<std::vector<int>> states;  // [node][component]
};

struct Violation {
    std::string constraint;
    std::string node;
    double residual;
};

struct ValidationReport {
    std::vector<Violation> violations;
    bool ok() const { return violations.empty(); }
    double worst() const;
};

// Quantum net: every node carries a complex amplitude matrix whose rows are
// node states and whose columns are parent-state tuples in lexicographic
// order of the declared parent list (first parent slowest-varying).
class QbNet {
  public:
    QbNet(LabeledDag dag, std::vector<Mat> matrices);

    const LabeledDag& dag() const { return dag_; }
    const Mat& matrix(int i) const { return matrices_[i]; }
    const Mat& matrix(const std::string& name) const { return matrices_[dag_.index_of(name)]; }
    int size() const { return dag_.size(); }
    uint64_t story_count() const;

    // flat state of node i implied by a story's per-component assignment
    int flat_state(const Story& s, int i) const;
    // column of node i's matrix selected by the story's parent states
    int column_of(const Story& s, int i) const;

  private:
    LabeledDag dag_;
    std::vector<Mat> matrices_;
};

// Classical net: same layout with non-negative real entries and unit column
// sums.
class CbNet {
  public:
    CbNet(LabeledDag dag, std::vector<Mat> matrices);

    const LabeledDag& dag() const { return dag_; }
    const Mat& matrix(int i) const { return matrices_[i]; }
    const Mat& matrix(const std::string& name) const { return matrices_[dag_.index_of(name)]; }
    int size() const { return dag_.size(); }

    int flat_state(const Story& s, int i) const;
    int column_of(const Story& s, int i) const;

  private:
    LabeledDag dag_;
    std::vector<Mat> matrices_;
};

Story story_from_flat(const LabeledDag& dag, const std::vector<int>& flat_states);

// Hard ceiling on visited stories for exhaustive enumeration.
inline constexpr uint64_t kStoryEnumCap = uint64_t(1) << 26;

// Depth-first walk over net stories in topological order, skipping branches
// whose amplitude product is already exactly zero. Calls fn(flat_states, amp)
// for every surviving story. Returns false when kStoryEnumCap was hit.
template <typename Net, typename Fn>
bool for_each_story(const Net& net, Fn&& fn) {
    std::vector<int> order = topological_order(net.dag());
    std::vector<int> flat(net.size(), 0);
    uint64_t visits = 0;

    struct Frame {
        int state;
        Cplx amp_in;
    };
    std::vector<Frame> stack;
    stack.push_back({0, Cplx(1.0)});
    while (!stack.empty()) {
        Frame& f = stack.back();
        int depth = int(stack.size()) - 1;
        int node = order[depth];
        if (f.state >= net.dag().node(node).dim()) {
            stack.pop_back();
            continue;
        }
        int state = f.state++;
        flat[node] = state;
        uint64_t col = 0;
        for (int p : net.dag().parent_indices(node))
            col = col * uint64_t(net.dag().node(p).dim()) + uint64_t(flat[p]);
        Cplx entry = net.matrix(node)(state, int(col));
        if (entry == Cplx{}) continue;
        Cplx amp = f.amp_in * entry;
        if (depth + 1 == net.size()) {
            if (++visits > kStoryEnumCap) return false;
            fn(flat, amp);
        } else {
            stack.push_back({0, amp});
        }
    }
    return true;
}

Cplx story_amplitude(const QbNet& net, const Story& s);
double story_probability(const CbNet& net, const Story& s);

// Squares every amplitude, giving the classical net with the same graph.
CbNet parent_cb_net(const QbNet& net);

ValidationReport validate(const QbNet& net);
ValidationReport validate(const CbNet& net);

}  // namespace qbn
