#include "qbn/qprob.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace qbn {

namespace {
constexpr double kDenomCut = 1e-12;
}

std::vector<int> ProbTable::dims() const {
    std::vector<int> d;
    d.reserve(vars.size());
    for (const auto& v : vars) d.push_back(v.dim);
    return d;
}

ProbTable ProbTable::marginal(const std::vector<std::string>& keep) const {
    std::set<std::string> keep_set(keep.begin(), keep.end());
    for (const auto& k : keep)
        if (std::find_if(vars.begin(), vars.end(),
                         [&](const Axis& a) { return a.node == k; }) == vars.end())
            throw UnknownAxis("unknown variable: " + k);

    ProbTable out;
    std::vector<int> kept_pos;
    for (size_t i = 0; i < vars.size(); ++i)
        if (keep_set.count(vars[i].node)) {
            out.vars.push_back(vars[i]);
            kept_pos.push_back(int(i));
        }
    if (out.vars.empty()) throw EmptyGamma("marginal over no variables");

    std::vector<int> d = dims(), od = out.dims();
    out.p.assign(total_dim(od), 0.0);
    for (uint64_t f = 0; f < p.size(); ++f) {
        std::vector<int> idx = unflatten_index(d, f);
        uint64_t of = 0;
        for (size_t i = 0; i < kept_pos.size(); ++i)
            of = of * uint64_t(od[i]) + uint64_t(idx[kept_pos[i]]);
        out.p[of] += p[f];
    }
    return out;
}

double ProbTable::entropy() const {
    double s = 0;
    for (double v : p)
        if (v > 0) s -= v * std::log2(v);
    return s;
}

double ProbTable::sum() const {
    double s = 0;
    for (double v : p) s += v;
    return s;
}

ProbTable p_gamma(const QbNet& net, const std::vector<std::string>& gamma) {
    if (gamma.empty()) throw EmptyGamma("gamma must be non-empty");
    std::set<std::string> in_gamma(gamma.begin(), gamma.end());
    for (const auto& g : gamma) net.dag().index_of(g);

    NodeClassification cls = classify_nodes(net.dag());
    NetReduction red;
    std::vector<std::string> esums, traces;
    for (int i : cls.internal) {
        const std::string& n = net.dag().node(i).name;
        if (!in_gamma.count(n)) esums.push_back(n);
    }
    for (int i : cls.external) {
        const std::string& n = net.dag().node(i).name;
        if (!in_gamma.count(n)) traces.push_back(n);
    }
    DensityMatrix rho = red.esum(esums).trace(traces).run(net);

    ProbTable out;
    out.vars = rho.axes();
    out.p.resize(rho.dim());
    for (int i = 0; i < rho.dim(); ++i) out.p[i] = std::real(rho.matrix()(i, i));
    return out;
}

namespace {

// Shared conditional construction: joint table over (g1 - g2) and g2,
// denominator summed over the g1 block at the fixed g2 assignment.
ProbTable conditional_from_joint(const ProbTable& joint, const std::vector<std::string>& g1,
                                 const std::vector<std::string>& g2,
                                 const std::vector<int>& x2) {
    if (g1.empty() || g2.empty()) throw EmptyGamma("conditional needs non-empty node sets");
    if (x2.size() != g2.size()) throw DimensionMismatch("assignment length mismatch");

    std::set<std::string> g2_set(g2.begin(), g2.end());
    std::vector<std::string> g1_only;
    for (const auto& n : g1)
        if (!g2_set.count(n)) g1_only.push_back(n);
    if (g1_only.empty()) throw EmptyGamma("conditioned set covers every queried node");

    // Positions inside the joint table.
    std::vector<int> d = joint.dims();
    auto pos_of = [&](const std::string& n) {
        for (size_t i = 0; i < joint.vars.size(); ++i)
            if (joint.vars[i].node == n) return int(i);
        throw UnknownAxis("unknown variable: " + n);
    };
    std::vector<int> g1_pos, g2_pos;
    for (const auto& n : g1_only) g1_pos.push_back(pos_of(n));
    std::vector<int> g2_assign(joint.vars.size(), -1);
    for (size_t i = 0; i < g2.size(); ++i) {
        int p = pos_of(g2[i]);
        if (x2[i] < 0 || x2[i] >= d[p]) throw DimensionMismatch("assignment out of range");
        g2_assign[p] = x2[i];
        g2_pos.push_back(p);
    }

    ProbTable out;
    for (int p : g1_pos) out.vars.push_back(joint.vars[p]);
    std::vector<int> od = out.dims();
    out.p.assign(total_dim(od), 0.0);

    double denom = 0;
    for (uint64_t f = 0; f < joint.p.size(); ++f) {
        std::vector<int> idx = unflatten_index(d, f);
        bool match = true;
        for (size_t i = 0; i < joint.vars.size(); ++i)
            if (g2_assign[i] >= 0 && idx[i] != g2_assign[i]) {
                match = false;
                break;
            }
        if (!match) continue;
        denom += joint.p[f];
        uint64_t of = 0;
        for (size_t i = 0; i < g1_pos.size(); ++i)
            of = of * uint64_t(od[i]) + uint64_t(idx[g1_pos[i]]);
        out.p[of] += joint.p[f];
    }
    if (denom < kDenomCut) throw ZeroDenominator("conditioning event has zero probability");
    for (auto& v : out.p) v /= denom;
    return out;
}

}  // namespace

ProbTable p_gamma_cond(const QbNet& net, const std::vector<std::string>& g1,
                       const std::vector<std::string>& g2, const std::vector<int>& x2) {
    if (g1.empty() || g2.empty()) throw EmptyGamma("conditional needs non-empty node sets");
    std::set<std::string> union_set(g1.begin(), g1.end());
    union_set.insert(g2.begin(), g2.end());
    std::vector<std::string> union_vec(union_set.begin(), union_set.end());
    ProbTable joint = p_gamma(net, union_vec);
    return conditional_from_joint(joint, g1, g2, x2);
}

ProbTable p_rho(const DensityMatrix& rho, const std::vector<std::string>& gamma) {
    if (gamma.empty()) throw EmptyGamma("gamma must be non-empty");
    std::vector<double> diag = diag_distribution(rho, gamma);
    ProbTable out;
    std::set<std::string> keep(gamma.begin(), gamma.end());
    for (const auto& a : rho.axes())
        if (keep.count(a.node)) out.vars.push_back(a);
    out.p = std::move(diag);
    return out;
}

ProbTable p_rho_cond(const DensityMatrix& rho, const std::vector<std::string>& g1,
                     const std::vector<std::string>& g2, const std::vector<int>& x2) {
    if (g1.empty() || g2.empty()) throw EmptyGamma("conditional needs non-empty node sets");
    std::set<std::string> union_set(g1.begin(), g1.end());
    union_set.insert(g2.begin(), g2.end());
    std::vector<std::string> union_vec(union_set.begin(), union_set.end());
    ProbTable joint = p_rho(rho, union_vec);
    return conditional_from_joint(joint, g1, g2, x2);
}

ClosureReport closure_check(const QbNet& net) {
    const int n = net.size();
    if (n > 12) throw StoryCapExceeded("closure check is exhaustive over node subsets");
    DensityMatrix mu = meta_density(net);

    ClosureReport rep;
    // Every non-empty gamma with a non-empty disjoint gamma'.
    for (uint32_t g = 1; g < (1u << n); ++g) {
        uint32_t rest = ((1u << n) - 1) & ~g;
        if (rest == 0) continue;
        std::vector<std::string> gamma;
        for (int i = 0; i < n; ++i)
            if ((g >> i) & 1) gamma.push_back(net.dag().node(i).name);

        for (uint32_t gp = rest; gp != 0; gp = (gp - 1) & rest) {
            std::vector<std::string> both = gamma;
            std::vector<std::string> extra;
            for (int i = 0; i < n; ++i)
                if ((gp >> i) & 1) {
                    both.push_back(net.dag().node(i).name);
                    extra.push_back(net.dag().node(i).name);
                }

            ProbTable pj = p_gamma(net, both);
            ProbTable pm = pj.marginal(gamma);
            ProbTable pg = p_gamma(net, gamma);
            for (uint64_t f = 0; f < pg.p.size(); ++f)
                rep.p_family_residual =
                    std::max(rep.p_family_residual, std::abs(pm.p[f] - pg.p[f]));

            ProbTable qj = p_rho(mu, both);
            ProbTable qm = qj.marginal(gamma);
            ProbTable qg = p_rho(mu, gamma);
            for (uint64_t f = 0; f < qg.p.size(); ++f)
                rep.p_mu_family_residual =
                    std::max(rep.p_mu_family_residual, std::abs(qm.p[f] - qg.p[f]));
        }
    }
    return rep;
}

// ---- classical nets ------------------------------------------------------------

ProbTable joint_table(const CbNet& net) {
    ProbTable out;
    std::vector<int> dims;
    for (const auto& n : net.dag().nodes()) {
        out.vars.push_back({n.name, n.dim()});
        dims.push_back(n.dim());
    }
    uint64_t total = total_dim(dims);
    if (total > kMetaVectorCap) throw StoryCapExceeded("classical net too large for a joint table");
    out.p.assign(total, 0.0);
    bool done = for_each_story(net, [&](const std::vector<int>& flat, Cplx amp) {
        uint64_t idx = 0;
        for (size_t i = 0; i < dims.size(); ++i) idx = idx * uint64_t(dims[i]) + uint64_t(flat[i]);
        out.p[idx] += std::real(amp);
    });
    if (!done) throw StoryCapExceeded("story enumeration exceeded the cap");
    return out;
}

double h_entropy(const ProbTable& joint, const EntropyExpr& expr) {
    SignedJointSum sum = expand(expr);
    return evaluate(sum, [&](const std::vector<std::string>& atoms) {
        return joint.marginal(atoms).entropy();
    });
}

double h_entropy(const ProbTable& joint, const std::string& expr) {
    return h_entropy(joint, parse_expr(expr));
}

double h_entropy(const CbNet& net, const EntropyExpr& expr) {
    return h_entropy(joint_table(net), expr);
}

double h_entropy(const CbNet& net, const std::string& expr) {
    return h_entropy(joint_table(net), parse_expr(expr));
}

}  // namespace qbn
