#include "qbn/suites.hpp"

#include <algorithm>
#include <cmath>

#include "qbn/density.hpp"
#include "qbn/eig.hpp"
#include "qbn/infotheory.hpp"
#include "qbn/protocols.hpp"
#include "qbn/qprob.hpp"
#include "qbn/rng.hpp"

namespace qbn {

namespace {

struct Tracker {
    double worst = 0;
    void le(double lhs, double rhs) { worst = std::max(worst, lhs - rhs); }  // lhs <= rhs
    void eq(double lhs, double rhs) { worst = std::max(worst, std::abs(lhs - rhs)); }
};

// Random CB net on up to `max_nodes` nodes named v1..vk, each with a random
// subset of the earlier nodes as parents.
CbNet random_cb_net(int max_nodes, int max_dim, SplitMix64& rng) {
    int k = 2 + int(rng.below(uint64_t(max_nodes - 1)));
    std::vector<NodeSpec> nodes;
    std::vector<Mat> mats;
    for (int i = 0; i < k; ++i) {
        NodeSpec n;
        n.name = "v" + std::to_string(i + 1);
        n.shape = {2 + int(rng.below(uint64_t(max_dim - 1)))};
        int cols = 1;
        for (int p = 0; p < i; ++p)
            if (rng.uniform() < 0.5) {
                n.parents.push_back(nodes[p].name);
                cols *= nodes[p].dim();
            }
        mats.push_back(random_column_stochastic(n.shape[0], cols, rng));
        nodes.push_back(std::move(n));
    }
    return CbNet(LabeledDag(std::move(nodes)), std::move(mats));
}

DensityMatrix random_axis_density(int axes, SplitMix64& rng) {
    std::vector<Axis> ax;
    int dim = 1;
    const char* names[] = {"X", "Y", "Z"};
    for (int i = 0; i < axes; ++i) {
        ax.push_back({names[i], 2});
        dim *= 2;
    }
    return DensityMatrix(std::move(ax), random_density(dim, rng));
}

}  // namespace

std::vector<SuiteResult> run_table1_suite(int trials, uint64_t seed) {
    SplitMix64 rng(seed);
    std::vector<SuiteResult> out;
    const double ctol = 1e-9;
    const double qtol = 1e-8;

    // --- classical block ---
    {
        Tracker id, rng_bounds, sub, strong, distri;
        for (int t = 0; t < trials; ++t) {
            CbNet net = random_cb_net(4, 3, rng);
            ProbTable joint = joint_table(net);
            auto h = [&](const std::string& e) { return h_entropy(joint, e); };

            int k = net.size();
            std::string x = "v1";
            std::string y = k >= 2 ? "v2" : "v1";
            std::string z = "v" + std::to_string(k);

            id.eq(h(x + "|" + y), h(x + "," + y) - h(y));
            id.eq(h(x + ":" + y), h(x) + h(y) - h(x + "," + y));
            id.eq(h(x + ":" + y), h(x) - h(x + "|" + y));
            distri.eq(h("(" + x + "," + y + "):" + z),
                      h("(" + x + ":" + z + "),(" + y + ":" + z + ")"));
            distri.eq(h("(" + x + ":" + y + ")," + z),
                      h("(" + x + "," + z + "):(" + y + "," + z + ")"));

            rng_bounds.le(0.0, h(x));
            rng_bounds.le(h(x), std::log2(double(net.dag().node(0).dim())));
            sub.le(h(y), h(x + "," + y));
            sub.le(h(x + "," + y), h(x) + h(y));
            strong.le(h(x + "|(" + y + "," + z + ")"), h(x + "|" + y));
        }
        out.push_back({"classical decomposition identities", id.worst <= ctol, id.worst, ""});
        out.push_back({"classical distributive axioms", distri.worst <= ctol, distri.worst, ""});
        out.push_back({"classical range bounds", rng_bounds.worst <= ctol, rng_bounds.worst, ""});
        out.push_back({"classical (sub)additivity", sub.worst <= ctol, sub.worst, ""});
        out.push_back({"classical strong subadditivity", strong.worst <= ctol, strong.worst, ""});
    }
    {
        Tracker gibbs, convex, lanford;
        for (int t = 0; t < trials; ++t) {
            int n = 2 + int(rng.below(4));
            std::vector<double> p = random_distribution(n, rng);
            std::vector<double> q = random_distribution(n, rng);
            double g = 0;
            for (int i = 0; i < n; ++i) g += p[i] * std::log2(q[i] / p[i]);
            gibbs.le(g, 0.0);

            int parts = 2 + int(rng.below(3));
            std::vector<double> w = random_distribution(parts, rng);
            std::vector<std::vector<double>> ps;
            for (int a = 0; a < parts; ++a) ps.push_back(random_distribution(n, rng));
            std::vector<double> mix(n, 0.0);
            double avg_h = 0;
            for (int a = 0; a < parts; ++a) {
                double h = 0;
                for (int i = 0; i < n; ++i) {
                    mix[i] += w[a] * ps[a][i];
                    if (ps[a][i] > 0) h -= ps[a][i] * std::log2(ps[a][i]);
                }
                avg_h += w[a] * h;
            }
            double mix_h = 0, wh = 0;
            for (int i = 0; i < n; ++i)
                if (mix[i] > 0) mix_h -= mix[i] * std::log2(mix[i]);
            for (int a = 0; a < parts; ++a)
                if (w[a] > 0) wh -= w[a] * std::log2(w[a]);
            convex.le(avg_h, mix_h);
            lanford.le(mix_h, avg_h + wh);
        }
        out.push_back({"classical Gibbs inequality", gibbs.worst <= ctol, gibbs.worst, ""});
        out.push_back({"classical convexity", convex.worst <= ctol, convex.worst, ""});
        out.push_back({"classical grouping bound", lanford.worst <= ctol, lanford.worst, ""});
    }

    // --- quantum block ---
    {
        Tracker bounds, araki, sub, strong, unitary, concave, lanford, gibbs;
        for (int t = 0; t < trials; ++t) {
            int axes = 2 + int(rng.below(2));
            DensityMatrix rho = random_axis_density(axes, rng);

            double sx = s_entropy(rho, "X");
            double hx = h_rho(rho, "X");
            bounds.le(0.0, sx);
            bounds.le(sx, hx);
            bounds.le(hx, 1.0);

            double sy = s_entropy(rho, "Y");
            double sxy = s_entropy(rho, "X,Y");
            araki.le(std::abs(sx - sy), sxy);
            sub.le(sxy, sx + sy);
            if (axes == 3) strong.le(s_entropy(rho, "X|(Y,Z)"), s_entropy(rho, "X|Y"));

            Mat u = random_unitary(rho.dim(), rng);
            DensityMatrix rotated(rho.axes(), u * rho.matrix() * u.adjoint());
            unitary.eq(von_neumann_entropy(rotated), von_neumann_entropy(rho));

            int parts = 2 + int(rng.below(2));
            std::vector<double> w = random_distribution(parts, rng);
            Mat mix(rho.dim(), rho.dim());
            double avg_s = 0, wh = 0;
            for (int a = 0; a < parts; ++a) {
                Mat part = random_density(rho.dim(), rng);
                mix = mix + part.scaled(w[a]);
                EigenDecomposition e = hermitian_eig(part);
                for (double lam : e.eigenvalues)
                    if (lam > 0) avg_s -= w[a] * lam * std::log2(lam);
                if (w[a] > 0) wh -= w[a] * std::log2(w[a]);
            }
            double mix_s = 0;
            for (double lam : hermitian_eig(mix).eigenvalues)
                if (lam > 0) mix_s -= lam * std::log2(lam);
            concave.le(avg_s, mix_s);
            lanford.le(mix_s, avg_s + wh);

            Mat sigma = random_density(rho.dim(), rng);
            Mat diff = log2_pd(rho.matrix()) - log2_pd(sigma);
            double rel = -std::real((rho.matrix() * diff).trace());
            gibbs.le(rel, 0.0);
        }
        out.push_back({"quantum entropy bounds", bounds.worst <= qtol, bounds.worst, ""});
        out.push_back({"quantum triangle inequality", araki.worst <= qtol, araki.worst, ""});
        out.push_back({"quantum subadditivity", sub.worst <= qtol, sub.worst, ""});
        out.push_back({"quantum strong subadditivity", strong.worst <= qtol, strong.worst, ""});
        out.push_back({"quantum unitary invariance", unitary.worst <= qtol, unitary.worst, ""});
        out.push_back({"quantum concavity", concave.worst <= qtol, concave.worst, ""});
        out.push_back({"quantum mixing bound", lanford.worst <= qtol, lanford.worst, ""});
        out.push_back({"quantum relative entropy", gibbs.worst <= qtol, gibbs.worst, ""});
    }
    return out;
}

std::vector<SuiteResult> run_dp_suite(int trials, uint64_t seed) {
    SplitMix64 rng(seed);
    std::vector<SuiteResult> out;

    double worst3 = 0, worst4 = 0, worst_rev = 0;
    bool ok3 = true, ok4 = true, okrev = true;
    for (int t = 0; t < trials; ++t) {
        std::vector<int> dims3 = {2 + int(rng.below(2)), 2 + int(rng.below(2)),
                                  2 + int(rng.below(2))};
        CbNet chain = markov_chain_net(dims3, rng);
        for (const auto& e : dp_inequality_check(chain)) {
            worst3 = std::max(worst3, std::abs(e.expected - e.actual));
            ok3 = ok3 && e.pass();
        }
        for (const auto& e : time_reversal_check(chain)) {
            worst_rev = std::max(worst_rev, std::abs(e.expected - e.actual));
            okrev = okrev && e.pass();
        }
    }
    for (int t = 0; t < (trials + 1) / 2; ++t) {
        std::vector<int> dims4 = {2 + int(rng.below(2)), 2 + int(rng.below(2)),
                                  2 + int(rng.below(2)), 2 + int(rng.below(2))};
        CbNet chain = markov_chain_net(dims4, rng);
        for (const auto& e : dp_inequality_check(chain)) {
            worst4 = std::max(worst4, std::abs(e.expected - e.actual));
            ok4 = ok4 && e.pass();
        }
    }
    out.push_back({"3-chain data processing", ok3, worst3, ""});
    out.push_back({"4-chain data processing", ok4, worst4, ""});
    out.push_back({"time-reversal identities", okrev, worst_rev, ""});
    return out;
}

namespace {

SuiteResult fixture_result(const std::string& name, const ProtocolFixture& fx) {
    SuiteResult r{name, fx.all_pass(), fx.worst(), ""};
    if (!r.pass) {
        for (const auto& c : fx.checks)
            if (!c.pass()) {
                r.detail = c.name;
                break;
            }
    }
    if (!validate(fx.net).ok()) {
        r.pass = false;
        r.detail = "net validation failed";
    }
    return r;
}

}  // namespace

std::vector<SuiteResult> run_protocol_suite(uint64_t seed) {
    SplitMix64 rng(seed);
    std::vector<SuiteResult> out;

    out.push_back(fixture_result("EPR pair", epr_net()));
    out.push_back(fixture_result("quantum eraser", eraser_net()));

    {
        CVec a = random_state(2, rng);
        out.push_back(fixture_result("teleportation (random amplitudes)",
                                     teleport_net({a[0], a[1]})));
        out.push_back(fixture_result("teleportation (basis state)", teleport_net({1.0, 0.0})));
    }
    {
        CVec a = random_state(4, rng);
        out.push_back(fixture_result("dense coding (random amplitudes)",
                                     dense_coding_net({a[0], a[1], a[2], a[3]})));
        double h = 0.5;
        out.push_back(
            fixture_result("dense coding (uniform amplitudes)",
                           dense_coding_net({Cplx(h), Cplx(h), Cplx(h), Cplx(h)})));
    }
    out.push_back(fixture_result(
        "system-environment (1 step)",
        sys_env_net(1, random_sys_env_params(1, 2, 2, 2, rng.next_u64()))));
    out.push_back(fixture_result(
        "system-environment (2 steps)",
        sys_env_net(2, random_sys_env_params(2, 2, 2, 2, rng.next_u64()))));
    out.push_back(fixture_result(
        "two mixtures", two_mixtures_net(random_two_mix_params(2, 2, 2, 2, rng.next_u64()))));

    {
        bool pass = true;
        double worst = 0;
        for (const auto& e : cb_example_checks(rng.next_u64(), 50)) {
            pass = pass && e.pass();
            worst = std::max(worst, std::abs(e.expected - e.actual));
        }
        out.push_back({"classical 3-node constraints", pass, worst, ""});
    }

    {
        Ensemble trine = trine_ensemble();
        HolevoNetReport rep = holevo_net_check(trine, trine_pom());
        SuiteResult r{"information-bound net", rep.ok(1e-8),
                      std::max({rep.mutual_chain_residual, rep.h_equals_s_residual,
                                rep.diagonal_residual, rep.outcome_residual, -rep.chain_slack}),
                      ""};
        out.push_back(r);
    }
    return out;
}

bool all_pass(const std::vector<SuiteResult>& results) {
    return std::all_of(results.begin(), results.end(),
                       [](const SuiteResult& r) { return r.pass; });
}

}  // namespace qbn
