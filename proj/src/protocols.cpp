#include "qbn/protocols.hpp"

#include <algorithm>
#include <cmath>

namespace qbn {

namespace {

constexpr double kTabTol = 1e-9;
constexpr double kVecTol = 1e-10;
constexpr double kExactTol = 1e-12;

// Node matrix copying one component of a composite parent.
Mat copy_component(const std::vector<int>& parent_shape, int comp) {
    int child = parent_shape[comp];
    int cols = int(total_dim(parent_shape));
    Mat m(child, cols);
    for (int f = 0; f < cols; ++f) {
        std::vector<int> idx = unflatten_index(parent_shape, uint64_t(f));
        m(idx[comp], f) = 1.0;
    }
    return m;
}

Mat root_vector(const CVec& v) {
    Mat m(int(v.size()), 1);
    for (size_t i = 0; i < v.size(); ++i) m(int(i), 0) = v[i];
    return m;
}

CVec epr_amplitudes() {
    double r = 1.0 / std::sqrt(2.0);
    return {0.0, r, -r, 0.0};  // (e1, e2) flat with e1 slowest
}

double shannon(const std::vector<double>& p) {
    double h = 0;
    for (double v : p)
        if (v > 0) h -= v * std::log2(v);
    return h;
}

CVec ones(int n) { return CVec(n, Cplx(1.0)); }

double max_abs_diff(const Mat& a, const Mat& b) { return (a - b).max_abs(); }

void require_unit(const CVec& v) {
    double n = norm2(v);
    if (std::abs(n - 1.0) > 1e-9) throw NotNormalized("input amplitudes must have unit norm");
}

void push_table(std::vector<Expected>& out, const DensityMatrix& rho, const std::string& label,
                const std::vector<std::pair<std::string, double>>& s_rows,
                const std::vector<std::pair<std::string, double>>& h_rows) {
    for (const auto& [expr, want] : s_rows)
        out.push_back({label + " S(" + expr + ")", want, s_entropy(rho, expr), kTabTol});
    for (const auto& [expr, want] : h_rows)
        out.push_back({label + " H(" + expr + ")", want, h_rho(rho, expr), kTabTol});
}

}  // namespace

Expected ineq(const std::string& name, double slack, double tol) {
    return {name, 0.0, std::min(slack, 0.0), tol};
}

bool ProtocolFixture::all_pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const Expected& e) { return e.pass(); });
}

double ProtocolFixture::worst() const {
    double w = 0;
    for (const auto& e : checks) w = std::max(w, std::abs(e.expected - e.actual));
    return w;
}

// ---- EPR pair -----------------------------------------------------------------

namespace {

QbNet build_epr_net() {
    std::vector<NodeSpec> nodes = {
        {"e", {2, 2}, {}},
        {"x", {2}, {"e"}},
        {"y", {2}, {"e"}},
    };
    std::vector<Mat> mats = {
        root_vector(epr_amplitudes()),
        copy_component({2, 2}, 0),
        copy_component({2, 2}, 1),
    };
    return QbNet(LabeledDag(std::move(nodes)), std::move(mats));
}

}  // namespace

ProtocolFixture epr_net() {
    ProtocolFixture fx{build_epr_net(), {}};
    const QbNet& net = fx.net;

    DensityMatrix rho = NetReduction().esum({"e"}).run(net);
    push_table(fx.checks, rho, "rho",
               {{"x", 1}, {"y", 1}, {"x,y", 0}, {"x|y", -1}, {"y|x", -1}, {"x:y", 2}},
               {{"x", 1}, {"y", 1}, {"x,y", 1}, {"x|y", 0}, {"y|x", 0}, {"x:y", 1}});

    Mat want(4, 4);
    want(1, 1) = 0.5;
    want(1, 2) = -0.5;
    want(2, 1) = -0.5;
    want(2, 2) = 0.5;
    fx.checks.push_back({"rho matrix", 0, max_abs_diff(rho.matrix(), want), kTabTol});

    DensityMatrix tx = partial_trace(rho, {"x"});
    fx.checks.push_back(
        {"tr_x rho = I/2", 0, max_abs_diff(tx.matrix(), Mat::identity(2).scaled(0.5)), kTabTol});

    for (int y = 0; y < 2; ++y) {
        DensityMatrix ry = NetReduction().esum({"e"}).project_state("y", y).run(net);
        Mat pure(2, 2);
        pure(1 - y, 1 - y) = 1.0;  // opposite state of the partner
        fx.checks.push_back(
            {"rho(y=" + std::to_string(y) + ") matrix", 0, max_abs_diff(ry.matrix(), pure), kTabTol});
        fx.checks.push_back({"rho(y=" + std::to_string(y) + ") S(x)", 0, s_entropy(ry, "x"), kTabTol});
        fx.checks.push_back({"rho(y=" + std::to_string(y) + ") H(x)", 0, h_rho(ry, "x"), kTabTol});
    }
    return fx;
}

// ---- quantum eraser --------------------------------------------------------------

namespace {

QbNet build_eraser_net() {
    Mat u(2, 2);
    double r = 1.0 / std::sqrt(2.0);
    u(0, 0) = r;
    u(0, 1) = r;
    u(1, 0) = r;
    u(1, 1) = -r;  // (-1)^{y r} / sqrt(2)
    std::vector<NodeSpec> nodes = {
        {"e", {2, 2}, {}},
        {"x", {2}, {"e"}},
        {"y", {2}, {"e"}},
        {"r", {2}, {"y"}},
    };
    std::vector<Mat> mats = {
        root_vector(epr_amplitudes()),
        copy_component({2, 2}, 0),
        copy_component({2, 2}, 1),
        std::move(u),
    };
    return QbNet(LabeledDag(std::move(nodes)), std::move(mats));
}

}  // namespace

ProtocolFixture eraser_net() {
    ProtocolFixture fx{build_eraser_net(), {}};
    const QbNet& net = fx.net;

    DensityMatrix rho = NetReduction().esum({"e", "y"}).run(net);
    push_table(fx.checks, rho, "rho",
               {{"x", 1}, {"r", 1}, {"x,r", 0}, {"x|r", -1}, {"r|x", -1}, {"x:r", 2}},
               {{"x", 1}, {"r", 1}, {"x,r", 2}, {"x|r", 1}, {"r|x", 1}, {"x:r", 0}});
    fx.checks.push_back({"coherence(rho, x,r)", 2, coherence(rho, {"x", "r"}), kTabTol});

    CVec sign = {1.0, -1.0, -1.0, -1.0};
    Mat want(4, 4);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) want(i, j) = 0.25 * sign[i] * std::conj(sign[j]);
    fx.checks.push_back({"rho matrix", 0, max_abs_diff(rho.matrix(), want), kTabTol});

    // rho(r): conditioning on the rotated readout restores coherence of x.
    double r2 = 1.0 / std::sqrt(2.0);
    std::vector<CVec> xbasis = {{r2, r2}, {r2, -r2}};
    for (int r = 0; r < 2; ++r) {
        DensityMatrix rr = NetReduction().esum({"e", "y"}).project_state("r", r).run(net);
        const CVec& expect = xbasis[1 - r];
        Mat pure = Mat::outer(expect, expect);
        fx.checks.push_back(
            {"rho(r=" + std::to_string(r) + ") matrix", 0, max_abs_diff(rr.matrix(), pure), kTabTol});
        fx.checks.push_back({"rho(r=" + std::to_string(r) + ") S(x)", 0, s_entropy(rr, "x"), kTabTol});
        fx.checks.push_back({"rho(r=" + std::to_string(r) + ") H(x)", 1, h_rho(rr, "x"), kTabTol});
        fx.checks.push_back(
            {"rho(r=" + std::to_string(r) + ") coherence", 1, coherence(rr, {"x"}), kTabTol});

        // the generic normalization agrees with the explicit factor of two
        CVec er(2, Cplx(0));
        er[r] = 1.0;
        Mat twice = project_unnormalized(rho, "r", er).scaled(2.0);
        DensityMatrix generic = project_reduce(rho, "r", er);
        fx.checks.push_back({"rho(r=" + std::to_string(r) + ") normalization", 0,
                             max_abs_diff(twice, generic.matrix()), kExactTol});
    }

    // Projection order on distinct axes commutes (delayed choice).
    double worst = 0;
    for (int x = 0; x < 2; ++x)
        for (int r = 0; r < 2; ++r) {
            CVec ex(2, Cplx(0)), er(2, Cplx(0));
            ex[x] = 1.0;
            er[r] = 1.0;
            Mat first_r = project_unnormalized(rho, "r", er);
            Mat first_x = project_unnormalized(rho, "x", ex);
            Cplx via_r = first_r(x, x);
            Cplx via_x = first_x(r, r);
            worst = std::max(worst, std::abs(via_r - via_x));
        }
    fx.checks.push_back({"delayed choice commutation", 0, worst, kExactTol});
    return fx;
}

// ---- teleportation -----------------------------------------------------------------

namespace {

double teleport_u_entry(int f1, int f2, int a, int x) {
    double v = 0;
    if (a == 0 && x == f1) v += 1;
    if (a == 1 && x == 1 - f1) v += (f2 ? -1 : 1);
    return v / std::sqrt(2.0);
}

double teleport_r_entry(int b, int f1, int f2, int y) {
    int ybar = 1 - y;
    double u = teleport_u_entry(f1, f2, b, ybar);
    double sign = (ybar ? -1.0 : 1.0) * ((f1 * f2) != 0 ? -1.0 : 1.0);
    return u * sign * std::sqrt(2.0);
}

double epr_entry(int x, int y) {
    if (x == 0 && y == 1) return 1.0 / std::sqrt(2.0);
    if (x == 1 && y == 0) return -1.0 / std::sqrt(2.0);
    return 0.0;
}

QbNet build_teleport_net(const std::array<Cplx, 2>& alpha) {
    Mat mu(4, 4);  // rows f=(f1,f2), cols (a,x)
    for (int f1 = 0; f1 < 2; ++f1)
        for (int f2 = 0; f2 < 2; ++f2)
            for (int a = 0; a < 2; ++a)
                for (int x = 0; x < 2; ++x)
                    mu(f1 * 2 + f2, a * 2 + x) = teleport_u_entry(f1, f2, a, x);
    Mat mr(2, 8);  // rows b, cols (f, y)
    for (int b = 0; b < 2; ++b)
        for (int f1 = 0; f1 < 2; ++f1)
            for (int f2 = 0; f2 < 2; ++f2)
                for (int y = 0; y < 2; ++y)
                    mr(b, (f1 * 2 + f2) * 2 + y) = teleport_r_entry(b, f1, f2, y);

    std::vector<NodeSpec> nodes = {
        {"e", {2, 2}, {}},          {"x", {2}, {"e"}}, {"y", {2}, {"e"}},
        {"a", {2}, {}},             {"f", {2, 2}, {"a", "x"}},
        {"b", {2}, {"f", "y"}},
    };
    std::vector<Mat> mats = {
        root_vector(epr_amplitudes()),
        copy_component({2, 2}, 0),
        copy_component({2, 2}, 1),
        root_vector({alpha[0], alpha[1]}),
        std::move(mu),
        std::move(mr),
    };
    return QbNet(LabeledDag(std::move(nodes)), std::move(mats));
}

}  // namespace

ProtocolFixture teleport_net(const std::array<Cplx, 2>& alpha) {
    require_unit({alpha[0], alpha[1]});
    ProtocolFixture fx{build_teleport_net(alpha), {}};
    const QbNet& net = fx.net;

    double h_in = 0;
    for (const auto& c : alpha) {
        double p = std::norm(c);
        if (p > 0) h_in -= p * std::log2(p);
    }

    // column orthonormality of the correction matrix
    {
        const Mat& mr = net.matrix("b");
        double worst = 0;
        for (int c = 0; c < mr.cols(); ++c) {
            double s = 0;
            for (int r = 0; r < mr.rows(); ++r) s += std::norm(mr(r, c));
            worst = std::max(worst, std::abs(s - 1.0));
        }
        fx.checks.push_back({"R column norms", 0, worst, kExactTol});
    }

    // K identities
    {
        double w_sum = 0, w_sumf = 0, w_abs = 0, w_absf = 0;
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) {
                Cplx sum_f = 0;
                double abs_f = 0;
                for (int f1 = 0; f1 < 2; ++f1)
                    for (int f2 = 0; f2 < 2; ++f2) {
                        Cplx s = 0;
                        double s2 = 0;
                        for (int x = 0; x < 2; ++x)
                            for (int y = 0; y < 2; ++y) {
                                double k = teleport_r_entry(b, f1, f2, y) *
                                           teleport_u_entry(f1, f2, a, x) * epr_entry(x, y);
                                s += k;
                                s2 += k * k;
                            }
                        double sign = (f1 * f2) != 0 ? -1.0 : 1.0;
                        double want = (a == b) ? sign * 0.5 : 0.0;
                        w_sum = std::max(w_sum, std::abs(s - Cplx(want)));
                        w_abs = std::max(w_abs, std::abs(s2 - ((a == b) ? 0.25 : 0.0)));
                        sum_f += s;
                        abs_f += s2;
                    }
                w_sumf = std::max(w_sumf, std::abs(sum_f - Cplx(a == b ? 1.0 : 0.0)));
                w_absf = std::max(w_absf, std::abs(abs_f - (a == b ? 1.0 : 0.0)));
            }
        fx.checks.push_back({"sum_{x,y} K", 0, w_sum, kExactTol});
        fx.checks.push_back({"sum_{x,y,f} K", 0, w_sumf, kExactTol});
        fx.checks.push_back({"sum_{x,y} |K|^2", 0, w_abs, kExactTol});
        fx.checks.push_back({"sum_{x,y,f} |K|^2", 0, w_absf, kExactTol});
    }

    // psi_out(f) = (-1)^{f1 f2} psi_in' for every branch; psi_out without the
    // branch projection is psi_in' itself.
    for (int f = 0; f < 4; ++f) {
        MetaState v = NetReduction()
                          .project("e", ones(4))
                          .project("x", ones(2))
                          .project("y", ones(2))
                          .project("a", ones(2))
                          .project_state("f", f)
                          .raw_vector(net);
        int f1 = f / 2, f2 = f % 2;
        double sign = (f1 * f2) != 0 ? -1.0 : 1.0;
        double worst = 0;
        for (int b = 0; b < 2; ++b)
            worst = std::max(worst, std::abs(2.0 * v.amplitudes[b] - sign * alpha[b]));
        fx.checks.push_back({"psi_out(f=" + std::to_string(f) + ")", 0, worst, kVecTol});
    }
    {
        MetaState v = NetReduction()
                          .project("e", ones(4))
                          .project("x", ones(2))
                          .project("y", ones(2))
                          .project("a", ones(2))
                          .project("f", ones(4))
                          .raw_vector(net);
        double worst = 0;
        for (int b = 0; b < 2; ++b) worst = std::max(worst, std::abs(v.amplitudes[b] - alpha[b]));
        fx.checks.push_back({"psi_out", 0, worst, kVecTol});
    }

    // sigma factorizes into the (a, b) transfer state and the branch state.
    DensityMatrix sigma = NetReduction().esum({"e", "x", "y"}).run(net);
    {
        CVec phi(16, Cplx(0));  // axes (a, f, b)
        for (int a = 0; a < 2; ++a)
            for (int f1 = 0; f1 < 2; ++f1)
                for (int f2 = 0; f2 < 2; ++f2) {
                    double sign = (f1 * f2) != 0 ? -1.0 : 1.0;
                    phi[(a * 4 + f1 * 2 + f2) * 2 + a] = alpha[a] * sign * 0.5;
                }
        Mat want = Mat::outer(phi, phi);
        fx.checks.push_back({"sigma factorization", 0, max_abs_diff(sigma.matrix(), want), kVecTol});
    }

    // case (a): branch register kept, output traced
    DensityMatrix rho_a = partial_trace(sigma, {"b"});
    push_table(fx.checks, rho_a, "case(a)",
               {{"a", h_in}, {"f", 0}, {"a,f", h_in}, {"a|f", h_in}, {"f|a", 0}, {"a:f", 0}},
               {{"a", h_in}, {"f", 2}, {"a,f", h_in + 2}, {"a|f", h_in}, {"f|a", 2}, {"a:f", 0}});

    // case (b): branch register fixed (all three reductions coincide)
    CVec e0(4, Cplx(0));
    e0[0] = 1.0;
    DensityMatrix rho_b = project_reduce(sigma, "f", e0);
    {
        DensityMatrix via_trace = partial_trace(sigma, {"f"});
        DensityMatrix via_esum = esum(sigma, {"f"});
        fx.checks.push_back({"case(b) project = trace", 0,
                             max_abs_diff(rho_b.matrix(), via_trace.matrix()), kVecTol});
        fx.checks.push_back({"case(b) project = esum", 0,
                             max_abs_diff(rho_b.matrix(), via_esum.matrix()), kVecTol});
    }
    push_table(fx.checks, rho_b, "case(b)",
               {{"a", h_in},
                {"b", h_in},
                {"a,b", 0},
                {"a|b", -h_in},
                {"b|a", -h_in},
                {"a:b", 2 * h_in}},
               {{"a", h_in}, {"b", h_in}, {"a,b", h_in}, {"a|b", 0}, {"b|a", 0}, {"a:b", h_in}});
    return fx;
}

// ---- dense coding ---------------------------------------------------------------------

namespace {

double dense_u_entry(int b1, int b2, int t, int y) {
    double v = 0;
    if (t == 0 && y == b1) v += 1;
    if (t == 1 && y == 1 - b1) v += (b2 ? -1 : 1);
    return v / std::sqrt(2.0);
}

double dense_r_entry(int t, int a1, int a2, int x) {
    double v = 0;
    if (t == 0 && (1 - x) == a1) v += 1;
    if (t == 1 && x == a1) v += (a2 ? -1 : 1);
    return v * (x ? -1.0 : 1.0);
}

QbNet build_dense_net(const std::array<Cplx, 4>& alpha) {
    Mat mr(2, 8);  // rows t, cols (a, x)
    for (int t = 0; t < 2; ++t)
        for (int a1 = 0; a1 < 2; ++a1)
            for (int a2 = 0; a2 < 2; ++a2)
                for (int x = 0; x < 2; ++x)
                    mr(t, (a1 * 2 + a2) * 2 + x) = dense_r_entry(t, a1, a2, x);
    Mat mu(4, 4);  // rows b=(b1,b2), cols (t, y)
    for (int b1 = 0; b1 < 2; ++b1)
        for (int b2 = 0; b2 < 2; ++b2)
            for (int t = 0; t < 2; ++t)
                for (int y = 0; y < 2; ++y)
                    mu(b1 * 2 + b2, t * 2 + y) = dense_u_entry(b1, b2, t, y);

    std::vector<NodeSpec> nodes = {
        {"e", {2, 2}, {}},          {"x", {2}, {"e"}}, {"y", {2}, {"e"}},
        {"a", {2, 2}, {}},          {"t", {2}, {"a", "x"}},
        {"b", {2, 2}, {"t", "y"}},
    };
    std::vector<Mat> mats = {
        root_vector(epr_amplitudes()),
        copy_component({2, 2}, 0),
        copy_component({2, 2}, 1),
        root_vector({alpha[0], alpha[1], alpha[2], alpha[3]}),
        std::move(mr),
        std::move(mu),
    };
    return QbNet(LabeledDag(std::move(nodes)), std::move(mats));
}

}  // namespace

ProtocolFixture dense_coding_net(const std::array<Cplx, 4>& alpha) {
    require_unit({alpha[0], alpha[1], alpha[2], alpha[3]});
    ProtocolFixture fx{build_dense_net(alpha), {}};
    const QbNet& net = fx.net;

    double h_in = 0;
    for (const auto& c : alpha) {
        double p = std::norm(c);
        if (p > 0) h_in -= p * std::log2(p);
    }
    std::vector<double> w1(2, 0.0);
    for (int a1 = 0; a1 < 2; ++a1)
        for (int a2 = 0; a2 < 2; ++a2) w1[a1] += std::norm(alpha[a1 * 2 + a2]);
    double h_in_1 = shannon(w1);

    // K identities
    {
        double w_sum = 0, w_sumt = 0, w_abs = 0;
        double total_abs = 0;
        for (int a1 = 0; a1 < 2; ++a1)
            for (int a2 = 0; a2 < 2; ++a2)
                for (int b1 = 0; b1 < 2; ++b1)
                    for (int b2 = 0; b2 < 2; ++b2) {
                        Cplx sum_t = 0;
                        for (int t = 0; t < 2; ++t) {
                            Cplx s = 0;
                            double s2 = 0;
                            for (int x = 0; x < 2; ++x)
                                for (int y = 0; y < 2; ++y) {
                                    double k = dense_u_entry(b1, b2, t, y) *
                                               dense_r_entry(t, a1, a2, x) * epr_entry(x, y);
                                    s += k;
                                    s2 += k * k;
                                }
                            double want = 0;
                            if (a1 == b1)
                                want = 0.5 * (t == 0 ? 1.0 : ((a2 + b2) % 2 ? -1.0 : 1.0));
                            w_sum = std::max(w_sum, std::abs(s - Cplx(want)));
                            w_abs = std::max(w_abs, std::abs(s2 - (a1 == b1 ? 0.25 : 0.0)));
                            sum_t += s;
                            total_abs += s2;
                        }
                        double want_ab = (a1 == b1 && a2 == b2) ? 1.0 : 0.0;
                        w_sumt = std::max(w_sumt, std::abs(sum_t - Cplx(want_ab)));
                    }
        fx.checks.push_back({"sum_{x,y} K", 0, w_sum, kExactTol});
        fx.checks.push_back({"sum_{x,y,t} K", 0, w_sumt, kExactTol});
        fx.checks.push_back({"sum_{x,y} |K|^2", 0, w_abs, kExactTol});
        fx.checks.push_back({"sum_{x,y,t,b} |K|^2", 0, std::abs(total_abs / 4.0 - 1.0), kExactTol});
    }

    // exact state transfer
    {
        MetaState v = NetReduction()
                          .project("e", ones(4))
                          .project("x", ones(2))
                          .project("y", ones(2))
                          .project("a", ones(4))
                          .project("t", ones(2))
                          .raw_vector(net);
        double worst = 0;
        for (int b = 0; b < 4; ++b) worst = std::max(worst, std::abs(v.amplitudes[b] - alpha[b]));
        fx.checks.push_back({"psi_out", 0, worst, kVecTol});
    }

    DensityMatrix sigma = NetReduction().esum({"e", "x", "y"}).run(net);
    {
        CVec phi(32, Cplx(0));  // axes (a, t, b)
        for (int a1 = 0; a1 < 2; ++a1)
            for (int a2 = 0; a2 < 2; ++a2)
                for (int t = 0; t < 2; ++t)
                    for (int b2 = 0; b2 < 2; ++b2) {
                        int a = a1 * 2 + a2;
                        int b = a1 * 2 + b2;
                        double coef = t == 0 ? 0.5 : ((a2 + b2) % 2 ? -0.5 : 0.5);
                        phi[(a * 2 + t) * 4 + b] = coef * alpha[a];
                    }
        Mat want = Mat::outer(phi, phi);
        fx.checks.push_back({"sigma factorization", 0, max_abs_diff(sigma.matrix(), want), kVecTol});
    }

    DensityMatrix rho_a = partial_trace(sigma, {"b"});
    push_table(fx.checks, rho_a, "case(a)",
               {{"a", h_in},
                {"t", 1},
                {"a,t", 1 + h_in_1},
                {"a|t", h_in_1},
                {"t|a", 1 + h_in_1 - h_in},
                {"a:t", h_in - h_in_1}},
               {{"a", h_in}, {"t", 1}, {"a,t", 1 + h_in}, {"a|t", h_in}, {"t|a", 1}, {"a:t", 0}});

    DensityMatrix rho_b = esum(sigma, {"t"});
    push_table(fx.checks, rho_b, "case(b)",
               {{"a", h_in},
                {"b", h_in},
                {"a,b", 0},
                {"a|b", -h_in},
                {"b|a", -h_in},
                {"a:b", 2 * h_in}},
               {{"a", h_in}, {"b", h_in}, {"a,b", h_in}, {"a|b", 0}, {"b|a", 0}, {"a:b", h_in}});
    return fx;
}

// ---- system and environment -------------------------------------------------------------

SysEnvParams random_sys_env_params(int steps, int dq, int dr, int de, uint64_t seed) {
    SplitMix64 rng(seed);
    SysEnvParams p;
    CVec joint = random_state(dq * dr, rng);
    p.alpha = Mat(dq, dr);
    for (int q = 0; q < dq; ++q)
        for (int r = 0; r < dr; ++r) p.alpha(q, r) = joint[q * dr + r];
    p.beta1 = random_state(de, rng);
    p.u1 = random_unitary(dq * de, rng);
    if (steps == 2) {
        p.beta2 = random_state(de, rng);
        p.u2 = random_unitary(dq * de, rng);
    }
    return p;
}

namespace {

void append_mix_source(std::vector<NodeSpec>& nodes, std::vector<Mat>& mats, const Mat& alpha,
                       const std::string& j, const std::string& q, const std::string& r) {
    int dq = alpha.rows(), dr = alpha.cols();
    Mat mj(dq * dr, 1);
    for (int a = 0; a < dq; ++a)
        for (int b = 0; b < dr; ++b) mj(a * dr + b, 0) = alpha(a, b);
    nodes.push_back({j, {dq, dr}, {}});
    mats.push_back(std::move(mj));
    nodes.push_back({q, {dq}, {j}});
    mats.push_back(copy_component({dq, dr}, 0));
    nodes.push_back({r, {dr}, {j}});
    mats.push_back(copy_component({dq, dr}, 1));
}

void append_interaction(std::vector<NodeSpec>& nodes, std::vector<Mat>& mats, int dq, int de,
                        const CVec& beta, const Mat& u, const std::string& qin,
                        const std::string& e, const std::string& t, const std::string& qf,
                        const std::string& ef) {
    nodes.push_back({e, {de}, {}});
    mats.push_back(root_vector(beta));
    nodes.push_back({t, {dq, de}, {qin, e}});
    mats.push_back(u);
    nodes.push_back({qf, {dq}, {t}});
    mats.push_back(copy_component({dq, de}, 0));
    nodes.push_back({ef, {de}, {t}});
    mats.push_back(copy_component({dq, de}, 1));
}

}  // namespace

ProtocolFixture sys_env_net(int steps, const SysEnvParams& p) {
    if (steps != 1 && steps != 2) throw DomainError("steps must be 1 or 2");
    const int dq = p.alpha.rows(), de = int(p.beta1.size());
    const double tol = 1e-8;

    std::vector<NodeSpec> nodes;
    std::vector<Mat> mats;
    append_mix_source(nodes, mats, p.alpha, "j", "q1", "r");
    std::vector<NodeSpec> nodes0 = nodes;
    std::vector<Mat> mats0 = mats;
    QbNet net0(LabeledDag(std::move(nodes0)), std::move(mats0));

    append_interaction(nodes, mats, dq, de, p.beta1, p.u1, "q1", "e1", "t1", "q2", "e1f");
    if (steps == 1) {
        ProtocolFixture fx{QbNet(LabeledDag(std::move(nodes)), std::move(mats)), {}};
        DensityMatrix rho0 = NetReduction().esum({"j"}).run(net0);
        DensityMatrix rho = NetReduction().esum({"j", "q1", "e1", "t1"}).run(fx.net);
        fx.checks.push_back({"S_rho0(q,r) = 0", 0, s_entropy(rho0, "q1,r"), kTabTol});
        fx.checks.push_back({"S_rho(r,qf,ef) = 0", 0, s_entropy(rho, "r,q2,e1f"), kTabTol});
        fx.checks.push_back(ineq("S(qf) - S(ef) <= S0(q)",
                                 s_entropy(rho0, "q1") - s_entropy(rho, "q2") +
                                     s_entropy(rho, "e1f"),
                                 tol));
        fx.checks.push_back({"S(r,ef) = S(qf)", 0,
                             s_entropy(rho, "r,e1f") - s_entropy(rho, "q2"), tol});
        fx.checks.push_back({"S(r) = S0(q)", 0,
                             s_entropy(rho, "r") - s_entropy(rho0, "q1"), tol});
        return fx;
    }

    std::vector<NodeSpec> nodes1 = nodes;
    std::vector<Mat> mats1 = mats;
    QbNet net1(LabeledDag(std::move(nodes1)), std::move(mats1));
    append_interaction(nodes, mats, dq, de, p.beta2, p.u2, "q2", "e2", "t2", "q3", "e2f");
    ProtocolFixture fx{QbNet(LabeledDag(std::move(nodes)), std::move(mats)), {}};

    DensityMatrix rho0 = NetReduction().esum({"j"}).run(net0);
    DensityMatrix rho1 = NetReduction().esum({"j", "q1", "e1", "t1"}).run(net1);
    DensityMatrix rho2 =
        NetReduction().esum({"j", "q1", "e1", "t1", "q2", "e2", "t2"}).run(fx.net);
    fx.checks.push_back({"S_rho1(r,e1f,q2) = 0", 0, s_entropy(rho1, "r,e1f,q2"), kTabTol});
    fx.checks.push_back({"S_rho2(r,e1f,e2f,q3) = 0", 0, s_entropy(rho2, "r,e1f,e2f,q3"), kTabTol});
    fx.checks.push_back(ineq(
        "S2(q3) - S2(e1f,e2f) <= S1(q2) - S1(e1f)",
        (s_entropy(rho1, "q2") - s_entropy(rho1, "e1f")) -
            (s_entropy(rho2, "q3") - s_entropy(rho2, "e1f,e2f")),
        tol));
    fx.checks.push_back(ineq("S1(q2) - S1(e1f) <= S0(q1)",
                             s_entropy(rho0, "q1") -
                                 (s_entropy(rho1, "q2") - s_entropy(rho1, "e1f")),
                             tol));

    DensityMatrix sig1 = NetReduction().esum({"j", "e1", "t1"}).run(net1);
    DensityMatrix sig2 = NetReduction().esum({"j", "e1", "t1", "e2", "t2"}).run(fx.net);
    double s1 = s_entropy(sig1, "q1|q2");
    double s2 = s_entropy(sig2, "q1|q3");
    fx.checks.push_back(ineq("0 <= S_sig1(q1|q2)", s1, tol));
    fx.checks.push_back(ineq("S_sig1(q1|q2) <= S_sig2(q1|q3)", s2 - s1, tol));
    return fx;
}

// ---- two mixtures ----------------------------------------------------------------------

TwoMixParams random_two_mix_params(int dq1, int dr1, int dq2, int dr2, uint64_t seed) {
    SplitMix64 rng(seed);
    TwoMixParams p;
    CVec v1 = random_state(dq1 * dr1, rng);
    p.alpha1 = Mat(dq1, dr1);
    for (int q = 0; q < dq1; ++q)
        for (int r = 0; r < dr1; ++r) p.alpha1(q, r) = v1[q * dr1 + r];
    CVec v2 = random_state(dq2 * dr2, rng);
    p.alpha2 = Mat(dq2, dr2);
    for (int q = 0; q < dq2; ++q)
        for (int r = 0; r < dr2; ++r) p.alpha2(q, r) = v2[q * dr2 + r];
    p.u = random_unitary(dq1 * dq2, rng);
    return p;
}

ProtocolFixture two_mixtures_net(const TwoMixParams& p) {
    const int dq1 = p.alpha1.rows();
    const int dq2 = p.alpha2.rows();
    const double tol = 1e-8;

    std::vector<NodeSpec> nodes;
    std::vector<Mat> mats;
    append_mix_source(nodes, mats, p.alpha1, "j1", "q1", "r1");
    std::vector<NodeSpec> sub1_nodes = nodes;
    std::vector<Mat> sub1_mats = mats;
    QbNet sub1(LabeledDag(std::move(sub1_nodes)), std::move(sub1_mats));

    size_t before = nodes.size();
    append_mix_source(nodes, mats, p.alpha2, "j2", "q2", "r2");
    std::vector<NodeSpec> sub2_nodes(nodes.begin() + before, nodes.end());
    std::vector<Mat> sub2_mats(mats.begin() + before, mats.end());
    QbNet sub2(LabeledDag(std::move(sub2_nodes)), std::move(sub2_mats));

    nodes.push_back({"t", {dq1, dq2}, {"q1", "q2"}});
    mats.push_back(p.u);
    nodes.push_back({"q1f", {dq1}, {"t"}});
    mats.push_back(copy_component({dq1, dq2}, 0));
    nodes.push_back({"q2f", {dq2}, {"t"}});
    mats.push_back(copy_component({dq1, dq2}, 1));
    ProtocolFixture fx{QbNet(LabeledDag(std::move(nodes)), std::move(mats)), {}};

    DensityMatrix rho1 = NetReduction().esum({"j1"}).run(sub1);
    DensityMatrix rho2 = NetReduction().esum({"j2"}).run(sub2);
    DensityMatrix rho = NetReduction().esum({"j1", "q1", "j2", "q2", "t"}).run(fx.net);

    fx.checks.push_back({"S_rho1(q1,r1) = 0", 0, s_entropy(rho1, "q1,r1"), kTabTol});
    fx.checks.push_back({"S_rho2(q2,r2) = 0", 0, s_entropy(rho2, "q2,r2"), kTabTol});
    fx.checks.push_back(
        {"S_rho(r1,r2,q1f,q2f) = 0", 0, s_entropy(rho, "r1,r2,q1f,q2f"), kTabTol});

    double ent1 = s_entropy(rho, "q1f,r1");
    double ent2 = s_entropy(rho, "q2f,r2");
    fx.checks.push_back({"S(q1f,r1) = S(q2f,r2)", 0, ent1 - ent2, kTabTol});
    for (int lam = 1; lam <= 2; ++lam) {
        std::string qf = lam == 1 ? "q1f" : "q2f";
        double before_s = s_entropy(lam == 1 ? rho1 : rho2, lam == 1 ? "q1" : "q2");
        double after_s = s_entropy(rho, qf);
        fx.checks.push_back(
            ineq("|S(" + qf + ") - S_rho_lam(q)| <= S(q1f,r1)",
                 ent1 - std::abs(after_s - before_s), tol));
        fx.checks.push_back(ineq("S(q1f,r1) <= S(" + qf + ") + S_rho_lam(q)",
                                 after_s + before_s - ent1, tol));
    }
    return fx;
}

// ---- classical examples --------------------------------------------------------------------

CbNet diverging_net(const std::vector<int>& dims, SplitMix64& rng) {
    int da = dims[0], db = dims[1], dc = dims[2];
    std::vector<NodeSpec> nodes = {
        {"b", {db}, {}},
        {"a", {da}, {"b"}},
        {"c", {dc}, {"b"}},
    };
    std::vector<Mat> mats = {
        random_column_stochastic(db, 1, rng),
        random_column_stochastic(da, db, rng),
        random_column_stochastic(dc, db, rng),
    };
    return CbNet(LabeledDag(std::move(nodes)), std::move(mats));
}

CbNet converging_net(const std::vector<int>& dims, SplitMix64& rng) {
    int da = dims[0], db = dims[1], dc = dims[2];
    std::vector<NodeSpec> nodes = {
        {"a", {da}, {}},
        {"c", {dc}, {}},
        {"b", {db}, {"a", "c"}},
    };
    std::vector<Mat> mats = {
        random_column_stochastic(da, 1, rng),
        random_column_stochastic(dc, 1, rng),
        random_column_stochastic(db, da * dc, rng),
    };
    return CbNet(LabeledDag(std::move(nodes)), std::move(mats));
}

CbNet fully_connected3_net(const std::vector<int>& dims, SplitMix64& rng) {
    int da = dims[0], db = dims[1], dc = dims[2];
    std::vector<NodeSpec> nodes = {
        {"a", {da}, {}},
        {"b", {db}, {"a"}},
        {"c", {dc}, {"b", "a"}},
    };
    std::vector<Mat> mats = {
        random_column_stochastic(da, 1, rng),
        random_column_stochastic(db, da, rng),
        random_column_stochastic(dc, db * da, rng),
    };
    return CbNet(LabeledDag(std::move(nodes)), std::move(mats));
}

CbNet markov_chain_net(const std::vector<int>& dims, SplitMix64& rng) {
    std::vector<NodeSpec> nodes;
    std::vector<Mat> mats;
    for (size_t i = 0; i < dims.size(); ++i) {
        std::string name = "q" + std::to_string(i + 1);
        if (i == 0) {
            nodes.push_back({name, {dims[i]}, {}});
            mats.push_back(random_column_stochastic(dims[i], 1, rng));
        } else {
            nodes.push_back({name, {dims[i]}, {"q" + std::to_string(i)}});
            mats.push_back(random_column_stochastic(dims[i], dims[i - 1], rng));
        }
    }
    return CbNet(LabeledDag(std::move(nodes)), std::move(mats));
}

std::vector<Expected> cb_example_checks(uint64_t seed, int trials) {
    SplitMix64 rng(seed);
    double w_div = 0, w_conv = 0, w_chain = 0, w_full = 0;
    for (int t = 0; t < trials; ++t) {
        std::vector<int> dims = {2 + int(rng.below(2)), 2 + int(rng.below(2)),
                                 2 + int(rng.below(2))};
        w_div = std::max(w_div, std::abs(h_entropy(diverging_net(dims, rng), "(a:c)|b")));
        w_conv = std::max(w_conv, std::abs(h_entropy(converging_net(dims, rng), "a:c")));
        {
            CbNet chain = markov_chain_net(dims, rng);
            double v = h_entropy(chain, "(q1:q3)|q2");
            w_chain = std::max(w_chain, std::abs(v));
        }
        {
            CbNet full = fully_connected3_net(dims, rng);
            double lhs = h_entropy(full, "a,b,c");
            double rhs = h_entropy(full, "c|b,a") + h_entropy(full, "b|a") + h_entropy(full, "a");
            w_full = std::max(w_full, std::abs(lhs - rhs));
        }
    }
    return {
        {"diverging: H[(a:c)|b] = 0", 0, w_div, 1e-10},
        {"converging: H(a:c) = 0", 0, w_conv, 1e-10},
        {"chain: H[(q1:q3)|q2] = 0", 0, w_chain, 1e-10},
        {"full: chain rule", 0, w_full, 1e-10},
    };
}

std::vector<Expected> dp_inequality_check(const CbNet& chain) {
    const double tol = 1e-10;
    ProbTable joint = joint_table(chain);
    auto h = [&](const std::string& e) { return h_entropy(joint, e); };

    std::vector<Expected> out;
    if (chain.size() == 3) {
        out.push_back(ineq("0 <= H(q1|q2)", h("q1|q2"), tol));
        out.push_back(ineq("H(q1|q2) <= H(q1|q3)", h("q1|q3") - h("q1|q2"), tol));
        out.push_back(ineq("H(q1:q2) <= H(q1)", h("q1") - h("q1:q2"), tol));
        out.push_back(ineq("H(q1:q3) <= H(q1:q2)", h("q1:q2") - h("q1:q3"), tol));
        out.push_back(ineq("H(q3|q2) <= H(q3|q1)", h("q3|q1") - h("q3|q2"), tol));
        out.push_back(ineq("H(q3:q1) <= H(q3:q2)", h("q3:q2") - h("q3:q1"), tol));
        out.push_back(ineq("H(q1:q3) <= min(H(q1:q2),H(q2:q3))",
                           std::min(h("q1:q2"), h("q2:q3")) - h("q1:q3"), tol));
        out.push_back({"H(q1|q1) = 0", 0, h("q1|q1"), tol});
        out.push_back({"H(q1:q1) = H(q1)", 0, h("q1:q1") - h("q1"), tol});
    } else if (chain.size() == 4) {
        out.push_back(ineq("H(q1:q4) <= H(q2:q3)", h("q2:q3") - h("q1:q4"), tol));
        out.push_back(ineq("H(q1:q4) <= H(q1:q3)", h("q1:q3") - h("q1:q4"), tol));
        out.push_back(ineq("H(q1:q3) <= H(q2:q3)", h("q2:q3") - h("q1:q3"), tol));
    } else {
        throw DomainError("data-processing checks need a 3- or 4-node chain");
    }
    return out;
}

std::vector<Expected> time_reversal_check(const CbNet& chain3) {
    if (chain3.size() != 3) throw DomainError("time reversal extends a 3-node chain");
    ProbTable joint = joint_table(chain3);
    int d1 = chain3.dag().node(0).dim();
    int d2 = chain3.dag().node(1).dim();
    int d3 = chain3.dag().node(2).dim();

    // P(q2'|q3) copies P(q2|q3); P(q1'|q2') copies P(q1|q2).
    ProbTable p23 = joint.marginal({"q2", "q3"});
    ProbTable p3 = joint.marginal({"q3"});
    Mat m2p(d2, d3);
    for (int b = 0; b < d2; ++b)
        for (int c = 0; c < d3; ++c)
            m2p(b, c) = p3.p[c] > 0 ? p23.p[uint64_t(b) * d3 + c] / p3.p[c] : 1.0 / d2;
    ProbTable p12 = joint.marginal({"q1", "q2"});
    ProbTable p2 = joint.marginal({"q2"});
    Mat m1p(d1, d2);
    for (int a = 0; a < d1; ++a)
        for (int b = 0; b < d2; ++b)
            m1p(a, b) = p2.p[b] > 0 ? p12.p[uint64_t(a) * d2 + b] / p2.p[b] : 1.0 / d1;

    std::vector<NodeSpec> nodes = chain3.dag().nodes();
    std::vector<Mat> mats;
    for (int i = 0; i < chain3.size(); ++i) mats.push_back(chain3.matrix(i));
    nodes.push_back({"q2p", {d2}, {"q3"}});
    mats.push_back(std::move(m2p));
    nodes.push_back({"q1p", {d1}, {"q2p"}});
    mats.push_back(std::move(m1p));
    CbNet extended(LabeledDag(std::move(nodes)), std::move(mats));

    ProbTable ej = joint_table(extended);
    auto h = [&](const std::string& e) { return h_entropy(ej, e); };
    const double tol = 1e-10;
    std::vector<Expected> out;
    out.push_back({"H(q3:q2p) = H(q3:q2)", 0, h("q3:q2p") - h("q3:q2"), tol});
    out.push_back({"H(q3:q1p) = H(q3:q1)", 0, h("q3:q1p") - h("q3:q1"), tol});
    out.push_back(ineq("H(q3:q2p) >= H(q3:q1p)", h("q3:q2p") - h("q3:q1p"), tol));
    return out;
}

}  // namespace qbn
