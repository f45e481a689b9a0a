#include "qbn/infotheory.hpp"

#include <algorithm>
#include <cmath>

#include "qbn/rng.hpp"

namespace qbn {

void Ensemble::check() const {
    if (signals.empty()) throw Error("ensemble has no signals");
    if (weights.size() != signals.size()) throw DimensionMismatch("one weight per signal");
    double s = 0;
    for (double w : weights) {
        if (w < -1e-12) throw Error("negative ensemble weight");
        s += w;
    }
    if (std::abs(s - 1.0) > 1e-10) throw NotNormalized("ensemble weights must sum to one");
    for (const auto& m : signals) {
        if (m.rows() != dim || m.cols() != dim)
            throw DimensionMismatch("signal dimension mismatch");
        if (m.hermiticity_residual() > 1e-9) throw NotHermitian("signal is not Hermitian");
        if (std::abs(m.trace() - Cplx(1.0)) > 1e-9) throw NotNormalized("signal trace is not one");
    }
}

Mat ensemble_avg(const Ensemble& e) {
    e.check();
    Mat rho(e.dim, e.dim);
    for (int a = 0; a < e.size(); ++a) rho = rho + e.signals[a].scaled(e.weights[a]);
    return rho;
}

namespace {

double entropy_of(const Mat& rho) {
    EigenDecomposition d = hermitian_eig(rho);
    double s = 0;
    for (double lam : d.eigenvalues) {
        if (lam < -1e-9) throw NotPsd("negative eigenvalue in a signal state");
        if (lam > 0) s -= lam * std::log2(lam);
    }
    return s;
}

// alpha = U sqrt(Lambda): columns of the signal's purification amplitude.
Mat purification_alpha(const Mat& rho) {
    EigenDecomposition e = hermitian_eig(rho);
    const int n = rho.rows();
    Mat alpha(n, n);
    for (int r = 0; r < n; ++r) {
        double lam = e.eigenvalues[r];
        if (lam < -1e-9) throw NotPsd("negative eigenvalue in a signal state");
        double root = lam > 0 ? std::sqrt(lam) : 0.0;
        for (int q = 0; q < n; ++q) alpha(q, r) = e.eigenvectors(q, r) * root;
    }
    return alpha;
}

// Node matrix of the signal source j: column a holds the flattened
// purification amplitude of signal a.
Mat signal_source_matrix(const Ensemble& e) {
    const int d = e.dim, n = e.size();
    Mat mj(d * d, n);
    for (int a = 0; a < n; ++a) {
        Mat alpha = purification_alpha(e.signals[a]);
        for (int q = 0; q < d; ++q)
            for (int r = 0; r < d; ++r) mj(q * d + r, a) = alpha(q, r);
    }
    return mj;
}

void append_copy_nodes(std::vector<NodeSpec>& nodes, std::vector<Mat>& mats, int d) {
    Mat mq(d, d * d), mr(d, d * d);
    for (int q = 0; q < d; ++q)
        for (int r = 0; r < d; ++r) {
            mq(q, q * d + r) = 1.0;
            mr(r, q * d + r) = 1.0;
        }
    nodes.push_back({"q", {d}, {"j"}});
    mats.push_back(std::move(mq));
    nodes.push_back({"r", {d}, {"j"}});
    mats.push_back(std::move(mr));
}

}  // namespace

double holevo(const Ensemble& e) {
    double chi = entropy_of(ensemble_avg(e));
    for (int a = 0; a < e.size(); ++a) chi -= e.weights[a] * entropy_of(e.signals[a]);
    return chi;
}

QbNet scalar_weight_net(const Ensemble& e) {
    e.check();
    const int d = e.dim, n = e.size();
    std::vector<NodeSpec> nodes;
    std::vector<Mat> mats;

    Mat ma(n, 1);
    for (int a = 0; a < n; ++a) ma(a, 0) = std::sqrt(e.weights[a]);
    nodes.push_back({"a", {n}, {}});
    mats.push_back(std::move(ma));

    nodes.push_back({"j", {d, d}, {"a"}});
    mats.push_back(signal_source_matrix(e));
    append_copy_nodes(nodes, mats, d);
    return QbNet(LabeledDag(std::move(nodes)), std::move(mats));
}

QbNet orthogonal_weight_net(const Ensemble& e) {
    e.check();
    const int d = e.dim, n = e.size();
    std::vector<NodeSpec> nodes;
    std::vector<Mat> mats;

    Mat mjm(n * n, 1);
    for (int i = 0; i < n; ++i) mjm(i * n + i, 0) = std::sqrt(e.weights[i]);
    nodes.push_back({"jm", {n, n}, {}});
    mats.push_back(std::move(mjm));

    Mat ma(n, n * n), mrm(n, n * n);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
            ma(i, i * n + k) = 1.0;
            mrm(k, i * n + k) = 1.0;
        }
    nodes.push_back({"a", {n}, {"jm"}});
    mats.push_back(std::move(ma));
    nodes.push_back({"rm", {n}, {"jm"}});
    mats.push_back(std::move(mrm));

    nodes.push_back({"j", {d, d}, {"a"}});
    mats.push_back(signal_source_matrix(e));
    append_copy_nodes(nodes, mats, d);
    return QbNet(LabeledDag(std::move(nodes)), std::move(mats));
}

DensityMatrix scalar_weight_state(const QbNet& net) {
    return NetReduction().esum({"j"}).trace({"a", "r"}).run(net);
}

DensityMatrix orthogonal_weight_state(const QbNet& net) {
    return NetReduction().esum({"jm", "j"}).trace({"rm", "r"}).run(net);
}

ChannelTable channel(const Ensemble& e, const Pom& pom) {
    e.check();
    if (pom.dim != e.dim) throw DimensionMismatch("POM dimension differs from the signals");
    ChannelTable t;
    t.prior = e.weights;
    t.cond.resize(e.size());
    for (int a = 0; a < e.size(); ++a) {
        t.cond[a].resize(pom.outcomes());
        for (int b = 0; b < pom.outcomes(); ++b)
            t.cond[a][b] = std::real((pom.elements[b] * e.signals[a]).trace());
    }
    return t;
}

std::vector<std::vector<double>> ChannelTable::posterior() const {
    const int n = int(prior.size());
    const int m = n ? int(cond[0].size()) : 0;
    std::vector<double> pb(m, 0.0);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < m; ++b) pb[b] += prior[a] * cond[a][b];
    std::vector<std::vector<double>> post(n, std::vector<double>(m, 0.0));
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < m; ++b)
            if (pb[b] > 1e-15) post[a][b] = prior[a] * cond[a][b] / pb[b];
    return post;
}

double mutual_info(const ChannelTable& t) {
    const int n = int(t.prior.size());
    const int m = n ? int(t.cond[0].size()) : 0;
    ProbTable joint;
    joint.vars = {{"a", n}, {"b", m}};
    joint.p.resize(uint64_t(n) * m);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < m; ++b) joint.p[uint64_t(a) * m + b] = t.prior[a] * t.cond[a][b];
    static const SignedJointSum kMutual = expand(parse_expr("a:b"));
    return evaluate(kMutual,
                    [&](const std::vector<std::string>& atoms) { return joint.marginal(atoms).entropy(); });
}

// ---- accessible information ---------------------------------------------------

namespace {

// Pure POM from the first d columns of an m x m unitary: outcome b gets
// v_b(q) = conj(omega(b, q)).
Pom pom_from_unitary(const Mat& omega, int d) {
    const int m = omega.rows();
    Pom p;
    p.dim = d;
    p.elements.reserve(m);
    for (int b = 0; b < m; ++b) {
        CVec v(d);
        for (int q = 0; q < d; ++q) v[q] = std::conj(omega(b, q));
        p.elements.push_back(Mat::outer(v, v));
    }
    return p;
}

struct Objective {
    const Ensemble& e;
    int d;
    double operator()(const Mat& omega) const {
        return mutual_info(channel(e, pom_from_unitary(omega, d)));
    }
};

// Left Givens rotation on rows i and j: rows (i, j) <- (c i + s e^{i phi} j,
// -s e^{-i phi} i + c j).
void apply_left_givens(Mat& omega, int i, int j, double theta, double phi) {
    double c = std::cos(theta), s = std::sin(theta);
    Cplx ph = std::polar(1.0, phi);
    for (int k = 0; k < omega.cols(); ++k) {
        Cplx a = omega(i, k), b = omega(j, k);
        omega(i, k) = c * a + s * ph * b;
        omega(j, k) = -s * std::conj(ph) * a + c * b;
    }
}

// Golden-section maximization of f over [lo, hi].
template <typename F>
std::pair<double, double> golden_max(F&& f, double lo, double hi, int iters) {
    const double gr = 0.6180339887498949;
    double a = lo, b = hi;
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int it = 0; it < iters; ++it) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = f(x1);
        }
    }
    return f1 > f2 ? std::make_pair(x1, f1) : std::make_pair(x2, f2);
}

double refine(Mat& omega, const Objective& obj, int max_sweeps) {
    const int m = omega.rows();
    double best = obj(omega);
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double sweep_start = best;
        for (int i = 0; i < m - 1; ++i) {
            for (int j = i + 1; j < m; ++j) {
                for (double phi : {0.0, M_PI / 2}) {
                    auto g = [&](double theta) {
                        Mat trial = omega;
                        apply_left_givens(trial, i, j, theta, phi);
                        return obj(trial);
                    };
                    auto [theta, val] = golden_max(g, -M_PI / 2, M_PI / 2, 24);
                    if (val > best + 1e-12) {
                        apply_left_givens(omega, i, j, theta, phi);
                        best = val;
                    }
                }
            }
        }
        if (best - sweep_start < 1e-8) break;
    }
    return best;
}

// Embeds a rank-one POM as the fixed first-d columns of an m x m unitary.
Mat unitary_from_pure_pom(const Pom& pom, int m) {
    if (pom.outcomes() > m) throw DimensionMismatch("baseline POM has too many outcomes");
    const int d = pom.dim;
    Mat omega(m, m);
    for (int b = 0; b < pom.outcomes(); ++b) {
        const Mat& f = pom.elements[b];
        EigenDecomposition e = hermitian_eig(f);
        double lam = e.eigenvalues[0];
        Mat resid = f - Mat::outer(e.eigenvectors.column(0), e.eigenvectors.column(0)).scaled(lam);
        if (resid.max_abs() > 1e-9)
            throw DomainError("baseline POM elements must have rank one");
        for (int q = 0; q < d; ++q)
            omega(b, q) = std::conj(e.eigenvectors(q, 0) * std::sqrt(std::max(lam, 0.0)));
    }
    // Lift the m x d block to a full unitary: its columns are orthonormal by
    // POM completeness.
    std::vector<bool> fixed(m, false);
    for (int q = 0; q < d; ++q) fixed[q] = true;
    orthonormal_complete(omega, fixed);
    return omega;
}

}  // namespace

AccInfoResult maximize_accessible_info(const Ensemble& e, int outcomes, int restarts,
                                       uint64_t seed, const Pom* baseline) {
    e.check();
    if (outcomes < 1) throw DomainError("need at least one outcome");
    if (outcomes < e.dim) throw DomainError("need at least dim outcomes for completeness");
    const int m = outcomes;
    Objective obj{e, e.dim};

    AccInfoResult res;
    res.value = -1;
    SplitMix64 rng(seed);

    auto consider = [&](Mat omega, int restart_index) {
        double val = refine(omega, obj, 16);
        if (val > res.value) {
            res.value = val;
            res.pom = pom_from_unitary(omega, e.dim);
            res.best_restart = restart_index;
        }
    };

    if (baseline) consider(unitary_from_pure_pom(*baseline, m), -1);
    for (int r = 0; r < restarts; ++r) consider(random_unitary(m, rng), r);
    return res;
}

// ---- full-net information chain --------------------------------------------------

bool HolevoNetReport::ok(double tol) const {
    return mutual_chain_residual <= tol && h_equals_s_residual <= tol &&
           chain_slack >= -tol && diagonal_residual <= tol && outcome_residual <= tol;
}

HolevoNetReport holevo_net_check(const Ensemble& e, const Pom& pom) {
    HolevoNetReport rep;
    rep.chi = holevo(e);

    QbNet source = orthogonal_weight_net(e);
    DensityMatrix rho0 = orthogonal_weight_state(source);
    double chi_net = s_entropy(rho0, "a:q");

    QbNet full = pom_net(pom, source, "q", DilationVariant::General);
    DensityMatrix rho_f = NetReduction()
                              .esum({"jm", "j", "q", "b", "x", "t"})
                              .trace({"rm", "r"})
                              .run(full);

    double s_all = s_entropy(rho_f, "a:(bf,qf,xf)");
    double s_ab = s_entropy(rho_f, "a:bf");
    double h_ab = h_rho(rho_f, "a:bf");

    rep.mutual_chain_residual =
        std::max(std::abs(s_all - rep.chi), std::abs(chi_net - rep.chi));
    rep.h_equals_s_residual = std::abs(h_ab - s_ab);
    rep.chain_slack = std::min(s_all - s_ab, rep.chi - h_ab);

    DensityMatrix diag_ab = partial_trace(rho_f, {"qf", "xf"});
    ChannelTable t = channel(e, pom);
    double offdiag = 0, outcome = 0;
    const int n = e.size(), mo = pom.outcomes();
    for (int i = 0; i < diag_ab.dim(); ++i)
        for (int j = 0; j < diag_ab.dim(); ++j)
            if (i != j) offdiag = std::max(offdiag, std::abs(diag_ab.matrix()(i, j)));
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < mo; ++b) {
            double expect = t.prior[a] * t.cond[a][b];
            outcome = std::max(
                outcome, std::abs(std::real(diag_ab.matrix()(a * mo + b, a * mo + b)) - expect));
        }
    rep.diagonal_residual = offdiag;
    rep.outcome_residual = outcome;
    return rep;
}

// ---- worked ensembles -------------------------------------------------------------

namespace {

CVec trine_vector(int a) {
    switch (a) {
        case 0: return {1.0, 0.0};
        case 1: return {-0.5, std::sqrt(3.0) / 2};
        default: return {-0.5, -std::sqrt(3.0) / 2};
    }
}

}  // namespace

Ensemble trine_ensemble() {
    Ensemble e;
    e.dim = 2;
    for (int a = 0; a < 3; ++a) {
        e.weights.push_back(1.0 / 3);
        CVec v = trine_vector(a);
        e.signals.push_back(Mat::outer(v, v));
    }
    return e;
}

Pom trine_pom() {
    Pom p;
    p.dim = 2;
    for (int b = 0; b < 3; ++b) {
        CVec v = trine_vector(b);
        Mat f = (Mat::identity(2) - Mat::outer(v, v)).scaled(2.0 / 3);
        p.elements.push_back(std::move(f));
    }
    return p;
}

Ensemble double_trine_ensemble() {
    Ensemble e;
    e.dim = 4;
    for (int a = 0; a < 3; ++a) {
        e.weights.push_back(1.0 / 3);
        CVec v = trine_vector(a);
        Mat single = Mat::outer(v, v);
        e.signals.push_back(kron(single, single));
    }
    return e;
}

Pom tensor_pom(const Pom& a, const Pom& b) {
    Pom p;
    p.dim = a.dim * b.dim;
    for (const auto& fa : a.elements)
        for (const auto& fb : b.elements) p.elements.push_back(kron(fa, fb));
    return p;
}

}  // namespace qbn
