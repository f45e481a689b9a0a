#include "qbn/density.hpp"

#include <algorithm>
#include <cmath>

namespace qbn {

namespace {
constexpr double kHermTol = 1e-9;
constexpr double kTraceTol = 1e-9;
constexpr double kZeroProb = 1e-12;
constexpr double kEigClip = 1e-9;

std::vector<int> axis_dims(const std::vector<Axis>& axes) {
    std::vector<int> d;
    d.reserve(axes.size());
    for (const auto& a : axes) d.push_back(a.dim);
    return d;
}

CVec average_basis_vector(int dim) {
    CVec v(dim, Cplx(1.0 / std::sqrt(double(dim))));
    return v;
}

}  // namespace

uint64_t MetaState::dim() const { return total_dim(axis_dims(axes)); }

int MetaState::axis_index(const std::string& node) const {
    for (size_t i = 0; i < axes.size(); ++i)
        if (axes[i].node == node) return int(i);
    throw UnknownAxis("unknown axis: " + node);
}

DensityMatrix::DensityMatrix(std::vector<Axis> axes, Mat m)
    : axes_(std::move(axes)), m_(std::move(m)) {
    uint64_t d = total_dim(axis_dims(axes_));
    if (!m_.square() || uint64_t(m_.rows()) != d)
        throw DimensionMismatch("density matrix shape does not match axes");
    double scale = std::max(1.0, m_.max_abs());
    if (m_.hermiticity_residual() > kHermTol * scale)
        throw NotHermitian("density matrix is not Hermitian within tolerance");
    if (std::abs(m_.trace() - Cplx(1.0)) > kTraceTol)
        throw Error("density matrix trace differs from one");
}

int DensityMatrix::axis_index(const std::string& node) const {
    for (size_t i = 0; i < axes_.size(); ++i)
        if (axes_[i].node == node) return int(i);
    throw UnknownAxis("unknown axis: " + node);
}

bool DensityMatrix::has_axis(const std::string& node) const {
    for (const auto& a : axes_)
        if (a.node == node) return true;
    return false;
}

std::vector<int> DensityMatrix::dims() const { return axis_dims(axes_); }

// ---- nets to states -------------------------------------------------------

MetaState meta_state(const QbNet& net) {
    MetaState ms;
    std::vector<int> dims;
    for (const auto& n : net.dag().nodes()) {
        ms.axes.push_back({n.name, n.dim()});
        dims.push_back(n.dim());
    }
    uint64_t total = total_dim(dims);
    if (total > kMetaVectorCap)
        throw StoryCapExceeded("net has too many stories for a dense meta state");
    ms.amplitudes.assign(total, Cplx(0));
    bool done = for_each_story(net, [&](const std::vector<int>& flat, Cplx amp) {
        uint64_t idx = 0;
        for (size_t i = 0; i < dims.size(); ++i) idx = idx * uint64_t(dims[i]) + uint64_t(flat[i]);
        ms.amplitudes[idx] += amp;
    });
    if (!done) throw StoryCapExceeded("story enumeration exceeded the cap");
    return ms;
}

DensityMatrix meta_density(const QbNet& net) {
    MetaState ms = meta_state(net);
    if (ms.dim() > kMetaMatrixCap)
        throw StoryCapExceeded("net is too large for a dense meta density matrix");
    int n = int(ms.dim());
    Mat m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = ms.amplitudes[i] * std::conj(ms.amplitudes[j]);
    return DensityMatrix(ms.axes, std::move(m));
}

// ---- operator-level reductions ---------------------------------------------

namespace {

// Strides of each axis in the flat tensor index.
std::vector<uint64_t> strides_of(const std::vector<int>& dims) {
    std::vector<uint64_t> s(dims.size(), 1);
    for (size_t i = dims.size(); i-- > 1;) s[i - 1] = s[i] * uint64_t(dims[i]);
    return s;
}

}  // namespace

DensityMatrix partial_trace(const DensityMatrix& rho, const std::set<std::string>& nodes) {
    if (nodes.empty()) return rho;
    for (const auto& n : nodes) rho.axis_index(n);  // UnknownAxis on bad names

    std::vector<Axis> kept;
    std::vector<int> kept_pos, traced_pos;
    for (size_t i = 0; i < rho.axes().size(); ++i) {
        if (nodes.count(rho.axes()[i].node)) {
            traced_pos.push_back(int(i));
        } else {
            kept.push_back(rho.axes()[i]);
            kept_pos.push_back(int(i));
        }
    }
    if (kept.empty()) throw EmptyResult("partial trace over every axis");

    std::vector<int> dims = rho.dims();
    std::vector<uint64_t> strides = strides_of(dims);
    std::vector<int> kept_dims, traced_dims;
    for (int i : kept_pos) kept_dims.push_back(dims[i]);
    for (int i : traced_pos) traced_dims.push_back(dims[i]);
    uint64_t nk = total_dim(kept_dims), nt = total_dim(traced_dims);

    // Precompute flat offsets contributed by kept and traced multi-indices.
    std::vector<uint64_t> kept_off(nk, 0), traced_off(nt, 0);
    for (uint64_t k = 0; k < nk; ++k) {
        std::vector<int> idx = unflatten_index(kept_dims, k);
        uint64_t off = 0;
        for (size_t i = 0; i < kept_pos.size(); ++i) off += strides[kept_pos[i]] * uint64_t(idx[i]);
        kept_off[k] = off;
    }
    for (uint64_t t = 0; t < nt; ++t) {
        std::vector<int> idx = unflatten_index(traced_dims, t);
        uint64_t off = 0;
        for (size_t i = 0; i < traced_pos.size(); ++i)
            off += strides[traced_pos[i]] * uint64_t(idx[i]);
        traced_off[t] = off;
    }

    Mat out(static_cast<int>(nk), static_cast<int>(nk));
    const Mat& m = rho.matrix();
    for (uint64_t r = 0; r < nk; ++r)
        for (uint64_t c = 0; c < nk; ++c) {
            Cplx s = 0;
            for (uint64_t t = 0; t < nt; ++t)
                s += m(int(kept_off[r] + traced_off[t]), int(kept_off[c] + traced_off[t]));
            out(int(r), int(c)) = s;
        }
    return DensityMatrix(std::move(kept), std::move(out));
}

Mat project_unnormalized(const DensityMatrix& rho, const std::string& node, const CVec& vec) {
    int pos = rho.axis_index(node);
    std::vector<int> dims = rho.dims();
    if (int(vec.size()) != dims[pos]) throw DimensionMismatch("projection vector dimension");

    std::vector<uint64_t> strides = strides_of(dims);
    std::vector<int> kept_dims;
    std::vector<int> kept_pos;
    for (size_t i = 0; i < dims.size(); ++i)
        if (int(i) != pos) {
            kept_dims.push_back(dims[i]);
            kept_pos.push_back(int(i));
        }
    uint64_t nk = total_dim(kept_dims);
    std::vector<uint64_t> kept_off(nk, 0);
    for (uint64_t k = 0; k < nk; ++k) {
        std::vector<int> idx = unflatten_index(kept_dims, k);
        uint64_t off = 0;
        for (size_t i = 0; i < kept_pos.size(); ++i) off += strides[kept_pos[i]] * uint64_t(idx[i]);
        kept_off[k] = off;
    }

    const Mat& m = rho.matrix();
    Mat out(static_cast<int>(nk), static_cast<int>(nk));
    for (uint64_t r = 0; r < nk; ++r)
        for (uint64_t c = 0; c < nk; ++c) {
            Cplx s = 0;
            for (int x = 0; x < dims[pos]; ++x) {
                if (vec[x] == Cplx{}) continue;
                for (int y = 0; y < dims[pos]; ++y) {
                    if (vec[y] == Cplx{}) continue;
                    s += std::conj(vec[x]) *
                         m(int(kept_off[r] + strides[pos] * uint64_t(x)),
                           int(kept_off[c] + strides[pos] * uint64_t(y))) *
                         vec[y];
                }
            }
            out(int(r), int(c)) = s;
        }
    return out;
}

DensityMatrix project_reduce(const DensityMatrix& rho, const std::string& node, const CVec& vec) {
    if (norm2(vec) < kZeroProb) throw ZeroProbability("projection vector is zero");
    if (rho.axes().size() == 1) throw EmptyResult("projection would remove the only axis");
    Mat out = project_unnormalized(rho, node, vec);
    double k = std::real(out.trace());
    if (k < kZeroProb) throw ZeroProbability("projection has zero probability");
    std::vector<Axis> kept;
    for (const auto& a : rho.axes())
        if (a.node != node) kept.push_back(a);
    return DensityMatrix(std::move(kept), out.scaled(1.0 / k));
}

DensityMatrix esum(const DensityMatrix& rho, const std::set<std::string>& nodes) {
    DensityMatrix cur = rho;
    // Axes are distinct, so the application order is immaterial.
    for (const auto& n : nodes) {
        int d = cur.axes()[cur.axis_index(n)].dim;
        cur = project_reduce(cur, n, average_basis_vector(d));
    }
    return cur;
}

// ---- net-level reduction -----------------------------------------------------

NetReduction& NetReduction::esum(const std::vector<std::string>& nodes) {
    for (const auto& n : nodes) contractions_[n] = CVec();  // filled at run time
    return *this;
}

NetReduction& NetReduction::trace(const std::vector<std::string>& nodes) {
    for (const auto& n : nodes) traced_.insert(n);
    return *this;
}

NetReduction& NetReduction::project(const std::string& node, CVec vec) {
    contractions_[node] = std::move(vec);
    return *this;
}

NetReduction& NetReduction::project_state(const std::string& node, int flat_state) {
    contractions_[node] = CVec();  // resolved at run time against the node dimension
    project_markers_[node] = flat_state;
    return *this;
}

MetaState NetReduction::raw_vector(const QbNet& net) const {
    const LabeledDag& dag = net.dag();
    for (const auto& [name, vec] : contractions_) dag.index_of(name);
    for (const auto& name : traced_) dag.index_of(name);

    // Resolve contraction coefficients per node (conjugated projection vector).
    std::vector<CVec> coeff(dag.size());
    std::vector<bool> contracted(dag.size(), false);
    for (const auto& [name, vec] : contractions_) {
        int i = dag.index_of(name);
        if (traced_.count(name)) throw Error("node " + name + " both contracted and traced");
        int d = dag.node(i).dim();
        CVec c;
        auto marker = project_markers_.find(name);
        if (marker != project_markers_.end()) {
            if (marker->second < 0 || marker->second >= d)
                throw DimensionMismatch("projection state out of range for " + name);
            c.assign(d, Cplx(0));
            c[marker->second] = 1.0;
        } else if (vec.empty()) {
            c = average_basis_vector(d);
        } else {
            if (int(vec.size()) != d) throw DimensionMismatch("projection vector for " + name);
            c = vec;
        }
        for (auto& v : c) v = std::conj(v);
        coeff[i] = std::move(c);
        contracted[i] = true;
    }

    MetaState out;
    std::vector<int> kept_dims;
    std::vector<int> kept_of_node(dag.size(), -1);
    for (int i = 0; i < dag.size(); ++i) {
        if (contracted[i]) continue;
        kept_of_node[i] = int(out.axes.size());
        out.axes.push_back({dag.node(i).name, dag.node(i).dim()});
        kept_dims.push_back(dag.node(i).dim());
    }
    uint64_t nk = total_dim(kept_dims);
    if (nk > kMetaVectorCap) throw StoryCapExceeded("reduction output exceeds the story cap");
    out.amplitudes.assign(nk, Cplx(0));

    bool done = for_each_story(net, [&](const std::vector<int>& flat, Cplx amp) {
        Cplx w = amp;
        uint64_t idx = 0;
        for (int i = 0; i < dag.size(); ++i) {
            if (contracted[i]) {
                w *= coeff[i][flat[i]];
            } else {
                idx = idx * uint64_t(dag.node(i).dim()) + uint64_t(flat[i]);
            }
        }
        if (w != Cplx{}) out.amplitudes[idx] += w;
    });
    if (!done) throw StoryCapExceeded("story enumeration exceeded the cap");
    return out;
}

DensityMatrix NetReduction::run(const QbNet& net) const {
    MetaState v = raw_vector(net);
    double nn = norm2(v.amplitudes);
    if (nn * nn < kZeroProb) throw ZeroProbability("reduction has zero probability");
    uint64_t n = v.dim();
    if (n * n > (uint64_t(1) << 24))
        throw StoryCapExceeded("reduced operator would be too large");
    Mat m(static_cast<int>(n), static_cast<int>(n));
    for (uint64_t i = 0; i < n; ++i)
        for (uint64_t j = 0; j < n; ++j)
            m(int(i), int(j)) = v.amplitudes[i] * std::conj(v.amplitudes[j]) / (nn * nn);
    DensityMatrix rho(v.axes, std::move(m));
    if (!traced_.empty()) rho = partial_trace(rho, traced_);
    return rho;
}

DensityMatrix rho_out(const QbNet& net) {
    NodeClassification cls = classify_nodes(net.dag());
    if (cls.external.empty()) throw EmptyResult("net has no external nodes");
    std::vector<std::string> internal;
    for (int i : cls.internal) internal.push_back(net.dag().node(i).name);
    return NetReduction().esum(internal).run(net);
}

// ---- spectra and entropies ---------------------------------------------------

EigenDecomposition eigensystem(const DensityMatrix& rho) { return hermitian_eig(rho.matrix()); }

namespace {

double entropy_of_eigenvalues(const std::vector<double>& lam) {
    double s = 0;
    for (double l : lam) {
        if (l < -kEigClip) throw NotPsd("density matrix has a negative eigenvalue");
        if (l > 0) s -= l * std::log2(l);
    }
    return s;
}

double entropy_of_distribution(const std::vector<double>& p) {
    double s = 0;
    for (double v : p) {
        if (v > 0) s -= v * std::log2(v);
    }
    return s;
}

DensityMatrix reduce_onto(const DensityMatrix& rho, const std::vector<std::string>& gamma) {
    std::set<std::string> keep(gamma.begin(), gamma.end());
    for (const auto& g : gamma) rho.axis_index(g);
    std::set<std::string> drop;
    for (const auto& a : rho.axes())
        if (!keep.count(a.node)) drop.insert(a.node);
    return drop.empty() ? rho : partial_trace(rho, drop);
}

}  // namespace

double von_neumann_entropy(const DensityMatrix& rho) {
    return entropy_of_eigenvalues(eigensystem(rho).eigenvalues);
}

double s_entropy(const DensityMatrix& rho, const EntropyExpr& expr) {
    SignedJointSum sum = expand(expr);
    return evaluate(sum, [&](const std::vector<std::string>& atoms) {
        return von_neumann_entropy(reduce_onto(rho, atoms));
    });
}

double s_entropy(const DensityMatrix& rho, const std::string& expr) {
    return s_entropy(rho, parse_expr(expr));
}

std::vector<double> diag_distribution(const DensityMatrix& rho,
                                      const std::vector<std::string>& gamma) {
    DensityMatrix r = reduce_onto(rho, gamma);
    // Diagonal in declaration order of the surviving axes.
    std::vector<double> p(r.dim());
    for (int i = 0; i < r.dim(); ++i) p[i] = std::real(r.matrix()(i, i));
    return p;
}

double h_rho(const DensityMatrix& rho, const EntropyExpr& expr) {
    SignedJointSum sum = expand(expr);
    return evaluate(sum, [&](const std::vector<std::string>& atoms) {
        return entropy_of_distribution(diag_distribution(rho, atoms));
    });
}

double h_rho(const DensityMatrix& rho, const std::string& expr) {
    return h_rho(rho, parse_expr(expr));
}

double coherence(const DensityMatrix& rho, const std::vector<std::string>& nodes) {
    EntropyExpr e = EntropyExpr::joint(nodes);
    return h_rho(rho, e) - s_entropy(rho, e);
}

// ---- mixed states --------------------------------------------------------------

MetaState purify(const DensityMatrix& rho, const std::string& ancilla_name) {
    if (rho.has_axis(ancilla_name))
        throw Error("ancilla axis name collides with an existing axis");
    EigenDecomposition e = eigensystem(rho);
    int n = rho.dim();
    // alpha = U sqrt(Lambda); psi(q, r) = alpha(q, r)
    MetaState psi;
    psi.axes = rho.axes();
    psi.axes.push_back({ancilla_name, n});
    psi.amplitudes.assign(uint64_t(n) * n, Cplx(0));
    for (int r = 0; r < n; ++r) {
        double lam = e.eigenvalues[r];
        if (lam < -kEigClip) throw NotPsd("density matrix has a negative eigenvalue");
        double root = lam > 0 ? std::sqrt(lam) : 0.0;
        for (int q = 0; q < n; ++q)
            psi.amplitudes[uint64_t(q) * n + r] = e.eigenvectors(q, r) * root;
    }
    return psi;
}

QbNet mixed_state_net(const Mat& beta) {
    if (!beta.square()) throw NotHermitian("mixed state matrix is not square");
    double scale = std::max(1.0, beta.max_abs());
    if (beta.hermiticity_residual() > kHermTol * scale)
        throw NotHermitian("mixed state matrix is not Hermitian");
    const int n = beta.rows();
    EigenDecomposition e = hermitian_eig(beta);
    Mat alpha(n, n);
    for (int r = 0; r < n; ++r) {
        double lam = e.eigenvalues[r];
        if (lam < -kEigClip) throw NotPsd("mixed state matrix has a negative eigenvalue");
        double root = lam > 0 ? std::sqrt(lam) : 0.0;
        for (int q = 0; q < n; ++q) alpha(q, r) = e.eigenvectors(q, r) * root;
    }

    std::vector<NodeSpec> nodes = {
        {"j", {n, n}, {}},
        {"q", {n}, {"j"}},
        {"r", {n}, {"j"}},
    };
    Mat mj(n * n, 1);
    for (int q = 0; q < n; ++q)
        for (int r = 0; r < n; ++r) mj(q * n + r, 0) = alpha(q, r);
    Mat mq(n, n * n), mr(n, n * n);
    for (int q = 0; q < n; ++q)
        for (int r = 0; r < n; ++r) {
            mq(q, q * n + r) = 1.0;
            mr(r, q * n + r) = 1.0;
        }
    return QbNet(LabeledDag(std::move(nodes)), {std::move(mj), std::move(mq), std::move(mr)});
}

}  // namespace qbn
