#include "qbn/measure.hpp"

#include <algorithm>
#include <cmath>

namespace qbn {

PomReport validate_pom(const Pom& pom) {
    PomReport rep;
    Mat sum(pom.dim, pom.dim);
    rep.min_eigenvalue = pom.elements.empty() ? -1.0 : 1e300;
    for (const auto& f : pom.elements) {
        if (f.rows() != pom.dim || f.cols() != pom.dim)
            throw DimensionMismatch("POM element dimension mismatch");
        rep.hermiticity_residual = std::max(rep.hermiticity_residual, f.hermiticity_residual());
        Mat sym = f + f.adjoint();
        EigenDecomposition e = hermitian_eig(sym.scaled(0.5), 1e300);
        rep.min_eigenvalue = std::min(rep.min_eigenvalue, e.eigenvalues.back());
        sum = sum + f;
    }
    Mat delta = sum - Mat::identity(pom.dim);
    rep.completeness_residual = delta.max_abs();
    return rep;
}

PomClass classify_pom(const Pom& pom) {
    PomClass c;
    c.orthogonal = true;
    for (size_t i = 0; i < pom.elements.size() && c.orthogonal; ++i)
        for (size_t j = 0; j < pom.elements.size(); ++j) {
            if (i == j) continue;
            if ((pom.elements[i] * pom.elements[j]).frobenius() > 1e-9) {
                c.orthogonal = false;
                break;
            }
        }
    c.pure = true;
    for (const auto& f : pom.elements) {
        bool projector = (f * f - f).max_abs() < 1e-9;
        bool rank1 = std::abs(f.trace() - Cplx(1.0)) < 1e-9;
        if (!(projector && rank1)) {
            c.pure = false;
            break;
        }
    }
    c.von_neumann = c.orthogonal && c.pure;
    return c;
}

ProbTable measure_probs(const DensityMatrix& rho, const Pom& pom) {
    if (rho.axes().size() != 1 || rho.dim() != pom.dim)
        throw DimensionMismatch("measurement needs a single-axis state of the POM dimension");
    ProbTable out;
    out.vars = {{"b", pom.outcomes()}};
    out.p.resize(pom.outcomes());
    for (int b = 0; b < pom.outcomes(); ++b)
        out.p[b] = std::real((rho.matrix() * pom.elements[b]).trace());
    return out;
}

// Orthonormal completion of the given columns by modified Gram-Schmidt over
// canonical basis seeds, skipping seeds with residual below 1e-10.
void orthonormal_complete(Mat& u, const std::vector<bool>& fixed) {
    const int n = u.rows();
    std::vector<CVec> basis;
    for (int j = 0; j < n; ++j)
        if (fixed[j]) basis.push_back(u.column(j));

    int seed = 0;
    for (int j = 0; j < n; ++j) {
        if (fixed[j]) continue;
        CVec col;
        for (; seed <= n; ++seed) {
            if (seed == n) throw NotUnitarizable("orthonormal completion failed");
            col.assign(n, Cplx(0));
            col[seed] = 1.0;
            for (const auto& b : basis) {
                Cplx c = dot(b, col);
                for (int i = 0; i < n; ++i) col[i] -= c * b[i];
            }
            double r = norm2(col);
            if (r >= 1e-10) {
                for (int i = 0; i < n; ++i) col[i] /= r;
                ++seed;
                break;
            }
        }
        u.set_column(j, col);
        basis.push_back(std::move(col));
    }
}

Mat dilation_unitary(const Pom& pom, DilationVariant variant) {
    PomReport rep = validate_pom(pom);
    if (!rep.ok()) throw NotPsd("dilation needs a valid POM");
    const int d = pom.dim;
    const int m = pom.outcomes();
    if (variant == DilationVariant::OrthogonalProjector) {
        PomClass c = classify_pom(pom);
        if (!c.orthogonal || !c.pure) {
            // orthogonal projectors need not be rank one; accept any
            // orthogonal POM of projectors
            bool projectors = true;
            for (const auto& f : pom.elements)
                projectors = projectors && (f * f - f).max_abs() < 1e-9;
            if (!(c.orthogonal && projectors))
                throw NotUnitarizable(
                    "orthogonal-projector dilation needs orthogonal projector elements");
        }
    }

    std::vector<Mat> roots;
    roots.reserve(m);
    for (const auto& f : pom.elements) roots.push_back(sqrt_psd(f));

    if (variant == DilationVariant::OrthogonalProjector) {
        // space q (dim d) tensor b (dim m); input column (q, b=0)
        const int n = d * m;
        Mat u(n, n);
        std::vector<bool> fixed(n, false);
        for (int q = 0; q < d; ++q) {
            int col = q * m + 0;
            for (int bf = 0; bf < m; ++bf)
                for (int qf = 0; qf < d; ++qf) u(qf * m + bf, col) = roots[bf](qf, q);
            fixed[col] = true;
        }
        orthonormal_complete(u, fixed);
        return u;
    }

    // general: space q tensor b tensor x (dims d, m, m); input column (q, 0, 0)
    const int n = d * m * m;
    Mat u(n, n);
    std::vector<bool> fixed(n, false);
    for (int q = 0; q < d; ++q) {
        int col = (q * m + 0) * m + 0;
        for (int bf = 0; bf < m; ++bf)
            for (int qf = 0; qf < d; ++qf) u((qf * m + bf) * m + bf, col) = roots[bf](qf, q);
        fixed[col] = true;
    }
    orthonormal_complete(u, fixed);
    return u;
}

QbNet pom_net(const Pom& pom, const QbNet& prep, const std::string& q, DilationVariant variant) {
    int qi = prep.dag().index_of(q);
    if (prep.dag().node(qi).dim() != pom.dim)
        throw DimensionMismatch("POM dimension differs from the measured node");
    const int d = pom.dim;
    const int m = pom.outcomes();
    bool general = variant == DilationVariant::General;

    for (const char* name : {"b", "x", "t", "qf", "bf", "xf"})
        if (prep.dag().has_node(name))
            throw Error(std::string("preparation net already uses node name ") + name);

    std::vector<NodeSpec> nodes = prep.dag().nodes();
    std::vector<Mat> mats;
    for (int i = 0; i < prep.size(); ++i) mats.push_back(prep.matrix(i));

    Mat pointer0(m, 1);
    pointer0(0, 0) = 1.0;
    nodes.push_back({"b", {m}, {}});
    mats.push_back(pointer0);
    if (general) {
        nodes.push_back({"x", {m}, {}});
        mats.push_back(pointer0);
    }

    Mat u = dilation_unitary(pom, variant);
    if (general) {
        nodes.push_back({"t", {d, m, m}, {q, "b", "x"}});
    } else {
        nodes.push_back({"t", {d, m}, {q, "b"}});
    }
    mats.push_back(u);

    // copies of the components of t
    int tdim = general ? d * m * m : d * m;
    Mat mqf(d, tdim), mbf(m, tdim), mxf(m, tdim);
    for (int t = 0; t < tdim; ++t) {
        int x_part = general ? t % m : 0;
        int b_part = general ? (t / m) % m : t % m;
        int q_part = general ? t / (m * m) : t / m;
        mqf(q_part, t) = 1.0;
        mbf(b_part, t) = 1.0;
        if (general) mxf(x_part, t) = 1.0;
    }
    nodes.push_back({"qf", {d}, {"t"}});
    mats.push_back(std::move(mqf));
    nodes.push_back({"bf", {m}, {"t"}});
    mats.push_back(std::move(mbf));
    if (general) {
        nodes.push_back({"xf", {m}, {"t"}});
        mats.push_back(std::move(mxf));
    }
    return QbNet(LabeledDag(std::move(nodes)), std::move(mats));
}

DensityMatrix pom_net_outcome(const QbNet& net) {
    NodeClassification cls = classify_nodes(net.dag());
    std::vector<std::string> esums, traces;
    for (int i : cls.internal) esums.push_back(net.dag().node(i).name);
    for (int i : cls.external) {
        const std::string& n = net.dag().node(i).name;
        if (n != "bf") traces.push_back(n);
    }
    return NetReduction().esum(esums).trace(traces).run(net);
}

}  // namespace qbn
