#include "ncindex/specflow.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>

#include "ncindex/errors.hpp"

namespace ncindex {

namespace {

constexpr double kMinStep = 1e-6;

double hermitian_defect(const MatrixXc& a) { return a.size() == 0 ? 0.0 : (a - a.adjoint()).cwiseAbs().maxCoeff(); }

Eigen::VectorXd eigenvalues(const MatrixXc& a) {
    if (hermitian_defect(a) > 1e-10) throw PreconditionViolation("path sample is not self-adjoint");
    return Eigen::SelfAdjointEigenSolver<MatrixXc>(a, Eigen::EigenvaluesOnly).eigenvalues();
}

double weight_of(const Eigen::VectorXcd& v, const std::vector<double>& w) {
    if (w.empty()) return 1.0;
    double s = 0;
    for (int k = 0; k < v.size(); ++k) s += w[k] * std::norm(v[k]);
    return s;
}

}  // namespace

SelfAdjointPath SelfAdjointPath::linear(const MatrixXc& a, const MatrixXc& b, double crossing_threshold) {
    SelfAdjointPath p;
    p.at = [a, b](double t) -> MatrixXc { return (1 - t) * a + t * b; };
    p.crossing_threshold = crossing_threshold;
    return p;
}

SelfAdjointPath SelfAdjointPath::reversed() const {
    SelfAdjointPath p = *this;
    p.at = [f = at](double t) { return f(1 - t); };
    return p;
}

SelfAdjointPath concatenate(const SelfAdjointPath& a, const SelfAdjointPath& b) {
    SelfAdjointPath p = a;
    p.at = [fa = a.at, fb = b.at](double t) { return t < 0.5 ? fa(2 * t) : fb(2 * t - 1); };
    p.crossing_threshold = std::min(a.crossing_threshold, b.crossing_threshold);
    p.initial_samples = a.initial_samples + b.initial_samples;
    return p;
}

SpectralFlowReport spectral_flow_report(const SelfAdjointPath& path) {
    const double delta = path.crossing_threshold;
    if (!(delta > 0)) throw PreconditionViolation("crossing threshold must be positive");
    SpectralFlowReport r;
    auto endpoint = [&](double t) {
        Eigen::VectorXd e = eigenvalues(path.at(t));
        if (e.size() > 0 && e.cwiseAbs().minCoeff() < delta)
            throw EndpointDegenerate("endpoint t=" + std::to_string(t) + " has an eigenvalue within " +
                                     std::to_string(delta) + " of zero");
        return e;
    };

    std::function<void(double, const Eigen::VectorXd&, double, const Eigen::VectorXd&)> sweep =
        [&](double a, const Eigen::VectorXd& ea, double b, const Eigen::VectorXd& eb) {
            if ((ea - eb).cwiseAbs().maxCoeff() > delta / 2) {
                if (b - a < 2 * kMinStep)
                    throw CrossingUnresolved("eigenvalues still move more than delta_c/2 on a step of " +
                                             std::to_string(b - a));
                const double m = 0.5 * (a + b);
                const Eigen::VectorXd em = eigenvalues(path.at(m));
                sweep(a, ea, m, em);
                sweep(m, em, b, eb);
                return;
            }
            ++r.intervals;
            r.min_step = std::min(r.min_step, b - a);
            std::vector<int> up, down;
            for (int i = 0; i < ea.size(); ++i) {
                if (ea[i] < 0 && eb[i] >= 0) up.push_back(i);
                if (ea[i] >= 0 && eb[i] < 0) down.push_back(i);
            }
            if (up.empty() && down.empty()) return;
            Eigen::SelfAdjointEigenSolver<MatrixXc> es;
            if (!path.weights.empty()) es.compute(path.at(b));
            auto w = [&](int i) { return path.weights.empty() ? 1.0 : weight_of(es.eigenvectors().col(i), path.weights); };
            for (int i : up) {
                r.weighted += w(i);
                ++r.up_crossings;
            }
            for (int i : down) {
                r.weighted -= w(i);
                ++r.down_crossings;
            }
            r.crossing_times.push_back(0.5 * (a + b));
        };

    const int n = std::max(1, path.initial_samples);
    Eigen::VectorXd prev = endpoint(0.0);
    const Eigen::VectorXd last = endpoint(1.0);
    for (int j = 1; j <= n; ++j) {
        const double a = double(j - 1) / n, b = double(j) / n;
        const Eigen::VectorXd cur = j == n ? last : eigenvalues(path.at(b));
        if (cur.size() != prev.size()) throw PreconditionViolation("path changes dimension");
        sweep(a, prev, b, cur);
        prev = cur;
    }
    r.value = static_cast<int>(std::lround(r.weighted));
    return r;
}

int spectral_flow(const SelfAdjointPath& path) { return spectral_flow_report(path).value; }

namespace {

MatrixXc range_basis(const MatrixXc& P) {
    const double res = std::max((P * P - P).cwiseAbs().maxCoeff(), hermitian_defect(P));
    if (res > 1e-8) throw NotAProjection("projection residual " + std::to_string(res));
    Eigen::SelfAdjointEigenSolver<MatrixXc> es(P);
    std::vector<int> cols;
    for (int i = 0; i < es.eigenvalues().size(); ++i)
        if (es.eigenvalues()[i] > 0.5) cols.push_back(i);
    MatrixXc B(P.rows(), cols.size());
    for (size_t j = 0; j < cols.size(); ++j) B.col(j) = es.eigenvectors().col(cols[j]);
    return B;
}

}  // namespace

RelativeIndexReport relative_index_report(const MatrixXc& P, const MatrixXc& Q, double eps,
                                          const std::vector<double>& weights) {
    if (P.rows() != Q.rows()) throw PreconditionViolation("projections act on different spaces");
    const MatrixXc Bp = range_basis(P), Bq = range_basis(Q);
    const MatrixXc M = Bq.adjoint() * Bp;
    RelativeIndexReport r;
    const int rp = Bp.cols(), rq = Bq.cols();
    Eigen::VectorXd s;
    MatrixXc Ul = MatrixXc::Identity(rq, rq), Vr = MatrixXc::Identity(rp, rp);
    if (rp > 0 && rq > 0) {
        Eigen::BDCSVD<MatrixXc> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
        s = svd.singularValues();
        Ul = svd.matrixU();
        Vr = svd.matrixV();
    }
    for (int i = 0; i < s.size(); ++i)
        if (s[i] >= eps && s[i] < 10 * eps)
            throw IllConditioned("singular value " + std::to_string(s[i]) + " within 10x of the kernel threshold");
    auto small = [&](int i) { return i >= s.size() || s[i] < eps; };
    for (int i = 0; i < rp; ++i)
        if (small(i)) {
            ++r.kernel;
            r.weighted += weight_of(Bp * Vr.col(i), weights);
        }
    for (int i = 0; i < rq; ++i)
        if (small(i)) {
            ++r.cokernel;
            r.weighted -= weight_of(Bq * Ul.col(i), weights);
        }
    r.value = weights.empty() ? r.kernel - r.cokernel : static_cast<int>(std::lround(r.weighted));
    return r;
}

int relative_index(const MatrixXc& P, const MatrixXc& Q, double eps) { return relative_index_report(P, Q, eps).value; }

ChiTriple ChiTriple::standard(int grid_size) {
    const Eigen::ArrayXd x = ManifoldGrid::circle(grid_size).coordinate(0);
    auto step = [](const Eigen::ArrayXd& t) {
        return mollifier_step(Field::variable(t.cast<cplx>(), 0)).values().real().eval();
    };
    ChiTriple c;
    c.chi0 = 1.0 - step((x - 0.1) / 0.25);
    c.chi2 = step((x - 0.65) / 0.25);
    c.chi1 = (1.0 - (c.chi0 + c.chi2).square()).max(0.0).sqrt();
    return c;
}

double ChiTriple::partition_residual() const {
    return (chi1.square() + (chi0 + chi2).square() - 1.0).abs().maxCoeff();
}

double ChiTriple::overlap_residual() const { return (chi0 * chi2).abs().maxCoeff(); }

std::vector<MatrixXc> pu_projection(const std::vector<MatrixXc>& u, const ChiTriple& chi) {
    const int pts = chi.chi0.size();
    if (u.empty() || (u.size() != 1 && int(u.size()) != pts))
        throw PreconditionViolation("need one unitary or one per grid point");
    const int n = u[0].rows();
    for (const auto& m : u) {
        const double res = (m.adjoint() * m - MatrixXc::Identity(n, n)).cwiseAbs().maxCoeff();
        if (res > 1e-8) throw NotUnitary("U* U deviates from 1 by " + std::to_string(res));
    }
    const MatrixXc I = MatrixXc::Identity(n, n);
    std::vector<MatrixXc> out;
    out.reserve(pts);
    for (int p = 0; p < pts; ++p) {
        const MatrixXc& U = u.size() == 1 ? u[0] : u[p];
        const double c0 = chi.chi0[p], c1 = chi.chi1[p], c2 = chi.chi2[p];
        MatrixXc P(2 * n, 2 * n);
        P.topLeftCorner(n, n) = c1 * c1 * I;
        P.topRightCorner(n, n) = c1 * (c0 * I + c2 * U);
        P.bottomLeftCorner(n, n) = c1 * (c0 * I + c2 * U.adjoint());
        P.bottomRightCorner(n, n) = (c0 + c2) * (c0 + c2) * I;
        out.push_back(std::move(P));
    }
    return out;
}

double pu_projection_residual(const std::vector<MatrixXc>& p) {
    double r = 0;
    for (const auto& m : p) r = std::max({r, (m * m - m).cwiseAbs().maxCoeff(), hermitian_defect(m)});
    return r;
}

MatrixXc truncated_dirac(int fourier_cutoff) {
    Eigen::VectorXcd d(2 * fourier_cutoff + 1);
    for (int k = -fourier_cutoff; k <= fourier_cutoff; ++k) d[k + fourier_cutoff] = double(k);
    return d.asDiagonal();
}

MatrixXc mode_shift(int fourier_cutoff, int m) {
    const int n = 2 * fourier_cutoff + 1;
    MatrixXc U = MatrixXc::Zero(n, n);
    for (int i = 0; i < n; ++i) U(((i - m) % n + n) % n, i) = 1.0;
    return U;
}

std::vector<double> interior_weights(int fourier_cutoff, double margin) {
    std::vector<double> w;
    for (int k = -fourier_cutoff; k <= fourier_cutoff; ++k)
        w.push_back(std::abs(k) <= (1 - margin) * fourier_cutoff ? 1.0 : 0.0);
    return w;
}

OddIndexReport compare_odd_index(const MatrixXc& D, const MatrixXc& U, const MatrixXc& A,
                                 const std::vector<double>& weights, double crossing_threshold, double eps) {
    const MatrixXc H0 = D + A;
    Eigen::SelfAdjointEigenSolver<MatrixXc> es(H0);
    if (hermitian_defect(H0) > 1e-10 || es.eigenvalues().cwiseAbs().minCoeff() < 1e-12)
        throw PreconditionViolation("D + A must be self-adjoint and invertible");
    const MatrixXc H1 = U * H0 * U.adjoint();

    SelfAdjointPath path = SelfAdjointPath::linear(H0, H1, crossing_threshold);
    path.weights = weights;
    const auto sf = spectral_flow_report(path);

    Eigen::VectorXd nonneg = (es.eigenvalues().array() >= 0).cast<double>();
    const MatrixXc P = es.eigenvectors() * nonneg.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
    const MatrixXc Q = U * P * U.adjoint();
    const auto ri = relative_index_report(P, Q, eps, weights);

    OddIndexReport r;
    r.spectral_flow = sf.value;
    r.spectral_flow_weighted = sf.weighted;
    r.relative_index = ri.value;
    r.relative_index_weighted = ri.weighted;
    r.orientation = kOddIndexOrientation;
    r.match = r.relative_index == r.orientation * r.spectral_flow &&
              std::abs(sf.weighted - sf.value) <= 0.1 && std::abs(ri.weighted - ri.value) <= 0.1;
    return r;
}

}  // namespace ncindex
