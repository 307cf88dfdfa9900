#include "ncindex/toeplitz.hpp"

#include <Eigen/SVD>
#include <unsupported/Eigen/FFT>
#include <cmath>
#include <limits>

#include "ncindex/errors.hpp"

namespace ncindex {

// ---------------------------------------------------------------------------
// C(S^1) with rotation.

CircleFunctions::CircleFunctions(int grid_size) : grid_(ManifoldGrid::circle(grid_size)) {}

CircleFunctions::Function CircleFunctions::character(int m) {
    return [m](const Field& x) { return (x * cplx(0, -2 * kPi * m)).exp(); };
}

CircleFunctions::Function CircleFunctions::perturbed_character(int m, double a) {
    return [m, a](const Field& x) {
        const Field phase = x * (-2 * kPi * m) + (x * (2 * kPi)).sin() * a;
        return (phase * cplx(0, 1)).exp();
    };
}

Eigen::ArrayXcd CircleFunctions::alpha(const Function& f, double t) const {
    const Eigen::ArrayXcd x = (grid_.coordinate(0) + t).cast<cplx>();
    return f(Field::variable(x, 0)).values();
}

Eigen::ArrayXcd CircleFunctions::delta(const Function& f) const {
    const Eigen::ArrayXcd x = grid_.coordinate(0).cast<cplx>();
    return f(Field::variable(x, 1)).coefficients().col(1);
}

cplx CircleFunctions::trace(const Eigen::ArrayXcd& values) const { return values.sum() * grid_.weight(); }

double CircleFunctions::derivation_residual(const Function& f, const Function& g) const {
    const Function fg = [f, g](const Field& x) { return f(x) * g(x); };
    const Eigen::ArrayXcd lhs = delta(fg);
    const Eigen::ArrayXcd rhs = delta(f) * alpha(g, 0) + alpha(f, 0) * delta(g);
    return (lhs - rhs).abs().maxCoeff();
}

double CircleFunctions::invariance_residual(const Function& f, const std::vector<double>& ts) const {
    const cplx base = trace(alpha(f, 0));
    double r = 0;
    for (double t : ts) r = std::max(r, std::abs(trace(alpha(f, t)) - base));
    return r;
}

// ---------------------------------------------------------------------------
// Rational rotation algebra.

RotationAlgebra::RotationAlgebra(int p, int q) : p_(p), q_(q), lambda_(std::polar(1.0, 2 * kPi * p / q)) {
    if (q < 1) throw PreconditionViolation("rotation algebra needs q >= 1");
}

RotationAlgebra::Element RotationAlgebra::monomial(int m, int n, cplx c) { return {{{m, n}, c}}; }

namespace {

void accumulate(RotationAlgebra::Element& e, std::pair<int, int> key, cplx c) {
    auto [it, inserted] = e.try_emplace(key, c);
    if (!inserted) it->second += c;
    if (it->second == cplx{}) e.erase(it);
}

MatrixXc unitary_power(const MatrixXc& a, int k) {
    const MatrixXc base = k >= 0 ? a : MatrixXc(a.adjoint());
    MatrixXc r = MatrixXc::Identity(a.rows(), a.cols());
    for (int i = 0; i < std::abs(k); ++i) r = r * base;
    return r;
}

}  // namespace

RotationAlgebra::Element RotationAlgebra::multiply(const Element& a, const Element& b) const {
    Element out;
    for (const auto& [ka, ca] : a)
        for (const auto& [kb, cb] : b) {
            // (U^a V^b)(U^c V^d) = lambda^{-bc} U^{a+c} V^{b+d}
            const cplx tw = std::pow(lambda_, -double(ka.second) * kb.first);
            accumulate(out, {ka.first + kb.first, ka.second + kb.second}, ca * cb * tw);
        }
    return out;
}

RotationAlgebra::Element RotationAlgebra::star(const Element& a) const {
    Element out;
    for (const auto& [k, c] : a)
        accumulate(out, {-k.first, -k.second}, std::conj(c) * std::pow(lambda_, -double(k.first) * k.second));
    return out;
}

RotationAlgebra::Element RotationAlgebra::delta(const Element& a) const {
    Element out;
    for (const auto& [k, c] : a) accumulate(out, k, c * cplx(0, 2 * kPi * k.second));
    return out;
}

RotationAlgebra::Element RotationAlgebra::alpha(const Element& a, double t) const {
    Element out;
    for (const auto& [k, c] : a) accumulate(out, k, c * std::polar(1.0, 2 * kPi * k.second * t));
    return out;
}

RotationAlgebra::Element RotationAlgebra::add(const Element& a, const Element& b, cplx s) const {
    Element out = a;
    for (const auto& [k, c] : b) accumulate(out, k, s * c);
    return out;
}

MatrixXc RotationAlgebra::represent(const Element& a) const {
    MatrixXc clock = MatrixXc::Zero(q_, q_), shift = MatrixXc::Zero(q_, q_);
    for (int j = 0; j < q_; ++j) {
        clock(j, j) = std::pow(lambda_, double(j));
        shift((j + 1) % q_, j) = 1.0;
    }
    MatrixXc r = MatrixXc::Zero(q_, q_);
    for (const auto& [k, c] : a) r += c * unitary_power(clock, k.first) * unitary_power(shift, k.second);
    return r;
}

cplx RotationAlgebra::trace(const Element& a) const {
    const auto it = a.find({0, 0});
    return it == a.end() ? cplx{} : it->second;
}

double RotationAlgebra::derivation_residual(const Element& a, const Element& b) const {
    const MatrixXc lhs = represent(delta(multiply(a, b)));
    const MatrixXc rhs = represent(delta(a)) * represent(b) + represent(a) * represent(delta(b));
    return (lhs - rhs).cwiseAbs().maxCoeff();
}

double RotationAlgebra::trace_residual(const Element& a, const Element& b) const {
    return std::abs(trace(multiply(a, b)) - trace(multiply(b, a)));
}

double RotationAlgebra::invariance_residual(const Element& a, const std::vector<double>& ts) const {
    const cplx base = trace(a);
    double r = 0;
    for (double t : ts) r = std::max(r, std::abs(trace(alpha(a, t)) - base));
    return r;
}

// ---------------------------------------------------------------------------
// Assembly and index.

namespace {

constexpr double kModeFloor = 1e-12;

MatrixXc assemble_blocks(const std::map<int, MatrixXc>& modes, int fc, int q) {
    const int size = (fc + 1) * q;
    MatrixXc T = MatrixXc::Zero(size, size);
    for (const auto& [n, block] : modes)
        for (int l = 0; l <= fc; ++l) {
            const int k = l + n;
            if (k < 0 || k > fc) continue;
            T.block(k * q, l * q, q, q) = block;
        }
    return T;
}

}  // namespace

ToeplitzProblem assemble_toeplitz(const CircleFunctions& sys, const CircleFunctions::Function& u, int fourier_cutoff,
                                  double kernel_threshold) {
    if (fourier_cutoff < 1) throw PreconditionViolation("Fourier cutoff must be >= 1");
    int M = 1024;
    while (M < 8 * (2 * fourier_cutoff + 1)) M *= 2;
    Eigen::ArrayXcd t(M);
    for (int j = 0; j < M; ++j) t[j] = double(j) / M;
    const Eigen::ArrayXcd samples = u(Field::variable(t, 0)).values();
    const double unit = (samples.abs() - 1.0).abs().maxCoeff();
    if (unit > 1e-8) throw NotUnitary("|u| deviates from 1 by " + std::to_string(unit));

    // u(x) = sum_n c_n e^{2 pi i n x}; then alpha_t(u)(x_p) has t-modes c_n e^{2 pi i n x_p}.
    std::map<int, cplx> coeff;
    ToeplitzProblem tp;
    Eigen::FFT<double> fft;
    std::vector<cplx> in(samples.data(), samples.data() + M), out;
    fft.fwd(out, in);
    for (int n = -M / 2 + 1; n < M / 2; ++n) {
        const cplx c = out[(n + M) % M] / double(M);
        if (std::abs(c) <= kModeFloor) continue;
        tp.bandwidth = std::max(tp.bandwidth, std::abs(n));
        if (std::abs(n) <= fourier_cutoff) coeff[n] = c;
    }
    tp.fourier_cutoff = fourier_cutoff;
    tp.rep_dim = 1;
    tp.kernel_threshold = kernel_threshold;
    const auto& grid = sys.grid();
    for (int p = 0; p < grid.size(); ++p) {
        std::map<int, MatrixXc> modes;
        for (const auto& [n, c] : coeff)
            modes[n] = MatrixXc::Constant(1, 1, c * std::polar(1.0, 2 * kPi * n * grid.coordinate(0)[p]));
        tp.compressions.push_back(assemble_blocks(modes, fourier_cutoff, 1));
        tp.weights.push_back(grid.weight());
    }
    return tp;
}

ToeplitzProblem assemble_toeplitz(const RotationAlgebra& sys, const RotationAlgebra::Element& u, int fourier_cutoff,
                                  double kernel_threshold) {
    if (fourier_cutoff < 1) throw PreconditionViolation("Fourier cutoff must be >= 1");
    const int q = sys.q();
    double unit = 0;
    for (double t : {0.0, 0.25, 0.5, 0.75}) {
        const MatrixXc a = sys.represent(sys.alpha(u, t));
        unit = std::max(unit, (a.adjoint() * a - MatrixXc::Identity(q, q)).cwiseAbs().maxCoeff());
    }
    if (unit > 1e-8) throw NotUnitary("u* u deviates from 1 by " + std::to_string(unit));
    std::map<int, RotationAlgebra::Element> by_mode;
    for (const auto& [k, c] : u) by_mode[k.second][k] = c;
    ToeplitzProblem tp;
    tp.fourier_cutoff = fourier_cutoff;
    tp.rep_dim = q;
    tp.kernel_threshold = kernel_threshold;
    std::map<int, MatrixXc> modes;
    for (const auto& [n, e] : by_mode) {
        tp.bandwidth = std::max(tp.bandwidth, std::abs(n));
        modes[n] = sys.represent(e);
    }
    tp.compressions.push_back(assemble_blocks(modes, fourier_cutoff, q));
    tp.weights.push_back(1.0);
    return tp;
}

TauIndexReport tau_index_report(const ToeplitzProblem& tp) {
    if (tp.fourier_cutoff < 8 * tp.bandwidth)
        throw InsufficientTruncation("Fourier cutoff " + std::to_string(tp.fourier_cutoff) + " < 8 x bandwidth " +
                                     std::to_string(tp.bandwidth));
    const double eps = tp.kernel_threshold;
    const int q = tp.rep_dim;
    const int low = (tp.fourier_cutoff / 2 + 1) * q;
    TauIndexReport r;
    r.gap_ratio = std::numeric_limits<double>::infinity();
    for (size_t f = 0; f < tp.compressions.size(); ++f) {
        const MatrixXc& T = tp.compressions[f];
        Eigen::BDCSVD<MatrixXc> svd(T, Eigen::ComputeFullU | Eigen::ComputeFullV);
        const Eigen::VectorXd& s = svd.singularValues();
        double index = 0;
        for (int i = 0; i < s.size(); ++i) {
            if (s[i] >= eps) {
                if (s[i] < 10 * eps)
                    throw IllConditioned("singular value " + std::to_string(s[i]) + " within 10x of the kernel threshold");
                r.gap_ratio = std::min(r.gap_ratio, s[i] / eps);
                continue;
            }
            index += svd.matrixV().col(i).head(low).squaredNorm();
            index -= svd.matrixU().col(i).head(low).squaredNorm();
            ++r.kernel_vectors;
            ++r.cokernel_vectors;
        }
        r.value += tp.weights[f] * index / q;
    }
    return r;
}

double tau_index(const ToeplitzProblem& tp) { return tau_index_report(tp).value; }

DynsysValue dynsys_formula(const CircleFunctions& sys, const CircleFunctions::Function& u) {
    const Eigen::ArrayXcd v = sys.alpha(u, 0), dv = sys.delta(u);
    return {-sys.trace(v.conjugate() * dv) / kTwoPiI, sys.trace(v * dv.conjugate()) / kTwoPiI};
}

DynsysValue dynsys_formula(const RotationAlgebra& sys, const RotationAlgebra::Element& u) {
    const auto us = sys.star(u);
    return {-sys.trace(sys.multiply(us, sys.delta(u))) / kTwoPiI, sys.trace(sys.multiply(u, sys.delta(us))) / kTwoPiI};
}

namespace {

double unwrapped_turns(const std::vector<cplx>& dets) {
    double total = 0;
    for (size_t j = 0; j + 1 < dets.size(); ++j) {
        const double step = std::arg(dets[j + 1] / dets[j]);
        if (std::abs(step) > kPi / 2)
            throw PhaseJump("determinant phase step " + std::to_string(step) + " exceeds pi/2; refine the sampling");
        total += step;
    }
    return total / (2 * kPi);
}

int rounded_winding(double turns) {
    const double w = std::round(turns);
    if (std::abs(turns - w) > 1e-6) throw PhaseJump("loop does not close: " + std::to_string(turns) + " turns");
    return static_cast<int>(w);
}

}  // namespace

int winding_oracle(const std::function<MatrixXc(double)>& loop, int samples) {
    if (samples < 2) throw PreconditionViolation("winding needs at least two samples");
    std::vector<cplx> dets;
    for (int j = 0; j <= samples; ++j) {
        const cplx d = loop(double(j) / samples).determinant();
        if (std::abs(d) < 1e-12) throw PreconditionViolation("loop passes through a singular matrix");
        dets.push_back(d);
    }
    return rounded_winding(unwrapped_turns(dets));
}

double sign_adjusted_winding(const CircleFunctions& sys, const CircleFunctions::Function& u, int samples) {
    const int pts = sys.grid().size();
    std::vector<Eigen::ArrayXcd> values;
    for (int j = 0; j <= samples; ++j) values.push_back(sys.alpha(u, double(j) / samples));
    double total = 0;
    for (int p = 0; p < pts; ++p) {
        const int w = winding_oracle(
            [&](double t) {
                const int j = static_cast<int>(std::lround(t * samples));
                return MatrixXc::Constant(1, 1, values[j][p]);
            },
            samples);
        total += sys.grid().weight() * w;
    }
    return -total;
}

double sign_adjusted_winding(const RotationAlgebra& sys, const RotationAlgebra::Element& u, int samples) {
    const int w = winding_oracle([&](double t) { return sys.represent(sys.alpha(u, t)); }, samples);
    return -double(w) / sys.q();
}

}  // namespace ncindex
