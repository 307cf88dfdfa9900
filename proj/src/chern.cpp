#include "ncindex/chern.hpp"

#include <cmath>

#include "ncindex/errors.hpp"

namespace ncindex {

FormMatrix::FormMatrix(std::shared_ptr<const ManifoldGrid> grid, WordAlgebra scalar, int cutoff, int n)
    : grid_(std::move(grid)), scalar_(std::move(scalar)), cutoff_(cutoff), n_(n) {
    if (scalar_.n() != 1) throw PreconditionViolation("form matrix entries must be scalar forms");
    entries_.assign(n_ * n_, MixedForm(grid_, scalar_, cutoff_));
}

FormMatrix FormMatrix::from_form(const MixedForm& a) {
    const int n = a.algebra().n();
    FormMatrix m(a.grid(), WordAlgebra(a.algebra().group(), 1), a.cutoff(), n);
    for (const auto& [key, f] : a.terms()) {
        if (key.word.size() != 1) throw DegreeMismatch("expected a matrix of functions (algebra degree 0)");
        const auto& u = key.word[0];
        m.at(u.row, u.col).add(key.mask, Word{{0, 0, u.g}}, f);
    }
    return m;
}

FormMatrix FormMatrix::identity(std::shared_ptr<const ManifoldGrid> grid, WordAlgebra scalar, int cutoff, int n,
                                int order) {
    FormMatrix m(grid, scalar, cutoff, n);
    for (int i = 0; i < n; ++i) m.at(i, i) = MixedForm::unit(grid, scalar, cutoff, order);
    return m;
}

MixedForm FormMatrix::to_form(const WordAlgebra& alg) const {
    if (alg.n() != n_) throw PreconditionViolation("matrix size mismatch");
    MixedForm out(grid_, alg, cutoff_);
    for (int r = 0; r < n_; ++r)
        for (int c = 0; c < n_; ++c)
            for (const auto& [key, f] : at(r, c).terms()) {
                if (key.word.size() != 1) throw DegreeMismatch("to_form expects algebra degree 0 entries");
                out.add(key.mask, Word{{r, c, key.word[0].g}}, f);
            }
    return out;
}

FormMatrix FormMatrix::d_tot() const {
    FormMatrix m = *this;
    for (auto& e : m.entries_) e = e.d_tot();
    return m;
}

FormMatrix FormMatrix::star00() const {
    FormMatrix m(grid_, scalar_, cutoff_, n_);
    for (int r = 0; r < n_; ++r)
        for (int c = 0; c < n_; ++c) m.at(c, r) = at(r, c).star00();
    return m;
}

MixedForm FormMatrix::trace() const {
    MixedForm t(grid_, scalar_, cutoff_);
    for (int i = 0; i < n_; ++i) t += at(i, i);
    return t;
}

double FormMatrix::max_abs() const {
    double m = 0;
    for (const auto& e : entries_) m = std::max(m, e.max_abs());
    return m;
}

FormMatrix operator*(const FormMatrix& a, const FormMatrix& b) {
    if (a.n_ != b.n_) throw PreconditionViolation("matrix size mismatch");
    FormMatrix m(a.grid_, a.scalar_, a.cutoff_, a.n_);
    for (int r = 0; r < a.n_; ++r)
        for (int l = 0; l < a.n_; ++l) {
            if (a.at(r, l).terms().empty()) continue;
            for (int c = 0; c < a.n_; ++c)
                if (!b.at(l, c).terms().empty()) m.at(r, c) += a.at(r, l) * b.at(l, c);
        }
    return m;
}

FormMatrix operator-(const FormMatrix& a, const FormMatrix& b) {
    FormMatrix m = a;
    for (size_t i = 0; i < m.entries_.size(); ++i) m.entries_[i] -= b.entries_[i];
    return m;
}

int jet_order(const MixedForm& a) {
    int order = -1;
    for (const auto& [key, f] : a.terms()) order = order < 0 ? f.order() : std::min(order, f.order());
    return std::max(order, 0);
}

namespace {

double projection_residual(const FormMatrix& p) {
    return std::max((p * p - p).max_abs(), (p.star00() - p).max_abs());
}

double unitary_residual(const FormMatrix& u, int order) {
    const FormMatrix one = FormMatrix::identity(u.at(0, 0).grid(), u.scalar_algebra(), u.at(0, 0).cutoff(), u.n(), order);
    const FormMatrix us = u.star00();
    return std::max((us * u - one).max_abs(), (u * us - one).max_abs());
}

void check_degree_budget(const MixedForm& a, int top) {
    const int budget = a.cutoff() + a.grid()->dim();
    if (top > budget)
        throw PreconditionViolation("Chern degree " + std::to_string(top) + " exceeds cutoff + dim M = " +
                                    std::to_string(budget));
}

double factorial(int n) {
    double f = 1;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

}  // namespace

double projection_residual(const MixedForm& p) { return projection_residual(FormMatrix::from_form(p)); }

double unitary_residual(const MixedForm& u) { return unitary_residual(FormMatrix::from_form(u), jet_order(u)); }

MixedForm chern_even(const MixedForm& p, int k_max) {
    if (k_max < 0) throw PreconditionViolation("k_max must be >= 0");
    check_degree_budget(p, 2 * k_max);
    const FormMatrix P = FormMatrix::from_form(p);
    const double res = projection_residual(P);
    if (res > 1e-8) throw NotAProjection("projection residual " + std::to_string(res));
    MixedForm out = P.trace();
    if (k_max == 0) return out;
    const FormMatrix dP = P.d_tot();
    const FormMatrix Q = dP * dP;
    FormMatrix cur = P;
    for (int k = 1; k <= k_max; ++k) {
        cur = cur * Q;
        const cplx coef = (k % 2 ? -1.0 : 1.0) / (std::pow(kTwoPiI, k) * factorial(k));
        out += cur.trace() * coef;
    }
    out.prune();
    return out;
}

MixedForm chern_odd(const MixedForm& u, int k_max) {
    if (k_max < 1) throw PreconditionViolation("k_max must be >= 1");
    check_degree_budget(u, 2 * k_max - 1);
    const FormMatrix U = FormMatrix::from_form(u);
    const double res = unitary_residual(U, jet_order(u));
    if (res > 1e-8) throw NotUnitary("unitarity residual " + std::to_string(res));
    const FormMatrix Us = U.star00();
    const FormMatrix dU = U.d_tot(), dUs = Us.d_tot();
    const FormMatrix W = dUs * dU;
    FormMatrix cur = Us * dU;
    MixedForm out(u.grid(), U.scalar_algebra(), u.cutoff());
    for (int k = 1; k <= k_max; ++k) {
        if (k > 1) cur = cur * W;
        const cplx coef = std::pow(-1.0 / kTwoPiI, k) * factorial(k - 1) / factorial(2 * k - 1);
        out += cur.trace() * coef;
    }
    out.prune();
    return out;
}

cplx pair_integrated(const CyclicCochain& phi, const MixedForm& w) {
    return integrate_top(pair_cochain_form(phi, w), *w.grid());
}

double closedness_defect(const MixedForm& w, const std::vector<CyclicCochain>& cocycles) {
    const MixedForm dw = w.d_tot();
    double m = 0;
    for (const auto& phi : cocycles) m = std::max(m, max_abs_values(pair_cochain_form(phi, dw)));
    return m;
}

ProjectionPath ProjectionPath::sample(const std::function<MixedForm(double)>& p, int count) {
    if (count < 2) throw PreconditionViolation("a path needs at least two samples");
    ProjectionPath path;
    for (int i = 0; i < count; ++i) {
        const double t = double(i) / (count - 1);
        MixedForm s = p(t);
        const double r = projection_residual(s);
        if (r > 1e-8)
            throw PreconditionViolation("path leaves the projections at t = " + std::to_string(t) + " (residual " +
                                        std::to_string(r) + ")");
        path.times.push_back(t);
        path.samples.push_back(std::move(s));
        path.residuals.push_back(r);
    }
    return path;
}

cplx chern_homotopy_defect(const ProjectionPath& path, const CyclicCochain& phi) {
    if (!phi.normalized()) throw PreconditionViolation("homotopy defect needs a normalized cochain");
    const MixedForm& p0 = path.samples.front();
    const MixedForm& p1 = path.samples.back();
    const int total = p0.grid()->dim() + phi.degree();
    if (total % 2) return 0.0;
    const int k = total / 2;
    return pair_integrated(phi, chern_even(p1, k)) - pair_integrated(phi, chern_even(p0, k));
}

MixedForm bott_projector(int n, int order) {
    auto grid = std::make_shared<const ManifoldGrid>(ManifoldGrid::square(n));
    const int pts = grid->size();
    const Field X = Field::coordinate(*grid, 0, order) + cplx(-0.5);
    const Field Y = Field::coordinate(*grid, 1, order) + cplx(-0.5);
    const Field rho = X * X + Y * Y;
    // theta runs from 0 (north pole) near the centre to pi for r >= 0.45.
    const double rho0 = 0.05 * 0.05, rho1 = 0.45 * 0.45;
    const Field s = mollifier_step((rho + cplx(-rho0)) * (1.0 / (rho1 - rho0)));
    const Field theta = s * kPi;
    const Field g = theta.sin() * rho.pow(-0.5);
    const Field n1 = X * g, n2 = Y * g, n3 = theta.cos();
    const cplx i(0, 1);
    MixedForm p(grid, WordAlgebra(make_group(GroupSpec::trivial()), 2), 0);
    const GroupElement e = p.algebra().group()->identity();
    const Field half = Field::constant(pts, 2, order, 0.5);
    p.add(0u, Word{{0, 0, e}}, half + n3 * 0.5);
    p.add(0u, Word{{1, 1, e}}, half - n3 * 0.5);
    // Off-diagonal entries (n1 + i n2)/2 above the diagonal fix the orientation: int ch = +1.
    p.add(0u, Word{{0, 1, e}}, (n1 + n2 * i) * 0.5);
    p.add(0u, Word{{1, 0, e}}, (n1 - n2 * i) * 0.5);
    return p;
}

MixedForm direct_sum(const MixedForm& a, const MixedForm& b) {
    if (!(*a.algebra().group() == *b.algebra().group())) throw PreconditionViolation("direct sum over different groups");
    const int na = a.algebra().n();
    MixedForm out(a.grid(), WordAlgebra(a.algebra().group(), na + b.algebra().n()), std::min(a.cutoff(), b.cutoff()));
    for (const auto& [key, f] : a.terms()) {
        if (key.word.size() != 1) throw DegreeMismatch("direct sum of matrices of functions only");
        out.add(key.mask, key.word, f);
    }
    for (const auto& [key, f] : b.terms()) {
        if (key.word.size() != 1) throw DegreeMismatch("direct sum of matrices of functions only");
        const auto& u = key.word[0];
        out.add(key.mask, Word{{u.row + na, u.col + na, u.g}}, f);
    }
    return out;
}

AlgebraMatrix sample_matrix(const MixedForm& a, int sample) {
    AlgebraMatrix m(a.algebra().group(), a.algebra().n());
    for (const auto& [key, f] : a.terms()) {
        if (key.mask != 0u || key.word.size() != 1) throw DegreeMismatch("sample_matrix needs a matrix of functions");
        const auto& u = key.word[0];
        m.at(u.row, u.col).add_term(u.g, f.coefficients()(sample, 0));
    }
    return m;
}

MixedForm constant_matrix(std::shared_ptr<const ManifoldGrid> grid, int cutoff, const AlgebraMatrix& a, int order) {
    MixedForm out(grid, WordAlgebra(a.group(), a.n()), cutoff);
    for (int r = 0; r < a.n(); ++r)
        for (int c = 0; c < a.n(); ++c)
            for (const auto& [g, v] : a.at(r, c).terms())
                out.add(0u, Word{{r, c, g}}, Field::constant(grid->size(), grid->dim(), order, v));
    return out;
}

namespace {

using FieldMatrix2 = std::array<Field, 4>;  // row major

FieldMatrix2 mul(const FieldMatrix2& a, const FieldMatrix2& b) {
    return {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3], a[2] * b[0] + a[3] * b[2],
            a[2] * b[1] + a[3] * b[3]};
}

FieldMatrix2 adjoint(const FieldMatrix2& a) { return {a[0].conj(), a[2].conj(), a[1].conj(), a[3].conj()}; }

Field phase(const Field& t) { return (t * cplx(0, 1)).exp(); }

// Inverse Fourier transform over Z/k: a(g) = (1/k) sum_j a_j w^{-jg}.
MixedForm from_characters(std::shared_ptr<const ManifoldGrid> grid, GroupPtr group, int cutoff,
                          const std::vector<FieldMatrix2>& blocks) {
    if (group->family() != GroupFamily::Cyclic) throw PreconditionViolation("character blocks need a cyclic group");
    const int k = group->rank();
    if (static_cast<int>(blocks.size()) != k)
        throw PreconditionViolation("need one block per character of Z/" + std::to_string(k));
    MixedForm out(grid, WordAlgebra(group, 2), cutoff);
    for (int g = 0; g < k; ++g)
        for (int rc = 0; rc < 4; ++rc) {
            Field acc;
            for (int j = 0; j < k; ++j) acc += blocks[j][rc] * std::polar(1.0 / k, -2 * kPi * j * g / k);
            if (acc.is_zero()) continue;
            out.add(0u, Word{{rc / 2, rc % 2, group->element({g})}}, acc);
        }
    return out;
}

Field random_smooth(std::mt19937_64& rng, const ManifoldGrid& grid, int order, double a_scale, double b_scale) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Field f = Field::constant(grid.size(), grid.dim(), order, a_scale * u(rng));
    for (int ax = 0; ax < grid.dim(); ++ax) {
        const double b = b_scale * u(rng), c = u(rng);
        f += ((Field::coordinate(grid, ax, order) + cplx(c)) * (2 * kPi)).sin() * b;
    }
    return f;
}

}  // namespace

MixedForm character_projection(std::shared_ptr<const ManifoldGrid> grid, GroupPtr group, int cutoff,
                               const std::vector<CharacterBlock>& blocks) {
    std::vector<FieldMatrix2> mats;
    for (const auto& b : blocks) {
        const int pts = b.theta.points(), dim = b.theta.dim(), order = b.theta.order();
        const Field zero = Field::constant(pts, dim, order, 0.0), one = Field::constant(pts, dim, order, 1.0);
        if (b.rank == 0) {
            mats.push_back({zero, zero, zero, zero});
        } else if (b.rank == 2) {
            mats.push_back({one, zero, zero, one});
        } else if (b.rank == 1) {
            const Field c = b.theta.cos(), s = b.theta.sin();
            const Field e = phase(b.phi);
            mats.push_back({c * c, c * s * e.conj(), c * s * e, s * s});
        } else {
            throw PreconditionViolation("character block rank must be 0, 1 or 2");
        }
    }
    return from_characters(std::move(grid), std::move(group), cutoff, mats);
}

MixedForm character_unitary(std::shared_ptr<const ManifoldGrid> grid, GroupPtr group, int cutoff,
                            const std::vector<UnitaryBlock>& blocks) {
    std::vector<FieldMatrix2> mats;
    for (const auto& b : blocks) {
        const Field zero = b.theta * 0.0;
        const Field c = b.theta.cos(), s = b.theta.sin(), e = phase(b.phi);
        const FieldMatrix2 R{c, -(s * e.conj()), s * e, c};
        const FieldMatrix2 D{phase(b.alpha), zero, zero, phase(b.beta)};
        mats.push_back(mul(mul(R, D), adjoint(R)));
    }
    return from_characters(std::move(grid), std::move(group), cutoff, mats);
}

MixedForm random_character_projection(std::mt19937_64& rng, std::shared_ptr<const ManifoldGrid> grid, GroupPtr group,
                                      int cutoff, int order) {
    std::discrete_distribution<int> rank{1, 4, 1};
    std::vector<CharacterBlock> blocks;
    for (int j = 0; j < group->rank(); ++j)
        blocks.push_back({rank(rng), random_smooth(rng, *grid, order, kPi, 0.6),
                          random_smooth(rng, *grid, order, kPi, 1.0)});
    return character_projection(std::move(grid), std::move(group), cutoff, blocks);
}

MixedForm random_character_unitary(std::mt19937_64& rng, std::shared_ptr<const ManifoldGrid> grid, GroupPtr group,
                                   int cutoff, int order) {
    std::vector<UnitaryBlock> blocks;
    for (int j = 0; j < group->rank(); ++j)
        blocks.push_back({random_smooth(rng, *grid, order, kPi, 1.0), random_smooth(rng, *grid, order, kPi, 1.0),
                          random_smooth(rng, *grid, order, kPi, 0.6), random_smooth(rng, *grid, order, kPi, 1.0)});
    return character_unitary(std::move(grid), std::move(group), cutoff, blocks);
}

}  // namespace ncindex
