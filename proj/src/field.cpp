#include "ncindex/field.hpp"

#include <cmath>
#include <mutex>

#include "ncindex/errors.hpp"

namespace ncindex {

ManifoldGrid::ManifoldGrid(int dim, int n) : dim_(dim), n_(n), size_(1) {
    if (n < 1) throw PreconditionViolation("grid needs at least one point per axis");
    for (int i = 0; i < dim; ++i) size_ *= n;
    coords_.assign(dim, Eigen::ArrayXd(size_));
    for (int p = 0; p < size_; ++p) {
        int rest = p;
        for (int a = 0; a < dim; ++a) {
            coords_[a][p] = (rest % n + 0.5) / n;
            rest /= n;
        }
    }
}

ManifoldGrid ManifoldGrid::circle(int n) { return {1, n}; }
ManifoldGrid ManifoldGrid::square(int n) { return {2, n}; }

const JetLayout& JetLayout::get(int dim, int order) {
    static std::mutex mu;
    static std::map<std::pair<int, int>, std::unique_ptr<JetLayout>> cache;
    std::lock_guard lock(mu);
    auto& slot = cache[{dim, order}];
    if (!slot) {
        auto L = std::make_unique<JetLayout>();
        L->dim = dim;
        L->order = order;
        for (int deg = 0; deg <= order; ++deg) {
            // All alpha with |alpha| = deg, lexicographically descending.
            std::vector<int> a(dim, 0);
            std::function<void(int, int)> rec = [&](int pos, int left) {
                if (pos == dim - 1 || dim == 0) {
                    if (dim > 0) a[pos] = left;
                    if (dim > 0 || left == 0) L->alphas.push_back(a);
                    return;
                }
                for (int v = left; v >= 0; --v) {
                    a[pos] = v;
                    rec(pos + 1, left - v);
                }
            };
            rec(0, deg);
        }
        for (int i = 0; i < L->size(); ++i) L->index.emplace(L->alphas[i], i);
        for (int i = 0; i < L->size(); ++i)
            for (int j = 0; j < L->size(); ++j) {
                std::vector<int> s(dim);
                int tot = 0;
                for (int d = 0; d < dim; ++d) tot += (s[d] = L->alphas[i][d] + L->alphas[j][d]);
                if (tot <= order) L->products.push_back({i, j, L->index.at(s)});
            }
        slot = std::move(L);
    }
    return *slot;
}

Field::Field(int points, int dim, int order)
    : dim_(dim), order_(order), c_(Eigen::ArrayXXcd::Zero(points, JetLayout::get(dim, order).size())) {
    if (order < 0) throw PreconditionViolation("jet order must be >= 0");
}

Field Field::constant(int points, int dim, int order, cplx value) {
    Field f(points, dim, order);
    f.c_.col(0).setConstant(value);
    return f;
}

Field Field::coordinate(const ManifoldGrid& grid, int axis, int order) {
    Field f(grid.size(), grid.dim(), order);
    f.c_.col(0) = grid.coordinate(axis).cast<cplx>();
    if (order >= 1) {
        std::vector<int> e(grid.dim(), 0);
        e[axis] = 1;
        f.c_.col(JetLayout::get(grid.dim(), order).index.at(e)).setConstant(1.0);
    }
    return f;
}

Field Field::variable(const Eigen::ArrayXcd& values, int order) {
    Field f(static_cast<int>(values.size()), 1, order);
    f.c_.col(0) = values;
    if (order >= 1) f.c_.col(1).setConstant(1.0);
    return f;
}

Field Field::truncated(int order) const {
    if (order >= order_) return *this;
    Field f(points(), dim_, order);
    f.c_ = c_.leftCols(f.c_.cols());
    return f;
}

Field Field::derivative(int axis) const {
    if (order_ == 0) throw PreconditionViolation("jet order exhausted: cannot differentiate an order-0 field");
    if (axis < 0 || axis >= dim_) throw PreconditionViolation("derivative axis out of range");
    const auto& src = JetLayout::get(dim_, order_);
    Field f(points(), dim_, order_ - 1);
    const auto& dst = JetLayout::get(dim_, order_ - 1);
    for (int k = 0; k < dst.size(); ++k) {
        auto b = dst.alphas[k];
        b[axis] += 1;
        f.c_.col(k) = c_.col(src.index.at(b)) * double(b[axis]);
    }
    return f;
}

namespace {

void check_compatible(const Field& a, const Field& b) {
    if (a.points() != b.points() || a.dim() != b.dim())
        throw PreconditionViolation("fields live on different grids");
}

}  // namespace

Field& Field::operator+=(const Field& b) {
    if (c_.size() == 0) return *this = b;
    check_compatible(*this, b);
    if (b.order_ < order_) *this = truncated(b.order_);
    c_ += b.c_.leftCols(c_.cols());
    return *this;
}

Field& Field::operator-=(const Field& b) {
    if (c_.size() == 0) return *this = -b;
    check_compatible(*this, b);
    if (b.order_ < order_) *this = truncated(b.order_);
    c_ -= b.c_.leftCols(c_.cols());
    return *this;
}

Field& Field::operator*=(cplx s) {
    c_ *= s;
    return *this;
}

Field& Field::operator*=(const Field& b) { return *this = *this * b; }

Field Field::operator-() const {
    Field f = *this;
    f.c_ = -f.c_;
    return f;
}

Field operator*(const Field& a, const Field& b) {
    check_compatible(a, b);
    const int order = std::min(a.order_, b.order_);
    const auto& L = JetLayout::get(a.dim_, order);
    Field r(a.points(), a.dim_, order);
    for (const auto& [i, j, k] : L.products) r.c_.col(k) += a.c_.col(i) * b.c_.col(j);
    return r;
}

Field Field::operator+(cplx s) const {
    Field f = *this;
    f.c_.col(0) += s;
    return f;
}

Field Field::select(const Eigen::Array<bool, Eigen::Dynamic, 1>& mask, const Field& a, const Field& b) {
    check_compatible(a, b);
    const int order = std::min(a.order_, b.order_);
    Field r = a.truncated(order);
    const Field bb = b.truncated(order);
    for (int p = 0; p < r.points(); ++p)
        if (!mask[p]) r.c_.row(p) = bb.c_.row(p);
    return r;
}

Field Field::compose(const TaylorCoefficients& f) const {
    const Eigen::ArrayXcd u0 = c_.col(0);
    const Eigen::ArrayXXcd coef = f(u0, order_);
    Field delta = *this;
    delta.c_.col(0).setZero();
    Field result(points(), dim_, order_);
    result.c_.col(0) = coef.col(0);
    Field power = delta;
    for (int k = 1; k <= order_; ++k) {
        for (int col = 0; col < result.c_.cols(); ++col) result.c_.col(col) += coef.col(k) * power.c_.col(col);
        if (k < order_) power = power * delta;
    }
    return result;
}

Eigen::ArrayXXcd taylor_exp(const Eigen::ArrayXcd& u0, int order) {
    Eigen::ArrayXXcd c(u0.size(), order + 1);
    c.col(0) = u0.exp();
    for (int k = 1; k <= order; ++k) c.col(k) = c.col(k - 1) / double(k);
    return c;
}

Eigen::ArrayXXcd taylor_sin(const Eigen::ArrayXcd& u0, int order) {
    Eigen::ArrayXXcd c(u0.size(), order + 1);
    const Eigen::ArrayXcd s = u0.sin(), co = u0.cos();
    double fact = 1.0;
    for (int k = 0; k <= order; ++k) {
        if (k > 0) fact *= k;
        switch (k % 4) {
            case 0: c.col(k) = s / fact; break;
            case 1: c.col(k) = co / fact; break;
            case 2: c.col(k) = -s / fact; break;
            default: c.col(k) = -co / fact; break;
        }
    }
    return c;
}

Eigen::ArrayXXcd taylor_cos(const Eigen::ArrayXcd& u0, int order) {
    Eigen::ArrayXXcd c(u0.size(), order + 1);
    const Eigen::ArrayXcd s = u0.sin(), co = u0.cos();
    double fact = 1.0;
    for (int k = 0; k <= order; ++k) {
        if (k > 0) fact *= k;
        switch (k % 4) {
            case 0: c.col(k) = co / fact; break;
            case 1: c.col(k) = -s / fact; break;
            case 2: c.col(k) = -co / fact; break;
            default: c.col(k) = s / fact; break;
        }
    }
    return c;
}

Eigen::ArrayXXcd taylor_reciprocal(const Eigen::ArrayXcd& u0, int order) {
    Eigen::ArrayXXcd c(u0.size(), order + 1);
    const Eigen::ArrayXcd inv = u0.inverse();
    c.col(0) = inv;
    for (int k = 1; k <= order; ++k) c.col(k) = -c.col(k - 1) * inv;
    return c;
}

Eigen::ArrayXXcd taylor_pow(const Eigen::ArrayXcd& u0, int order, double a) {
    Eigen::ArrayXXcd c(u0.size(), order + 1);
    for (int p = 0; p < u0.size(); ++p) {
        double binom = 1.0;
        for (int k = 0; k <= order; ++k) {
            c(p, k) = u0[p] == cplx{} && a - k < 0 ? cplx{} : binom * std::pow(u0[p], a - k);
            binom *= (a - k) / (k + 1);
        }
    }
    return c;
}

Field Field::exp() const { return compose(taylor_exp); }
Field Field::sin() const { return compose(taylor_sin); }
Field Field::cos() const { return compose(taylor_cos); }
Field Field::reciprocal() const { return compose(taylor_reciprocal); }
Field Field::pow(double a) const {
    return compose([a](const Eigen::ArrayXcd& u0, int order) { return taylor_pow(u0, order, a); });
}

Field Field::conj() const {
    Field f = *this;
    f.c_ = f.c_.conjugate();
    return f;
}

double Field::max_abs() const { return c_.size() == 0 ? 0.0 : c_.col(0).abs().maxCoeff(); }

Field mollifier_step(const Field& t) {
    const Eigen::ArrayXd v = t.values().real();
    // Beyond 1e-3 from the ends exp(-1/t) underflows, so q is exactly 0 or 1
    // there; clamping avoids overflow in the jet coefficients of 1/t.
    const Eigen::Array<bool, Eigen::Dynamic, 1> inside = v > 1e-3 && v < 1.0 - 1e-3, above = v >= 1.0 - 1e-3;
    const int n = t.points(), dim = t.dim(), order = t.order();
    const Field half = Field::constant(n, dim, order, 0.5);
    const Field s = Field::select(inside, t, half);
    const Field f0 = (-s.reciprocal()).exp(), f1 = (-(1.0 - s).reciprocal()).exp();
    const Field q = f0 * (f0 + f1).reciprocal();
    return Field::select(inside, q,
                         Field::select(above, Field::constant(n, dim, order, 1.0), Field::constant(n, dim, order, 0.0)));
}

int wedge_sign(FormMask a, FormMask b) {
    if (a & b) return 0;
    int inversions = 0;
    for (int j = 0; j < 31; ++j)
        if (b >> j & 1u) inversions += __builtin_popcount(a >> (j + 1));
    return inversions % 2 ? -1 : 1;
}

ManifoldForm manifold_d(const ManifoldForm& w, int dim) {
    ManifoldForm out;
    for (const auto& [mask, f] : w)
        for (int m = 0; m < dim; ++m) {
            if (mask >> m & 1u) continue;
            const double sign = __builtin_popcount(mask & ((1u << m) - 1u)) % 2 ? -1.0 : 1.0;
            out[mask | (1u << m)] += f.derivative(m) * sign;
        }
    return out;
}

cplx integrate_top(const ManifoldForm& w, const ManifoldGrid& grid) {
    auto it = w.find((1u << grid.dim()) - 1u);
    if (it == w.end()) return 0.0;
    return it->second.values().sum() * grid.weight();
}

double max_abs_values(const ManifoldForm& w) {
    double m = 0;
    for (const auto& [mask, f] : w) m = std::max(m, f.max_abs());
    return m;
}

}  // namespace ncindex
