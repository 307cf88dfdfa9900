#pragma once

// Grid functions carrying truncated Taylor jets at every sample, so that
// manifold derivatives of products and compositions are exact (analytic)
// rather than finite differences.

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <vector>

#include "ncindex/types.hpp"

namespace ncindex {

/// Uniform midpoint grid on S^1 = R/Z (dim 1) or on the chart (0,1)^2
/// (dim 2), with n points per axis and quadrature weight 1/n^dim. The
/// zero-dimensional grid is a single point, used for purely algebraic forms.
class ManifoldGrid {
public:
    static ManifoldGrid point() { return {0, 1}; }
    static ManifoldGrid circle(int n);
    static ManifoldGrid square(int n);

    int dim() const { return dim_; }
    int points_per_axis() const { return n_; }
    int size() const { return size_; }
    double weight() const { return 1.0 / size_; }
    bool periodic() const { return dim_ == 1; }
    /// Coordinate values along `axis` at every sample.
    const Eigen::ArrayXd& coordinate(int axis) const { return coords_.at(axis); }

    bool operator==(const ManifoldGrid& o) const { return dim_ == o.dim_ && n_ == o.n_; }

private:
    ManifoldGrid(int dim, int n);
    int dim_, n_, size_;
    std::vector<Eigen::ArrayXd> coords_;
};

/// Multi-index layout of jets in `dim` variables truncated at total order
/// `order`, sorted by total degree so lower orders are prefixes.
struct JetLayout {
    int dim = 0;
    int order = 0;
    std::vector<std::vector<int>> alphas;
    std::map<std::vector<int>, int> index;
    /// (i, j, k) with alpha_i + alpha_j = alpha_k.
    std::vector<std::array<int, 3>> products;

    static const JetLayout& get(int dim, int order);
    int size() const { return static_cast<int>(alphas.size()); }
};

/// A complex function sampled on a grid, stored as a jet per sample:
/// column k holds the Taylor coefficient d^alpha f / alpha! for alpha_k.
class Field {
public:
    Field() = default;
    Field(int points, int dim, int order);

    static Field constant(int points, int dim, int order, cplx value);
    /// The coordinate function x_axis on the grid.
    static Field coordinate(const ManifoldGrid& grid, int axis, int order);
    /// A one-variable jet at `values` with unit first derivative; composing
    /// jets with it yields univariate Taylor coefficients.
    static Field variable(const Eigen::ArrayXcd& values, int order);

    int points() const { return static_cast<int>(c_.rows()); }
    int dim() const { return dim_; }
    int order() const { return order_; }
    const Eigen::ArrayXXcd& coefficients() const { return c_; }
    Eigen::ArrayXXcd& coefficients() { return c_; }
    Eigen::ArrayXcd values() const { return c_.col(0); }

    Field truncated(int order) const;
    /// Partial derivative; lowers the jet order by one.
    Field derivative(int axis) const;

    Field& operator+=(const Field& b);
    Field& operator-=(const Field& b);
    Field& operator*=(cplx s);
    Field& operator*=(const Field& b);
    Field operator-() const;

    friend Field operator+(Field a, const Field& b) { return a += b; }
    friend Field operator-(Field a, const Field& b) { return a -= b; }
    friend Field operator*(Field a, cplx s) { return a *= s; }
    friend Field operator*(cplx s, Field a) { return a *= s; }
    friend Field operator*(const Field& a, const Field& b);
    Field operator+(cplx s) const;
    friend Field operator+(cplx s, const Field& a) { return a + s; }
    friend Field operator-(cplx s, const Field& a) { return (-a) + s; }

    /// Pointwise choice: rows where `mask` holds come from `a`, others from `b`.
    static Field select(const Eigen::Array<bool, Eigen::Dynamic, 1>& mask, const Field& a, const Field& b);

    /// Outer function given by its Taylor coefficients f^(k)(u0)/k!, one row
    /// per sample, columns k = 0..order.
    using TaylorCoefficients = std::function<Eigen::ArrayXXcd(const Eigen::ArrayXcd& u0, int order)>;
    Field compose(const TaylorCoefficients& f) const;

    Field exp() const;
    Field sin() const;
    Field cos() const;
    Field reciprocal() const;
    Field pow(double a) const;
    Field sqrt() const { return pow(0.5); }
    Field conj() const;

    /// Max of |value| over samples (derivative coefficients are ignored).
    double max_abs() const;
    bool is_zero() const { return c_.size() == 0 || (c_ == cplx{}).all(); }

private:
    int dim_ = 0;
    int order_ = 0;
    Eigen::ArrayXXcd c_;
};

/// Smooth step q(t) = f(t) / (f(t) + f(1 - t)), f(t) = exp(-1/t) for t > 0:
/// 0 for t <= 0, 1 for t >= 1, flat at both ends.
Field mollifier_step(const Field& t);

// Univariate Taylor coefficient tables used by compose().
Eigen::ArrayXXcd taylor_exp(const Eigen::ArrayXcd& u0, int order);
Eigen::ArrayXXcd taylor_sin(const Eigen::ArrayXcd& u0, int order);
Eigen::ArrayXXcd taylor_cos(const Eigen::ArrayXcd& u0, int order);
Eigen::ArrayXXcd taylor_reciprocal(const Eigen::ArrayXcd& u0, int order);
Eigen::ArrayXXcd taylor_pow(const Eigen::ArrayXcd& u0, int order, double a);

/// Bitmask of coordinate differentials dx^i, i.e. the index set of dx^I.
using FormMask = std::uint32_t;

inline int form_degree(FormMask m) { return __builtin_popcount(m); }
/// Sign of dx^I ^ dx^J relative to dx^{I u J}, or 0 if I and J intersect.
int wedge_sign(FormMask a, FormMask b);

/// Scalar differential form on the grid: mask -> coefficient field.
using ManifoldForm = std::map<FormMask, Field>;

/// Exterior derivative of a scalar form, via analytic jet derivatives.
ManifoldForm manifold_d(const ManifoldForm& w, int dim);
/// Integral of the top-degree part over the grid.
cplx integrate_top(const ManifoldForm& w, const ManifoldGrid& grid);
/// Max over masks and samples of |value|.
double max_abs_values(const ManifoldForm& w);

}  // namespace ncindex
