#include <cmath>

#include "doctest.h"
#include "ncindex/errors.hpp"
#include "ncindex/field.hpp"

using namespace ncindex;

TEST_CASE("jet layout: degree-sorted prefixes") {
    const auto& L2 = JetLayout::get(2, 2);
    CHECK(L2.size() == 6);
    const auto& L1 = JetLayout::get(2, 1);
    for (int i = 0; i < L1.size(); ++i) CHECK(L1.alphas[i] == L2.alphas[i]);
    CHECK(JetLayout::get(1, 3).size() == 4);
}

TEST_CASE("field: compositions match closed-form derivatives") {
    auto grid = ManifoldGrid::circle(64);
    const auto& x = grid.coordinate(0);
    auto X = Field::coordinate(grid, 0, 3);

    // f = exp(sin(2 pi x)); f' = 2 pi cos(2 pi x) f
    auto f = (X * (2 * kPi)).sin().exp();
    Eigen::ArrayXd s = (2 * kPi * x).sin(), c = (2 * kPi * x).cos();
    Eigen::ArrayXd fv = s.exp();
    CHECK((f.values() - fv.cast<cplx>()).abs().maxCoeff() < 1e-13);
    Eigen::ArrayXd f1 = 2 * kPi * c * fv;
    Eigen::ArrayXd f2 = (4 * kPi * kPi) * (c * c - s) * fv;
    auto d1 = f.derivative(0);
    auto d2 = d1.derivative(0);
    CHECK((d1.values() - f1.cast<cplx>()).abs().maxCoeff() < 1e-11);
    CHECK((d2.values() - f2.cast<cplx>()).abs().maxCoeff() < 1e-10);

    // g = 1 / (2 + x^2)^(1/2)
    auto g = (X * X + 2.0).pow(-0.5);
    Eigen::ArrayXd gv = (x * x + 2).pow(-0.5);
    Eigen::ArrayXd g1 = -x * (x * x + 2).pow(-1.5);
    CHECK((g.values() - gv.cast<cplx>()).abs().maxCoeff() < 1e-14);
    CHECK((g.derivative(0).values() - g1.cast<cplx>()).abs().maxCoeff() < 1e-14);
    auto r = (X + 1.0).reciprocal();
    Eigen::ArrayXd r2 = 2 / (x + 1).pow(3);
    CHECK((r.derivative(0).derivative(0).values() - r2.cast<cplx>()).abs().maxCoeff() < 1e-12);
}

TEST_CASE("field: mixed partials in two variables") {
    auto grid = ManifoldGrid::square(16);
    auto X = Field::coordinate(grid, 0, 2), Y = Field::coordinate(grid, 1, 2);
    auto f = (X * Y).sin();  // d_x d_y f = cos(xy) - xy sin(xy)
    const auto& x = grid.coordinate(0);
    const auto& y = grid.coordinate(1);
    Eigen::ArrayXd expect = (x * y).cos() - x * y * (x * y).sin();
    auto dxy = f.derivative(0).derivative(1);
    auto dyx = f.derivative(1).derivative(0);
    CHECK((dxy.values() - expect.cast<cplx>()).abs().maxCoeff() < 1e-13);
    CHECK((dxy.values() - dyx.values()).abs().maxCoeff() < 1e-15);
    CHECK_THROWS_AS(dxy.derivative(0), PreconditionViolation);
}

TEST_CASE("manifold forms: wedge signs, d^2 = 0 and Stokes on the circle") {
    CHECK(wedge_sign(0b01, 0b10) == 1);
    CHECK(wedge_sign(0b10, 0b01) == -1);
    CHECK(wedge_sign(0b01, 0b01) == 0);
    CHECK(wedge_sign(0b010, 0b101) == -1);

    auto sq = ManifoldGrid::square(12);
    auto X = Field::coordinate(sq, 0, 3), Y = Field::coordinate(sq, 1, 3);
    ManifoldForm w{{0u, (X * Y * Y).exp()}};
    auto dd = manifold_d(manifold_d(w, 2), 2);
    CHECK(max_abs_values(dd) < 1e-12);

    for (int n : {64, 256, 1024}) {
        auto grid = ManifoldGrid::circle(n);
        auto T = Field::coordinate(grid, 0, 2);
        ManifoldForm f{{0u, ((T * (2 * kPi)).cos() * 3.0).exp() * (T * (4 * kPi)).sin()}};
        CHECK(std::abs(integrate_top(manifold_d(f, 1), grid)) < 1e-10);
    }
}
