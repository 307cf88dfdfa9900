#include <random>

#include "doctest.h"
#include "ncindex/errors.hpp"
#include "support.hpp"

using namespace ncindex;
using testing_support::random_element;

namespace {

// Left regular representation of Z/k on C^k, independent of the library.
MatrixXc cyclic_regular_matrix(const GroupAlgebraElement& a, int k) {
    MatrixXc m = MatrixXc::Zero(k, k);
    for (const auto& [g, c] : a.terms())
        for (int j = 0; j < k; ++j) m((g.word[0] + j) % k, j) += c;
    return m;
}

}  // namespace

TEST_CASE("group specs: word length axioms") {
    for (auto spec : {GroupSpec::lattice(2), GroupSpec::cyclic(7), GroupSpec::free(2, 6)}) {
        auto ball = spec.ball(3);
        CHECK(spec.length(spec.identity()) == 0);
        for (const auto& g : ball) {
            CHECK(spec.length(g) == spec.length(spec.inverse(g)));
            CHECK(spec.multiply(g, spec.inverse(g)) == spec.identity());
            for (const auto& h : ball) CHECK(spec.length(spec.multiply(g, h)) <= spec.length(g) + spec.length(h));
        }
    }
    CHECK(GroupSpec::free(2).ball(2).size() == 1 + 4 + 12);
    CHECK(GroupSpec::lattice(2).ball(1).size() == 5);
    CHECK(GroupSpec::cyclic(4).length({{3}}) == 1);
}

TEST_CASE("ga_mul: basic examples") {
    auto Z = make_group(GroupSpec::lattice(1));
    auto g = Z->generator(0);
    auto a = GroupAlgebraElement::basis(Z, g) * GroupAlgebraElement::basis(Z, Z->inverse(g));
    CHECK(a.terms().size() == 1);
    CHECK(trace_e(a) == cplx(1.0));

    auto e = GroupAlgebraElement::unit(Z);
    auto G = GroupAlgebraElement::basis(Z, g);
    auto prod = (e + G) * (e - G);
    auto expect = e - GroupAlgebraElement::basis(Z, Z->power(g, 2));
    CHECK(prod.distance(expect) == 0.0);
    CHECK(prod.terms().size() == 2);  // cancelled g terms are not stored
}

TEST_CASE("ga_mul: associativity, adjoint, regular representation on Z/5") {
    std::mt19937_64 rng(101);
    auto Z5 = make_group(GroupSpec::cyclic(5));
    for (int it = 0; it < 200; ++it) {
        auto a = random_element(rng, Z5, 2), b = random_element(rng, Z5, 2), c = random_element(rng, Z5, 2);
        CHECK(((a * b) * c).distance(a * (b * c)) <= 1e-12);
        CHECK((a * b).star().distance(b.star() * a.star()) <= 1e-12);
        CHECK(a.star().star().distance(a) == 0.0);
        MatrixXc oracle = cyclic_regular_matrix(a, 5) * cyclic_regular_matrix(b, 5);
        CHECK((cyclic_regular_matrix(a * b, 5) - oracle).norm() <= 1e-12);
    }
}

TEST_CASE("trace_e: cyclicity on several families") {
    std::mt19937_64 rng(7);
    for (auto spec : {GroupSpec::lattice(2), GroupSpec::cyclic(6), GroupSpec::free(2, 6)}) {
        auto G = make_group(spec);
        CHECK(trace_e(GroupAlgebraElement::unit(G)) == cplx(1.0));
        CHECK(trace_e(GroupAlgebraElement::basis(G, G->generator(0))) == cplx(0.0));
        for (int it = 0; it < 200; ++it) {
            auto a = random_element(rng, G, 3), b = random_element(rng, G, 3);
            CHECK(std::abs(trace_e(a * b - b * a)) <= 1e-12);
        }
    }
}

TEST_CASE("ga_mul: truncation radius") {
    auto F = make_group(GroupSpec::free(2, 2));
    auto a = GroupAlgebraElement::basis(F, F->element({1, 2}));
    CHECK_THROWS_AS(a * a, TruncationOverflow);
    CHECK_NOTHROW(a * a.star());
}

TEST_CASE("delta_word_length: examples and norm bound") {
    auto Z = make_group(GroupSpec::lattice(1));
    CHECK(delta_word_length(GroupAlgebraElement::unit(Z), 5).matrix.norm() == 0.0);

    auto g = Z->generator(0);
    auto rep = delta_word_length(GroupAlgebraElement::basis(Z, g), 5);
    for (int j = 0; j < rep.ball.size(); ++j) {
        const auto& h = rep.ball.elements[j];
        auto gh = Z->multiply(g, h);
        auto it = rep.ball.index.find(gh);
        if (it == rep.ball.index.end()) continue;
        double v = rep.matrix(it->second, j).real();
        CHECK(v == double(Z->length(gh) - Z->length(h)));
        CHECK(std::abs(v) == 1.0);
    }

    auto F = make_group(GroupSpec::free(2, 6));
    for (int i = 0; i < 2; ++i)
        for (auto gen : {F->generator(i), F->inverse(F->generator(i))}) {
            auto r = delta_word_length(GroupAlgebraElement::basis(F, gen), 4);
            CHECK(r.norm_lower_bound() <= F->length(gen) + 1e-12);
        }
    auto w = F->element({1, 2, -1});
    CHECK(delta_word_length(GroupAlgebraElement::basis(F, w), 4).norm_lower_bound() <= 3 + 1e-12);
    CHECK_THROWS_AS(delta_word_length(GroupAlgebraElement::basis(F, F->element({1, 2, 1})), 2), TruncationOverflow);
}

TEST_CASE("delta_word_length: Leibniz on the representable sub-ball") {
    std::mt19937_64 rng(11);
    const int R = 4;
    for (auto spec : {GroupSpec::lattice(2), GroupSpec::free(2, 6), GroupSpec::cyclic(9)}) {
        auto G = make_group(spec);
        for (int it = 0; it < 200; ++it) {
            auto a = random_element(rng, G, 2, 4), b = random_element(rng, G, 2, 4);
            auto ball = BallBasis::build(*G, R);
            auto da = delta_word_length(a, R).matrix, db = delta_word_length(b, R).matrix;
            auto dab = delta_word_length(a * b, R).matrix;
            MatrixXc rhs = da * left_regular(b, ball) + left_regular(a, ball) * db;
            const int inner = R - a.support_radius() - b.support_radius();
            for (int j = 0; j < ball.size(); ++j) {
                if (G->length(ball.elements[j]) > inner) continue;
                CHECK((dab.col(j) - rhs.col(j)).cwiseAbs().maxCoeff() <= 1e-12);
            }
        }
    }
}

TEST_CASE("seminorm tower is monotone in the order") {
    auto Z = make_group(GroupSpec::lattice(1));
    auto ball = BallBasis::build(*Z, 6);
    auto lengths = word_length_diagonal(*Z, ball);
    auto a = GroupAlgebraElement::basis(Z, Z->generator(0)) + GroupAlgebraElement::unit(Z, 0.5);
    MatrixXc t = left_regular(a, ball);
    double s0 = derivation_seminorm(t, lengths, 0), s1 = derivation_seminorm(t, lengths, 1);
    double s2 = derivation_seminorm(t, lengths, 2);
    CHECK(s0 <= s1);
    CHECK(s1 <= s2);
    CHECK(s1 == doctest::Approx(s0 + operator_norm(delta_word_length(a, 6).matrix)));
}

TEST_CASE("neumann_inverse") {
    auto Z3 = make_group(GroupSpec::cyclic(3));
    auto e = GroupAlgebraElement::unit(Z3);
    auto r0 = neumann_inverse(e);
    CHECK(r0.inverse.distance(e) == 0.0);

    auto g = GroupAlgebraElement::basis(Z3, Z3->generator(0));
    auto x = e - 0.5 * g;
    auto r = neumann_inverse(x);
    VectorXc oracle = cyclic_regular_matrix(x, 3).inverse().col(0);
    for (int j = 0; j < 3; ++j) CHECK(std::abs(r.inverse.coefficient({{j}}) - oracle[j]) <= 1e-9);
    // Geometric sum over the three elements: 1/(1 - 1/8) * (1, 1/2, 1/4).
    CHECK(std::abs(r.inverse.coefficient({{1}}) - 0.5 * 8.0 / 7.0) <= 1e-9);
    CHECK(r.residual <= 1e-11);
    CHECK(r.growth_bound_holds());

    CHECK_THROWS_AS(neumann_inverse(e - 1.0 * g), NotInvertibleInBudget);
    CHECK_THROWS_AS(neumann_inverse(e - 0.9 * g, {.tolerance = 1e-12, .max_terms = 5}), NotInvertibleInBudget);
}

TEST_CASE("neumann_inverse: regular representation oracle and growth bound") {
    std::mt19937_64 rng(5);
    for (int k = 2; k <= 7; ++k) {
        auto G = make_group(GroupSpec::cyclic(k));
        for (int it = 0; it < 40; ++it) {
            auto y = random_element(rng, G, k, 4);
            y *= (0.8 * std::uniform_real_distribution<double>(0.1, 1.0)(rng)) / y.l1_norm();
            auto x = GroupAlgebraElement::unit(G) - y;
            auto r = neumann_inverse(x);
            VectorXc oracle = cyclic_regular_matrix(x, k).inverse().col(0);
            for (int j = 0; j < k; ++j) CHECK(std::abs(r.inverse.coefficient({{j}}) - oracle[j]) <= 1e-9);
            CHECK(r.growth_bound_holds());
        }
    }
    auto Z = make_group(GroupSpec::lattice(1));
    auto g = GroupAlgebraElement::basis(Z, Z->generator(0));
    auto x = GroupAlgebraElement::unit(Z) - 0.3 * g - 0.2 * g.star();
    auto r = neumann_inverse(x, {.tolerance = 1e-10});
    CHECK(r.residual <= 1e-9);
    CHECK(r.growth.size() == 8);
    CHECK(r.growth_bound_holds());
}
