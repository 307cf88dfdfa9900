#include <cmath>
#include <random>

#include "doctest.h"
#include "ncindex/cyclic.hpp"
#include "ncindex/errors.hpp"
#include "support.hpp"

using namespace ncindex;
using namespace testing_support;

namespace {

CyclicCochain integer_cochain(std::mt19937_64& rng, const GroupPtr& G, int degree, bool normalized) {
    return random_integer_cochain(rng, G, degree, normalized);
}

GroupCocycle invariant_cochain(std::mt19937_64& rng, const GroupPtr& G, int degree) {
    return random_invariant_cochain(rng, G, degree);
}

GroupCocycle linear_cocycle(const GroupPtr& Z) {
    return GroupCocycle(
        Z, 1, [](const GroupTuple& g) { return cplx(g[1].word[0] - g[0].word[0]); },
        {.invariant = true, .alternating = true});
}

double max_over(const std::vector<GroupTuple>& ts, const CyclicCochain& phi) {
    double m = 0;
    for (const auto& t : ts) m = std::max(m, std::abs(phi(t)));
    return m;
}

AlgebraForm word_form(const WordAlgebra& alg, const Word& w, cplx c = 1.0) {
    AlgebraForm f(alg);
    f.add(w, c);
    return f;
}

// Sum of two character projections of C(Z/k).
GroupAlgebraElement character_projection(const GroupPtr& G, std::initializer_list<int> chars) {
    const int k = G->rank();
    GroupAlgebraElement p(G);
    for (int j : chars)
        for (int m = 0; m < k; ++m) p.add_term(G->element({m}), std::polar(1.0 / k, 2 * kPi * j * m / k));
    return p;
}

}  // namespace

TEST_CASE("b^t: trace is a cocycle and b^t b^t = 0 exactly") {
    for (auto spec : {GroupSpec::cyclic(3), GroupSpec::cyclic(4)}) {
        auto G = make_group(spec);
        CHECK(max_over(all_tuples(*G, 2), b_transpose(trace_e_cochain(G))) == 0.0);
    }
    std::mt19937_64 rng(31);
    auto Z3 = make_group(GroupSpec::cyclic(3));
    for (int deg : {0, 1, 2}) {
        auto phi = integer_cochain(rng, Z3, deg, false);
        CHECK(max_over(all_tuples(*Z3, deg + 3), b_transpose(b_transpose(phi))) == 0.0);
    }
}

TEST_CASE("d_gamma: constants, the linear cocycle on Z, d^2 = 0") {
    auto Z = make_group(GroupSpec::lattice(1));
    GroupCocycle one(Z, 0, [](const GroupTuple&) { return cplx(1.0); }, {.invariant = true, .alternating = true});
    auto d1 = d_gamma(one);
    std::mt19937_64 rng(32);
    const auto ball = Z->ball(6);
    std::uniform_int_distribution<size_t> pick(0, ball.size() - 1);
    for (int it = 0; it < 200; ++it) {
        GroupTuple t{ball[pick(rng)], ball[pick(rng)]}, s{ball[pick(rng)], ball[pick(rng)], ball[pick(rng)]};
        CHECK(d1(t) == cplx(0.0));
        CHECK(d_gamma(linear_cocycle(Z))(s) == cplx(0.0));
    }
    auto tau = linear_cocycle(Z);
    CHECK(tau.invariance_defect(rng, 200, 6) == 0.0);
    CHECK(tau.alternation_defect(rng, 200, 6) == 0.0);

    auto Z4 = make_group(GroupSpec::cyclic(4));
    for (int deg : {0, 1, 2}) {
        auto t = invariant_cochain(rng, Z4, deg);
        auto dd = d_gamma(d_gamma(t));
        double m = 0;
        for (const auto& g : all_tuples(*Z4, deg + 3)) m = std::max(m, std::abs(dd(g)));
        CHECK(m == 0.0);
    }
}

TEST_CASE("tau <-> c_tau: support, roundtrips, and c_{d tau} = b^t c_tau") {
    std::mt19937_64 rng(33);
    auto Z = make_group(GroupSpec::lattice(1));
    auto c = tau_to_c(linear_cocycle(Z));
    CHECK(c.normalized());
    CHECK(c.supported_at_e());
    CHECK(c({Z->element({-3}), Z->element({3})}) == cplx(3.0));
    CHECK(c({Z->element({-3}), Z->element({2})}) == cplx(0.0));
    CHECK(c({Z->element({0}), Z->element({0})}) == cplx(0.0));
    auto bc = b_transpose(c);
    const auto ball = Z->ball(5);
    std::uniform_int_distribution<size_t> pick(0, ball.size() - 1);
    for (int it = 0; it < 200; ++it) {
        GroupTuple t{ball[pick(rng)], ball[pick(rng)], ball[pick(rng)]};
        t[0] = Z->inverse(Z->multiply(t[1], t[2]));  // force the support condition
        CHECK(bc(t) == cplx(0.0));
    }

    auto Z5 = make_group(GroupSpec::cyclic(5));
    for (int deg : {1, 2}) {
        auto tau = invariant_cochain(rng, Z5, deg);
        auto ct = tau_to_c(tau, false);
        auto back = c_to_tau(ct);
        for (const auto& h : all_tuples(*Z5, deg + 1)) CHECK(back(h) == tau(h));
        auto again = tau_to_c(back, false);
        for (const auto& g : all_tuples(*Z5, deg + 1)) CHECK(again(g) == ct(g));
        auto lhs = tau_to_c(d_gamma(tau), false);
        auto rhs = b_transpose(ct);
        for (const auto& g : all_tuples(*Z5, deg + 2)) CHECK(lhs(g) == rhs(g));
    }
    GroupCocycle zero(Z5, 0, [](const GroupTuple&) { return cplx(0.0); }, {.invariant = true, .alternating = true});
    CHECK_THROWS_AS(tau_to_c(zero), UnsupportedDegree);
    auto not_alt = invariant_cochain(rng, Z5, 1);
    CHECK_THROWS_AS(tau_to_c(not_alt), PreconditionViolation);
    CHECK_THROWS_AS(c({Z->identity()}), DegreeMismatch);
}

TEST_CASE("cyclic_cocycle_basis: cyclic, normalized, closed") {
    for (auto [k, n] : std::vector<std::pair<int, int>>{{2, 1}, {3, 1}, {3, 2}, {4, 2}, {3, 3}}) {
        auto G = make_group(GroupSpec::cyclic(k));
        auto basis = cyclic_cocycle_basis(G, n);
        const double s = n % 2 ? -1.0 : 1.0;
        for (const auto& phi : basis) {
            CHECK(phi.normalized());
            double cyc = 0, norm = 0;
            for (const auto& t : all_tuples(*G, n + 1)) {
                GroupTuple r = t;
                std::rotate(r.rbegin(), r.rbegin() + 1, r.rend());
                cyc = std::max(cyc, std::abs(phi(r) - s * phi(t)));
                for (int i = 1; i <= n; ++i)
                    if (G->is_identity(t[i])) norm = std::max(norm, std::abs(phi(t)));
            }
            CHECK(cyc <= 1e-12);
            CHECK(norm == 0.0);
            CHECK(max_over(all_tuples(*G, n + 2), b_transpose(phi)) <= 1e-12);
        }
    }
    // Degree 2 on Z/3 carries nontrivial cocycles (S of the delta traces).
    CHECK(!cyclic_cocycle_basis(make_group(GroupSpec::cyclic(3)), 2).empty());
    CHECK(cyclic_cocycle_basis(make_group(GroupSpec::cyclic(4)), 0).size() == 4);
    CHECK_THROWS_AS(cyclic_cocycle_basis(make_group(GroupSpec::lattice(1)), 2), PreconditionViolation);
}

TEST_CASE("chern_lambda: examples and conjugation invariance of pairings") {
    auto G = make_group(GroupSpec::cyclic(2));
    AlgebraMatrix p(G, 1);
    p.at(0, 0) = character_projection(G, {0});
    auto ch = chern_lambda(p, 1);
    REQUIRE(ch.size() == 2);
    const GroupElement e = G->identity(), g = G->element({1});
    CHECK(std::abs(ch[0].at(Word{{0, 0, e}}) - 0.5) <= 1e-15);
    CHECK(std::abs(ch[0].at(Word{{0, 0, g}}) - 0.5) <= 1e-15);
    CHECK(ch[1].size() == 8);
    CHECK(std::abs(ch[1].at(Word{{0, 0, g}, {0, 0, g}, {0, 0, e}}) + 0.125) <= 1e-15);

    AlgebraMatrix not_p(G, 1);
    not_p.at(0, 0) = GroupAlgebraElement::basis(G, g, 0.5);
    CHECK_THROWS_AS(chern_lambda(not_p, 0), NotAProjection);

    std::mt19937_64 rng(34);
    auto Z4 = make_group(GroupSpec::cyclic(4));
    AlgebraMatrix q(Z4, 2);
    q.at(0, 0) = character_projection(Z4, {1, 2});
    q.at(1, 1) = character_projection(Z4, {3});
    const double th = 0.7;
    const GroupElement h = Z4->element({1});
    AlgebraMatrix u(Z4, 2);
    u.at(0, 0) = GroupAlgebraElement::basis(Z4, h, std::cos(th));
    u.at(0, 1) = GroupAlgebraElement::unit(Z4, -std::sin(th));
    u.at(1, 0) = GroupAlgebraElement::unit(Z4, std::sin(th));
    u.at(1, 1) = GroupAlgebraElement::basis(Z4, Z4->inverse(h), std::cos(th));
    CHECK((u * u.star() - AlgebraMatrix::identity(Z4, 2)).max_abs() <= 1e-15);
    auto ch_q = chern_lambda(q, 1);
    auto ch_uq = chern_lambda(u * q * u.star(), 1);
    for (int m = 0; m <= 1; ++m) {
        auto phi = random_cyclic_cocycle(Z4, 2 * m, rng);
        const cplx a = phi.evaluate(ch_q[m]), b = phi.evaluate(ch_uq[m]);
        CHECK(std::abs(a - b) <= 1e-12);
    }
    CHECK(std::abs(trace_e_cochain(Z4).evaluate(ch_q[0]) - 0.75) <= 1e-15);
}

TEST_CASE("pairings: examples, preconditions, exact forms vanish") {
    auto grid = std::make_shared<const ManifoldGrid>(ManifoldGrid::circle(16));
    auto G = make_group(GroupSpec::cyclic(3));
    WordAlgebra scalar(G, 1);
    std::mt19937_64 rng(35);
    // Degree-1 cyclic cocycles of an abelian group algebra vanish, so use degree 2.
    CHECK(cyclic_cocycle_basis(G, 1).empty());
    auto phi = random_cyclic_cocycle(G, 2, rng);
    const GroupElement g1 = G->element({1}), g2 = G->element({2});
    REQUIRE(std::abs(phi({g1, g1, g1})) > 1e-3);
    Field f = (Field::coordinate(*grid, 0, 1) * (2 * kPi)).sin();
    MixedForm w(grid, scalar, 3);
    w.add(0u, Word{{0, 0, g1}, {0, 0, g1}, {0, 0, g1}}, f);
    w.add(1u, Word{{0, 0, g1}}, f);
    auto pw = pair_cochain_form(phi, w);
    REQUIRE(pw.count(0u));
    CHECK(pw.count(1u) == 0);
    CHECK((pw.at(0u).values() - f.values() * phi({g1, g1, g1})).abs().maxCoeff() <= 1e-15);

    WordAlgebra matrix(G, 2);
    CHECK_THROWS_AS(pair_cochain_form(phi, MixedForm(grid, matrix, 3)), PreconditionViolation);
    CyclicCochain raw(G, 2, [](const GroupTuple&) { return cplx(1.0); }, {});
    CHECK_THROWS_AS(pair_cochain_form(raw, w), PreconditionViolation);

    for (int it = 0; it < 100; ++it) {
        const int n = 1 + it % 3;
        auto psi = random_cyclic_cocycle(G, n, rng);
        AlgebraForm a = word_form(scalar, random_word(rng, scalar, n - 1), random_cplx(rng));
        a += word_form(scalar, random_word(rng, scalar, n - 1), random_cplx(rng));
        CHECK(std::abs(pair_cochain_algebra(psi, a.d())) <= 1e-12);
    }
}

TEST_CASE("cyclic cocycles are closed graded traces") {
    std::mt19937_64 rng(36);
    auto G = make_group(GroupSpec::cyclic(3));
    WordAlgebra alg(G, 2);
    for (int it = 0; it < 120; ++it) {
        const int p = it % 3, q = (it / 3) % 2;
        if (p + q == 0) continue;
        auto phi = random_cyclic_cocycle(G, p + q, rng);
        AlgebraForm a = word_form(alg, random_word(rng, alg, p), random_cplx(rng));
        AlgebraForm b = word_form(alg, random_word(rng, alg, q), random_cplx(rng));
        const double s = (p * q) % 2 ? -1.0 : 1.0;
        AlgebraForm comm = a * b - s * (b * a);
        CHECK(std::abs(pair_cochain_algebra(phi, comm.trace())) <= 1e-12);
    }
}
