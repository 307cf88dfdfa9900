#pragma once

#include <random>

#include "ncindex/group_algebra.hpp"

namespace testing_support {

using namespace ncindex;

inline cplx random_cplx(std::mt19937_64& rng, double scale = 1.0) {
    std::normal_distribution<double> n(0.0, scale);
    return {n(rng), n(rng)};
}

/// Random element supported on the ball of radius r.
inline GroupAlgebraElement random_element(std::mt19937_64& rng, const GroupPtr& g, int r, int max_terms = 6,
                                          double scale = 1.0) {
    auto ball = g->ball(r);
    std::uniform_int_distribution<size_t> pick(0, ball.size() - 1);
    std::uniform_int_distribution<int> count(1, max_terms);
    GroupAlgebraElement a(g);
    for (int i = count(rng); i > 0; --i) a.add_term(ball[pick(rng)], random_cplx(rng, scale));
    return a;
}

}  // namespace testing_support

#include "ncindex/nc_forms.hpp"

namespace testing_support {

/// Smooth random field: sum of a few low-frequency trig modes.
inline Field random_field(std::mt19937_64& rng, const ManifoldGrid& grid, int order) {
    Field f = Field::constant(grid.size(), grid.dim(), order, random_cplx(rng, 0.5));
    for (int axis = 0; axis < grid.dim(); ++axis) {
        Field x = Field::coordinate(grid, axis, order);
        for (int mode = 1; mode <= 2; ++mode) {
            Field arg = x * (2 * kPi * mode);
            f += arg.cos() * random_cplx(rng, 0.5) + arg.sin() * random_cplx(rng, 0.5);
        }
    }
    return f;
}

inline MatrixUnit random_unit(std::mt19937_64& rng, const WordAlgebra& alg, int radius) {
    auto ball = alg.group()->ball(radius);
    std::uniform_int_distribution<int> idx(0, alg.n() - 1);
    std::uniform_int_distribution<size_t> pick(0, ball.size() - 1);
    return {idx(rng), idx(rng), ball[pick(rng)]};
}

inline Word random_word(std::mt19937_64& rng, const WordAlgebra& alg, int degree, int radius = 1) {
    Word w;
    for (int i = 0; i <= degree; ++i) w.push_back(random_unit(rng, alg, radius));
    return w;
}

/// Random mixed form with up to `terms` terms of manifold degree <= max_p
/// and algebra degree <= max_q.
inline MixedForm random_mixed(std::mt19937_64& rng, const std::shared_ptr<const ManifoldGrid>& grid,
                              const WordAlgebra& alg, int cutoff, int order, int terms, int max_p, int max_q,
                              int radius = 1) {
    MixedForm out(grid, alg, cutoff);
    std::uniform_int_distribution<int> qd(0, max_q);
    std::uniform_int_distribution<FormMask> md(0, (1u << grid->dim()) - 1u);
    for (int t = 0; t < terms; ++t) {
        FormMask m = md(rng);
        if (form_degree(m) > max_p) m = 0;
        out.add(m, random_word(rng, alg, qd(rng), radius), random_field(rng, *grid, order));
    }
    return out;
}

/// Homogeneous random form of bidegree (p, q); on dim-1 grids p is 0 or 1.
inline MixedForm random_homogeneous(std::mt19937_64& rng, const std::shared_ptr<const ManifoldGrid>& grid,
                                    const WordAlgebra& alg, int cutoff, int order, int terms, int p, int q,
                                    int radius = 1) {
    MixedForm out(grid, alg, cutoff);
    std::vector<FormMask> masks;
    for (FormMask m = 0; m < (1u << grid->dim()); ++m)
        if (form_degree(m) == p) masks.push_back(m);
    std::uniform_int_distribution<size_t> pick(0, masks.size() - 1);
    for (int t = 0; t < terms; ++t)
        out.add(masks[pick(rng)], random_word(rng, alg, q, radius), random_field(rng, *grid, order));
    return out;
}

/// Max |coefficient value| of a - b over all terms.
inline double form_distance(const MixedForm& a, const MixedForm& b) { return (a - b).max_abs(); }

}  // namespace testing_support
