#include "ncindex/covering.hpp"

#include <cmath>

#include "ncindex/errors.hpp"

namespace ncindex {

BumpFamily parse_bump_family(const std::string& name) {
    if (name == "mollifier") return BumpFamily::Mollifier;
    if (name == "raised-cosine") return BumpFamily::RaisedCosine;
    if (name == "polynomial-spline") return BumpFamily::PolynomialSpline;
    throw ConfigError("unknown bump family '" + name + "' (mollifier | raised-cosine | polynomial-spline)");
}

std::string to_string(BumpFamily f) {
    switch (f) {
        case BumpFamily::Mollifier: return "mollifier";
        case BumpFamily::RaisedCosine: return "raised-cosine";
        case BumpFamily::PolynomialSpline: return "polynomial-spline";
    }
    return "?";
}

namespace {

Field clamp_step(const Field& t, const std::function<Field(const Field&)>& inner) {
    const Eigen::ArrayXd v = t.values().real();
    const Eigen::Array<bool, Eigen::Dynamic, 1> inside = v > 0.0 && v < 1.0, above = v >= 1.0;
    const int n = t.points(), dim = t.dim(), order = t.order();
    const Field q = inner(Field::select(inside, t, Field::constant(n, dim, order, 0.5)));
    return Field::select(inside, q,
                         Field::select(above, Field::constant(n, dim, order, 1.0), Field::constant(n, dim, order, 0.0)));
}

}  // namespace

Field bump_step(BumpFamily f, const Field& t) {
    switch (f) {
        case BumpFamily::Mollifier: return mollifier_step(t);
        case BumpFamily::RaisedCosine:
            return clamp_step(t, [](const Field& s) { return (1.0 - (s * kPi).cos()) * 0.5; });
        case BumpFamily::PolynomialSpline:
            // 35 t^4 - 84 t^5 + 70 t^6 - 20 t^7: C^3 at both ends.
            return clamp_step(t, [](const Field& s) {
                const Field s2 = s * s, s4 = s2 * s2;
                return s4 * (35.0 + s * (-84.0 + s * (70.0 + s * -20.0)));
            });
    }
    throw PreconditionViolation("unknown bump family");
}

CoverSpec CoverSpec::three_arc(BumpFamily bump, int wrap) {
    CoverSpec s;
    for (int i = 0; i < 3; ++i) s.arcs.push_back({i / 3.0 - 0.25, i / 3.0 + 0.25});
    s.deck = {0, 0, wrap};
    s.bump = bump;
    return s;
}

CoverSpec CoverSpec::trivial() {
    CoverSpec s;
    s.arcs = {{0.0, 1.0}};
    s.deck = {0};
    return s;
}

double CoverData::partition_residual() const {
    Eigen::ArrayXd sum = Eigen::ArrayXd::Zero(grid->size());
    for (const auto& c : chi) sum += c.values().abs2();
    return (sum - 1.0).abs().maxCoeff();
}

int CoverData::deck(int i, int j) const {
    const int n = static_cast<int>(chi.size());
    if (i == j) return 0;
    if ((i + 1) % n == j) return spec.deck[i];
    if ((j + 1) % n == i) return -spec.deck[j];
    return kOutside;
}

CoverData make_cover(const CoverSpec& spec, int grid_size, GroupPtr group, int order) {
    const int n = static_cast<int>(spec.arcs.size());
    if (n == 0 || n == 2) throw BadCover("a cover needs one arc or at least three arcs");
    if (static_cast<int>(spec.deck.size()) != n) throw BadCover("need one deck integer per consecutive overlap");
    CoverData c;
    c.grid = std::make_shared<const ManifoldGrid>(ManifoldGrid::circle(grid_size));
    c.group = std::move(group);
    c.spec = spec;
    const int pts = c.grid->size();
    const Field X = Field::coordinate(*c.grid, 0, order);
    const Eigen::ArrayXd x = c.grid->coordinate(0);

    if (n == 1) {
        if (spec.deck[0] != 0) throw BadCover("the single-arc cover has trivial deck data");
        c.orientation = 0;
        c.chi = {Field::constant(pts, 1, order, 1.0)};
        c.lift = {std::vector<int>(pts, 0)};
        return c;
    }

    int total = 0;
    for (int g : spec.deck) total += g;
    if (total != 1 && total != -1) throw BadCover("deck integers must wind once around the circle (sum +-1)");
    c.orientation = total;

    const auto& A = spec.arcs;
    for (int i = 0; i < n; ++i) {
        if (!(A[i].end > A[i].start) || A[i].end - A[i].start >= 1.0) throw BadCover("arc lengths must lie in (0, 1)");
        if (i + 1 < n && !(A[i + 1].start > A[i].start)) throw BadCover("arcs must be ordered by start point");
    }
    if (!(A[n - 1].start < A[0].start + 1.0)) throw BadCover("arcs must lie within one turn");

    // Overlap widths with the previous and next arc (negative for a gap).
    auto right_width = [&](int i) { return i + 1 < n ? A[i].end - A[i + 1].start : A[n - 1].end - (A[0].start + 1.0); };
    std::vector<int> lift_shift(n, 0);  // G_i = eps sum_{j<i} g_{j,j+1}
    for (int i = 1; i < n; ++i) lift_shift[i] = lift_shift[i - 1] + total * spec.deck[i - 1];

    for (int i = 0; i < n; ++i) {
        const double wl = right_width((i + n - 1) % n), wr = right_width(i);
        if (std::max(wl, 0.0) + std::max(wr, 0.0) > A[i].end - A[i].start)
            throw BadCover("arc " + std::to_string(i) + " meets its neighbours' overlaps");
        Field offset(pts, 1, order);
        Eigen::Array<bool, Eigen::Dynamic, 1> inside(pts);
        std::vector<int> lift(pts, CoverData::kOutside);
        for (int p = 0; p < pts; ++p) {
            const double m = std::ceil(A[i].start - x[p]);
            const double y = x[p] + m;
            inside[p] = y > A[i].start && y < A[i].end;
            offset.coefficients()(p, 0) = inside[p] ? m : 0.0;
            // x - eps g = y - G_i  =>  g = eps (G_i - m).
            if (inside[p]) lift[p] = total * (lift_shift[i] - static_cast<int>(m));
        }
        const Field Y = X + offset;
        Field L = Field::constant(pts, 1, order, 1.0), R = L;
        if (wl > 0) L = (bump_step(spec.bump, (Y + cplx(-A[i].start)) * (1.0 / wl)) * (kPi / 2)).sin();
        if (wr > 0) R = (bump_step(spec.bump, (Y + cplx(-(A[i].end - wr))) * (1.0 / wr)) * (kPi / 2)).cos();
        c.chi.push_back(Field::select(inside, L * R, Field::constant(pts, 1, order, 0.0)));
        c.lift.push_back(std::move(lift));
    }
    return c;
}

namespace {

GroupElement deck_element(const GroupSpec& G, int g) { return G.element({g}); }

}  // namespace

MixedForm build_mf_projection(const CoverData& cover, int cutoff) {
    const double res = cover.partition_residual();
    if (res > 1e-12) throw BadCover("partition of unity residual " + std::to_string(res) + " exceeds 1e-12");
    const int n = static_cast<int>(cover.chi.size());
    if (cover.group->family() == GroupFamily::Free) throw BadCover("deck groups are Z or Z/k");
    // Every pair that meets needs deck data, and triples must satisfy the cocycle condition.
    auto meets = [&](std::initializer_list<int> idx) {
        Eigen::ArrayXd prod = Eigen::ArrayXd::Ones(cover.grid->size());
        for (int i : idx) prod *= cover.chi[i].values().abs();
        return (prod > 0.0).any();
    };
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i != j && cover.deck(i, j) == CoverData::kOutside && meets({i, j}))
                throw BadCover("arcs " + std::to_string(i) + " and " + std::to_string(j) + " overlap without deck data");
            for (int k = 0; k < n; ++k) {
                if (i == j || j == k || i == k || !meets({i, j, k})) continue;
                const int gij = cover.deck(i, j), gjk = cover.deck(j, k), gik = cover.deck(i, k);
                if (gij == CoverData::kOutside || gjk == CoverData::kOutside || gik == CoverData::kOutside ||
                    !(cover.group->multiply(deck_element(*cover.group, gij), deck_element(*cover.group, gjk)) ==
                      deck_element(*cover.group, gik)))
                    throw BadCover("deck data violates the cocycle condition on a triple overlap");
            }
        }
    MixedForm P(cover.grid, WordAlgebra(cover.group, n), cutoff);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const int g = cover.deck(i, j);
            if (g == CoverData::kOutside) continue;
            const Field f = cover.chi[i] * cover.chi[j];
            if (f.is_zero()) continue;
            P.add(0u, Word{{i, j, deck_element(*cover.group, g)}}, f);
        }
    return P;
}

ManifoldForm omega_tau(const CoverData& cover, const GroupCocycle& tau) {
    const int n = tau.degree();
    if (n > cover.grid->dim()) throw DegreeMismatch("omega_tau needs deg tau <= dim M");
    const GroupSpec& G = *cover.group;
    const int pts = cover.grid->size();
    ManifoldForm out;
    if (n == 0) {
        Field sum;
        for (const auto& c : cover.chi) sum += c * c;
        out[0u] = sum * tau({G.identity()});
        return out;
    }
    Field w;
    for (size_t i = 0; i < cover.chi.size(); ++i) {
        const Field dh = (cover.chi[i] * cover.chi[i]).derivative(0);
        Field weight(pts, 1, dh.order());
        for (int p = 0; p < pts; ++p) {
            const int g = cover.lift[i][p];
            if (g != CoverData::kOutside) weight.coefficients()(p, 0) = tau({G.identity(), deck_element(G, g)});
        }
        w += dh * weight;
    }
    out[1u] = w;
    return out;
}

namespace {

Field top_component(const ManifoldForm& f, FormMask mask, int pts, int order) {
    auto it = f.find(mask);
    return it == f.end() ? Field::constant(pts, 1, order, 0.0) : it->second;
}

double factorial(int n) {
    double f = 1;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

// Odd invariant degree-1 cochain for the auxiliary coboundary.
GroupCocycle odd_cochain(const GroupPtr& G) {
    if (G->family() == GroupFamily::Lattice)
        return GroupCocycle(
            G, 1,
            [](const GroupTuple& g) {
                const double d = g[1].word[0] - g[0].word[0];
                return cplx(d * d * d);
            },
            {.invariant = true, .alternating = true});
    const int k = G->rank();
    return GroupCocycle(
        G, 1, [k](const GroupTuple& g) { return cplx(std::sin(2 * kPi * (g[1].word[0] - g[0].word[0]) / k)); },
        {.invariant = true, .alternating = true});
}

}  // namespace

ChernOmegaReport compare_chern_omega(const CoverData& cover, const GroupCocycle& tau) {
    const int n = tau.degree();
    if (n != 1) throw DegreeMismatch("the form identity on the circle is checked in degree 1");
    ChernOmegaReport r;
    r.degree = n;
    r.stated_sign = (n * (n - 1) / 2) % 2 ? -1 : 1;
    const MixedForm P = build_mf_projection(cover, 2);
    r.projection_residual = projection_residual(P);
    const MixedForm ch = chern_even(P, 1);
    const CyclicCochain c = tau_to_c(tau);
    const int pts = cover.grid->size();
    const Field lhs = top_component(pair_cochain_form(c, ch), 1u, pts, 1);
    const Field omega = top_component(omega_tau(cover, tau), 1u, pts, 1);
    const Field rhs = omega * (1.0 / (std::pow(kTwoPiI, n) * factorial(n)));
    const double plus = (lhs - rhs).max_abs(), minus = (lhs + rhs).max_abs();
    r.observed_sign = plus <= minus ? 1 : -1;
    r.residual = std::min(plus, minus);
    r.residual_other = std::max(plus, minus);
    r.lhs_max = lhs.max_abs();
    r.rhs_max = rhs.max_abs();
    r.lhs_integral = lhs.values().sum() * cover.grid->weight();
    r.omega_integral = omega.values().sum() * cover.grid->weight();

    const CyclicCochain c2 = tau_to_c(d_gamma(odd_cochain(cover.group)));
    const Field flat = top_component(pair_cochain_form(c2, ch), 0u, pts, 1);
    r.flat_connection = flat.max_abs() * 2 * kPi;  // undo the -1/(2 pi i) of the Chern coefficient
    return r;
}

double antisymmetry_defect(const CoverData& cover, const GroupCocycle& tau) {
    if (tau.degree() != 1) throw DegreeMismatch("antisymmetry check is for degree 1");
    const GroupPtr G = cover.group;
    const MixedForm ch = chern_even(build_mf_projection(cover, 2), 1);
    const CyclicCochain c = tau_to_c(tau);
    GroupCocycle perturbed(
        G, 1,
        [tau, G](const GroupTuple& g) {
            const double d = G->multiply(G->inverse(g[0]), g[1]).word[0];
            return tau(g) + d * d;
        },
        {.invariant = true, .alternating = false});
    const CyclicCochain raw = tau_to_c(perturbed, false);
    // The perturbation vanishes at (e, e), so c is still normalized.
    const CyclicCochain cp(G, 1, [raw](const GroupTuple& t) { return raw(t); },
                           {.normalized = true, .supported_at_e = true});
    return std::abs(pair_integrated(cp, ch) - pair_integrated(c, ch));
}

HigherIndexRhs higher_index_rhs(const CoverData& cover, const GroupCocycle& tau, int symbol_integer) {
    const int dim = cover.grid->dim();
    if (dim > 1) throw UnsupportedManifold("the index right-hand side is evaluated on the circle only");
    const int n = tau.degree();
    HigherIndexRhs r;
    r.sign_exponent = dim * (dim + 1) / 2 + n * (n - 1) / 2;
    r.omega_integral = integrate_top(omega_tau(cover, tau), *cover.grid);
    const double sign = r.sign_exponent % 2 ? -1.0 : 1.0;
    r.value = sign / (std::pow(kTwoPiI, n) * factorial(n)) * double(symbol_integer) * r.omega_integral;
    return r;
}

GroupCocycle linear_cocycle(GroupPtr z) {
    if (z->family() != GroupFamily::Lattice || z->rank() != 1) throw PreconditionViolation("linear cocycle lives on Z");
    return GroupCocycle(
        std::move(z), 1, [](const GroupTuple& g) { return cplx(g[1].word[0] - g[0].word[0]); },
        {.invariant = true, .alternating = true});
}

}  // namespace ncindex
