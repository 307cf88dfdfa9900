// Acceptance run: one PASS/FAIL line per criterion with the observed values.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "ncindex/chern.hpp"
#include "ncindex/covering.hpp"
#include "ncindex/cyclic.hpp"
#include "ncindex/errors.hpp"
#include "ncindex/specflow.hpp"
#include "ncindex/toeplitz.hpp"
#include "support.hpp"

using namespace ncindex;
using namespace testing_support;

namespace {

using GridPtr = std::shared_ptr<const ManifoldGrid>;

GridPtr circle(int n) { return std::make_shared<const ManifoldGrid>(ManifoldGrid::circle(n)); }
GridPtr square(int n) { return std::make_shared<const ManifoldGrid>(ManifoldGrid::square(n)); }
GridPtr point() { return std::make_shared<const ManifoldGrid>(ManifoldGrid::point()); }

struct Outcome {
    bool pass = true;
    std::ostringstream detail;
    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " [failed: " << what << "]";
        }
    }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void toeplitz_unit_winding(Outcome& o) {
    CircleFunctions C(256);
    const auto u = CircleFunctions::character(1);
    const double tau = tau_index(assemble_toeplitz(C, u, 64));
    const cplx dyn = dynsys_formula(C, u).value;
    o.detail << "tau_index=" << tau << " dynsys=" << dyn.real() << "+" << dyn.imag() << "i";
    o.require(std::lround(tau) == 1, "rounds to 1");
    o.require(std::abs(tau - 1.0) <= 0.05, "pre-rounding deviation <= 0.05");
    o.require(std::abs(cplx(tau) - dyn) <= 1e-9, "matches dynsys to 1e-9");
}

void winding_sweep(Outcome& o) {
    CircleFunctions C(256);
    double worst = 0;
    for (int m = -3; m <= 3; ++m) {
        const auto u = CircleFunctions::character(m);
        const double tau = tau_index(assemble_toeplitz(C, u, 64));
        const cplx dyn = dynsys_formula(C, u).value;
        const double w = sign_adjusted_winding(C, u, 256);
        worst = std::max({worst, std::abs(cplx(tau) - dyn), std::abs(tau - w), std::abs(dyn - w)});
        o.require(std::lround(tau) == m && std::lround(dyn.real()) == m && std::lround(w) == m,
                  "all three round to m=" + std::to_string(m));
    }
    o.detail << "max pairwise deviation=" << worst;
    o.require(worst <= 0.05, "pairwise deviation <= 0.05");
}

void rotation_algebra(Outcome& o) {
    double worst = 0;
    int cases = 0;
    for (int q = 1; q <= 5; ++q)
        for (int p = 0; p < q; ++p) {
            if (std::gcd(p, q) != 1) continue;
            RotationAlgebra A(p, q);
            const double tau = tau_index(assemble_toeplitz(A, A.V(), 64));
            const cplx dyn = dynsys_formula(A, A.V()).value;
            o.require(std::lround(tau) == -1, "tau rounds to -1 for p/q=" + std::to_string(p) + "/" + std::to_string(q));
            worst = std::max(worst, std::abs(cplx(tau) - dyn));
            ++cases;
        }
    o.detail << cases << " rotation numbers with q<=5, max |tau-dynsys|=" << worst;
    o.require(worst <= 0.05, "matches dynsys to 0.05");
}

void bott_normalization(Outcome& o) {
    const auto tr = trace_e_cochain(make_group(GroupSpec::trivial()));
    const double e64 = std::abs(pair_integrated(tr, chern_even(bott_projector(64, 1), 1)) - 1.0);
    const double e128 = std::abs(pair_integrated(tr, chern_even(bott_projector(128, 1), 1)) - 1.0);
    o.detail << "|int ch - 1|: 64^2 " << e64 << ", 128^2 " << e128;
    o.require(e64 <= 2e-3, "64^2 within 2e-3");
    o.require(e128 <= 2e-4, "128^2 within 2e-4");
}

void covering_identity(Outcome& o) {
    auto Z = make_group(GroupSpec::lattice(1));
    const auto tau = linear_cocycle(Z);
    double prev = std::numeric_limits<double>::infinity();
    for (int n : {256, 512, 1024}) {
        const auto r = compare_chern_omega(make_cover(CoverSpec::three_arc(), n, Z), tau);
        o.detail << "grid " << n << ": residual " << r.residual << " flat " << r.flat_connection << "; ";
        // Monotone up to a roundoff floor of 1e-12.
        o.require(r.residual <= std::max(prev, 1e-12), "residual non-increasing at " + std::to_string(n));
        prev = r.residual;
        if (n == 1024) {
            o.require(r.residual <= 1e-8, "residual <= 1e-8 at 1024");
            o.require(r.flat_connection <= 1e-9, "flat-connection terms <= 1e-9");
            o.detail << "sign " << r.observed_sign;
        }
    }
}

void normalization_bridge(Outcome& o) {
    std::mt19937_64 rng(2024);
    auto pt = point();
    double worst = 0, worst_zero = 0;
    int checks = 0, zeros = 0;
    for (int k = 1; k <= 6; ++k) {
        auto G = make_group(GroupSpec::cyclic(k));
        for (int it = 0; it < 4; ++it) {
            const MixedForm P = random_character_projection(rng, pt, G, 4, 0);
            const auto ch = chern_even(P, 2);
            const auto lam = chern_lambda(sample_matrix(P), 2);
            double fact = 1;
            for (int m = 0; m <= 2; ++m) {
                if (m > 0) fact *= m;
                const auto phi = random_cyclic_cocycle(G, 2 * m, rng);
                const cplx lhs = phi.evaluate(lam[m]);
                const cplx rhs = std::pow(kTwoPiI, m) * fact * pair_integrated(phi, ch);
                // Pairings that vanish identically are compared in absolute terms.
                const double scale = std::max(std::abs(lhs), std::abs(rhs));
                if (scale < 1e-12) {
                    worst_zero = std::max(worst_zero, std::abs(lhs - rhs));
                    ++zeros;
                } else {
                    worst = std::max(worst, std::abs(lhs - rhs) / scale);
                    ++checks;
                }
            }
        }
    }
    o.detail << checks << " pairings over Z/k, k<=6, m<=2: max relative error " << worst << "; " << zeros
             << " vanishing pairings: max absolute difference " << worst_zero;
    o.require(worst <= 1e-9, "relative error <= 1e-9");
    o.require(worst_zero <= 1e-14, "vanishing pairings agree to 1e-14");
}

void spectral_flow_check(Outcome& o) {
    const int fc = 64;
    const MatrixXc D = truncated_dirac(fc);
    const MatrixXc I = MatrixXc::Identity(D.rows(), D.rows());
    const int translation = spectral_flow(SelfAdjointPath::linear(D - 0.5 * I, D + 0.5 * I, 0.5));
    o.detail << "translation spfl=" << translation;
    o.require(translation == 1, "translation path gives 1");
    for (int m : {1, 2}) {
        const auto r = compare_odd_index(D, mode_shift(fc, m), 0.5 * I, interior_weights(fc, 0.1));
        o.detail << "; m=" << m << ": spfl " << r.spectral_flow << ", ind(P,UPU*) " << r.relative_index
                 << " (orientation " << r.orientation << ")";
        o.require(r.match, "compare_odd_index matches for m=" + std::to_string(m));
        o.require(std::abs(r.spectral_flow) == m, "magnitude m");
    }
}

// Property suites, each on at least 200 seeded instances.
void property_suites(Outcome& o) {
    constexpr int kInstances = 200;
    std::mt19937_64 rng(8);
    double dd = 0, leibniz = 0, closed = 0, idem = 0, trace_cyc = 0;
    bool cochain_exact = true, roundtrip_exact = true;

    for (int it = 0; it < kInstances; ++it) {
        auto grid = it % 2 ? circle(16) : square(6);
        WordAlgebra alg(make_group(it % 3 ? GroupSpec::cyclic(3) : GroupSpec::lattice(1)), 2);
        const MixedForm w = random_mixed(rng, grid, alg, 4, 2, 4, 2, 2);
        dd = std::max(dd, w.d_tot().d_tot().max_abs());
    }
    for (int it = 0; it < kInstances; ++it) {
        auto grid = it % 2 ? circle(12) : square(5);
        WordAlgebra alg(make_group(it % 3 ? GroupSpec::cyclic(2) : GroupSpec::free(2, 6)), 2);
        const int p1 = it % 2, q1 = it % 2, p2 = (it / 2) % 2, q2 = (it / 4) % 2;
        const MixedForm a = random_homogeneous(rng, grid, alg, 6, 2, 2, p1, q1);
        const MixedForm b = random_homogeneous(rng, grid, alg, 6, 2, 2, p2, q2);
        const double sign = (p1 + q1) % 2 ? -1.0 : 1.0;
        leibniz = std::max(leibniz, form_distance((a * b).d_tot(), a.d_tot() * b + sign * (a * b.d_tot())));
    }
    {
        auto G = make_group(GroupSpec::cyclic(3));
        std::vector<CyclicCochain> cocycles;
        for (int n = 0; n <= 3; ++n)
            for (auto& phi : cyclic_cocycle_basis(G, n)) cocycles.push_back(phi);
        auto grid = circle(16);
        for (int it = 0; it < kInstances; ++it) {
            if (it % 2 == 0) {
                closed = std::max(closed, closedness_defect(chern_even(random_character_projection(rng, grid, G, 3, 3), 2), cocycles));
            } else {
                closed = std::max(closed, closedness_defect(chern_odd(random_character_unitary(rng, grid, G, 3, 3), 2), cocycles));
            }
        }
    }
    for (int it = 0; it < kInstances; ++it) {
        auto G = make_group(GroupSpec::cyclic(2 + it % 4));
        const int n = it % 3;
        const auto bb = b_transpose(b_transpose(random_integer_cochain(rng, G, n, it % 2 == 0)));
        const auto tau = random_invariant_cochain(rng, G, n + 1);
        const auto d2 = d_gamma(d_gamma(tau));
        for (const auto& t : all_tuples(*G, n + 3)) cochain_exact = cochain_exact && bb(t) == cplx(0.0);
        for (const auto& t : all_tuples(*G, n + 4)) cochain_exact = cochain_exact && d2(t) == cplx(0.0);
        const auto ct = tau_to_c(tau, false);
        const auto back = c_to_tau(ct);
        for (const auto& h : all_tuples(*G, n + 2)) roundtrip_exact = roundtrip_exact && back(h) == tau(h);
    }
    {
        auto Z = make_group(GroupSpec::lattice(1));
        const BumpFamily families[] = {BumpFamily::Mollifier, BumpFamily::RaisedCosine, BumpFamily::PolynomialSpline};
        for (int it = 0; it < kInstances; ++it) {
            const int n = 32 + 8 * (it % 16);
            if (it % 2 == 0) {
                const auto cover = make_cover(CoverSpec::three_arc(families[it % 3], it % 4 ? 1 : -1), n, Z);
                idem = std::max(idem, projection_residual(build_mf_projection(cover)));
            } else {
                Eigen::HouseholderQR<MatrixXc> qr(MatrixXc::Random(1 + it % 4, 1 + it % 4));
                const MatrixXc U = qr.householderQ();
                idem = std::max(idem, pu_projection_residual(pu_projection({U}, ChiTriple::standard(n))));
            }
        }
    }
    {
        const GroupSpec specs[] = {GroupSpec::lattice(2), GroupSpec::cyclic(6), GroupSpec::free(2, 6)};
        for (int it = 0; it < kInstances; ++it) {
            auto G = make_group(specs[it % 3]);
            auto a = random_element(rng, G, 3), b = random_element(rng, G, 3);
            trace_cyc = std::max(trace_cyc, std::abs(trace_e(a * b - b * a)));
            RotationAlgebra A(1 + it % 2, 3 + it % 3);
            RotationAlgebra::Element x, y;
            std::uniform_int_distribution<int> e(-2, 2);
            for (int t = 0; t < 3; ++t) {
                x = A.add(x, RotationAlgebra::monomial(e(rng), e(rng), random_cplx(rng)));
                y = A.add(y, RotationAlgebra::monomial(e(rng), e(rng), random_cplx(rng)));
            }
            trace_cyc = std::max(trace_cyc, A.trace_residual(x, y));
        }
    }
    o.detail << "d_tot^2 " << dd << ", Leibniz " << leibniz << ", closedness " << closed << ", b^t^2/d^2 exact "
             << cochain_exact << ", roundtrip exact " << roundtrip_exact << ", idempotence " << idem
             << ", trace cyclicity " << trace_cyc << " (" << kInstances << " instances each)";
    o.require(dd <= 1e-9, "d_tot^2 = 0");
    o.require(leibniz <= 1e-9, "Leibniz");
    o.require(closed <= 1e-9, "closedness of ch_even and ch_odd");
    o.require(cochain_exact, "b^t^2 = 0 and d_Gamma^2 = 0 exactly");
    o.require(roundtrip_exact, "tau <-> c_tau roundtrip exact");
    o.require(idem <= 1e-12, "P and P(U) idempotence");
    o.require(trace_cyc <= 1e-12, "trace cyclicity");
}

struct Criterion {
    int number;
    const char* name;
    double time_limit;  // seconds; 0 means none
    std::function<void(Outcome&)> body;
};

}  // namespace

int main() {
    const Criterion criteria[] = {
        {1, "Toeplitz index of e^{-2 pi i t} on C(S^1)", 10, toeplitz_unit_winding},
        {2, "winding sweep m = -3..3", 60, winding_sweep},
        {3, "rotation algebra, u = V", 0, rotation_algebra},
        {4, "Bott projector normalization", 0, bott_normalization},
        {5, "three-arc cover: c_tau(ch P) against omega_tau", 30, covering_identity},
        {6, "normalization bridge (2 pi i)^m m!", 0, normalization_bridge},
        {7, "spectral flow and relative index", 30, spectral_flow_check},
        {8, "property suites", 0, property_suites},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        Outcome o;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            c.body(o);
        } catch (const Error& e) {
            o.pass = false;
            o.detail << " [" << e.kind() << ": " << e.what() << "]";
        }
        const double dt = seconds_since(t0);
        if (c.time_limit > 0 && dt >= c.time_limit) o.require(false, "runtime limit " + std::to_string(c.time_limit) + " s");
        std::printf("%s %d: %s (%.2f s) %s\n", o.pass ? "PASS" : "FAIL", c.number, c.name, dt, o.detail.str().c_str());
        std::fflush(stdout);
        failures += o.pass ? 0 : 1;
    }
    return failures == 0 ? 0 : 1;
}
