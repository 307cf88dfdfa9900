#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "ncindex/chern.hpp"
#include "ncindex/covering.hpp"
#include "ncindex/errors.hpp"
#include "ncindex/runner.hpp"
#include "ncindex/specflow.hpp"
#include "ncindex/toeplitz.hpp"

namespace py = pybind11;
using namespace ncindex;

namespace {

py::dict toeplitz_values(const TauIndexReport& rep, const DynsysValue& dyn, double winding, int bandwidth) {
    py::dict d;
    d["tau_index"] = rep.value;
    d["gap_ratio"] = rep.gap_ratio;
    d["formula"] = dyn.value;
    d["alternative"] = dyn.alternative;
    d["winding"] = winding;
    d["bandwidth"] = bandwidth;
    return d;
}

py::dict toeplitz_circle(int m, double a, int fourier_cutoff, int grid_size, double kernel_threshold, int samples) {
    CircleFunctions C(grid_size);
    const auto u = a == 0 ? CircleFunctions::character(m) : CircleFunctions::perturbed_character(m, a);
    const auto tp = assemble_toeplitz(C, u, fourier_cutoff, kernel_threshold);
    return toeplitz_values(tau_index_report(tp), dynsys_formula(C, u), sign_adjusted_winding(C, u, samples),
                           tp.bandwidth);
}

py::dict toeplitz_rotation(int p, int q, const std::vector<std::tuple<int, int, cplx>>& monomials, int fourier_cutoff,
                           double kernel_threshold, int samples) {
    RotationAlgebra A(p, q);
    RotationAlgebra::Element u;
    for (const auto& [m, n, c] : monomials) u = A.add(u, RotationAlgebra::monomial(m, n, c));
    const auto tp = assemble_toeplitz(A, u, fourier_cutoff, kernel_threshold);
    return toeplitz_values(tau_index_report(tp), dynsys_formula(A, u), sign_adjusted_winding(A, u, samples),
                           tp.bandwidth);
}

cplx bott_integral(int n) {
    const auto tr = trace_e_cochain(make_group(GroupSpec::trivial()));
    return pair_integrated(tr, chern_even(bott_projector(n, 1), 1));
}

py::dict covering_check(int grid_size, const std::string& bump, int wrap) {
    auto Z = make_group(GroupSpec::lattice(1));
    const auto cover = make_cover(CoverSpec::three_arc(parse_bump_family(bump), wrap), grid_size, Z);
    const auto r = compare_chern_omega(cover, linear_cocycle(Z));
    py::dict d;
    d["residual"] = r.residual;
    d["residual_other"] = r.residual_other;
    d["observed_sign"] = r.observed_sign;
    d["flat_connection"] = r.flat_connection;
    d["omega_integral"] = r.omega_integral;
    d["projection_residual"] = r.projection_residual;
    return d;
}

py::dict odd_index(int fourier_cutoff, int m, double margin, double crossing_threshold) {
    const MatrixXc D = truncated_dirac(fourier_cutoff);
    const MatrixXc A = 0.5 * MatrixXc::Identity(D.rows(), D.rows());
    const auto r = compare_odd_index(D, mode_shift(fourier_cutoff, m), A, interior_weights(fourier_cutoff, margin),
                                 crossing_threshold);
    py::dict d;
    d["spectral_flow"] = r.spectral_flow;
    d["relative_index"] = r.relative_index;
    d["orientation"] = r.orientation;
    d["match"] = r.match;
    return d;
}

int run_config(const std::filesystem::path& config, const std::filesystem::path& out, std::optional<std::uint64_t> seed,
               bool stretch) {
    RunOptions opts;
    opts.config = config;
    opts.out = out;
    opts.seed = seed;
    opts.stretch = stretch;
    std::string err;
    const int code = run(opts, &err);
    if (code == 1) throw ConfigError(err);
    return code;
}

}  // namespace

PYBIND11_MODULE(_ncindex, m) {
    m.doc() = "Index computations for group algebras, covers, Toeplitz operators and spectral flow";

    auto base = py::register_exception<Error>(m, "NcIndexError");
    py::register_exception<TruncationOverflow>(m, "TruncationOverflow", base);
    py::register_exception<NotInvertibleInBudget>(m, "NotInvertibleInBudget", base);
    py::register_exception<UnsupportedDegree>(m, "UnsupportedDegree", base);
    py::register_exception<NotAProjection>(m, "NotAProjection", base);
    py::register_exception<NotUnitary>(m, "NotUnitary", base);
    py::register_exception<BadCover>(m, "BadCover", base);
    py::register_exception<DegreeMismatch>(m, "DegreeMismatch", base);
    py::register_exception<UnsupportedManifold>(m, "UnsupportedManifold", base);
    py::register_exception<IllConditioned>(m, "IllConditioned", base);
    py::register_exception<InsufficientTruncation>(m, "InsufficientTruncation", base);
    py::register_exception<PhaseJump>(m, "PhaseJump", base);
    py::register_exception<EndpointDegenerate>(m, "EndpointDegenerate", base);
    py::register_exception<CrossingUnresolved>(m, "CrossingUnresolved", base);
    py::register_exception<PreconditionViolation>(m, "PreconditionViolation", base);
    py::register_exception<ConfigError>(m, "ConfigError", base);

    m.def("toeplitz_circle", &toeplitz_circle, py::arg("m"), py::arg("a") = 0.0, py::arg("fourier_cutoff") = 64,
          py::arg("grid_size") = 256, py::arg("kernel_threshold") = 1e-6, py::arg("winding_samples") = 256,
          "tau-index, formula and winding for x -> exp(i(-2 pi m x + a sin 2 pi x)) on C(S^1)");
    m.def("toeplitz_rotation", &toeplitz_rotation, py::arg("p"), py::arg("q"), py::arg("monomials"),
          py::arg("fourier_cutoff") = 64, py::arg("kernel_threshold") = 1e-6, py::arg("winding_samples") = 64,
          "Same for u = sum c U^m V^n in the rotation algebra A_{p/q}; monomials are (m, n, c)");
    m.def("winding_oracle", &winding_oracle, py::arg("loop"), py::arg("samples"),
          "Winding number of det loop(t) over [0, 1]");
    m.def("bott_integral", &bott_integral, py::arg("grid_size"), "Integral of the even Chern form of the Bott projector");
    m.def("covering_check", &covering_check, py::arg("grid_size") = 1024, py::arg("bump") = "mollifier",
          py::arg("wrap") = 1, "Compares c_tau(ch P) with omega_tau on the three-arc cover of the circle");
    m.def(
        "spectral_flow",
        [](const MatrixXc& a, const MatrixXc& b, double threshold) {
            return spectral_flow(SelfAdjointPath::linear(a, b, threshold));
        },
        py::arg("a"), py::arg("b"), py::arg("crossing_threshold") = 0.25,
        "Spectral flow along the straight path from a to b");
    m.def(
        "relative_index", [](const MatrixXc& P, const MatrixXc& Q, double eps) { return relative_index(P, Q, eps); },
        py::arg("P"), py::arg("Q"), py::arg("eps") = 1e-6, "Index of QP: ran P -> ran Q");
    m.def("compare_odd_index", &odd_index, py::arg("fourier_cutoff") = 64, py::arg("m") = 1, py::arg("margin") = 0.1,
          py::arg("crossing_threshold") = 0.5,
          "ind(P, U P U*) against spectral flow for the truncated Dirac operator and U = e^{-2 pi i m x}");
    m.def("run_config", &run_config, py::arg("config"), py::arg("out"), py::arg("seed") = py::none(),
          py::arg("stretch") = false, "Runs a config file; returns 0 if all checks pass and 2 otherwise");
}
