#include "ncindex/runner.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <future>
#include <set>
#include <sstream>

#include "ncindex/chern.hpp"
#include "ncindex/covering.hpp"
#include "ncindex/cyclic.hpp"
#include "ncindex/errors.hpp"
#include "ncindex/specflow.hpp"
#include "ncindex/toeplitz.hpp"

namespace ncindex {

using nlohmann::json;

namespace {

json kind_defaults(const std::string& kind) {
    if (kind == "toeplitz")
        return {{"system", "circle"},       {"u", {{"named", "character"}, {"m", 1}}},
                {"p", 1},                   {"q", 1},
                {"fourier_cutoff", 64},     {"grid_size", 256},
                {"kernel_threshold", 1e-6}, {"winding_samples", 256},
                {"expected", nullptr},      {"tolerance", 0.05}};
    if (kind == "chern-check")
        return {{"check", "bott"}, {"grid_size", 64}, {"m", 1}, {"expected", nullptr}, {"tolerance", 2e-3}};
    if (kind == "covering-check")
        return {{"arcs", nullptr},     {"deck", nullptr},       {"bump", "mollifier"}, {"wrap", 1},
                {"grid_size", 1024},   {"manifold", "circle"}, {"tolerance", 1e-8}};
    if (kind == "specflow")
        return {{"check", "odd-index"},         {"fourier_cutoff", 64}, {"m", 1},          {"margin", 0.1},
                {"crossing_threshold", 0.5}, {"expected", nullptr},  {"tolerance", 0.1}};
    if (kind == "cyclic-check") return {{"k", 3}, {"max_degree", 4}, {"instances", 20}, {"tolerance", 1e-9}};
    throw ConfigError("unknown experiment kind '" + kind + "'");
}

bool same_type(const json& def, const json& v) {
    if (def.is_null()) return true;
    if (def.is_number()) return v.is_number();
    return def.type() == v.type();
}

template <class T>
T get_param(const json& p, const char* key) {
    try {
        return p.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("parameter '") + key + "': " + e.what());
    }
}

void require_positive(const json& p, const char* key) {
    if (p.contains(key) && p.at(key).is_number() && !(p.at(key).get<double>() > 0))
        throw ConfigError(std::string("'") + key + "' must be strictly positive");
}

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
    if (!obj.is_object()) throw ConfigError(where + " must be an object");
    for (const auto& [k, v] : obj.items())
        if (!allowed.count(k)) throw ConfigError("unknown field '" + k + "' in " + where);
}

// ---------------------------------------------------------------------------
// Unitaries from config.

CircleFunctions::Function circle_unitary(const json& u) {
    check_keys(u, {"named", "m", "a", "fourier"}, "u");
    if (u.contains("fourier")) {
        std::vector<std::pair<int, cplx>> coeffs;
        for (const auto& c : u.at("fourier")) {
            if (!c.is_array() || c.size() != 3) throw ConfigError("fourier entries are [n, re, im]");
            coeffs.push_back({c[0].get<int>(), {c[1].get<double>(), c[2].get<double>()}});
        }
        return [coeffs](const Field& x) {
            Field f = Field::constant(x.points(), x.dim(), x.order(), 0.0);
            for (const auto& [n, c] : coeffs) f += (x * cplx(0, 2 * kPi * n)).exp() * c;
            return f;
        };
    }
    const std::string named = u.value("named", "character");
    const int m = u.value("m", 1);
    if (named == "character") return CircleFunctions::character(m);
    if (named == "perturbed") return CircleFunctions::perturbed_character(m, u.value("a", 0.5));
    throw ConfigError("unknown circle unitary '" + named + "'");
}

RotationAlgebra::Element rotation_unitary(const RotationAlgebra& A, const json& u) {
    check_keys(u, {"named", "monomials"}, "u");
    if (u.contains("monomials")) {
        RotationAlgebra::Element e;
        for (const auto& c : u.at("monomials")) {
            if (!c.is_array() || c.size() != 4) throw ConfigError("monomial entries are [m, n, re, im]");
            e = A.add(e, RotationAlgebra::monomial(c[0].get<int>(), c[1].get<int>(),
                                                   {c[2].get<double>(), c[3].get<double>()}));
        }
        return e;
    }
    const std::string named = u.value("named", "V");
    if (named == "V") return A.V();
    if (named == "U") return A.U();
    throw ConfigError("unknown rotation unitary '" + named + "'");
}

// ---------------------------------------------------------------------------
// Experiment bodies.

struct Sink {
    ReportRow& row;
    double tol;
    void computed(const std::string& k, double v) { row.computed.push_back({k, v}); }
    void oracle(const std::string& k, double v) { row.oracle.push_back({k, v}); }
    void residual(const std::string& k, double v, double t) { row.residuals.push_back({k, v, t}); }
    void residual(const std::string& k, double v) { residual(k, v, tol); }
};

const std::vector<double> kShifts = {0.1, 0.37, 0.8};

void run_toeplitz(const json& p, Sink& s) {
    const std::string system = get_param<std::string>(p, "system");
    const int fc = get_param<int>(p, "fourier_cutoff");
    const double eps = get_param<double>(p, "kernel_threshold");
    const int samples = get_param<int>(p, "winding_samples");
    TauIndexReport rep;
    DynsysValue dyn;
    double winding = 0;
    int bandwidth = 0;
    if (system == "circle") {
        CircleFunctions C(get_param<int>(p, "grid_size"));
        const auto u = circle_unitary(p.at("u"));
        const auto tp = assemble_toeplitz(C, u, fc, eps);
        bandwidth = tp.bandwidth;
        rep = tau_index_report(tp);
        dyn = dynsys_formula(C, u);
        winding = sign_adjusted_winding(C, u, samples);
        s.residual("derivation", C.derivation_residual(u, u), 1e-10);
        s.residual("invariance", C.invariance_residual(u, kShifts), 1e-10);
    } else if (system == "rotation") {
        RotationAlgebra A(get_param<int>(p, "p"), get_param<int>(p, "q"));
        const auto u = rotation_unitary(A, p.at("u"));
        const auto tp = assemble_toeplitz(A, u, fc, eps);
        bandwidth = tp.bandwidth;
        rep = tau_index_report(tp);
        dyn = dynsys_formula(A, u);
        winding = sign_adjusted_winding(A, u, samples);
        s.residual("derivation", A.derivation_residual(u, A.star(u)), 1e-10);
        s.residual("invariance", A.invariance_residual(u, kShifts), 1e-10);
    } else {
        throw ConfigError("unknown system '" + system + "'");
    }
    s.computed("tau_index", rep.value);
    s.computed("formula_re", dyn.value.real());
    s.computed("formula_im", dyn.value.imag());
    s.computed("winding", winding);
    s.computed("gap_ratio", rep.gap_ratio);
    s.computed("bandwidth", bandwidth);
    s.residual("tau_vs_formula", std::abs(cplx(rep.value) - dyn.value));
    s.residual("tau_vs_winding", std::abs(rep.value - winding));
    s.residual("formula_vs_alternative", std::abs(dyn.value - dyn.alternative));
    s.residual("tau_integrality", std::abs(rep.value - std::round(rep.value)));
    if (!p.at("expected").is_null()) {
        const double e = get_param<double>(p, "expected");
        s.oracle("expected", e);
        s.residual("tau_vs_expected", std::abs(rep.value - e));
    }
}

void run_chern(const json& p, Sink& s) {
    const std::string check = get_param<std::string>(p, "check");
    const int n = get_param<int>(p, "grid_size");
    auto trivial = make_group(GroupSpec::trivial());
    const auto tr = trace_e_cochain(trivial);
    cplx v;
    double expected;
    if (check == "bott") {
        const MixedForm P = bott_projector(n, 1);
        s.residual("projection", projection_residual(P), 1e-12);
        v = pair_integrated(tr, chern_even(P, 1));
        expected = p.at("expected").is_null() ? 1.0 : get_param<double>(p, "expected");
    } else if (check == "odd-winding") {
        const int m = get_param<int>(p, "m");
        auto grid = std::make_shared<const ManifoldGrid>(ManifoldGrid::circle(n));
        MixedForm u(grid, WordAlgebra(trivial, 1), 1);
        u.add(0u, Word{{0, 0, trivial->identity()}}, (Field::coordinate(*grid, 0, 2) * cplx(0, -2 * kPi * m)).exp());
        s.residual("unitary", unitary_residual(u), 1e-12);
        v = pair_integrated(tr, chern_odd(u, 1));
        expected = p.at("expected").is_null() ? double(m) : get_param<double>(p, "expected");
    } else {
        throw ConfigError("unknown chern check '" + check + "'");
    }
    s.computed("integral_re", v.real());
    s.computed("integral_im", v.imag());
    s.oracle("expected", expected);
    s.residual("integral_vs_expected", std::abs(v - expected));
}

void run_covering(const json& p, Sink& s) {
    if (get_param<std::string>(p, "manifold") != "circle")
        throw UnsupportedManifold("covering checks beyond the circle are not implemented");
    CoverSpec spec = CoverSpec::three_arc(parse_bump_family(get_param<std::string>(p, "bump")), get_param<int>(p, "wrap"));
    if (!p.at("arcs").is_null()) {
        spec.arcs.clear();
        for (const auto& a : p.at("arcs")) {
            if (!a.is_array() || a.size() != 2) throw ConfigError("arcs are [start, end] pairs");
            spec.arcs.push_back({a[0].get<double>(), a[1].get<double>()});
        }
    }
    if (!p.at("deck").is_null()) spec.deck = p.at("deck").get<std::vector<int>>();
    if (spec.deck.size() != spec.arcs.size()) throw ConfigError("deck must have one entry per arc");
    auto Z = make_group(GroupSpec::lattice(1));
    const auto cover = make_cover(spec, get_param<int>(p, "grid_size"), Z);
    s.computed("partition_residual", cover.partition_residual());
    const auto r = compare_chern_omega(cover, linear_cocycle(Z));
    s.computed("observed_sign", r.observed_sign);
    s.computed("residual_other_sign", r.residual_other);
    s.computed("lhs_integral_im", r.lhs_integral.imag());
    s.computed("omega_integral", r.omega_integral.real());
    s.oracle("orientation", cover.orientation);
    s.residual("chern_vs_omega", r.residual);
    s.residual("flat_connection", r.flat_connection, 1e-9);
    s.residual("projection", r.projection_residual, 1e-12);
    s.residual("omega_vs_orientation", std::abs(r.omega_integral - double(cover.orientation)));
}

void run_specflow(const json& p, Sink& s) {
    const std::string check = get_param<std::string>(p, "check");
    const int fc = get_param<int>(p, "fourier_cutoff");
    const double delta = get_param<double>(p, "crossing_threshold");
    const MatrixXc D = truncated_dirac(fc);
    const int n = D.rows();
    const MatrixXc I = MatrixXc::Identity(n, n);
    if (check == "translation") {
        const double expected = p.at("expected").is_null() ? 1.0 : get_param<double>(p, "expected");
        const auto r = spectral_flow_report(SelfAdjointPath::linear(D - 0.5 * I, D + 0.5 * I, delta));
        s.computed("spectral_flow", r.value);
        s.computed("intervals", r.intervals);
        s.oracle("expected", expected);
        s.residual("spfl_vs_expected", std::abs(r.value - expected));
    } else if (check == "odd-index") {
        const int m = get_param<int>(p, "m");
        const double expected = p.at("expected").is_null() ? double(m) : get_param<double>(p, "expected");
        const auto r = compare_odd_index(D, mode_shift(fc, m), 0.5 * I, interior_weights(fc, get_param<double>(p, "margin")),
                                     delta);
        s.computed("spectral_flow", r.spectral_flow);
        s.computed("relative_index", r.relative_index);
        s.computed("orientation", r.orientation);
        s.oracle("expected", expected);
        s.residual("relative_vs_spfl", std::abs(r.relative_index_weighted - r.orientation * r.spectral_flow_weighted));
        s.residual("spfl_vs_expected", std::abs(r.spectral_flow_weighted - expected));
        s.residual("match", r.match ? 0.0 : 1.0, 0.5);
    } else {
        throw ConfigError("unknown specflow check '" + check + "'");
    }
}

double max_on_tuples(const std::vector<GroupTuple>& ts, const std::function<cplx(const GroupTuple&)>& f) {
    double m = 0;
    for (const auto& t : ts) m = std::max(m, std::abs(f(t)));
    return m;
}

void run_cyclic(const json& p, Sink& s, std::uint64_t seed) {
    const int k = get_param<int>(p, "k");
    const int max_degree = get_param<int>(p, "max_degree");
    const int instances = get_param<int>(p, "instances");
    if (k < 1 || max_degree < 0 || max_degree > 4 || instances < 1)
        throw ConfigError("cyclic-check needs k >= 1, 0 <= max_degree <= 4, instances >= 1");
    std::mt19937_64 rng(seed);
    auto G = make_group(GroupSpec::cyclic(k));
    auto pt = std::make_shared<const ManifoldGrid>(ManifoldGrid::point());
    const int m_max = max_degree / 2;
    double bridge = 0;
    for (int it = 0; it < instances; ++it) {
        const MixedForm P = random_character_projection(rng, pt, G, max_degree, 0);
        const auto ch = chern_even(P, m_max);
        const auto lam = chern_lambda(sample_matrix(P), m_max);
        double fact = 1;
        for (int m = 0; m <= m_max; ++m) {
            if (m > 0) fact *= m;
            const auto phi = random_cyclic_cocycle(G, 2 * m, rng);
            const cplx lhs = phi.evaluate(lam[m]);
            const cplx rhs = std::pow(kTwoPiI, m) * fact * pair_integrated(phi, ch);
            bridge = std::max(bridge, std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs)));
        }
    }
    double btb = 0, dd = 0;
    for (int n = 0; n <= std::min(max_degree, 2); ++n) {
        const auto phi = random_integer_cochain(rng, G, n, false);
        const auto bb = b_transpose(b_transpose(phi));
        btb = std::max(btb, max_on_tuples(all_tuples(*G, n + 3), [&](const GroupTuple& t) { return bb(t); }));
        const auto tau = random_invariant_cochain(rng, G, n);
        const auto d2 = d_gamma(d_gamma(tau));
        dd = std::max(dd, max_on_tuples(all_tuples(*G, n + 3), [&](const GroupTuple& t) { return d2(t); }));
    }
    s.computed("instances", instances);
    s.residual("bridge_error", bridge);
    s.residual("bt_squared", btb, 0.0);
    s.residual("dgamma_squared", dd, 0.0);
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
    return out + "\"";
}

std::string join_pairs(const std::vector<std::pair<std::string, double>>& kv) {
    std::string out;
    for (const auto& [k, v] : kv) out += (out.empty() ? "" : ";") + k + "=" + fmt(v);
    return out;
}

}  // namespace

std::vector<Experiment> parse_config(const json& doc, const RunOptions& opts) {
    check_keys(doc, {"seed", "grid_size", "fourier_cutoff", "tolerance", "experiments"}, "config");
    for (const char* key : {"grid_size", "fourier_cutoff", "tolerance"}) require_positive(doc, key);
    if (!doc.contains("experiments") || !doc.at("experiments").is_array())
        throw ConfigError("config needs an 'experiments' array");
    json globals = json::object();
    for (const char* key : {"grid_size", "fourier_cutoff", "tolerance"})
        if (doc.contains(key)) globals[key] = doc.at(key);
    if (opts.grid_size) globals["grid_size"] = *opts.grid_size;
    if (opts.fourier_cutoff) globals["fourier_cutoff"] = *opts.fourier_cutoff;
    if (opts.tolerance) globals["tolerance"] = *opts.tolerance;
    for (const char* key : {"grid_size", "fourier_cutoff", "tolerance"}) require_positive(globals, key);
    const std::uint64_t base_seed = opts.seed ? *opts.seed : doc.value("seed", std::uint64_t{1});

    std::vector<Experiment> out;
    std::set<std::string> ids;
    int index = 0;
    for (const auto& e : doc.at("experiments")) {
        if (!e.is_object()) throw ConfigError("experiments must be objects");
        if (!e.contains("id") || !e.at("id").is_string()) throw ConfigError("experiment needs a string 'id'");
        if (!e.contains("kind") || !e.at("kind").is_string()) throw ConfigError("experiment needs a string 'kind'");
        Experiment x;
        x.id = e.at("id").get<std::string>();
        x.kind = e.at("kind").get<std::string>();
        if (!ids.insert(x.id).second) throw ConfigError("duplicate experiment id '" + x.id + "'");
        x.params = kind_defaults(x.kind);
        for (const auto& [k, v] : globals.items())
            if (x.params.contains(k)) x.params[k] = v;
        for (const auto& [k, v] : e.items()) {
            if (k == "id" || k == "kind") continue;
            if (k == "seed") continue;
            if (!x.params.contains(k)) throw ConfigError("unknown field '" + k + "' in experiment '" + x.id + "'");
            if (!same_type(x.params.at(k), v)) throw ConfigError("field '" + k + "' in '" + x.id + "' has the wrong type");
            x.params[k] = v;
        }
        for (const char* key : {"tolerance", "grid_size", "fourier_cutoff", "kernel_threshold", "winding_samples",
                                "crossing_threshold", "instances", "q"})
            require_positive(x.params, key);
        if (x.kind == "covering-check" && x.params.at("manifold") != "circle" && !opts.stretch)
            throw ConfigError("experiment '" + x.id + "' needs --stretch for manifold " +
                              x.params.at("manifold").dump());
        x.seed = e.contains("seed") ? e.at("seed").get<std::uint64_t>() : base_seed + index;
        ++index;
        out.push_back(std::move(x));
    }
    return out;
}

std::vector<Experiment> load_config(const std::filesystem::path& path, const RunOptions& opts) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("malformed config " + path.string() + ": " + e.what());
    }
    return parse_config(doc, opts);
}

ReportRow run_experiment(const Experiment& e) {
    ReportRow row;
    row.id = e.id;
    row.kind = e.kind;
    row.inputs = e.params;
    row.seed = e.seed;
    Sink s{row, e.params.at("tolerance").get<double>()};
    const auto t0 = std::chrono::steady_clock::now();
    try {
        if (e.kind == "toeplitz") run_toeplitz(e.params, s);
        else if (e.kind == "chern-check") run_chern(e.params, s);
        else if (e.kind == "covering-check") run_covering(e.params, s);
        else if (e.kind == "specflow") run_specflow(e.params, s);
        else if (e.kind == "cyclic-check") run_cyclic(e.params, s, e.seed);
        else throw ConfigError("unknown experiment kind '" + e.kind + "'");
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& err) {
        row.error_kind = err.kind();
        row.error_message = err.what();
    } catch (const json::exception& err) {
        throw ConfigError("experiment '" + e.id + "': " + err.what());
    }
    row.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    row.pass = row.error_kind.empty();
    for (const auto& r : row.residuals) row.pass = row.pass && r.ok();
    return row;
}

std::vector<ReportRow> run_experiments(const std::vector<Experiment>& experiments) {
    std::vector<std::future<ReportRow>> jobs;
    for (const auto& e : experiments) jobs.push_back(std::async(std::launch::async, [&e] { return run_experiment(e); }));
    std::vector<ReportRow> rows;
    std::exception_ptr first;
    for (auto& j : jobs) {
        try {
            rows.push_back(j.get());
        } catch (...) {
            if (!first) first = std::current_exception();
        }
    }
    if (first) std::rethrow_exception(first);
    std::sort(rows.begin(), rows.end(), [](const ReportRow& a, const ReportRow& b) { return a.id < b.id; });
    return rows;
}

std::string report_csv(const std::vector<ReportRow>& rows) {
    std::ostringstream out;
    out << "id,kind,seed,inputs,computed,oracle,residuals,pass,error\n";
    for (const auto& r : rows) {
        std::string res;
        for (const auto& x : r.residuals)
            res += (res.empty() ? "" : ";") + x.name + "=" + fmt(x.value) + "<=" + fmt(x.tolerance);
        out << csv_field(r.id) << ',' << r.kind << ',' << r.seed << ',' << csv_field(r.inputs.dump()) << ','
            << csv_field(join_pairs(r.computed)) << ',' << csv_field(join_pairs(r.oracle)) << ',' << csv_field(res)
            << ',' << (r.pass ? "PASS" : "FAIL") << ','
            << csv_field(r.error_kind.empty() ? "" : r.error_kind + ": " + r.error_message) << '\n';
    }
    return out.str();
}

json report_json(const std::vector<ReportRow>& rows) {
    json out = json::array();
    for (const auto& r : rows) {
        json j = {{"id", r.id},     {"kind", r.kind}, {"seed", r.seed},
                  {"inputs", r.inputs}, {"pass", r.pass}, {"wall_time", r.wall_time}};
        for (const auto& [k, v] : r.computed) j["computed"][k] = v;
        for (const auto& [k, v] : r.oracle) j["oracle"][k] = v;
        for (const auto& x : r.residuals) j["residuals"][x.name] = {{"value", x.value}, {"tolerance", x.tolerance}};
        if (!r.error_kind.empty()) j["error"] = {{"kind", r.error_kind}, {"message", r.error_message}};
        out.push_back(std::move(j));
    }
    return out;
}

int run(const RunOptions& opts, std::string* err) {
    std::vector<ReportRow> rows;
    try {
        rows = run_experiments(load_config(opts.config, opts));
    } catch (const ConfigError& e) {
        if (err) *err = e.what();
        return 1;
    }
    try {
        std::filesystem::create_directories(opts.out);
        std::ofstream csv(opts.out / "report.csv"), js(opts.out / "report.json");
        if (!csv || !js) throw std::runtime_error("cannot write reports to " + opts.out.string());
        csv << report_csv(rows);
        js << report_json(rows).dump(2) << '\n';
        if (!csv || !js) throw std::runtime_error("write failed in " + opts.out.string());
    } catch (const std::exception& e) {
        if (err) *err = e.what();
        return 1;
    }
    for (const auto& r : rows)
        if (!r.pass) return 2;
    return 0;
}

}  // namespace ncindex
