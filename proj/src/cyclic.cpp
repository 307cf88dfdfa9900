#include "ncindex/cyclic.hpp"

#include <mutex>
#include <shared_mutex>

#include "ncindex/errors.hpp"

namespace ncindex {

class TupleMemo {
public:
    template <class F>
    cplx get(const GroupTuple& t, F&& compute) {
        {
            std::shared_lock lock(mu_);
            auto it = table_.find(t);
            if (it != table_.end()) return it->second;
        }
        const cplx v = compute();
        std::unique_lock lock(mu_);
        table_.emplace(t, v);
        return v;
    }

private:
    std::shared_mutex mu_;
    std::map<GroupTuple, cplx> table_;
};

namespace {

void check_arity(const GroupTuple& g, int degree) {
    if (static_cast<int>(g.size()) != degree + 1)
        throw DegreeMismatch("expected " + std::to_string(degree + 1) + " arguments, got " + std::to_string(g.size()));
}

}  // namespace

CyclicCochain::CyclicCochain(GroupPtr group, int degree, Evaluator f, Flags flags, bool memoize)
    : group_(std::move(group)), degree_(degree), f_(std::move(f)), flags_(flags),
      memo_(memoize ? std::make_shared<TupleMemo>() : nullptr) {
    if (degree_ < 0) throw PreconditionViolation("cochain degree must be >= 0");
}

cplx CyclicCochain::operator()(const GroupTuple& g) const {
    check_arity(g, degree_);
    if (!memo_) return f_(g);
    return memo_->get(g, [&] { return f_(g); });
}

cplx CyclicCochain::evaluate(const WordCombination& chain) const {
    cplx s = 0;
    GroupTuple t;
    for (const auto& [w, c] : chain) {
        if (word_degree(w) != degree_) continue;
        t.clear();
        for (const auto& m : w) t.push_back(m.g);
        s += c * (*this)(t);
    }
    return s;
}

GroupCocycle::GroupCocycle(GroupPtr group, int degree, Evaluator f, Flags flags)
    : group_(std::move(group)), degree_(degree), f_(std::move(f)), flags_(flags),
      memo_(std::make_shared<TupleMemo>()) {
    if (degree_ < 0) throw PreconditionViolation("cochain degree must be >= 0");
}

cplx GroupCocycle::operator()(const GroupTuple& g) const {
    check_arity(g, degree_);
    return memo_->get(g, [&] { return f_(g); });
}

namespace {

GroupTuple random_tuple(std::mt19937_64& rng, const std::vector<GroupElement>& ball, int len) {
    std::uniform_int_distribution<size_t> pick(0, ball.size() - 1);
    GroupTuple t;
    for (int i = 0; i < len; ++i) t.push_back(ball[pick(rng)]);
    return t;
}

}  // namespace

double GroupCocycle::invariance_defect(std::mt19937_64& rng, int samples, int radius) const {
    const auto ball = group_->ball(radius);
    double d = 0;
    for (int s = 0; s < samples; ++s) {
        GroupTuple t = random_tuple(rng, ball, degree_ + 1);
        GroupElement h = random_tuple(rng, ball, 1)[0];
        GroupTuple u;
        for (const auto& g : t) u.push_back(group_->multiply(h, g));
        d = std::max(d, std::abs((*this)(t) - (*this)(u)));
    }
    return d;
}

double GroupCocycle::alternation_defect(std::mt19937_64& rng, int samples, int radius) const {
    if (degree_ == 0) return 0.0;
    const auto ball = group_->ball(radius);
    std::uniform_int_distribution<int> pos(0, degree_ - 1);
    double d = 0;
    for (int s = 0; s < samples; ++s) {
        GroupTuple t = random_tuple(rng, ball, degree_ + 1);
        GroupTuple u = t;
        const int i = pos(rng);
        std::swap(u[i], u[i + 1]);
        d = std::max(d, std::abs((*this)(t) + (*this)(u)));
    }
    return d;
}

CyclicCochain b_transpose(const CyclicCochain& phi) {
    const GroupPtr G = phi.group();
    const int n = phi.degree();
    auto f = [phi, G, n](const GroupTuple& a) {
        cplx s = 0;
        GroupTuple t(n + 1);
        for (int i = 0; i <= n; ++i) {
            for (int j = 0, k = 0; j <= n + 1; ++j, ++k) {
                if (j == i) {
                    t[k] = G->multiply(a[i], a[i + 1]);
                    ++j;
                } else {
                    t[k] = a[j];
                }
            }
            s += (i % 2 ? -1.0 : 1.0) * phi(t);
        }
        t[0] = G->multiply(a[n + 1], a[0]);
        for (int j = 1; j <= n; ++j) t[j] = a[j];
        s += ((n + 1) % 2 ? -1.0 : 1.0) * phi(t);
        return s;
    };
    return CyclicCochain(G, n + 1, f, phi.flags());
}

GroupCocycle d_gamma(const GroupCocycle& tau) {
    const int n = tau.degree();
    auto f = [tau, n](const GroupTuple& g) {
        cplx s = 0;
        GroupTuple t;
        for (int j = 0; j <= n + 1; ++j) {
            t.clear();
            for (int i = 0; i <= n + 1; ++i)
                if (i != j) t.push_back(g[i]);
            s += (j % 2 ? -1.0 : 1.0) * tau(t);
        }
        return s;
    };
    return GroupCocycle(tau.group(), n + 1, f, tau.flags());
}

CyclicCochain tau_to_c(const GroupCocycle& tau, bool require_alternating) {
    const int n = tau.degree();
    if (n == 0) throw UnsupportedDegree("the dictionary tau -> c_tau is not defined in degree 0");
    if (!tau.flags().invariant) throw PreconditionViolation("tau_to_c needs an invariant cochain");
    if (require_alternating && !tau.flags().alternating)
        throw PreconditionViolation("tau_to_c needs an alternating cochain");
    const GroupPtr G = tau.group();
    auto f = [tau, G, n](const GroupTuple& g) -> cplx {
        GroupElement prod = g[0];
        for (int i = 1; i <= n; ++i) prod = G->multiply(prod, g[i]);
        if (!G->is_identity(prod)) return 0.0;
        GroupTuple t{G->identity()};
        GroupElement partial = G->identity();
        for (int i = 1; i <= n; ++i) {
            partial = G->multiply(partial, g[i]);
            t.push_back(partial);
        }
        return tau(t);
    };
    return CyclicCochain(G, n, f, {.normalized = tau.flags().alternating, .supported_at_e = true});
}

GroupCocycle c_to_tau(const CyclicCochain& c) {
    const int n = c.degree();
    if (n == 0) throw UnsupportedDegree("the dictionary c -> tau_c is not defined in degree 0");
    if (!c.supported_at_e()) throw PreconditionViolation("c_to_tau needs a cochain supported at e");
    const GroupPtr G = c.group();
    auto f = [c, G, n](const GroupTuple& h) {
        const GroupElement h0inv = G->inverse(h[0]);
        std::vector<GroupElement> g(n + 1);
        for (int i = 1; i <= n; ++i) g[i] = G->multiply(h0inv, h[i]);
        GroupTuple t(n + 1);
        t[0] = G->inverse(g[n]);
        t[1] = g[1];
        for (int i = 2; i <= n; ++i) t[i] = G->multiply(G->inverse(g[i - 1]), g[i]);
        return c(t);
    };
    return GroupCocycle(G, n, f, {.invariant = true, .alternating = c.normalized()});
}

CyclicCochain trace_e_cochain(GroupPtr group) {
    auto G = group;
    return CyclicCochain(
        std::move(group), 0, [G](const GroupTuple& g) { return G->is_identity(g[0]) ? cplx(1.0) : cplx(0.0); },
        {.normalized = true, .supported_at_e = true}, false);
}

std::vector<WordCombination> chern_lambda(const AlgebraMatrix& p, int m_max) {
    const double idem = (p * p - p).max_abs(), adj = (p.star() - p).max_abs();
    if (idem > 1e-10 || adj > 1e-10)
        throw NotAProjection("p^2 - p = " + std::to_string(idem) + ", p* - p = " + std::to_string(adj));
    const GroupPtr& G = p.group();
    const int N = p.n();
    std::vector<WordCombination> out;
    for (int m = 0; m <= m_max; ++m) {
        const int len = 2 * m + 1;
        WordCombination chain;
        const double sign = m % 2 ? -1.0 : 1.0;
        // Depth-first over index cycles i_0 -> i_1 -> ... -> i_0.
        Word w;
        std::function<void(int, int, int, cplx)> rec = [&](int i0, int i, int depth, cplx c) {
            if (depth == len) {
                chain[w] += sign * c;
                return;
            }
            const int jmin = depth == len - 1 ? i0 : 0, jmax = depth == len - 1 ? i0 : N - 1;
            for (int j = jmin; j <= jmax; ++j)
                for (const auto& [g, v] : p.at(i, j).terms()) {
                    w.push_back({0, 0, g});
                    rec(i0, j, depth + 1, c * v);
                    w.pop_back();
                }
        };
        for (int i0 = 0; i0 < N; ++i0) rec(i0, i0, 0, 1.0);
        for (auto it = chain.begin(); it != chain.end();)
            it = it->second == cplx{} ? chain.erase(it) : std::next(it);
        out.push_back(std::move(chain));
    }
    (void)G;
    return out;
}

ManifoldForm pair_cochain_form(const CyclicCochain& phi, const MixedForm& w) {
    if (w.algebra().n() != 1) throw PreconditionViolation("pair_cochain_form needs a traced (N = 1) form");
    if (!phi.normalized()) throw PreconditionViolation("pair_cochain_form needs a normalized cochain");
    ManifoldForm out;
    GroupTuple t;
    for (const auto& [key, f] : w.terms()) {
        if (word_degree(key.word) != phi.degree()) continue;
        t.clear();
        for (const auto& m : key.word) t.push_back(m.g);
        const cplx v = phi(t);
        if (v == cplx{}) continue;
        out[key.mask] += f * v;
    }
    return out;
}

cplx pair_cochain_algebra(const CyclicCochain& phi, const AlgebraForm& w) {
    if (w.algebra().n() != 1) throw PreconditionViolation("pair_cochain_algebra needs a traced (N = 1) form");
    if (!phi.normalized()) throw PreconditionViolation("pair_cochain_algebra needs a normalized cochain");
    return phi.evaluate(w.terms());
}

std::vector<GroupTuple> all_tuples(const GroupSpec& group, int len) {
    const auto elems = group.elements();
    std::vector<GroupTuple> out{{}};
    for (int i = 0; i < len; ++i) {
        std::vector<GroupTuple> next;
        for (const auto& t : out)
            for (const auto& g : elems) {
                GroupTuple u = t;
                u.push_back(g);
                next.push_back(std::move(u));
            }
        out = std::move(next);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Normalized cyclic cocycles on C(Z/k).

namespace {

struct CocycleKernel {
    int k = 0, n = 0;
    std::vector<int> param;     ///< tuple code -> parameter id or -1
    std::vector<double> sign;   ///< phi(t) = sign * phi(orbit representative)
    Eigen::MatrixXd basis;      ///< parameters x kernel dimension
};

int tuple_code(const std::vector<int>& t, int k) {
    int c = 0;
    for (int i = static_cast<int>(t.size()) - 1; i >= 0; --i) c = c * k + t[i];
    return c;
}

std::vector<int> decode(int code, int k, int len) {
    std::vector<int> t(len);
    for (int i = 0; i < len; ++i, code /= k) t[i] = code % k;
    return t;
}

struct Orbit {
    int rep_code;
    int shift;    ///< t = r^shift (rep)
    int period;
};

// r(t) = (t_n, t_0, ..., t_{n-1}); phi(r t) = (-1)^n phi(t).
Orbit rotation_orbit(const std::vector<int>& t, int k) {
    const int len = static_cast<int>(t.size());
    std::vector<int> cur = t;
    int best = tuple_code(t, k), best_j = 0, period = len;
    for (int j = 1; j < len; ++j) {
        std::rotate(cur.rbegin(), cur.rbegin() + 1, cur.rend());
        const int c = tuple_code(cur, k);
        if (cur == t && period == len) period = j;
        if (c < best) {
            best = c;
            best_j = j;
        }
    }
    // rep = r^{best_j} t, so t = r^{len - best_j} rep.
    return {best, (len - best_j) % len, period};
}

CocycleKernel compute_kernel(const GroupSpec& group, int n) {
    if (group.family() != GroupFamily::Cyclic) throw PreconditionViolation("cocycle basis needs a finite cyclic group");
    if (n < 1) throw PreconditionViolation("kernel computation is for degree >= 1");
    CocycleKernel K;
    K.k = group.rank();
    K.n = n;
    const int k = K.k, len = n + 1;
    int total = 1;
    for (int i = 0; i < len; ++i) total *= k;
    K.param.assign(total, -1);
    K.sign.assign(total, 0.0);
    const double s = n % 2 ? -1.0 : 1.0;

    std::map<int, int> rep_param;
    std::vector<int> param_block;
    for (int code = 0; code < total; ++code) {
        auto t = decode(code, k, len);
        if (std::find(t.begin(), t.end(), 0) != t.end()) continue;
        const Orbit o = rotation_orbit(t, k);
        if (s < 0 && o.period % 2) continue;  // forced to vanish by its own symmetry
        auto [it, inserted] = rep_param.try_emplace(o.rep_code, static_cast<int>(param_block.size()));
        if (inserted) {
            int sum = 0;
            for (int x : t) sum += x;
            param_block.push_back(sum % k);
        }
        K.param[code] = it->second;
        K.sign[code] = (s < 0 && o.shift % 2) ? -1.0 : 1.0;
    }
    const int P = static_cast<int>(param_block.size());

    // Rows: b^t phi on orbit representatives of normalized (n+2)-tuples.
    std::vector<std::vector<std::map<int, double>>> rows(k);
    int total_rows = total * k;
    for (int code = 0; code < total_rows; ++code) {
        auto u = decode(code, k, len + 1);
        if (std::find(u.begin(), u.end(), 0) != u.end()) continue;
        if (rotation_orbit(u, k).rep_code != code) continue;
        std::map<int, double> row;
        auto add = [&](const std::vector<int>& t, double sg) {
            const int c = tuple_code(t, k);
            if (K.param[c] >= 0) row[K.param[c]] += sg * K.sign[c];
        };
        std::vector<int> t(len);
        for (int i = 0; i <= n; ++i) {
            for (int j = 0, q = 0; j <= n + 1; ++j, ++q) {
                if (j == i) {
                    t[q] = (u[i] + u[i + 1]) % k;
                    ++j;
                } else {
                    t[q] = u[j];
                }
            }
            add(t, i % 2 ? -1.0 : 1.0);
        }
        t[0] = (u[n + 1] + u[0]) % k;
        for (int j = 1; j <= n; ++j) t[j] = u[j];
        add(t, (n + 1) % 2 ? -1.0 : 1.0);
        int sum = 0;
        for (int x : u) sum += x;
        rows[sum % k].push_back(std::move(row));
    }

    std::vector<Eigen::VectorXd> kernel;
    for (int b = 0; b < k; ++b) {
        std::vector<int> cols;
        std::map<int, int> local;
        for (int p = 0; p < P; ++p)
            if (param_block[p] == b) {
                local[p] = static_cast<int>(cols.size());
                cols.push_back(p);
            }
        if (cols.empty()) continue;
        const int R = static_cast<int>(rows[b].size());
        Eigen::MatrixXd M = Eigen::MatrixXd::Zero(std::max(R, 1), cols.size());
        for (int r = 0; r < R; ++r)
            for (const auto& [p, v] : rows[b][r]) M(r, local.at(p)) += v;
        Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
        if (lu.dimensionOfKernel() == 0) continue;
        Eigen::MatrixXd ker = lu.kernel();
        for (int c = 0; c < ker.cols(); ++c) {
            Eigen::VectorXd v = Eigen::VectorXd::Zero(P);
            for (size_t i = 0; i < cols.size(); ++i) v[cols[i]] = ker(i, c);
            kernel.push_back(v);
        }
    }
    K.basis.resize(P, kernel.size());
    for (size_t c = 0; c < kernel.size(); ++c) K.basis.col(c) = kernel[c];
    return K;
}

CyclicCochain table_cochain(const GroupPtr& group, int n, std::vector<cplx> table) {
    const int k = group->rank();
    auto shared = std::make_shared<const std::vector<cplx>>(std::move(table));
    auto f = [shared, k](const GroupTuple& g) {
        int c = 0;
        for (int i = static_cast<int>(g.size()) - 1; i >= 0; --i) c = c * k + g[i].word[0];
        return (*shared)[c];
    };
    return CyclicCochain(group, n, f, {.normalized = true, .supported_at_e = false}, false);
}

CyclicCochain kernel_cochain(const GroupPtr& group, const CocycleKernel& K, const Eigen::VectorXcd& params) {
    std::vector<cplx> table(K.param.size(), 0.0);
    for (size_t c = 0; c < table.size(); ++c)
        if (K.param[c] >= 0) table[c] = K.sign[c] * params[K.param[c]];
    return table_cochain(group, K.n, std::move(table));
}

}  // namespace

std::vector<CyclicCochain> cyclic_cocycle_basis(const GroupPtr& group, int degree) {
    std::vector<CyclicCochain> out;
    if (degree == 0) {
        for (const auto& g : group->elements()) {
            std::vector<cplx> table(group->rank(), 0.0);
            table[g.word[0]] = 1.0;
            out.push_back(table_cochain(group, 0, std::move(table)));
        }
        return out;
    }
    const CocycleKernel K = compute_kernel(*group, degree);
    for (int c = 0; c < K.basis.cols(); ++c)
        out.push_back(kernel_cochain(group, K, K.basis.col(c).cast<cplx>()));
    return out;
}

CyclicCochain random_cyclic_cocycle(const GroupPtr& group, int degree, std::mt19937_64& rng) {
    std::normal_distribution<double> nd;
    if (degree == 0) {
        std::vector<cplx> table(group->rank());
        for (auto& v : table) v = {nd(rng), nd(rng)};
        return table_cochain(group, 0, std::move(table));
    }
    const CocycleKernel K = compute_kernel(*group, degree);
    Eigen::VectorXcd w(K.basis.cols());
    for (int i = 0; i < w.size(); ++i) w[i] = {nd(rng), nd(rng)};
    return kernel_cochain(group, K, K.basis.cast<cplx>() * w);
}

CyclicCochain random_integer_cochain(std::mt19937_64& rng, const GroupPtr& group, int degree, bool normalized) {
    std::uniform_int_distribution<int> u(-5, 5);
    auto table = std::make_shared<std::map<GroupTuple, cplx>>();
    for (const auto& t : all_tuples(*group, degree + 1)) {
        bool zero = false;
        for (size_t i = 1; i < t.size(); ++i) zero = zero || (normalized && group->is_identity(t[i]));
        (*table)[t] = zero ? 0.0 : double(u(rng));
    }
    return CyclicCochain(group, degree, [table](const GroupTuple& t) { return table->at(t); },
                         {.normalized = normalized, .supported_at_e = false}, false);
}

GroupCocycle random_invariant_cochain(std::mt19937_64& rng, const GroupPtr& group, int degree) {
    std::uniform_int_distribution<int> u(-5, 5);
    auto table = std::make_shared<std::map<GroupTuple, cplx>>();
    for (const auto& t : all_tuples(*group, degree)) (*table)[t] = double(u(rng));
    return GroupCocycle(
        group, degree,
        [group, table](const GroupTuple& h) {
            GroupTuple d;
            for (size_t i = 1; i < h.size(); ++i) d.push_back(group->multiply(group->inverse(h[0]), h[i]));
            return table->at(d);
        },
        {.invariant = true, .alternating = false});
}

}  // namespace ncindex
