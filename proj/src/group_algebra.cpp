#include "ncindex/group_algebra.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include "ncindex/errors.hpp"

namespace ncindex {

namespace {

int mod(int a, int k) {
    int r = a % k;
    return r < 0 ? r + k : r;
}

void append_reduced(std::vector<int>& w, int letter) {
    if (!w.empty() && w.back() == -letter)
        w.pop_back();
    else
        w.push_back(letter);
}

}  // namespace

GroupSpec GroupSpec::lattice(int dim, int radius) {
    if (dim < 1) throw PreconditionViolation("lattice dimension must be >= 1");
    return {GroupFamily::Lattice, dim, radius};
}

GroupSpec GroupSpec::cyclic(int order, int radius) {
    if (order < 1) throw PreconditionViolation("cyclic order must be >= 1");
    return {GroupFamily::Cyclic, order, radius};
}

GroupSpec GroupSpec::free(int rank, int radius) {
    if (rank < 1) throw PreconditionViolation("free group rank must be >= 1");
    return {GroupFamily::Free, rank, radius};
}

GroupElement GroupSpec::identity() const {
    switch (family_) {
        case GroupFamily::Lattice: return {std::vector<int>(rank_, 0)};
        case GroupFamily::Cyclic: return {{0}};
        case GroupFamily::Free: return {{}};
    }
    return {};
}

int GroupSpec::num_generators() const {
    return family_ == GroupFamily::Cyclic ? 1 : rank_;
}

GroupElement GroupSpec::generator(int i) const {
    if (i < 0 || i >= num_generators()) throw PreconditionViolation("generator index out of range");
    switch (family_) {
        case GroupFamily::Lattice: {
            GroupElement g = identity();
            g.word[i] = 1;
            return g;
        }
        case GroupFamily::Cyclic: return {{mod(1, rank_)}};
        case GroupFamily::Free: return {{i + 1}};
    }
    return {};
}

GroupElement GroupSpec::multiply(const GroupElement& a, const GroupElement& b) const {
    switch (family_) {
        case GroupFamily::Lattice: {
            GroupElement r = a;
            for (int i = 0; i < rank_; ++i) r.word[i] += b.word[i];
            return r;
        }
        case GroupFamily::Cyclic: return {{mod(a.word[0] + b.word[0], rank_)}};
        case GroupFamily::Free: {
            GroupElement r = a;
            for (int l : b.word) append_reduced(r.word, l);
            return r;
        }
    }
    return {};
}

GroupElement GroupSpec::inverse(const GroupElement& a) const {
    switch (family_) {
        case GroupFamily::Lattice: {
            GroupElement r = a;
            for (int& x : r.word) x = -x;
            return r;
        }
        case GroupFamily::Cyclic: return {{mod(-a.word[0], rank_)}};
        case GroupFamily::Free: {
            GroupElement r;
            r.word.reserve(a.word.size());
            for (auto it = a.word.rbegin(); it != a.word.rend(); ++it) r.word.push_back(-*it);
            return r;
        }
    }
    return {};
}

GroupElement GroupSpec::power(const GroupElement& a, int n) const {
    GroupElement base = n < 0 ? inverse(a) : a;
    GroupElement r = identity();
    for (int i = 0; i < std::abs(n); ++i) r = multiply(r, base);
    return r;
}

int GroupSpec::length(const GroupElement& a) const {
    switch (family_) {
        case GroupFamily::Lattice: {
            int s = 0;
            for (int x : a.word) s += std::abs(x);
            return s;
        }
        case GroupFamily::Cyclic: {
            int j = mod(a.word[0], rank_);
            return std::min(j, rank_ - j);
        }
        case GroupFamily::Free: return static_cast<int>(a.word.size());
    }
    return 0;
}

GroupElement GroupSpec::element(std::vector<int> coords) const {
    switch (family_) {
        case GroupFamily::Lattice:
            if (static_cast<int>(coords.size()) != rank_) throw PreconditionViolation("lattice element has wrong dimension");
            return {std::move(coords)};
        case GroupFamily::Cyclic:
            if (coords.size() != 1) throw PreconditionViolation("cyclic element takes one residue");
            return {{mod(coords[0], rank_)}};
        case GroupFamily::Free: {
            GroupElement r;
            for (int l : coords) {
                if (l == 0 || std::abs(l) > rank_) throw PreconditionViolation("free group letter out of range");
                append_reduced(r.word, l);
            }
            return r;
        }
    }
    return {};
}

std::vector<GroupElement> GroupSpec::ball(int r) const {
    std::vector<GroupElement> out;
    switch (family_) {
        case GroupFamily::Cyclic:
            for (int j = 0; j < rank_; ++j)
                if (length({{j}}) <= r) out.push_back({{j}});
            break;
        case GroupFamily::Lattice: {
            // Odometer over the box [-r, r]^d, filtered by l^1 length.
            std::vector<int> v(rank_, -r);
            while (true) {
                GroupElement g{v};
                if (length(g) <= r) out.push_back(g);
                int i = 0;
                while (i < rank_ && v[i] == r) v[i++] = -r;
                if (i == rank_) break;
                ++v[i];
            }
            break;
        }
        case GroupFamily::Free: {
            std::vector<GroupElement> layer{identity()};
            out.push_back(identity());
            for (int len = 1; len <= r; ++len) {
                std::vector<GroupElement> next;
                for (const auto& g : layer)
                    for (int l = -rank_; l <= rank_; ++l) {
                        if (l == 0 || (!g.word.empty() && g.word.back() == -l)) continue;
                        GroupElement h = g;
                        h.word.push_back(l);
                        next.push_back(std::move(h));
                    }
                out.insert(out.end(), next.begin(), next.end());
                layer = std::move(next);
            }
            break;
        }
    }
    std::stable_sort(out.begin(), out.end(), [this](const GroupElement& a, const GroupElement& b) {
        int la = length(a), lb = length(b);
        return la != lb ? la < lb : a < b;
    });
    return out;
}

std::vector<GroupElement> GroupSpec::elements() const {
    if (!is_finite()) throw PreconditionViolation("elements() needs a finite group");
    std::vector<GroupElement> out;
    for (int j = 0; j < rank_; ++j) out.push_back({{j}});
    return out;
}

std::string GroupSpec::to_string(const GroupElement& g) const {
    std::ostringstream os;
    switch (family_) {
        case GroupFamily::Lattice:
            os << '(';
            for (size_t i = 0; i < g.word.size(); ++i) os << (i ? "," : "") << g.word[i];
            os << ')';
            break;
        case GroupFamily::Cyclic: os << g.word[0] << " mod " << rank_; break;
        case GroupFamily::Free:
            if (g.word.empty()) os << 'e';
            for (int l : g.word) os << (l > 0 ? "a" : "A") << std::abs(l);
            break;
    }
    return os.str();
}

// ---------------------------------------------------------------------------

GroupAlgebraElement::GroupAlgebraElement(GroupPtr group) : group_(std::move(group)) {
    if (!group_) throw PreconditionViolation("group algebra element needs a group");
}

GroupAlgebraElement GroupAlgebraElement::basis(GroupPtr group, const GroupElement& g, cplx c) {
    GroupAlgebraElement a(std::move(group));
    a.add_term(g, c);
    return a;
}

GroupAlgebraElement GroupAlgebraElement::unit(GroupPtr group, cplx c) {
    auto e = group->identity();
    return basis(std::move(group), e, c);
}

void GroupAlgebraElement::add_term(const GroupElement& g, cplx c) {
    if (c == cplx{}) return;
    if (group_->length(g) > group_->radius())
        throw TruncationOverflow("term " + group_->to_string(g) + " exceeds truncation radius");
    auto [it, inserted] = terms_.try_emplace(g, c);
    if (!inserted) {
        it->second += c;
        if (it->second == cplx{}) terms_.erase(it);
    }
}

cplx GroupAlgebraElement::coefficient(const GroupElement& g) const {
    auto it = terms_.find(g);
    return it == terms_.end() ? cplx{} : it->second;
}

GroupAlgebraElement GroupAlgebraElement::star() const {
    GroupAlgebraElement r(group_);
    for (const auto& [g, c] : terms_) r.terms_.emplace(group_->inverse(g), std::conj(c));
    return r;
}

double GroupAlgebraElement::l1_norm() const {
    double s = 0;
    for (const auto& [g, c] : terms_) s += std::abs(c);
    return s;
}

double GroupAlgebraElement::weighted_l1_norm() const {
    double s = 0;
    for (const auto& [g, c] : terms_) s += std::abs(c) * group_->length(g);
    return s;
}

int GroupAlgebraElement::support_radius() const {
    int r = 0;
    for (const auto& [g, c] : terms_) r = std::max(r, group_->length(g));
    return r;
}

GroupAlgebraElement& GroupAlgebraElement::operator+=(const GroupAlgebraElement& b) {
    if (*group_ != *b.group_) throw PreconditionViolation("group mismatch");
    for (const auto& [g, c] : b.terms_) add_term(g, c);
    return *this;
}

GroupAlgebraElement& GroupAlgebraElement::operator-=(const GroupAlgebraElement& b) {
    if (*group_ != *b.group_) throw PreconditionViolation("group mismatch");
    for (const auto& [g, c] : b.terms_) add_term(g, -c);
    return *this;
}

GroupAlgebraElement& GroupAlgebraElement::operator*=(cplx s) {
    if (s == cplx{}) {
        terms_.clear();
        return *this;
    }
    for (auto it = terms_.begin(); it != terms_.end();) {
        it->second *= s;
        if (it->second == cplx{})
            it = terms_.erase(it);
        else
            ++it;
    }
    return *this;
}

double GroupAlgebraElement::distance(const GroupAlgebraElement& b) const {
    double d = 0;
    for (const auto& [g, c] : terms_) d = std::max(d, std::abs(c - b.coefficient(g)));
    for (const auto& [g, c] : b.terms_)
        if (!terms_.count(g)) d = std::max(d, std::abs(c));
    return d;
}

GroupAlgebraElement ga_mul(const GroupAlgebraElement& a, const GroupAlgebraElement& b) {
    const auto& G = *a.group();
    if (G != *b.group()) throw PreconditionViolation("group mismatch in product");
    GroupAlgebraElement r(a.group());
    for (const auto& [g, c] : a.terms())
        for (const auto& [h, d] : b.terms()) r.add_term(G.multiply(g, h), c * d);
    return r;
}

GroupAlgebraElement operator*(const GroupAlgebraElement& a, const GroupAlgebraElement& b) { return ga_mul(a, b); }

cplx trace_e(const GroupAlgebraElement& a) { return a.coefficient(a.group()->identity()); }

// ---------------------------------------------------------------------------

BallBasis BallBasis::build(const GroupSpec& group, int radius) {
    BallBasis b;
    b.radius = radius;
    b.elements = group.ball(radius);
    for (int i = 0; i < b.size(); ++i) b.index.emplace(b.elements[i], i);
    return b;
}

double TruncatedDerivationRep::norm_lower_bound() const { return operator_norm(matrix); }

MatrixXc left_regular(const GroupAlgebraElement& a, const BallBasis& ball) {
    const auto& G = *a.group();
    MatrixXc m = MatrixXc::Zero(ball.size(), ball.size());
    for (int j = 0; j < ball.size(); ++j)
        for (const auto& [g, c] : a.terms()) {
            auto it = ball.index.find(G.multiply(g, ball.elements[j]));
            if (it != ball.index.end()) m(it->second, j) += c;
        }
    return m;
}

Eigen::VectorXd word_length_diagonal(const GroupSpec& group, const BallBasis& ball) {
    Eigen::VectorXd d(ball.size());
    for (int i = 0; i < ball.size(); ++i) d[i] = group.length(ball.elements[i]);
    return d;
}

TruncatedDerivationRep delta_word_length(const GroupAlgebraElement& a, int radius) {
    const auto& G = *a.group();
    if (a.support_radius() > radius)
        throw TruncationOverflow("support of the element leaves the ball of radius " + std::to_string(radius));
    TruncatedDerivationRep rep;
    rep.ball = BallBasis::build(G, radius);
    const auto lengths = word_length_diagonal(G, rep.ball);
    const MatrixXc lam = left_regular(a, rep.ball);
    rep.matrix = lengths.asDiagonal() * lam - lam * lengths.asDiagonal();
    return rep;
}

double operator_norm(const MatrixXc& m) {
    if (m.size() == 0) return 0.0;
    Eigen::JacobiSVD<MatrixXc> svd(m);
    return svd.singularValues()(0);
}

double derivation_seminorm(const MatrixXc& t, const Eigen::VectorXd& lengths, int order) {
    if (order <= 0) return operator_norm(t);
    MatrixXc comm = lengths.asDiagonal() * t - t * lengths.asDiagonal();
    return derivation_seminorm(t, lengths, order - 1) + derivation_seminorm(comm, lengths, order - 1);
}

bool NeumannResult::growth_bound_holds() const {
    for (const auto& g : growth)
        if (g.lhs > g.rhs * (1 + 1e-12) + 1e-12) return false;
    return true;
}

NeumannResult neumann_inverse(const GroupAlgebraElement& x, const NeumannOptions& options) {
    const auto& group = x.group();
    const GroupAlgebraElement one = GroupAlgebraElement::unit(group);
    const GroupAlgebraElement y = one - x;
    const double q = y.l1_norm();
    if (q >= 1.0)
        throw NotInvertibleInBudget("||1 - x|| bound " + std::to_string(q) + " is not below 1");

    NeumannResult res{one, 1, q, 0.0, {}};
    int check_radius = std::min(options.check_radius, group->radius());
    if (group->is_finite()) check_radius = group->rank();
    const BallBasis ball = BallBasis::build(*group, check_radius);
    const auto lengths = word_length_diagonal(*group, ball);
    const double dy = y.weighted_l1_norm();

    // Tail after summing n terms is bounded by q^n / (1 - q).
    GroupAlgebraElement term = one;
    double bound = 1.0;
    while (bound * q / (1.0 - q) > options.tolerance) {
        if (res.terms >= options.max_terms)
            throw NotInvertibleInBudget("Neumann series did not reach tolerance within " +
                                        std::to_string(options.max_terms) + " terms");
        term = ga_mul(term, y);
        bound *= q;
        res.inverse += term;
        const int n = res.terms;
        if (n <= options.check_terms) {
            const MatrixXc lam = left_regular(term, ball);
            const MatrixXc d = lengths.asDiagonal() * lam - lam * lengths.asDiagonal();
            res.growth.push_back({n, operator_norm(d), n * std::pow(q, n - 1) * dy});
        }
        ++res.terms;
    }
    res.residual = (ga_mul(x, res.inverse) - one).l1_norm();
    if (res.residual > std::max(options.tolerance, 1e-13) * 10)
        throw NotInvertibleInBudget("Neumann residual " + std::to_string(res.residual) + " above tolerance");
    return res;
}

}  // namespace ncindex
