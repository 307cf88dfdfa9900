#include "ncindex/nc_forms.hpp"

#include <optional>

#include "ncindex/errors.hpp"

namespace ncindex {

namespace {

void accumulate(WordCombination& into, const Word& w, cplx c) {
    if (c == cplx{}) return;
    auto [it, inserted] = into.try_emplace(w, c);
    if (!inserted) {
        it->second += c;
        if (it->second == cplx{}) into.erase(it);
    }
}

}  // namespace

WordAlgebra::WordAlgebra(GroupPtr group, int n) : group_(std::move(group)), n_(n) {
    if (!group_ || n_ < 1) throw PreconditionViolation("word algebra needs a group and N >= 1");
}

WordCombination WordAlgebra::canonicalize(const Word& w) const {
    const GroupElement e = group_->identity();
    bool clean = true;
    for (size_t i = 1; i < w.size() && clean; ++i)
        if (w[i].row == w[i].col && w[i].g == e) clean = false;
    if (clean) return {{w, 1.0}};

    std::vector<std::pair<Word, cplx>> partial{{Word{}, 1.0}};
    for (size_t i = 0; i < w.size(); ++i) {
        const MatrixUnit& m = w[i];
        if (i == 0 || m.row != m.col || m.g != e) {
            for (auto& [p, c] : partial) p.push_back(m);
            continue;
        }
        // pi(E_aa e) = E_aa e - (1/N) sum_c E_cc e
        std::vector<std::pair<Word, cplx>> next;
        for (const auto& [p, c] : partial)
            for (int d = 0; d < n_; ++d) {
                const double coef = (d == m.row ? 1.0 : 0.0) - 1.0 / n_;
                if (coef == 0.0) continue;
                Word q = p;
                q.push_back({d, d, e});
                next.emplace_back(std::move(q), c * coef);
            }
        partial = std::move(next);
    }
    WordCombination out;
    for (auto& [p, c] : partial) accumulate(out, p, c);
    return out;
}

WordCombination WordAlgebra::canonicalize(const WordCombination& wc) const {
    WordCombination out;
    for (const auto& [w, c] : wc)
        for (const auto& [v, d] : canonicalize(w)) accumulate(out, v, c * d);
    return out;
}

WordCombination WordAlgebra::multiply(const Word& a, const Word& b) const {
    // (a_0 da_1 ... da_k) b_0 = sum_i (-1)^{k-i} a_0 da_1 .. d(a_i a_{i+1}) .. da_{k+1}
    // with a_{k+1} = b_0, followed by db_1 ... db_l.
    const int k = word_degree(a);
    WordCombination out;
    for (int i = 0; i <= k; ++i) {
        const MatrixUnit& x = a[i];
        const MatrixUnit& y = i < k ? a[i + 1] : b[0];
        if (x.col != y.row) continue;
        GroupElement gh = group_->multiply(x.g, y.g);
        if (group_->length(gh) > group_->radius())
            throw TruncationOverflow("word product " + group_->to_string(gh) + " exceeds truncation radius");
        Word w;
        w.reserve(a.size() + b.size() - 1);
        for (int j = 0; j < i; ++j) w.push_back(a[j]);
        w.push_back({x.row, y.col, std::move(gh)});
        for (int j = i + 2; j <= k; ++j) w.push_back(a[j]);
        if (i < k) w.push_back(b[0]);
        for (size_t j = 1; j < b.size(); ++j) w.push_back(b[j]);
        const double sign = (k - i) % 2 ? -1.0 : 1.0;
        for (const auto& [v, c] : canonicalize(w)) accumulate(out, v, sign * c);
    }
    return out;
}

WordCombination WordAlgebra::differential(const Word& w) const {
    WordCombination out;
    const GroupElement e = group_->identity();
    for (int c = 0; c < n_; ++c) {
        Word v;
        v.reserve(w.size() + 1);
        v.push_back({c, c, e});
        v.insert(v.end(), w.begin(), w.end());
        for (const auto& [u, d] : canonicalize(v)) accumulate(out, u, d);
    }
    return out;
}

WordCombination WordAlgebra::trace(const Word& w) const {
    const size_t len = w.size();
    for (size_t j = 0; j < len; ++j)
        if (w[j].col != w[(j + 1) % len].row) return {};
    Word v;
    v.reserve(len);
    for (const auto& m : w) v.push_back({0, 0, m.g});
    return WordAlgebra(group_, 1).canonicalize(v);
}

WordCombination WordAlgebra::unit() const {
    WordCombination out;
    for (int c = 0; c < n_; ++c) out[{MatrixUnit{c, c, group_->identity()}}] = 1.0;
    return out;
}

// ---------------------------------------------------------------------------

void AlgebraForm::add(const Word& w, cplx c) {
    for (const auto& [v, d] : alg_.canonicalize(w)) accumulate(terms_, v, c * d);
}

void AlgebraForm::add(const WordCombination& wc, cplx scale) {
    for (const auto& [w, c] : wc) add(w, c * scale);
}

AlgebraForm AlgebraForm::d() const {
    AlgebraForm out(alg_);
    for (const auto& [w, c] : terms_)
        for (const auto& [v, d] : alg_.differential(w)) accumulate(out.terms_, v, c * d);
    return out;
}

AlgebraForm AlgebraForm::trace() const {
    AlgebraForm out(WordAlgebra(alg_.group(), 1));
    for (const auto& [w, c] : terms_)
        for (const auto& [v, d] : alg_.trace(w)) accumulate(out.terms_, v, c * d);
    return out;
}

AlgebraForm AlgebraForm::component(int degree) const {
    AlgebraForm out(alg_);
    for (const auto& [w, c] : terms_)
        if (word_degree(w) == degree) out.terms_.emplace(w, c);
    return out;
}

double AlgebraForm::max_abs() const {
    double m = 0;
    for (const auto& [w, c] : terms_) m = std::max(m, std::abs(c));
    return m;
}

double AlgebraForm::distance(const AlgebraForm& o) const { return (*this - o).max_abs(); }

AlgebraForm& AlgebraForm::operator+=(const AlgebraForm& o) {
    if (!(alg_ == o.alg_)) throw PreconditionViolation("algebra forms over different algebras");
    for (const auto& [w, c] : o.terms_) accumulate(terms_, w, c);
    return *this;
}

AlgebraForm& AlgebraForm::operator-=(const AlgebraForm& o) {
    if (!(alg_ == o.alg_)) throw PreconditionViolation("algebra forms over different algebras");
    for (const auto& [w, c] : o.terms_) accumulate(terms_, w, -c);
    return *this;
}

AlgebraForm& AlgebraForm::operator*=(cplx s) {
    if (s == cplx{}) terms_.clear();
    for (auto& [w, c] : terms_) c *= s;
    return *this;
}

AlgebraForm operator*(const AlgebraForm& a, const AlgebraForm& b) {
    if (!(a.alg_ == b.alg_)) throw PreconditionViolation("algebra forms over different algebras");
    AlgebraForm out(a.alg_);
    for (const auto& [w, c] : a.terms_)
        for (const auto& [v, d] : b.terms_)
            for (const auto& [u, f] : a.alg_.multiply(w, v)) accumulate(out.terms_, u, c * d * f);
    return out;
}

// ---------------------------------------------------------------------------

AlgebraMatrix::AlgebraMatrix(GroupPtr group, int n)
    : group_(std::move(group)), n_(n), entries_(n * n, GroupAlgebraElement(group_)) {}

AlgebraMatrix AlgebraMatrix::identity(GroupPtr group, int n) {
    AlgebraMatrix m(group, n);
    for (int i = 0; i < n; ++i) m.at(i, i) = GroupAlgebraElement::unit(group);
    return m;
}

AlgebraMatrix AlgebraMatrix::star() const {
    AlgebraMatrix m(group_, n_);
    for (int r = 0; r < n_; ++r)
        for (int c = 0; c < n_; ++c) m.at(c, r) = at(r, c).star();
    return m;
}

AlgebraMatrix operator*(const AlgebraMatrix& a, const AlgebraMatrix& b) {
    AlgebraMatrix m(a.group_, a.n_);
    for (int r = 0; r < a.n_; ++r)
        for (int c = 0; c < a.n_; ++c)
            for (int k = 0; k < a.n_; ++k) m.at(r, c) += a.at(r, k) * b.at(k, c);
    return m;
}

AlgebraMatrix operator-(const AlgebraMatrix& a, const AlgebraMatrix& b) {
    AlgebraMatrix m = a;
    for (size_t i = 0; i < m.entries_.size(); ++i) m.entries_[i] -= b.entries_[i];
    return m;
}

double AlgebraMatrix::max_abs() const {
    double m = 0;
    for (const auto& e : entries_)
        for (const auto& [g, c] : e.terms()) m = std::max(m, std::abs(c));
    return m;
}

AlgebraForm AlgebraMatrix::as_form() const {
    AlgebraForm f(WordAlgebra(group_, n_));
    for (int r = 0; r < n_; ++r)
        for (int c = 0; c < n_; ++c)
            for (const auto& [g, v] : at(r, c).terms()) f.add(Word{{r, c, g}}, v);
    return f;
}

// ---------------------------------------------------------------------------

MixedForm::MixedForm(std::shared_ptr<const ManifoldGrid> grid, WordAlgebra alg, int cutoff)
    : grid_(std::move(grid)), alg_(std::move(alg)), cutoff_(cutoff) {
    if (!grid_) throw PreconditionViolation("mixed form needs a grid");
}

MixedForm MixedForm::unit(std::shared_ptr<const ManifoldGrid> grid, WordAlgebra alg, int cutoff, int order, cplx c) {
    MixedForm f(grid, alg, cutoff);
    Field one = Field::constant(grid->size(), grid->dim(), order, c);
    f.add(0u, alg.unit(), one);
    return f;
}

void MixedForm::check_compatible(const MixedForm& o) const {
    if (!(*grid_ == *o.grid_) || !(alg_ == o.alg_))
        throw PreconditionViolation("mixed forms over different grids or algebras");
}

void MixedForm::add(FormMask mask, const Word& w, const Field& f) {
    if (word_degree(w) > cutoff_) {
        dropped_ = true;
        return;
    }
    for (const auto& [v, c] : alg_.canonicalize(w)) terms_[{mask, v}] += f * c;
}

void MixedForm::add(FormMask mask, const WordCombination& wc, const Field& f) {
    for (const auto& [w, c] : wc) add(mask, w, f * c);
}

MixedForm MixedForm::d_manifold() const {
    MixedForm out(grid_, alg_, cutoff_);
    out.dropped_ = dropped_;
    const int dim = grid_->dim();
    for (const auto& [key, f] : terms_)
        for (int m = 0; m < dim; ++m) {
            if (key.mask >> m & 1u) continue;
            const double sign = __builtin_popcount(key.mask & ((1u << m) - 1u)) % 2 ? -1.0 : 1.0;
            out.terms_[{key.mask | (1u << m), key.word}] += f.derivative(m) * sign;
        }
    return out;
}

MixedForm MixedForm::d_algebra() const {
    MixedForm out(grid_, alg_, cutoff_);
    out.dropped_ = dropped_;
    for (const auto& [key, f] : terms_) {
        if (word_degree(key.word) + 1 > cutoff_) {
            out.dropped_ = true;
            continue;
        }
        const double sign = form_degree(key.mask) % 2 ? -1.0 : 1.0;
        for (const auto& [w, c] : alg_.differential(key.word)) out.terms_[{key.mask, w}] += f * (c * sign);
    }
    return out;
}

MixedForm MixedForm::d_tot() const {
    MixedForm out = d_manifold();
    out += d_algebra();
    return out;
}

MixedForm MixedForm::graded_trace() const {
    WordAlgebra scalar(alg_.group(), 1);
    MixedForm out(grid_, scalar, cutoff_);
    out.dropped_ = dropped_;
    for (const auto& [key, f] : terms_)
        for (const auto& [w, c] : alg_.trace(key.word)) out.terms_[{key.mask, w}] += f * c;
    return out;
}

MixedForm MixedForm::star00() const {
    MixedForm out(grid_, alg_, cutoff_);
    out.dropped_ = dropped_;
    for (const auto& [key, f] : terms_) {
        if (key.mask != 0u || key.word.size() != 1) throw DegreeMismatch("star00 needs a (0,0) form");
        const auto& m = key.word[0];
        out.terms_[{0u, Word{{m.col, m.row, alg_.group()->inverse(m.g)}}}] += f.conj();
    }
    return out;
}

MixedForm MixedForm::component(int p, int q) const {
    MixedForm out(grid_, alg_, cutoff_);
    out.dropped_ = dropped_;
    for (const auto& [key, f] : terms_)
        if (form_degree(key.mask) == p && word_degree(key.word) == q) out.terms_.emplace(key, f);
    return out;
}

MixedForm MixedForm::algebra_component(int q) const {
    MixedForm out(grid_, alg_, cutoff_);
    out.dropped_ = dropped_;
    for (const auto& [key, f] : terms_)
        if (word_degree(key.word) == q) out.terms_.emplace(key, f);
    return out;
}

int MixedForm::total_degree() const {
    std::optional<int> deg;
    for (const auto& [key, f] : terms_) {
        int d = form_degree(key.mask) + word_degree(key.word);
        if (deg && *deg != d) throw DegreeMismatch("form is not homogeneous");
        deg = d;
    }
    return deg.value_or(0);
}

double MixedForm::max_abs() const {
    double m = 0;
    for (const auto& [key, f] : terms_) m = std::max(m, f.max_abs());
    return m;
}

void MixedForm::prune() {
    for (auto it = terms_.begin(); it != terms_.end();)
        it = it->second.is_zero() ? terms_.erase(it) : std::next(it);
}

MixedForm& MixedForm::operator+=(const MixedForm& o) {
    check_compatible(o);
    dropped_ = dropped_ || o.dropped_;
    for (const auto& [key, f] : o.terms_) terms_[key] += f;
    return *this;
}

MixedForm& MixedForm::operator-=(const MixedForm& o) {
    check_compatible(o);
    dropped_ = dropped_ || o.dropped_;
    for (const auto& [key, f] : o.terms_) terms_[key] -= f;
    return *this;
}

MixedForm& MixedForm::operator*=(cplx s) {
    for (auto& [key, f] : terms_) f *= s;
    return *this;
}

MixedForm operator*(const MixedForm& a, const MixedForm& b) { return form_mul(a, b); }

MixedForm form_mul(const MixedForm& a, const MixedForm& b) {
    a.check_compatible(b);
    MixedForm out(a.grid_, a.alg_, std::min(a.cutoff_, b.cutoff_));
    out.dropped_ = a.dropped_ || b.dropped_;
    for (const auto& [ka, fa] : a.terms_)
        for (const auto& [kb, fb] : b.terms_) {
            const int s = wedge_sign(ka.mask, kb.mask);
            if (s == 0) continue;
            const int qa = word_degree(ka.word);
            if (qa + word_degree(kb.word) > out.cutoff_) {
                out.dropped_ = true;
                continue;
            }
            const WordCombination prod = a.alg_.multiply(ka.word, kb.word);
            if (prod.empty()) continue;
            const double koszul = (qa * form_degree(kb.mask)) % 2 ? -1.0 : 1.0;
            const Field f = fa * fb;
            const FormMask mask = ka.mask | kb.mask;
            for (const auto& [w, c] : prod) out.terms_[{mask, w}] += f * (c * (s * koszul));
        }
    return out;
}

MixedForm form_dtot(const MixedForm& w) { return w.d_tot(); }
MixedForm graded_trace(const MixedForm& w) { return w.graded_trace(); }

}  // namespace ncindex
