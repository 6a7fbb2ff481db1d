#include "opdual/operads.hpp"

#include <algorithm>
#include <sstream>

namespace opdual {

namespace {

std::string perm_str(const Perm& p) {
    std::string s;
    for (int x : p) s += std::to_string(x);
    return s;
}

Matrix pow_mul(const Field& F, const Matrix& a, int k) {
    Matrix r = Matrix::identity(a.rows());
    for (int i = 0; i < k; ++i) r = mul(F, r, a);
    return r;
}

} // namespace

SymSeq::SymSeq(const Field& F, int N) : F_(F), N_(N), terms_(N + 1), s_(N + 1) {
    if (N < 1) throw OperadError("max arity must be at least 1");
    auto zero = share(ChainComplex::zero(F));
    for (int n = 1; n <= N; ++n) {
        terms_[n] = n == 1 ? share(ChainComplex::unit(F)) : zero;
        s_[n].assign(n - 1, Matrix::identity(terms_[n]->dim()));
    }
}

const CxPtr& SymSeq::term(int n) const {
    if (n < 1 || n > N_) throw OperadError("arity " + std::to_string(n) + " outside 1.." + std::to_string(N_));
    return terms_[n];
}

void SymSeq::set_term(int n, CxPtr c) {
    term(n);
    if (c->field() != F_) throw OperadError("field mismatch in arity " + std::to_string(n));
    s_[n].assign(n - 1, Matrix::identity(c->dim()));
    terms_[n] = std::move(c);
    cache_ = std::make_shared<Cache>();
}

void SymSeq::set_s(int n, int k, Matrix m) {
    int d = term(n)->dim();
    if (k < 1 || k >= n) throw OperadError("transposition index out of range");
    if (m.rows() != d || m.cols() != d) throw OperadError("transposition matrix has wrong shape");
    m.normalize(F_);
    s_[n][k - 1] = std::move(m);
    cache_ = std::make_shared<Cache>();
}

Matrix SymSeq::act(int n, const Perm& sigma) const {
    if (static_cast<int>(sigma.size()) != n || !is_perm(sigma)) throw OperadError("not a permutation of arity " + std::to_string(n));
    int d = term(n)->dim();
    int k = 0;
    for (int i = 1; i < n; ++i)
        if (sigma[i - 1] > sigma[i]) {
            k = i;
            break;
        }
    if (k == 0) return Matrix::identity(d);
    auto key = std::make_pair(n, sigma);
    {
        std::lock_guard<std::mutex> lock(cache_->mu);
        auto it = cache_->act.find(key);
        if (it != cache_->act.end()) return it->second;
    }
    Perm rest = sigma;
    std::swap(rest[k - 1], rest[k]);
    Matrix r = mul(F_, act(n, rest), s(n, k));
    std::lock_guard<std::mutex> lock(cache_->mu);
    cache_->act.emplace(key, r);
    return r;
}

std::vector<std::string> SymSeq::check() const {
    std::vector<std::string> bad;
    for (int n = 2; n <= N_; ++n) {
        const auto& c = terms_[n];
        int d = c->dim();
        Matrix I = Matrix::identity(d);
        for (int k = 1; k < n; ++k) {
            std::string tag = "(" + std::to_string(n) + "," + std::to_string(k) + ")";
            const Matrix& a = s(n, k);
            if (!check_map(ChainMap{c, c, 0, a}).empty()) bad.push_back("sigma-chain" + tag);
            if (!equal(F_, mul(F_, a, a), I)) bad.push_back("sigma-involution" + tag);
            if (k + 1 < n && !equal(F_, pow_mul(F_, mul(F_, a, s(n, k + 1)), 3), I))
                bad.push_back("sigma-braid" + tag);
            for (int j = k + 2; j < n; ++j)
                if (!equal(F_, mul(F_, a, s(n, j)), mul(F_, s(n, j), a)))
                    bad.push_back("sigma-commute(" + std::to_string(n) + "," + std::to_string(k) + "," +
                                  std::to_string(j) + ")");
        }
    }
    return bad;
}

const Matrix& Operad::circ_at(int m, int n, int i) const {
    auto it = circ.find({m, n, i});
    if (it == circ.end())
        throw OperadError(name + ": no composition (" + std::to_string(m) + "," + std::to_string(n) + "," +
                          std::to_string(i) + ")");
    return it->second;
}

const Matrix& Cooperad::cocirc_at(int m, int n, int i) const {
    auto it = cocirc.find({m, n, i});
    if (it == cocirc.end())
        throw OperadError(name + ": no decomposition (" + std::to_string(m) + "," + std::to_string(n) + "," +
                          std::to_string(i) + ")");
    return it->second;
}

void add_unit_circs(Operad& p) {
    int N = p.max_arity();
    for (int n = 1; n <= N; ++n) {
        Matrix I = Matrix::identity(p.term(n)->dim());
        p.circ[{1, n, 1}] = I;
        for (int i = 1; i <= n; ++i) p.circ[{n, 1, i}] = I;
    }
}

void add_unit_cocircs(Cooperad& q) {
    int N = q.max_arity();
    for (int n = 1; n <= N; ++n) {
        Matrix I = Matrix::identity(q.term(n)->dim());
        q.cocirc[{1, n, 1}] = I;
        for (int i = 1; i <= n; ++i) q.cocirc[{n, 1, i}] = I;
    }
}

namespace {

std::vector<Perm> all_words(int n) {
    std::vector<Perm> out;
    Perm w = identity_perm(n);
    do out.push_back(w);
    while (std::next_permutation(w.begin(), w.end()));
    return out;
}

OperadPtr make_com(const Field& F, int N) {
    auto p = std::make_shared<Operad>();
    p->name = "com";
    p->seq = SymSeq(F, N);
    for (int n = 2; n <= N; ++n) p->seq.set_term(n, share(ChainComplex(F, {0}, Matrix(1, 1), {"mu" + std::to_string(n)})));
    add_unit_circs(*p);
    for (int m = 2; m <= N; ++m)
        for (int n = 2; m + n - 1 <= N; ++n)
            for (int i = 1; i <= m; ++i) p->circ[{m, n, i}] = Matrix::identity(1);
    return p;
}

OperadPtr make_ass(const Field& F, int N) {
    auto p = std::make_shared<Operad>();
    p->name = "ass";
    p->seq = SymSeq(F, N);
    std::vector<std::vector<Perm>> words(N + 1);
    std::vector<std::map<Perm, int>> index(N + 1);
    for (int n = 1; n <= N; ++n) {
        words[n] = all_words(n);
        for (int j = 0; j < static_cast<int>(words[n].size()); ++j) index[n][words[n][j]] = j;
    }
    for (int n = 2; n <= N; ++n) {
        int d = static_cast<int>(words[n].size());
        std::vector<std::string> names;
        for (const auto& w : words[n]) names.push_back(perm_str(w));
        p->seq.set_term(n, share(ChainComplex(F, std::vector<int>(d, 0), Matrix(d, d), names)));
        for (int k = 1; k < n; ++k) {
            Matrix s(d, d);
            for (int j = 0; j < d; ++j) {
                Perm w = words[n][j];
                for (int& x : w) x = x == k ? k + 1 : x == k + 1 ? k : x;
                s.add(index[n][w], j, 1);
            }
            p->seq.set_s(n, k, s);
        }
    }
    add_unit_circs(*p);
    for (int m = 2; m <= N; ++m)
        for (int n = 2; m + n - 1 <= N; ++n) {
            int dm = static_cast<int>(words[m].size()), dn = static_cast<int>(words[n].size());
            for (int i = 1; i <= m; ++i) {
                Matrix c(static_cast<int>(words[m + n - 1].size()), dm * dn);
                for (int a = 0; a < dm; ++a)
                    for (int b = 0; b < dn; ++b) {
                        Perm w;
                        for (int x : words[m][a]) {
                            if (x < i) w.push_back(x);
                            else if (x > i) w.push_back(x + n - 1);
                            else
                                for (int y : words[n][b]) w.push_back(i - 1 + y);
                        }
                        c.add(index[m + n - 1][w], a * dn + b, 1);
                    }
                p->circ[{m, n, i}] = c;
            }
        }
    return p;
}

} // namespace

OperadPtr builtin_operad(const std::string& name, const Field& F, int N) {
    if (name == "com") return make_com(F, N);
    if (name == "ass") return make_ass(F, N);
    throw OperadError("unknown builtin operad '" + name + "'");
}

OperadPtr trivial_operad(const SymSeq& a, const std::string& name) {
    auto p = std::make_shared<Operad>();
    p->name = name;
    p->seq = a;
    int N = a.max_arity();
    add_unit_circs(*p);
    for (int m = 2; m <= N; ++m)
        for (int n = 2; m + n - 1 <= N; ++n)
            for (int i = 1; i <= m; ++i)
                p->circ[{m, n, i}] = Matrix(a.term(m + n - 1)->dim(), a.term(m)->dim() * a.term(n)->dim());
    return p;
}

OperadPtr free_operad(const SymSeq& a, int N, const std::string& name) {
    const Field& F = a.field();
    if (N > a.max_arity()) throw OperadError("free operad arity exceeds generators");
    struct Part {
        Tree t;
        int offset;
    };
    std::vector<std::vector<Part>> parts(N + 1);
    std::vector<std::map<std::string, int>> where(N + 1);
    auto p = std::make_shared<Operad>();
    p->name = name;
    p->seq = SymSeq(F, N);
    for (int n = 2; n <= N; ++n) {
        std::vector<ChainComplex> cs;
        std::vector<std::string> names;
        int off = 0;
        for (const Tree& t : enumerate_trees(n)) {
            CxPtr c = tree_tensor(a, t);
            if (c->dim() == 0) continue;
            where[n][to_string(t)] = static_cast<int>(parts[n].size());
            parts[n].push_back({t, off});
            off += c->dim();
            for (int j = 0; j < c->dim(); ++j) names.push_back(to_string(t) + ":" + c->name(j));
            cs.push_back(*c);
        }
        ChainComplex sum = direct_sum(cs);
        p->seq.set_term(n, share(ChainComplex(F, sum.degrees(), sum.d(), names, false)));
    }
    auto place = [](Matrix& dst, const Matrix& blk, int r0, int c0) {
        for (int j = 0; j < blk.cols(); ++j)
            for (const auto& [r, v] : blk.col(j)) dst.add(r0 + r, c0 + j, v);
    };
    for (int n = 2; n <= N; ++n) {
        int d = p->term(n)->dim();
        for (int k = 1; k < n; ++k) {
            Matrix s(d, d);
            Perm sk = identity_perm(n);
            std::swap(sk[k - 1], sk[k]);
            for (const Part& pt : parts[n]) {
                Tree st = relabel(pt.t, sk);
                const Part& tgt = parts[n][where[n].at(to_string(st))];
                place(s, transport_map(a, pt.t, sk), tgt.offset, pt.offset);
            }
            s.normalize(F);
            p->seq.set_s(n, k, s);
        }
    }
    add_unit_circs(*p);
    for (int m = 2; m <= N; ++m)
        for (int n = 2; m + n - 1 <= N; ++n) {
            int dn = p->term(n)->dim();
            for (int i = 1; i <= m; ++i) {
                Matrix c(p->term(m + n - 1)->dim(), p->term(m)->dim() * dn);
                for (const Part& x : parts[m])
                    for (const Part& y : parts[n]) {
                        Tree g = graft(x.t, i, y.t);
                        const Part& tgt = parts[m + n - 1][where[m + n - 1].at(to_string(g))];
                        Matrix blk = graft_tensor_map(a, x.t, i, y.t);
                        int dy = tree_tensor(a, y.t)->dim();
                        for (int j = 0; j < blk.cols(); ++j) {
                            int col = (x.offset + j / dy) * dn + y.offset + j % dy;
                            for (const auto& [r, v] : blk.col(j)) c.add(tgt.offset + r, col, v);
                        }
                    }
                c.normalize(F);
                p->circ[{m, n, i}] = c;
            }
        }
    return p;
}

OperadPtr truncate(const Operad& p, int n, TruncMode mode) {
    int N = p.max_arity();
    auto q = std::make_shared<Operad>();
    q->name = p.name + (mode == TruncMode::AtMost ? "<=" : "==") + std::to_string(n);
    q->seq = SymSeq(p.field(), N);
    auto keep = [&](int k) { return k == 1 || (mode == TruncMode::AtMost ? k <= n : k == n); };
    for (int k = 2; k <= N; ++k) {
        if (!keep(k)) continue;
        q->seq.set_term(k, p.term(k));
        for (int j = 1; j < k; ++j) q->seq.set_s(k, j, p.seq.s(k, j));
    }
    add_unit_circs(*q);
    for (const auto& [key, m] : p.circ) {
        auto [a, b, i] = key;
        if (a == 1 || b == 1) continue;
        int dt = q->term(a + b - 1)->dim();
        int ds = q->term(a)->dim() * q->term(b)->dim();
        q->circ[key] = keep(a + b - 1) && keep(a) && keep(b) ? m : Matrix(dt, ds);
    }
    return q;
}

SymSeq symseq_from_terms(const Field& F, int N, const std::map<int, ChainComplex>& terms) {
    SymSeq a(F, N);
    for (const auto& [n, c] : terms) {
        if (n < 1 || n > N) throw OperadError("arity " + std::to_string(n) + " outside 1.." + std::to_string(N));
        if (n == 1) continue;
        a.set_term(n, share(c));
    }
    return a;
}

SymSeq shift_symseq(const SymSeq& a, int s) {
    SymSeq b(a.field(), a.max_arity());
    for (int n = 2; n <= a.max_arity(); ++n) {
        b.set_term(n, share(shift(*a.term(n), s)));
        for (int k = 1; k < n; ++k) b.set_s(n, k, a.s(n, k));
    }
    return b;
}

SymSeq dual_symseq(const SymSeq& a) {
    SymSeq b(a.field(), a.max_arity());
    for (int n = 2; n <= a.max_arity(); ++n) {
        b.set_term(n, share(linear_dual(*a.term(n))));
        for (int k = 1; k < n; ++k) b.set_s(n, k, transpose(a.s(n, k)));
    }
    return b;
}

Perm block_expand(const Perm& sigma, int i, int n) {
    int m = static_cast<int>(sigma.size());
    int si = sigma[i - 1];
    Perm out;
    auto outer = [&](int j) { return sigma[j - 1] < si ? sigma[j - 1] : sigma[j - 1] + n - 1; };
    for (int a = 1; a < i; ++a) out.push_back(outer(a));
    for (int b = 1; b <= n; ++b) out.push_back(si - 1 + b);
    for (int a = i + 1; a <= m; ++a) out.push_back(outer(a));
    return out;
}

Perm block_insert(int m, int i, const Perm& rho) {
    Perm out;
    for (int a = 1; a < i; ++a) out.push_back(a);
    for (int x : rho) out.push_back(i - 1 + x);
    int n = static_cast<int>(rho.size());
    for (int a = i + 1; a <= m; ++a) out.push_back(a + n - 1);
    return out;
}

} // namespace opdual
