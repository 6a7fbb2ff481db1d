#include "opdual/operads.hpp"

#include <algorithm>

namespace opdual {

Matrix PreCooperad::expand_to(const Tree& t, const Tree& s) const {
    if (!leq(t, s)) throw OperadError("expand_to: " + to_string(t) + " is not below " + to_string(s));
    auto key = std::make_pair(to_string(t), to_string(s));
    {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = expand_cache_.find(key);
        if (it != expand_cache_.end()) return it->second;
    }
    std::vector<Mask> extra;
    for (Mask c : s.clusters())
        if (!t.has_cluster(c)) extra.push_back(c);
    std::sort(extra.begin(), extra.end(), [](Mask a, Mask b) {
        return popcount(a) != popcount(b) ? popcount(a) > popcount(b) : a < b;
    });
    const Field& F = field();
    Matrix acc = Matrix::identity(at(t)->dim());
    Tree cur = t;
    for (Mask c : extra) {
        auto cl = cur.clusters();
        cl.push_back(c);
        Tree next = Tree::from_clusters(t.arity(), cl);
        acc = mul(F, cover_map(cur, next), acc);
        cur = next;
    }
    std::lock_guard<std::mutex> lock(mu_);
    expand_cache_.emplace(key, acc);
    return acc;
}

namespace {

Matrix pairing_signs(const Field& F, const ChainComplex& a, const ChainComplex& b) {
    int da = a.dim(), db = b.dim();
    Matrix m(da * db, da * db);
    for (int i = 0; i < da; ++i)
        for (int j = 0; j < db; ++j) m.add(i * db + j, i * db + j, sign_scalar((a.degree(i) * b.degree(j)) & 1));
    m.normalize(F);
    return m;
}

class ExtendedCooperad : public PreCooperad {
public:
    explicit ExtendedCooperad(CooperadPtr q) : q_(std::move(q)) {}
    const Field& field() const override { return q_->field(); }
    int max_arity() const override { return q_->max_arity(); }
    std::string name() const override { return "extend(" + q_->name + ")"; }
    CxPtr at(const Tree& t) const override { return tree_tensor(q_->seq, t); }
    Matrix cover_map(const Tree& t, const Tree& s) const override { return expand_map(*q_, t, s); }
    Matrix relabel_map(const Tree& t, const Perm& sigma) const override { return transport_map(q_->seq, t, sigma); }
    Matrix m(const Tree& t, int i, const Tree& u) const override { return graft_tensor_map(q_->seq, t, i, u); }

private:
    CooperadPtr q_;
};

class DualPreCooperad : public PreCooperad {
public:
    explicit DualPreCooperad(OperadPtr p) : p_(std::move(p)) {}
    const Field& field() const override { return p_->field(); }
    int max_arity() const override { return p_->max_arity(); }
    std::string name() const override { return "dual(" + p_->name + ")"; }
    CxPtr at(const Tree& t) const override {
        std::string key = to_string(t);
        std::lock_guard<std::mutex> lock(mu_);
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
        CxPtr c = share(linear_dual(*tree_tensor(p_->seq, t)));
        cache_.emplace(key, c);
        return c;
    }
    Matrix cover_map(const Tree& t, const Tree& s) const override { return transpose(contract_map(*p_, s, t)); }
    Matrix relabel_map(const Tree& t, const Perm& sigma) const override {
        return transpose(transport_map(p_->seq, relabel(t, sigma), inverse_perm(sigma)));
    }
    // dual(p(t)) (x) dual(p(u)) -> dual(p(t) (x) p(u)) -> dual(p(t o_i u)); the
    // regrouping is a signed permutation, so its inverse transpose is itself.
    Matrix m(const Tree& t, int i, const Tree& u) const override {
        const Field& F = field();
        return mul(F, graft_tensor_map(p_->seq, t, i, u),
                   pairing_signs(F, *tree_tensor(p_->seq, t), *tree_tensor(p_->seq, u)));
    }

private:
    OperadPtr p_;
    mutable std::mutex mu_;
    mutable std::map<std::string, CxPtr> cache_;
};

class CorruptPreCooperad : public PreCooperad {
public:
    CorruptPreCooperad(PreCooperadPtr q, Tree t, int i, Tree u) : q_(std::move(q)), t_(t), i_(i), u_(u) {}
    const Field& field() const override { return q_->field(); }
    int max_arity() const override { return q_->max_arity(); }
    std::string name() const override { return "corrupt(" + q_->name() + ")"; }
    CxPtr at(const Tree& t) const override { return q_->at(t); }
    Matrix cover_map(const Tree& t, const Tree& s) const override { return q_->cover_map(t, s); }
    Matrix relabel_map(const Tree& t, const Perm& sigma) const override { return q_->relabel_map(t, sigma); }
    Matrix m(const Tree& t, int i, const Tree& u) const override {
        Matrix r = q_->m(t, i, u);
        if (t == t_ && i == i_ && u == u_) return Matrix(r.rows(), r.cols());
        return r;
    }

private:
    PreCooperadPtr q_;
    Tree t_;
    int i_;
    Tree u_;
};

class CorollaFamily : public TreeFamily {
public:
    explicit CorollaFamily(SymSeq a) : a_(std::move(a)), zero_(share(ChainComplex::zero(a_.field()))) {}
    const Field& field() const override { return a_.field(); }
    int max_arity() const override { return a_.max_arity(); }
    CxPtr at(const Tree& t) const override {
        if (t.vertices() <= 1) return a_.term(t.arity());
        return zero_;
    }
    Matrix cover_map(const Tree& t, const Tree& s) const override { return Matrix(at(s)->dim(), at(t)->dim()); }
    Matrix relabel_map(const Tree& t, const Perm& sigma) const override {
        if (t.vertices() <= 1) return a_.act(t.arity(), sigma);
        return Matrix(0, 0);
    }

private:
    SymSeq a_;
    CxPtr zero_;
};

class UnderlyingFamily : public TreeFamily {
public:
    explicit UnderlyingFamily(PreCooperadPtr q) : q_(std::move(q)) {}
    const Field& field() const override { return q_->field(); }
    int max_arity() const override { return q_->max_arity(); }
    CxPtr at(const Tree& t) const override { return q_->at(t); }
    Matrix cover_map(const Tree& t, const Tree& s) const override { return q_->cover_map(t, s); }
    Matrix relabel_map(const Tree& t, const Perm& sigma) const override { return q_->relabel_map(t, sigma); }

private:
    PreCooperadPtr q_;
};

void place(Matrix& dst, const Matrix& blk, int r0, int c0) {
    for (int j = 0; j < blk.cols(); ++j)
        for (const auto& [r, v] : blk.col(j)) dst.add(r0 + r, c0 + j, v);
}

} // namespace

PreCooperadPtr extend_cooperad(CooperadPtr q) { return std::make_shared<ExtendedCooperad>(std::move(q)); }
PreCooperadPtr dual_precooperad(OperadPtr p) { return std::make_shared<DualPreCooperad>(std::move(p)); }
PreCooperadPtr corrupt_precooperad(PreCooperadPtr q, const Tree& t, int i, const Tree& u) {
    return std::make_shared<CorruptPreCooperad>(std::move(q), t, i, u);
}
TreeFamilyPtr corolla_family(const SymSeq& a) { return std::make_shared<CorollaFamily>(a); }
TreeFamilyPtr family_of(PreCooperadPtr q) { return std::make_shared<UnderlyingFamily>(std::move(q)); }

// ---- free pre-cooperad ----------------------------------------------------

FreePreCooperad::FreePreCooperad(TreeFamilyPtr a, std::string name) : a_(std::move(a)), name_(std::move(name)) {}

const FreePreCooperad::Entry& FreePreCooperad::entry(const Tree& t) const {
    std::string key = to_string(t);
    {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = cache_.find(key);
        if (it != cache_.end()) return *it->second;
    }
    auto e = std::make_shared<Entry>();
    std::vector<ChainComplex> parts;
    int off = 0;
    for (const Tree& u : enumerate_trees(t.arity())) {
        auto frs = fragments(t, u);
        if (!frs) continue;
        std::vector<const ChainComplex*> fs;
        std::vector<CxPtr> keep;
        for (const Tree& f : *frs) {
            keep.push_back(a_->at(f));
            fs.push_back(keep.back().get());
        }
        ChainComplex c = tensor_all(field(), fs);
        e->where[to_string(u)] = static_cast<int>(e->parts.size());
        e->parts.push_back({u, off, *frs});
        off += c.dim();
        parts.push_back(std::move(c));
    }
    e->cx = share(direct_sum(parts));
    std::lock_guard<std::mutex> lock(mu_);
    auto [it, _] = cache_.emplace(key, e);
    return *it->second;
}

CxPtr FreePreCooperad::at(const Tree& t) const { return entry(t).cx; }

const std::vector<FreePreCooperad::Summand>& FreePreCooperad::summands(const Tree& t) const { return entry(t).parts; }

Matrix FreePreCooperad::unit(const Tree& t) const {
    const Entry& e = entry(t);
    Tree top = t.arity() == 1 ? Tree() : Tree::corolla(t.arity());
    const Summand& s = e.parts[e.where.at(to_string(top))];
    int d = a_->at(t)->dim();
    Matrix m(e.cx->dim(), d);
    if (t.arity() == 1) {
        // A(1) and the empty tensor are both one-dimensional.
        if (d == 1) m.add(s.offset, 0, 1);
        return m;
    }
    place(m, Matrix::identity(d), s.offset, 0);
    return m;
}

Matrix FreePreCooperad::cover_map(const Tree& t, const Tree& s) const {
    const Entry& et = entry(t);
    const Entry& es = entry(s);
    const Field& F = field();
    Matrix out(es.cx->dim(), et.cx->dim());
    for (const Summand& p : et.parts) {
        const Summand& q = es.parts[es.where.at(to_string(p.u))];
        std::vector<Matrix> ms;
        for (size_t w = 0; w < p.frags.size(); ++w) {
            if (p.frags[w] == q.frags[w]) ms.push_back(Matrix::identity(a_->at(p.frags[w])->dim()));
            else ms.push_back(a_->cover_map(p.frags[w], q.frags[w]));
        }
        place(out, kron_all(F, ms), q.offset, p.offset);
    }
    out.normalize(F);
    return out;
}

Matrix FreePreCooperad::relabel_map(const Tree& t, const Perm& sigma) const {
    const Field& F = field();
    Tree st = relabel(t, sigma);
    const Entry& et = entry(t);
    const Entry& es = entry(st);
    Matrix out(es.cx->dim(), et.cx->dim());
    for (const Summand& p : et.parts) {
        Transport tr = transport(p.u, sigma);
        const Summand& q = es.parts[es.where.at(to_string(tr.tree))];
        std::vector<Matrix> ms;
        std::vector<CxPtr> fs;
        for (size_t w = 0; w < p.frags.size(); ++w) {
            ms.push_back(a_->relabel_map(p.frags[w], tr.inputs[w]));
            fs.push_back(a_->at(q.frags[tr.vertex[w]]));
        }
        std::vector<int> order(p.frags.size());
        for (size_t w = 0; w < p.frags.size(); ++w) order[tr.vertex[w]] = static_cast<int>(w);
        place(out, mul(F, permute_factors(F, fs, order), kron_all(F, ms)), q.offset, p.offset);
    }
    out.normalize(F);
    return out;
}

Matrix FreePreCooperad::m(const Tree& t, int i, const Tree& u) const {
    const Field& F = field();
    Tree g = graft(t, i, u);
    const Entry& et = entry(t);
    const Entry& eu = entry(u);
    const Entry& eg = entry(g);
    int du = eu.cx->dim();
    Matrix out(eg.cx->dim(), et.cx->dim() * du);
    for (const Summand& p : et.parts)
        for (const Summand& q : eu.parts) {
            Tree h = graft(p.u, i, q.u);
            const Summand& r = eg.parts[eg.where.at(to_string(h))];
            std::vector<CxPtr> fs;
            for (const Tree& f : p.frags) fs.push_back(a_->at(f));
            for (const Tree& f : q.frags) fs.push_back(a_->at(f));
            Matrix blk = permute_factors(F, fs, graft_vertex_order(p.u, i, q.u));
            int dq = 1;
            for (const Tree& f : q.frags) dq *= a_->at(f)->dim();
            for (int j = 0; j < blk.cols(); ++j) {
                int col = (p.offset + j / dq) * du + q.offset + j % dq;
                for (const auto& [row, v] : blk.col(j)) out.add(r.offset + row, col, v);
            }
        }
    out.normalize(F);
    return out;
}

Matrix free_monad_mult(const FreePreCooperad& ffa, const FreePreCooperad& fa, const Tree& t) {
    const Field& F = fa.field();
    const auto& A = fa.base();
    int n = t.arity();
    Matrix out(fa.at(t)->dim(), ffa.at(t)->dim());
    const auto& tparts = fa.summands(t);
    std::map<std::string, int> where;
    for (size_t j = 0; j < tparts.size(); ++j) where[to_string(tparts[j].u)] = static_cast<int>(j);

    for (const auto& outer : ffa.summands(t)) {
        const Tree& U = outer.u;
        int k = static_cast<int>(outer.frags.size());
        std::vector<int> dims(k);
        for (int w = 0; w < k; ++w) dims[w] = fa.at(outer.frags[w])->dim();
        int total = 1;
        for (int d : dims) total *= d;
        for (int idx = 0; idx < total; ++idx) {
            auto xs = decode_index(dims, idx);
            std::vector<Mask> lifted;
            std::vector<CxPtr> cxs;
            std::vector<int> digits;
            for (int w = 0; w < k; ++w) {
                const auto& inner = fa.summands(outer.frags[w]);
                size_t j = 0;
                std::vector<int> pd;
                for (;; ++j) {
                    pd.clear();
                    int size = 1;
                    for (const Tree& f : inner[j].frags) {
                        pd.push_back(A->at(f)->dim());
                        size *= pd.back();
                    }
                    if (xs[w] < inner[j].offset + size) break;
                }
                const auto& part = inner[j];
                auto ys = decode_index(pd, xs[w] - part.offset);
                const auto& kids = U.children(w);
                for (size_t v = 0; v < part.frags.size(); ++v) {
                    Mask c = part.u.cluster(static_cast<int>(v)), lift = 0;
                    for (size_t l = 0; l < kids.size(); ++l)
                        if (c & leaf_bit(static_cast<int>(l) + 1)) lift |= kids[l].mask;
                    lifted.push_back(lift);
                    cxs.push_back(A->at(part.frags[v]));
                    digits.push_back(ys[v]);
                }
            }
            Tree V = n == 1 ? Tree() : Tree::from_clusters(n, lifted);
            const auto& tgt = tparts[where.at(to_string(V))];
            int f = static_cast<int>(lifted.size());
            std::vector<int> pos(f), nd(f), ndims(f);
            for (int a = 0; a < f; ++a) {
                pos[a] = V.find(lifted[a]);
                nd[pos[a]] = digits[a];
                ndims[pos[a]] = cxs[a]->dim();
            }
            int parity = 0;
            for (int a = 0; a < f; ++a)
                for (int b = a + 1; b < f; ++b)
                    if (pos[a] > pos[b]) parity += cxs[a]->degree(digits[a]) * cxs[b]->degree(digits[b]);
            out.add(tgt.offset + encode_index(ndims, nd), outer.offset + idx, sign_scalar(parity & 1));
        }
    }
    out.normalize(F);
    return out;
}

// ---- checks ---------------------------------------------------------------

namespace {

std::string mtag(const Tree& t, int i, const Tree& u) {
    return "m(" + to_string(t) + "," + std::to_string(i) + "," + to_string(u) + ")";
}

Perm transposition(int n, int k) {
    Perm p = identity_perm(n);
    std::swap(p[k - 1], p[k]);
    return p;
}

} // namespace

QuasiReport is_quasi_cooperad(const PreCooperad& q, int N) {
    QuasiReport rep;
    N = std::min(N, q.max_arity());
    for (int a = 2; a <= N; ++a)
        for (int b = 2; a + b - 1 <= N; ++b)
            for (const Tree& t : enumerate_trees(a))
                for (const Tree& u : enumerate_trees(b))
                    for (int i = 1; i <= a; ++i) {
                        auto src = share(tensor(*q.at(t), *q.at(u)));
                        ChainMap f{src, q.at(graft(t, i, u)), 0, q.m(t, i, u)};
                        if (!check_map(f).empty() || !is_quasi_iso(f)) {
                            rep.ok = false;
                            rep.witnesses.push_back(mtag(t, i, u));
                        }
                    }
    return rep;
}

std::vector<std::string> check_precooperad(const PreCooperad& q, int N) {
    const Field& F = q.field();
    N = std::min(N, q.max_arity());
    std::vector<std::string> bad;
    auto chain = [&](CxPtr s, CxPtr t, const Matrix& m) { return check_map(ChainMap{s, t, 0, m}).empty(); };

    for (int n = 2; n <= N; ++n) {
        const auto& trees = enumerate_trees(n);
        for (const Tree& t : trees) {
            for (const auto& ex : expansions(t))
                if (!chain(q.at(t), q.at(ex.tree), q.cover_map(t, ex.tree)))
                    bad.push_back("cover-chain(" + to_string(t) + "," + to_string(ex.tree) + ")");
            for (const Tree& w : trees) {
                if (w.vertices() != t.vertices() + 2 || !leq(t, w)) continue;
                std::vector<Mask> extra;
                for (Mask c : w.clusters())
                    if (!t.has_cluster(c)) extra.push_back(c);
                auto via = [&](Mask c) {
                    auto cl = t.clusters();
                    cl.push_back(c);
                    Tree mid = Tree::from_clusters(n, cl);
                    return mul(F, q.cover_map(mid, w), q.cover_map(t, mid));
                };
                if (!equal(F, via(extra[0]), via(extra[1])))
                    bad.push_back("cover-square(" + to_string(t) + "," + to_string(w) + ")");
            }
            for (int k = 1; k < n; ++k) {
                Perm s = transposition(n, k);
                Tree st = relabel(t, s);
                Matrix r = q.relabel_map(t, s);
                if (!chain(q.at(t), q.at(st), r)) bad.push_back("relabel-chain(" + to_string(t) + "," + std::to_string(k) + ")");
                if (!equal(F, mul(F, q.relabel_map(st, s), r), Matrix::identity(q.at(t)->dim())))
                    bad.push_back("relabel-involution(" + to_string(t) + "," + std::to_string(k) + ")");
                for (const auto& ex : expansions(t)) {
                    Tree se = relabel(ex.tree, s);
                    Matrix lhs = mul(F, q.cover_map(st, se), r);
                    Matrix rhs = mul(F, q.relabel_map(ex.tree, s), q.cover_map(t, ex.tree));
                    if (!equal(F, lhs, rhs))
                        bad.push_back("relabel-natural(" + to_string(t) + "," + to_string(ex.tree) + "," + std::to_string(k) + ")");
                }
            }
        }
    }

    for (int a = 2; a <= N; ++a)
        for (int b = 2; a + b - 1 <= N; ++b)
            for (const Tree& t : enumerate_trees(a))
                for (const Tree& u : enumerate_trees(b))
                    for (int i = 1; i <= a; ++i) {
                        Tree g = graft(t, i, u);
                        Matrix m = q.m(t, i, u);
                        CxPtr src = share(tensor(*q.at(t), *q.at(u)));
                        if (!chain(src, q.at(g), m)) bad.push_back("m-chain:" + mtag(t, i, u));
                        Matrix Iu = Matrix::identity(q.at(u)->dim());
                        Matrix It = Matrix::identity(q.at(t)->dim());
                        for (const auto& ex : expansions(t)) {
                            Matrix lhs = mul(F, q.m(ex.tree, i, u), kron(F, q.cover_map(t, ex.tree), Iu));
                            Matrix rhs = mul(F, q.expand_to(g, graft(ex.tree, i, u)), m);
                            if (!equal(F, lhs, rhs)) bad.push_back("m-natural-left:" + mtag(t, i, u));
                        }
                        for (const auto& ex : expansions(u)) {
                            Matrix lhs = mul(F, q.m(t, i, ex.tree), kron(F, It, q.cover_map(u, ex.tree)));
                            Matrix rhs = mul(F, q.expand_to(g, graft(t, i, ex.tree)), m);
                            if (!equal(F, lhs, rhs)) bad.push_back("m-natural-right:" + mtag(t, i, u));
                        }
                        for (int k = 1; k < b; ++k) {
                            Perm r = transposition(b, k);
                            Matrix lhs = mul(F, q.relabel_map(g, block_insert(a, i, r)), m);
                            Matrix rhs = mul(F, q.m(t, i, relabel(u, r)), kron(F, It, q.relabel_map(u, r)));
                            if (!equal(F, lhs, rhs)) bad.push_back("m-equiv-inner:" + mtag(t, i, u));
                        }
                        for (int k = 1; k < a; ++k) {
                            Perm s = transposition(a, k);
                            Matrix lhs = mul(F, q.relabel_map(g, block_expand(s, i, b)), m);
                            Matrix rhs = mul(F, q.m(relabel(t, s), s[i - 1], u), kron(F, q.relabel_map(t, s), Iu));
                            if (!equal(F, lhs, rhs)) bad.push_back("m-equiv-outer:" + mtag(t, i, u));
                        }
                        for (int c = 2; a + b + c - 2 <= N; ++c)
                            for (const Tree& w : enumerate_trees(c)) {
                                Matrix Iw = Matrix::identity(q.at(w)->dim());
                                for (int j = 1; j <= b; ++j) {
                                    Matrix lhs = mul(F, q.m(g, i + j - 1, w), kron(F, m, Iw));
                                    Matrix rhs = mul(F, q.m(t, i, graft(u, j, w)), kron(F, It, q.m(u, j, w)));
                                    if (!equal(F, lhs, rhs))
                                        bad.push_back("m-assoc-seq:" + mtag(t, i, u) + "," + std::to_string(j) + "," + to_string(w));
                                }
                                for (int k = i + 1; k <= a; ++k) {
                                    Matrix lhs = mul(F, q.m(g, k + b - 1, w), kron(F, m, Iw));
                                    Tree g2 = graft(t, k, w);
                                    Matrix sw = permute_factors(F, {q.at(u), q.at(w)}, {1, 0});
                                    Matrix rhs = mul(F, q.m(g2, i, u), kron(F, q.m(t, k, w), Iu));
                                    rhs = mul(F, rhs, kron(F, It, sw));
                                    if (!equal(F, lhs, rhs))
                                        bad.push_back("m-assoc-par:" + mtag(t, i, u) + "," + std::to_string(k) + "," + to_string(w));
                                }
                            }
                    }
    return bad;
}

// ---- composition product --------------------------------------------------

namespace {

void set_partitions(int n, int next, std::vector<std::vector<int>>& cur, std::vector<std::vector<std::vector<int>>>& out) {
    if (next > n) {
        out.push_back(cur);
        return;
    }
    for (size_t b = 0; b < cur.size(); ++b) {
        cur[b].push_back(next);
        set_partitions(n, next + 1, cur, out);
        cur[b].pop_back();
    }
    cur.push_back({next});
    set_partitions(n, next + 1, cur, out);
    cur.pop_back();
}

} // namespace

ChainComplex dual_compose(const SymSeq& a1, const SymSeq& a0, int n) {
    std::vector<std::vector<std::vector<int>>> parts;
    std::vector<std::vector<int>> cur;
    set_partitions(n, 1, cur, parts);
    std::vector<ChainComplex> sums;
    for (const auto& p : parts) {
        std::vector<const ChainComplex*> fs{a1.term(static_cast<int>(p.size())).get()};
        for (const auto& b : p) fs.push_back(a0.term(static_cast<int>(b.size())).get());
        sums.push_back(tensor_all(a1.field(), fs));
    }
    return direct_sum(sums);
}

} // namespace opdual
