#include "opdual/operads.hpp"

#include <algorithm>

namespace opdual {

namespace {

std::string tag(std::initializer_list<int> xs) {
    std::string s = "(";
    bool first = true;
    for (int x : xs) {
        if (!first) s += ",";
        s += std::to_string(x);
        first = false;
    }
    return s + ")";
}

std::string perm_tag(const Perm& p) {
    std::string s = "[";
    for (int x : p) s += std::to_string(x);
    return s + "]";
}

std::vector<Perm> all_perms(int n) {
    std::vector<Perm> out;
    Perm w = identity_perm(n);
    do out.push_back(w);
    while (std::next_permutation(w.begin(), w.end()));
    return out;
}

// Symmetry a (x) b -> b (x) a as a matrix.
Matrix swap_matrix(const Field& F, const CxPtr& a, const CxPtr& b) {
    return permute_factors(F, {a, b}, {1, 0});
}

Matrix pairing_signs(const Field& F, const ChainComplex& a, const ChainComplex& b) {
    int da = a.dim(), db = b.dim();
    Matrix m(da * db, da * db);
    for (int i = 0; i < da; ++i)
        for (int j = 0; j < db; ++j) m.add(i * db + j, i * db + j, sign_scalar((a.degree(i) * b.degree(j)) & 1));
    m.normalize(F);
    return m;
}

} // namespace

std::vector<std::string> check_operad_axioms(const Operad& p, int N) {
    const Field& F = p.field();
    if (N < 0 || N > p.max_arity()) N = p.max_arity();
    std::vector<std::string> bad = p.seq.check();
    auto dim = [&](int n) { return p.term(n)->dim(); };
    auto I = [&](int n) { return Matrix::identity(dim(n)); };
    auto has = [&](int m, int n, int i) { return p.circ.count({m, n, i}) > 0; };

    for (int m = 1; m <= N; ++m)
        for (int n = 1; m + n - 1 <= N; ++n)
            for (int i = 1; i <= m; ++i) {
                if (!has(m, n, i)) {
                    bad.push_back("missing" + tag({m, n, i}));
                    continue;
                }
                const Matrix& c = p.circ_at(m, n, i);
                if (c.rows() != dim(m + n - 1) || c.cols() != dim(m) * dim(n)) {
                    bad.push_back("shape" + tag({m, n, i}));
                    continue;
                }
                auto src = share(tensor(*p.term(m), *p.term(n)));
                if (!check_map(ChainMap{src, p.term(m + n - 1), 0, c}).empty()) bad.push_back("chain" + tag({m, n, i}));
                if (m == 1 && !equal(F, c, I(n))) bad.push_back("unit-left" + tag({m, n, i}));
                if (n == 1 && !equal(F, c, I(m))) bad.push_back("unit-right" + tag({m, n, i}));
            }
    if (!bad.empty()) return bad;

    for (int m = 2; m <= N; ++m)
        for (int n = 2; m + n - 1 <= N; ++n)
            for (int l = 2; m + n + l - 2 <= N; ++l) {
                for (int i = 1; i <= m; ++i)
                    for (int j = 1; j <= n; ++j) {
                        Matrix lhs = mul(F, p.circ_at(m + n - 1, l, i + j - 1), kron(F, p.circ_at(m, n, i), I(l)));
                        Matrix rhs = mul(F, p.circ_at(m, n + l - 1, i), kron(F, I(m), p.circ_at(n, l, j)));
                        if (!equal(F, lhs, rhs)) bad.push_back("assoc-seq" + tag({m, n, l, i, j}));
                    }
                for (int i = 1; i <= m; ++i)
                    for (int k = i + 1; k <= m; ++k) {
                        Matrix lhs = mul(F, p.circ_at(m + n - 1, l, k + n - 1), kron(F, p.circ_at(m, n, i), I(l)));
                        Matrix rhs = mul(F, p.circ_at(m + l - 1, n, i), kron(F, p.circ_at(m, l, k), I(n)));
                        rhs = mul(F, rhs, kron(F, I(m), swap_matrix(F, p.term(n), p.term(l))));
                        if (!equal(F, lhs, rhs)) bad.push_back("assoc-par" + tag({m, n, l, i, k}));
                    }
            }

    for (int m = 2; m <= N; ++m)
        for (int n = 2; m + n - 1 <= N; ++n)
            for (int i = 1; i <= m; ++i) {
                const Matrix& c = p.circ_at(m, n, i);
                for (const Perm& s : all_perms(m)) {
                    Matrix lhs = mul(F, p.circ_at(m, n, s[i - 1]), kron(F, p.seq.act(m, s), I(n)));
                    Matrix rhs = mul(F, p.seq.act(m + n - 1, block_expand(s, i, n)), c);
                    if (!equal(F, lhs, rhs)) bad.push_back("equiv-outer" + tag({m, n, i}) + perm_tag(s));
                }
                for (const Perm& r : all_perms(n)) {
                    Matrix lhs = mul(F, c, kron(F, I(m), p.seq.act(n, r)));
                    Matrix rhs = mul(F, p.seq.act(m + n - 1, block_insert(m, i, r)), c);
                    if (!equal(F, lhs, rhs)) bad.push_back("equiv-inner" + tag({m, n, i}) + perm_tag(r));
                }
            }
    return bad;
}

std::vector<std::string> check_cooperad_axioms(const Cooperad& q, int N) {
    for (int m = 1; m <= q.max_arity(); ++m)
        for (int n = 1; m + n - 1 <= q.max_arity(); ++n)
            for (int i = 1; i <= m; ++i)
                if (!q.cocirc.count({m, n, i})) return {"missing" + tag({m, n, i})};
    return check_operad_axioms(*dualize(q), N);
}

bool is_symseq_map(const SymSeq& a, const SymSeq& b, const std::vector<Matrix>& f, std::string* witness) {
    const Field& F = a.field();
    auto fail = [&](const std::string& w) {
        if (witness) *witness = w;
        return false;
    };
    int N = std::min(a.max_arity(), b.max_arity());
    if (static_cast<int>(f.size()) <= N) return fail("missing arities");
    for (int n = 1; n <= N; ++n) {
        const Matrix& fn = f[n];
        if (fn.rows() != b.term(n)->dim() || fn.cols() != a.term(n)->dim()) return fail("shape" + tag({n}));
        if (!check_map(ChainMap{a.term(n), b.term(n), 0, fn}).empty()) return fail("chain" + tag({n}));
        for (int k = 1; k < n; ++k)
            if (!equal(F, mul(F, fn, a.s(n, k)), mul(F, b.s(n, k), fn))) return fail("equivariance" + tag({n, k}));
    }
    return true;
}

bool is_operad_map(const Operad& p, const Operad& q, const std::vector<Matrix>& f, std::string* witness) {
    if (!is_symseq_map(p.seq, q.seq, f, witness)) return false;
    const Field& F = p.field();
    int N = std::min(p.max_arity(), q.max_arity());
    if (!equal(F, f[1], Matrix::identity(1))) {
        if (witness) *witness = "unit";
        return false;
    }
    for (int m = 1; m <= N; ++m)
        for (int n = 1; m + n - 1 <= N; ++n)
            for (int i = 1; i <= m; ++i) {
                Matrix lhs = mul(F, f[m + n - 1], p.circ_at(m, n, i));
                Matrix rhs = mul(F, q.circ_at(m, n, i), kron(F, f[m], f[n]));
                if (!equal(F, lhs, rhs)) {
                    if (witness) *witness = "composition" + tag({m, n, i});
                    return false;
                }
            }
    return true;
}

bool is_cooperad_map(const Cooperad& p, const Cooperad& q, const std::vector<Matrix>& f, std::string* witness) {
    if (!is_symseq_map(p.seq, q.seq, f, witness)) return false;
    const Field& F = p.field();
    int N = std::min(p.max_arity(), q.max_arity());
    if (!equal(F, f[1], Matrix::identity(1))) {
        if (witness) *witness = "unit";
        return false;
    }
    for (int m = 1; m <= N; ++m)
        for (int n = 1; m + n - 1 <= N; ++n)
            for (int i = 1; i <= m; ++i) {
                Matrix lhs = mul(F, q.cocirc_at(m, n, i), f[m + n - 1]);
                Matrix rhs = mul(F, kron(F, f[m], f[n]), p.cocirc_at(m, n, i));
                if (!equal(F, lhs, rhs)) {
                    if (witness) *witness = "decomposition" + tag({m, n, i});
                    return false;
                }
            }
    return true;
}

CooperadPtr dualize(const Operad& p) {
    const Field& F = p.field();
    auto q = std::make_shared<Cooperad>();
    q->name = "dual(" + p.name + ")";
    q->seq = dual_symseq(p.seq);
    for (const auto& [key, c] : p.circ) {
        auto [m, n, i] = key;
        q->cocirc[key] = mul(F, pairing_signs(F, *p.term(m), *p.term(n)), transpose(c));
    }
    return q;
}

OperadPtr dualize(const Cooperad& q) {
    const Field& F = q.field();
    auto p = std::make_shared<Operad>();
    p->name = "dual(" + q.name + ")";
    p->seq = dual_symseq(q.seq);
    for (const auto& [key, c] : q.cocirc) {
        auto [m, n, i] = key;
        p->circ[key] = mul(F, transpose(c), pairing_signs(F, *q.term(m), *q.term(n)));
    }
    return p;
}

std::vector<Matrix> double_dual_maps(const SymSeq& a) {
    std::vector<Matrix> out(a.max_arity() + 1);
    for (int n = 1; n <= a.max_arity(); ++n) {
        const auto& c = a.term(n);
        Matrix m(c->dim(), c->dim());
        for (int j = 0; j < c->dim(); ++j) m.add(j, j, sign_scalar(c->degree(j) & 1));
        m.normalize(a.field());
        out[n] = m;
    }
    return out;
}

} // namespace opdual
