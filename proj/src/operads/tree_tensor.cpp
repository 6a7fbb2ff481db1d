#include "opdual/operads.hpp"

#include <algorithm>

namespace opdual {

std::vector<int> decode_index(const std::vector<int>& dims, int idx) {
    std::vector<int> digits(dims.size());
    for (int k = static_cast<int>(dims.size()) - 1; k >= 0; --k) {
        digits[k] = idx % dims[k];
        idx /= dims[k];
    }
    return digits;
}

int encode_index(const std::vector<int>& dims, const std::vector<int>& digits) {
    int idx = 0;
    for (size_t k = 0; k < dims.size(); ++k) idx = idx * dims[k] + digits[k];
    return idx;
}

Matrix kron_all(const Field& F, const std::vector<Matrix>& ms) {
    Matrix r = Matrix::identity(1);
    for (const Matrix& m : ms) r = kron(F, r, m);
    return r;
}

std::vector<CxPtr> tree_factors(const SymSeq& a, const Tree& t) {
    std::vector<CxPtr> out;
    for (int v = 0; v < t.vertices(); ++v) out.push_back(a.term(t.valence(v)));
    return out;
}

CxPtr tree_tensor(const SymSeq& a, const Tree& t) {
    std::string key = to_string(t);
    {
        std::lock_guard<std::mutex> lock(a.cache_->mu);
        auto it = a.cache_->tensors.find(key);
        if (it != a.cache_->tensors.end()) return it->second;
    }
    auto fs = tree_factors(a, t);
    std::vector<const ChainComplex*> parts;
    for (const auto& f : fs) parts.push_back(f.get());
    CxPtr c = share(tensor_all(a.field(), parts));
    std::lock_guard<std::mutex> lock(a.cache_->mu);
    a.cache_->tensors.emplace(key, c);
    return c;
}

Matrix permute_factors(const Field& F, const std::vector<CxPtr>& factors, const std::vector<int>& order) {
    int k = static_cast<int>(factors.size());
    std::vector<int> dims(k), ndims(k);
    int total = 1;
    for (int j = 0; j < k; ++j) {
        dims[j] = factors[j]->dim();
        total *= dims[j];
    }
    for (int j = 0; j < k; ++j) ndims[j] = dims[order[j]];
    Matrix m(total, total);
    std::vector<int> nd(k);
    for (int idx = 0; idx < total; ++idx) {
        auto dg = decode_index(dims, idx);
        int parity = 0;
        for (int a = 0; a < k; ++a)
            for (int b = a + 1; b < k; ++b)
                if (order[a] > order[b])
                    parity += factors[order[a]]->degree(dg[order[a]]) * factors[order[b]]->degree(dg[order[b]]);
        for (int j = 0; j < k; ++j) nd[j] = dg[order[j]];
        m.add(encode_index(ndims, nd), idx, sign_scalar(parity & 1));
    }
    m.normalize(F);
    return m;
}

Matrix transport_map(const SymSeq& a, const Tree& t, const Perm& sigma) {
    Transport tr = transport(t, sigma);
    std::vector<Matrix> acts;
    for (int v = 0; v < t.vertices(); ++v) acts.push_back(a.act(t.valence(v), tr.inputs[v]));
    std::vector<int> order(t.vertices());
    for (int v = 0; v < t.vertices(); ++v) order[tr.vertex[v]] = v;
    return mul(a.field(), permute_factors(a.field(), tree_factors(a, t), order), kron_all(a.field(), acts));
}

std::vector<int> graft_vertex_order(const Tree& t, int i, const Tree& u) {
    Tree g = graft(t, i, u);
    int n = u.arity();
    auto lift_t = [&](Mask c) {
        Mask out = 0;
        for (int l = 1; l <= t.arity(); ++l) {
            if (!(c & leaf_bit(l))) continue;
            if (l < i) out |= leaf_bit(l);
            else if (l == i) out |= graft_block(i, n);
            else out |= leaf_bit(l + n - 1);
        }
        return out;
    };
    std::vector<int> order(g.vertices(), -1);
    for (int v = 0; v < t.vertices(); ++v) order[g.find(lift_t(t.cluster(v)))] = v;
    for (int v = 0; v < u.vertices(); ++v) order[g.find(u.cluster(v) << (i - 1))] = t.vertices() + v;
    return order;
}

Matrix graft_tensor_map(const SymSeq& a, const Tree& t, int i, const Tree& u) {
    auto order = graft_vertex_order(t, i, u);
    auto fs = tree_factors(a, t);
    for (const auto& f : tree_factors(a, u)) fs.push_back(f);
    return permute_factors(a.field(), fs, order);
}

namespace {

// Block order of a vertex's inputs versus the sorted leaves of its cluster.
Perm shuffle_of(const Tree& t, int v) {
    std::vector<int> blocks;
    for (const auto& c : t.children(v))
        for (int l = 1; l <= 32; ++l)
            if (c.mask & leaf_bit(l)) blocks.push_back(l);
    std::vector<int> sorted = blocks;
    std::sort(sorted.begin(), sorted.end());
    Perm sigma;
    for (int l : blocks) sigma.push_back(static_cast<int>(std::lower_bound(sorted.begin(), sorted.end(), l) - sorted.begin()) + 1);
    return sigma;
}

struct Step {
    int ar, size, pos, child;
};

std::vector<Step> steps_of(const Tree& t, int v) {
    std::vector<Step> out;
    int ar = t.valence(v), pos = 1;
    for (const auto& c : t.children(v)) {
        if (c.leaf) {
            ++pos;
            continue;
        }
        int sz = popcount(c.mask);
        out.push_back({ar, sz, pos, c.id});
        ar += sz - 1;
        pos += sz;
    }
    return out;
}

// Composition of the subtree at v, from its vertices in preorder.
Matrix compose_sub(const Operad& p, const Tree& t, int v) {
    const Field& F = p.field();
    Matrix cur = Matrix::identity(p.term(t.valence(v))->dim());
    for (const Step& s : steps_of(t, v))
        cur = mul(F, p.circ_at(s.ar, s.size, s.pos), kron(F, cur, compose_sub(p, t, s.child)));
    return mul(F, p.seq.act(popcount(t.cluster(v)), shuffle_of(t, v)), cur);
}

Matrix decompose_sub(const Cooperad& q, const Tree& t, int v) {
    const Field& F = q.field();
    Matrix acc = Matrix::identity(q.term(t.valence(v))->dim());
    for (const Step& s : steps_of(t, v))
        acc = mul(F, kron(F, acc, decompose_sub(q, t, s.child)), q.cocirc_at(s.ar, s.size, s.pos));
    return mul(F, acc, q.seq.act(popcount(t.cluster(v)), inverse_perm(shuffle_of(t, v))));
}

std::shared_ptr<const Matrix> memo_get(TreeMemo& memo, const std::string& key) {
    std::lock_guard<std::mutex> lock(memo.mu);
    auto it = memo.maps.find(key);
    return it == memo.maps.end() ? nullptr : it->second;
}

const Matrix& memo_put(TreeMemo& memo, const std::string& key, Matrix m) {
    std::lock_guard<std::mutex> lock(memo.mu);
    auto [it, _] = memo.maps.emplace(key, std::make_shared<const Matrix>(std::move(m)));
    return *it->second;
}

} // namespace

const Matrix& compose_along_tree(const Operad& p, const Tree& t) {
    std::string key = to_string(t);
    if (auto hit = memo_get(p.memo, key)) return *hit;
    Matrix m = t.vertices() == 0 ? Matrix::identity(1) : compose_sub(p, t, 0);
    m.normalize(p.field());
    return memo_put(p.memo, key, std::move(m));
}

Matrix decompose_along_tree(const Cooperad& q, const Tree& t) {
    std::string key = to_string(t);
    if (auto hit = memo_get(q.memo, key)) return *hit;
    Matrix m = t.vertices() == 0 ? Matrix::identity(1) : decompose_sub(q, t, 0);
    m.normalize(q.field());
    return memo_put(q.memo, key, std::move(m));
}

namespace {

// Order of t's vertices grouped by the vertex of u they lie at.
std::vector<int> grouped_order(const Tree& t, const Tree& u) {
    std::vector<int> order;
    for (int w = 0; w < u.vertices(); ++w)
        for (Mask c : clusters_at(t, u, w)) order.push_back(t.find(c));
    return order;
}

} // namespace

Matrix contract_map(const Operad& p, const Tree& t, const Tree& u) {
    auto frs = fragments(t, u);
    if (!frs) throw OperadError("contract_map: " + to_string(u) + " is not below " + to_string(t));
    const Field& F = p.field();
    std::vector<Matrix> parts;
    for (const Tree& f : *frs) parts.push_back(compose_along_tree(p, f));
    Matrix perm = permute_factors(F, tree_factors(p.seq, t), grouped_order(t, u));
    return mul(F, kron_all(F, parts), perm);
}

Matrix expand_map(const Cooperad& q, const Tree& u, const Tree& t) {
    auto frs = fragments(t, u);
    if (!frs) throw OperadError("expand_map: " + to_string(u) + " is not below " + to_string(t));
    const Field& F = q.field();
    std::vector<Matrix> parts;
    for (const Tree& f : *frs) parts.push_back(decompose_along_tree(q, f));
    auto order = grouped_order(t, u);
    std::vector<CxPtr> grouped;
    auto fs = tree_factors(q.seq, t);
    for (int v : order) grouped.push_back(fs[v]);
    std::vector<int> back(order.size());
    for (size_t j = 0; j < order.size(); ++j) back[order[j]] = static_cast<int>(j);
    return mul(F, permute_factors(F, grouped, back), kron_all(F, parts));
}

} // namespace opdual
