#include "opdual/barcobar.hpp"

#include <algorithm>

namespace opdual {

std::vector<std::pair<int, int>> relations(const std::vector<Tree>& objects, bool all) {
    std::vector<std::pair<int, int>> out;
    int k = static_cast<int>(objects.size());
    for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b) {
            if (a == b || !leq(objects[a], objects[b])) continue;
            if (all || objects[b].vertices() == objects[a].vertices() + 1) out.emplace_back(a, b);
        }
    return out;
}

void check_diagram(const Field& F, const Diagram& d) {
    const auto& ob = d.objects;
    int k = static_cast<int>(ob.size());
    for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b) {
            if (a == b || !leq(ob[a], ob[b])) continue;
            for (int c = 0; c < k; ++c) {
                if (c == b || c == a || !leq(ob[b], ob[c])) continue;
                Matrix direct = d.map(ob[a], ob[c]);
                Matrix via = d.covariant ? mul(F, d.map(ob[b], ob[c]), d.map(ob[a], ob[b]))
                                         : mul(F, d.map(ob[a], ob[b]), d.map(ob[b], ob[c]));
                if (!equal(F, direct, via))
                    throw OperadError("diagram not functorial at " + to_string(ob[a]) + " < " + to_string(ob[b]) +
                                      " < " + to_string(ob[c]));
            }
        }
}

namespace {

EngineSum tensor_sum(const Diagram& w, const Diagram& c) {
    std::vector<ChainComplex> parts;
    for (const Tree& t : w.objects) parts.push_back(tensor(*w.at(t), *c.at(t)));
    return {share(direct_sum(parts)), sum_offsets(parts)};
}

EngineSum hom_sum(const Diagram& w, const Diagram& q) {
    std::vector<ChainComplex> parts;
    for (const Tree& t : w.objects) parts.push_back(hom(*w.at(t), *q.at(t)));
    return {share(direct_sum(parts)), sum_offsets(parts)};
}

std::vector<SparseVec> coend_relations(const Field& F, const Diagram& w, const Diagram& c, const EngineSum& sum,
                                       bool all) {
    std::vector<SparseVec> out;
    const auto& ob = w.objects;
    for (auto [s, b] : relations(ob, all)) {
        Matrix wf = w.map(ob[s], ob[b]);
        Matrix cf = c.map(ob[s], ob[b]);
        int dws = w.at(ob[s])->dim();
        int dcs = c.at(ob[s])->dim(), dcb = c.at(ob[b])->dim();
        for (int x = 0; x < dws; ++x)
            for (int y = 0; y < dcb; ++y) {
                SparseVec v;
                for (const auto& [i, a] : wf.col(x)) v[sum.offsets[b] + i * dcb + y] += a;
                for (const auto& [j, a] : cf.col(y)) v[sum.offsets[s] + x * dcs + j] -= a;
                SparseVec clean;
                for (auto& [i, a] : v) {
                    Scalar r = F.reduce(a);
                    if (r != 0) clean[i] = r;
                }
                if (!clean.empty()) out.push_back(std::move(clean));
            }
    }
    return out;
}

ChainMap end_difference(const Field& F, const Diagram& w, const Diagram& q, const EngineSum& sum, bool all) {
    const auto& ob = w.objects;
    auto rels = relations(ob, all);
    std::vector<ChainComplex> parts;
    for (auto [s, b] : rels) parts.push_back(hom(*w.at(ob[s]), *q.at(ob[b])));
    auto tgt = share(direct_sum(parts));
    auto offs = sum_offsets(parts);
    Matrix m(tgt->dim(), sum.total->dim());
    for (size_t r = 0; r < rels.size(); ++r) {
        auto [s, b] = rels[r];
        Matrix wf = w.map(ob[s], ob[b]);
        Matrix qf = q.map(ob[s], ob[b]);
        int dws = w.at(ob[s])->dim(), dwb = w.at(ob[b])->dim();
        int dqs = q.at(ob[s])->dim(), dqb = q.at(ob[b])->dim();
        // phi_s |-> Q(f) phi_s
        for (int i = 0; i < dqs; ++i)
            for (int j = 0; j < dws; ++j)
                for (const auto& [k, a] : qf.col(i)) m.add(offs[r] + k * dws + j, sum.offsets[s] + i * dws + j, a);
        // phi_b |-> -phi_b W(f)
        for (int i = 0; i < dqb; ++i)
            for (int l = 0; l < dws; ++l)
                for (const auto& [j, a] : wf.col(l)) m.add(offs[r] + i * dws + l, sum.offsets[b] + i * dwb + j, -a);
    }
    m.normalize(F);
    return make_map(sum.total, tgt, std::move(m));
}

} // namespace

CoendResult coend(const Field& F, const Diagram& weights, const Diagram& coeffs, bool all_relations) {
    EngineSum sum = tensor_sum(weights, coeffs);
    auto rels = coend_relations(F, weights, coeffs, sum, all_relations);
    return {sum, quotient(sum.total, rels)};
}

EndResult end(const Field& F, const Diagram& weights, const Diagram& coeffs, bool all_relations) {
    EngineSum sum = hom_sum(weights, coeffs);
    return {sum, kernel(end_difference(F, weights, coeffs, sum, all_relations))};
}

Diagram CubeDiagram::diagram() const {
    auto cube_of = cube;
    return Diagram{objects, [cube_of](const Tree& t) { return cube_of(t)->cx(); },
                   [cube_of](const Tree& s, const Tree& b) { return key_map(cube_of(s), cube_of(b), false).m; }, true};
}

Face reduce_cell(const CubeDiagram& cd, const Tree& t, const Cell& c) {
    auto cube = cd.cube(t);
    std::vector<Mask> keep;
    bool degenerate = false;
    for (int k = 0; k < cube->coords(); ++k)
        if (c[k] == kZero) degenerate = true;
    if (!degenerate) return {t, c, Scalar(1)};
    std::vector<Mask> zero;
    for (int k = 0; k < cube->coords(); ++k)
        if (c[k] == kZero) zero.push_back(cube->keys()[k]);
    for (Mask m : t.clusters())
        if (std::find(zero.begin(), zero.end(), m) == zero.end()) keep.push_back(m);
    Tree s = Tree::from_clusters(t.arity(), keep);
    auto small = cd.cube(s);
    Cell sc(small->coords());
    for (int k = 0; k < small->coords(); ++k) {
        auto it = std::find(cube->keys().begin(), cube->keys().end(), small->keys()[k]);
        sc[k] = c[it - cube->keys().begin()];
    }
    int from = small->index(sc), to = cube->index(c);
    if (from < 0 || to < 0) throw OperadError("reduce_cell: face not in the cube of " + to_string(s));
    Scalar e = key_map(small, cube, false).m.at(to, from);
    if (e == 0) throw OperadError("reduce_cell: face inclusion misses the cell");
    return {s, sc, e};
}

int CellSum::find(const Tree& t, const Cell& c) const {
    auto it = where.find({to_string(t), c});
    return it == where.end() ? -1 : it->second;
}

const CellSum::Part& CellSum::part_of(int basis_index) const {
    auto it = std::upper_bound(parts.begin(), parts.end(), basis_index,
                               [](int x, const Part& p) { return x < p.offset; });
    while ((it - 1)->coeff->dim() == 0) --it;
    return *(it - 1);
}

namespace {

int star_count(const Cell& c) {
    return static_cast<int>(std::count(c.begin(), c.end(), kStar));
}

bool nondegenerate(const Cell& c) { return std::find(c.begin(), c.end(), kZero) == c.end(); }

CellSum cell_parts(const CubeDiagram& cd, const Diagram& coeffs) {
    CellSum cs;
    int off = 0;
    for (const Tree& t : cd.objects) {
        auto cube = cd.cube(t);
        auto c = coeffs.at(t);
        for (int i = 0; i < cube->dim(); ++i) {
            const Cell& x = cube->cell(i);
            if (!nondegenerate(x)) continue;
            cs.where[{to_string(t), x}] = static_cast<int>(cs.parts.size());
            cs.parts.push_back({t, x, star_count(x), off, c});
            off += c->dim();
        }
    }
    return cs;
}

int total_dim(const CellSum& cs) {
    return cs.parts.empty() ? 0 : cs.parts.back().offset + cs.parts.back().coeff->dim();
}

} // namespace

CellSum closed_coend(const Field& F, const CubeDiagram& cd, const Diagram& coeffs) {
    CellSum cs = cell_parts(cd, coeffs);
    int n = total_dim(cs);
    std::vector<int> deg(n);
    Matrix d(n, n);
    for (const auto& p : cs.parts) {
        auto cube = cd.cube(p.tree);
        const Matrix& dc = cube->cx()->d();
        const SparseVec& faces = dc.col(cube->index(p.cell));
        const auto& cx = *p.coeff;
        for (int j = 0; j < cx.dim(); ++j) {
            deg[p.offset + j] = p.cell_degree + cx.degree(j);
            for (const auto& [i, a] : cx.d().col(j)) d.add(p.offset + i, p.offset + j, sign_scalar(p.cell_degree & 1) * a);
        }
        for (const auto& [f, a] : faces) {
            Face fc = reduce_cell(cd, p.tree, cube->cell(f));
            const auto& q = cs.parts[cs.find(fc.tree, fc.cell)];
            if (fc.tree == p.tree) {
                for (int j = 0; j < cx.dim(); ++j) d.add(q.offset + j, p.offset + j, a * fc.sign);
            } else {
                Matrix c = coeffs.map(fc.tree, p.tree);
                for (int j = 0; j < cx.dim(); ++j)
                    for (const auto& [i, b] : c.col(j)) d.add(q.offset + i, p.offset + j, a * fc.sign * b);
            }
        }
    }
    d.normalize(F);
    cs.cx = share(ChainComplex(F, std::move(deg), std::move(d)));
    return cs;
}

CellSum closed_end(const Field& F, const CubeDiagram& cd, const Diagram& coeffs) {
    CellSum cs = cell_parts(cd, coeffs);
    int n = total_dim(cs);
    std::vector<int> deg(n);
    Matrix d(n, n);
    for (const auto& p : cs.parts) {
        const auto& cx = *p.coeff;
        for (int j = 0; j < cx.dim(); ++j) {
            deg[p.offset + j] = cx.degree(j) - p.cell_degree;
            for (const auto& [i, a] : cx.d().col(j)) d.add(p.offset + i, p.offset + j, a);
        }
    }
    // -(-1)^{|phi|} phi o d, read off target cell by target cell.
    for (const auto& p : cs.parts) {
        auto cube = cd.cube(p.tree);
        const Matrix& dc = cube->cx()->d();
        const SparseVec& faces = dc.col(cube->index(p.cell));
        for (const auto& [f, a] : faces) {
            Face fc = reduce_cell(cd, p.tree, cube->cell(f));
            const auto& q = cs.parts[cs.find(fc.tree, fc.cell)];
            const auto& qx = *q.coeff;
            Matrix e = fc.tree == p.tree ? Matrix::identity(qx.dim()) : coeffs.map(fc.tree, p.tree);
            for (int j = 0; j < qx.dim(); ++j) {
                Scalar s = -sign_scalar((qx.degree(j) - q.cell_degree) & 1) * a * fc.sign;
                for (const auto& [i, b] : e.col(j)) d.add(p.offset + i, q.offset + j, s * b);
            }
        }
    }
    d.normalize(F);
    cs.cx = share(ChainComplex(F, std::move(deg), std::move(d)));
    return cs;
}

Matrix coend_reduction(const Field& F, const CubeDiagram& cd, const Diagram& coeffs, const CellSum& closed,
                       const EngineSum& sum) {
    Matrix r(closed.cx->dim(), sum.total->dim());
    for (size_t k = 0; k < cd.objects.size(); ++k) {
        const Tree& t = cd.objects[k];
        auto cube = cd.cube(t);
        int dc = coeffs.at(t)->dim();
        for (int x = 0; x < cube->dim(); ++x) {
            Face fc = reduce_cell(cd, t, cube->cell(x));
            const auto& q = closed.parts[closed.find(fc.tree, fc.cell)];
            Matrix e = fc.tree == t ? Matrix::identity(dc) : coeffs.map(fc.tree, t);
            for (int j = 0; j < dc; ++j)
                for (const auto& [i, b] : e.col(j)) r.add(q.offset + i, sum.offsets[k] + x * dc + j, fc.sign * b);
        }
    }
    r.normalize(F);
    return r;
}

Matrix end_embedding(const Field& F, const CubeDiagram& cd, const Diagram& coeffs, const CellSum& closed,
                     const EngineSum& sum) {
    Matrix e(sum.total->dim(), closed.cx->dim());
    for (size_t k = 0; k < cd.objects.size(); ++k) {
        const Tree& t = cd.objects[k];
        auto cube = cd.cube(t);
        int dw = cube->dim();
        for (int x = 0; x < dw; ++x) {
            Face fc = reduce_cell(cd, t, cube->cell(x));
            const auto& q = closed.parts[closed.find(fc.tree, fc.cell)];
            int dq = q.coeff->dim();
            Matrix ex = fc.tree == t ? Matrix::identity(dq) : coeffs.map(fc.tree, t);
            for (int j = 0; j < dq; ++j)
                for (const auto& [i, b] : ex.col(j)) e.add(sum.offsets[k] + i * dw + x, q.offset + j, fc.sign * b);
        }
    }
    e.normalize(F);
    return e;
}

EngineComparison compare_coend(const Field& F, const CubeDiagram& cd, const Diagram& coeffs, bool all_relations) {
    CellSum cs = closed_coend(F, cd, coeffs);
    CoendResult eng = coend(F, cd.diagram(), coeffs, all_relations);
    Matrix r = coend_reduction(F, cd, coeffs, cs, eng.sum);
    EngineComparison out;
    if (!equal(F, mul(F, r, eng.sum.total->d()), mul(F, cs.cx->d(), r))) {
        out.ok = false;
        out.detail = "reduction is not a chain map";
    } else if (!equal(F, r, mul(F, mul(F, r, eng.q.section), eng.q.proj))) {
        out.ok = false;
        out.detail = "reduction does not kill the relations";
    } else if (eng.q.cx->dim() != cs.cx->dim() || rank(F, mul(F, r, eng.q.section)) != cs.cx->dim()) {
        out.ok = false;
        out.detail = "dimension " + std::to_string(cs.cx->dim()) + " vs engine " + std::to_string(eng.q.cx->dim());
    }
    return out;
}

EngineComparison compare_end(const Field& F, const CubeDiagram& cd, const Diagram& coeffs, bool all_relations) {
    CellSum cs = closed_end(F, cd, coeffs);
    EndResult eng = end(F, cd.diagram(), coeffs, all_relations);
    Matrix e = end_embedding(F, cd, coeffs, cs, eng.sum);
    EngineComparison out;
    int k = eng.k.cx->dim();
    Matrix both(eng.sum.total->dim(), k + e.cols());
    for (int j = 0; j < k; ++j) both.col(j) = eng.k.incl.col(j);
    for (int j = 0; j < e.cols(); ++j) both.col(k + j) = e.col(j);
    if (!equal(F, mul(F, eng.sum.total->d(), e), mul(F, e, cs.cx->d()))) {
        out.ok = false;
        out.detail = "embedding is not a chain map";
    } else if (k != cs.cx->dim() || rank(F, e) != k || rank(F, both) != k) {
        out.ok = false;
        out.detail = "dimension " + std::to_string(cs.cx->dim()) + " vs engine " + std::to_string(k);
    }
    return out;
}

EngineComparison compare_relation_sets(const Field& F, const Diagram& weights, const Diagram& coeffs, bool is_end) {
    EngineComparison out;
    if (is_end) {
        EndResult a = end(F, weights, coeffs, false), b = end(F, weights, coeffs, true);
        int ka = a.k.cx->dim(), kb = b.k.cx->dim();
        Matrix both(a.sum.total->dim(), ka + kb);
        for (int j = 0; j < ka; ++j) both.col(j) = a.k.incl.col(j);
        for (int j = 0; j < kb; ++j) both.col(ka + j) = b.k.incl.col(j);
        if (ka != kb || rank(F, both) != ka) {
            out.ok = false;
            out.detail = "cover end " + std::to_string(ka) + " vs all-relation end " + std::to_string(kb);
        }
        return out;
    }
    EngineSum sum = tensor_sum(weights, coeffs);
    auto ra = coend_relations(F, weights, coeffs, sum, false);
    auto rb = coend_relations(F, weights, coeffs, sum, true);
    Echelon ea(F, false), eb(F, false);
    for (auto& v : ra) ea.insert(v, 0);
    for (auto& v : rb) eb.insert(v, 0);
    int r1 = ea.rank(), r2 = eb.rank();
    for (auto& v : rb) ea.insert(v, 0);
    if (r1 != r2 || ea.rank() != r1) {
        out.ok = false;
        out.detail = "cover relations rank " + std::to_string(r1) + " vs all " + std::to_string(r2);
    }
    return out;
}

ChainMap cube_relabel(const CubePtr& src, const CubePtr& tgt, const Perm& sigma) {
    std::map<Mask, int> where;
    for (int s = 0; s < src->coords(); ++s) where[apply_perm(sigma, src->keys()[s])] = s;
    std::vector<CoordRule> rules;
    for (Mask d : tgt->keys()) {
        auto it = where.find(d);
        if (it == where.end()) throw ChainError("cube_relabel: keys do not correspond");
        rules.push_back({CoordRule::Proj, it->second});
    }
    return cell_map(src, tgt, rules, false);
}

std::optional<Degraft> degraft(const Tree& g, int i, int n) {
    int total = g.arity();
    int m = total - n + 1;
    if (n == 1) return Degraft{g, Tree()};
    if (m == 1) return Degraft{Tree(), g};
    Mask b = graft_block(i, n);
    if (!g.has_cluster(b)) return std::nullopt;
    std::vector<Mask> tc, uc;
    for (Mask c : g.clusters()) {
        if ((c & b) == c) {
            uc.push_back(c >> (i - 1));
            continue;
        }
        Mask out = c & full_mask(i - 1);
        if (c & b) out |= leaf_bit(i);
        out |= (c & ~full_mask(i + n - 1)) >> (n - 1);
        tc.push_back(out);
    }
    return Degraft{Tree::from_clusters(m, tc), Tree::from_clusters(n, uc)};
}

namespace {

struct Built {
    Tree tree;
    Matrix map;
};

Built multiply_sub(const PreCooperad& q, const std::vector<Tree>& frags, const Tree& v, int w) {
    const Field& F = q.field();
    Tree cur = frags[w];
    Matrix mat = Matrix::identity(q.at(cur)->dim());
    int pos = 1;
    std::vector<int> blocks;
    for (const auto& c : v.children(w)) {
        if (c.leaf) {
            blocks.push_back(c.id);
            ++pos;
            continue;
        }
        Built sub = multiply_sub(q, frags, v, c.id);
        mat = mul(F, q.m(cur, pos, sub.tree), kron(F, mat, sub.map));
        cur = graft(cur, pos, sub.tree);
        int sz = popcount(c.mask);
        for (int l = 1; l <= 32; ++l)
            if (c.mask & leaf_bit(l)) blocks.push_back(l);
        pos += sz;
    }
    std::vector<int> sorted = blocks;
    std::sort(sorted.begin(), sorted.end());
    Perm sigma;
    for (int l : blocks)
        sigma.push_back(static_cast<int>(std::lower_bound(sorted.begin(), sorted.end(), l) - sorted.begin()) + 1);
    if (sigma == identity_perm(static_cast<int>(sigma.size()))) return {cur, mat};
    return {relabel(cur, sigma), mul(F, q.relabel_map(cur, sigma), mat)};
}

} // namespace

Matrix multiply_along(const PreCooperad& q, const Tree& u, const Tree& v) {
    auto frs = fragments(u, v);
    if (!frs) throw OperadError("multiply_along: " + to_string(v) + " is not below " + to_string(u));
    if (v.vertices() == 0) return Matrix::identity(q.at(u)->dim());
    Built b = multiply_sub(q, *frs, v, 0);
    if (b.tree != u) throw OperadError("multiply_along: rebuilt " + to_string(b.tree) + " for " + to_string(u));
    return b.map;
}

} // namespace opdual
