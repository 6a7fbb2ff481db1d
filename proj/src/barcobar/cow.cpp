#include "internal.hpp"

namespace opdual {

using namespace detail;

namespace {

// Cell of rel_delta(u, t) read off by key from a cell of a cube with keys `from`.
Cell by_keys(const std::vector<Mask>& to, const std::vector<Mask>& from, const Cell& c) {
    Cell out;
    for (Mask k : to) {
        auto it = std::find(from.begin(), from.end(), k);
        out.push_back(c[it - from.begin()]);
    }
    return out;
}

} // namespace

CoW::CoW(PreCooperadPtr q) : q_(std::move(q)) {}

CubeDiagram CoW::cubes(const Tree& t) const {
    std::vector<Tree> objects;
    for (const Tree& u : enumerate_trees(t.arity()))
        if (leq(t, u)) objects.push_back(u);
    const Field F = field();
    return CubeDiagram{objects, [F, t](const Tree& u) { return rel_delta(F, u, t); }};
}

Diagram CoW::coeffs(const Tree& t) const {
    auto q = q_;
    return Diagram{cubes(t).objects, [q](const Tree& u) { return q->at(u); },
                   [q](const Tree& s, const Tree& b) { return q->expand_to(s, b); }, true};
}

const CellSum& CoW::sum(const Tree& t) const {
    std::string key = to_string(t);
    {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = cache_.find(key);
        if (it != cache_.end()) return *it->second;
    }
    auto cs = std::make_shared<CellSum>(closed_end(field(), cubes(t), coeffs(t)));
    std::lock_guard<std::mutex> lock(mu_);
    return *cache_.emplace(key, cs).first->second;
}

CxPtr CoW::at(const Tree& t) const { return sum(t).cx; }

Matrix CoW::cover_map(const Tree& t, const Tree& s) const {
    const Field& F = field();
    const CellSum &a = sum(t), &b = sum(s);
    Mask e = 0;
    for (Mask c : s.clusters())
        if (!t.has_cluster(c)) e = c;
    Matrix m(b.cx->dim(), a.cx->dim());
    for (const auto& p : a.parts) {
        if (p.coeff->dim() == 0 || !leq(s, p.tree)) continue;
        auto src = rel_delta(F, p.tree, t), tgt = rel_delta(F, p.tree, s);
        const auto& keys = src->keys();
        if (p.cell[std::find(keys.begin(), keys.end(), e) - keys.begin()] != kOne) continue;
        int k = b.find(p.tree, by_keys(tgt->keys(), keys, p.cell));
        add_block(m, b.parts[k].offset, p.offset, Matrix::identity(p.coeff->dim()));
    }
    m.normalize(F);
    return m;
}

Matrix CoW::relabel_map(const Tree& t, const Perm& sigma) const {
    const Field F = field();
    Tree st = relabel(t, sigma);
    auto q = q_;
    return relabel_sum(
        F, sum(t), sum(st), [&](const Tree& u) { return rel_delta(F, u, t); },
        [&](const Tree& u) { return rel_delta(F, u, st); }, sigma,
        [&](const Tree& u) { return q->relabel_map(u, sigma); });
}

Matrix CoW::m(const Tree& t, int i, const Tree& u) const {
    const Field& F = field();
    int n = u.arity();
    Tree g = graft(t, i, u);
    const CellSum &a = sum(t), &b = sum(u), &c = sum(g);
    int db = b.cx->dim();
    Matrix out(c.cx->dim(), a.cx->dim() * db);
    for (const auto& pa : a.parts) {
        if (pa.coeff->dim() == 0) continue;
        auto ca = rel_delta(F, pa.tree, t);
        for (const auto& pb : b.parts) {
            if (pb.coeff->dim() == 0) continue;
            auto cb = rel_delta(F, pb.tree, u);
            Tree v = graft(pa.tree, i, pb.tree);
            auto cg = rel_delta(F, v, g);
            auto prod = std::make_shared<const Cube>(F, std::vector<CubeFactor>{{ca->keys(), false}, {cb->keys(), false}});
            std::vector<CoordRule> rules;
            for (Mask key : cg->keys()) {
                int src = -1;
                for (int s = 0; s < ca->coords(); ++s)
                    if (lift_cluster(ca->keys()[s], i, n) == key) src = s;
                for (int s = 0; s < cb->coords(); ++s)
                    if ((cb->keys()[s] << (i - 1)) == key) src = ca->coords() + s;
                rules.push_back({CoordRule::Proj, src});
            }
            Cell cc = pa.cell;
            cc.insert(cc.end(), pb.cell.begin(), pb.cell.end());
            Matrix cm = cell_map(prod, cg, rules, false).m;
            Matrix qm = q_->m(pa.tree, i, pb.tree);
            int dq = pb.coeff->dim();
            for (const auto& [z, eps] : cm.col(prod->index(cc))) {
                const auto& pg = c.parts[c.find(v, cg->cell(z))];
                for (int x = 0; x < pa.coeff->dim(); ++x)
                    for (int y = 0; y < dq; ++y) {
                        int psi = pb.coeff->degree(y) - pb.cell_degree;
                        Scalar s = eps * sign_scalar((psi * pa.cell_degree) & 1);
                        for (const auto& [r, w] : qm.col(x * dq + y))
                            out.add(pg.offset + r, (pa.offset + x) * db + pb.offset + y, s * w);
                    }
            }
        }
    }
    out.normalize(F);
    return out;
}

PreMap cow_eta(const CoW& w, int N) {
    const Field& F = w.field();
    const PreCooperad& q = *w.base();
    PreMap out;
    for (int n = 1; n <= std::min(N, w.max_arity()); ++n)
        for (const Tree& t : enumerate_trees(n)) {
            const CellSum& cs = w.sum(t);
            Matrix m(cs.cx->dim(), q.at(t)->dim());
            for (const auto& p : cs.parts)
                if (p.coeff->dim() > 0 && stars(p.cell) == 0) add_block(m, p.offset, 0, q.expand_to(t, p.tree));
            m.normalize(F);
            out[to_string(t)] = std::move(m);
        }
    return out;
}

PreMap cow_zeta(const CoW& w, int N) {
    const PreCooperad& q = *w.base();
    PreMap out;
    for (int n = 1; n <= std::min(N, w.max_arity()); ++n)
        for (const Tree& t : enumerate_trees(n)) {
            const CellSum& cs = w.sum(t);
            Matrix m(q.at(t)->dim(), cs.cx->dim());
            int k = cs.find(t, Cell{});
            if (k >= 0) add_block(m, 0, cs.parts[k].offset, Matrix::identity(q.at(t)->dim()));
            out[to_string(t)] = std::move(m);
        }
    return out;
}

// ---- theta* ----------------------------------------------------------------

namespace {

// theta* on the corolla of arity n: B(CQ)(n) -> W^cQ(corolla).
Matrix corolla_theta_star(const ThetaStar& ts, int n) {
    const Field& F = ts.cow->field();
    const PreCooperad& q = *ts.cow->base();
    const CobarResult& cq = *ts.cobar;
    const Operad& op = *cq.op;
    const CellSum &bs = ts.bar->sums[n], &ws = ts.cow->sum(corolla_of(n));
    Matrix out(ws.cx->dim(), bs.cx->dim());
    for (const auto& bp : bs.parts) {
        if (bp.coeff->dim() == 0) continue;
        const Tree& v = bp.tree;
        std::vector<int> cdims;
        for (int x = 0; x < v.vertices(); ++x) cdims.push_back(op.term(v.valence(x))->dim());
        for (const auto& wp : ws.parts) {
            const Tree& u = wp.tree;
            if (wp.coeff->dim() == 0 || !leq(v, u)) continue;
            auto cells = theta_cells(F, u, v);
            auto src = delta_wbar(F, u, v);
            auto fam = wbar_family(F, u, v);
            auto frs = *fragments(u, v);
            Matrix mult = multiply_along(q, u, v);
            std::vector<int> qdims;
            for (const Tree& f : frs) qdims.push_back(q.at(f)->dim());
            Cell sc = by_keys(src->factors()[0].keys, rel_delta(F, u, corolla_of(n))->keys(), wp.cell);
            sc.insert(sc.end(), v.vertices(), kStar);
            const SparseVec& col = cells.m.col(src->index(sc));
            int cdeg = wp.cell_degree;
            for (int j = 0; j < bp.coeff->dim(); ++j) {
                auto dg = decode_index(cdims, j);
                std::vector<int> pd(v.vertices());
                int phi = 0;
                for (int x = 0; x < v.vertices(); ++x) {
                    pd[x] = op.term(v.valence(x))->degree(dg[x]);
                    phi += pd[x];
                }
                for (const auto& [z, kappa] : col) {
                    auto zs = split_cell(*fam, fam->cell(z));
                    int zdeg = 0, inter = 0;
                    for (int a = 0; a < v.vertices(); ++a) {
                        zdeg += stars(zs[a]);
                        for (int b = a + 1; b < v.vertices(); ++b) inter += pd[b] * stars(zs[a]);
                    }
                    int parity = cdeg * (v.vertices() + phi) + zdeg * phi + inter;
                    SparseVec acc{{0, Scalar(1)}};
                    for (int x = 0; x < v.vertices() && !acc.empty(); ++x) {
                        SparseVec val = cq.evaluate({{dg[x], Scalar(1)}}, frs[x], zs[x]);
                        SparseVec next;
                        for (const auto& [i1, a1] : acc)
                            for (const auto& [i2, a2] : val) next[i1 * qdims[x] + i2] += a1 * a2;
                        acc = std::move(next);
                    }
                    for (const auto& [r, a] : apply(F, mult, acc))
                        out.add(wp.offset + r, bp.offset + j, kappa * sign_scalar(parity & 1) * a);
                }
            }
        }
    }
    out.normalize(F);
    return out;
}

} // namespace

ThetaStar theta_star(PreCooperadPtr q) {
    const Field F = q->field();
    int N = q->max_arity();
    ThetaStar ts;
    ts.cobar = cobar_construction(q);
    ts.bar = bar_construction(ts.cobar->op);
    ts.bcq = extend_cooperad(ts.bar->coop);
    ts.cow = std::make_shared<CoW>(q);
    ts.corolla.resize(N + 1);
    ts.corolla[1] = Matrix::identity(1);
    for (int n = 2; n <= N; ++n) ts.corolla[n] = corolla_theta_star(ts, n);
    ts.map[to_string(corolla_of(1))] = Matrix::identity(1);
    for (int n = 2; n <= N; ++n)
        for (const Tree& t : enumerate_trees(n)) {
            std::vector<Matrix> fs;
            for (int v = 0; v < t.vertices(); ++v) fs.push_back(ts.corolla[t.valence(v)]);
            ts.map[to_string(t)] = mul(F, multiply_along(*ts.cow, t, t), kron_all(F, fs));
        }
    return ts;
}

Matrix corolla_evaluation(const ThetaStar& ts, int n) {
    const Tree c = corolla_of(n);
    const CellSum& bs = ts.bar->sums[n];
    const CellSum& cs = ts.cobar->sums[n];
    Matrix out(ts.cobar->q->at(c)->dim(), bs.cx->dim());
    int bk = bs.find(c, Cell(c.vertices(), kStar));
    int ck = cs.find(c, Cell(c.vertices(), kStar));
    if (bk < 0 || ck < 0) return out;
    const auto &bp = bs.parts[bk], &cp = cs.parts[ck];
    for (int r = 0; r < cp.coeff->dim(); ++r) {
        int j = cp.offset + r;
        out.add(r, bp.offset + j, -sign_scalar(cs.cx->degree(j) & 1));
    }
    return out;
}

} // namespace opdual
