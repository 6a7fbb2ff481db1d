#include "internal.hpp"

namespace opdual {

namespace detail {

std::vector<std::pair<Tree, std::vector<int>>> by_tree(const CellSum& cs) {
    std::vector<std::pair<Tree, std::vector<int>>> out;
    for (int k = 0; k < static_cast<int>(cs.parts.size()); ++k) {
        if (out.empty() || out.back().first != cs.parts[k].tree) out.push_back({cs.parts[k].tree, {}});
        out.back().second.push_back(k);
    }
    return out;
}

Matrix relabel_sum(const Field& F, const CellSum& src, const CellSum& tgt,
                   const std::function<CubePtr(const Tree&)>& src_cube,
                   const std::function<CubePtr(const Tree&)>& tgt_cube, const Perm& sigma,
                   const std::function<Matrix(const Tree&)>& coeff_map) {
    Matrix out(tgt.cx->dim(), src.cx->dim());
    for (const auto& [t, idx] : by_tree(src)) {
        Tree st = relabel(t, sigma);
        auto a = src_cube(t), b = tgt_cube(st);
        Matrix cm = cube_relabel(a, b, sigma).m;
        Matrix pm = coeff_map(t);
        for (int k : idx) {
            const auto& p = src.parts[k];
            for (const auto& [r, e] : cm.col(a->index(p.cell))) {
                const auto& q = tgt.parts[tgt.find(st, b->cell(r))];
                for (int j = 0; j < p.coeff->dim(); ++j)
                    for (const auto& [i, x] : pm.col(j)) out.add(q.offset + i, p.offset + j, e * x);
            }
        }
    }
    out.normalize(F);
    return out;
}

Mask lift_cluster(Mask c, int i, int n) {
    Mask low = c & full_mask(i - 1);
    Mask high = (c >> i) << (i + n - 1);
    Mask mid = (c & leaf_bit(i)) ? graft_block(i, n) : 0;
    return low | mid | high;
}

std::vector<Cell> split_cell(const Cube& c, const Cell& cell) {
    std::vector<Cell> out;
    for (int f = 0; f < static_cast<int>(c.factors().size()); ++f) {
        int off = c.factor_offset(f);
        out.emplace_back(cell.begin() + off, cell.begin() + off + c.factors()[f].keys.size());
    }
    return out;
}

void add_block(Matrix& out, int r0, int c0, const Matrix& m, const Scalar& s) {
    for (int j = 0; j < m.cols(); ++j)
        for (const auto& [i, a] : m.col(j)) out.add(r0 + i, c0 + j, s * a);
}

} // namespace detail

using namespace detail;

namespace {

Diagram contravariant_coeffs(const OperadPtr& p, int n) {
    return Diagram{enumerate_trees(n), [p](const Tree& t) { return tree_tensor(p->seq, t); },
                   [p](const Tree& s, const Tree& b) { return contract_map(*p, b, s); }, false};
}

SparseVec class_in(const CellSum& cs, const CubeDiagram& cd, const Operad& p, const Tree& t, const Cell& cell,
                   const SparseVec& y) {
    Face f = reduce_cell(cd, t, cell);
    const auto& part = cs.parts[cs.find(f.tree, f.cell)];
    SparseVec v = f.tree == t ? y : apply(p.field(), contract_map(p, t, f.tree), y);
    SparseVec out;
    for (const auto& [i, a] : v) out[part.offset + i] = p.field().reduce(f.sign * a);
    return out;
}

void set_actions(SymSeq& seq, int n, const std::function<Matrix(const Perm&)>& act) {
    for (int k = 1; k < n; ++k) seq.set_s(n, k, act(transposition(n, k)));
}

} // namespace

// ---- bar ------------------------------------------------------------------

Diagram BarResult::coeffs(int n) const { return contravariant_coeffs(p, n); }

SparseVec BarResult::class_of(const Tree& t, const Cell& cell, const SparseVec& y) const {
    int n = t.arity();
    return class_in(sums[n], cubes[n], *p, t, cell, y);
}

BarPtr bar_construction(OperadPtr p) {
    const Field F = p->field();
    int N = p->max_arity();
    auto b = std::make_shared<BarResult>();
    b->p = p;
    b->sums.resize(N + 1);
    b->cubes.resize(N + 1);
    auto coop = std::make_shared<Cooperad>();
    coop->name = "bar(" + p->name + ")";
    coop->seq = SymSeq(F, N);
    auto cube = [F](const Tree& t) { return wbar(F, t); };
    for (int n = 1; n <= N; ++n) {
        b->cubes[n] = CubeDiagram{enumerate_trees(n), cube};
        b->sums[n] = closed_coend(F, b->cubes[n], b->coeffs(n));
        if (n == 1) continue;
        coop->seq.set_term(n, b->sums[n].cx);
        set_actions(coop->seq, n, [&](const Perm& s) {
            return relabel_sum(F, b->sums[n], b->sums[n], cube, cube, s, [&](const Tree& t) { return transport_map(p->seq, t, s); });
        });
    }
    for (int m = 2; m <= N; ++m)
        for (int n = 2; m + n - 1 <= N; ++n)
            for (int i = 1; i <= m; ++i) {
                const CellSum& g = b->sums[m + n - 1];
                int dm = b->sums[m].cx->dim(), dn = b->sums[n].cx->dim();
                Matrix c(dm * dn, g.cx->dim());
                for (const auto& gp : g.parts) {
                    auto dg = degraft(gp.tree, i, n);
                    if (!dg) continue;
                    const Tree &t = dg->t, &u = dg->u;
                    auto nu = graft_decompose(F, t, i, u);
                    auto wu = wbar(F, u);
                    Scalar e = nu.m.at(top_index(wbar(F, t)) * wu->dim() + top_index(wu), top_index(wbar(F, gp.tree)));
                    const auto& tp = b->sums[m].parts[b->sums[m].find(t, top_cell(*wbar(F, t)))];
                    const auto& up = b->sums[n].parts[b->sums[n].find(u, top_cell(*wu))];
                    Matrix split = transpose(graft_tensor_map(p->seq, t, i, u));
                    int du = up.coeff->dim();
                    for (int j = 0; j < gp.coeff->dim(); ++j)
                        for (const auto& [idx, a] : split.col(j)) {
                            int x = idx / du, y = idx % du;
                            Scalar s = sign_scalar((u.vertices() * tp.coeff->degree(x)) & 1);
                            c.add((tp.offset + x) * dn + up.offset + y, gp.offset + j, e * a * s);
                        }
                }
                c.normalize(F);
                coop->cocirc[{m, n, i}] = std::move(c);
            }
    add_unit_cocircs(*coop);
    b->coop = coop;
    return b;
}

std::vector<Matrix> bar_map(const BarResult& src, const BarResult& tgt, const std::vector<Matrix>& f) {
    const Field& F = src.p->field();
    int N = std::min(src.p->max_arity(), tgt.p->max_arity());
    std::vector<Matrix> out(N + 1);
    for (int n = 1; n <= N; ++n) {
        const CellSum &a = src.sums[n], &b = tgt.sums[n];
        Matrix m(b.cx->dim(), a.cx->dim());
        for (const auto& p : a.parts) {
            const auto& q = b.parts[b.find(p.tree, p.cell)];
            std::vector<Matrix> fs;
            for (int v = 0; v < p.tree.vertices(); ++v) fs.push_back(f[p.tree.valence(v)]);
            Matrix k = kron_all(F, fs);
            for (int j = 0; j < k.cols(); ++j)
                for (const auto& [i, x] : k.col(j)) m.add(q.offset + i, p.offset + j, x);
        }
        m.normalize(F);
        out[n] = std::move(m);
    }
    return out;
}

// ---- cobar ----------------------------------------------------------------

Diagram CobarResult::coeffs(int n) const {
    auto qq = q;
    return Diagram{enumerate_trees(n), [qq](const Tree& t) { return qq->at(t); },
                   [qq](const Tree& s, const Tree& b) { return qq->expand_to(s, b); }, true};
}

SparseVec CobarResult::evaluate(const SparseVec& phi, const Tree& u, const Cell& cell) const {
    int n = u.arity();
    Face f = reduce_cell(cubes[n], u, cell);
    const auto& part = sums[n].parts[sums[n].find(f.tree, f.cell)];
    SparseVec v;
    for (const auto& [i, a] : phi)
        if (i >= part.offset && i < part.offset + part.coeff->dim()) v[i - part.offset] = a;
    const Field& F = q->field();
    if (f.tree != u) v = apply(F, q->expand_to(f.tree, u), v);
    for (auto& [i, a] : v) a = F.reduce(a * f.sign);
    return v;
}

CobarPtr cobar_construction(PreCooperadPtr q) {
    const Field F = q->field();
    int N = q->max_arity();
    auto c = std::make_shared<CobarResult>();
    c->q = q;
    c->sums.resize(N + 1);
    c->cubes.resize(N + 1);
    auto op = std::make_shared<Operad>();
    op->name = "cobar(" + q->name() + ")";
    op->seq = SymSeq(F, N);
    auto cube = [F](const Tree& t) { return wbar(F, t); };
    for (int n = 1; n <= N; ++n) {
        c->cubes[n] = CubeDiagram{enumerate_trees(n), cube};
        c->sums[n] = closed_end(F, c->cubes[n], c->coeffs(n));
        if (n == 1) continue;
        op->seq.set_term(n, c->sums[n].cx);
        set_actions(op->seq, n, [&](const Perm& s) {
            return relabel_sum(F, c->sums[n], c->sums[n], cube, cube, s, [&](const Tree& t) { return q->relabel_map(t, s); });
        });
    }
    for (int m = 2; m <= N; ++m)
        for (int n = 2; m + n - 1 <= N; ++n)
            for (int i = 1; i <= m; ++i) {
                const CellSum &sm = c->sums[m], &sn = c->sums[n], &sg = c->sums[m + n - 1];
                int dn = sn.cx->dim();
                Matrix circ(sg.cx->dim(), sm.cx->dim() * dn);
                for (const auto& tp : sm.parts)
                    for (const auto& up : sn.parts) {
                        const Tree &t = tp.tree, &u = up.tree;
                        Tree g = graft(t, i, u);
                        auto wu = wbar(F, u);
                        Scalar e = graft_decompose(F, t, i, u)
                                       .m.at(top_index(wbar(F, t)) * wu->dim() + top_index(wu), top_index(wbar(F, g)));
                        const auto& gp = sg.parts[sg.find(g, top_cell(*wbar(F, g)))];
                        Matrix mm = q->m(t, i, u);
                        int du = up.coeff->dim();
                        for (int a = 0; a < tp.coeff->dim(); ++a)
                            for (int b = 0; b < du; ++b) {
                                int psi = up.coeff->degree(b) - up.cell_degree;
                                Scalar s = e * sign_scalar((psi * t.vertices()) & 1);
                                for (const auto& [r, x] : mm.col(a * du + b))
                                    circ.add(gp.offset + r, (tp.offset + a) * dn + up.offset + b, s * x);
                            }
                    }
                circ.normalize(F);
                op->circ[{m, n, i}] = std::move(circ);
            }
    add_unit_circs(*op);
    c->op = op;
    return c;
}

// ---- W construction -------------------------------------------------------

Diagram WResult::coeffs(int n) const { return contravariant_coeffs(p, n); }

SparseVec WResult::class_of(const Tree& t, const Cell& cell, const SparseVec& y) const {
    int n = t.arity();
    return class_in(sums[n], cubes[n], *p, t, cell, y);
}

WPtr w_construction(OperadPtr p) {
    const Field F = p->field();
    int N = p->max_arity();
    auto w = std::make_shared<WResult>();
    w->p = p;
    w->sums.resize(N + 1);
    w->cubes.resize(N + 1);
    auto op = std::make_shared<Operad>();
    op->name = "W(" + p->name + ")";
    op->seq = SymSeq(F, N);
    auto cube = [F](const Tree& t) { return delta_cube(F, t); };
    for (int n = 1; n <= N; ++n) {
        w->cubes[n] = CubeDiagram{enumerate_trees(n), cube};
        w->sums[n] = closed_coend(F, w->cubes[n], w->coeffs(n));
        if (n == 1) continue;
        op->seq.set_term(n, w->sums[n].cx);
        set_actions(op->seq, n, [&](const Perm& s) {
            return relabel_sum(F, w->sums[n], w->sums[n], cube, cube, s, [&](const Tree& t) { return transport_map(p->seq, t, s); });
        });
    }
    for (int m = 2; m <= N; ++m)
        for (int n = 2; m + n - 1 <= N; ++n)
            for (int i = 1; i <= m; ++i) {
                const CellSum &sm = w->sums[m], &sn = w->sums[n], &sg = w->sums[m + n - 1];
                int dn = sn.cx->dim();
                Matrix circ(sg.cx->dim(), sm.cx->dim() * dn);
                for (const auto& [t, tparts] : by_tree(sm))
                    for (const auto& [u, uparts] : by_tree(sn)) {
                        Tree g = graft(t, i, u);
                        auto mu = graft_mu(F, t, i, u);
                        auto dt = delta_cube(F, t), du = delta_cube(F, u), dg = delta_cube(F, g);
                        Matrix gm = graft_tensor_map(p->seq, t, i, u);
                        for (int tk : tparts)
                            for (int uk : uparts) {
                                const auto &tp = sm.parts[tk], &up = sn.parts[uk];
                                int src = dt->index(tp.cell) * du->dim() + du->index(up.cell);
                                for (const auto& [r, e] : mu.m.col(src)) {
                                    const auto& gp = sg.parts[sg.find(g, dg->cell(r))];
                                    int dpu = up.coeff->dim();
                                    for (int a = 0; a < tp.coeff->dim(); ++a)
                                        for (int b = 0; b < dpu; ++b) {
                                            Scalar s = e * sign_scalar((tp.coeff->degree(a) * up.cell_degree) & 1);
                                            for (const auto& [x, v] : gm.col(a * dpu + b))
                                                circ.add(gp.offset + x, (tp.offset + a) * dn + up.offset + b, s * v);
                                        }
                                }
                            }
                    }
                circ.normalize(F);
                op->circ[{m, n, i}] = std::move(circ);
            }
    add_unit_circs(*op);
    w->op = op;
    return w;
}

std::vector<Matrix> w_eta(const WResult& w) {
    const Field& F = w.p->field();
    int N = w.p->max_arity();
    std::vector<Matrix> out(N + 1);
    for (int n = 1; n <= N; ++n) {
        Matrix m(w.p->term(n)->dim(), w.sums[n].cx->dim());
        for (const auto& part : w.sums[n].parts) {
            if (stars(part.cell) > 0) continue;
            const Matrix& c = compose_along_tree(*w.p, part.tree);
            for (int j = 0; j < c.cols(); ++j)
                for (const auto& [i, a] : c.col(j)) m.add(i, part.offset + j, a);
        }
        m.normalize(F);
        out[n] = std::move(m);
    }
    return out;
}

std::vector<Matrix> w_zeta(const WResult& w) {
    int N = w.p->max_arity();
    std::vector<Matrix> out(N + 1);
    for (int n = 1; n <= N; ++n) {
        int d = w.p->term(n)->dim();
        Matrix m(w.sums[n].cx->dim(), d);
        const auto& part = w.sums[n].parts[w.sums[n].find(corolla_of(n), Cell{})];
        for (int j = 0; j < d; ++j) m.add(part.offset + j, j, 1);
        out[n] = std::move(m);
    }
    return out;
}

// ---- theta ----------------------------------------------------------------

std::vector<Matrix> theta(const WResult& w, const BarResult& b, const CobarResult& cb) {
    const Field F = w.p->field();
    const Operad& p = *w.p;
    int N = p.max_arity();
    std::vector<Matrix> out(N + 1);
    for (int n = 1; n <= N; ++n) {
        const CellSum &ws = w.sums[n], &cs = cb.sums[n];
        Matrix th(cs.cx->dim(), ws.cx->dim());
        for (const auto& [t, tparts] : by_tree(ws)) {
            auto pdims = std::vector<int>();
            std::vector<int> val;
            for (int v = 0; v < t.vertices(); ++v) {
                val.push_back(t.valence(v));
                pdims.push_back(p.term(t.valence(v))->dim());
            }
            for (const auto& cp : cs.parts) {
                const Tree& u = cp.tree;
                if (!leq(u, t)) continue;
                auto cells = theta_cells(F, t, u);
                auto src = delta_wbar(F, t, u);
                auto fam = wbar_family(F, t, u);
                auto frs = *fragments(t, u);
                int nu = std::max(1, u.vertices());
                std::vector<std::vector<int>> groups(nu);
                std::vector<int> order;
                for (int x = 0; x < u.vertices(); ++x) {
                    for (Mask c : clusters_at(t, u, x)) groups[x].push_back(t.find(c));
                    std::sort(groups[x].begin(), groups[x].end());
                    order.insert(order.end(), groups[x].begin(), groups[x].end());
                }
                std::vector<int> qdims;
                for (int x = 0; x < u.vertices(); ++x) qdims.push_back(b.sums[u.valence(x)].cx->dim());
                Cell utop(u.vertices(), kStar);
                for (int tk : tparts) {
                    const auto& wp = ws.parts[tk];
                    Cell sc = wp.cell;
                    sc.insert(sc.end(), utop.begin(), utop.end());
                    const SparseVec& col = cells.m.col(src->index(sc));
                    for (int j = 0; j < wp.coeff->dim(); ++j) {
                        auto dg = decode_index(pdims, j);
                        std::vector<int> deg(t.vertices());
                        int ydeg = 0;
                        for (int v = 0; v < t.vertices(); ++v) {
                            deg[v] = p.term(val[v])->degree(dg[v]);
                            ydeg += deg[v];
                        }
                        int regroup = 0;
                        for (size_t a = 0; a < order.size(); ++a)
                            for (size_t c = a + 1; c < order.size(); ++c)
                                if (order[a] > order[c]) regroup += deg[order[a]] * deg[order[c]];
                        std::vector<int> gdeg(nu, 0);
                        for (int x = 0; x < u.vertices(); ++x)
                            for (int v : groups[x]) gdeg[x] += deg[v];
                        for (const auto& [z, kappa] : col) {
                            const Cell& zc = fam->cell(z);
                            std::vector<Cell> zs(nu);
                            for (int x = 0; x < u.vertices(); ++x) {
                                int off = fam->factor_offset(x);
                                zs[x] = Cell(zc.begin() + off, zc.begin() + off + fam->factors()[x].keys.size());
                            }
                            int inter = 0;
                            for (int a = 0; a < u.vertices(); ++a)
                                for (int c = 0; c < a; ++c) inter += stars(zs[a]) * gdeg[c];
                            Scalar s = kappa * sign_scalar((regroup + inter + u.vertices() * ydeg) & 1);
                            SparseVec acc{{0, Scalar(1)}};
                            for (int x = 0; x < u.vertices(); ++x) {
                                std::vector<int> fd, fdims;
                                for (int v : groups[x]) {
                                    fd.push_back(dg[v]);
                                    fdims.push_back(pdims[v]);
                                }
                                SparseVec cls = b.class_of(frs[x], zs[x], {{encode_index(fdims, fd), Scalar(1)}});
                                SparseVec next;
                                for (const auto& [i1, a1] : acc)
                                    for (const auto& [i2, a2] : cls) next[i1 * qdims[x] + i2] += a1 * a2;
                                acc = std::move(next);
                            }
                            if (u.vertices() == 0) acc = {{0, Scalar(1)}};
                            for (const auto& [r, a] : acc) th.add(cp.offset + r, wp.offset + j, s * a);
                        }
                    }
                }
            }
        }
        th.normalize(F);
        out[n] = std::move(th);
    }
    return out;
}

ThetaBundle theta_bundle(OperadPtr p) {
    ThetaBundle tb;
    tb.w = w_construction(p);
    tb.bar = bar_construction(p);
    tb.cobar = cobar_construction(extend_cooperad(tb.bar->coop));
    tb.theta = theta(*tb.w, *tb.bar, *tb.cobar);
    return tb;
}

// ---- trivial operads --------------------------------------------------------

OperadPtr omega_sigma(const SymSeq& a) {
    const Field& F = a.field();
    SymSeq s(F, a.max_arity());
    for (int n = 2; n <= a.max_arity(); ++n) {
        const auto& c = *a.term(n);
        std::vector<std::string> names;
        for (int j = 0; j < c.dim(); ++j) names.push_back("phi_" + (c.has_names() ? c.name(j) : std::to_string(j)));
        s.set_term(n, share(ChainComplex(F, c.degrees(), scaled(F, c.d(), -1), names)));
        for (int k = 1; k < n; ++k) s.set_s(n, k, a.s(n, k));
    }
    return trivial_operad(s, "omega-sigma");
}

std::vector<Matrix> epsilon_trivial(const BarResult& b, const CobarResult& cb, const Operad& os) {
    int N = os.max_arity();
    std::vector<Matrix> out(N + 1);
    for (int n = 1; n <= N; ++n) {
        int d = os.term(n)->dim();
        Matrix m(d, cb.sums[n].cx->dim());
        Tree c = corolla_of(n);
        const auto& cp = cb.sums[n].parts[cb.sums[n].find(c, Cell(c.vertices(), kStar))];
        const auto& bp = b.sums[n].parts[b.sums[n].find(c, Cell(c.vertices(), kStar))];
        for (int j = 0; j < d; ++j) m.add(j, cp.offset + bp.offset + j, 1);
        out[n] = std::move(m);
    }
    return out;
}

std::vector<Matrix> r_sharp(const SymSeq& a) {
    std::vector<Matrix> out(a.max_arity() + 1);
    for (int n = 1; n <= a.max_arity(); ++n) {
        const auto& c = *a.term(n);
        Matrix m(c.dim(), c.dim());
        for (int j = 0; j < c.dim(); ++j) m.add(j, j, n == 1 ? Scalar(1) : -sign_scalar(c.degree(j) & 1));
        m.normalize(a.field());
        out[n] = std::move(m);
    }
    return out;
}

} // namespace opdual
