#include "internal.hpp"

#include <optional>
#include <random>
#include <set>

namespace opdual {

using namespace detail;

// ---- maps of pre-cooperads -------------------------------------------------

std::vector<Matrix> cobar_map(const CobarResult& src, const CobarResult& tgt,
                              const std::function<Matrix(const Tree&)>& f) {
    const Field& F = src.q->field();
    int N = std::min(src.q->max_arity(), tgt.q->max_arity());
    std::vector<Matrix> out(N + 1);
    for (int n = 1; n <= N; ++n) {
        const CellSum &a = src.sums[n], &b = tgt.sums[n];
        Matrix m(b.cx->dim(), a.cx->dim());
        for (const auto& p : a.parts) {
            if (p.coeff->dim() == 0) continue;
            int k = b.find(p.tree, p.cell);
            if (k < 0) continue;
            add_block(m, b.parts[k].offset, p.offset, n == 1 ? Matrix::identity(1) : f(p.tree));
        }
        m.normalize(F);
        out[n] = std::move(m);
    }
    return out;
}

namespace {

const Matrix& lookup(const PreMap& f, const Tree& t) {
    auto it = f.find(to_string(t));
    if (it == f.end()) throw OperadError("pre-cooperad map has no component at " + to_string(t));
    return it->second;
}

bool fail(std::string* witness, const std::string& what) {
    if (witness) *witness = what;
    return false;
}

} // namespace

bool is_precooperad_map(const PreCooperad& a, const PreCooperad& b, const PreMap& f, int N, std::string* witness) {
    const Field& F = a.field();
    N = std::min({N, a.max_arity(), b.max_arity()});
    for (int n = 2; n <= N; ++n)
        for (const Tree& t : enumerate_trees(n)) {
            const Matrix& ft = lookup(f, t);
            if (ft.rows() != b.at(t)->dim() || ft.cols() != a.at(t)->dim())
                return fail(witness, "shape(" + to_string(t) + ")");
            if (!check_map(make_map(a.at(t), b.at(t), ft, 0, false)).empty())
                return fail(witness, "chain(" + to_string(t) + ")");
            for (const auto& ex : expansions(t)) {
                Matrix lhs = mul(F, b.cover_map(t, ex.tree), ft);
                Matrix rhs = mul(F, lookup(f, ex.tree), a.cover_map(t, ex.tree));
                if (!equal(F, lhs, rhs)) return fail(witness, "cover(" + to_string(t) + "," + to_string(ex.tree) + ")");
            }
            for (int k = 1; k < n; ++k) {
                Perm s = transposition(n, k);
                Matrix lhs = mul(F, b.relabel_map(t, s), ft);
                Matrix rhs = mul(F, lookup(f, relabel(t, s)), a.relabel_map(t, s));
                if (!equal(F, lhs, rhs)) return fail(witness, "relabel(" + to_string(t) + "," + std::to_string(k) + ")");
            }
        }
    for (int p = 2; p <= N; ++p)
        for (int q = 2; p + q - 1 <= N; ++q)
            for (const Tree& t : enumerate_trees(p))
                for (const Tree& u : enumerate_trees(q))
                    for (int i = 1; i <= p; ++i) {
                        Tree g = graft(t, i, u);
                        Matrix lhs = mul(F, b.m(t, i, u), kron(F, lookup(f, t), lookup(f, u)));
                        Matrix rhs = mul(F, lookup(f, g), a.m(t, i, u));
                        if (!equal(F, lhs, rhs))
                            return fail(witness, "m(" + to_string(t) + "," + std::to_string(i) + "," + to_string(u) + ")");
                    }
    return true;
}

PreMap extend_map(const Field& F, const std::vector<Matrix>& f, int N) {
    PreMap out;
    for (int n = 1; n <= N; ++n)
        for (const Tree& t : enumerate_trees(n)) {
            std::vector<Matrix> fs;
            for (int v = 0; v < t.vertices(); ++v) fs.push_back(f[t.valence(v)]);
            out[to_string(t)] = fs.empty() ? Matrix::identity(1) : kron_all(F, fs);
        }
    return out;
}

PreMap identity_premap(const PreCooperad& q, int N) {
    PreMap out;
    for (int n = 1; n <= N; ++n)
        for (const Tree& t : enumerate_trees(n)) out[to_string(t)] = Matrix::identity(q.at(t)->dim());
    return out;
}

PreMap zero_premap(const PreCooperad& a, const PreCooperad& b, int N) {
    PreMap out;
    for (int n = 1; n <= N; ++n)
        for (const Tree& t : enumerate_trees(n))
            out[to_string(t)] = n == 1 ? Matrix::identity(1) : Matrix(b.at(t)->dim(), a.at(t)->dim());
    return out;
}

namespace {

// Linear conditions on unknown degree-0 matrices X_T, one arity at a time.
class MapSystem {
public:
    MapSystem(const Field& F, const PreCooperad& a, const PreCooperad& b, const std::vector<Tree>& trees)
        : F_(F) {
        for (const Tree& t : trees) {
            auto sa = a.at(t), sb = b.at(t);
            auto& v = vars_[to_string(t)];
            v.assign(sb->dim(), std::vector<int>(sa->dim(), -1));
            for (int r = 0; r < sb->dim(); ++r)
                for (int c = 0; c < sa->dim(); ++c)
                    if (sb->degree(r) == sa->degree(c)) v[r][c] = count_++;
            shapes_[to_string(t)] = {sb->dim(), sa->dim()};
        }
    }

    // Starts the equation sum_k L_k X_k R_k = rhs.
    void begin(int cols, const Matrix& rhs) {
        eq_.clear();
        eq_cols_ = cols;
        eq_rhs_ = rhs;
    }
    // Adds s L X_t R; an empty L or R means the identity.
    void term(const Tree& t, const Matrix* L, const Matrix* R, const Scalar& s) {
        const auto& v = vars_.at(to_string(t));
        Matrix Rt = R ? transpose(*R) : Matrix();
        for (int k = 0; k < static_cast<int>(v.size()); ++k)
            for (int l = 0; l < static_cast<int>(v[k].size()); ++l) {
                if (v[k][l] < 0) continue;
                SparseVec left = L ? L->col(k) : SparseVec{{k, Scalar(1)}};
                SparseVec right = R ? Rt.col(l) : SparseVec{{l, Scalar(1)}};
                for (const auto& [r, x] : left)
                    for (const auto& [c, y] : right) eq_[r * eq_cols_ + c][v[k][l]] += s * x * y;
            }
    }
    void end() {
        std::map<int, Scalar> rhs;
        for (int c = 0; c < eq_rhs_.cols(); ++c)
            for (const auto& [r, x] : eq_rhs_.col(c)) rhs[r * eq_cols_ + c] += x;
        std::set<int> keys;
        for (const auto& [k, _] : eq_) keys.insert(k);
        for (const auto& [k, _] : rhs) keys.insert(k);
        for (int k : keys) {
            auto it = eq_.find(k);
            rows_.push_back(it == eq_.end() ? std::map<int, Scalar>() : it->second);
            auto jt = rhs.find(k);
            rhs_.push_back(jt == rhs.end() ? Scalar(0) : jt->second);
        }
    }

    // Particular solution plus a random kernel combination.
    std::optional<std::map<std::string, Matrix>> solve_random(std::mt19937& rng, bool randomize) const {
        int nrows = static_cast<int>(rows_.size());
        Matrix A(nrows, count_);
        for (int r = 0; r < nrows; ++r)
            for (const auto& [c, x] : rows_[r]) A.add(r, c, x);
        A.normalize(F_);
        SparseVec b;
        for (int r = 0; r < nrows; ++r)
            if (!F_.is_zero(rhs_[r])) b[r] = F_.reduce(rhs_[r]);
        auto z = solve(F_, A, b);
        if (!z) return std::nullopt;
        if (randomize)
            for (const auto& k : kernel_basis(F_, A)) axpy(F_, *z, Scalar(static_cast<int>(rng() % 5) - 2), k);
        std::map<std::string, Matrix> out;
        for (const auto& [key, v] : vars_) {
            auto [rr, cc] = shapes_.at(key);
            Matrix m(rr, cc);
            for (int r = 0; r < rr; ++r)
                for (int c = 0; c < cc; ++c)
                    if (v[r][c] >= 0) {
                        auto it = z->find(v[r][c]);
                        if (it != z->end()) m.add(r, c, it->second);
                    }
            m.normalize(F_);
            out[key] = std::move(m);
        }
        return out;
    }

private:
    Field F_;
    int count_ = 0;
    std::map<std::string, std::vector<std::vector<int>>> vars_;
    std::map<std::string, std::pair<int, int>> shapes_;
    std::map<int, std::map<int, Scalar>> eq_;
    int eq_cols_ = 0;
    Matrix eq_rhs_;
    std::vector<std::map<int, Scalar>> rows_;
    std::vector<Scalar> rhs_;
};

} // namespace

namespace {

std::optional<PreMap> try_random_map(const PreCooperad& a, const PreCooperad& b, int N, std::mt19937& rng,
                                     bool randomize) {
    const Field& F = a.field();
    PreMap out = zero_premap(a, b, std::min(N, 1));
    for (int n = 2; n <= N; ++n) {
        const auto& trees = enumerate_trees(n);
        MapSystem sys(F, a, b, trees);
        for (const Tree& t : trees) {
            auto sa = a.at(t), sb = b.at(t);
            sys.begin(sa->dim(), Matrix(sb->dim(), sa->dim()));
            sys.term(t, &sb->d(), nullptr, 1);
            sys.term(t, nullptr, &sa->d(), -1);
            sys.end();
            for (const auto& ex : expansions(t)) {
                Matrix bc = b.cover_map(t, ex.tree), ac = a.cover_map(t, ex.tree);
                sys.begin(ac.cols(), Matrix(bc.rows(), ac.cols()));
                sys.term(t, &bc, nullptr, 1);
                sys.term(ex.tree, nullptr, &ac, -1);
                sys.end();
            }
            for (int k = 1; k < n; ++k) {
                Perm s = transposition(n, k);
                Matrix br = b.relabel_map(t, s), ar = a.relabel_map(t, s);
                sys.begin(ar.cols(), Matrix(br.rows(), ar.cols()));
                sys.term(t, &br, nullptr, 1);
                sys.term(relabel(t, s), nullptr, &ar, -1);
                sys.end();
            }
        }
        for (int p = 2; p < n; ++p) {
            int q = n - p + 1;
            for (const Tree& t : enumerate_trees(p))
                for (const Tree& u : enumerate_trees(q))
                    for (int i = 1; i <= p; ++i) {
                        Tree g = graft(t, i, u);
                        Matrix am = a.m(t, i, u);
                        Matrix rhs = mul(F, b.m(t, i, u), kron(F, out.at(to_string(t)), out.at(to_string(u))));
                        sys.begin(rhs.cols(), rhs);
                        sys.term(g, nullptr, &am, 1);
                        sys.end();
                    }
        }
        auto sol = sys.solve_random(rng, randomize);
        if (!sol) return std::nullopt;
        for (auto& [k, m] : *sol) out[k] = std::move(m);
    }
    return out;
}

} // namespace

PreMap random_precooperad_map(const PreCooperad& a, const PreCooperad& b, int N, unsigned seed) {
    N = std::min({N, a.max_arity(), b.max_arity()});
    std::mt19937 rng(seed);
    for (int attempt = 0; attempt < 8; ++attempt)
        if (auto m = try_random_map(a, b, N, rng, true)) return *m;
    // the m conditions are quadratic across arities; the zero choice always extends
    if (auto m = try_random_map(a, b, N, rng, false)) return *m;
    throw OperadError("random_precooperad_map: conditions are inconsistent");
}

// ---- BBP ------------------------------------------------------------------

BBar::BBar(OperadPtr p) : p_(std::move(p)) {}

CubePtr BBar::weight(const Tree& t, const Tree& u) const { return wbar_family(field(), t, u); }

const BBar::Entry& BBar::entry(const Tree& t) const {
    std::string key = to_string(t);
    {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = cache_.find(key);
        if (it != cache_.end()) return *it->second;
    }
    auto e = std::make_shared<Entry>();
    for (const Tree& u : enumerate_trees(t.arity())) {
        e->where[to_string(u)] = static_cast<int>(e->objects.size());
        e->objects.push_back(u);
    }
    const Field F = field();
    auto p = p_;
    Diagram w{e->objects, [F, t](const Tree& u) { return wbar_family(F, t, u)->cx(); },
              [F, t](const Tree& a, const Tree& b) {
                  if (!leq(b, t)) return Matrix(0, wbar_family(F, t, a)->dim());
                  return face_inclusion(F, FaceKind::FamilyU, a, b, t).m;
              },
              true};
    Diagram c{e->objects, [p](const Tree& u) { return tree_tensor(p->seq, u); },
              [p](const Tree& s, const Tree& b) { return contract_map(*p, b, s); }, false};
    e->co = coend(F, w, c);
    std::lock_guard<std::mutex> lock(mu_);
    return *cache_.emplace(key, e).first->second;
}

CxPtr BBar::at(const Tree& t) const { return entry(t).co.q.cx; }

SparseVec BBar::class_of(const Tree& t, const Tree& u, int cell, const SparseVec& y) const {
    const Entry& e = entry(t);
    int k = e.where.at(to_string(u));
    int dp = tree_tensor(p_->seq, u)->dim();
    SparseVec v;
    for (const auto& [i, a] : y) v[e.co.sum.offsets[k] + cell * dp + i] = a;
    return apply(field(), e.co.q.proj, v);
}

Matrix BBar::cover_map(const Tree& t, const Tree& s) const {
    const Field& F = field();
    const Entry &a = entry(t), &b = entry(s);
    Matrix m(b.co.sum.total->dim(), a.co.sum.total->dim());
    for (size_t k = 0; k < a.objects.size(); ++k) {
        const Tree& u = a.objects[k];
        if (!leq(u, t)) continue;
        int j = b.where.at(to_string(u));
        Matrix fm = face_inclusion(F, FaceKind::FamilyT, t, s, u).m;
        add_block(m, b.co.sum.offsets[j], a.co.sum.offsets[k],
                  kron(F, fm, Matrix::identity(tree_tensor(p_->seq, u)->dim())));
    }
    m.normalize(F);
    return mul(F, b.co.q.proj, mul(F, m, a.co.q.section));
}

Matrix BBar::relabel_map(const Tree& t, const Perm& sigma) const {
    const Field& F = field();
    Tree st = relabel(t, sigma);
    const Entry &a = entry(t), &b = entry(st);
    Matrix m(b.co.sum.total->dim(), a.co.sum.total->dim());
    for (size_t k = 0; k < a.objects.size(); ++k) {
        const Tree& u = a.objects[k];
        if (!leq(u, t)) continue;
        Tree su = relabel(u, sigma);
        Matrix cm = cube_relabel(weight(t, u), weight(st, su), sigma).m;
        add_block(m, b.co.sum.offsets[b.where.at(to_string(su))], a.co.sum.offsets[k],
                  kron(F, cm, transport_map(p_->seq, u, sigma)));
    }
    m.normalize(F);
    return mul(F, b.co.q.proj, mul(F, m, a.co.q.section));
}

Matrix BBar::m_total(const Tree& t, int i, const Tree& u) const {
    const Field& F = field();
    int n = u.arity();
    Tree g = graft(t, i, u);
    const Entry &a = entry(t), &b = entry(u), &c = entry(g);
    int db = b.co.sum.total->dim();
    Matrix out(c.co.sum.total->dim(), a.co.sum.total->dim() * db);
    for (size_t ka = 0; ka < a.objects.size(); ++ka)
        for (size_t kb = 0; kb < b.objects.size(); ++kb) {
            const Tree &U = a.objects[ka], &V = b.objects[kb];
            if (!leq(U, t) || !leq(V, u)) continue;
            Tree G = graft(U, i, V);
            auto wa = weight(t, U), wb = weight(u, V), wg = weight(g, G);
            std::vector<CubeFactor> fs = wa->factors();
            fs.insert(fs.end(), wb->factors().begin(), wb->factors().end());
            auto prod = std::make_shared<const Cube>(F, fs);
            std::vector<CoordRule> rules;
            for (Mask key : wg->keys()) {
                int src = -1;
                for (int s = 0; s < wa->coords(); ++s)
                    if (lift_cluster(wa->keys()[s], i, n) == key) src = s;
                for (int s = 0; s < wb->coords(); ++s)
                    if ((wb->keys()[s] << (i - 1)) == key) src = wa->coords() + s;
                rules.push_back({CoordRule::Proj, src});
            }
            Matrix cm = cell_map(prod, wg, rules, false).m;
            Matrix gm = graft_tensor_map(p_->seq, U, i, V);
            auto pa = tree_tensor(p_->seq, U), pb = tree_tensor(p_->seq, V);
            int dpa = pa->dim(), dpb = pb->dim(), dpg = tree_tensor(p_->seq, G)->dim();
            int oa = a.co.sum.offsets[ka], ob = b.co.sum.offsets[kb], og = c.co.sum.offsets[c.where.at(to_string(G))];
            for (int x = 0; x < wa->dim(); ++x)
                for (int x2 = 0; x2 < wb->dim(); ++x2) {
                    Cell cc = wa->cell(x);
                    const Cell& c2 = wb->cell(x2);
                    cc.insert(cc.end(), c2.begin(), c2.end());
                    const SparseVec& img = cm.col(prod->index(cc));
                    if (img.empty()) continue;
                    int s2 = stars(c2);
                    for (int y = 0; y < dpa; ++y)
                        for (int y2 = 0; y2 < dpb; ++y2) {
                            Scalar s = sign_scalar((pa->degree(y) * s2) & 1);
                            int col = (oa + x * dpa + y) * db + ob + x2 * dpb + y2;
                            for (const auto& [z, e] : img)
                                for (const auto& [r, gv] : gm.col(y * dpb + y2))
                                    out.add(og + z * dpg + r, col, s * e * gv);
                        }
                }
        }
    out.normalize(F);
    return out;
}

Matrix BBar::m(const Tree& t, int i, const Tree& u) const {
    const Field& F = field();
    const Entry &a = entry(t), &b = entry(u), &c = entry(graft(t, i, u));
    return mul(F, c.co.q.proj, mul(F, m_total(t, i, u), kron(F, a.co.q.section, b.co.q.section)));
}

// ---- adjoint transposes ----------------------------------------------------

PreMap transpose_to_precooperad(const BBar& bb, const CobarResult& cq, const std::vector<Matrix>& phi) {
    const Field& F = bb.field();
    const Operad& p = *bb.base();
    const PreCooperad& q = *cq.q;
    std::string why;
    if (!is_operad_map(p, *cq.op, phi, &why)) throw OperadError("transpose: not an operad map: " + why);
    int N = std::min(p.max_arity(), q.max_arity());
    PreMap out;
    out[to_string(corolla_of(1))] = Matrix::identity(1);
    for (int n = 2; n <= N; ++n)
        for (const Tree& t : enumerate_trees(n)) {
            const auto& e = bb.entry(t);
            Matrix big(q.at(t)->dim(), e.co.sum.total->dim());
            for (size_t k = 0; k < e.objects.size(); ++k) {
                const Tree& u = e.objects[k];
                if (!leq(u, t)) continue;
                auto frs = *fragments(t, u);
                auto fam = bb.weight(t, u);
                Matrix mult = multiply_along(q, t, u);
                std::vector<int> pdims, qdims;
                for (int v = 0; v < u.vertices(); ++v) {
                    pdims.push_back(p.term(u.valence(v))->dim());
                    qdims.push_back(q.at(frs[v])->dim());
                }
                int dp = tree_tensor(p.seq, u)->dim();
                for (int x = 0; x < fam->dim(); ++x) {
                    auto zs = split_cell(*fam, fam->cell(x));
                    for (int y = 0; y < dp; ++y) {
                        auto dg = decode_index(pdims, y);
                        std::vector<int> yd(u.vertices());
                        for (int v = 0; v < u.vertices(); ++v) yd[v] = p.term(u.valence(v))->degree(dg[v]);
                        int parity = 0;
                        for (int a = 0; a < u.vertices(); ++a) {
                            parity += stars(zs[a]) * yd[a];
                            for (int b = 0; b < a; ++b) parity += stars(zs[a]) * yd[b];
                        }
                        SparseVec acc{{0, Scalar(1)}};
                        for (int v = 0; v < u.vertices() && !acc.empty(); ++v) {
                            SparseVec val = cq.evaluate(phi[u.valence(v)].col(dg[v]), frs[v], zs[v]);
                            SparseVec next;
                            for (const auto& [i1, a1] : acc)
                                for (const auto& [i2, a2] : val) next[i1 * qdims[v] + i2] += a1 * a2;
                            acc = std::move(next);
                        }
                        SparseVec img = apply(F, mult, acc);
                        int col = e.co.sum.offsets[k] + x * dp + y;
                        for (const auto& [r, a] : img) big.add(r, col, sign_scalar(parity & 1) * a);
                    }
                }
            }
            big.normalize(F);
            Matrix leak = mul(F, big, add(F, Matrix::identity(big.cols()), mul(F, e.co.q.section, e.co.q.proj), -1));
            if (!is_zero(F, leak)) throw OperadError("transpose: not constant on classes at " + to_string(t));
            out[to_string(t)] = mul(F, big, e.co.q.section);
        }
    return out;
}

std::vector<Matrix> transpose_to_operad(const BBar& bb, const CobarResult& cq, const PreMap& psi) {
    const Field& F = bb.field();
    const Operad& p = *bb.base();
    int N = std::min(p.max_arity(), cq.q->max_arity());
    std::string why;
    if (!is_precooperad_map(bb, *cq.q, psi, N, &why)) throw OperadError("transpose: not a pre-cooperad map: " + why);
    std::vector<Matrix> out(N + 1);
    out[1] = Matrix::identity(1);
    for (int n = 2; n <= N; ++n) {
        Tree c = corolla_of(n);
        const auto& pn = *p.term(n);
        Matrix m(cq.sums[n].cx->dim(), pn.dim());
        for (const auto& part : cq.sums[n].parts) {
            if (part.coeff->dim() == 0) continue;
            const Tree& u = part.tree;
            auto fam = bb.weight(u, c);
            int top = top_index(fam);
            const Matrix& pu = lookup(psi, u);
            for (int y = 0; y < pn.dim(); ++y) {
                SparseVec img = apply(F, pu, bb.class_of(u, c, top, {{y, Scalar(1)}}));
                Scalar s = sign_scalar((u.vertices() * pn.degree(y)) & 1);
                for (const auto& [r, a] : img) m.add(part.offset + r, y, s * a);
            }
        }
        m.normalize(F);
        out[n] = std::move(m);
    }
    return out;
}

} // namespace opdual
