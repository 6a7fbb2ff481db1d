#include "opdual/koszul.hpp"

namespace opdual {

namespace {

bool bijective(const Field& F, const Matrix& m) { return m.rows() == m.cols() && rank(F, m) == m.rows(); }

// Bijective in every arity and an operad map.
bool operad_iso(const Operad& a, const Operad& b, const std::vector<Matrix>& f, const std::string& tag,
                std::vector<std::string>& witnesses) {
    bool ok = true;
    for (int n = 1; n <= a.max_arity(); ++n)
        if (!bijective(a.field(), f[n]) || a.term(n)->dims() != b.term(n)->dims()) {
            witnesses.push_back(tag + ": not bijective in arity " + std::to_string(n));
            ok = false;
        }
    std::string why;
    if (!is_operad_map(a, b, f, &why)) {
        witnesses.push_back(tag + ": " + why);
        ok = false;
    }
    return ok;
}

} // namespace

KoszulResult koszul(OperadPtr p) {
    const Field& F = p->field();
    KoszulResult r;
    r.p = p;
    r.bar = bar_construction(p);
    auto k = std::make_shared<Operad>(*dualize(*r.bar->coop));
    k->name = "K(" + p->name + ")";
    r.k = k;
    r.cdual = cobar_construction(dual_precooperad(p));
    int N = p->max_arity();
    r.iso.assign(N + 1, Matrix());
    r.iso[1] = Matrix::identity(1);
    // The dual basis of cell (x) y goes to E_{y*, cell}, no sign.
    for (int n = 2; n <= N; ++n) {
        const CellSum &bs = r.bar->sums[n], &cs = r.cdual->sums[n];
        Matrix m(cs.cx->dim(), bs.cx->dim());
        for (const auto& bp : bs.parts) {
            if (bp.coeff->dim() == 0) continue;
            int k = cs.find(bp.tree, bp.cell);
            if (k < 0) throw OperadError("koszul: no cobar part for " + to_string(bp.tree));
            const auto& cp = cs.parts[k];
            for (int j = 0; j < bp.coeff->dim(); ++j) m.add(cp.offset + j, bp.offset + j, Scalar(1));
        }
        m.normalize(F);
        r.iso[n] = std::move(m);
    }
    return r;
}

OperadPtr koszul_dual(OperadPtr p) { return koszul(std::move(p)).k; }

PreMap double_dual_map(CooperadPtr q, int N) {
    const Field& F = q->field();
    auto dd = double_dual_maps(q->seq);
    PreMap out;
    for (int n = 1; n <= std::min(N, q->max_arity()); ++n)
        for (const Tree& t : enumerate_trees(n)) {
            std::vector<Matrix> fs;
            for (int v = 0; v < t.vertices(); ++v) fs.push_back(dd[t.valence(v)]);
            out[to_string(t)] = fs.empty() ? Matrix::identity(1) : kron_all(F, fs);
        }
    return out;
}

CbToKk cb_to_kk(OperadPtr p) {
    const Field& F = p->field();
    int N = p->max_arity();
    CbToKk r;
    r.tb = theta_bundle(p);
    r.k1 = koszul(p);
    r.k2 = koszul(r.k1.k);
    const SymSeq& bseq = r.tb.bar->coop->seq;
    // x_1 (x) ... (x) x_k |-> (phi |-> (-1)^{|x||phi|} phi(x)) read through the
    // pairing of the dual of a tensor with the tensor of duals.
    for (int n = 1; n <= N; ++n)
        for (const Tree& t : enumerate_trees(n)) {
            auto factors = tree_factors(bseq, t);
            std::vector<int> dims;
            for (const auto& c : factors) dims.push_back(c->dim());
            int total = tree_tensor(bseq, t)->dim();
            Matrix m(total, total);
            for (int j = 0; j < total; ++j) {
                auto dg = decode_index(dims, j);
                int e = 0, seen = 0;
                for (size_t v = 0; v < factors.size(); ++v) {
                    int d = factors[v]->degree(dg[v]);
                    e += d + seen * d;
                    seen += d;
                }
                m.add(j, j, sign_scalar(e & 1));
            }
            m.normalize(F);
            r.to_dual[to_string(t)] = std::move(m);
        }
    auto cm = cobar_map(*r.tb.cobar, *r.k2.cdual, [&](const Tree& t) { return r.to_dual.at(to_string(t)); });
    r.map.assign(N + 1, Matrix());
    // iso is a signed permutation, so its inverse is its transpose
    for (int n = 1; n <= N; ++n) r.map[n] = mul(F, transpose(r.k2.iso[n]), cm[n]);
    return r;
}

DualityReport verify_kk(OperadPtr p) {
    const Field& F = p->field();
    DualityReport rep;
    rep.name = p->name;
    rep.max_arity = p->max_arity();
    auto c = cb_to_kk(p);
    const Operad& kk = *c.k2.k;
    int N = rep.max_arity;
    for (auto* t : {&rep.p, &rep.bp, &rep.kp, &rep.kkp, &rep.hp, &rep.hkkp}) t->assign(N + 1, {});
    rep.homology_equal = true;
    for (int n = 1; n <= N; ++n) {
        rep.p[n] = p->term(n)->dims();
        rep.bp[n] = c.k1.bar->coop->term(n)->dims();
        rep.kp[n] = c.k1.k->term(n)->dims();
        rep.kkp[n] = kk.term(n)->dims();
        rep.hp[n] = homology_table(*p->term(n));
        rep.hkkp[n] = homology_table(*kk.term(n));
        if (rep.hp[n] != rep.hkkp[n]) {
            rep.homology_equal = false;
            rep.witnesses.push_back("homology differs in arity " + std::to_string(n));
        }
    }
    rep.kp_iso = operad_iso(*c.k1.k, *c.k1.cdual->op, c.k1.iso, "KP -> C(dual P)", rep.witnesses);
    rep.cb_to_kk_iso = operad_iso(*c.tb.cobar->op, kk, c.map, "CBP -> KKP", rep.witnesses);
    std::vector<Matrix> comp(N + 1);
    for (int n = 1; n <= N; ++n) comp[n] = mul(F, c.map[n], c.tb.theta[n]);
    rep.composite_iso = operad_iso(*c.tb.w->op, kk, comp, "WP -> KKP", rep.witnesses);
    return rep;
}

nlohmann::json to_json(const DualityReport& r) {
    auto tables = [&](const std::vector<DualityReport::Table>& v) {
        nlohmann::json out = nlohmann::json::object();
        for (int n = 1; n < static_cast<int>(v.size()); ++n) {
            nlohmann::json t = nlohmann::json::object();
            for (auto [d, k] : v[n]) t[std::to_string(d)] = k;
            out[std::to_string(n)] = t;
        }
        return out;
    };
    return {{"operad", r.name},
            {"max_arity", r.max_arity},
            {"dims", {{"P", tables(r.p)}, {"BP", tables(r.bp)}, {"KP", tables(r.kp)}, {"KKP", tables(r.kkp)}}},
            {"homology", {{"P", tables(r.hp)}, {"KKP", tables(r.hkkp)}}},
            {"kp_iso", r.kp_iso},
            {"cb_to_kk_iso", r.cb_to_kk_iso},
            {"composite_iso", r.composite_iso},
            {"homology_equal", r.homology_equal},
            {"ok", r.ok()},
            {"witnesses", r.witnesses}};
}

} // namespace opdual
