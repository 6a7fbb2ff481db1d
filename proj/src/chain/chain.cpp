#include "opdual/chain.hpp"

#include <algorithm>

namespace opdual {

namespace {

int parity(long x) { return static_cast<int>(((x % 2) + 2) % 2); }

} // namespace

ChainComplex::ChainComplex(const Field& F, std::vector<int> deg, Matrix d, std::vector<std::string> names,
                           bool check)
    : F_(F), deg_(std::move(deg)), d_(std::move(d)), names_(std::move(names)) {
    int n = dim();
    if (d_.rows() != n || d_.cols() != n) throw ChainError("boundary shape does not match basis");
    if (!names_.empty() && static_cast<int>(names_.size()) != n) throw ChainError("name count does not match basis");
    d_.normalize(F_);
    for (int j = 0; j < n; ++j)
        for (const auto& [i, v] : d_.col(j))
            if (deg_[i] != deg_[j] - 1) throw ChainError("boundary entry not of degree -1");
    if (check && !is_zero(F_, mul(F_, d_, d_))) throw ChainError("d^2 != 0");
}

ChainComplex ChainComplex::unit(const Field& F, int degree) { return ChainComplex(F, {degree}, Matrix(1, 1)); }

std::string ChainComplex::name(int i) const {
    if (!names_.empty()) return names_[i];
    return "e" + std::to_string(i);
}

std::vector<int> ChainComplex::basis_in_degree(int k) const {
    std::vector<int> out;
    for (int i = 0; i < dim(); ++i)
        if (deg_[i] == k) out.push_back(i);
    return out;
}

std::map<int, int> ChainComplex::dims() const {
    std::map<int, int> out;
    for (int k : deg_) ++out[k];
    return out;
}

Matrix ChainComplex::block(int k) const { return select(d_, basis_in_degree(k - 1), basis_in_degree(k)); }

std::string check_map(const ChainMap& f) {
    const auto& F = f.src->field();
    if (f.m.rows() != f.tgt->dim() || f.m.cols() != f.src->dim()) return "map shape mismatch";
    for (int j = 0; j < f.m.cols(); ++j)
        for (const auto& [i, v] : f.m.col(j))
            if (f.tgt->degree(i) != f.src->degree(j) + f.shift) return "map entry of wrong degree";
    Matrix lhs = mul(F, f.m, f.src->d());
    Matrix rhs = mul(F, f.tgt->d(), f.m);
    if (!equal(F, lhs, scaled(F, rhs, sign_scalar(f.shift)))) return "map does not commute with d";
    return "";
}

bool is_chain_map(const ChainMap& f) { return check_map(f).empty(); }

ChainMap make_map(CxPtr src, CxPtr tgt, Matrix m, int shift, bool check) {
    m.normalize(src->field());
    ChainMap f{std::move(src), std::move(tgt), shift, std::move(m)};
    if (check) {
        std::string err = check_map(f);
        if (!err.empty()) throw ChainError(err);
    }
    return f;
}

ChainMap identity_map(CxPtr a) {
    int n = a->dim();
    return ChainMap{a, a, 0, Matrix::identity(n)};
}

ChainMap zero_map(CxPtr src, CxPtr tgt, int shift) {
    Matrix m(tgt->dim(), src->dim());
    return ChainMap{std::move(src), std::move(tgt), shift, std::move(m)};
}

ChainMap compose(const ChainMap& g, const ChainMap& f) {
    if (f.tgt->dim() != g.src->dim()) throw ChainError("compose: shape mismatch");
    return ChainMap{f.src, g.tgt, f.shift + g.shift, mul(f.field(), g.m, f.m)};
}

ChainMap add(const ChainMap& f, const ChainMap& g, const Scalar& cg) {
    if (f.shift != g.shift) throw ChainError("add: degree mismatch");
    return ChainMap{f.src, f.tgt, f.shift, add(f.field(), f.m, g.m, cg)};
}

bool equal(const ChainMap& f, const ChainMap& g) {
    return f.shift == g.shift && equal(f.field(), f.m, g.m);
}

ChainComplex build_complex(const Field& F, const std::map<int, std::vector<std::string>>& basis,
                           const std::map<int, Matrix>& boundary) {
    std::vector<int> deg;
    std::vector<std::string> names;
    std::map<int, int> offset;
    for (const auto& [k, gens] : basis) {
        offset[k] = static_cast<int>(deg.size());
        for (const auto& g : gens) {
            deg.push_back(k);
            names.push_back(g);
        }
    }
    int n = static_cast<int>(deg.size());
    Matrix d(n, n);
    for (const auto& [k, dk] : boundary) {
        auto src = basis.find(k);
        auto tgt = basis.find(k - 1);
        int ns = src == basis.end() ? 0 : static_cast<int>(src->second.size());
        int nt = tgt == basis.end() ? 0 : static_cast<int>(tgt->second.size());
        if (dk.cols() != ns || dk.rows() != nt) throw ChainError("boundary d_" + std::to_string(k) + " has wrong shape");
        for (int j = 0; j < ns; ++j)
            for (const auto& [i, v] : dk.col(j)) d.add(offset[k - 1] + i, offset[k] + j, v);
    }
    return ChainComplex(F, std::move(deg), std::move(d), std::move(names));
}

std::vector<int> sum_offsets(const std::vector<ChainComplex>& parts) {
    std::vector<int> off;
    int n = 0;
    for (const auto& p : parts) {
        off.push_back(n);
        n += p.dim();
    }
    off.push_back(n);
    return off;
}

ChainComplex direct_sum(const std::vector<ChainComplex>& parts) {
    if (parts.empty()) return ChainComplex();
    const Field& F = parts.front().field();
    auto off = sum_offsets(parts);
    int n = off.back();
    std::vector<int> deg;
    std::vector<std::string> names;
    bool named = std::any_of(parts.begin(), parts.end(), [](const ChainComplex& c) { return c.has_names(); });
    Matrix d(n, n);
    for (size_t p = 0; p < parts.size(); ++p) {
        if (parts[p].field() != F) throw ChainError("direct_sum: field mismatch");
        for (int i = 0; i < parts[p].dim(); ++i) {
            deg.push_back(parts[p].degree(i));
            if (named) names.push_back(parts[p].name(i));
            for (const auto& [r, v] : parts[p].d().col(i)) d.col(off[p] + i)[off[p] + r] = v;
        }
    }
    return ChainComplex(F, std::move(deg), std::move(d), std::move(names), false);
}

ChainComplex tensor(const ChainComplex& a, const ChainComplex& b) {
    const Field& F = a.field();
    int na = a.dim(), nb = b.dim();
    std::vector<int> deg(static_cast<size_t>(na) * nb);
    Matrix d(na * nb, na * nb);
    for (int i = 0; i < na; ++i)
        for (int j = 0; j < nb; ++j) {
            int idx = i * nb + j;
            deg[idx] = a.degree(i) + b.degree(j);
            auto& col = d.col(idx);
            for (const auto& [k, v] : a.d().col(i)) col[k * nb + j] = v;
            Scalar s = sign_scalar(a.degree(i));
            for (const auto& [k, v] : b.d().col(j)) col[i * nb + k] = F.reduce(s * v);
        }
    return ChainComplex(F, std::move(deg), std::move(d), {}, false);
}

ChainComplex tensor_all(const Field& F, const std::vector<const ChainComplex*>& parts) {
    ChainComplex out = ChainComplex::unit(F, 0);
    for (const auto* p : parts) out = tensor(out, *p);
    return out;
}

ChainMap tensor(const ChainMap& f, const ChainMap& g, CxPtr src, CxPtr tgt) {
    const Field& F = f.field();
    if (!src) src = share(tensor(*f.src, *g.src));
    if (!tgt) tgt = share(tensor(*f.tgt, *g.tgt));
    int sa = f.src->dim(), sb = g.src->dim(), tb = g.tgt->dim();
    Matrix m(tgt->dim(), src->dim());
    for (int i = 0; i < sa; ++i) {
        Scalar s = sign_scalar(g.shift * parity(f.src->degree(i)));
        for (int j = 0; j < sb; ++j) {
            auto& col = m.col(i * sb + j);
            for (const auto& [k, x] : f.m.col(i))
                for (const auto& [l, y] : g.m.col(j)) {
                    Scalar v = F.reduce(s * x * y);
                    if (v != 0) col[k * tb + l] = v;
                }
        }
    }
    return ChainMap{src, tgt, f.shift + g.shift, std::move(m)};
}

ChainMap symmetry(CxPtr ab, const ChainComplex& a, const ChainComplex& b, CxPtr ba) {
    if (!ba) ba = share(tensor(b, a));
    int na = a.dim(), nb = b.dim();
    Matrix m(na * nb, na * nb);
    for (int i = 0; i < na; ++i)
        for (int j = 0; j < nb; ++j) m.col(i * nb + j)[j * na + i] = sign_scalar(a.degree(i) * b.degree(j));
    return ChainMap{std::move(ab), std::move(ba), 0, std::move(m)};
}

ChainComplex linear_dual(const ChainComplex& a) {
    const Field& F = a.field();
    int n = a.dim();
    std::vector<int> deg(n);
    std::vector<std::string> names;
    for (int i = 0; i < n; ++i) {
        deg[i] = -a.degree(i);
        if (a.has_names()) names.push_back(a.name(i) + "*");
    }
    Matrix d(n, n);
    for (int j = 0; j < n; ++j)
        for (const auto& [i, v] : a.d().col(j)) d.col(i)[j] = F.reduce(-sign_scalar(a.degree(i)) * v);
    return ChainComplex(F, std::move(deg), std::move(d), std::move(names), false);
}

ChainMap dual_map(const ChainMap& f, CxPtr dual_tgt, CxPtr dual_src) {
    const Field& F = f.field();
    Matrix m(f.src->dim(), f.tgt->dim());
    for (int j = 0; j < f.src->dim(); ++j)
        for (const auto& [k, v] : f.m.col(j)) m.col(k)[j] = F.reduce(sign_scalar(f.shift * parity(f.tgt->degree(k))) * v);
    return ChainMap{std::move(dual_tgt), std::move(dual_src), f.shift, std::move(m)};
}

ChainMap double_dual_map(CxPtr a, CxPtr dd) {
    if (!dd) dd = share(linear_dual(linear_dual(*a)));
    int n = a->dim();
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) m.col(i)[i] = sign_scalar(a->degree(i));
    return ChainMap{std::move(a), std::move(dd), 0, std::move(m)};
}

ChainMap pairing(const ChainComplex& a, const ChainComplex& b, CxPtr src, CxPtr tgt) {
    if (!src) src = share(tensor(linear_dual(a), linear_dual(b)));
    if (!tgt) tgt = share(linear_dual(tensor(a, b)));
    int na = a.dim(), nb = b.dim();
    Matrix m(na * nb, na * nb);
    for (int i = 0; i < na; ++i)
        for (int j = 0; j < nb; ++j) m.col(i * nb + j)[i * nb + j] = sign_scalar(a.degree(i) * b.degree(j));
    return ChainMap{std::move(src), std::move(tgt), 0, std::move(m)};
}

ChainComplex shift(const ChainComplex& a, int s) {
    std::vector<int> deg = a.degrees();
    for (int& k : deg) k += s;
    std::vector<std::string> names;
    if (a.has_names())
        for (int i = 0; i < a.dim(); ++i) names.push_back(a.name(i));
    return ChainComplex(a.field(), std::move(deg), scaled(a.field(), a.d(), sign_scalar(s)), std::move(names), false);
}

ChainComplex cone(const ChainMap& f) {
    if (f.shift != 0) throw ChainError("cone: map must have degree 0");
    const Field& F = f.field();
    int na = f.src->dim(), nb = f.tgt->dim();
    std::vector<int> deg(na + nb);
    Matrix d(na + nb, na + nb);
    for (int j = 0; j < na; ++j) {
        deg[j] = f.src->degree(j) + 1;
        for (const auto& [i, v] : f.src->d().col(j)) d.col(j)[i] = F.reduce(-v);
        for (const auto& [i, v] : f.m.col(j)) d.col(j)[na + i] = v;
    }
    for (int j = 0; j < nb; ++j) {
        deg[na + j] = f.tgt->degree(j);
        for (const auto& [i, v] : f.tgt->d().col(j)) d.col(na + j)[na + i] = v;
    }
    return ChainComplex(F, std::move(deg), std::move(d));
}

bool is_quasi_iso(const ChainMap& f) { return is_acyclic(cone(f)); }

ChainComplex hom(const ChainComplex& a, const ChainComplex& b) {
    const Field& F = a.field();
    int na = a.dim(), nb = b.dim();
    std::vector<int> deg(static_cast<size_t>(na) * nb);
    Matrix d(na * nb, na * nb);
    Matrix dat = transpose(a.d());
    for (int i = 0; i < nb; ++i)
        for (int j = 0; j < na; ++j) {
            int idx = i * na + j;
            deg[idx] = b.degree(i) - a.degree(j);
            Scalar s = -sign_scalar(parity(deg[idx]));
            auto& col = d.col(idx);
            for (const auto& [k, v] : b.d().col(i)) axpy(F, col, v, SparseVec{{k * na + j, Scalar(1)}});
            for (const auto& [l, v] : dat.col(j)) axpy(F, col, s * v, SparseVec{{i * na + l, Scalar(1)}});
        }
    return ChainComplex(F, std::move(deg), std::move(d));
}

std::map<int, int> homology_table(const ChainComplex& a) {
    const Field& F = a.field();
    std::map<int, int> dims = a.dims();
    std::map<int, int> rk;
    for (const auto& [k, n] : dims) {
        Echelon e(F, false);
        for (int i : a.basis_in_degree(k)) e.insert(a.d().col(i), i);
        rk[k] = e.rank();
    }
    std::map<int, int> out;
    for (const auto& [k, n] : dims) {
        int h = n - rk[k] - (rk.count(k + 1) ? rk[k + 1] : 0);
        if (h != 0) out[k] = h;
    }
    return out;
}

long euler(const std::map<int, int>& table) {
    long e = 0;
    for (const auto& [k, n] : table) e += (parity(k) ? -1L : 1L) * n;
    return e;
}

long euler(const ChainComplex& a) { return euler(a.dims()); }

bool is_acyclic(const ChainComplex& a) { return homology_table(a).empty(); }

Kernel subcomplex(CxPtr a, const std::vector<SparseVec>& span) {
    const Field& F = a->field();
    Echelon pick(F, false);
    std::vector<SparseVec> basis;
    for (const auto& v : span) {
        SparseVec w;
        axpy(F, w, 1, v);
        if (w.empty()) continue;
        if (pick.insert(w, 0)) basis.push_back(std::move(w));
    }
    int n = static_cast<int>(basis.size());
    Echelon coords(F, true);
    std::vector<int> deg(n);
    for (int j = 0; j < n; ++j) {
        deg[j] = a->degree(basis[j].begin()->first);
        for (const auto& [i, v] : basis[j])
            if (a->degree(i) != deg[j]) throw ChainError("subcomplex: inhomogeneous vector");
        coords.insert(basis[j], j);
    }
    Matrix d(n, n);
    for (int j = 0; j < n; ++j) {
        SparseVec combo;
        SparseVec rem = coords.reduce(apply(F, a->d(), basis[j]), &combo);
        if (!rem.empty()) throw ChainError("subcomplex: span not closed under d");
        d.col(j) = std::move(combo);
    }
    Matrix incl(a->dim(), n);
    for (int j = 0; j < n; ++j) incl.col(j) = basis[j];
    return Kernel{share(ChainComplex(F, std::move(deg), std::move(d))), std::move(incl)};
}

Cokernel quotient(CxPtr a, const std::vector<SparseVec>& span) {
    const Field& F = a->field();
    Echelon e(F, false);
    for (const auto& v : span) e.insert(v, 0);
    e.fully_reduce();
    const auto& piv = e.pivots();
    std::vector<int> keep;
    std::map<int, int> pos;
    for (int i = 0; i < a->dim(); ++i)
        if (!piv.count(i)) {
            pos[i] = static_cast<int>(keep.size());
            keep.push_back(i);
        }
    int n = static_cast<int>(keep.size());
    Matrix proj(n, a->dim());
    for (int k : keep) proj.col(k)[pos[k]] = 1;
    for (const auto& [p, r] : piv)
        for (const auto& [k, v] : r)
            if (k != p) proj.col(p)[pos.at(k)] = F.reduce(-v);
    Matrix section(a->dim(), n);
    std::vector<int> deg(n);
    std::vector<std::string> names;
    for (int j = 0; j < n; ++j) {
        section.col(j)[keep[j]] = 1;
        deg[j] = a->degree(keep[j]);
        if (a->has_names()) names.push_back(a->name(keep[j]));
    }
    Matrix pd = mul(F, proj, a->d());
    for (const auto& v : span)
        if (!apply(F, pd, v).empty()) throw ChainError("quotient: span not closed under d");
    Matrix d = mul(F, pd, section);
    return Cokernel{share(ChainComplex(F, std::move(deg), std::move(d), std::move(names))), std::move(proj),
                    std::move(section)};
}

Kernel kernel(const ChainMap& f) { return subcomplex(f.src, kernel_basis(f.field(), f.m)); }

Cokernel cokernel(const ChainMap& f) {
    std::vector<SparseVec> span;
    for (int j = 0; j < f.m.cols(); ++j)
        if (!f.m.col(j).empty()) span.push_back(f.m.col(j));
    return quotient(f.tgt, span);
}

KernelCokernel kernel_cokernel(const ChainMap& f) {
    if (f.shift != 0) throw ChainError("kernel_cokernel: map must have degree 0");
    return KernelCokernel{kernel(f), cokernel(f)};
}

} // namespace opdual
