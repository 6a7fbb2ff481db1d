#include "opdual/cubes.hpp"

#include <algorithm>
#include <mutex>
#include <tuple>
#include <sstream>

namespace opdual {

namespace {

struct FactorData {
    std::vector<Cell> cells;
    CxPtr cx;
};

void enumerate_cells(int n, bool reduced, Cell& cur, std::vector<Cell>& out) {
    int k = static_cast<int>(cur.size());
    if (k == n) {
        out.push_back(cur);
        return;
    }
    for (std::uint8_t v : {kZero, kOne, kStar}) {
        if (reduced && (v == kOne || (k == 0 && v != kStar))) continue;
        cur.push_back(v);
        enumerate_cells(n, reduced, cur, out);
        cur.pop_back();
    }
}

const FactorData& factor_data(const Field& F, int n, bool reduced) {
    static std::mutex mu;
    static std::map<std::tuple<long, int, bool>, FactorData> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_tuple(F.characteristic(), n, reduced);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    FactorData fd;
    Cell cur;
    enumerate_cells(n, reduced, cur, fd.cells);
    std::map<Cell, int> idx;
    for (size_t i = 0; i < fd.cells.size(); ++i) idx[fd.cells[i]] = static_cast<int>(i);
    int m = static_cast<int>(fd.cells.size());
    std::vector<int> deg(m);
    Matrix d(m, m);
    for (int j = 0; j < m; ++j) {
        const Cell& c = fd.cells[j];
        int stars = 0;
        for (int k = 0; k < n; ++k) {
            if (c[k] != kStar) continue;
            Scalar s = sign_scalar(stars);
            ++stars;
            Cell face = c;
            face[k] = kOne;
            auto f1 = idx.find(face);
            if (f1 != idx.end()) d.add(f1->second, j, s);
            face[k] = kZero;
            auto f0 = idx.find(face);
            if (f0 != idx.end()) d.add(f0->second, j, -s);
        }
        deg[j] = stars;
    }
    fd.cx = share(ChainComplex(F, std::move(deg), std::move(d)));
    return cache.emplace(key, std::move(fd)).first->second;
}

std::string factors_key(const Field& F, const std::vector<CubeFactor>& fs) {
    std::ostringstream os;
    os << F.characteristic();
    for (const auto& f : fs) {
        os << (f.reduced ? "|r" : "|f");
        for (Mask k : f.keys) os << ',' << k;
    }
    return os.str();
}

CubePtr cached_cube(const Field& F, std::vector<CubeFactor> fs) {
    static std::mutex mu;
    static std::map<std::string, CubePtr> cache;
    std::string key = factors_key(F, fs);
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }
    auto c = std::make_shared<const Cube>(F, std::move(fs));
    std::lock_guard<std::mutex> lock(mu);
    return cache.emplace(key, c).first->second;
}

std::vector<Mask> internal_keys(const Tree& t) {
    const auto& cs = t.clusters();
    return cs.empty() ? std::vector<Mask>{} : std::vector<Mask>(cs.begin() + 1, cs.end());
}

} // namespace

Cube::Cube(const Field& F, std::vector<CubeFactor> factors) : factors_(std::move(factors)) {
    ChainComplex total = ChainComplex::unit(F, 0);
    cells_.push_back({});
    for (const auto& f : factors_) {
        offset_.push_back(static_cast<int>(keys_.size()));
        keys_.insert(keys_.end(), f.keys.begin(), f.keys.end());
        const auto& fd = factor_data(F, static_cast<int>(f.keys.size()), f.reduced);
        total = tensor(total, *fd.cx);
        std::vector<Cell> next;
        next.reserve(cells_.size() * fd.cells.size());
        for (const auto& a : cells_)
            for (const auto& b : fd.cells) {
                Cell c = a;
                c.insert(c.end(), b.begin(), b.end());
                next.push_back(std::move(c));
            }
        cells_ = std::move(next);
    }
    for (size_t i = 0; i < cells_.size(); ++i) index_[cells_[i]] = static_cast<int>(i);
    cx_ = share(std::move(total));
}

Cube Cube::zero(const Field& F) {
    Cube c(F, {});
    c.zero_ = true;
    c.cells_.clear();
    c.index_.clear();
    c.cx_ = share(ChainComplex::zero(F));
    return c;
}

int Cube::index(const Cell& c) const {
    auto it = index_.find(c);
    return it == index_.end() ? -1 : it->second;
}

std::string cell_string(const Cube& c, int i) {
    std::string s;
    const Cell& x = c.cell(i);
    for (size_t f = 0; f < c.factors().size(); ++f) {
        if (f) s += '|';
        int off = c.factor_offset(static_cast<int>(f));
        for (size_t k = 0; k < c.factors()[f].keys.size(); ++k) s += "01*"[x[off + k]];
    }
    return s;
}

ChainMap cell_map(const CubePtr& src, const CubePtr& tgt, const std::vector<CoordRule>& rules, bool check) {
    const Field& F = src->cx()->field();
    int ns = src->coords();
    if (static_cast<int>(rules.size()) != tgt->coords()) throw ChainError("cell_map: one rule per target coordinate");
    std::vector<int> pos(ns, -1);
    int order = 0;
    auto use = [&](int s) {
        if (s < 0 || s >= ns || pos[s] >= 0) throw ChainError("cell_map: source coordinate used twice or out of range");
        pos[s] = order++;
    };
    for (const auto& r : rules) {
        if (r.kind == CoordRule::Proj || r.kind == CoordRule::R) use(r.a);
        if (r.kind == CoordRule::H) {
            use(r.a);
            use(r.b);
        }
    }
    if (order != ns) throw ChainError("cell_map: unused source coordinate");
    Matrix m(tgt->dim(), src->dim());
    if (src->is_zero() || tgt->is_zero()) return ChainMap{src->cx(), tgt->cx(), 0, std::move(m)};
    Cell out(rules.size());
    std::vector<int> stars;
    for (int j = 0; j < src->dim(); ++j) {
        const Cell& x = src->cell(j);
        stars.clear();
        for (int s = 0; s < ns; ++s)
            if (x[s] == kStar) stars.push_back(pos[s]);
        int inv = 0;
        for (size_t a = 0; a < stars.size(); ++a)
            for (size_t b = a + 1; b < stars.size(); ++b)
                if (stars[a] > stars[b]) ++inv;
        int sign = inv;
        bool dead = false;
        for (size_t t = 0; t < rules.size() && !dead; ++t) {
            const auto& r = rules[t];
            switch (r.kind) {
            case CoordRule::Proj:
                out[t] = x[r.a];
                break;
            case CoordRule::Zero:
                out[t] = kZero;
                break;
            case CoordRule::One:
                out[t] = kOne;
                break;
            case CoordRule::R:
                if (x[r.a] == kStar) {
                    out[t] = kStar;
                    ++sign;
                } else {
                    out[t] = x[r.a] == kZero ? kOne : kZero;
                }
                break;
            case CoordRule::H: {
                auto p = x[r.a], q = x[r.b];
                if (p != kStar && q != kStar) {
                    out[t] = (p == kOne && q == kZero) ? kOne : kZero;
                } else if (p == kStar && q == kZero) {
                    out[t] = kStar;
                } else if (p == kOne && q == kStar) {
                    out[t] = kStar;
                    ++sign;
                } else {
                    dead = true;
                }
                break;
            }
            }
        }
        if (dead) continue;
        int i = tgt->index(out);
        if (i >= 0) m.col(j)[i] = F.reduce(sign_scalar(sign));
    }
    return make_map(src->cx(), tgt->cx(), std::move(m), 0, check);
}

ChainMap key_map(const CubePtr& src, const CubePtr& tgt, bool check) {
    std::vector<CoordRule> rules;
    std::map<Mask, int> where;
    for (int s = 0; s < src->coords(); ++s)
        if (!where.emplace(src->keys()[s], s).second) throw ChainError("key_map: repeated source key");
    for (int t = 0; t < tgt->coords(); ++t) {
        auto it = where.find(tgt->keys()[t]);
        if (it == where.end())
            rules.push_back({CoordRule::Zero});
        else
            rules.push_back({CoordRule::Proj, it->second});
    }
    return cell_map(src, tgt, rules, check);
}

CubePtr delta_cube(const Field& F, const Tree& t) { return cached_cube(F, {CubeFactor{internal_keys(t), false}}); }

CubePtr wbar(const Field& F, const Tree& t) { return cached_cube(F, {CubeFactor{t.clusters(), true}}); }

CubePtr rel_delta(const Field& F, const Tree& u, const Tree& t) {
    if (!leq(t, u)) throw TreeError("rel_delta: first tree must lie above the second");
    std::vector<Mask> keys;
    for (Mask c : internal_keys(u))
        if (!t.has_cluster(c)) keys.push_back(c);
    return cached_cube(F, {CubeFactor{keys, false}});
}

CubePtr wbar_family(const Field& F, const Tree& t, const Tree& u) {
    if (!leq(u, t)) return std::make_shared<const Cube>(Cube::zero(F));
    std::vector<CubeFactor> fs;
    for (int w = 0; w < u.vertices(); ++w) {
        auto at = clusters_at(t, u, w);
        std::vector<std::pair<int, Mask>> ordered;
        for (Mask c : at) ordered.emplace_back(t.find(c), c);
        std::sort(ordered.begin(), ordered.end());
        CubeFactor f{{}, true};
        for (auto& [v, c] : ordered) f.keys.push_back(c);
        fs.push_back(std::move(f));
    }
    if (fs.empty()) fs.push_back(CubeFactor{{}, true});
    return cached_cube(F, std::move(fs));
}

CubePtr delta_wbar(const Field& F, const Tree& t, const Tree& u) {
    return cached_cube(F, {CubeFactor{internal_keys(t), false}, CubeFactor{u.clusters(), true}});
}

ChainMap face_inclusion(const Field& F, FaceKind kind, const Tree& a, const Tree& b, const Tree& c) {
    switch (kind) {
    case FaceKind::Delta:
        if (!leq(a, b)) throw TreeError("face_inclusion: relation fails");
        return key_map(delta_cube(F, a), delta_cube(F, b));
    case FaceKind::Wbar:
        if (!leq(a, b)) throw TreeError("face_inclusion: relation fails");
        return key_map(wbar(F, a), wbar(F, b));
    case FaceKind::RelI:
        if (!leq(a, b)) throw TreeError("face_inclusion: relation fails");
        return key_map(rel_delta(F, a, c), rel_delta(F, b, c));
    case FaceKind::RelJ:
        if (!leq(b, a)) throw TreeError("face_inclusion: relation fails");
        return key_map(rel_delta(F, c, a), rel_delta(F, c, b));
    case FaceKind::FamilyT:
        if (!leq(a, b) || !leq(c, a)) throw TreeError("face_inclusion: relation fails");
        return key_map(wbar_family(F, a, c), wbar_family(F, b, c));
    case FaceKind::FamilyU:
        if (!leq(a, b) || !leq(b, c)) throw TreeError("face_inclusion: relation fails");
        return key_map(wbar_family(F, c, a), wbar_family(F, c, b));
    }
    throw TreeError("face_inclusion: unknown kind");
}

namespace {

Mask lift_cluster(Mask c, int i, int m) {
    Mask out = c & full_mask(i - 1);
    if (c & leaf_bit(i)) out |= graft_block(i, m);
    out |= (c & ~full_mask(i)) << (m - 1);
    return out;
}

} // namespace

ChainMap graft_decompose(const Field& F, const Tree& t, int i, const Tree& u) {
    Tree g = graft(t, i, u);
    auto src = wbar(F, g);
    auto tgt = cached_cube(F, {CubeFactor{t.clusters(), true}, CubeFactor{u.clusters(), true}});
    std::vector<CoordRule> rules;
    int m = u.arity();
    for (Mask c : t.clusters()) rules.push_back({CoordRule::Proj, g.find(lift_cluster(c, i, m))});
    for (Mask c : u.clusters()) rules.push_back({CoordRule::Proj, g.find(c << (i - 1))});
    return cell_map(src, tgt, rules);
}

ChainMap graft_mu(const Field& F, const Tree& t, int i, const Tree& u) {
    Tree g = graft(t, i, u);
    auto src = cached_cube(F, {CubeFactor{internal_keys(t), false}, CubeFactor{internal_keys(u), false}});
    auto tgt = delta_cube(F, g);
    int m = u.arity();
    std::map<Mask, int> where;
    int s = 0;
    for (Mask c : internal_keys(t)) where[lift_cluster(c, i, m)] = s++;
    for (Mask c : internal_keys(u)) where[c << (i - 1)] = s++;
    std::vector<CoordRule> rules;
    for (Mask c : tgt->keys()) {
        auto it = where.find(c);
        if (it == where.end())
            rules.push_back({CoordRule::One});
        else
            rules.push_back({CoordRule::Proj, it->second});
    }
    return cell_map(src, tgt, rules);
}

CubePtr interval_cube(const Field& F) { return cached_cube(F, {CubeFactor{{1}, false}}); }

ChainMap h_map(const Field& F) {
    auto src = cached_cube(F, {CubeFactor{{1}, false}, CubeFactor{{2}, false}});
    return cell_map(src, interval_cube(F), {{CoordRule::H, 0, 1}});
}

ChainMap r_map(const Field& F) {
    auto h = interval_cube(F);
    return cell_map(h, h, {{CoordRule::R, 0}});
}

ChainMap theta_cells(const Field& F, const Tree& t, const Tree& u) {
    auto src = delta_wbar(F, t, u);
    auto tgt = wbar_family(F, t, u);
    if (tgt->is_zero()) return zero_map(src->cx(), tgt->cx());
    std::map<Mask, int> dpos, upos;
    auto ik = internal_keys(t);
    for (size_t k = 0; k < ik.size(); ++k) dpos[ik[k]] = static_cast<int>(k);
    int off = static_cast<int>(ik.size());
    for (int k = 0; k < u.vertices(); ++k) upos[u.cluster(k)] = off + k;
    std::vector<CoordRule> rules;
    Mask root = t.vertices() ? t.cluster(0) : 0;
    for (Mask d : tgt->keys()) {
        if (d == root)
            rules.push_back({CoordRule::R, upos.at(d)});
        else if (upos.count(d))
            rules.push_back({CoordRule::H, dpos.at(d), upos.at(d)});
        else
            rules.push_back({CoordRule::Proj, dpos.at(d)});
    }
    return cell_map(src, tgt, rules);
}

} // namespace opdual
