#include "opdual/trees.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <map>
#include <mutex>
#include <set>

namespace opdual {

namespace {

void check_laminar(int n, const std::vector<Mask>& cs) {
    Mask full = full_mask(n);
    if (n < 1 || n > 31) throw TreeError("arity out of range");
    if (n == 1) {
        if (!cs.empty()) throw TreeError("a one-leaf tree has no vertices");
        return;
    }
    bool root = false;
    for (size_t a = 0; a < cs.size(); ++a) {
        if ((cs[a] & ~full) != 0) throw TreeError("cluster outside the leaf set");
        if (popcount(cs[a]) < 2) throw TreeError("vertex with fewer than two inputs");
        if (cs[a] == full) root = true;
        for (size_t b = a + 1; b < cs.size(); ++b) {
            Mask i = cs[a] & cs[b];
            if (cs[a] == cs[b]) throw TreeError("duplicate cluster");
            if (i != 0 && i != cs[a] && i != cs[b]) throw TreeError("clusters not nested");
        }
    }
    if (!root) throw TreeError("missing root cluster");
}

} // namespace

Tree Tree::from_clusters(int n, std::vector<Mask> cs) {
    check_laminar(n, cs);
    Tree t;
    t.n_ = n;
    if (n == 1) return t;
    // Sort by size descending so parents precede children when scanning.
    std::sort(cs.begin(), cs.end(), [](Mask a, Mask b) {
        return popcount(a) != popcount(b) ? popcount(a) > popcount(b) : a < b;
    });
    std::vector<std::vector<Mask>> kids(cs.size());
    std::map<Mask, size_t> pos;
    for (size_t i = 0; i < cs.size(); ++i) pos[cs[i]] = i;
    for (size_t i = 1; i < cs.size(); ++i) {
        // Parent: smallest strict superset.
        size_t best = 0;
        for (size_t j = 0; j < i; ++j)
            if ((cs[i] & cs[j]) == cs[i] && popcount(cs[j]) <= popcount(cs[best])) best = j;
        kids[best].push_back(cs[i]);
    }
    std::function<void(size_t, int)> visit = [&](size_t i, int parent) {
        int v = static_cast<int>(t.clusters_.size());
        Mask c = cs[i];
        t.clusters_.push_back(c);
        t.parent_.push_back(parent);
        t.children_.emplace_back();
        Mask covered = 0;
        std::vector<Child> items;
        for (Mask k : kids[i]) {
            items.push_back(Child{false, -1, k});
            covered |= k;
        }
        for (Mask rest = c & ~covered; rest; rest &= rest - 1) {
            int l = min_leaf(rest);
            items.push_back(Child{true, l, leaf_bit(l)});
        }
        std::sort(items.begin(), items.end(), [](const Child& a, const Child& b) { return min_leaf(a.mask) < min_leaf(b.mask); });
        for (auto& it : items) {
            if (!it.leaf) {
                it.id = static_cast<int>(t.clusters_.size());
                visit(pos[it.mask], v);
            }
            t.children_[v].push_back(it);
        }
    };
    visit(0, -1);
    return t;
}

Tree Tree::corolla(int n) {
    if (n == 1) return from_clusters(1, {});
    return from_clusters(n, {full_mask(n)});
}

int Tree::find(Mask c) const {
    for (size_t i = 0; i < clusters_.size(); ++i)
        if (clusters_[i] == c) return static_cast<int>(i);
    return -1;
}

bool Tree::operator<(const Tree& o) const {
    if (n_ != o.n_) return n_ < o.n_;
    if (vertices() != o.vertices()) return vertices() < o.vertices();
    return clusters_ < o.clusters_;
}

Tree canonical_form(const RawTree& raw) {
    std::vector<Mask> cs;
    std::set<int> labels;
    std::function<Mask(const RawTree&)> walk = [&](const RawTree& r) -> Mask {
        if (r.children.empty()) {
            if (r.leaf <= 0) throw TreeError("malformed tree: empty vertex");
            if (!labels.insert(r.leaf).second) throw TreeError("malformed tree: duplicate label " + std::to_string(r.leaf));
            if (r.leaf > 31) throw TreeError("malformed tree: label too large");
            return leaf_bit(r.leaf);
        }
        if (r.children.size() < 2) throw TreeError("malformed tree: unary vertex");
        Mask m = 0;
        for (const auto& c : r.children) m |= walk(c);
        cs.push_back(m);
        return m;
    };
    walk(raw);
    int n = static_cast<int>(labels.size());
    if (*labels.rbegin() != n) throw TreeError("malformed tree: labels are not 1..n");
    return Tree::from_clusters(n, cs);
}

Tree parse_tree(const std::string& text) {
    size_t p = 0;
    auto skip = [&] {
        while (p < text.size() && std::isspace(static_cast<unsigned char>(text[p]))) ++p;
    };
    std::function<RawTree()> node = [&]() -> RawTree {
        skip();
        if (p >= text.size()) throw TreeError("malformed tree: unexpected end");
        RawTree r;
        if (text[p] == '(') {
            ++p;
            for (;;) {
                skip();
                if (p >= text.size()) throw TreeError("malformed tree: missing ')'");
                if (text[p] == ')') {
                    ++p;
                    break;
                }
                r.children.push_back(node());
            }
            if (r.children.empty()) throw TreeError("malformed tree: empty vertex");
            return r;
        }
        if (!std::isdigit(static_cast<unsigned char>(text[p]))) throw TreeError("malformed tree: unexpected character");
        int v = 0;
        while (p < text.size() && std::isdigit(static_cast<unsigned char>(text[p]))) {
            v = v * 10 + (text[p++] - '0');
            if (v > 1000) throw TreeError("malformed tree: label too large");
        }
        r.leaf = v;
        return r;
    };
    RawTree r = node();
    skip();
    if (p != text.size()) throw TreeError("malformed tree: trailing input");
    return canonical_form(r);
}

RawTree to_raw(const Tree& t) {
    if (t.vertices() == 0) return RawTree{1, {}};
    std::function<RawTree(int)> walk = [&](int v) {
        RawTree r;
        for (const auto& c : t.children(v)) r.children.push_back(c.leaf ? RawTree{c.id, {}} : walk(c.id));
        return r;
    };
    return walk(0);
}

std::string to_string(const Tree& t) {
    if (t.vertices() == 0) return "1";
    std::function<std::string(int)> walk = [&](int v) {
        std::string s = "(";
        bool first = true;
        for (const auto& c : t.children(v)) {
            if (!first) s += " ";
            first = false;
            s += c.leaf ? std::to_string(c.id) : walk(c.id);
        }
        return s + ")";
    };
    return walk(0);
}

namespace {

// All ways to split mask into at least two nonempty blocks; the block holding
// the lowest leaf comes first, the rest recursively.
void set_partitions(Mask m, std::vector<Mask>& cur, std::vector<std::vector<Mask>>& out) {
    if (m == 0) {
        out.push_back(cur);
        return;
    }
    Mask low = m & (~m + 1);
    Mask rest = m & ~low;
    // Enumerate subsets s of rest; block = low | s.
    for (Mask s = rest;; s = (s - 1) & rest) {
        cur.push_back(low | s);
        set_partitions(rest & ~s, cur, out);
        cur.pop_back();
        if (s == 0) break;
    }
}

const std::vector<std::vector<Mask>>& cluster_sets(Mask m, std::map<Mask, std::vector<std::vector<Mask>>>& memo) {
    auto it = memo.find(m);
    if (it != memo.end()) return it->second;
    std::vector<std::vector<Mask>> out;
    if (popcount(m) == 1) {
        out.push_back({});
    } else {
        std::vector<std::vector<Mask>> parts;
        std::vector<Mask> cur;
        set_partitions(m, cur, parts);
        for (const auto& part : parts) {
            if (part.size() < 2) continue;
            std::vector<std::vector<Mask>> acc{{m}};
            for (Mask b : part) {
                const auto& sub = cluster_sets(b, memo);
                std::vector<std::vector<Mask>> next;
                for (const auto& a : acc)
                    for (const auto& s : sub) {
                        auto c = a;
                        c.insert(c.end(), s.begin(), s.end());
                        next.push_back(std::move(c));
                    }
                acc = std::move(next);
            }
            for (auto& a : acc) out.push_back(std::move(a));
        }
    }
    return memo.emplace(m, std::move(out)).first->second;
}

} // namespace

const std::vector<Tree>& enumerate_trees(int n) {
    static std::mutex mu;
    static std::map<int, std::vector<Tree>> cache;
    if (n < 1) throw TreeError("invalid arity " + std::to_string(n));
    if (n > 9) throw TreeError("arity too large to enumerate: " + std::to_string(n));
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    std::vector<Tree> out;
    if (n == 1) {
        out.push_back(Tree::corolla(1));
    } else {
        std::map<Mask, std::vector<std::vector<Mask>>> memo;
        for (const auto& cs : cluster_sets(full_mask(n), memo)) out.push_back(Tree::from_clusters(n, cs));
    }
    std::sort(out.begin(), out.end());
    return cache.emplace(n, std::move(out)).first->second;
}

long tree_count(int n) { return static_cast<long>(enumerate_trees(n).size()); }

// Counts of leaf-labelled trees with all vertices of valence >= 2, from the
// set-partition recurrence t(n) = sum_k C(n-1,k-1) t(k) g(n-k), g = 2t, g(0)=g(1)=1.
std::vector<long> total_partition_counts(int N) {
    std::vector<std::vector<long>> C(N + 1, std::vector<long>(N + 1, 0));
    for (int i = 0; i <= N; ++i) {
        C[i][0] = 1;
        for (int j = 1; j <= i; ++j) C[i][j] = C[i - 1][j - 1] + (j <= i - 1 ? C[i - 1][j] : 0);
    }
    std::vector<long> t(N + 1, 0), g(N + 1, 0);
    g[0] = 1;
    t[1] = 1;
    g[1] = 1;
    for (int n = 2; n <= N; ++n) {
        for (int k = 1; k < n; ++k) t[n] += C[n - 1][k - 1] * t[k] * g[n - k];
        g[n] = 2 * t[n];
    }
    return t;
}

Perm identity_perm(int n) {
    Perm p(n);
    for (int i = 0; i < n; ++i) p[i] = i + 1;
    return p;
}

Perm compose_perm(const Perm& a, const Perm& b) {
    Perm p(b.size());
    for (size_t i = 0; i < b.size(); ++i) p[i] = a[b[i] - 1];
    return p;
}

Perm inverse_perm(const Perm& p) {
    Perm q(p.size());
    for (size_t i = 0; i < p.size(); ++i) q[p[i] - 1] = static_cast<int>(i) + 1;
    return q;
}

bool is_perm(const Perm& p) {
    std::vector<bool> seen(p.size(), false);
    for (int x : p) {
        if (x < 1 || x > static_cast<int>(p.size()) || seen[x - 1]) return false;
        seen[x - 1] = true;
    }
    return true;
}

int perm_sign(const Perm& p) {
    int inv = 0;
    for (size_t i = 0; i < p.size(); ++i)
        for (size_t j = i + 1; j < p.size(); ++j)
            if (p[i] > p[j]) ++inv;
    return inv & 1;
}

Mask apply_perm(const Perm& sigma, Mask m) {
    Mask out = 0;
    for (; m; m &= m - 1) out |= leaf_bit(sigma[min_leaf(m) - 1]);
    return out;
}

Transport transport(const Tree& t, const Perm& sigma) {
    if (static_cast<int>(sigma.size()) != t.arity() || !is_perm(sigma)) throw TreeError("relabel: not a bijection of the leaves");
    std::vector<Mask> cs;
    for (Mask c : t.clusters()) cs.push_back(apply_perm(sigma, c));
    Transport out;
    out.tree = Tree::from_clusters(t.arity(), cs);
    for (int v = 0; v < t.vertices(); ++v) {
        int w = out.tree.find(cs[v]);
        out.vertex.push_back(w);
        Perm in;
        const auto& nk = out.tree.children(w);
        for (const auto& c : t.children(v)) {
            Mask img = apply_perm(sigma, c.mask);
            for (size_t j = 0; j < nk.size(); ++j)
                if (nk[j].mask == img) in.push_back(static_cast<int>(j) + 1);
        }
        out.inputs.push_back(std::move(in));
    }
    return out;
}

Tree relabel(const Tree& t, const Perm& sigma) { return transport(t, sigma).tree; }

Mask graft_block(int i, int m) { return full_mask(m) << (i - 1); }

Tree graft(const Tree& t, int i, const Tree& u) {
    int n = t.arity(), m = u.arity();
    if (i < 1 || i > n) throw TreeError("graft: " + std::to_string(i) + " is not a leaf");
    Mask block = graft_block(i, m);
    Mask below = full_mask(i - 1);
    auto lift = [&](Mask c) {
        Mask out = c & below;
        if (c & leaf_bit(i)) out |= block;
        Mask above = c & ~full_mask(i);
        out |= above << (m - 1);
        return out;
    };
    std::vector<Mask> cs;
    for (Mask c : t.clusters()) cs.push_back(lift(c));
    for (Mask c : u.clusters()) cs.push_back(c << (i - 1));
    return Tree::from_clusters(n + m - 1, cs);
}

Tree contract_edge(const Tree& t, int v) {
    if (v < 1 || v >= t.vertices()) throw TreeError("contract_edge: not an internal edge");
    std::vector<Mask> cs = t.clusters();
    cs.erase(cs.begin() + v);
    return Tree::from_clusters(t.arity(), cs);
}

std::vector<Expansion> expansions(const Tree& t) {
    std::vector<Expansion> out;
    for (int v = 0; v < t.vertices(); ++v) {
        const auto& ch = t.children(v);
        int k = static_cast<int>(ch.size());
        if (k < 3) continue;
        for (unsigned s = 1; s + 1 < (1u << k); ++s) {
            if (popcount(s) < 2) continue;
            Mask c = 0;
            for (int j = 0; j < k; ++j)
                if (s & (1u << j)) c |= ch[j].mask;
            std::vector<Mask> cs = t.clusters();
            cs.push_back(c);
            Tree u = Tree::from_clusters(t.arity(), cs);
            int e = u.find(c);
            out.push_back(Expansion{std::move(u), e});
        }
    }
    std::sort(out.begin(), out.end(), [](const Expansion& a, const Expansion& b) { return a.tree < b.tree; });
    return out;
}

bool leq(const Tree& u, const Tree& t) {
    if (u.arity() != t.arity()) throw TreeError("trees over different leaf sets");
    for (Mask c : u.clusters())
        if (!t.has_cluster(c)) return false;
    return true;
}

std::vector<Mask> clusters_at(const Tree& t, const Tree& u, int w) {
    Mask cw = u.cluster(w);
    std::vector<Mask> out;
    for (Mask d : t.clusters()) {
        if ((d & cw) != d) continue;
        bool inside = false;
        for (const auto& c : u.children(w))
            if (!c.leaf && (d & c.mask) == d) inside = true;
        if (!inside) out.push_back(d);
    }
    return out;
}

std::optional<std::vector<Tree>> fragments(const Tree& t, const Tree& u) {
    if (!leq(u, t)) return std::nullopt;
    std::vector<Tree> out;
    for (int w = 0; w < u.vertices(); ++w) {
        const auto& ch = u.children(w);
        std::vector<Mask> cs;
        for (Mask d : clusters_at(t, u, w)) {
            Mask f = 0;
            for (size_t j = 0; j < ch.size(); ++j)
                if ((ch[j].mask & d) == ch[j].mask) f |= leaf_bit(static_cast<int>(j) + 1);
            cs.push_back(f);
        }
        out.push_back(Tree::from_clusters(static_cast<int>(ch.size()), cs));
    }
    return out;
}

} // namespace opdual
