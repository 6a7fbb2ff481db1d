#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace opdual {

using Mask = std::uint32_t;

struct TreeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

inline Mask leaf_bit(int l) { return Mask(1) << (l - 1); }
inline Mask full_mask(int n) { return n >= 32 ? ~Mask(0) : (Mask(1) << n) - 1; }
inline int min_leaf(Mask m) { return __builtin_ctz(m) + 1; }
inline int popcount(Mask m) { return __builtin_popcount(m); }

// A rooted tree over leaves {1..n}, stored as its set of vertex clusters
// (leaf sets below each internal vertex). Clusters are kept in preorder with
// children visited by increasing minimum leaf; vertex v is clusters[v] and
// vertex 0 is the root. The internal edge below vertex v >= 1 is named v; the
// root edge is named 0.
class Tree {
public:
    struct Child {
        bool leaf;
        int id;  // leaf label or vertex index
        Mask mask;
    };

    Tree() = default;
    // Builds the canonical tree from any laminar family of clusters
    // (each of size >= 2, containing the full set when n >= 2).
    static Tree from_clusters(int n, std::vector<Mask> clusters);
    static Tree corolla(int n);

    int arity() const { return n_; }
    int vertices() const { return static_cast<int>(clusters_.size()); }
    int internal_edges() const { return vertices() > 0 ? vertices() - 1 : 0; }
    const std::vector<Mask>& clusters() const { return clusters_; }
    Mask cluster(int v) const { return clusters_[v]; }
    int parent(int v) const { return parent_[v]; }
    const std::vector<Child>& children(int v) const { return children_[v]; }
    int valence(int v) const { return static_cast<int>(children_[v].size()); }
    // Index of a cluster, or -1.
    int find(Mask c) const;
    bool has_cluster(Mask c) const { return find(c) >= 0; }

    bool operator==(const Tree& o) const { return n_ == o.n_ && clusters_ == o.clusters_; }
    bool operator!=(const Tree& o) const { return !(*this == o); }
    bool operator<(const Tree& o) const;

private:
    int n_ = 1;
    std::vector<Mask> clusters_;
    std::vector<int> parent_;
    std::vector<std::vector<Child>> children_;
};

// Nested presentation of a tree, possibly non-canonical.
struct RawTree {
    int leaf = 0;  // > 0 for a leaf
    std::vector<RawTree> children;
};

Tree canonical_form(const RawTree& raw);
Tree parse_tree(const std::string& text);
std::string to_string(const Tree& t);
RawTree to_raw(const Tree& t);

const std::vector<Tree>& enumerate_trees(int n);
// Count of trees over n leaves from the cached enumeration.
long tree_count(int n);
// Independent count from the total-partition recurrence, index 0..N.
std::vector<long> total_partition_counts(int N);

// sigma[l-1] is the new label of leaf l.
using Perm = std::vector<int>;
Perm identity_perm(int n);
Perm compose_perm(const Perm& a, const Perm& b);  // a after b
Perm inverse_perm(const Perm& p);
bool is_perm(const Perm& p);
int perm_sign(const Perm& p);
Mask apply_perm(const Perm& sigma, Mask m);

struct Transport {
    Tree tree;
    std::vector<int> vertex;          // old vertex -> new vertex
    std::vector<Perm> inputs;         // per old vertex: input position j -> position in the new vertex
};
Transport transport(const Tree& t, const Perm& sigma);
Tree relabel(const Tree& t, const Perm& sigma);

// Operadic insertion: leaves l < i keep their label, u's leaf j becomes
// i - 1 + j and leaves l > i of t shift up by arity(u) - 1.
Tree graft(const Tree& t, int i, const Tree& u);
Mask graft_block(int i, int m);

// Contracts the internal edge below vertex v (v >= 1).
Tree contract_edge(const Tree& t, int v);

struct Expansion {
    Tree tree;
    int edge;  // vertex of tree whose edge contracts back
};
std::vector<Expansion> expansions(const Tree& t);

// u <= t: every cluster of u is a cluster of t.
bool leq(const Tree& u, const Tree& t);

// For u <= t, the fragment of t at each vertex w of u, as a tree over the
// inputs of w (numbered in child order). nullopt when u is not <= t.
std::optional<std::vector<Tree>> fragments(const Tree& t, const Tree& u);

// Clusters of t lying at vertex w of u, i.e. inside cluster(w) and not inside
// any child cluster of w.
std::vector<Mask> clusters_at(const Tree& t, const Tree& u, int w);

} // namespace opdual
