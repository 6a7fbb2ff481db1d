#pragma once

#include "opdual/chain.hpp"
#include "opdual/trees.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <tuple>
#include <vector>

namespace opdual {

struct OperadError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Arity-indexed chain complexes 1..N with a covariant action: act(n, sigma)
// sends input j to sigma(j). Only adjacent transpositions are stored.
class SymSeq {
public:
    SymSeq() = default;
    // Unit in arity 1 and zero complexes elsewhere.
    SymSeq(const Field& F, int N);

    const Field& field() const { return F_; }
    int max_arity() const { return N_; }
    const CxPtr& term(int n) const;
    void set_term(int n, CxPtr c);
    // Image of the transposition (k k+1), 1 <= k < n.
    const Matrix& s(int n, int k) const { return s_[n][k - 1]; }
    void set_s(int n, int k, Matrix m);
    Matrix act(int n, const Perm& sigma) const;

    // Empty when the transpositions are chain automorphisms satisfying the
    // Coxeter relations; otherwise a list of failures.
    std::vector<std::string> check() const;

private:
    Field F_;
    int N_ = 0;
    std::vector<CxPtr> terms_;
    std::vector<std::vector<Matrix>> s_;
    struct Cache {
        std::mutex mu;
        std::map<std::pair<int, Perm>, Matrix> act;
        std::map<std::string, CxPtr> tensors;
    };
    friend CxPtr tree_tensor(const SymSeq& a, const Tree& t);
    std::shared_ptr<Cache> cache_ = std::make_shared<Cache>();
};

using CircKey = std::tuple<int, int, int>;  // (m, n, i)

// Per-object memo of tree-level structure maps; copies start empty.
struct TreeMemo {
    TreeMemo() = default;
    TreeMemo(const TreeMemo&) {}
    TreeMemo& operator=(const TreeMemo&) {
        std::lock_guard<std::mutex> lock(mu);
        maps.clear();
        return *this;
    }
    std::mutex mu;
    std::map<std::string, std::shared_ptr<const Matrix>> maps;
};

struct Operad {
    std::string name;
    SymSeq seq;
    // circ_i : term(m) (x) term(n) -> term(m+n-1), tensor basis a * dim(n) + b.
    std::map<CircKey, Matrix> circ;
    mutable TreeMemo memo;

    const Field& field() const { return seq.field(); }
    int max_arity() const { return seq.max_arity(); }
    const CxPtr& term(int n) const { return seq.term(n); }
    const Matrix& circ_at(int m, int n, int i) const;
};

struct Cooperad {
    std::string name;
    SymSeq seq;
    // cocirc_i : term(m+n-1) -> term(m) (x) term(n).
    std::map<CircKey, Matrix> cocirc;
    mutable TreeMemo memo;

    const Field& field() const { return seq.field(); }
    int max_arity() const { return seq.max_arity(); }
    const CxPtr& term(int n) const { return seq.term(n); }
    const Matrix& cocirc_at(int m, int n, int i) const;
};

using OperadPtr = std::shared_ptr<const Operad>;
using CooperadPtr = std::shared_ptr<const Cooperad>;

// Fills every unit composition (m = 1 or n = 1) with the identity.
void add_unit_circs(Operad& p);
void add_unit_cocircs(Cooperad& q);

OperadPtr builtin_operad(const std::string& name, const Field& F, int N);
OperadPtr trivial_operad(const SymSeq& a, const std::string& name = "trivial");
OperadPtr free_operad(const SymSeq& a, int N, const std::string& name = "free");
enum class TruncMode { AtMost, Exactly };
OperadPtr truncate(const Operad& p, int n, TruncMode mode);

// Symmetric sequence built from chain complexes with a(1) forced to the unit.
SymSeq symseq_from_terms(const Field& F, int N, const std::map<int, ChainComplex>& terms);
SymSeq shift_symseq(const SymSeq& a, int s);
SymSeq dual_symseq(const SymSeq& a);

// Block relabeling for equivariance: the permutation of the labels of
// x o_i y induced by sigma acting on x (arities m, n).
Perm block_expand(const Perm& sigma, int i, int n);
// id o_i rho.
Perm block_insert(int m, int i, const Perm& rho);

// ---- tree tensors -------------------------------------------------------

// term(valence v) over vertices in tree order.
std::vector<CxPtr> tree_factors(const SymSeq& a, const Tree& t);
CxPtr tree_tensor(const SymSeq& a, const Tree& t);

// Koszul-signed reordering of tensor factors: new factor j is old factor order[j].
Matrix permute_factors(const Field& F, const std::vector<CxPtr>& factors, const std::vector<int>& order);
// a(t) -> a(sigma_* t).
Matrix transport_map(const SymSeq& a, const Tree& t, const Perm& sigma);
// For each vertex of t o_i u, its index in the list (vertices of t, then of u).
std::vector<int> graft_vertex_order(const Tree& t, int i, const Tree& u);
// a(t) (x) a(u) -> a(t o_i u), a reordering of factors.
Matrix graft_tensor_map(const SymSeq& a, const Tree& t, int i, const Tree& u);

// p(T) -> p(n), composing along the tree.
const Matrix& compose_along_tree(const Operad& p, const Tree& t);
Matrix kron_all(const Field& F, const std::vector<Matrix>& ms);
std::vector<int> decode_index(const std::vector<int>& dims, int idx);
int encode_index(const std::vector<int>& dims, const std::vector<int>& digits);
// p(T) -> p(U) for U <= T.
Matrix contract_map(const Operad& p, const Tree& t, const Tree& u);
// q(U) -> q(T) for U <= T, the dual of contract_map.
Matrix expand_map(const Cooperad& q, const Tree& u, const Tree& t);
// q(n) -> q(T), iterated decomposition.
Matrix decompose_along_tree(const Cooperad& q, const Tree& t);

// ---- axioms -------------------------------------------------------------

std::vector<std::string> check_operad_axioms(const Operad& p, int N = -1);
std::vector<std::string> check_cooperad_axioms(const Cooperad& q, int N = -1);
bool is_operad_map(const Operad& p, const Operad& q, const std::vector<Matrix>& f, std::string* witness = nullptr);
bool is_cooperad_map(const Cooperad& p, const Cooperad& q, const std::vector<Matrix>& f,
                     std::string* witness = nullptr);
// Each f[n] is a Sigma-equivariant chain map term(n) -> term(n).
bool is_symseq_map(const SymSeq& a, const SymSeq& b, const std::vector<Matrix>& f, std::string* witness = nullptr);

CooperadPtr dualize(const Operad& p);
OperadPtr dualize(const Cooperad& q);
// Canonical double-dual isomorphisms per arity.
std::vector<Matrix> double_dual_maps(const SymSeq& a);

// ---- pre-cooperads ------------------------------------------------------

// Tree-indexed family with expansion maps along covers, relabelings and
// grafting multiplications. General morphisms are composites of covers.
class PreCooperad {
public:
    virtual ~PreCooperad() = default;
    virtual const Field& field() const = 0;
    virtual int max_arity() const = 0;
    virtual std::string name() const = 0;
    virtual CxPtr at(const Tree& t) const = 0;
    // Q(t) -> Q(s) for a cover t < s.
    virtual Matrix cover_map(const Tree& t, const Tree& s) const = 0;
    // Q(t) -> Q(sigma_* t).
    virtual Matrix relabel_map(const Tree& t, const Perm& sigma) const = 0;
    // Q(t) (x) Q(u) -> Q(t o_i u).
    virtual Matrix m(const Tree& t, int i, const Tree& u) const = 0;

    // Q(t) -> Q(s) for t <= s, composed along covers and memoized.
    Matrix expand_to(const Tree& t, const Tree& s) const;

private:
    mutable std::mutex mu_;
    mutable std::map<std::pair<std::string, std::string>, Matrix> expand_cache_;
};

using PreCooperadPtr = std::shared_ptr<const PreCooperad>;

// Q(T) = tensor of q(valence) over vertices; every m an isomorphism.
PreCooperadPtr extend_cooperad(CooperadPtr q);
// Q(T) = dual(p(T)); expansions are duals of contractions.
PreCooperadPtr dual_precooperad(OperadPtr p);
// A copy of q whose m at (t, i, u) is replaced by zero.
PreCooperadPtr corrupt_precooperad(PreCooperadPtr q, const Tree& t, int i, const Tree& u);

// Tree-indexed family without multiplications (a functor on trees).
class TreeFamily {
public:
    virtual ~TreeFamily() = default;
    virtual const Field& field() const = 0;
    virtual int max_arity() const = 0;
    virtual CxPtr at(const Tree& t) const = 0;
    virtual Matrix cover_map(const Tree& t, const Tree& s) const = 0;
    virtual Matrix relabel_map(const Tree& t, const Perm& sigma) const = 0;
};
using TreeFamilyPtr = std::shared_ptr<const TreeFamily>;

// A symmetric sequence placed on corollas, zero elsewhere.
TreeFamilyPtr corolla_family(const SymSeq& a);
// The underlying family of a pre-cooperad.
TreeFamilyPtr family_of(PreCooperadPtr q);

// Free pre-cooperad: F A(T) = sum over U <= T of tensor over u of A(T_u).
class FreePreCooperad : public PreCooperad {
public:
    FreePreCooperad(TreeFamilyPtr a, std::string name = "free");
    const Field& field() const override { return a_->field(); }
    int max_arity() const override { return a_->max_arity(); }
    std::string name() const override { return name_; }
    CxPtr at(const Tree& t) const override;
    Matrix cover_map(const Tree& t, const Tree& s) const override;
    Matrix relabel_map(const Tree& t, const Perm& sigma) const override;
    Matrix m(const Tree& t, int i, const Tree& u) const override;

    struct Summand {
        Tree u;
        int offset;
        std::vector<Tree> frags;
    };
    const std::vector<Summand>& summands(const Tree& t) const;
    // Unit A(T) -> F A(T) (the U = corolla summand).
    Matrix unit(const Tree& t) const;
    const TreeFamilyPtr& base() const { return a_; }

private:
    struct Entry {
        CxPtr cx;
        std::vector<Summand> parts;
        std::map<std::string, int> where;
    };
    const Entry& entry(const Tree& t) const;
    TreeFamilyPtr a_;
    std::string name_;
    mutable std::mutex mu_;
    mutable std::map<std::string, std::shared_ptr<Entry>> cache_;
};

// Multiplication F F A(T) -> F A(T) forgetting the outer decomposition.
Matrix free_monad_mult(const FreePreCooperad& ffa, const FreePreCooperad& fa, const Tree& t);

struct QuasiReport {
    bool ok = true;
    std::vector<std::string> witnesses;
};
QuasiReport is_quasi_cooperad(const PreCooperad& q, int N);
// Functoriality of covers (all cover chains agree) and relabel compatibility.
std::vector<std::string> check_precooperad(const PreCooperad& q, int N);

// Sum over set partitions of {1..n} (blocks ordered by minimum) of
// a1(#blocks) (x) tensor of a0(block sizes).
ChainComplex dual_compose(const SymSeq& a1, const SymSeq& a0, int n);

} // namespace opdual
