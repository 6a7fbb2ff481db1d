#pragma once

#include "opdual/cubes.hpp"
#include "opdual/operads.hpp"

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace opdual {

// ---- diagrams over the contraction preorder -------------------------------

// A functor on a set of trees of one arity, ordered by contraction. For
// small <= big, a covariant diagram maps at(small) -> at(big) and a
// contravariant one at(big) -> at(small).
struct Diagram {
    std::vector<Tree> objects;
    std::function<CxPtr(const Tree&)> at;
    std::function<Matrix(const Tree& small, const Tree& big)> map;
    bool covariant = true;
};

// Pairs (small, big) of object indices: covers only, or every strict relation.
std::vector<std::pair<int, int>> relations(const std::vector<Tree>& objects, bool all);
// Throws OperadError naming a triple a < b < c whose two composites differ.
void check_diagram(const Field& F, const Diagram& d);

struct EngineSum {
    CxPtr total;
    std::vector<int> offsets;  // per object
};
struct CoendResult {
    EngineSum sum;  // sum over objects of weights (x) coeffs
    Cokernel q;
};
struct EndResult {
    EngineSum sum;  // sum over objects of hom(weights, coeffs)
    Kernel k;
};
// Weights covariant, coefficients contravariant.
CoendResult coend(const Field& F, const Diagram& weights, const Diagram& coeffs, bool all_relations = false);
// Weights and coefficients both covariant.
EndResult end(const Field& F, const Diagram& weights, const Diagram& coeffs, bool all_relations = false);

// Cube-valued covariant diagram whose cells with a 0 coordinate are faces
// coming from the object with those clusters removed.
struct CubeDiagram {
    std::vector<Tree> objects;
    std::function<CubePtr(const Tree&)> cube;
    Diagram diagram() const;
};

// cell of cube(t) = sign * (face inclusion of cell of cube(tree)), cell nondegenerate.
struct Face {
    Tree tree;
    Cell cell;
    Scalar sign;
};
Face reduce_cell(const CubeDiagram& cd, const Tree& t, const Cell& c);

// Sum over objects and nondegenerate cells (no coordinate 0) of a coefficient complex.
struct CellSum {
    struct Part {
        Tree tree;
        Cell cell;
        int cell_degree;
        int offset;
        CxPtr coeff;
    };
    CxPtr cx;
    std::vector<Part> parts;
    std::map<std::pair<std::string, Cell>, int> where;
    // Index of the part, or -1.
    int find(const Tree& t, const Cell& c) const;
    const Part& part_of(int basis_index) const;
};

// Closed forms: coend basis cell (x) coeff in degree |cell| + |y|; end basis
// coeff (x) cell^dual in degree |q| - |cell| (hom basis E_{q,cell}).
CellSum closed_coend(const Field& F, const CubeDiagram& cd, const Diagram& coeffs);
CellSum closed_end(const Field& F, const CubeDiagram& cd, const Diagram& coeffs);
// Total space of the engine -> closed coend (sends a relation to zero).
Matrix coend_reduction(const Field& F, const CubeDiagram& cd, const Diagram& coeffs, const CellSum& closed,
                       const EngineSum& sum);
// Closed end -> total space of the engine.
Matrix end_embedding(const Field& F, const CubeDiagram& cd, const Diagram& coeffs, const CellSum& closed,
                     const EngineSum& sum);

struct EngineComparison {
    bool ok = true;
    std::string detail;
};
// Closed form versus engine: the comparison map is a chain map and induces an
// isomorphism with the engine's quotient (coend) or kernel (end).
EngineComparison compare_coend(const Field& F, const CubeDiagram& cd, const Diagram& coeffs, bool all_relations = false);
EngineComparison compare_end(const Field& F, const CubeDiagram& cd, const Diagram& coeffs, bool all_relations = false);
// Cover-generated and all-relation engines give the same relation subspace.
EngineComparison compare_relation_sets(const Field& F, const Diagram& weights, const Diagram& coeffs, bool is_end);

// Relabeling of cube coordinates by sigma: cube(t) -> cube(sigma t).
ChainMap cube_relabel(const CubePtr& src, const CubePtr& tgt, const Perm& sigma);

// Blocks: when {i..i+n-1} is a cluster of g (arity m+n-1), g = t o_i u.
struct Degraft {
    Tree t;
    Tree u;
};
std::optional<Degraft> degraft(const Tree& g, int i, int n);

// Iterated multiplication of a pre-cooperad along v <= u:
// tensor over vertices w of v of Q(u_w) -> Q(u).
Matrix multiply_along(const PreCooperad& q, const Tree& u, const Tree& v);

// ---- bar, cobar, W ---------------------------------------------------------

struct BarResult {
    OperadPtr p;
    CooperadPtr coop;
    std::vector<CellSum> sums;  // per arity, 1..N
    std::vector<CubeDiagram> cubes;
    // Class of cell (x) y in BP(arity of t), with y a vector of p(t).
    SparseVec class_of(const Tree& t, const Cell& cell, const SparseVec& y) const;
    Diagram coeffs(int n) const;
};
using BarPtr = std::shared_ptr<const BarResult>;
BarPtr bar_construction(OperadPtr p);
// Cooperad map BP -> BP' induced by an operad map f.
std::vector<Matrix> bar_map(const BarResult& src, const BarResult& tgt, const std::vector<Matrix>& f);

struct CobarResult {
    PreCooperadPtr q;
    OperadPtr op;
    std::vector<CellSum> sums;
    std::vector<CubeDiagram> cubes;
    Diagram coeffs(int n) const;
    // Value on a cell of wbar(u) of an element of CQ(arity u).
    SparseVec evaluate(const SparseVec& phi, const Tree& u, const Cell& cell) const;
};
using CobarPtr = std::shared_ptr<const CobarResult>;
CobarPtr cobar_construction(PreCooperadPtr q);

struct WResult {
    OperadPtr p;
    OperadPtr op;
    std::vector<CellSum> sums;
    std::vector<CubeDiagram> cubes;
    SparseVec class_of(const Tree& t, const Cell& cell, const SparseVec& y) const;
    Diagram coeffs(int n) const;
};
using WPtr = std::shared_ptr<const WResult>;
WPtr w_construction(OperadPtr p);
// eta : WP -> P and zeta : P -> WP per arity (index 1..N).
std::vector<Matrix> w_eta(const WResult& w);
std::vector<Matrix> w_zeta(const WResult& w);

// theta : WP -> CBP with CBP = cobar(extend(bar(P))).
std::vector<Matrix> theta(const WResult& w, const BarResult& b, const CobarResult& cb);

// Omega Sigma a with the trivial structure, basis phi_a in degree |a|, d = -d_a.
OperadPtr omega_sigma(const SymSeq& a);
// epsilon : CB(trivial a) -> Omega Sigma a, projection onto the corolla terms.
std::vector<Matrix> epsilon_trivial(const BarResult& b, const CobarResult& cb, const Operad& os);
// r^# : a -> Omega Sigma a, a |-> -(-1)^{|a|} phi_a.
std::vector<Matrix> r_sharp(const SymSeq& a);

// Builds everything for the comparison WP -> CBP in one go.
struct ThetaBundle {
    WPtr w;
    BarPtr bar;
    CobarPtr cobar;
    std::vector<Matrix> theta;
};
ThetaBundle theta_bundle(OperadPtr p);

// Cobar of a pre-cooperad map f : Q -> Q', applied tree by tree.
std::vector<Matrix> cobar_map(const CobarResult& src, const CobarResult& tgt,
                              const std::function<Matrix(const Tree&)>& f);

// ---- maps of pre-cooperads -------------------------------------------------

// Per-tree matrices keyed by to_string(tree).
using PreMap = std::map<std::string, Matrix>;

// Chain maps compatible with covers, relabelings and every m up to arity N.
bool is_precooperad_map(const PreCooperad& a, const PreCooperad& b, const PreMap& f, int N,
                        std::string* witness = nullptr);
// The map of extended cooperads induced by a cooperad map.
PreMap extend_map(const Field& F, const std::vector<Matrix>& f, int N);
PreMap identity_premap(const PreCooperad& q, int N);
PreMap zero_premap(const PreCooperad& a, const PreCooperad& b, int N);
// Random map a -> b, solved arity by arity (identity in arity 1). Lower-arity
// choices that do not extend are redrawn; the last resort is the choice with
// no kernel component. Throws OperadError if even that fails.
PreMap random_precooperad_map(const PreCooperad& a, const PreCooperad& b, int N, unsigned seed);

// ---- the left adjoint of cobar ----------------------------------------------

// BBP(T) = coend over all U of wbar_family(T, U) (x) P(U), the weight being
// zero unless U <= T.
class BBar : public PreCooperad {
public:
    explicit BBar(OperadPtr p);
    const Field& field() const override { return p_->field(); }
    int max_arity() const override { return p_->max_arity(); }
    std::string name() const override { return "bbar(" + p_->name + ")"; }
    CxPtr at(const Tree& t) const override;
    Matrix cover_map(const Tree& t, const Tree& s) const override;
    Matrix relabel_map(const Tree& t, const Perm& sigma) const override;
    Matrix m(const Tree& t, int i, const Tree& u) const override;

    struct Entry {
        std::vector<Tree> objects;  // every tree of the arity; weights vanish unless U <= T
        std::map<std::string, int> where;
        CoendResult co;
    };
    const Entry& entry(const Tree& t) const;
    const OperadPtr& base() const { return p_; }
    CubePtr weight(const Tree& t, const Tree& u) const;
    // m on representatives: total(t) (x) total(u) -> total(t o_i u).
    Matrix m_total(const Tree& t, int i, const Tree& u) const;
    // Class of cell (x) y with the cell in wbar_family(t, u) and y in P(u).
    SparseVec class_of(const Tree& t, const Tree& u, int cell, const SparseVec& y) const;

private:
    OperadPtr p_;
    mutable std::mutex mu_;
    mutable std::map<std::string, std::shared_ptr<Entry>> cache_;
};
using BBarPtr = std::shared_ptr<const BBar>;

// phi^# : BBP -> Q for an operad map phi : P -> CQ. Throws OperadError
// when phi is not an operad map.
PreMap transpose_to_precooperad(const BBar& bb, const CobarResult& cq, const std::vector<Matrix>& phi);
// psi^# : P -> CQ for a pre-cooperad map psi : BBP -> Q. Throws OperadError
// when psi is not a map of pre-cooperads.
std::vector<Matrix> transpose_to_operad(const BBar& bb, const CobarResult& cq, const PreMap& psi);

// ---- co-W ---------------------------------------------------------------------

// W^cQ(T) = end over U >= T of hom(rel_delta(U, T), Q(U)). An expansion
// T < S restricts to U >= S with the new coordinate at 1.
class CoW : public PreCooperad {
public:
    explicit CoW(PreCooperadPtr q);
    const Field& field() const override { return q_->field(); }
    int max_arity() const override { return q_->max_arity(); }
    std::string name() const override { return "coW(" + q_->name() + ")"; }
    CxPtr at(const Tree& t) const override;
    Matrix cover_map(const Tree& t, const Tree& s) const override;
    Matrix relabel_map(const Tree& t, const Perm& sigma) const override;
    Matrix m(const Tree& t, int i, const Tree& u) const override;

    const CellSum& sum(const Tree& t) const;
    CubeDiagram cubes(const Tree& t) const;
    Diagram coeffs(const Tree& t) const;
    const PreCooperadPtr& base() const { return q_; }

private:
    PreCooperadPtr q_;
    mutable std::mutex mu_;
    mutable std::map<std::string, std::shared_ptr<CellSum>> cache_;
};
using CoWPtr = std::shared_ptr<const CoW>;

// eta* : Q -> W^cQ and zeta* : W^cQ -> Q (evaluation at U = T).
PreMap cow_eta(const CoW& w, int N);
PreMap cow_zeta(const CoW& w, int N);

// theta* : extend(B(CQ)) -> W^cQ.
struct ThetaStar {
    CobarPtr cobar;
    BarPtr bar;              // B(CQ)
    PreCooperadPtr bcq;      // extend(B(CQ))
    CoWPtr cow;
    PreMap map;
    std::vector<Matrix> corolla;  // theta* on corollas, per arity
};
ThetaStar theta_star(PreCooperadPtr q);
// zeta* theta* on corollas: evaluation of the corolla component at the corolla,
// with sign -(-1)^{|phi|}.
Matrix corolla_evaluation(const ThetaStar& ts, int n);

} // namespace opdual
