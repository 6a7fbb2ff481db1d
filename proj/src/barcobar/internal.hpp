#pragma once

#include "opdual/barcobar.hpp"

#include <algorithm>

namespace opdual::detail {

inline Tree corolla_of(int n) { return n == 1 ? Tree() : Tree::corolla(n); }

inline Cell top_cell(const Cube& c) { return Cell(c.coords(), kStar); }

inline int top_index(const CubePtr& c) { return c->index(top_cell(*c)); }

inline int stars(const Cell& c) { return static_cast<int>(std::count(c.begin(), c.end(), kStar)); }

inline Perm transposition(int n, int k) {
    Perm s = identity_perm(n);
    std::swap(s[k - 1], s[k]);
    return s;
}

// Part indices grouped by tree, in part order.
std::vector<std::pair<Tree, std::vector<int>>> by_tree(const CellSum& cs);

// Signed-permutation action on a sum of cube cells tensor coefficients; the
// cube of a part over t is src_cube(t), its image lives in tgt_cube(sigma t).
Matrix relabel_sum(const Field& F, const CellSum& src, const CellSum& tgt,
                   const std::function<CubePtr(const Tree&)>& src_cube,
                   const std::function<CubePtr(const Tree&)>& tgt_cube, const Perm& sigma,
                   const std::function<Matrix(const Tree&)>& coeff_map);

// The cluster c of t seen in t o_i u (arity n of u).
Mask lift_cluster(Mask c, int i, int n);

// Splits a cell of a product cube into its factors.
std::vector<Cell> split_cell(const Cube& c, const Cell& cell);

// Block (r0, c0) += m.
void add_block(Matrix& out, int r0, int c0, const Matrix& m, const Scalar& s = 1);

} // namespace opdual::detail
