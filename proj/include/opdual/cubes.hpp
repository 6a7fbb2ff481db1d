#pragma once

#include "opdual/chain.hpp"
#include "opdual/trees.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace opdual {

// Coordinate values of a cube cell.
enum : std::uint8_t { kZero = 0, kOne = 1, kStar = 2 };
using Cell = std::vector<std::uint8_t>;

// One tensor factor of a cube complex. Coordinates carry a cluster key so
// maps can match coordinates across trees. A reduced factor is the quotient
// where the first coordinate must be * and no coordinate may be 1; a reduced
// factor with no coordinates is k in degree 0.
struct CubeFactor {
    std::vector<Mask> keys;
    bool reduced = false;
};

// Cellular chains of a product of cubes (or their reduced quotients), with
// d(cell) = sum over * coordinates of (-1)^{#stars before} [(c->1) - (c->0)],
// collapsed cells dropped. The basis is the tensor basis of the factors.
class Cube {
public:
    Cube(const Field& F, std::vector<CubeFactor> factors);
    static Cube zero(const Field& F);

    const CxPtr& cx() const { return cx_; }
    int dim() const { return cx_->dim(); }
    bool is_zero() const { return zero_; }
    const std::vector<CubeFactor>& factors() const { return factors_; }
    int coords() const { return static_cast<int>(keys_.size()); }
    const std::vector<Mask>& keys() const { return keys_; }
    int factor_offset(int f) const { return offset_[f]; }
    const Cell& cell(int i) const { return cells_[i]; }
    // -1 when the cell is collapsed.
    int index(const Cell& c) const;

private:
    bool zero_ = false;
    std::vector<CubeFactor> factors_;
    std::vector<Mask> keys_;
    std::vector<int> offset_;
    std::vector<Cell> cells_;
    std::map<Cell, int> index_;
    CxPtr cx_;
};

using CubePtr = std::shared_ptr<const Cube>;

std::string cell_string(const Cube& c, int i);

// How one target coordinate is produced from source coordinates.
struct CoordRule {
    enum Kind { Proj, H, R, Zero, One } kind;
    int a = -1;
    int b = -1;
};

// The cellular map given coordinatewise by the rules (one per target
// coordinate, every source coordinate used exactly once). Signs come from
// reordering the * coordinates of the source into rule order.
ChainMap cell_map(const CubePtr& src, const CubePtr& tgt, const std::vector<CoordRule>& rules, bool check = true);
// Matches coordinates by key; unmatched target coordinates are pinned to 0.
ChainMap key_map(const CubePtr& src, const CubePtr& tgt, bool check = true);

CubePtr delta_cube(const Field& F, const Tree& t);
CubePtr wbar(const Field& F, const Tree& t);
// Cube on edges(u) - edges(t); requires t <= u.
CubePtr rel_delta(const Field& F, const Tree& u, const Tree& t);
// Tensor over vertices w of u of wbar(t_w); zero when u is not <= t.
CubePtr wbar_family(const Field& F, const Tree& t, const Tree& u);
// delta_cube(t) (x) wbar(u), the source of theta_cells.
CubePtr delta_wbar(const Field& F, const Tree& t, const Tree& u);

enum class FaceKind { Delta, Wbar, RelI, RelJ, FamilyT, FamilyU };

// Face inclusions pinning new coordinates to 0:
//   Delta, Wbar: delta_cube/wbar(a) -> (b), a <= b.
//   RelI: rel_delta(a, c) -> rel_delta(b, c), a <= b.
//   RelJ: rel_delta(c, a) -> rel_delta(c, b), b <= a.
//   FamilyT: wbar_family(a, c) -> wbar_family(b, c), a <= b.
//   FamilyU: wbar_family(c, a) -> wbar_family(c, b), a <= b (the splitting map).
ChainMap face_inclusion(const Field& F, FaceKind kind, const Tree& a, const Tree& b, const Tree& c = Tree());

// nu: wbar(t o_i u) -> wbar(t) (x) wbar(u); the grafted edge goes to the root
// of u and the root to the root of t.
ChainMap graft_decompose(const Field& F, const Tree& t, int i, const Tree& u);
// mu: delta_cube(t) (x) delta_cube(u) -> delta_cube(t o_i u), grafted edge at 1.
ChainMap graft_mu(const Field& F, const Tree& t, int i, const Tree& u);

CubePtr interval_cube(const Field& F);
ChainMap h_map(const Field& F);
ChainMap r_map(const Field& F);

// theta_{t,u}: delta_cube(t) (x) wbar(u) -> wbar_family(t, u).
ChainMap theta_cells(const Field& F, const Tree& t, const Tree& u);

} // namespace opdual
