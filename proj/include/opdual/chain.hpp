#pragma once

#include "opdual/matrix.hpp"

#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace opdual {

struct ChainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Finite-dimensional chain complex with a flat basis. Basis vector i sits in
// degree deg[i]; d is a single square matrix of degree -1.
class ChainComplex {
public:
    ChainComplex() = default;
    ChainComplex(const Field& F, std::vector<int> deg, Matrix d, std::vector<std::string> names = {},
                 bool check = true);

    static ChainComplex zero(const Field& F) { return ChainComplex(F, {}, Matrix(0, 0)); }
    // k in a single degree.
    static ChainComplex unit(const Field& F, int degree = 0);

    const Field& field() const { return F_; }
    int dim() const { return static_cast<int>(deg_.size()); }
    int degree(int i) const { return deg_[i]; }
    const std::vector<int>& degrees() const { return deg_; }
    const Matrix& d() const { return d_; }
    std::string name(int i) const;
    bool has_names() const { return !names_.empty(); }

    std::vector<int> basis_in_degree(int k) const;
    std::map<int, int> dims() const;
    // d_k : degree k -> degree k-1 in local coordinates of basis_in_degree.
    Matrix block(int k) const;

private:
    Field F_;
    std::vector<int> deg_;
    Matrix d_;
    std::vector<std::string> names_;
};

using CxPtr = std::shared_ptr<const ChainComplex>;

inline CxPtr share(ChainComplex c) { return std::make_shared<const ChainComplex>(std::move(c)); }

// Degree-s map: basis vector of degree k goes to degree k+s; m is tgt x src.
// Chain law: m d = (-1)^s d m.
struct ChainMap {
    CxPtr src;
    CxPtr tgt;
    int shift = 0;
    Matrix m;

    const Field& field() const { return src->field(); }
};

ChainMap make_map(CxPtr src, CxPtr tgt, Matrix m, int shift = 0, bool check = true);
ChainMap identity_map(CxPtr a);
ChainMap zero_map(CxPtr src, CxPtr tgt, int shift = 0);
bool is_chain_map(const ChainMap& f);
std::string check_map(const ChainMap& f);
// g after f.
ChainMap compose(const ChainMap& g, const ChainMap& f);
ChainMap add(const ChainMap& f, const ChainMap& g, const Scalar& cg = 1);
bool equal(const ChainMap& f, const ChainMap& g);

ChainComplex build_complex(const Field& F, const std::map<int, std::vector<std::string>>& basis,
                           const std::map<int, Matrix>& boundary);
ChainComplex direct_sum(const std::vector<ChainComplex>& parts);
std::vector<int> sum_offsets(const std::vector<ChainComplex>& parts);

// a (x) b with basis index i * b.dim() + j.
ChainComplex tensor(const ChainComplex& a, const ChainComplex& b);
ChainComplex tensor_all(const Field& F, const std::vector<const ChainComplex*>& parts);
ChainMap tensor(const ChainMap& f, const ChainMap& g, CxPtr src = nullptr, CxPtr tgt = nullptr);
ChainMap symmetry(CxPtr ab, const ChainComplex& a, const ChainComplex& b, CxPtr ba = nullptr);

ChainComplex linear_dual(const ChainComplex& a);
ChainMap dual_map(const ChainMap& f, CxPtr dual_tgt, CxPtr dual_src);
// a -> dual(dual(a)), x |-> (phi |-> (-1)^{|x||phi|} phi(x)).
ChainMap double_dual_map(CxPtr a, CxPtr dd = nullptr);
// dual(a) (x) dual(b) -> dual(a (x) b).
ChainMap pairing(const ChainComplex& a, const ChainComplex& b, CxPtr src = nullptr, CxPtr tgt = nullptr);

ChainComplex shift(const ChainComplex& a, int s);
ChainComplex cone(const ChainMap& f);
bool is_quasi_iso(const ChainMap& f);

// Hom(a, b): basis E_{ij} sending a_j to b_i, index i * a.dim() + j,
// degree |b_i| - |a_j|, D phi = d phi - (-1)^{|phi|} phi d.
ChainComplex hom(const ChainComplex& a, const ChainComplex& b);

std::map<int, int> homology_table(const ChainComplex& a);
long euler(const ChainComplex& a);
long euler(const std::map<int, int>& table);
bool is_acyclic(const ChainComplex& a);

struct Kernel {
    CxPtr cx;
    Matrix incl;  // src x ker
};

struct Cokernel {
    CxPtr cx;
    Matrix proj;     // coker x tgt
    Matrix section;  // tgt x coker, proj * section = 1
};

Kernel kernel(const ChainMap& f);
Cokernel cokernel(const ChainMap& f);
// Quotient of a by the span of a subcomplex given by homogeneous spanning vectors.
Cokernel quotient(CxPtr a, const std::vector<SparseVec>& span);
// Subcomplex spanned by homogeneous vectors closed under d.
Kernel subcomplex(CxPtr a, const std::vector<SparseVec>& span);

struct KernelCokernel {
    Kernel ker;
    Cokernel coker;
};
KernelCokernel kernel_cokernel(const ChainMap& f);

} // namespace opdual
