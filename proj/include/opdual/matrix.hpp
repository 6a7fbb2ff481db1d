#pragma once

#include "opdual/field.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace opdual {

using SparseVec = std::map<int, Scalar>;

void axpy(const Field& F, SparseVec& y, const Scalar& a, const SparseVec& x);

// Column-major sparse matrix; column j holds the image of basis vector j.
class Matrix {
public:
    Matrix() = default;
    Matrix(int rows, int cols) : rows_(rows), cols_(cols), col_(cols) {}

    static Matrix identity(int n);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    const SparseVec& col(int j) const { return col_[j]; }
    SparseVec& col(int j) { return col_[j]; }

    // Accumulates without reduction; call normalize() afterwards.
    void add(int r, int c, const Scalar& v);
    Scalar at(int r, int c) const;
    size_t nnz() const;
    void normalize(const Field& F);

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<SparseVec> col_;
};

Matrix mul(const Field& F, const Matrix& a, const Matrix& b);
Matrix add(const Field& F, const Matrix& a, const Matrix& b, const Scalar& cb = 1);
Matrix scaled(const Field& F, const Matrix& a, const Scalar& c);
Matrix transpose(const Matrix& a);
Matrix kron(const Field& F, const Matrix& a, const Matrix& b);
Matrix select(const Matrix& a, const std::vector<int>& rows, const std::vector<int>& cols);
Matrix apply_vec_columns(const Field& F, const Matrix& a, const std::vector<SparseVec>& cols, int rows);
SparseVec apply(const Field& F, const Matrix& a, const SparseVec& v);
bool equal(const Field& F, const Matrix& a, const Matrix& b);
bool is_zero(const Field& F, const Matrix& a);
std::string to_string(const Matrix& a);

// Incremental row echelon form over a field. Vectors are reduced by their
// leading (smallest) index; optional combination tracking records each pivot
// as a combination of the inserted vectors.
class Echelon {
public:
    Echelon(const Field& F, bool track) : F_(F), track_(track) {}

    // Returns true when v was independent. When dependent and tracking is on,
    // *relation receives a combination of earlier inserts plus the new tag that
    // vanishes.
    bool insert(SparseVec v, int tag, SparseVec* relation = nullptr);
    // Reduces v against the pivots; returns the remainder and (if tracking)
    // the combination of inserted tags whose image equals v - remainder.
    SparseVec reduce(SparseVec v, SparseVec* combo = nullptr) const;
    void fully_reduce();

    int rank() const { return static_cast<int>(pivots_.size()); }
    const std::map<int, SparseVec>& pivots() const { return pivots_; }
    const std::map<int, SparseVec>& combos() const { return combos_; }

private:
    Field F_;
    bool track_;
    std::map<int, SparseVec> pivots_;
    std::map<int, SparseVec> combos_;
};

int rank(const Field& F, const Matrix& a);
// Basis of the null space, one vector per column of the result.
std::vector<SparseVec> kernel_basis(const Field& F, const Matrix& a);
std::optional<SparseVec> solve(const Field& F, const Matrix& a, const SparseVec& b);
std::optional<Matrix> inverse(const Field& F, const Matrix& a);

} // namespace opdual
