#include "opdual/matrix.hpp"

#include <sstream>
#include <stdexcept>

namespace opdual {

void axpy(const Field& F, SparseVec& y, const Scalar& a, const SparseVec& x) {
    if (F.is_zero(a)) return;
    for (const auto& [i, v] : x) {
        auto it = y.find(i);
        if (it == y.end()) {
            Scalar s = F.reduce(a * v);
            if (s != 0) y.emplace(i, s);
        } else {
            it->second = F.reduce(it->second + a * v);
            if (it->second == 0) y.erase(it);
        }
    }
}

Matrix Matrix::identity(int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) m.col_[i][i] = 1;
    return m;
}

void Matrix::add(int r, int c, const Scalar& v) {
    if (r < 0 || r >= rows_ || c < 0 || c >= cols_) throw std::out_of_range("matrix index");
    auto& col = col_[c];
    auto it = col.find(r);
    if (it == col.end()) {
        if (v != 0) col.emplace(r, v);
    } else {
        it->second += v;
        if (it->second == 0) col.erase(it);
    }
}

Scalar Matrix::at(int r, int c) const {
    auto it = col_[c].find(r);
    return it == col_[c].end() ? Scalar(0) : it->second;
}

size_t Matrix::nnz() const {
    size_t n = 0;
    for (const auto& c : col_) n += c.size();
    return n;
}

void Matrix::normalize(const Field& F) {
    for (auto& c : col_) {
        for (auto it = c.begin(); it != c.end();) {
            it->second = F.reduce(it->second);
            if (it->second == 0)
                it = c.erase(it);
            else
                ++it;
        }
    }
}

SparseVec apply(const Field& F, const Matrix& a, const SparseVec& v) {
    SparseVec out;
    for (const auto& [j, x] : v) axpy(F, out, x, a.col(j));
    return out;
}

Matrix mul(const Field& F, const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) throw std::invalid_argument("mul: shape mismatch");
    Matrix m(a.rows(), b.cols());
    for (int j = 0; j < b.cols(); ++j) m.col(j) = apply(F, a, b.col(j));
    return m;
}

Matrix add(const Field& F, const Matrix& a, const Matrix& b, const Scalar& cb) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw std::invalid_argument("add: shape mismatch");
    Matrix m = a;
    for (int j = 0; j < b.cols(); ++j) axpy(F, m.col(j), cb, b.col(j));
    return m;
}

Matrix scaled(const Field& F, const Matrix& a, const Scalar& c) {
    Matrix m(a.rows(), a.cols());
    for (int j = 0; j < a.cols(); ++j) axpy(F, m.col(j), c, a.col(j));
    return m;
}

Matrix transpose(const Matrix& a) {
    Matrix t(a.cols(), a.rows());
    for (int j = 0; j < a.cols(); ++j)
        for (const auto& [i, v] : a.col(j)) t.col(i)[j] = v;
    return t;
}

Matrix kron(const Field& F, const Matrix& a, const Matrix& b) {
    Matrix m(a.rows() * b.rows(), a.cols() * b.cols());
    for (int j = 0; j < a.cols(); ++j)
        for (int l = 0; l < b.cols(); ++l) {
            auto& col = m.col(j * b.cols() + l);
            for (const auto& [i, x] : a.col(j))
                for (const auto& [k, y] : b.col(l)) {
                    Scalar s = F.reduce(x * y);
                    if (s != 0) col[i * b.rows() + k] = s;
                }
        }
    return m;
}

Matrix select(const Matrix& a, const std::vector<int>& rows, const std::vector<int>& cols) {
    std::map<int, int> rpos;
    for (size_t i = 0; i < rows.size(); ++i) rpos[rows[i]] = static_cast<int>(i);
    Matrix m(static_cast<int>(rows.size()), static_cast<int>(cols.size()));
    for (size_t j = 0; j < cols.size(); ++j)
        for (const auto& [i, v] : a.col(cols[j])) {
            auto it = rpos.find(i);
            if (it != rpos.end()) m.col(static_cast<int>(j))[it->second] = v;
        }
    return m;
}

Matrix apply_vec_columns(const Field& F, const Matrix& a, const std::vector<SparseVec>& cols, int rows) {
    Matrix m(rows, static_cast<int>(cols.size()));
    for (size_t j = 0; j < cols.size(); ++j) m.col(static_cast<int>(j)) = apply(F, a, cols[j]);
    return m;
}

bool equal(const Field& F, const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
    for (int j = 0; j < a.cols(); ++j) {
        SparseVec d = a.col(j);
        axpy(F, d, -1, b.col(j));
        for (const auto& [i, v] : d)
            if (!F.is_zero(v)) return false;
    }
    return true;
}

bool is_zero(const Field& F, const Matrix& a) {
    for (int j = 0; j < a.cols(); ++j)
        for (const auto& [i, v] : a.col(j))
            if (!F.is_zero(v)) return false;
    return true;
}

std::string to_string(const Matrix& a) {
    std::ostringstream os;
    for (int i = 0; i < a.rows(); ++i) {
        for (int j = 0; j < a.cols(); ++j) os << (j ? " " : "") << a.at(i, j).get_str();
        os << "\n";
    }
    return os.str();
}

bool Echelon::insert(SparseVec v, int tag, SparseVec* relation) {
    SparseVec combo;
    if (track_) combo[tag] = 1;
    while (!v.empty()) {
        int p = v.begin()->first;
        auto it = pivots_.find(p);
        if (it == pivots_.end()) {
            Scalar inv = F_.inv(v.begin()->second);
            SparseVec nv;
            axpy(F_, nv, inv, v);
            pivots_.emplace(p, std::move(nv));
            if (track_) {
                SparseVec nc;
                axpy(F_, nc, inv, combo);
                combos_.emplace(p, std::move(nc));
            }
            return true;
        }
        Scalar c = v.begin()->second;
        axpy(F_, v, -c, it->second);
        if (track_) axpy(F_, combo, -c, combos_.at(p));
    }
    if (relation) *relation = std::move(combo);
    return false;
}

SparseVec Echelon::reduce(SparseVec v, SparseVec* combo) const {
    SparseVec rem;
    if (combo) combo->clear();
    while (!v.empty()) {
        auto first = v.begin();
        int p = first->first;
        auto it = pivots_.find(p);
        if (it == pivots_.end()) {
            rem.emplace(p, first->second);
            v.erase(first);
            continue;
        }
        Scalar c = first->second;
        if (combo && track_) axpy(F_, *combo, c, combos_.at(p));
        axpy(F_, v, -c, it->second);
    }
    return rem;
}

void Echelon::fully_reduce() {
    for (auto it = pivots_.rbegin(); it != pivots_.rend(); ++it) {
        int p = it->first;
        SparseVec& vec = it->second;
        std::vector<std::pair<int, Scalar>> hits;
        for (const auto& [k, x] : vec)
            if (k != p && pivots_.count(k)) hits.emplace_back(k, x);
        for (const auto& [k, x] : hits) {
            axpy(F_, vec, -x, pivots_.at(k));
            if (track_) axpy(F_, combos_.at(p), -x, combos_.at(k));
        }
    }
}

int rank(const Field& F, const Matrix& a) {
    Echelon e(F, false);
    for (int j = 0; j < a.cols(); ++j) e.insert(a.col(j), j);
    return e.rank();
}

std::vector<SparseVec> kernel_basis(const Field& F, const Matrix& a) {
    Echelon e(F, true);
    std::vector<SparseVec> out;
    for (int j = 0; j < a.cols(); ++j) {
        SparseVec rel;
        if (!e.insert(a.col(j), j, &rel)) out.push_back(std::move(rel));
    }
    return out;
}

std::optional<SparseVec> solve(const Field& F, const Matrix& a, const SparseVec& b) {
    Echelon e(F, true);
    for (int j = 0; j < a.cols(); ++j) e.insert(a.col(j), j);
    SparseVec combo;
    SparseVec rem = e.reduce(b, &combo);
    if (!rem.empty()) return std::nullopt;
    return combo;
}

std::optional<Matrix> inverse(const Field& F, const Matrix& a) {
    if (a.rows() != a.cols()) return std::nullopt;
    Echelon e(F, true);
    for (int j = 0; j < a.cols(); ++j)
        if (!e.insert(a.col(j), j)) return std::nullopt;
    Matrix inv(a.cols(), a.rows());
    for (int i = 0; i < a.rows(); ++i) {
        SparseVec unit{{i, Scalar(1)}};
        SparseVec combo;
        SparseVec rem = e.reduce(unit, &combo);
        if (!rem.empty()) return std::nullopt;
        inv.col(i) = std::move(combo);
    }
    return inv;
}

} // namespace opdual
