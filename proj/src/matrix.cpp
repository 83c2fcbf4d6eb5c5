#include "gwcone/matrix.hpp"

namespace gwcone {

FMatrix FMatrix::identity(int n, const FieldConfigPtr& cfg) {
    FMatrix m(n, n, cfg);
    for (int i = 0; i < n; ++i) m.at(i, i) = FieldElem::one(cfg);
    return m;
}

FMatrix FMatrix::operator*(const FMatrix& o) const {
    if (cols_ != o.rows_) throw FieldError("matrix shape mismatch");
    FieldConfigPtr cfg = data_.empty() ? o.data_[0].config() : data_[0].config();
    FMatrix r(rows_, o.cols_, cfg);
    for (int i = 0; i < rows_; ++i)
        for (int k = 0; k < cols_; ++k) {
            if (at(i, k).is_zero()) continue;
            for (int j = 0; j < o.cols_; ++j) {
                if (o.at(k, j).is_zero()) continue;
                r.at(i, j) += at(i, k) * o.at(k, j);
            }
        }
    return r;
}

FMatrix FMatrix::operator+(const FMatrix& o) const {
    FMatrix r = *this;
    for (int i = 0; i < rows_ * cols_; ++i) r.data_[i] += o.data_[i];
    return r;
}

FMatrix FMatrix::operator-(const FMatrix& o) const {
    FMatrix r = *this;
    for (int i = 0; i < rows_ * cols_; ++i) r.data_[i] -= o.data_[i];
    return r;
}

bool FMatrix::operator==(const FMatrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) return false;
    for (int i = 0; i < rows_ * cols_; ++i)
        if (!(data_[i] == o.data_[i])) return false;
    return true;
}

FMatrix FMatrix::transposed() const {
    FMatrix r(cols_, rows_, data_.empty() ? FieldConfig::rationals() : data_[0].config());
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) r.at(j, i) = at(i, j);
    return r;
}

bool FMatrix::is_invertible() const {
    try {
        (void)inverse();
        return true;
    } catch (const FieldError&) {
        return false;
    }
}

FMatrix FMatrix::inverse() const {
    if (rows_ != cols_) throw FieldError("inverse of non-square matrix");
    int n = rows_;
    FieldConfigPtr cfg = data_.empty() ? FieldConfig::rationals() : data_[0].config();
    FMatrix a = *this;
    FMatrix inv = identity(n, cfg);
    for (int col = 0; col < n; ++col) {
        int piv = -1;
        for (int r = col; r < n; ++r)
            if (!a.at(r, col).is_zero()) {
                piv = r;
                break;
            }
        if (piv < 0) throw FieldError("singular matrix");
        if (piv != col)
            for (int j = 0; j < n; ++j) {
                std::swap(a.at(piv, j), a.at(col, j));
                std::swap(inv.at(piv, j), inv.at(col, j));
            }
        FieldElem d = a.at(col, col).inverse();
        for (int j = 0; j < n; ++j) {
            a.at(col, j) *= d;
            inv.at(col, j) *= d;
        }
        for (int r = 0; r < n; ++r) {
            if (r == col || a.at(r, col).is_zero()) continue;
            FieldElem f = a.at(r, col);
            for (int j = 0; j < n; ++j) {
                a.at(r, j) -= f * a.at(col, j);
                inv.at(r, j) -= f * inv.at(col, j);
            }
        }
    }
    return inv;
}

std::optional<std::vector<FieldElem>> FMatrix::solve(const std::vector<FieldElem>& b) const {
    FieldConfigPtr cfg = data_.empty() ? FieldConfig::rationals() : data_[0].config();
    FMatrix a = *this;
    std::vector<FieldElem> rhs = b;
    std::vector<int> pivot_col(rows_, -1);
    int row = 0;
    for (int col = 0; col < cols_ && row < rows_; ++col) {
        int piv = -1;
        for (int r = row; r < rows_; ++r)
            if (!a.at(r, col).is_zero()) {
                piv = r;
                break;
            }
        if (piv < 0) continue;
        if (piv != row) {
            for (int j = 0; j < cols_; ++j) std::swap(a.at(piv, j), a.at(row, j));
            std::swap(rhs[piv], rhs[row]);
        }
        FieldElem d = a.at(row, col).inverse();
        for (int j = 0; j < cols_; ++j) a.at(row, j) *= d;
        rhs[row] *= d;
        for (int r = 0; r < rows_; ++r) {
            if (r == row || a.at(r, col).is_zero()) continue;
            FieldElem f = a.at(r, col);
            for (int j = 0; j < cols_; ++j) a.at(r, j) -= f * a.at(row, j);
            rhs[r] -= f * rhs[row];
        }
        pivot_col[row] = col;
        ++row;
    }
    for (int r = row; r < rows_; ++r)
        if (!rhs[r].is_zero()) return std::nullopt;
    std::vector<FieldElem> x(cols_, FieldElem::zero(cfg));
    for (int r = 0; r < row; ++r) x[pivot_col[r]] = rhs[r];
    return x;
}

}  // namespace gwcone
