#pragma once

#include "gwcone/field.hpp"

#include <vector>

namespace gwcone {

/// Dense matrix over the exact field. Small sizes only; Gauss-Jordan with
/// first-nonzero pivoting keeps results deterministic.
class FMatrix {
  public:
    FMatrix() = default;
    FMatrix(int rows, int cols, const FieldConfigPtr& cfg)
        : rows_(rows), cols_(cols), data_(rows * cols, FieldElem::zero(cfg)) {}

    static FMatrix identity(int n, const FieldConfigPtr& cfg);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    FieldElem& at(int i, int j) { return data_[i * cols_ + j]; }
    const FieldElem& at(int i, int j) const { return data_[i * cols_ + j]; }

    FMatrix operator*(const FMatrix& o) const;
    FMatrix operator+(const FMatrix& o) const;
    FMatrix operator-(const FMatrix& o) const;
    bool operator==(const FMatrix& o) const;

    FMatrix transposed() const;
    bool is_invertible() const;
    FMatrix inverse() const;  // throws FieldError if singular

    /// Solve M x = b; returns empty optional if no solution. When the system
    /// is underdetermined the free variables are set to zero.
    std::optional<std::vector<FieldElem>> solve(const std::vector<FieldElem>& b) const;

  private:
    int rows_ = 0, cols_ = 0;
    std::vector<FieldElem> data_;
};

}  // namespace gwcone
