#pragma once

#include <cstddef>
#include <initializer_list>
#include <optional>
#include <span>
#include <vector>

namespace delaycert {

using Vector = std::vector<double>;

/// Small dense row-major matrix. Sizes here never exceed a few dozen.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
    Matrix(std::initializer_list<std::initializer_list<double>> rows);

    static Matrix identity(std::size_t n);
    static Matrix diagonal(std::span<const double> d);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool square() const noexcept { return rows_ == cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<const double> data() const noexcept { return data_; }

    Vector operator*(std::span<const double> v) const;
    Matrix operator+(const Matrix& o) const;
    Matrix operator-(const Matrix& o) const;

    bool operator==(const Matrix& o) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// Gaussian elimination with partial pivoting. Empty result when a pivot
/// falls below `pivot_tol` relative to the largest entry of A.
std::optional<Vector> solve_linear(Matrix a, Vector b, double pivot_tol = 1e-13);

double norm_inf(std::span<const double> v);
double min_entry(std::span<const double> v);
double max_entry(std::span<const double> v);

/// Off-diagonal entries all >= 0.
bool is_metzler(const Matrix& m);
/// Off-diagonal entries all <= 0.
bool is_z_matrix(const Matrix& m);

}  // namespace delaycert
