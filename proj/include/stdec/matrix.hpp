#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace stdec {

/// Dense row-major matrix of doubles. The one numeric container every
/// module shares; kept deliberately small.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }

    std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    std::vector<double>& values() { return data_; }
    const std::vector<double>& values() const { return data_; }

    void set_row(std::size_t r, std::span<const double> v);

    bool all_finite() const;
    bool same_shape(const Matrix& other) const {
        return rows_ == other.rows_ && cols_ == other.cols_;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// c = a * b
Matrix matmul(const Matrix& a, const Matrix& b);
/// c = a^T * b  (a is n x r, b is n x c, result r x c)
Matrix matmul_at(const Matrix& a, const Matrix& b);
/// c = a * b^T  (a is n x r, b is c x r, result n x c)
Matrix matmul_bt(const Matrix& a, const Matrix& b);

void add_row_vector(Matrix& m, std::span<const double> v);

double squared_distance(std::span<const double> a, std::span<const double> b);

}  // namespace stdec
