#include "stdec/matrix.hpp"

#include <cmath>
#include <stdexcept>

namespace stdec {

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    Matrix m(rows.size(), rows.size() ? rows.begin()->size() : 0);
    std::size_t r = 0;
    for (const auto& row : rows) {
        if (row.size() != m.cols_) throw std::invalid_argument("Matrix::from_rows: ragged rows");
        std::size_t c = 0;
        for (double v : row) m(r, c++) = v;
        ++r;
    }
    return m;
}

void Matrix::set_row(std::size_t r, std::span<const double> v) {
    if (v.size() != cols_) throw std::invalid_argument("Matrix::set_row: length mismatch");
    for (std::size_t c = 0; c < cols_; ++c) (*this)(r, c) = v[c];
}

bool Matrix::all_finite() const {
    for (double v : data_)
        if (!std::isfinite(v)) return false;
    return true;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) throw std::invalid_argument("matmul: inner dimensions differ");
    Matrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const double* arow = a.data() + i * a.cols();
        double* crow = c.data() + i * c.cols();
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = arow[k];
            if (aik == 0.0) continue;
            const double* brow = b.data() + k * b.cols();
            for (std::size_t j = 0; j < b.cols(); ++j) crow[j] += aik * brow[j];
        }
    }
    return c;
}

Matrix matmul_at(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows()) throw std::invalid_argument("matmul_at: row counts differ");
    Matrix c(a.cols(), b.cols());
    for (std::size_t n = 0; n < a.rows(); ++n) {
        const double* arow = a.data() + n * a.cols();
        const double* brow = b.data() + n * b.cols();
        for (std::size_t i = 0; i < a.cols(); ++i) {
            const double ani = arow[i];
            if (ani == 0.0) continue;
            double* crow = c.data() + i * c.cols();
            for (std::size_t j = 0; j < b.cols(); ++j) crow[j] += ani * brow[j];
        }
    }
    return c;
}

Matrix matmul_bt(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.cols()) throw std::invalid_argument("matmul_bt: column counts differ");
    Matrix c(a.rows(), b.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const double* arow = a.data() + i * a.cols();
        for (std::size_t j = 0; j < b.rows(); ++j) {
            const double* brow = b.data() + j * b.cols();
            double sum = 0.0;
            for (std::size_t k = 0; k < a.cols(); ++k) sum += arow[k] * brow[k];
            c(i, j) = sum;
        }
    }
    return c;
}

void add_row_vector(Matrix& m, std::span<const double> v) {
    if (v.size() != m.cols()) throw std::invalid_argument("add_row_vector: length mismatch");
    for (std::size_t i = 0; i < m.rows(); ++i) {
        double* row = m.data() + i * m.cols();
        for (std::size_t j = 0; j < m.cols(); ++j) row[j] += v[j];
    }
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw std::invalid_argument("squared_distance: length mismatch");
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        sum += d * d;
    }
    return sum;
}

}  // namespace stdec
