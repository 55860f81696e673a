#include "stdec/spatial.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "stdec/csv.hpp"

namespace stdec::spatial {

void SpatialWeights::validate() const {
    if (s < 2) throw std::invalid_argument("SpatialWeights requires s >= 2");
    if (lambda.rows() != s || lambda.cols() != s)
        throw std::invalid_argument("lambda must be s x s");
    for (std::size_t i = 0; i < s; ++i) {
        if (lambda(i, i) != 0.0) throw std::invalid_argument("lambda diagonal must be zero");
        for (std::size_t k = 0; k < s; ++k) {
            const double v = lambda(i, k);
            if (v < -1.0 || v > 1.0)
                throw std::invalid_argument("lambda values must lie in [-1, 1]");
            if (std::abs(v - lambda(k, i)) > 1e-9)
                throw std::invalid_argument("lambda must be symmetric (tolerance 1e-9)");
        }
        // strictly decreasing in |i-k| along the row, checked off-diagonal
        for (std::size_t k = i + 2; k < s; ++k)
            if (!(lambda(i, k) < lambda(i, k - 1)))
                throw std::invalid_argument("lambda rows must strictly decrease with distance");
        for (std::size_t k = i; k-- > 1;)
            if (!(lambda(i, k - 1) < lambda(i, k)))
                throw std::invalid_argument("lambda rows must strictly decrease with distance");
    }
}

std::vector<double> one_hot(std::size_t i, std::size_t s) {
    if (i >= s) throw std::invalid_argument("one_hot index out of range");
    std::vector<double> g(s, 0.0);
    g[i] = 1.0;
    return g;
}

SpatialWeights line_lambda(std::size_t s) {
    if (s < 2) throw std::invalid_argument("line_lambda requires s >= 2");
    SpatialWeights w;
    w.s = s;
    w.lambda = Matrix(s, s);
    for (std::size_t i = 0; i < s; ++i)
        for (std::size_t k = 0; k < s; ++k) {
            if (i == k) continue;
            const double d = static_cast<double>(i > k ? i - k : k - i);
            w.lambda(i, k) = 1.0 - 2.0 * d / static_cast<double>(s + 1);
        }
    w.validate();
    return w;
}

SpatialWeights load_lambda_csv(const std::string& path) {
    auto rows = csv::read_table(path);
    if (rows.empty()) throw std::runtime_error("empty lambda CSV: " + path);
    SpatialWeights w;
    w.s = rows.size();
    w.lambda = Matrix(w.s, w.s);
    for (std::size_t i = 0; i < w.s; ++i) {
        if (rows[i].size() != w.s)
            throw std::runtime_error("lambda CSV must be square; row " + std::to_string(i + 1) +
                                     " has " + std::to_string(rows[i].size()) + " fields");
        for (std::size_t k = 0; k < w.s; ++k)
            w.lambda(i, k) = csv::parse_double(rows[i][k], path);
    }
    w.validate();
    return w;
}

void write_lambda_csv(const SpatialWeights& w, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    for (std::size_t i = 0; i < w.s; ++i) {
        for (std::size_t k = 0; k < w.s; ++k) {
            if (k) out << ',';
            out << csv::format_double(w.lambda(i, k));
        }
        out << '\n';
    }
}

PairBatch expand_pairs(const Matrix& points, std::size_t t, const Matrix& snapshot,
                       const SpatialWeights& weights) {
    const std::size_t s = weights.s;
    if (points.rows() != s)
        throw std::invalid_argument("expand_pairs: need exactly s location-ordered points");
    if (snapshot.rows() != s)
        throw std::invalid_argument("expand_pairs: snapshot must hold s rows for the timestamp");

    PairBatch batch;
    batch.s = s;
    batch.t = t;
    const std::size_t dim = points.cols();
    batch.inputs = Matrix(s * s, dim + s);
    batch.targets = Matrix(s * s, snapshot.cols());
    batch.weights.resize(s * s);
    for (std::size_t i = 0; i < s; ++i) {
        for (std::size_t k = 0; k < s; ++k) {
            const std::size_t row = i * s + k;
            for (std::size_t c = 0; c < dim; ++c) batch.inputs(row, c) = points(i, c);
            batch.inputs(row, dim + i) = 1.0;  // one-hot g_i
            for (std::size_t c = 0; c < snapshot.cols(); ++c)
                batch.targets(row, c) = snapshot(k, c);
            batch.weights[row] = weights.at(i, k);
        }
    }
    return batch;
}

}  // namespace stdec::spatial
