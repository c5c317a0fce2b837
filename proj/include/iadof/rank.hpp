#pragma once

#include <gmpxx.h>

#include <vector>

namespace iadof {

// Dense integer matrix, row-major, arbitrary-precision entries.
struct IntegerMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<mpz_class> cells;

    IntegerMatrix() = default;
    IntegerMatrix(int rows, int cols)
        : rows(rows), cols(cols), cells(static_cast<size_t>(rows) * cols) {}

    mpz_class& at(int r, int c) { return cells[static_cast<size_t>(r) * cols + c]; }
    const mpz_class& at(int r, int c) const { return cells[static_cast<size_t>(r) * cols + c]; }
};

// Exact rank over the rationals via fraction-free (Bareiss) elimination.
// Serial reference implementation.
int integer_rank_serial(IntegerMatrix m);

// Same elimination with the row updates spread across OpenMP threads. The
// pivot sequence is identical to the serial kernel, so results match exactly.
int integer_rank_parallel(IntegerMatrix m, int threads);

// Numerical rank of a row-major double matrix: singular values above
// max(rows, cols) * machine_epsilon * sigma_max.
int float_rank(const std::vector<double>& cells, int rows, int cols);

}  // namespace iadof
