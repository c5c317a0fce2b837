#include "iadof/rank.hpp"

#include <omp.h>

#include <limits>
#include <stdexcept>

#include <Eigen/Dense>
#include <Eigen/SVD>

namespace iadof {

namespace {

// One elimination step below row `rank` with pivot at (rank, col). Every
// update is (pivot * a[r][c] - a[r][col] * a[rank][c]) / prev, and the
// division is exact, which keeps entry growth polynomial.
void eliminate_rows(IntegerMatrix& m, int rank, int col, const mpz_class& prev, int threads) {
#pragma omp parallel num_threads(threads)
    {
        mpz_class t1, t2;
#pragma omp for schedule(static)
        for (int r = rank + 1; r < m.rows; ++r) {
            mpz_class& lead = m.at(r, col);
            if (mpz_sgn(lead.get_mpz_t()) != 0) {
                for (int c = col + 1; c < m.cols; ++c) {
                    mpz_mul(t1.get_mpz_t(), m.at(rank, col).get_mpz_t(), m.at(r, c).get_mpz_t());
                    mpz_mul(t2.get_mpz_t(), lead.get_mpz_t(), m.at(rank, c).get_mpz_t());
                    mpz_sub(t1.get_mpz_t(), t1.get_mpz_t(), t2.get_mpz_t());
                    mpz_divexact(m.at(r, c).get_mpz_t(), t1.get_mpz_t(), prev.get_mpz_t());
                }
                lead = 0;
            } else {
                // The fraction-free update degenerates to pivot/prev scaling
                // here; rows must not skip it or later divisions stop being
                // exact.
                for (int c = col + 1; c < m.cols; ++c) {
                    mpz_mul(t1.get_mpz_t(), m.at(rank, col).get_mpz_t(), m.at(r, c).get_mpz_t());
                    mpz_divexact(m.at(r, c).get_mpz_t(), t1.get_mpz_t(), prev.get_mpz_t());
                }
            }
        }
    }
}

int bareiss_rank(IntegerMatrix m, int threads) {
    int rank = 0;
    mpz_class prev = 1;
    for (int col = 0; col < m.cols && rank < m.rows; ++col) {
        int pivot = -1;
        for (int r = rank; r < m.rows; ++r)
            if (mpz_sgn(m.at(r, col).get_mpz_t()) != 0) {
                pivot = r;
                break;
            }
        if (pivot < 0) continue;
        if (pivot != rank)
            for (int c = col; c < m.cols; ++c) mpz_swap(m.at(pivot, c).get_mpz_t(), m.at(rank, c).get_mpz_t());
        eliminate_rows(m, rank, col, prev, threads);
        prev = m.at(rank, col);
        ++rank;
    }
    return rank;
}

}  // namespace

int integer_rank_serial(IntegerMatrix m) { return bareiss_rank(std::move(m), 1); }

int integer_rank_parallel(IntegerMatrix m, int threads) {
    if (threads < 1) throw std::invalid_argument("thread count must be >= 1");
    return bareiss_rank(std::move(m), threads);
}

int float_rank(const std::vector<double>& cells, int rows, int cols) {
    if (rows < 0 || cols < 0 || cells.size() != static_cast<size_t>(rows) * cols)
        throw std::invalid_argument("matrix shape does not match the cell count");
    if (rows == 0 || cols == 0) return 0;
    Eigen::MatrixXd a(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) a(r, c) = cells[static_cast<size_t>(r) * cols + c];
    Eigen::BDCSVD<Eigen::MatrixXd> svd(a);
    const auto& sigma = svd.singularValues();
    if (sigma.size() == 0) return 0;
    const double cutoff = std::max(rows, cols) * std::numeric_limits<double>::epsilon() * sigma(0);
    int rank = 0;
    for (Eigen::Index i = 0; i < sigma.size(); ++i)
        if (sigma(i) > cutoff) ++rank;
    return rank;
}

}  // namespace iadof
