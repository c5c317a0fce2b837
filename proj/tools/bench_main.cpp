#include <CLI11.hpp>
#include <omp.h>

#include <chrono>
#include <cstdio>
#include <random>

#include "iadof/rank.hpp"

namespace {

iadof::IntegerMatrix random_matrix(int size, uint64_t seed) {
    iadof::IntegerMatrix m(size, size);
    std::mt19937_64 rng(seed);
    for (mpz_class& cell : m.cells) {
        const uint64_t r = rng();
        const long mag = static_cast<long>(r & 0xFFFFF) + 1;
        cell = ((r >> 20) & 1) ? -mag : mag;
    }
    return m;
}

template <typename F>
double best_of(int trials, F&& body) {
    double best = 0.0;
    for (int t = 0; t < trials; ++t) {
        const auto start = std::chrono::steady_clock::now();
        body();
        const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
        if (t == 0 || elapsed.count() < best) best = elapsed.count();
    }
    return best;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Times the fraction-free rank kernel, serial against OpenMP"};
    std::vector<int> sizes{32, 48, 64};
    int trials = 3;
    int threads = omp_get_max_threads();
    uint64_t seed = 1;
    app.add_option("--sizes", sizes, "square matrix sizes to time")->delimiter(',');
    app.add_option("--trials", trials, "repetitions per size, best kept")
        ->check(CLI::PositiveNumber);
    app.add_option("--threads", threads, "threads for the parallel kernel")
        ->check(CLI::PositiveNumber);
    app.add_option("--seed", seed, "entry generator seed");
    CLI11_PARSE(app, argc, argv);

    std::printf("size,threads,serial_s,parallel_s,speedup,rank\n");
    for (int size : sizes) {
        const iadof::IntegerMatrix m = random_matrix(size, seed + static_cast<uint64_t>(size));
        int rank_serial = 0, rank_parallel = 0;
        const double serial_s =
            best_of(trials, [&] { rank_serial = iadof::integer_rank_serial(m); });
        const double parallel_s =
            best_of(trials, [&] { rank_parallel = iadof::integer_rank_parallel(m, threads); });
        if (rank_serial != rank_parallel) {
            std::fprintf(stderr, "rank mismatch at size %d: %d vs %d\n", size, rank_serial,
                         rank_parallel);
            return 1;
        }
        std::printf("%d,%d,%.6f,%.6f,%.2f,%d\n", size, threads, serial_s, parallel_s,
                    serial_s / parallel_s, rank_serial);
    }
    return 0;
}
