#include "iadof/solver.hpp"

#include <omp.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <random>

#include <nlohmann/json.hpp>

namespace iadof {

namespace {

using Clock = std::chrono::steady_clock;

uint64_t splitmix64(uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// Best filling seen so far, shared across workers. The packed (num, den)
// pair is readable without the lock so the bound test stays cheap; it only
// ever moves upward, so a stale read just weakens pruning for one node.
class SharedBest {
public:
    explicit SharedBest(int K) : canon_(static_cast<size_t>(K) * K, 0) {}

    Fraction load() const {
        const uint64_t p = packed_.load(std::memory_order_relaxed);
        return Fraction(static_cast<long long>(p >> 8), static_cast<long long>(p & 0xFF));
    }

    // Returns true when (frac, canon) replaced the incumbent. Must be called
    // inside the search's critical section.
    bool offer(const Fraction& frac, const std::vector<int>& canon) {
        if (frac < best_ || (frac == best_ && !(canon < canon_))) return false;
        best_ = frac;
        canon_ = canon;
        packed_.store((static_cast<uint64_t>(best_.num) << 8) | static_cast<uint64_t>(best_.den),
                      std::memory_order_relaxed);
        return true;
    }

    const std::vector<int>& canon() const { return canon_; }
    Fraction best() const { return best_; }

private:
    std::atomic<uint64_t> packed_{1};  // score 0/1
    Fraction best_{0, 1};
    std::vector<int> canon_;
};

// Depth-first enumeration of canonical fillings over a fixed cell order.
// Candidate labels at each cell are 0 and 1..min(maxso far + 1, cap), which
// visits every filling exactly once up to relabeling.
class DfsSearch {
public:
    DfsSearch(const ChannelSpec& spec, std::vector<std::pair<int, int>> order, int cap,
              bool prune, SharedBest* shared)
        : spec_(&spec), K_(spec.users()), cap_(cap), prune_(prune), shared_(shared) {
        ncells_ = static_cast<int>(order.size());
        cell_row_.reserve(ncells_);
        cell_col_.reserve(ncells_);
        watchers_.resize(ncells_);
        for (int i = 0; i < ncells_; ++i) {
            cell_row_.push_back(order[i].first);
            cell_col_.push_back(order[i].second);
            for (int p = 0; p < K_; ++p)
                if (p != order[i].first && spec.connected(p, order[i].second))
                    watchers_[i].push_back(p);
        }
        value_.assign(ncells_, 0);
        max_before_.assign(ncells_ + 1, 0);
        col_used_.assign(K_, std::vector<uint8_t>(cap_ + 1, 0));
        row_support_.assign(K_, 0);
        recv_cnt_.assign(K_, std::vector<int>(cap_ + 1, 0));
        recv_distinct_.assign(K_, 0);
    }

    void set_deadline(Clock::time_point deadline) {
        deadline_ = deadline;
        has_deadline_ = true;
    }

    // Replays an already-legal prefix, then searches the remaining cells.
    void run(const std::vector<int>& prefix) {
        for (size_t i = 0; i < prefix.size(); ++i) {
            if (prefix[i] > 0) {
                place(static_cast<int>(i), prefix[i]);
            } else {
                value_[i] = 0;
                max_before_[i + 1] = max_before_[i];
            }
        }
        dfs(static_cast<int>(prefix.size()));
    }

    // Enumerates the legal values for the cell at `depth` given the prefix.
    std::vector<int> candidates_after(const std::vector<int>& prefix) {
        for (size_t i = 0; i < prefix.size(); ++i) {
            if (prefix[i] > 0) {
                place(static_cast<int>(i), prefix[i]);
            } else {
                value_[i] = 0;
                max_before_[i + 1] = max_before_[i];
            }
        }
        const int depth = static_cast<int>(prefix.size());
        std::vector<int> out{0};
        const int c = cell_col_[depth];
        const int vmax = std::min(max_before_[depth] + 1, cap_);
        for (int v = 1; v <= vmax; ++v)
            if (!col_used_[c][v]) out.push_back(v);
        return out;
    }

    uint64_t nodes() const { return nodes_; }
    bool stopped() const { return stopped_; }

private:
    void place(int i, int v) {
        value_[i] = v;
        col_used_[cell_col_[i]][v] = 1;
        ++row_support_[cell_row_[i]];
        ++positives_;
        for (int p : watchers_[i])
            if (recv_cnt_[p][v]++ == 0) ++recv_distinct_[p];
        max_before_[i + 1] = std::max(max_before_[i], v);
    }

    void unplace(int i, int v) {
        col_used_[cell_col_[i]][v] = 0;
        --row_support_[cell_row_[i]];
        --positives_;
        for (int p : watchers_[i])
            if (--recv_cnt_[p][v] == 0) --recv_distinct_[p];
    }

    long long current_den() const {
        long long den = 0;
        for (int p = 0; p < K_; ++p)
            den = std::max<long long>(den, row_support_[p] + recv_distinct_[p]);
        return den;
    }

    void dfs(int depth) {
        if (stopped_) return;
        ++nodes_;
        if (has_deadline_ && (nodes_ & 0x1FFF) == 0 && Clock::now() > deadline_) {
            stopped_ = true;
            return;
        }
        if (depth == ncells_) {
            leaf();
            return;
        }
        if (prune_) {
            const Fraction bound(positives_ + (ncells_ - depth),
                                 std::max<long long>(1, current_den()));
            if (bound < shared_->load()) return;
        }
        value_[depth] = 0;
        max_before_[depth + 1] = max_before_[depth];
        dfs(depth + 1);
        const int c = cell_col_[depth];
        const int vmax = std::min(max_before_[depth] + 1, cap_);
        for (int v = 1; v <= vmax; ++v) {
            if (col_used_[c][v]) continue;
            place(depth, v);
            dfs(depth + 1);
            unplace(depth, v);
        }
    }

    void leaf() {
        const Fraction frac =
            positives_ == 0 ? Fraction(0, 1) : Fraction(positives_, current_den());
        if (frac < shared_->load()) return;
        IndexMatrix g = IndexMatrix::zero(K_);
        for (int i = 0; i < ncells_; ++i) g.at(cell_row_[i], cell_col_[i]) = value_[i];
        const IndexMatrix canon = canonical_relabel(g);
#pragma omp critical(iadof_solver_best)
        shared_->offer(frac, canon.cells);
    }

    const ChannelSpec* spec_;
    int K_;
    int ncells_;
    int cap_;
    bool prune_;
    SharedBest* shared_;
    std::vector<int> cell_row_, cell_col_;
    std::vector<std::vector<int>> watchers_;
    std::vector<int> value_;
    std::vector<int> max_before_;
    std::vector<std::vector<uint8_t>> col_used_;
    std::vector<int> row_support_;
    std::vector<std::vector<int>> recv_cnt_;
    std::vector<int> recv_distinct_;
    long long positives_ = 0;
    uint64_t nodes_ = 0;
    bool stopped_ = false;
    Clock::time_point deadline_{};
    bool has_deadline_ = false;
};

std::vector<std::pair<int, int>> row_major_cells(const ChannelSpec& spec) {
    std::vector<std::pair<int, int>> order;
    for (int p = 0; p < spec.users(); ++p)
        for (int q = 0; q < spec.users(); ++q)
            if (spec.message(p, q)) order.emplace_back(p, q);
    return order;
}

// Column-major order with busier receivers first inside each column; keeps
// the column-distinctness constraint tight early so pruning bites sooner.
std::vector<std::pair<int, int>> column_major_cells(const ChannelSpec& spec) {
    const int K = spec.users();
    std::vector<int> rows(K);
    for (int p = 0; p < K; ++p) rows[p] = p;
    std::stable_sort(rows.begin(), rows.end(),
                     [&](int a, int b) { return spec.row_degree(a) > spec.row_degree(b); });
    std::vector<std::pair<int, int>> order;
    for (int q = 0; q < K; ++q)
        for (int p : rows)
            if (spec.message(p, q)) order.emplace_back(p, q);
    return order;
}

SolveReport finish_report(const ChannelSpec& spec, const SharedBest& best, bool optimal,
                          uint64_t nodes, double elapsed) {
    SolveReport report;
    report.best_g.K = spec.users();
    report.best_g.cells = best.canon();
    report.best_score = score(report.best_g, spec);
    report.optimal = optimal;
    report.nodes_explored = nodes;
    report.elapsed_s = elapsed;
    return report;
}

SolveReport run_enumeration(const ChannelSpec& spec, const SolveConfig& config, bool prune) {
    const auto t0 = Clock::now();
    if (config.max_label && *config.max_label < 1)
        throw std::invalid_argument("max_label must be >= 1");
    const std::vector<std::pair<int, int>> order =
        prune ? column_major_cells(spec) : row_major_cells(spec);
    const int cap =
        std::max(1, std::min<int>(config.max_label.value_or(spec.message_count()),
                                  static_cast<int>(order.size()) == 0
                                      ? 1
                                      : static_cast<int>(order.size())));
    SharedBest best(spec.users());
    const int jobs = std::max(1, config.parallelism);
    uint64_t nodes = 0;
    bool stopped = false;

    const auto deadline = config.time_budget_s
                              ? std::optional<Clock::time_point>(
                                    t0 + std::chrono::duration_cast<Clock::duration>(
                                             std::chrono::duration<double>(*config.time_budget_s)))
                              : std::nullopt;

    if (jobs == 1) {
        DfsSearch search(spec, order, cap, prune, &best);
        if (deadline) search.set_deadline(*deadline);
        search.run({});
        nodes = search.nodes();
        stopped = search.stopped();
    } else {
        // Grow a frontier of legal prefixes, then let each worker finish one
        // subtree. The tie rule in SharedBest makes the answer independent of
        // completion order.
        std::vector<std::vector<int>> frontier{{}};
        size_t depth = 0;
        while (depth < order.size() && frontier.size() < static_cast<size_t>(4 * jobs)) {
            std::vector<std::vector<int>> next;
            for (const std::vector<int>& prefix : frontier) {
                DfsSearch probe(spec, order, cap, false, &best);
                for (int v : probe.candidates_after(prefix)) {
                    std::vector<int> extended = prefix;
                    extended.push_back(v);
                    next.push_back(std::move(extended));
                }
            }
            frontier = std::move(next);
            ++depth;
        }
        std::atomic<uint64_t> total_nodes{0};
        std::atomic<bool> any_stopped{false};
        const long long tasks = static_cast<long long>(frontier.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(jobs)
        for (long long i = 0; i < tasks; ++i) {
            DfsSearch search(spec, order, cap, prune, &best);
            if (deadline) search.set_deadline(*deadline);
            search.run(frontier[i]);
            total_nodes.fetch_add(search.nodes(), std::memory_order_relaxed);
            if (search.stopped()) any_stopped.store(true, std::memory_order_relaxed);
        }
        nodes = total_nodes.load();
        stopped = any_stopped.load();
    }

    return finish_report(spec, best, !stopped, nodes,
                         std::chrono::duration<double>(Clock::now() - t0).count());
}

// Legal single-cell values at (p, q): clear it, reuse any label not already
// in the column, or open one fresh label.
std::vector<int> cell_candidates(const IndexMatrix& g, int p, int q, int cap) {
    std::vector<int> out{0};
    const int vmax = std::min(max_label(g) + 1, cap);
    for (int v = 1; v <= vmax; ++v) {
        bool used = false;
        for (int r = 0; r < g.K && !used; ++r)
            if (r != p && g.at(r, q) == v) used = true;
        if (!used) out.push_back(v);
    }
    return out;
}

IndexMatrix row_label_fill(const ChannelSpec& spec) {
    IndexMatrix g = IndexMatrix::zero(spec.users());
    for (int p = 0; p < spec.users(); ++p)
        for (int q = 0; q < spec.users(); ++q)
            if (spec.message(p, q)) g.at(p, q) = p + 1;
    return g;
}

IndexMatrix random_fill(const ChannelSpec& spec, int cap, std::mt19937_64& rng) {
    IndexMatrix g = IndexMatrix::zero(spec.users());
    for (int p = 0; p < spec.users(); ++p)
        for (int q = 0; q < spec.users(); ++q) {
            if (!spec.message(p, q)) continue;
            const std::vector<int> options = cell_candidates(g, p, q, cap);
            g.at(p, q) = options[rng() % options.size()];
        }
    return g;
}

// Best-improvement hill climb; returns the number of score evaluations.
uint64_t climb(const ChannelSpec& spec, IndexMatrix& g, int cap,
               const std::optional<Clock::time_point>& deadline) {
    uint64_t evals = 0;
    Fraction current = score(g, spec).value();
    for (;;) {
        if (deadline && Clock::now() > *deadline) break;
        Fraction best_frac = current;
        int best_p = -1, best_q = -1, best_v = 0;
        for (int p = 0; p < g.K; ++p) {
            for (int q = 0; q < g.K; ++q) {
                if (!spec.message(p, q)) continue;
                const int orig = g.at(p, q);
                for (int v : cell_candidates(g, p, q, cap)) {
                    if (v == orig) continue;
                    g.at(p, q) = v;
                    const Fraction s = score(g, spec).value();
                    ++evals;
                    if (s > best_frac) {
                        best_frac = s;
                        best_p = p;
                        best_q = q;
                        best_v = v;
                    }
                }
                g.at(p, q) = orig;
            }
        }
        if (best_p < 0) break;
        g.at(best_p, best_q) = best_v;
        current = best_frac;
    }
    return evals;
}

}  // namespace

SolveReport brute_force(const ChannelSpec& spec, int max_cells) {
    const int support = spec.message_count();
    if (support > max_cells)
        throw SolverRefusal("brute force refused: " + std::to_string(support) +
                            " support cells exceed the cap of " + std::to_string(max_cells));
    SolveConfig config;
    config.mode = SolveConfig::Mode::BruteForce;
    config.brute_force_cell_cap = max_cells;
    return run_enumeration(spec, config, /*prune=*/false);
}

SolveReport local_search(const ChannelSpec& spec, const IndexMatrix& start,
                         const SolveConfig& config) {
    const auto t0 = Clock::now();
    if (config.max_label && *config.max_label < 1)
        throw std::invalid_argument("max_label must be >= 1");
    score(start, spec);  // rejects invalid or mismatched starts
    const int cap = std::max(1, config.max_label.value_or(spec.message_count()));
    const int restarts = std::max(1, config.restarts);
    const auto deadline = config.time_budget_s
                              ? std::optional<Clock::time_point>(
                                    t0 + std::chrono::duration_cast<Clock::duration>(
                                             std::chrono::duration<double>(*config.time_budget_s)))
                              : std::nullopt;

    SharedBest best(spec.users());
    std::atomic<uint64_t> total_evals{0};
    const int jobs = std::max(1, config.parallelism);

#pragma omp parallel for schedule(dynamic, 1) num_threads(jobs)
    for (int r = 0; r < restarts; ++r) {
        if (deadline && Clock::now() > *deadline && r > 0) continue;
        IndexMatrix g;
        if (r == 0) {
            g = start;
        } else if (r == 1) {
            g = row_label_fill(spec);
        } else {
            std::mt19937_64 rng(splitmix64(config.seed ^ (0x9E3779B97F4A7C15ull * r)));
            g = random_fill(spec, cap, rng);
        }
        total_evals.fetch_add(climb(spec, g, cap, deadline), std::memory_order_relaxed);
        const ScoreValue sv = score(g, spec);
        const IndexMatrix canon = canonical_relabel(g);
#pragma omp critical(iadof_solver_best)
        best.offer(sv.value(), canon.cells);
    }

    return finish_report(spec, best, /*optimal=*/false, total_evals.load(),
                         std::chrono::duration<double>(Clock::now() - t0).count());
}

SolveReport solve(const ChannelSpec& spec, const SolveConfig& config) {
    switch (config.mode) {
        case SolveConfig::Mode::Exact:
            return run_enumeration(spec, config, /*prune=*/true);
        case SolveConfig::Mode::BruteForce: {
            const int support = spec.message_count();
            if (support > config.brute_force_cell_cap)
                throw SolverRefusal("brute force refused: " + std::to_string(support) +
                                    " support cells exceed the cap of " +
                                    std::to_string(config.brute_force_cell_cap));
            return run_enumeration(spec, config, /*prune=*/false);
        }
        case SolveConfig::Mode::Heuristic:
            return local_search(spec, IndexMatrix::zero(spec.users()), config);
    }
    throw std::logic_error("unknown solve mode");
}

std::string to_json_text(const SolveReport& report, bool include_timing) {
    nlohmann::json rows = nlohmann::json::array();
    for (int p = 0; p < report.best_g.K; ++p) {
        nlohmann::json row = nlohmann::json::array();
        for (int q = 0; q < report.best_g.K; ++q) row.push_back(report.best_g.at(p, q));
        rows.push_back(std::move(row));
    }
    nlohmann::json per_row = nlohmann::json::array();
    for (const RowBreakdown& r : report.best_score.per_row)
        per_row.push_back({{"row_support", r.row_support}, {"interference", r.interference}});
    nlohmann::json j{
        {"best_g", {{"K", report.best_g.K}, {"rows", std::move(rows)}}},
        {"best_score",
         {{"numerator", report.best_score.numerator},
          {"denominator", report.best_score.denominator},
          {"value", report.best_score.value().str()},
          {"per_row", std::move(per_row)}}},
        {"optimal", report.optimal},
        {"nodes_explored", report.nodes_explored},
    };
    if (include_timing) j["elapsed_s"] = report.elapsed_s;
    return j.dump(2) + "\n";
}

}  // namespace iadof
