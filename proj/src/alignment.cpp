#include "iadof/alignment.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>

#include <nlohmann/json.hpp>

namespace iadof {

namespace {

uint64_t splitmix64(uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// base^exp clamped so downstream products stay comparable against caps.
long long ipow_sat(long long base, int exp) {
    long long out = 1;
    for (int i = 0; i < exp; ++i) {
        if (out > (1ll << 50) / std::max<long long>(base, 1)) return 1ll << 50;
        out *= base;
    }
    return out;
}

// Exponent of factor position i in column n, counting the first position as
// the most significant digit. Digits run 1..base.
int exponent_digit(long long n, int i, int gamma, long long base) {
    long long stride = 1;
    for (int k = i + 1; k < gamma; ++k) stride *= base;
    return static_cast<int>(1 + (n / stride) % base);
}

}  // namespace

std::map<int, std::set<std::pair<int, int>>> interference_sets(const ChannelSpec& spec,
                                                               const IndexMatrix& g) {
    if (g.K != spec.users())
        throw std::invalid_argument("index matrix and channel spec sizes differ");
    std::map<int, std::set<std::pair<int, int>>> sets;
    const int K = g.K;
    for (int p = 0; p < K; ++p)
        for (int q = 0; q < K; ++q) {
            if (!spec.connected(p, q)) continue;
            for (int other = 0; other < K; ++other) {
                if (other == p) continue;
                const int label = g.at(other, q);
                if (label > 0) sets[label].insert({p, q});
            }
        }
    return sets;
}

int AlignmentGeometry::label_index(int label) const {
    const auto it = std::lower_bound(labels.begin(), labels.end(), label);
    if (it == labels.end() || *it != label) return -1;
    return static_cast<int>(it - labels.begin());
}

AlignmentGeometry plan_alignment(const ChannelSpec& spec, const IndexMatrix& g, int eta,
                                 long long column_cap) {
    if (g.K != spec.users())
        throw std::invalid_argument("index matrix and channel spec sizes differ");
    if (eta < 1) throw std::invalid_argument("eta must be >= 1");
    if (column_cap < 1) throw std::invalid_argument("column cap must be >= 1");

    AlignmentGeometry geom{spec, g};
    geom.eta = eta;
    const int K = spec.users();

    for (int v : g.cells)
        if (v > 0) geom.labels.push_back(v);
    std::sort(geom.labels.begin(), geom.labels.end());
    geom.labels.erase(std::unique(geom.labels.begin(), geom.labels.end()), geom.labels.end());
    const int nlabels = static_cast<int>(geom.labels.size());

    const auto sets = interference_sets(spec, g);
    geom.real_set_size.assign(nlabels, 0);
    for (int li = 0; li < nlabels; ++li) {
        const auto it = sets.find(geom.labels[li]);
        if (it != sets.end()) geom.real_set_size[li] = static_cast<int>(it->second.size());
        geom.gamma = std::max(geom.gamma, geom.real_set_size[li]);
    }

    // Factor registry: every live channel link first, then each label's
    // padding, then each label's seed.
    geom.channel_factor.assign(static_cast<size_t>(K) * K, -1);
    for (int p = 0; p < K; ++p)
        for (int q = 0; q < K; ++q)
            if (spec.connected(p, q)) {
                geom.channel_factor[static_cast<size_t>(p) * K + q] =
                    static_cast<int>(geom.factors.size());
                geom.factors.push_back({Factor::Kind::Channel, p, q, 0, 0});
            }
    geom.padded_sets.assign(nlabels, {});
    for (int li = 0; li < nlabels; ++li) {
        const int label = geom.labels[li];
        const auto it = sets.find(label);
        if (it != sets.end())
            for (const auto& [p, q] : it->second)
                geom.padded_sets[li].push_back(
                    geom.channel_factor[static_cast<size_t>(p) * K + q]);
        for (int j = geom.real_set_size[li]; j < geom.gamma; ++j) {
            geom.padded_sets[li].push_back(static_cast<int>(geom.factors.size()));
            geom.factors.push_back({Factor::Kind::Synthetic, -1, -1, label, j});
        }
    }
    geom.seed_factor.assign(nlabels, -1);
    for (int li = 0; li < nlabels; ++li) {
        geom.seed_factor[li] = static_cast<int>(geom.factors.size());
        geom.factors.push_back({Factor::Kind::Seed, -1, -1, geom.labels[li], 0});
    }

    geom.precoder_cols = ipow_sat(eta, geom.gamma);
    geom.expanded_cols = ipow_sat(eta + 1, geom.gamma);

    geom.desired_blocks.assign(K, {});
    geom.interference_blocks.assign(K, {});
    geom.per_row.clear();
    geom.desired_cols.assign(K, 0);
    geom.interference_cols.assign(K, 0);
    geom.total_cols.assign(K, 0);
    for (int p = 0; p < K; ++p) {
        int support = 0;
        for (int q = 0; q < K; ++q) {
            const int label = g.at(p, q);
            if (label <= 0) continue;
            ++support;
            geom.desired_blocks[p].emplace_back(
                geom.channel_factor[static_cast<size_t>(p) * K + q], geom.label_index(label));
        }
        const IntMatrix heard = submatrix(g, spec, p);
        std::vector<int> seen;
        for (int v : heard.cells)
            if (v > 0) seen.push_back(v);
        std::sort(seen.begin(), seen.end());
        seen.erase(std::unique(seen.begin(), seen.end()), seen.end());
        for (int v : seen) geom.interference_blocks[p].push_back(geom.label_index(v));

        geom.per_row.push_back({support, static_cast<int>(seen.size())});
        const __int128 desired = static_cast<__int128>(support) * geom.precoder_cols;
        const __int128 interference =
            static_cast<__int128>(seen.size()) * geom.expanded_cols;
        const __int128 total = desired + interference;
        if (total > column_cap)
            throw InstanceTooLarge("receiver " + std::to_string(p) + " would need " +
                                   std::to_string(static_cast<long long>(total)) +
                                   " columns, past the cap of " + std::to_string(column_cap));
        geom.desired_cols[p] = static_cast<long long>(desired);
        geom.interference_cols[p] = static_cast<long long>(interference);
        geom.total_cols[p] = static_cast<long long>(total);
    }

    // The block length is the widest receiver's column count, so that
    // receiver spends the whole block and everyone else fits inside it.
    geom.block_len = 0;
    geom.p_max = 0;
    for (int p = 0; p < K; ++p)
        if (geom.total_cols[p] > geom.block_len) {
            geom.block_len = geom.total_cols[p];
            geom.p_max = p;
        }
    return geom;
}

AlignmentInstance sample_instance(const AlignmentGeometry& geom, uint64_t seed) {
    AlignmentInstance inst{geom, seed, {}};
    std::mt19937_64 rng(splitmix64(seed));
    const long long T = geom.block_len;
    inst.factor_values.resize(geom.factors.size());
    for (size_t f = 0; f < geom.factors.size(); ++f) {
        inst.factor_values[f].resize(T);
        for (long long t = 0; t < T; ++t) {
            const uint64_t r = rng();
            const long long mag =
                static_cast<long long>(r & ((1ull << AlignmentInstance::kMagnitudeBits) - 1)) + 1;
            inst.factor_values[f][t] = (r >> AlignmentInstance::kMagnitudeBits) & 1 ? -mag : mag;
        }
    }
    return inst;
}

namespace {

// T x base^gamma block: entry (t, n) = extra(t) * seed(t) * prod factor^digit.
IntegerMatrix power_block(const AlignmentInstance& inst, int label_index, long long base,
                          int extra_factor) {
    const AlignmentGeometry& geom = inst.geom;
    const long long T = geom.block_len;
    long long cols = 1;
    for (int i = 0; i < geom.gamma; ++i) cols *= base;
    IntegerMatrix out(static_cast<int>(T), static_cast<int>(cols));
    const std::vector<int>& set = geom.padded_sets[label_index];
    const std::vector<long long>& seed = inst.factor_values[geom.seed_factor[label_index]];
    for (long long n = 0; n < cols; ++n) {
        for (long long t = 0; t < T; ++t) {
            mpz_class acc = static_cast<long>(seed[t]);
            if (extra_factor >= 0) acc *= static_cast<long>(inst.factor_values[extra_factor][t]);
            for (int i = 0; i < geom.gamma; ++i) {
                const long f = static_cast<long>(inst.factor_values[set[i]][t]);
                const int e = exponent_digit(n, i, geom.gamma, base);
                for (int rep = 0; rep < e; ++rep) acc *= f;
            }
            out.at(static_cast<int>(t), static_cast<int>(n)) = std::move(acc);
        }
    }
    return out;
}

std::vector<double> power_block_float(const AlignmentInstance& inst, int label_index,
                                      long long base, int extra_factor) {
    const AlignmentGeometry& geom = inst.geom;
    const long long T = geom.block_len;
    long long cols = 1;
    for (int i = 0; i < geom.gamma; ++i) cols *= base;
    std::vector<double> out(static_cast<size_t>(T) * cols);
    const std::vector<int>& set = geom.padded_sets[label_index];
    const std::vector<long long>& seed = inst.factor_values[geom.seed_factor[label_index]];
    const double scale = std::ldexp(1.0, -AlignmentInstance::kScaleBits);
    for (long long n = 0; n < cols; ++n)
        for (long long t = 0; t < T; ++t) {
            double acc = seed[t] * scale;
            if (extra_factor >= 0) acc *= inst.factor_values[extra_factor][t] * scale;
            for (int i = 0; i < geom.gamma; ++i) {
                const double f = inst.factor_values[set[i]][t] * scale;
                const int e = exponent_digit(n, i, geom.gamma, base);
                for (int rep = 0; rep < e; ++rep) acc *= f;
            }
            out[static_cast<size_t>(t) * cols + n] = acc;
        }
    return out;
}

void copy_columns(IntegerMatrix& dst, long long& next_col, const IntegerMatrix& src) {
    for (int c = 0; c < src.cols; ++c, ++next_col)
        for (int r = 0; r < src.rows; ++r)
            dst.at(r, static_cast<int>(next_col)) = src.at(r, c);
}

}  // namespace

IntegerMatrix build_precoder(const AlignmentInstance& inst, int label_index) {
    return power_block(inst, label_index, inst.geom.eta, -1);
}

IntegerMatrix build_expanded(const AlignmentInstance& inst, int label_index) {
    return power_block(inst, label_index, inst.geom.eta + 1, -1);
}

IntegerMatrix build_receiver_matrix(const AlignmentInstance& inst, int p) {
    const AlignmentGeometry& geom = inst.geom;
    IntegerMatrix out(static_cast<int>(geom.block_len), static_cast<int>(geom.total_cols[p]));
    long long next_col = 0;
    for (const auto& [chan, li] : geom.desired_blocks[p])
        copy_columns(out, next_col, power_block(inst, li, geom.eta, chan));
    for (int li : geom.interference_blocks[p])
        copy_columns(out, next_col, power_block(inst, li, geom.eta + 1, -1));
    return out;
}

std::vector<double> build_receiver_matrix_float(const AlignmentInstance& inst, int p) {
    const AlignmentGeometry& geom = inst.geom;
    const long long T = geom.block_len;
    const long long cols = geom.total_cols[p];
    std::vector<double> out(static_cast<size_t>(T) * cols);
    long long next = 0;
    auto paste = [&](const std::vector<double>& block, long long bcols) {
        for (long long c = 0; c < bcols; ++c, ++next)
            for (long long t = 0; t < T; ++t)
                out[static_cast<size_t>(t) * cols + next] = block[static_cast<size_t>(t) * bcols + c];
    };
    for (const auto& [chan, li] : geom.desired_blocks[p])
        paste(power_block_float(inst, li, geom.eta, chan), geom.precoder_cols);
    for (int li : geom.interference_blocks[p])
        paste(power_block_float(inst, li, geom.eta + 1, -1), geom.expanded_cols);
    return out;
}

namespace {

// Every column of a receiver matrix, summarized as its factor multiset. Two
// equal summaries would be proportional for every draw, so distinctness is
// necessary for generic full rank.
std::set<std::vector<int>> column_signatures(const AlignmentGeometry& geom, int p,
                                             long long* column_count) {
    std::set<std::vector<int>> signatures;
    long long count = 0;
    auto add = [&](int label_idx, long long base, int extra) {
        const std::vector<int>& set = geom.padded_sets[label_idx];
        long long cols = 1;
        for (int i = 0; i < geom.gamma; ++i) cols *= base;
        for (long long n = 0; n < cols; ++n, ++count) {
            std::map<int, int> exps;
            if (extra >= 0) exps[extra] += 1;
            for (int i = 0; i < geom.gamma; ++i)
                exps[set[i]] += exponent_digit(n, i, geom.gamma, base);
            std::vector<int> key{geom.seed_factor[label_idx]};
            for (const auto& [fid, e] : exps) {
                key.push_back(fid);
                key.push_back(e);
            }
            signatures.insert(std::move(key));
        }
    };
    for (const auto& [chan, li] : geom.desired_blocks[p]) add(li, geom.eta, chan);
    for (int li : geom.interference_blocks[p]) add(li, geom.eta + 1, -1);
    *column_count = count;
    return signatures;
}

// Index of the expanded-space column matching precoder column n after one
// extra hit of set position j.
long long shifted_column(const AlignmentGeometry& geom, long long n, int j) {
    long long out = 0;
    for (int i = 0; i < geom.gamma; ++i) {
        int e = exponent_digit(n, i, geom.gamma, geom.eta);
        if (i == j) ++e;
        out = out * (geom.eta + 1) + (e - 1);
    }
    return out;
}

bool containment_holds_exact(const AlignmentInstance& inst) {
    const AlignmentGeometry& geom = inst.geom;
    for (size_t li = 0; li < geom.labels.size(); ++li) {
        const IntegerMatrix expanded = build_expanded(inst, static_cast<int>(li));
        for (int j = 0; j < geom.real_set_size[li]; ++j) {
            const IntegerMatrix hit =
                power_block(inst, static_cast<int>(li), geom.eta, geom.padded_sets[li][j]);
            for (long long n = 0; n < geom.precoder_cols; ++n) {
                const long long target = shifted_column(geom, n, j);
                for (int t = 0; t < hit.rows; ++t)
                    if (hit.at(t, static_cast<int>(n)) !=
                        expanded.at(t, static_cast<int>(target)))
                        return false;
            }
        }
    }
    return true;
}

bool containment_holds_float(const AlignmentInstance& inst) {
    const AlignmentGeometry& geom = inst.geom;
    const long long T = geom.block_len;
    for (size_t li = 0; li < geom.labels.size(); ++li) {
        const std::vector<double> expanded =
            power_block_float(inst, static_cast<int>(li), geom.eta + 1, -1);
        for (int j = 0; j < geom.real_set_size[li]; ++j) {
            const std::vector<double> hit =
                power_block_float(inst, static_cast<int>(li), geom.eta, geom.padded_sets[li][j]);
            for (long long n = 0; n < geom.precoder_cols; ++n) {
                const long long target = shifted_column(geom, n, j);
                for (long long t = 0; t < T; ++t) {
                    const double a = hit[static_cast<size_t>(t) * geom.precoder_cols + n];
                    const double b = expanded[static_cast<size_t>(t) * geom.expanded_cols + target];
                    if (std::abs(a - b) > 1e-9 * std::max(std::abs(a), std::abs(b)))
                        return false;
                }
            }
        }
    }
    return true;
}

int receiver_rank(const AlignmentInstance& inst, int p, RankBackend backend) {
    if (backend == RankBackend::Exact)
        return integer_rank_serial(build_receiver_matrix(inst, p));
    const long long T = inst.geom.block_len;
    const long long cols = inst.geom.total_cols[p];
    std::vector<double> cells = build_receiver_matrix_float(inst, p);
    for (long long c = 0; c < cols; ++c) {
        double peak = 0;
        for (long long t = 0; t < T; ++t)
            peak = std::max(peak, std::abs(cells[static_cast<size_t>(t) * cols + c]));
        if (peak > 0)
            for (long long t = 0; t < T; ++t) cells[static_cast<size_t>(t) * cols + c] /= peak;
    }
    return float_rank(cells, static_cast<int>(T), static_cast<int>(cols));
}

}  // namespace

VerificationReport verify(const ChannelSpec& spec, const IndexMatrix& g,
                          const VerifyConfig& config) {
    if (g.K != spec.users())
        throw std::invalid_argument("index matrix and channel spec sizes differ");
    if (config.eta < 1) throw std::invalid_argument("eta must be >= 1");
    if (config.trials < 1) throw std::invalid_argument("trials must be >= 1");

    VerificationReport report;
    report.backend = config.backend == RankBackend::Exact ? "exact" : "float";
    report.eta = config.eta;
    report.trials = config.trials;
    report.seed = config.seed;

    const ValidationResult check = validate(g, spec);
    report.valid_g = check.ok();
    for (const Violation& v : check.violations)
        report.issues.push_back({describe(v), v.row_a, v.col});

    bool live_links = true;
    for (int p = 0; p < g.K; ++p)
        for (int q = 0; q < g.K; ++q)
            if (g.at(p, q) > 0 && !spec.connected(p, q)) {
                live_links = false;
                report.issues.push_back(
                    {"desired cell rides a dead link, no coefficient can carry it", p, q});
            }

    const auto sets = interference_sets(spec, g);
    report.property1_ok = true;
    for (int p = 0; p < g.K; ++p)
        for (int q = 0; q < g.K; ++q) {
            const int label = g.at(p, q);
            if (label <= 0) continue;
            const auto it = sets.find(label);
            if (it != sets.end() && it->second.count({p, q})) {
                report.property1_ok = false;
                report.issues.push_back(
                    {"desired coefficient appears in its own label's factor set", p, q});
            }
        }

    const AlignmentGeometry geom = plan_alignment(spec, g, config.eta, config.column_cap);
    report.gamma = geom.gamma;
    report.block_len = geom.block_len;
    report.p_max = geom.p_max;
    for (size_t li = 0; li < geom.labels.size(); ++li)
        report.set_sizes.emplace_back(geom.labels[li], geom.real_set_size[li]);

    report.columns_fit = true;
    for (int p = 0; p < g.K; ++p)
        if (geom.total_cols[p] > geom.block_len) report.columns_fit = false;

    report.exponents_injective = true;
    for (int p = 0; p < g.K; ++p) {
        long long count = 0;
        const auto signatures = column_signatures(geom, p, &count);
        if (static_cast<long long>(signatures.size()) != count)
            report.exponents_injective = false;
    }

    report.per_receiver.resize(g.K);
    for (int p = 0; p < g.K; ++p) {
        ReceiverReport& r = report.per_receiver[p];
        r.p = p;
        r.desired_cols = geom.desired_cols[p];
        r.interference_cols = geom.interference_cols[p];
        r.total_cols = geom.total_cols[p];
        r.dof_ratio = geom.block_len == 0 ? Fraction(0, 1)
                                          : Fraction(geom.desired_cols[p], geom.block_len);
        r.full_rank = false;
    }

    const bool structural_ok = report.valid_g && live_links && report.property1_ok &&
                               report.columns_fit && report.exponents_injective;
    if (!structural_ok) {
        report.containment_ok = false;
        report.pass = false;
        return report;
    }
    if (geom.block_len == 0) {
        // Nothing is sent; the empty claim holds.
        report.containment_ok = true;
        for (ReceiverReport& r : report.per_receiver) r.full_rank = true;
        report.pass = true;
        return report;
    }

    if (config.backend == RankBackend::Float) {
        const long long worst_bits =
            AlignmentInstance::kMagnitudeBits *
            (2ll + static_cast<long long>(geom.gamma) * (config.eta + 1));
        if (worst_bits > 960)
            throw InstanceTooLarge("float backend would overflow doubles, use the exact backend");
    }

    std::vector<uint8_t> rank_ok(static_cast<size_t>(g.K), 1);
    report.containment_ok = true;
    for (int trial = 0; trial < config.trials && report.failed_trial < 0; ++trial) {
        const uint64_t trial_seed =
            config.seed + 0x9E3779B97F4A7C15ull * static_cast<uint64_t>(trial + 1);
        const AlignmentInstance inst = sample_instance(geom, trial_seed);
        const bool contained = config.backend == RankBackend::Exact
                                   ? containment_holds_exact(inst)
                                   : containment_holds_float(inst);
        if (!contained) report.containment_ok = false;
        std::vector<uint8_t> trial_ok(static_cast<size_t>(g.K), 1);
        const int jobs = std::max(1, config.parallelism);
#pragma omp parallel for schedule(dynamic, 1) num_threads(jobs)
        for (int p = 0; p < g.K; ++p) {
            const int rank = receiver_rank(inst, p, config.backend);
            trial_ok[p] = rank == geom.total_cols[p] ? 1 : 0;
        }
        for (int p = 0; p < g.K; ++p)
            if (!trial_ok[p]) {
                rank_ok[p] = 0;
                if (report.failed_trial < 0) report.failed_trial = trial;
            }
        if (!contained && report.failed_trial < 0) report.failed_trial = trial;
    }

    bool all_full = true;
    for (int p = 0; p < g.K; ++p) {
        report.per_receiver[p].full_rank = rank_ok[p] != 0;
        if (!rank_ok[p]) all_full = false;
    }
    report.pass = all_full && report.containment_ok;
    return report;
}

std::string to_json_text(const VerificationReport& report) {
    nlohmann::json issues = nlohmann::json::array();
    for (const StructuralIssue& issue : report.issues)
        issues.push_back({{"what", issue.what}, {"p", issue.p}, {"q", issue.q}});
    nlohmann::json sizes = nlohmann::json::array();
    for (const auto& [label, size] : report.set_sizes)
        sizes.push_back({{"label", label}, {"members", size}});
    nlohmann::json receivers = nlohmann::json::array();
    for (const ReceiverReport& r : report.per_receiver)
        receivers.push_back({{"p", r.p},
                             {"desired_cols", r.desired_cols},
                             {"interference_cols", r.interference_cols},
                             {"total_cols", r.total_cols},
                             {"full_rank", r.full_rank},
                             {"dof_ratio", r.dof_ratio.str()}});
    nlohmann::json j{{"backend", report.backend},
                     {"eta", report.eta},
                     {"gamma", report.gamma},
                     {"block_len", report.block_len},
                     {"p_max", report.p_max},
                     {"trials", report.trials},
                     {"seed", report.seed},
                     {"valid_g", report.valid_g},
                     {"property1_ok", report.property1_ok},
                     {"exponents_injective", report.exponents_injective},
                     {"containment_ok", report.containment_ok},
                     {"columns_fit", report.columns_fit},
                     {"set_sizes", std::move(sizes)},
                     {"issues", std::move(issues)},
                     {"per_receiver", std::move(receivers)},
                     {"failed_trial", report.failed_trial},
                     {"pass", report.pass}};
    return j.dump(2) + "\n";
}

}  // namespace iadof
