#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "iadof/puzzle.hpp"
#include "iadof/rank.hpp"

namespace iadof {

// Raised when a verification or build would exceed the configured size
// budget instead of silently taking forever.
class InstanceTooLarge : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class RankBackend { Exact, Float };

// Channel coefficients whose products steer the precoder of label g: the
// links (p, q) that exist physically and deliver label g from some other
// row's transmitter into receiver p.
std::map<int, std::set<std::pair<int, int>>> interference_sets(const ChannelSpec& spec,
                                                               const IndexMatrix& g);

// One multiplicative building block of the scheme, always a length-T vector:
// a real channel diagonal, a synthetic diagonal padding a short set, or the
// seed opening a label's precoder.
struct Factor {
    enum class Kind { Channel, Synthetic, Seed };
    Kind kind;
    int p = -1;     // Channel only
    int q = -1;     // Channel only
    int label = 0;  // Synthetic and Seed: the label served
    int index = 0;  // Synthetic: position among that label's padding
};

// Everything about the scheme for (spec, g, eta) that does not depend on a
// coefficient draw: padded factor sets, block length, column budgets.
struct AlignmentGeometry {
    ChannelSpec spec;
    IndexMatrix g;
    int eta = 1;
    int gamma = 0;            // padded size of every factor set
    long long block_len = 0;  // symbol extension T
    int p_max = 0;            // receiver whose matrix spends the whole block
    long long precoder_cols = 0;    // eta^gamma
    long long expanded_cols = 0;    // (eta+1)^gamma

    std::vector<int> labels;        // distinct labels, ascending
    std::vector<int> real_set_size; // per label: members before padding
    std::vector<std::vector<int>> padded_sets;  // per label: gamma factor ids
    std::vector<int> seed_factor;               // per label
    std::vector<Factor> factors;
    std::vector<int> channel_factor;            // p * K + q -> id, -1 off-link

    // Receiver p decodes desired_blocks[p] (channel factor, label index)
    // pairs, one per filled cell in column order, against the expanded
    // spaces of interference_blocks[p] (label indices, ascending).
    std::vector<std::vector<std::pair<int, int>>> desired_blocks;
    std::vector<std::vector<int>> interference_blocks;
    std::vector<RowBreakdown> per_row;
    std::vector<long long> desired_cols, interference_cols, total_cols;

    int label_index(int label) const;  // -1 when the label is unused
};

// Computes the geometry. Throws InvalidIndexMatrix when g breaks the puzzle
// rules and InstanceTooLarge when a matrix would exceed column_cap columns.
AlignmentGeometry plan_alignment(const ChannelSpec& spec, const IndexMatrix& g, int eta,
                                 long long column_cap = 4096);

// A geometry plus one coefficient draw. Coefficients are dyadic: an integer
// numerator in [-2^20, 2^20] \ {0} over the fixed denominator 2^10, so exact
// arithmetic stays in the integers.
struct AlignmentInstance {
    AlignmentGeometry geom;
    uint64_t seed = 0;
    std::vector<std::vector<long long>> factor_values;  // factor id -> T numerators

    static constexpr int kScaleBits = 10;
    static constexpr int kMagnitudeBits = 20;
};

AlignmentInstance sample_instance(const AlignmentGeometry& geom, uint64_t seed);

// Numerator matrices. The common power-of-two denominator is constant down
// each column, so ranks agree with the rational-valued matrices.
IntegerMatrix build_precoder(const AlignmentInstance& inst, int label_index);
IntegerMatrix build_expanded(const AlignmentInstance& inst, int label_index);
IntegerMatrix build_receiver_matrix(const AlignmentInstance& inst, int p);

// Same matrices over doubles, unnormalized, for the float backend.
std::vector<double> build_receiver_matrix_float(const AlignmentInstance& inst, int p);

struct StructuralIssue {
    std::string what;
    int p = -1;
    int q = -1;
};

struct ReceiverReport {
    int p = 0;
    long long desired_cols = 0;
    long long interference_cols = 0;
    long long total_cols = 0;
    bool full_rank = false;
    Fraction dof_ratio{0, 1};  // desired_cols / block_len
};

struct VerificationReport {
    std::string backend;
    int eta = 1;
    int gamma = 0;
    long long block_len = 0;
    int p_max = 0;
    int trials = 0;
    uint64_t seed = 0;
    bool valid_g = false;
    bool property1_ok = false;
    bool exponents_injective = false;
    bool containment_ok = false;
    bool columns_fit = false;
    std::vector<std::pair<int, int>> set_sizes;  // (label, real members)
    std::vector<StructuralIssue> issues;
    std::vector<ReceiverReport> per_receiver;
    int failed_trial = -1;  // first draw with a rank miss, -1 if none
    bool pass = false;
};

struct VerifyConfig {
    int eta = 1;
    int trials = 3;
    uint64_t seed = 0;
    RankBackend backend = RankBackend::Exact;
    long long column_cap = 4096;
    int parallelism = 1;
};

// Checks that the scheme induced by (spec, g, eta) delivers every filled
// cell: structural rules first (puzzle validity, live links, the desired
// coefficient staying out of its own label's factor set, column budgets,
// exponent-pattern distinctness, span containment), then full column rank of
// every receiver matrix across the requested draws. Structural failures are
// reported, not thrown.
VerificationReport verify(const ChannelSpec& spec, const IndexMatrix& g,
                          const VerifyConfig& config = {});

// Timing never appears in the text, so fixed seeds give byte-stable output.
std::string to_json_text(const VerificationReport& report);

}  // namespace iadof
