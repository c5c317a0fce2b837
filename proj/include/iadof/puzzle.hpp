#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "iadof/fraction.hpp"
#include "iadof/topology.hpp"

namespace iadof {

// A filling of the number puzzle: a K x K matrix of nonnegative labels.
// Cell (p, q) > 0 means transmitter q sends the message for receiver p and
// every equal label within the matrix shares one precoder; 0 means the
// message is dropped.
struct IndexMatrix {
    int K = 0;
    std::vector<int> cells;  // row-major

    static IndexMatrix zero(int K);
    static IndexMatrix from_rows(const std::vector<std::vector<int>>& rows);

    int at(int p, int q) const { return cells[static_cast<size_t>(p) * K + q]; }
    int& at(int p, int q) { return cells[static_cast<size_t>(p) * K + q]; }

    bool operator==(const IndexMatrix&) const = default;
};

// Plain-text layout mirrors the channel spec: a line with K, then K rows.
IndexMatrix parse_index_matrix(std::string_view text);
std::string to_plain_text(const IndexMatrix& g);

// A broken puzzle rule. ForbiddenCell: a positive label sits where the
// message matrix has a zero (row_b unused, -1). ColumnDuplicate: rows row_a
// and row_b carry the same positive label in column col.
struct Violation {
    enum class Kind { ForbiddenCell, ColumnDuplicate };
    Kind kind;
    int col;
    int row_a;
    int row_b;
    int label;

    bool operator==(const Violation&) const = default;
};

std::string describe(const Violation& v);

struct ValidationResult {
    std::vector<Violation> violations;
    bool ok() const { return violations.empty(); }
};

ValidationResult validate(const IndexMatrix& g, const ChannelSpec& spec);

class InvalidIndexMatrix : public std::invalid_argument {
public:
    InvalidIndexMatrix(std::string msg, std::vector<Violation> violations)
        : std::invalid_argument(std::move(msg)), violations(std::move(violations)) {}
    std::vector<Violation> violations;
};

// Small rectangular matrix of labels, used for the interference view below.
struct IntMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<int> cells;

    static IntMatrix from_rows(const std::vector<std::vector<int>>& rows);
    int at(int r, int c) const { return cells[static_cast<size_t>(r) * cols + c]; }

    bool operator==(const IntMatrix&) const = default;
};

// What receiver p overhears: g with row p removed, keeping only columns
// whose link to p exists. Row order and column order are preserved.
IntMatrix submatrix(const IndexMatrix& g, const ChannelSpec& spec, int p);

// Number of distinct positive labels in submatrix(g, spec, p), i.e. how many
// interference dimensions receiver p must reserve.
int interference_count(const IndexMatrix& g, const ChannelSpec& spec, int p);

struct RowBreakdown {
    int row_support;    // positive cells in row p
    int interference;   // interference_count(g, spec, p)

    bool operator==(const RowBreakdown&) const = default;
};

// Puzzle score as an exact fraction: total positive cells over the worst-row
// cost max_p(row_support + interference). The all-zero filling scores 0.
struct ScoreValue {
    long long numerator = 0;
    long long denominator = 0;  // 0 only when the filling is all-zero
    std::vector<RowBreakdown> per_row;

    Fraction value() const { return numerator == 0 ? Fraction(0, 1) : Fraction(numerator, denominator); }
};

// Throws InvalidIndexMatrix when validate() reports violations or the shapes
// disagree.
ScoreValue score(const IndexMatrix& g, const ChannelSpec& spec);

// Largest label present (0 for the all-zero filling).
int max_label(const IndexMatrix& g);

// Renames labels to 1, 2, ... in order of first appearance (row-major scan).
// Scores are invariant under this renaming.
IndexMatrix canonical_relabel(const IndexMatrix& g);

}  // namespace iadof
