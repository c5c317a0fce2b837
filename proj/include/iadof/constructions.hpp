#pragma once

#include <string>
#include <vector>

#include "iadof/puzzle.hpp"

namespace iadof {

// The cyclic channel family parameterized by (K, m); see symmetric_spec.
struct SymmetricFamily {
    int K;
    int m;

    SymmetricFamily(int K, int m);
    ChannelSpec spec() const { return symmetric_spec(K, m); }
};

// The layered filling. Rows 1..floor(K/m)*m repeat the label pattern
// (p mod m, shifted into 1..m) across their whole support; each leftover row
// p places 1..m-1 on the support columns before the diagonal and leaves the
// diagonal empty. Scores (K*m - K mod m) / (2m - 1).
IndexMatrix corollary_g(const SymmetricFamily& family);
ScoreValue corollary_score(const SymmetricFamily& family);

// The one-label-per-transmitter filling: every supported cell of row p holds
// label p. Scores K*m / (m + min(K-1, 2m-2)).
IndexMatrix classic_g(const SymmetricFamily& family);
ScoreValue classic_score(const SymmetricFamily& family);

struct DominanceRow {
    int K;
    int m;
    ScoreValue corollary;
    ScoreValue classic;

    // corollary - classic; never negative, zero exactly at m = 1 and m = K.
    Fraction margin() const;
};

// One row per m in 1..K.
std::vector<DominanceRow> dominance_table(int K);

// Concatenated tables for every K in [K_min, K_max], with each margin checked
// to be nonnegative. A negative margin throws logic_error naming the (K, m).
std::vector<DominanceRow> dominance_check(int K_min, int K_max);

// CSV with header K,m,corollary_num,corollary_den,classic_num,classic_den.
std::string dominance_csv(const std::vector<DominanceRow>& table);

// Gnuplot script plotting both scores against m using an inline data block.
std::string dominance_gnuplot(const std::vector<DominanceRow>& table);

}  // namespace iadof
