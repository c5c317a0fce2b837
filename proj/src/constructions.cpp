#include "iadof/constructions.hpp"

#include <sstream>

namespace iadof {

SymmetricFamily::SymmetricFamily(int K, int m) : K(K), m(m) {
    if (K <= 0) throw std::domain_error("family requires K >= 1");
    if (m < 1 || m > K) throw std::domain_error("family requires 1 <= m <= K");
}

IndexMatrix corollary_g(const SymmetricFamily& family) {
    const int K = family.K;
    const int m = family.m;
    IndexMatrix g = IndexMatrix::zero(K);
    const int full = (K / m) * m;
    for (int p = 0; p < full; ++p) {
        const int label = mod1(p + 1, m);
        for (int q = 0; q < K; ++q)
            if (((p - q) % K + K) % K < m) g.at(p, q) = label;
    }
    // Leftover rows keep their diagonal empty and count 1..m-1 along the
    // remaining support columns. Those rows satisfy p >= m, so the columns
    // p-m+1 .. p-1 never wrap.
    for (int p = full; p < K; ++p)
        for (int j = 1; j < m; ++j) g.at(p, p - m + j) = j;
    return g;
}

IndexMatrix classic_g(const SymmetricFamily& family) {
    const int K = family.K;
    const int m = family.m;
    IndexMatrix g = IndexMatrix::zero(K);
    for (int p = 0; p < K; ++p)
        for (int q = 0; q < K; ++q)
            if (((p - q) % K + K) % K < m) g.at(p, q) = p + 1;
    return g;
}

ScoreValue corollary_score(const SymmetricFamily& family) {
    return score(corollary_g(family), family.spec());
}

ScoreValue classic_score(const SymmetricFamily& family) {
    return score(classic_g(family), family.spec());
}

Fraction DominanceRow::margin() const {
    const Fraction a = corollary.value();
    const Fraction b = classic.value();
    return Fraction(a.num * b.den - b.num * a.den, a.den * b.den);
}

std::vector<DominanceRow> dominance_table(int K) {
    std::vector<DominanceRow> table;
    table.reserve(K);
    for (int m = 1; m <= K; ++m) {
        const SymmetricFamily family(K, m);
        table.push_back({K, m, corollary_score(family), classic_score(family)});
    }
    return table;
}

std::vector<DominanceRow> dominance_check(int K_min, int K_max) {
    if (K_min < 1 || K_max < K_min)
        throw std::domain_error("dominance check requires 1 <= K_min <= K_max");
    std::vector<DominanceRow> all;
    for (int K = K_min; K <= K_max; ++K) {
        std::vector<DominanceRow> table = dominance_table(K);
        for (const DominanceRow& row : table)
            if (row.margin() < Fraction(0, 1))
                throw std::logic_error("layered score fell below the uniform one at K=" +
                                       std::to_string(row.K) + ", m=" + std::to_string(row.m));
        all.insert(all.end(), table.begin(), table.end());
    }
    return all;
}

std::string dominance_csv(const std::vector<DominanceRow>& table) {
    std::ostringstream out;
    out << "K,m,corollary_num,corollary_den,classic_num,classic_den\n";
    for (const DominanceRow& row : table)
        out << row.K << ',' << row.m << ',' << row.corollary.numerator << ','
            << row.corollary.denominator << ',' << row.classic.numerator << ','
            << row.classic.denominator << "\n";
    return out.str();
}

std::string dominance_gnuplot(const std::vector<DominanceRow>& table) {
    std::ostringstream out;
    out << "$scores << EOD\n";
    for (const DominanceRow& row : table)
        out << row.m << ' ' << row.corollary.value().value() << ' '
            << row.classic.value().value() << "\n";
    out << "EOD\n";
    const int K = table.empty() ? 0 : table.front().K;
    out << "set title 'puzzle scores, K = " << K << "'\n"
        << "set xlabel 'links per row (m)'\n"
        << "set ylabel 'score'\n"
        << "set key left top\n"
        << "plot $scores using 1:2 with linespoints title 'layered', \\\n"
        << "     $scores using 1:3 with linespoints title 'uniform labels'\n";
    return out.str();
}

}  // namespace iadof
