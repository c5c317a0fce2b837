#include "iadof/puzzle.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>
#include <unordered_map>

namespace iadof {

IndexMatrix IndexMatrix::zero(int K) {
    if (K <= 0) throw std::domain_error("index matrix requires K >= 1");
    IndexMatrix g;
    g.K = K;
    g.cells.assign(static_cast<size_t>(K) * K, 0);
    return g;
}

IndexMatrix IndexMatrix::from_rows(const std::vector<std::vector<int>>& rows) {
    const int K = static_cast<int>(rows.size());
    IndexMatrix g = zero(K);
    for (int p = 0; p < K; ++p) {
        if (static_cast<int>(rows[p].size()) != K)
            throw std::invalid_argument("index matrix must be K x K");
        for (int q = 0; q < K; ++q) {
            if (rows[p][q] < 0)
                throw std::domain_error("index matrix entries must be nonnegative");
            g.at(p, q) = rows[p][q];
        }
    }
    return g;
}

namespace {

std::vector<std::pair<std::string_view, int>> nonblank_lines(std::string_view text) {
    std::vector<std::pair<std::string_view, int>> lines;
    int number = 1;
    size_t start = 0;
    while (start <= text.size()) {
        size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string_view raw = text.substr(start, end - start);
        while (!raw.empty() && (raw.back() == '\r' || raw.back() == ' ' || raw.back() == '\t'))
            raw.remove_suffix(1);
        if (!raw.empty()) lines.emplace_back(raw, number);
        if (end == text.size()) break;
        start = end + 1;
        ++number;
    }
    return lines;
}

std::vector<int> parse_row(std::string_view s, int line_number) {
    std::vector<int> row;
    size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
        if (i >= s.size()) break;
        int value = 0;
        auto [ptr, ec] = std::from_chars(s.data() + i, s.data() + s.size(), value);
        if (ec != std::errc() || (ptr != s.data() + s.size() && *ptr != ' ' && *ptr != '\t'))
            throw ParseError("expected an integer", line_number, static_cast<int>(i) + 1);
        i = static_cast<size_t>(ptr - s.data());
        row.push_back(value);
    }
    return row;
}

}  // namespace

IndexMatrix parse_index_matrix(std::string_view text) {
    const auto lines = nonblank_lines(text);
    if (lines.empty()) throw ParseError("empty index matrix");
    const std::vector<int> header = parse_row(lines[0].first, lines[0].second);
    if (header.size() != 1) throw ParseError("first line must hold K alone", lines[0].second, 1);
    const int K = header[0];
    if (K <= 0) throw ParseError("K must be >= 1", lines[0].second, 1);
    if (static_cast<int>(lines.size()) != K + 1)
        throw ParseError("expected " + std::to_string(K) + " matrix rows, found " +
                         std::to_string(lines.size() - 1));
    std::vector<std::vector<int>> rows;
    for (int p = 0; p < K; ++p) {
        std::vector<int> row = parse_row(lines[p + 1].first, lines[p + 1].second);
        if (static_cast<int>(row.size()) != K)
            throw ParseError("row has " + std::to_string(row.size()) + " entries, expected " +
                                 std::to_string(K),
                             lines[p + 1].second, 1);
        for (int v : row)
            if (v < 0)
                throw ParseError("labels must be nonnegative", lines[p + 1].second, 1);
        rows.push_back(std::move(row));
    }
    return IndexMatrix::from_rows(rows);
}

std::string to_plain_text(const IndexMatrix& g) {
    std::ostringstream out;
    out << g.K << "\n";
    for (int p = 0; p < g.K; ++p) {
        for (int q = 0; q < g.K; ++q) {
            if (q) out << ' ';
            out << g.at(p, q);
        }
        out << "\n";
    }
    return out.str();
}

std::string describe(const Violation& v) {
    std::ostringstream out;
    if (v.kind == Violation::Kind::ForbiddenCell) {
        out << "cell (" << v.row_a << ", " << v.col << ") holds label " << v.label
            << " but no message is requested there";
    } else {
        out << "column " << v.col << " repeats label " << v.label << " in rows " << v.row_a
            << " and " << v.row_b;
    }
    return out.str();
}

ValidationResult validate(const IndexMatrix& g, const ChannelSpec& spec) {
    if (g.K != spec.users())
        throw std::invalid_argument("index matrix and channel spec sizes differ");
    ValidationResult result;
    const int K = g.K;
    for (int p = 0; p < K; ++p)
        for (int q = 0; q < K; ++q)
            if (g.at(p, q) > 0 && !spec.message(p, q))
                result.violations.push_back(
                    {Violation::Kind::ForbiddenCell, q, p, -1, g.at(p, q)});
    for (int q = 0; q < K; ++q) {
        for (int a = 0; a < K; ++a) {
            if (g.at(a, q) <= 0) continue;
            for (int b = a + 1; b < K; ++b)
                if (g.at(b, q) == g.at(a, q))
                    result.violations.push_back(
                        {Violation::Kind::ColumnDuplicate, q, a, b, g.at(a, q)});
        }
    }
    return result;
}

IntMatrix IntMatrix::from_rows(const std::vector<std::vector<int>>& rows) {
    IntMatrix m;
    m.rows = static_cast<int>(rows.size());
    m.cols = m.rows ? static_cast<int>(rows[0].size()) : 0;
    for (const auto& row : rows) {
        if (static_cast<int>(row.size()) != m.cols)
            throw std::invalid_argument("ragged matrix");
        m.cells.insert(m.cells.end(), row.begin(), row.end());
    }
    return m;
}

IntMatrix submatrix(const IndexMatrix& g, const ChannelSpec& spec, int p) {
    if (g.K != spec.users())
        throw std::invalid_argument("index matrix and channel spec sizes differ");
    if (p < 0 || p >= g.K) throw std::out_of_range("receiver index out of range");
    std::vector<int> kept_cols;
    for (int q = 0; q < g.K; ++q)
        if (spec.connected(p, q)) kept_cols.push_back(q);
    IntMatrix m;
    m.rows = g.K - 1;
    m.cols = static_cast<int>(kept_cols.size());
    m.cells.reserve(static_cast<size_t>(m.rows) * m.cols);
    for (int r = 0; r < g.K; ++r) {
        if (r == p) continue;
        for (int q : kept_cols) m.cells.push_back(g.at(r, q));
    }
    return m;
}

int interference_count(const IndexMatrix& g, const ChannelSpec& spec, int p) {
    const IntMatrix sub = submatrix(g, spec, p);
    std::vector<int> labels;
    for (int v : sub.cells)
        if (v > 0) labels.push_back(v);
    std::sort(labels.begin(), labels.end());
    labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
    return static_cast<int>(labels.size());
}

ScoreValue score(const IndexMatrix& g, const ChannelSpec& spec) {
    const ValidationResult check = validate(g, spec);
    if (!check.ok())
        throw InvalidIndexMatrix("index matrix breaks " +
                                     std::to_string(check.violations.size()) + " puzzle rule(s)",
                                 check.violations);
    ScoreValue s;
    const int K = g.K;
    s.per_row.reserve(K);
    for (int p = 0; p < K; ++p) {
        int support = 0;
        for (int q = 0; q < K; ++q)
            if (g.at(p, q) > 0) ++support;
        const int interference = interference_count(g, spec, p);
        s.per_row.push_back({support, interference});
        s.numerator += support;
        s.denominator = std::max<long long>(s.denominator, support + interference);
    }
    return s;
}

int max_label(const IndexMatrix& g) {
    int m = 0;
    for (int v : g.cells) m = std::max(m, v);
    return m;
}

IndexMatrix canonical_relabel(const IndexMatrix& g) {
    IndexMatrix out = g;
    std::unordered_map<int, int> rename;
    int next = 0;
    for (int& v : out.cells) {
        if (v <= 0) continue;
        auto [it, fresh] = rename.try_emplace(v, next + 1);
        if (fresh) ++next;
        v = it->second;
    }
    return out;
}

}  // namespace iadof
