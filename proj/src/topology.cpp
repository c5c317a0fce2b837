#include "iadof/topology.hpp"

#include <cctype>
#include <charconv>
#include <sstream>

#include <nlohmann/json.hpp>

namespace iadof {

int mod1(long long a, int n) {
    if (n <= 0) throw std::domain_error("mod1 requires a positive modulus");
    const long long r = ((a % n) + n) % n;
    return r == 0 ? n : static_cast<int>(r);
}

ChannelSpec::ChannelSpec(int K, std::vector<uint8_t> message, std::vector<uint8_t> conn)
    : k_(K), message_(std::move(message)), conn_(std::move(conn)) {
    if (K <= 0) throw std::domain_error("channel spec requires K >= 1");
    const size_t want = static_cast<size_t>(K) * K;
    if (message_.size() != want || conn_.size() != want)
        throw std::invalid_argument("channel spec matrices must be K x K");
    for (size_t i = 0; i < want; ++i) {
        if (message_[i] > 1 || conn_[i] > 1)
            throw std::domain_error("channel spec entries must be 0 or 1");
    }
}

ChannelSpec ChannelSpec::from_rows(const std::vector<std::vector<int>>& message_rows,
                                   const std::vector<std::vector<int>>& conn_rows) {
    const int K = static_cast<int>(message_rows.size());
    if (K == 0 || conn_rows.size() != message_rows.size())
        throw std::invalid_argument("channel spec matrices must be K x K");
    std::vector<uint8_t> m, n;
    m.reserve(static_cast<size_t>(K) * K);
    n.reserve(static_cast<size_t>(K) * K);
    auto flatten = [K](const std::vector<std::vector<int>>& rows, std::vector<uint8_t>& out,
                       const char* name) {
        for (int p = 0; p < K; ++p) {
            if (static_cast<int>(rows[p].size()) != K)
                throw std::invalid_argument("channel spec matrices must be K x K");
            for (int q = 0; q < K; ++q) {
                const int v = rows[p][q];
                if (v != 0 && v != 1)
                    throw std::domain_error(std::string(name) + "[" + std::to_string(p) + "][" +
                                            std::to_string(q) + "] must be 0 or 1, got " +
                                            std::to_string(v));
                out.push_back(static_cast<uint8_t>(v));
            }
        }
    };
    flatten(message_rows, m, "M");
    flatten(conn_rows, n, "N");
    return ChannelSpec(K, std::move(m), std::move(n));
}

size_t ChannelSpec::idx(int p, int q) const {
    if (p < 0 || p >= k_ || q < 0 || q >= k_)
        throw std::out_of_range("channel spec index out of range");
    return static_cast<size_t>(p) * k_ + q;
}

int ChannelSpec::message_count() const {
    int n = 0;
    for (uint8_t v : message_) n += v;
    return n;
}

int ChannelSpec::row_degree(int p) const {
    int n = 0;
    for (int q = 0; q < k_; ++q) n += conn_[idx(p, q)];
    return n;
}

std::vector<std::pair<int, int>> ChannelSpec::dead_message_links() const {
    std::vector<std::pair<int, int>> out;
    for (int p = 0; p < k_; ++p)
        for (int q = 0; q < k_; ++q)
            if (message_[idx(p, q)] && !conn_[idx(p, q)]) out.emplace_back(p, q);
    return out;
}

namespace {

struct Line {
    std::string_view text;
    int number;  // 1-based
};

std::vector<Line> split_lines(std::string_view text) {
    std::vector<Line> lines;
    int number = 1;
    size_t start = 0;
    while (start <= text.size()) {
        size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string_view raw = text.substr(start, end - start);
        while (!raw.empty() && (raw.back() == '\r' || raw.back() == ' ' || raw.back() == '\t'))
            raw.remove_suffix(1);
        lines.push_back({raw, number});
        if (end == text.size()) break;
        start = end + 1;
        ++number;
    }
    while (!lines.empty() && lines.back().text.empty()) lines.pop_back();
    return lines;
}

std::vector<int> parse_int_row(const Line& line) {
    std::vector<int> row;
    size_t i = 0;
    const std::string_view s = line.text;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
        if (i >= s.size()) break;
        int value = 0;
        const char* first = s.data() + i;
        const char* last = s.data() + s.size();
        auto [ptr, ec] = std::from_chars(first, last, value);
        if (ec != std::errc() || (ptr != last && *ptr != ' ' && *ptr != '\t'))
            throw ParseError("expected an integer", line.number, static_cast<int>(i) + 1);
        i = static_cast<size_t>(ptr - s.data());
        row.push_back(value);
    }
    return row;
}

void position_of_offset(std::string_view text, size_t offset, int& line, int& column) {
    line = 1;
    column = 1;
    for (size_t i = 0; i < offset && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            column = 1;
        } else {
            ++column;
        }
    }
}

ChannelSpec parse_spec_json(std::string_view text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        int line = 0, column = 0;
        position_of_offset(text, e.byte > 0 ? e.byte - 1 : 0, line, column);
        throw ParseError(std::string("invalid JSON: ") + e.what(), line, column);
    }
    try {
        const int K = j.at("K").get<int>();
        const auto m = j.at("M").get<std::vector<std::vector<int>>>();
        const auto n = j.at("N").get<std::vector<std::vector<int>>>();
        if (static_cast<int>(m.size()) != K || static_cast<int>(n.size()) != K)
            throw ParseError("matrix row count does not match K");
        return ChannelSpec::from_rows(m, n);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("invalid spec object: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw ParseError(e.what());
    }
}

ChannelSpec parse_spec_plain(std::string_view text) {
    const std::vector<Line> lines = split_lines(text);
    size_t i = 0;
    while (i < lines.size() && lines[i].text.empty()) ++i;
    if (i >= lines.size()) throw ParseError("empty spec");

    const std::vector<int> header = parse_int_row(lines[i]);
    if (header.size() != 1)
        throw ParseError("first line must hold K alone", lines[i].number, 1);
    const int K = header[0];
    if (K <= 0) throw ParseError("K must be >= 1", lines[i].number, 1);
    ++i;

    auto read_matrix = [&](const char* which) {
        std::vector<std::vector<int>> rows;
        for (int r = 0; r < K; ++r, ++i) {
            if (i >= lines.size() || lines[i].text.empty())
                throw ParseError(std::string("missing row ") + std::to_string(r + 1) + " of " +
                                     which,
                                 i < lines.size() ? lines[i].number : 0, 1);
            std::vector<int> row = parse_int_row(lines[i]);
            if (static_cast<int>(row.size()) != K)
                throw ParseError(std::string(which) + " row has " + std::to_string(row.size()) +
                                     " entries, expected " + std::to_string(K),
                                 lines[i].number, 1);
            rows.push_back(std::move(row));
        }
        return rows;
    };

    const std::vector<std::vector<int>> m_rows = read_matrix("the message matrix");
    if (i >= lines.size() || !lines[i].text.empty())
        throw ParseError("expected a blank line between the two matrices",
                         i < lines.size() ? lines[i].number : 0, 1);
    while (i < lines.size() && lines[i].text.empty()) ++i;
    const std::vector<std::vector<int>> n_rows = read_matrix("the connectivity matrix");
    while (i < lines.size() && lines[i].text.empty()) ++i;
    if (i < lines.size())
        throw ParseError("unexpected trailing content", lines[i].number, 1);

    return ChannelSpec::from_rows(m_rows, n_rows);
}

}  // namespace

ChannelSpec parse_spec(std::string_view text) {
    for (char c : text) {
        if (std::isspace(static_cast<unsigned char>(c))) continue;
        if (c == '{') return parse_spec_json(text);
        break;
    }
    return parse_spec_plain(text);
}

std::string to_plain_text(const ChannelSpec& spec) {
    std::ostringstream out;
    const int K = spec.users();
    out << K << "\n";
    auto dump = [&](auto&& get) {
        for (int p = 0; p < K; ++p) {
            for (int q = 0; q < K; ++q) {
                if (q) out << ' ';
                out << (get(p, q) ? 1 : 0);
            }
            out << "\n";
        }
    };
    dump([&](int p, int q) { return spec.message(p, q); });
    out << "\n";
    dump([&](int p, int q) { return spec.connected(p, q); });
    return out.str();
}

std::string to_json_text(const ChannelSpec& spec) {
    const int K = spec.users();
    nlohmann::json m = nlohmann::json::array();
    nlohmann::json n = nlohmann::json::array();
    for (int p = 0; p < K; ++p) {
        nlohmann::json mr = nlohmann::json::array();
        nlohmann::json nr = nlohmann::json::array();
        for (int q = 0; q < K; ++q) {
            mr.push_back(spec.message(p, q) ? 1 : 0);
            nr.push_back(spec.connected(p, q) ? 1 : 0);
        }
        m.push_back(std::move(mr));
        n.push_back(std::move(nr));
    }
    nlohmann::json j{{"K", K}, {"M", std::move(m)}, {"N", std::move(n)}};
    return j.dump(2) + "\n";
}

ChannelSpec symmetric_spec(int K, int m) {
    if (K <= 0) throw std::domain_error("symmetric spec requires K >= 1");
    if (m < 1 || m > K) throw std::domain_error("symmetric spec requires 1 <= m <= K");
    std::vector<uint8_t> cells(static_cast<size_t>(K) * K, 0);
    for (int p = 0; p < K; ++p)
        for (int q = 0; q < K; ++q)
            if (((p - q) % K + K) % K < m) cells[static_cast<size_t>(p) * K + q] = 1;
    return ChannelSpec(K, cells, cells);
}

}  // namespace iadof
