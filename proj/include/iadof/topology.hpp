#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace iadof {

// Shifted modulo used by the cyclic constructions: result lies in 1..n,
// with n returned where the plain remainder would be 0.
int mod1(long long a, int n);

// Raised on malformed input text. Positions are 1-based; 0 means unknown.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& msg, int line = 0, int column = 0)
        : std::runtime_error(msg), line(line), column(column) {}
    int line;
    int column;
};

// A K-user interference network described by two binary K x K matrices:
// message[p][q] says transmitter q has a message for receiver p, and
// conn[p][q] says the physical link from q to p exists. Rows are receivers,
// columns are transmitters, indices 0-based throughout the library.
class ChannelSpec {
public:
    ChannelSpec(int K, std::vector<uint8_t> message, std::vector<uint8_t> conn);

    static ChannelSpec from_rows(const std::vector<std::vector<int>>& message_rows,
                                 const std::vector<std::vector<int>>& conn_rows);

    int users() const { return k_; }
    bool message(int p, int q) const { return message_[idx(p, q)] != 0; }
    bool connected(int p, int q) const { return conn_[idx(p, q)] != 0; }

    // Number of ones in the message matrix.
    int message_count() const;
    // Number of ones in row p of the connectivity matrix.
    int row_degree(int p) const;
    // Cells with a requested message but no physical link to carry it.
    std::vector<std::pair<int, int>> dead_message_links() const;

    bool operator==(const ChannelSpec&) const = default;

private:
    size_t idx(int p, int q) const;
    int k_ = 0;
    std::vector<uint8_t> message_;
    std::vector<uint8_t> conn_;
};

// Reads either the plain-text layout (line with K, then K rows of the message
// matrix, a blank line, and K rows of the connectivity matrix) or a JSON
// object {"K":..,"M":[[..]],"N":[[..]]}. The formats are distinguished by the
// first non-whitespace character.
ChannelSpec parse_spec(std::string_view text);

std::string to_plain_text(const ChannelSpec& spec);
std::string to_json_text(const ChannelSpec& spec);

// The cyclic family with m ones per row: both matrices equal, entry (p, q)
// set when (p - q) mod K < m. m = 1 is the parallel channel, m = K the
// fully connected one.
ChannelSpec symmetric_spec(int K, int m);

}  // namespace iadof
