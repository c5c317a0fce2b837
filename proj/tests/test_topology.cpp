#include <doctest.h>

#include "iadof/topology.hpp"

using namespace iadof;

namespace {

ChannelSpec three_user_ic() {
    return ChannelSpec::from_rows({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}},
                                  {{1, 1, 1}, {1, 1, 1}, {1, 1, 1}});
}

ChannelSpec four_user_almost_x() {
    const std::vector<std::vector<int>> rows = {
        {0, 1, 1, 1}, {1, 0, 1, 1}, {1, 1, 0, 1}, {1, 1, 1, 0}};
    return ChannelSpec::from_rows(rows, rows);
}

}  // namespace

TEST_CASE("mod1 maps into 1..n") {
    CHECK(mod1(5, 5) == 5);
    CHECK(mod1(7, 5) == 2);
    CHECK(mod1(0, 4) == 4);
    CHECK(mod1(-1, 5) == 4);
    CHECK(mod1(-5, 5) == 5);
    CHECK(mod1(1, 1) == 1);
    CHECK_THROWS_AS(mod1(3, 0), std::domain_error);
    CHECK_THROWS_AS(mod1(3, -2), std::domain_error);
}

TEST_CASE("plain format parses the 3-user interference channel") {
    const ChannelSpec spec = parse_spec("3\n1 0 0\n0 1 0\n0 0 1\n\n1 1 1\n1 1 1\n1 1 1\n");
    CHECK(spec == three_user_ic());
    CHECK(spec.users() == 3);
    CHECK(spec.message_count() == 3);
    CHECK(spec.row_degree(0) == 3);
    CHECK(spec.message(0, 0));
    CHECK_FALSE(spec.message(0, 1));
    CHECK(spec.connected(0, 1));
}

TEST_CASE("plain format tolerates trailing spaces and CR line ends") {
    const ChannelSpec spec = parse_spec("1\r\n1 \r\n\r\n1\t\r\n");
    CHECK(spec.users() == 1);
    CHECK(spec.message(0, 0));
}

TEST_CASE("json format parses the same spec") {
    const ChannelSpec spec =
        parse_spec(R"({"K": 3, "M": [[1,0,0],[0,1,0],[0,0,1]], "N": [[1,1,1],[1,1,1],[1,1,1]]})");
    CHECK(spec == three_user_ic());
}

TEST_CASE("both serializations round trip") {
    for (const ChannelSpec& spec :
         {three_user_ic(), four_user_almost_x(), symmetric_spec(5, 2), symmetric_spec(6, 4),
          ChannelSpec::from_rows({{1}}, {{1}})}) {
        CHECK(parse_spec(to_plain_text(spec)) == spec);
        CHECK(parse_spec(to_json_text(spec)) == spec);
    }
}

TEST_CASE("plain serialization is the documented layout") {
    CHECK(to_plain_text(three_user_ic()) ==
          "3\n1 0 0\n0 1 0\n0 0 1\n\n1 1 1\n1 1 1\n1 1 1\n");
}

TEST_CASE("malformed plain text reports a position") {
    CHECK_THROWS_AS(parse_spec(""), ParseError);
    CHECK_THROWS_AS(parse_spec("0\n"), ParseError);
    CHECK_THROWS_AS(parse_spec("2\n1 0\n0 1\n1 1\n1 1\n1 1\n"), ParseError);
    try {
        parse_spec("2\n1 0 1\n0 1\n\n1 1\n1 1\n");
        FAIL("row with three entries accepted");
    } catch (const ParseError& e) {
        CHECK(e.line == 2);
    }
    try {
        parse_spec("2\n1 x\n0 1\n\n1 1\n1 1\n");
        FAIL("non-integer accepted");
    } catch (const ParseError& e) {
        CHECK(e.line == 2);
        CHECK(e.column > 0);
    }
}

TEST_CASE("non-binary entries are rejected") {
    CHECK_THROWS_AS(parse_spec("1\n2\n\n1\n"), std::domain_error);
    CHECK_THROWS_AS(parse_spec(R"({"K": 1, "M": [[1]], "N": [[3]]})"), std::domain_error);
    CHECK_THROWS_AS(ChannelSpec::from_rows({{1, 0}, {0, 1}}, {{1, 1}, {1, -1}}),
                    std::domain_error);
}

TEST_CASE("malformed json reports a position") {
    try {
        parse_spec("{\"K\": 1,\n  \"M\": [[1]\n}");
        FAIL("unbalanced bracket accepted");
    } catch (const ParseError& e) {
        CHECK(e.line >= 2);
    }
    CHECK_THROWS_AS(parse_spec(R"({"K": 2, "M": [[1,0],[0,1]]})"), ParseError);
}

TEST_CASE("cyclic family matches its displayed instances") {
    const ChannelSpec k5 = symmetric_spec(5, 2);
    const std::vector<std::vector<int>> k5_rows = {
        {1, 0, 0, 0, 1}, {1, 1, 0, 0, 0}, {0, 1, 1, 0, 0}, {0, 0, 1, 1, 0}, {0, 0, 0, 1, 1}};
    CHECK(k5 == ChannelSpec::from_rows(k5_rows, k5_rows));

    const ChannelSpec k6 = symmetric_spec(6, 4);
    const std::vector<std::vector<int>> k6_rows = {{1, 0, 0, 1, 1, 1}, {1, 1, 0, 0, 1, 1},
                                                   {1, 1, 1, 0, 0, 1}, {1, 1, 1, 1, 0, 0},
                                                   {0, 1, 1, 1, 1, 0}, {0, 0, 1, 1, 1, 1}};
    CHECK(k6 == ChannelSpec::from_rows(k6_rows, k6_rows));
}

TEST_CASE("cyclic family edge shapes") {
    for (int K : {1, 2, 3, 5, 8}) {
        const ChannelSpec all = symmetric_spec(K, K);
        const ChannelSpec diag = symmetric_spec(K, 1);
        for (int p = 0; p < K; ++p)
            for (int q = 0; q < K; ++q) {
                CHECK(all.message(p, q));
                CHECK(diag.message(p, q) == (p == q));
            }
    }
    for (int K = 1; K <= 8; ++K)
        for (int m = 1; m <= K; ++m) {
            const ChannelSpec spec = symmetric_spec(K, m);
            for (int p = 0; p < K; ++p) CHECK(spec.row_degree(p) == m);
            for (int q = 0; q < K; ++q) {
                int col_ones = 0;
                for (int p = 0; p < K; ++p) col_ones += spec.message(p, q);
                CHECK(col_ones == m);
            }
        }
    CHECK_THROWS_AS(symmetric_spec(3, 0), std::domain_error);
    CHECK_THROWS_AS(symmetric_spec(3, 4), std::domain_error);
    CHECK_THROWS_AS(symmetric_spec(0, 0), std::domain_error);
}

TEST_CASE("messages on dead links are flagged, not rejected") {
    const ChannelSpec spec = ChannelSpec::from_rows({{1, 1}, {0, 1}}, {{1, 0}, {0, 1}});
    CHECK(spec.dead_message_links() == std::vector<std::pair<int, int>>{{0, 1}});
    CHECK(three_user_ic().dead_message_links().empty());
}
