#include <doctest.h>

#include "iadof/alignment.hpp"
#include "iadof/constructions.hpp"

using namespace iadof;

namespace {

ChannelSpec three_user_ic() {
    return ChannelSpec::from_rows({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}},
                                  {{1, 1, 1}, {1, 1, 1}, {1, 1, 1}});
}

IndexMatrix shared_label_diag() {
    return IndexMatrix::from_rows({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}});
}

ChannelSpec five_user_cyclic() { return symmetric_spec(5, 2); }

IndexMatrix five_user_filling() {
    return IndexMatrix::from_rows(
        {{1, 0, 0, 0, 1}, {2, 2, 0, 0, 0}, {0, 1, 1, 0, 0}, {0, 0, 2, 2, 0}, {0, 0, 0, 1, 0}});
}

}  // namespace

TEST_CASE("interference sets collect the links that carry each label") {
    const auto sets = interference_sets(five_user_cyclic(), five_user_filling());
    REQUIRE(sets.size() == 2);
    CHECK(sets.at(1) ==
          std::set<std::pair<int, int>>{{1, 0}, {1, 1}, {3, 2}, {3, 3}, {4, 4}});
    CHECK(sets.at(2) == std::set<std::pair<int, int>>{{0, 0}, {2, 1}, {2, 2}, {4, 3}});

    const auto diag_sets = interference_sets(three_user_ic(), shared_label_diag());
    REQUIRE(diag_sets.size() == 1);
    CHECK(diag_sets.at(1) == std::set<std::pair<int, int>>{
                                 {0, 1}, {0, 2}, {1, 0}, {1, 2}, {2, 0}, {2, 1}});
}

TEST_CASE("desired links never join their own label's set") {
    for (const auto& [spec, g] :
         {std::pair{five_user_cyclic(), five_user_filling()},
          std::pair{three_user_ic(), shared_label_diag()},
          std::pair{symmetric_spec(6, 4), corollary_g(SymmetricFamily(6, 4))}}) {
        const auto sets = interference_sets(spec, g);
        for (int p = 0; p < g.K; ++p)
            for (int q = 0; q < g.K; ++q)
                if (g.at(p, q) > 0) CHECK(sets.at(g.at(p, q)).count({p, q}) == 0);
    }
}

TEST_CASE("geometry of the cyclic example at eta 1") {
    const AlignmentGeometry geom = plan_alignment(five_user_cyclic(), five_user_filling(), 1);
    CHECK(geom.gamma == 5);
    CHECK(geom.precoder_cols == 1);
    CHECK(geom.expanded_cols == 32);
    CHECK(geom.block_len == 65);
    CHECK(geom.p_max == 4);
    CHECK(geom.labels == std::vector<int>{1, 2});
    CHECK(geom.real_set_size == std::vector<int>{5, 4});
    for (const std::vector<int>& padded : geom.padded_sets) CHECK(padded.size() == 5);
    CHECK(geom.desired_cols == std::vector<long long>{2, 2, 2, 2, 1});
    CHECK(geom.interference_cols == std::vector<long long>{32, 32, 32, 32, 64});
    CHECK(geom.total_cols == std::vector<long long>{34, 34, 34, 34, 65});

    int synthetic = 0, seeds = 0, channels = 0;
    for (const Factor& f : geom.factors) {
        synthetic += f.kind == Factor::Kind::Synthetic;
        seeds += f.kind == Factor::Kind::Seed;
        channels += f.kind == Factor::Kind::Channel;
    }
    CHECK(synthetic == 1);
    CHECK(seeds == 2);
    // Every live link gets a factor: 9 appear in interference sets, and the
    // tenth (receiver 1's second desired link) only multiplies a precoder.
    CHECK(channels == 10);
}

TEST_CASE("geometry of the fully shared diagonal at eta 1") {
    const AlignmentGeometry geom = plan_alignment(three_user_ic(), shared_label_diag(), 1);
    CHECK(geom.gamma == 6);
    CHECK(geom.block_len == 65);
    CHECK(geom.p_max == 0);
    CHECK(geom.total_cols == std::vector<long long>{65, 65, 65});
    CHECK(geom.desired_cols == std::vector<long long>{1, 1, 1});
}

TEST_CASE("share of the block at the busiest receiver grows with eta") {
    Fraction last(0, 1);
    for (int eta = 1; eta <= 3; ++eta) {
        const AlignmentGeometry geom =
            plan_alignment(five_user_cyclic(), five_user_filling(), eta);
        const Fraction dof(geom.desired_cols[geom.p_max], geom.block_len);
        CHECK(dof > last);
        CHECK(dof < Fraction(1, 3));
        last = dof;
    }
    CHECK(last == Fraction(243, 2291));
}

TEST_CASE("oversized instances are refused, not attempted") {
    CHECK_THROWS_AS(plan_alignment(five_user_cyclic(), five_user_filling(), 4),
                    InstanceTooLarge);
    CHECK_THROWS_AS(plan_alignment(five_user_cyclic(), five_user_filling(), 1, 64),
                    InstanceTooLarge);
    VerifyConfig tight;
    tight.column_cap = 64;
    CHECK_THROWS_AS(verify(five_user_cyclic(), five_user_filling(), tight), InstanceTooLarge);
}

TEST_CASE("coefficient draws are deterministic in the seed") {
    const AlignmentGeometry geom = plan_alignment(five_user_cyclic(), five_user_filling(), 1);
    const AlignmentInstance a = sample_instance(geom, 5);
    const AlignmentInstance b = sample_instance(geom, 5);
    const AlignmentInstance c = sample_instance(geom, 6);
    CHECK(a.factor_values == b.factor_values);
    CHECK(a.factor_values != c.factor_values);
    REQUIRE(a.factor_values.size() == geom.factors.size());
    for (const std::vector<long long>& values : a.factor_values) {
        REQUIRE(static_cast<long long>(values.size()) == geom.block_len);
        for (long long v : values) {
            CHECK(v != 0);
            CHECK(std::abs(v) <= (1 << 20));
        }
    }
}

TEST_CASE("built matrices have the planned shapes") {
    const AlignmentGeometry geom = plan_alignment(five_user_cyclic(), five_user_filling(), 1);
    const AlignmentInstance inst = sample_instance(geom, 3);
    const IntegerMatrix u1 = build_precoder(inst, 0);
    CHECK(u1.rows == 65);
    CHECK(u1.cols == 1);
    const IntegerMatrix w1 = build_expanded(inst, 0);
    CHECK(w1.rows == 65);
    CHECK(w1.cols == 32);
    const IntegerMatrix rx1 = build_receiver_matrix(inst, 0);
    CHECK(rx1.rows == 65);
    CHECK(rx1.cols == 34);
    const IntegerMatrix rx5 = build_receiver_matrix(inst, 4);
    CHECK(rx5.rows == 65);
    CHECK(rx5.cols == 65);
    const std::vector<double> fx = build_receiver_matrix_float(inst, 4);
    CHECK(fx.size() == 65u * 65u);
}

TEST_CASE("the full check passes on the shared diagonal") {
    VerifyConfig config;
    config.trials = 1;
    const VerificationReport report = verify(three_user_ic(), shared_label_diag(), config);
    CHECK(report.pass);
    CHECK(report.backend == "exact");
    CHECK(report.valid_g);
    CHECK(report.property1_ok);
    CHECK(report.exponents_injective);
    CHECK(report.containment_ok);
    CHECK(report.columns_fit);
    CHECK(report.failed_trial == -1);
    CHECK(report.block_len == 65);
    REQUIRE(report.per_receiver.size() == 3);
    for (const ReceiverReport& r : report.per_receiver) {
        CHECK(r.full_rank);
        CHECK(r.dof_ratio == Fraction(1, 65));
    }
    CHECK(report.set_sizes == std::vector<std::pair<int, int>>{{1, 6}});
}

TEST_CASE("the float backend agrees on the cyclic example") {
    VerifyConfig config;
    config.backend = RankBackend::Float;
    config.trials = 2;
    const VerificationReport report = verify(five_user_cyclic(), five_user_filling(), config);
    CHECK(report.pass);
    CHECK(report.backend == "float");
    REQUIRE(report.per_receiver.size() == 5);
    for (int p = 0; p < 4; ++p) CHECK(report.per_receiver[p].dof_ratio == Fraction(2, 65));
    CHECK(report.per_receiver[4].dof_ratio == Fraction(1, 65));
}

TEST_CASE("an invalid filling fails structurally without throwing") {
    const IndexMatrix bad = IndexMatrix::from_rows({{1, 1, 0}, {0, 1, 0}, {0, 0, 1}});
    const VerificationReport report = verify(three_user_ic(), bad, VerifyConfig{});
    CHECK_FALSE(report.pass);
    CHECK_FALSE(report.valid_g);
    CHECK_FALSE(report.issues.empty());
}

TEST_CASE("a message on a dead link cannot be delivered") {
    const ChannelSpec spec = ChannelSpec::from_rows({{1, 1}, {0, 1}}, {{1, 0}, {0, 1}});
    const IndexMatrix g = IndexMatrix::from_rows({{1, 1}, {0, 2}});
    const VerificationReport report = verify(spec, g, VerifyConfig{});
    CHECK_FALSE(report.pass);
    CHECK(report.valid_g);
    bool flagged = false;
    for (const StructuralIssue& issue : report.issues)
        flagged = flagged || (issue.p == 0 && issue.q == 1);
    CHECK(flagged);
}

TEST_CASE("a single link verifies to the whole block") {
    const ChannelSpec spec = ChannelSpec::from_rows({{1}}, {{1}});
    const VerificationReport report = verify(spec, IndexMatrix::from_rows({{1}}), VerifyConfig{});
    CHECK(report.pass);
    CHECK(report.gamma == 0);
    CHECK(report.block_len == 1);
    REQUIRE(report.per_receiver.size() == 1);
    CHECK(report.per_receiver[0].dof_ratio == Fraction(1, 1));
}

TEST_CASE("the empty filling verifies vacuously") {
    const VerificationReport report = verify(three_user_ic(), IndexMatrix::zero(3), VerifyConfig{});
    CHECK(report.pass);
    CHECK(report.block_len == 0);
    for (const ReceiverReport& r : report.per_receiver) CHECK(r.dof_ratio == Fraction(0, 1));
}

TEST_CASE("verification reports are byte-stable for a fixed seed") {
    VerifyConfig config;
    config.trials = 1;
    config.seed = 12;
    const VerificationReport a = verify(five_user_cyclic(), five_user_filling(), config);
    const VerificationReport b = verify(five_user_cyclic(), five_user_filling(), config);
    const std::string text = to_json_text(a);
    CHECK(text == to_json_text(b));
    CHECK(text.find("\"pass\"") != std::string::npos);
    CHECK(text.find("\"block_len\"") != std::string::npos);
    CHECK(text.find("\"per_receiver\"") != std::string::npos);
}

TEST_CASE("config bounds are rejected up front") {
    CHECK_THROWS_AS(verify(three_user_ic(), IndexMatrix::zero(2), VerifyConfig{}),
                    std::invalid_argument);
    VerifyConfig bad_eta;
    bad_eta.eta = 0;
    CHECK_THROWS_AS(verify(three_user_ic(), shared_label_diag(), bad_eta), std::invalid_argument);
    VerifyConfig bad_trials;
    bad_trials.trials = 0;
    CHECK_THROWS_AS(verify(three_user_ic(), shared_label_diag(), bad_trials),
                    std::invalid_argument);
}
