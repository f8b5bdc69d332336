#include <catch2/catch_amalgamated.hpp>

#include <crowdcode/fusion.hpp>
#include <crowdcode/rng.hpp>

#include <array>
#include <cmath>

using namespace crowdcode;
using Catch::Matchers::WithinAbs;

TEST_CASE("local_decision degenerate reliabilities") {
    auto rng = make_engine(1);
    for (int k = 0; k < 50; ++k) CHECK(local_decision(2, 1.0, 4, rng) == 2);
    for (int k = 0; k < 50; ++k) CHECK(local_decision(0, 0.0, 2, rng) == 1);
}

TEST_CASE("local_decision spreads errors uniformly") {
    auto rng = make_engine(2);
    const int trials = 100000;
    std::array<int, 4> counts{};
    for (int t = 0; t < trials; ++t) ++counts[local_decision(1, 0.7, 4, rng)];
    const double se_true = std::sqrt(0.7 * 0.3 / trials);
    const double se_other = std::sqrt(0.1 * 0.9 / trials);
    CHECK_THAT(counts[1] / double(trials), WithinAbs(0.7, 3 * se_true));
    for (int c : {0, 2, 3}) CHECK_THAT(counts[c] / double(trials), WithinAbs(0.1, 3 * se_other));
}

TEST_CASE("binary_answer picks the decision's bit from the column") {
    const std::vector<std::uint8_t> small_dog = {1, 0, 1, 0};  // Pekingese/Maltese vs rest
    CHECK(binary_answer(2, small_dog) == 1);
    const std::vector<std::uint8_t> snub_nose = {1, 1, 0, 0};
    CHECK(binary_answer(3, snub_nose) == 0);
    const std::vector<std::uint8_t> zeros = {0, 0, 0, 0};
    for (int y = 0; y < 4; ++y) CHECK(binary_answer(y, zeros) == 0);
}

TEST_CASE("decode_hamming returns the transmitted row when rows are distinct") {
    const auto a = CodeMatrix::from_column_ints({5, 12, 3, 10, 12, 9, 9, 10, 9, 12}, 4);
    auto rng = make_engine(3);
    for (int l = 0; l < 4; ++l) {
        AnswerVector u(a.row(l).begin(), a.row(l).end());
        const auto d = decode_hamming(a, u, rng);
        CHECK(d.decided_class == l);
        CHECK(d.tie_count == 1);
        CHECK_FALSE(d.was_tie);
    }
}

TEST_CASE("decode_hamming breaks symmetric ties uniformly") {
    const auto a = CodeMatrix::from_column_ints({2, 2}, 2);  // rows [0,0],[1,1]
    auto rng = make_engine(4);
    const int trials = 100000;
    int ones = 0;
    for (int t = 0; t < trials; ++t) {
        const auto d = decode_hamming(a, {0, 1}, rng);
        CHECK(d.was_tie);
        ones += d.decided_class;
    }
    const double se = std::sqrt(0.25 / trials);
    CHECK_THAT(ones / double(trials), WithinAbs(0.5, 3 * se));
}

TEST_CASE("all-missing answers decode uniformly over the classes") {
    const auto a = CodeMatrix::from_column_ints({5, 12, 3}, 4);
    auto rng = make_engine(5);
    std::array<int, 4> counts{};
    const int trials = 40000;
    for (int t = 0; t < trials; ++t) {
        const auto d = decode_hamming(a, {kMissing, kMissing, kMissing}, rng);
        CHECK(d.tie_count == 4);
        ++counts[d.decided_class];
    }
    const double se = std::sqrt(0.25 * 0.75 / trials);
    for (int c : counts) CHECK_THAT(c / double(trials), WithinAbs(0.25, 3 * se));
}

TEST_CASE("decode_majority examples") {
    auto rng = make_engine(6);
    CHECK(decode_majority(2, {0, 0, 0}, {1, 1, 0}, rng).decided_class == 1);
    CHECK(decode_majority(4, {0, 0, 0, 1, 1, 1}, {1, 1, 1, 0, 0, 0}, rng).decided_class == 2);
    int ones = 0;
    const int trials = 100000;
    for (int t = 0; t < trials; ++t) ones += decode_majority(2, {0, 0}, {1, 0}, rng).decided_class;
    CHECK_THAT(ones / double(trials), WithinAbs(0.5, 3 * std::sqrt(0.25 / trials)));
    CHECK_THROWS_AS(decode_majority(4, {0, 0}, {1, 0}, rng), std::invalid_argument);  // empty group
}

TEST_CASE("group map layouts") {
    CHECK(contiguous_group_map(8, 10) == std::vector<int>{0, 0, 0, 0, 1, 1, 1, 2, 2, 2});
    CHECK(round_robin_group_map(4, 5) == std::vector<int>{0, 1, 0, 1, 0});
    CHECK_THROWS_AS(contiguous_group_map(8, 2), std::invalid_argument);
}

TEST_CASE("hamming decoding on the majority-equivalent matrix equals bit majority") {
    // odd per-bit group size: no ties anywhere, both decoders deterministic
    const auto a = majority_equivalent_matrix(4, 6);
    const auto groups = contiguous_group_map(4, 6);
    auto rng = make_engine(7);
    for (int i = 0; i < (1 << 6); ++i) {
        AnswerVector u(6);
        for (int j = 0; j < 6; ++j) u[j] = static_cast<Answer>((i >> j) & 1);
        const int viahamming = decode_hamming(a, u, rng).decided_class;
        const int viamajority = decode_majority(4, groups, u, rng).decided_class;
        CHECK(viahamming == viamajority);
    }
}

TEST_CASE("perfect workers are decoded perfectly end to end") {
    const auto a = CodeMatrix::from_column_ints({5, 12, 3, 10, 12, 9, 9, 10, 9, 12}, 4);
    auto rng = make_engine(8);
    for (int t = 0; t < 200; ++t) {
        const int truth = static_cast<int>(rng() % 4);
        std::vector<int> decisions(10);
        for (auto& y : decisions) y = local_decision(truth, 1.0, 4, rng);
        const auto u = answers_from_decisions(a, decisions);
        CHECK(decode_hamming(a, u, rng).decided_class == truth);
    }
}

TEST_CASE("majority_bit_answer uses big-endian class bits") {
    // class 2 = '10' for M=4: group 0 (MSB) sends 1, group 1 sends 0
    CHECK(majority_bit_answer(2, 0, 4) == 1);
    CHECK(majority_bit_answer(2, 1, 4) == 0);
}
