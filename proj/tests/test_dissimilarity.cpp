#include "persona/dissimilarity.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracle.hpp"
#include "persona/error.hpp"

using namespace persona;

namespace {

std::vector<AttributeSpec> categorical_attrs(std::size_t m, int categories = 6) {
    std::vector<AttributeSpec> attrs;
    for (std::size_t j = 0; j < m; ++j) {
        AttributeSpec attr{j, AttributeKind::categorical, {}, "c" + std::to_string(j)};
        for (int c = 0; c < categories; ++c) {
            attr.categories.push_back(c);
        }
        attrs.push_back(attr);
    }
    return attrs;
}

std::vector<AttributeSpec> numeric_attrs(std::size_t m) {
    std::vector<AttributeSpec> attrs;
    for (std::size_t j = 0; j < m; ++j) {
        attrs.push_back({j, AttributeKind::numeric, {}, "x" + std::to_string(j)});
    }
    return attrs;
}

Record rec(std::vector<double> values) {
    return {std::move(values), "r"};
}

Prototype proto(std::vector<double> values, std::size_t cluster = 0) {
    return {std::move(values), cluster};
}

} // namespace

TEST(SimpleMatching, IdentityIsZero) {
    EXPECT_EQ(simple_matching(rec({2, 2, 2}), proto({2, 2, 2}), categorical_attrs(3)), 0u);
}

TEST(SimpleMatching, ScenarioRowsDivyaVersusYamuna) {
    EXPECT_EQ(simple_matching(rec({4, 5, 1}), proto({3, 3, 5}), categorical_attrs(3)), 3u);
}

TEST(SimpleMatching, ScenarioRowMonishaVersusPrototype) {
    EXPECT_EQ(simple_matching(rec({2, 4, 3}), proto({2, 2, 3}), categorical_attrs(3)), 1u);
}

TEST(SimpleMatching, RejectsMisalignedInput) {
    EXPECT_THROW(simple_matching(rec({1, 2}), proto({1, 2, 3}), categorical_attrs(3)), AlignmentError);
}

TEST(SimpleMatching, RejectsNumericAttributes) {
    auto attrs = categorical_attrs(2);
    attrs[1].kind = AttributeKind::numeric;
    EXPECT_THROW(simple_matching(rec({1, 2}), proto({1, 2}), attrs), PolicyError);
}

TEST(SimpleMatching, IsAMetric) {
    std::mt19937_64 rng(11);
    const auto attrs = categorical_attrs(5, 3);
    for (int trial = 0; trial < 2000; ++trial) {
        auto rows = oracle::random_rows(rng, 3, 5, 3);
        Record a{{rows[0].begin(), rows[0].end()}, "a"};
        Record b{{rows[1].begin(), rows[1].end()}, "b"};
        Record c{{rows[2].begin(), rows[2].end()}, "c"};
        const auto ab = simple_matching(a, proto(b.values), attrs);
        const auto ba = simple_matching(b, proto(a.values), attrs);
        const auto bc = simple_matching(b, proto(c.values), attrs);
        const auto ac = simple_matching(a, proto(c.values), attrs);
        ASSERT_EQ(simple_matching(a, proto(a.values), attrs), 0u);
        ASSERT_EQ(ab, ba);
        ASSERT_LE(ac, ab + bc);
        ASSERT_LE(ab, 5u);
    }
}

TEST(Euclidean, Examples) {
    EXPECT_DOUBLE_EQ(euclidean_distance(rec({3.0}), proto({3.0}), numeric_attrs(1)), 0.0);
    EXPECT_DOUBLE_EQ(euclidean_distance(rec({0.0, 3.0}), proto({4.0, 0.0}), numeric_attrs(2)), 5.0);
    EXPECT_DOUBLE_EQ(euclidean_distance(rec({1.0, 2.0, 2.0}), proto({0.0, 0.0, 0.0}), numeric_attrs(3)), 3.0);
}

TEST(Euclidean, IgnoresCategoricalSlots) {
    auto attrs = numeric_attrs(3);
    attrs[1] = {1, AttributeKind::categorical, {0, 1, 7}, "c"};
    EXPECT_DOUBLE_EQ(euclidean_distance(rec({0.0, 7.0, 3.0}), proto({4.0, 1.0, 0.0}), attrs), 5.0);
}

TEST(Euclidean, RequiresNumericAttribute) {
    EXPECT_THROW(euclidean_distance(rec({1}), proto({1}), categorical_attrs(1)), PolicyError);
}

TEST(WeightedMatching, SaturatedWeights) {
    CategoryWeightTable table;
    for (std::size_t j = 0; j < 3; ++j) {
        for (int c = 0; c < 6; ++c) {
            table.set(j, c, 0, 1.0);
        }
    }
    const auto attrs = categorical_attrs(3);
    EXPECT_DOUBLE_EQ(weighted_matching(rec({1, 2, 3}), proto({1, 2, 3}), attrs, table), 0.0);
    EXPECT_DOUBLE_EQ(weighted_matching(rec({1, 2, 3}), proto({4, 5, 0}), attrs, table), 3.0);
}

TEST(WeightedMatching, MismatchUsesRecordCategoryWeight) {
    CategoryWeightTable table;
    table.set(0, 2, 0, 0.8);
    table.set(1, 2, 0, 0.4);
    // The prototype's own category must not be consulted on a mismatch.
    table.set(1, 3, 0, 0.0);
    const double d = weighted_matching(rec({2, 2}), proto({2, 3}), categorical_attrs(2), table);
    EXPECT_NEAR(d, 0.6, 1e-12);
}

TEST(WeightedMatching, UnknownKeysUseDefaultWeight) {
    CategoryWeightTable table;
    EXPECT_DOUBLE_EQ(weighted_matching(rec({1, 1}), proto({1, 2}, 4), categorical_attrs(2), table), 1.0);
}

TEST(WeightTable, RejectsOutOfRangeWeights) {
    CategoryWeightTable table;
    EXPECT_THROW(table.set(0, 0, 0, 1.5), PolicyError);
    EXPECT_THROW(table.set(0, 0, 0, -0.1), PolicyError);
    EXPECT_THROW(CategoryWeightTable(2.0), PolicyError);
}

TEST(CategoryWeights, HandCountedExample) {
    const auto data = make_categorical({{2}, {2}, {3}, {3}});
    const std::vector<std::size_t> assignments{0, 0, 1, 1};
    const auto table = compute_category_weights(data, assignments, 2);
    EXPECT_DOUBLE_EQ(table.get(0, 2, 0), 1.0);
    EXPECT_DOUBLE_EQ(table.get(0, 3, 0), 0.0);
    EXPECT_DOUBLE_EQ(table.get(0, 3, 1), 1.0);
}

TEST(CategoryWeights, SaturatedAndAbsent) {
    const auto data = make_categorical({{5, 1}, {5, 1}, {5, 2}});
    const std::vector<std::size_t> assignments{0, 0, 1};
    const auto table = compute_category_weights(data, assignments, 2);
    EXPECT_DOUBLE_EQ(table.get(0, 5, 0), 1.0);
    EXPECT_DOUBLE_EQ(table.get(1, 2, 0), 0.0);
    // (1/2) / (2/3) = 0.75 would be cluster 0 for code 1 if it were not all of cluster 0; here it is 1/(2/3) -> 1.
    EXPECT_DOUBLE_EQ(table.get(1, 1, 0), 1.0);
}

TEST(CategoryWeights, UnclampedRatio) {
    // attribute 0: values 1,2,1,1 ; cluster 0 = rows {0,1}: relfreq(1|c0)=1/2, relfreq(1|D)=3/4 -> 2/3
    const auto data = make_categorical({{1}, {2}, {1}, {1}});
    const std::vector<std::size_t> assignments{0, 0, 1, 1};
    const auto table = compute_category_weights(data, assignments, 2);
    EXPECT_NEAR(table.get(0, 1, 0), 2.0 / 3.0, 1e-15);
}

TEST(CategoryWeights, EmptyClusterFallsBackToDefault) {
    const auto data = make_categorical({{1}, {2}});
    const std::vector<std::size_t> assignments{0, 0};
    const auto table = compute_category_weights(data, assignments, 3);
    EXPECT_DOUBLE_EQ(table.get(0, 1, 2), table.default_weight());
    EXPECT_DOUBLE_EQ(table.default_weight(), 0.5);
}

TEST(CategoryWeights, RejectsBadAssignments) {
    const auto data = make_categorical({{1}, {2}});
    const std::vector<std::size_t> out_of_range{0, 3};
    EXPECT_THROW(compute_category_weights(data, out_of_range, 2), InputError);
    const std::vector<std::size_t> short_list{0};
    EXPECT_THROW(compute_category_weights(data, short_list, 2), AlignmentError);
}

TEST(MixedDissimilarity, ReducesToSimpleMatching) {
    const auto attrs = categorical_attrs(3);
    EXPECT_DOUBLE_EQ(mixed_dissimilarity(rec({1, 2, 3}), proto({1, 4, 4}), attrs, 1.0), 2.0);
}

TEST(MixedDissimilarity, CombinesBothParts) {
    std::vector<AttributeSpec> attrs = numeric_attrs(2);
    attrs.push_back({2, AttributeKind::categorical, {0, 1, 2}, "c2"});
    attrs.push_back({3, AttributeKind::categorical, {0, 1, 2}, "c3"});
    const Record a = rec({0.0, 3.0, 1, 1});
    const Prototype z = proto({4.0, 0.0, 2, 0});
    EXPECT_DOUBLE_EQ(mixed_dissimilarity(a, z, attrs, 0.5), 6.0);
    EXPECT_DOUBLE_EQ(mixed_dissimilarity(a, z, attrs, 0.0), 5.0);
    EXPECT_THROW(mixed_dissimilarity(a, z, attrs, -1.0), PolicyError);
}

TEST(Gamma, Examples) {
    auto attrs = numeric_attrs(1);
    const std::vector<Record> same{rec({4.0}), rec({4.0})};
    EXPECT_DOUBLE_EQ(compute_gamma(same, attrs), 0.0);
    EXPECT_DOUBLE_EQ(effective_gamma(same, attrs), 1.0);
    const std::vector<Record> spread{rec({1.0}), rec({3.0})};
    EXPECT_DOUBLE_EQ(compute_gamma(spread, attrs), 1.0);

    // stds 2 and 4: {0,4} and {0,8}
    auto two = numeric_attrs(2);
    const std::vector<Record> rows{rec({0.0, 0.0}), rec({4.0, 8.0})};
    EXPECT_DOUBLE_EQ(compute_gamma(rows, two), 3.0);
}

TEST(Gamma, SkipsCategoricalAndRequiresNumeric) {
    std::vector<AttributeSpec> attrs = numeric_attrs(1);
    attrs.push_back({1, AttributeKind::categorical, {0, 9}, "c"});
    const std::vector<Record> rows{rec({1.0, 0}), rec({3.0, 9})};
    EXPECT_DOUBLE_EQ(compute_gamma(rows, attrs), 1.0);
    EXPECT_THROW(compute_gamma(rows, categorical_attrs(2)), PolicyError);
}

TEST(MeasureProperties, WeightedOutputBounded) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t m = 1 + rng() % 6;
        const auto attrs = categorical_attrs(m, 4);
        CategoryWeightTable table(unit(rng));
        for (std::size_t j = 0; j < m; ++j) {
            for (int c = 0; c < 4; ++c) {
                if (rng() % 2) {
                    table.set(j, c, 0, unit(rng));
                }
            }
        }
        auto rows = oracle::random_rows(rng, 2, m, 4);
        const double d = weighted_matching(Record{{rows[0].begin(), rows[0].end()}, "a"},
                                           proto({rows[1].begin(), rows[1].end()}), attrs, table);
        ASSERT_GE(d, 0.0);
        ASSERT_LE(d, static_cast<double>(m));
    }
}

TEST(MeasureProperties, InvariantUnderRecoding) {
    std::mt19937_64 rng(5);
    const auto attrs = categorical_attrs(4, 5);
    for (int trial = 0; trial < 500; ++trial) {
        auto rows = oracle::random_rows(rng, 6, 4, 5);
        std::vector<std::size_t> assignments(6);
        for (auto& a : assignments) {
            a = rng() % 2;
        }
        std::vector<std::vector<int>> perm(4, {0, 1, 2, 3, 4});
        for (auto& p : perm) {
            std::shuffle(p.begin(), p.end(), rng);
        }
        auto recoded = rows;
        for (auto& row : recoded) {
            for (std::size_t j = 0; j < 4; ++j) {
                row[j] = perm[j][static_cast<std::size_t>(row[j])];
            }
        }
        const auto data = make_categorical(rows);
        const auto data2 = make_categorical(recoded);
        const auto w1 = compute_category_weights(data, assignments, 2);
        const auto w2 = compute_category_weights(data2, assignments, 2);
        const Prototype z{data.rows[0].values, 1};
        const Prototype z2{data2.rows[0].values, 1};
        for (std::size_t i = 0; i < 6; ++i) {
            ASSERT_EQ(simple_matching(data.rows[i], z, attrs), simple_matching(data2.rows[i], z2, attrs));
            ASSERT_DOUBLE_EQ(weighted_matching(data.rows[i], z, attrs, w1),
                             weighted_matching(data2.rows[i], z2, attrs, w2));
        }
    }
}

TEST(MeasureDispatch, FollowsPolicy) {
    const auto attrs = categorical_attrs(2);
    EXPECT_DOUBLE_EQ(Measure(DissimilarityPolicy{})(rec({1, 2}), proto({1, 3}), attrs), 1.0);
    DissimilarityPolicy weighted{DissimilarityMode::weighted, GammaMode::automatic, 1.0};
    EXPECT_THROW(Measure{weighted}(rec({1, 2}), proto({1, 3}), attrs), PolicyError);
    DissimilarityPolicy mixed{DissimilarityMode::mixed, GammaMode::fixed, 2.0};
    EXPECT_DOUBLE_EQ(Measure(mixed)(rec({1, 2}), proto({1, 3}), attrs), 2.0);
    DissimilarityPolicy bad{DissimilarityMode::mixed, GammaMode::fixed, -1.0};
    EXPECT_THROW(Measure{bad}, PolicyError);
}
