#include <cmath>

#include <gtest/gtest.h>

#include "lgdkit/csv.hpp"
#include "lgdkit/rng.hpp"
#include "lgdkit/stats.hpp"

using namespace lgdkit;

namespace {

const std::string kFixtures = LGDKIT_FIXTURE_DIR;
const MonthWindow kAll{{1900, 1}, {2100, 12}};

MonthlySeries make(const std::string& name, MonthKey start,
                   const std::vector<double>& values) {
    MonthlySeries s(name);
    MonthKey k = start;
    for (double v : values) {
        s.insert(k, v);
        k = k.successor();
    }
    return s;
}

}  // namespace

TEST(Pearson, SelfCorrelationIsOne) {
    PairedSample s;
    Rng rng(1);
    for (int i = 0; i < 50; ++i) {
        double x = rng.normal();
        s.emplace_back(x, x);
    }
    EXPECT_NEAR(*pearson(s), 1.0, 1e-14);
}

TEST(Pearson, AntiCorrelationIsMinusOne) {
    PairedSample s;
    Rng rng(2);
    for (int i = 0; i < 50; ++i) {
        double x = rng.normal();
        s.emplace_back(x, -x);
    }
    EXPECT_NEAR(*pearson(s), -1.0, 1e-14);
}

TEST(Pearson, UndefinedCases) {
    EXPECT_FALSE(pearson({}).has_value());
    EXPECT_FALSE(pearson({{1.0, 2.0}}).has_value());
    EXPECT_FALSE(pearson({{1.0, 2.0}, {1.0, 3.0}}).has_value());   // constant x
    EXPECT_FALSE(pearson({{1.0, 2.0}, {3.0, 2.0}}).has_value());   // constant y
}

TEST(Pearson, AffineInvarianceAndBound) {
    Rng rng(3);
    for (int rep = 0; rep < 20; ++rep) {
        PairedSample s, s2;
        double a = rng.uniform(0.1, 5.0), b = rng.uniform(-10.0, 10.0);
        for (int i = 0; i < 40; ++i) {
            double x = rng.normal(), y = 0.4 * x + rng.normal();
            s.emplace_back(x, y);
            s2.emplace_back(a * x + b, y);
        }
        double r1 = *pearson(s), r2 = *pearson(s2);
        EXPECT_NEAR(r1, r2, 1e-10);
        EXPECT_LE(std::abs(r1), 1.0 + 1e-12);
    }
}

TEST(Screen, IdentityAtLeadZero) {
    auto cpi = read_series_csv(kFixtures + "/CPI_M.csv", "CPI_M");
    TransformSpec yoy{TransformKind::RDIFF, 12};
    auto rep = screen(cpi, cpi, yoy, yoy, 0, kAll);
    EXPECT_NEAR(*rep.pearson_r, 1.0, 1e-14);
    EXPECT_EQ(rep.n_pairs, 900);
}

TEST(Screen, FixtureFedFundsCorrelation) {
    // expected values frozen from an independent evaluation of the same CSVs
    auto cpi = read_series_csv(kFixtures + "/CPI_M.csv", "CPI_M");
    auto fed = read_series_csv(kFixtures + "/FEDFND_EFF_M.csv", "FEDFND_EFF_M");
    auto rep = screen(cpi, fed, {TransformKind::RDIFF, 12}, {TransformKind::RAW, 1}, 0,
                      {{1973, 1}, {2022, 12}});
    EXPECT_EQ(rep.n_pairs, 600);
    EXPECT_NEAR(*rep.pearson_r, 0.698908716256, 1e-9);
}

TEST(Screen, FixtureForwardCpiCorrelation) {
    auto cpi = read_series_csv(kFixtures + "/CPI_M.csv", "CPI_M");
    TransformSpec yoy{TransformKind::RDIFF, 12};
    auto rep = screen(cpi, cpi, yoy, yoy, 12, {{1952, 1}, {2022, 12}});
    EXPECT_EQ(rep.n_pairs, 840);
    EXPECT_NEAR(*rep.pearson_r, 0.751176867743, 1e-9);
}

TEST(Screen, LeadSwapSymmetry) {
    auto cpi = read_series_csv(kFixtures + "/CPI_M.csv", "CPI_M");
    auto uer = read_series_csv(kFixtures + "/UER_M.csv", "UER_M");
    TransformSpec yoy{TransformKind::RDIFF, 12};
    TransformSpec raw{TransformKind::RAW, 1};
    for (int lead : {0, 1, 12, -6}) {
        auto ab = screen(cpi, uer, yoy, raw, lead, kAll);
        auto ba = screen(uer, cpi, raw, yoy, -lead, kAll);
        EXPECT_EQ(ab.n_pairs, ba.n_pairs);
        EXPECT_NEAR(*ab.pearson_r, *ba.pearson_r, 1e-12);
    }
}

TEST(Bucket, SpecPartition) {
    BucketSpec b{{0.02, 0.04}};
    b.validate();
    EXPECT_EQ(b.bucket_count(), 3u);
    EXPECT_EQ(b.bucket_of(0.0), 0u);
    EXPECT_EQ(b.bucket_of(0.02), 0u);   // right-closed
    EXPECT_EQ(b.bucket_of(0.0200001), 1u);
    EXPECT_EQ(b.bucket_of(0.04), 1u);
    EXPECT_EQ(b.bucket_of(0.05), 2u);
    EXPECT_EQ(b.label(1), "(0.02, 0.04]");
    BucketSpec bad{{0.04, 0.02}};
    EXPECT_THROW(bad.validate(), config_error);
}

TEST(Bucket, SingleBucketEqualsScreen) {
    auto cpi = read_series_csv(kFixtures + "/CPI_M.csv", "CPI_M");
    auto uer = read_series_csv(kFixtures + "/UER_M.csv", "UER_M");
    TransformSpec yoy{TransformKind::RDIFF, 12};
    TransformSpec raw{TransformKind::RAW, 1};
    auto whole = screen(cpi, uer, yoy, raw, 0, kAll);
    auto parts = screen_bucketed(cpi, uer, yoy, raw, 0, kAll, BucketSpec{{}});
    ASSERT_EQ(parts.size(), 1u);
    EXPECT_EQ(parts[0].month_count, whole.n_pairs);
    EXPECT_NEAR(*parts[0].report.pearson_r, *whole.pearson_r, 1e-14);
}

TEST(Bucket, CountsSumToUnbucketed) {
    auto cpi = read_series_csv(kFixtures + "/CPI_M.csv", "CPI_M");
    auto uer = read_series_csv(kFixtures + "/UER_M.csv", "UER_M");
    TransformSpec yoy{TransformKind::RDIFF, 12};
    TransformSpec raw{TransformKind::RAW, 1};
    auto whole = screen(cpi, uer, yoy, raw, 12, kAll);
    auto parts = screen_bucketed(cpi, uer, yoy, raw, 12, kAll, BucketSpec{{0.02, 0.04}});
    ASSERT_EQ(parts.size(), 3u);
    int total = 0;
    for (const auto& p : parts) total += p.month_count;
    EXPECT_EQ(total, whole.n_pairs);
}

TEST(Bucket, DegenerateBucketReportsUndefined) {
    auto x = make("x", {2000, 1}, {1, 2, 3, 4, 100});
    auto y = make("y", {2000, 1}, {2, 4, 6, 8, 10});
    auto parts = screen_bucketed(x, y, {TransformKind::RAW, 1}, {TransformKind::RAW, 1}, 0,
                                 kAll, BucketSpec{{50.0}});
    ASSERT_EQ(parts.size(), 2u);
    EXPECT_EQ(parts[1].month_count, 1);
    EXPECT_FALSE(parts[1].report.pearson_r.has_value());
}

TEST(Bucket, SignFlipAcrossBuckets) {
    // y = +x below the edge, y = -x above it
    MonthlySeries x("x"), y("y");
    Rng rng(77);
    MonthKey k{2000, 1};
    for (int i = 0; i < 400; ++i) {
        double v = rng.uniform(-0.1, 0.1);
        x.insert(k, v);
        y.insert(k, v > 0.04 ? -v : v);
        k = k.successor();
    }
    auto parts = screen_bucketed(x, y, {TransformKind::RAW, 1}, {TransformKind::RAW, 1}, 0,
                                 kAll, BucketSpec{{0.04}});
    ASSERT_EQ(parts.size(), 2u);
    EXPECT_NEAR(*parts[0].report.pearson_r, 1.0, 1e-12);
    EXPECT_NEAR(*parts[1].report.pearson_r, -1.0, 1e-12);
}

TEST(Fisher, HandValues) {
    EXPECT_DOUBLE_EQ(fisher_nominal(0.0, 0.0), 0.0);
    EXPECT_NEAR(fisher_nominal(0.02, 0.03), 0.0506, 1e-15);
    Rng rng(5);
    for (int i = 0; i < 20; ++i) {
        double r = rng.uniform(-0.5, 0.5);
        EXPECT_NEAR(fisher_nominal(r, 0.0), r, 2e-16);  // one rounding of (1+r)
    }
    EXPECT_THROW((void)fisher_nominal(-1.0, 0.1), domain_error);
    EXPECT_THROW((void)fisher_nominal(0.1, -1.5), domain_error);
}

TEST(TransformMatrix, FixtureCpiTableShape) {
    auto cpi = read_series_csv(kFixtures + "/CPI_M.csv", "CPI_M");
    std::vector<TransformSpec> specs = {
        {TransformKind::RDIFF, 12}, {TransformKind::LDIFF, 12}, {TransformKind::RDIFF, 6},
        {TransformKind::LDIFF, 6},  {TransformKind::RDIFF, 3},  {TransformKind::LDIFF, 3},
    };
    auto mat = transform_correlation_matrix(cpi, specs,
                                            MonthWindow{{1950, 1}, {2022, 12}});
    ASSERT_EQ(mat.size(), 6u);
    for (size_t i = 0; i < 6; ++i) {
        EXPECT_DOUBLE_EQ(mat[i][i], 1.0);
        for (size_t j = 0; j < 6; ++j) EXPECT_DOUBLE_EQ(mat[i][j], mat[j][i]);
    }
    // frozen from an independent evaluation of the same CSV
    EXPECT_NEAR(mat[0][1], 0.999803263847, 1e-9);  // RDIFF12M ~ LDIFF12M
    EXPECT_NEAR(mat[0][2], 0.922533913256, 1e-9);  // RDIFF12M ~ RDIFF6M
    EXPECT_NEAR(mat[0][4], 0.823984797981, 1e-9);  // RDIFF12M ~ RDIFF3M
    EXPECT_NEAR(mat[4][5], 0.999968949516, 1e-9);  // RDIFF3M ~ LDIFF3M
}

TEST(TransformMatrix, NeedsTwoSpecs) {
    auto s = make("x", {2000, 1}, {1, 2, 3});
    EXPECT_THROW((void)transform_correlation_matrix(s, {{TransformKind::RAW, 1}}),
                 config_error);
}
