#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "gaitrad/stats/stats.hpp"
#include "test_util.hpp"

using namespace gaitrad::stats;

TEST_CASE("error metrics follow the absolute and relative definitions") {
    const auto r = error_metrics(1.20, 1.15);
    CHECK(r.abs_err == doctest::Approx(0.05).epsilon(1e-12));
    REQUIRE(r.rel_err);
    CHECK(*r.rel_err == doctest::Approx(0.0416666666667).epsilon(1e-9));

    const auto eq = error_metrics(0.7, 0.7);
    CHECK(eq.abs_err == 0.0);
    CHECK(*eq.rel_err == 0.0);

    const auto zero_truth = error_metrics(0.0, 0.3);
    CHECK(zero_truth.abs_err == doctest::Approx(0.3));
    CHECK(!zero_truth.rel_err.has_value());

    CHECK_THROWS_AS(error_metrics(std::nan(""), 1.0), std::invalid_argument);
}

TEST_CASE("relative error is scale invariant") {
    for (double scale : {0.5, 2.0, 117.0}) {
        const auto a = error_metrics(1.2, 1.15);
        const auto b = error_metrics(1.2 * scale, 1.15 * scale);
        CHECK(*a.rel_err == doctest::Approx(*b.rel_err).epsilon(1e-12));
    }
}

TEST_CASE("kruskal-wallis on identical groups gives H=0 p=1") {
    const auto r = kruskal_wallis({{2.0, 2.0, 2.0}, {2.0, 2.0}});
    CHECK(r.h_statistic == 0.0);
    CHECK(r.p_value == 1.0);
}

TEST_CASE("kruskal-wallis separates disjoint groups") {
    const auto r = kruskal_wallis({{1, 2, 3, 4, 5}, {6, 7, 8, 9, 10}});
    // frozen from an independent implementation of the rank statistic
    CHECK(r.h_statistic == doctest::Approx(6.818181818181813).epsilon(1e-12));
    CHECK(r.p_value == doctest::Approx(0.009023438818080334).epsilon(1e-9));
    CHECK(r.p_value < 0.01);
}

TEST_CASE("kruskal-wallis matches the frozen three-group oracle with ties") {
    const auto r = kruskal_wallis(
        {{1.2, 3.4, 2.2}, {2.9, 3.1, 4.0, 2.2}, {5.5, 1.7, 3.3}});
    CHECK(r.h_statistic == doctest::Approx(0.8757621951219483).epsilon(1e-12));
    CHECK(r.p_value == doctest::Approx(0.6454025182287635).epsilon(1e-9));
}

TEST_CASE("kruskal-wallis is invariant under monotone transforms") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<std::vector<double>> groups(3);
    for (auto& grp : groups)
        for (int i = 0; i < 25; ++i) grp.push_back(g(rng));
    const auto base = kruskal_wallis(groups);
    auto transformed = groups;
    for (auto& grp : transformed)
        for (auto& v : grp) v = std::exp(3.0 * v) + 1.0;  // strictly monotone
    const auto after = kruskal_wallis(transformed);
    CHECK(base.h_statistic == doctest::Approx(after.h_statistic).epsilon(1e-12));
    CHECK(base.p_value == doctest::Approx(after.p_value).epsilon(1e-12));
}

TEST_CASE("kruskal-wallis null p-values are uniform") {
    std::mt19937_64 rng(123);
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<double> pvals;
    for (int run = 0; run < 200; ++run) {
        std::vector<std::vector<double>> groups(3);
        for (auto& grp : groups)
            for (int i = 0; i < 100; ++i) grp.push_back(g(rng));
        pvals.push_back(kruskal_wallis(groups).p_value);
    }
    CHECK(testutil::ks_uniform_p(pvals) > 0.01);
}

TEST_CASE("kruskal-wallis validates its inputs") {
    CHECK_THROWS_AS(kruskal_wallis({{1.0, 2.0}}), std::invalid_argument);
    CHECK_THROWS_AS(kruskal_wallis({{1.0}, {}}), std::invalid_argument);
}

TEST_CASE("pearson on exact linear data") {
    std::vector<double> x{1, 2, 3, 4, 5, 6};
    std::vector<double> y;
    for (double v : x) y.push_back(2.0 * v + 1.0);
    const auto [r, p] = pearson(x, y);
    CHECK(r == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(p == 0.0);

    std::vector<double> y_neg;
    for (double v : x) y_neg.push_back(-v);
    const auto [r2, p2] = pearson(x, y_neg);
    CHECK(r2 == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(p2 == 0.0);
}

TEST_CASE("pearson matches the frozen ten-point oracle") {
    const std::vector<double> x{0.5, 1.1, 1.9, 2.4, 3.3, 3.8, 4.6, 5.2, 6.1, 6.9};
    const std::vector<double> y{1.02, 1.9, 3.1, 3.4, 4.9, 5.4, 6.2, 7.3, 8.1, 9.4};
    const auto [r, p] = pearson(x, y);
    CHECK(r == doctest::Approx(0.9984609199685719).epsilon(1e-12));
    CHECK(p == doctest::Approx(2.4503072684942863e-11).epsilon(1e-6));

    const std::vector<double> y2{2.0, 0.9, 3.3, 1.8, 4.1, 2.2, 5.0, 3.1, 4.4, 6.0};
    const auto [r2, p2] = pearson(x, y2);
    CHECK(r2 == doctest::Approx(0.7950285842331188).epsilon(1e-12));
    CHECK(p2 == doctest::Approx(0.005980411836549771).epsilon(1e-9));
}

TEST_CASE("pearson is affine invariant and flips sign under negative scale") {
    const std::vector<double> x{0.5, 1.1, 1.9, 2.4, 3.3, 3.8, 4.6, 5.2, 6.1, 6.9};
    const std::vector<double> y{2.0, 0.9, 3.3, 1.8, 4.1, 2.2, 5.0, 3.1, 4.4, 6.0};
    const auto [r, p] = pearson(x, y);
    std::vector<double> xs;
    for (double v : x) xs.push_back(3.0 * v - 11.0);
    const auto [ra, pa] = pearson(xs, y);
    CHECK(ra == doctest::Approx(r).epsilon(1e-12));
    CHECK(pa == doctest::Approx(p).epsilon(1e-12));
    std::vector<double> xn;
    for (double v : x) xn.push_back(-2.0 * v);
    const auto [rn, pn] = pearson(xn, y);
    CHECK(rn == doctest::Approx(-r).epsilon(1e-12));
    CHECK(pn == doctest::Approx(p).epsilon(1e-9));
}

TEST_CASE("pearson rejects degenerate inputs") {
    CHECK_THROWS_AS(pearson({1.0, 2.0}, {1.0, 2.0}), std::invalid_argument);
    CHECK_THROWS_AS(pearson({1.0, 1.0, 1.0}, {1.0, 2.0, 3.0}), std::invalid_argument);
}

TEST_CASE("bland-altman two-point example") {
    const auto s = bland_altman({{1.0, 1.1}, {2.0, 1.9}});
    CHECK(s.mean_difference == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(s.loa_high == doctest::Approx(0.27718585822512662).epsilon(1e-9));
    CHECK(s.loa_low == doctest::Approx(-0.27718585822512662).epsilon(1e-9));
    CHECK(s.n == 2);
}

TEST_CASE("bland-altman identical pairs and constant bias") {
    const auto same = bland_altman({{1.5, 1.5}, {2.5, 2.5}, {0.7, 0.7}});
    CHECK(same.mean_difference == 0.0);
    CHECK(same.loa_high == same.loa_low);

    std::vector<std::pair<double, double>> biased;
    for (double t : {1.0, 1.3, 0.8, 2.2}) biased.emplace_back(t, t - 0.05);
    const auto b = bland_altman(biased);
    CHECK(b.mean_difference == doctest::Approx(0.05).epsilon(1e-12));
    CHECK(b.loa_high - b.loa_low < 1e-12);
}

TEST_CASE("bland-altman mean difference equals the difference of means") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g(1.0, 0.2);
    std::vector<std::pair<double, double>> pairs;
    double sum_t = 0.0, sum_e = 0.0;
    for (int i = 0; i < 40; ++i) {
        const double t = g(rng), e = g(rng);
        pairs.emplace_back(t, e);
        sum_t += t;
        sum_e += e;
    }
    const auto s = bland_altman(pairs);
    CHECK(s.mean_difference == doctest::Approx((sum_t - sum_e) / 40.0).epsilon(1e-12));
}

TEST_CASE("chi-squared and t tails match frozen oracle values") {
    CHECK(chi2_sf(6.818181818181818, 1) == doctest::Approx(0.009023438818080326).epsilon(1e-9));
    CHECK(chi2_sf(3.3, 2) == doctest::Approx(0.19204990862075405).epsilon(1e-10));
    CHECK(chi2_sf(10.5, 4) == doctest::Approx(0.03279698999488366).epsilon(1e-10));
    CHECK(chi2_sf(0.7, 3) == doctest::Approx(0.8732039490639542).epsilon(1e-10));
    CHECK(t_sf_two_sided(2.5, 8) == doctest::Approx(0.03694203771362407).epsilon(1e-10));
    CHECK(t_sf_two_sided(1.1, 3) == doctest::Approx(0.35168319493465117).epsilon(1e-10));
    CHECK(t_sf_two_sided(4.2, 15) == doctest::Approx(0.000772903349926262).epsilon(1e-9));
}
