#include <doctest.h>

#include "support.hpp"

#include "scalelaw/error.hpp"

using namespace scalelaw;
using testing::brute_bin_minima;
using testing::brute_skyline;

namespace {

std::vector<std::pair<double, double>> xy(const std::vector<FrontierPoint>& pts) {
    std::vector<std::pair<double, double>> out;
    for (const auto& p : pts) out.emplace_back(p.x, p.error);
    return out;
}

}  // namespace

TEST_CASE("single point occupies one bin") {
    const std::vector<Observation> pts{{1e9, 0.5}};
    const auto out = log_bin_minima(pts);
    REQUIRE(out.size() == 1);
    CHECK(out[0].x == 1e9);
    CHECK(out[0].error == 0.5);
    CHECK(out[0].source_index == 0);
}

TEST_CASE("two bins split at the geometric midpoint") {
    const std::vector<Observation> pts{{1e3, 0.5}, {1.01e3, 0.4}, {1e6, 0.3}};
    const auto out = log_bin_minima(pts, 2);
    CHECK(xy(out) == std::vector<std::pair<double, double>>{{1.01e3, 0.4}, {1e6, 0.3}});
    CHECK(out[0].source_index == 1);
}

TEST_CASE("maximum x falls in the last bin") {
    CHECK(log_bin_index(1e6, 1e3, 1e6, 3) == 2);
    CHECK(log_bin_index(1e3, 1e3, 1e6, 3) == 0);
    CHECK(log_bin_index(1e4, 1e3, 1e6, 3) == 1);
    CHECK(log_bin_index(9.999e3, 1e3, 1e6, 3) == 0);
}

TEST_CASE("ties inside a bin prefer smaller x then smaller index") {
    const std::vector<Observation> pts{{2e3, 0.4}, {1.5e3, 0.4}, {1.5e3, 0.4}, {1e6, 0.1}};
    const auto out = log_bin_minima(pts, 2);
    REQUIRE(out.size() == 2);
    CHECK(out[0].x == 1.5e3);
    CHECK(out[0].source_index == 1);
}

TEST_CASE("200 random points match the brute-force binning oracle") {
    std::mt19937_64 gen(2024);
    const auto pts = testing::random_observations(gen, 200);
    const auto out = log_bin_minima(pts, 1500);
    const auto oracle = brute_bin_minima(pts, 1500);
    CHECK(out == oracle);
}

TEST_CASE("binning rejects bad input") {
    CHECK_THROWS_AS(log_bin_minima(std::vector<Observation>{}), InputError);
    CHECK_THROWS_AS(log_bin_minima(std::vector<Observation>{{0.0, 0.1}}), InputError);
    CHECK_THROWS_AS(log_bin_minima(std::vector<Observation>{{-1.0, 0.1}}), InputError);
    CHECK_THROWS_AS(log_bin_minima(std::vector<Observation>{{1.0, 0.1}}, 0), InputError);
}

TEST_CASE("skyline drops dominated points") {
    const std::vector<Observation> pts{{1e6, 0.9}, {2e6, 0.8}, {3e6, 0.85}, {4e6, 0.75}};
    const auto out = skyline_minima(pts);
    CHECK(xy(out) == std::vector<std::pair<double, double>>{{1e6, 0.9}, {2e6, 0.8}, {4e6, 0.75}});
    CHECK(out[2].source_index == 3);
    CHECK(out[0].axis == Axis::samples);
}

TEST_CASE("strict staircase survives whole") {
    const std::vector<Observation> pts{{5, 0.1}, {1, 0.9}, {2, 0.7}, {3, 0.5}, {4, 0.3}};
    CHECK(skyline_minima(pts).size() == 5);
}

TEST_CASE("exact duplicates keep the smallest source index") {
    const std::vector<Observation> pts{{2, 0.5}, {1, 0.6}, {2, 0.5}};
    const auto out = skyline_minima(pts);
    REQUIRE(out.size() == 2);
    CHECK(out[1].source_index == 0);
}

TEST_CASE("equal x keeps only the lower error") {
    const std::vector<Observation> pts{{2, 0.5}, {2, 0.4}};
    const auto out = skyline_minima(pts);
    REQUIRE(out.size() == 1);
    CHECK(out[0].source_index == 1);
}

TEST_CASE("300 random points match the pairwise dominance oracle") {
    std::mt19937_64 gen(77);
    const auto pts = testing::random_observations(gen, 300);
    CHECK(skyline_minima(pts) == brute_skyline(pts));
}

TEST_CASE("skyline rejects empty input") {
    CHECK_THROWS_AS(skyline_minima(std::vector<Observation>{}), InputError);
}

TEST_CASE("frontier CSV round-trips") {
    const std::vector<FrontierPoint> pts{{1.2345678901234567e9, 0.123456789, 4, Axis::compute},
                                         {3e10, 0.1, 9, Axis::compute}};
    const auto text = frontier_to_csv(pts);
    CHECK(text.rfind("x,error,source_index,axis\n", 0) == 0);
    CHECK(frontier_from_csv(text) == pts);
    CHECK_THROWS_AS(frontier_from_csv("a,b\n1,2\n"), InputError);
}

TEST_CASE("property: every input point is on the frontier or beaten") {
    std::mt19937_64 gen(9);
    for (int trial = 0; trial < 100; ++trial) {
        const auto pts = testing::random_observations(gen, 1 + gen() % 200);
        const std::size_t bins = 1 + gen() % 50;
        const auto bin = log_bin_minima(pts, bins);
        const auto sky = skyline_minima(pts);

        double lo = pts[0].x, hi = pts[0].x;
        for (const auto& p : pts) {
            lo = std::min(lo, p.x);
            hi = std::max(hi, p.x);
        }
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const auto k = log_bin_index(pts[i].x, lo, hi, bins);
            bool found = false;
            for (const auto& f : bin) {
                if (log_bin_index(f.x, lo, hi, bins) != k) continue;
                found = true;
                CHECK(f.error <= pts[i].error);
            }
            CHECK(found);

            bool on_sky = false, dominated = false;
            for (const auto& s : sky) {
                if (s.source_index == i) on_sky = true;
                if (s.x <= pts[i].x && s.error <= pts[i].error) dominated = true;
            }
            CHECK((on_sky || dominated));
        }
        for (std::size_t j = 1; j < bin.size(); ++j) CHECK(bin[j - 1].x < bin[j].x);
        for (std::size_t j = 1; j < sky.size(); ++j) {
            CHECK(sky[j - 1].x < sky[j].x);
            CHECK(sky[j - 1].error > sky[j].error);
        }
    }
}

TEST_CASE("property: skyline is idempotent") {
    std::mt19937_64 gen(10);
    for (int trial = 0; trial < 100; ++trial) {
        const auto pts = testing::random_observations(gen, 1 + gen() % 300);
        const auto once = skyline_minima(pts);
        const auto twice = skyline_minima(to_observations(once));
        CHECK(xy(twice) == xy(once));
    }
}

TEST_CASE("property: many bins recover per-distinct-x minima") {
    std::mt19937_64 gen(12);
    std::uniform_real_distribution<double> err(0.0, 1.0);
    const std::vector<double> xs{1e3, 2e3, 5e4, 1e6, 3e7, 1e9};
    std::vector<Observation> pts;
    for (int i = 0; i < 60; ++i) pts.push_back({xs[gen() % xs.size()], err(gen)});
    const auto out = log_bin_minima(pts, 100000);
    REQUIRE(out.size() == xs.size());
    for (std::size_t k = 0; k < xs.size(); ++k) {
        double best = 2.0;
        for (const auto& p : pts)
            if (p.x == xs[k]) best = std::min(best, p.error);
        CHECK(out[k].x == xs[k]);
        CHECK(out[k].error == best);
    }
}
