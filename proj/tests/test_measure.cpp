#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <vector>

#include "doctest.h"
#include "hfm/error.hpp"
#include "hfm/generators.hpp"
#include "hfm/measure.hpp"
#include "hfm/regression.hpp"

using namespace hfm;

namespace {

const double kCantorDim = std::log(2.0) / std::log(3.0);

Index pow3(int e) {
    Index n = 1;
    for (int i = 0; i < e; ++i) n *= 3;
    return n;
}

// Minimum over every composition of k into parts <= m, by plain recursion.
double enumerate_compositions(Index k, Index m, Index n, double s) {
    if (k == 0) return 0.0;
    double best = std::numeric_limits<double>::infinity();
    for (Index t = 1; t <= std::min(k, m); ++t)
        best = std::min(best, std::pow(static_cast<double>(t) / n, s) +
                                  enumerate_compositions(k - t, m, n, s));
    return best;
}

GridSet random_set(std::mt19937_64& rng, Index n, int max_runs) {
    std::vector<IndexRun> runs;
    for (int r = static_cast<int>(rng() % (max_runs + 1)); r > 0; --r) {
        const Index a = static_cast<Index>(rng() % (n + 1));
        const Index len = 1 + static_cast<Index>(rng() % std::max<Index>(1, n / 6));
        runs.push_back({a, std::min(len, n - a + 1)});
    }
    return GridSet::from_runs(runs, GridScale(n));
}

Partition random_partition(std::mt19937_64& rng, const GridSet& set, Index max_points, double s) {
    Partition p;
    p.s = s;
    p.scale = set.scale();
    p.delta = static_cast<double>(max_points) / set.scale().n();
    for (const auto& run : set.runs()) {
        Index at = run.start;
        while (at <= run.last()) {
            const Index t = std::min<Index>(1 + static_cast<Index>(rng() % max_points),
                                            run.last() - at + 1);
            p.pieces.push_back({at, t});
            at += t;
        }
    }
    p.cost = p.recompute_cost();
    return p;
}

}  // namespace

TEST_CASE("h_delta_s: single point") {
    for (Index n : {10, 1000, 1'000'000}) {
        const auto set = GridSet::from_runs({{n / 2, 1}}, GridScale(n));
        for (double s : {0.2, 0.5, 1.0}) {
            const auto r = h_delta_s(set, {s, 0.5, GridScale(n)});
            CHECK(r.value == doctest::Approx(std::pow(1.0 / n, s)).epsilon(1e-14));
            CHECK(r.partition.pieces.size() == 1);
        }
    }
}

TEST_CASE("h_delta_s: long run scales like (l/delta) delta^s") {
    const Index n = 1'000'000;
    for (double ell : {0.25, 0.5, 1.0}) {
        const Index points = static_cast<Index>(ell * n) + 1;
        const auto set = GridSet::from_runs({{0, points}}, GridScale(n));
        for (double delta : {1e-3, 1e-4}) {
            for (double s : {0.3, kCantorDim, 1.0}) {
                const double v = h_delta_s_value(set, {s, delta, GridScale(n)}).first;
                const double approx = (ell / delta) * std::pow(delta, s);
                CHECK(std::abs(v - approx) / approx <= 2 * delta / ell);
            }
        }
    }
}

TEST_CASE("h_delta_s: stage-4 Cantor at n = 3^8") {
    const Index n = pow3(8);
    const double delta = std::pow(3.0, -4) + 1.0 / n;
    const auto set = render({"c", CantorSet{1.0 / 3, 4}}, GridScale(n));
    const MeasureParams p{kCantorDim, delta, GridScale(n)};
    const auto r = h_delta_s(set, p);
    CHECK(r.value == h_delta_s_oracle(set, p));
    CHECK(r.partition.pieces.size() == 16);
    CHECK(r.value == doctest::Approx(16 * std::pow(std::pow(3.0, -4) + 1.0 / n, kCantorDim)).epsilon(1e-12));
}

TEST_CASE("oracle examples") {
    const GridScale ten(10);
    const auto five = GridSet::from_runs({{2, 5}}, ten);
    // Parameter delta = 0.2 gives at most two points per piece.
    CHECK(h_delta_s_oracle(five, {1.0, 0.2, ten}) == doctest::Approx(0.5).epsilon(1e-15));
    const double expected = enumerate_compositions(5, 2, 10, 0.5);
    CHECK(expected == doctest::Approx(2 * std::sqrt(0.2) + std::sqrt(0.1)).epsilon(1e-15));
    CHECK(h_delta_s_oracle(five, {0.5, 0.2, ten}) == doctest::Approx(expected).epsilon(1e-15));
    CHECK(h_delta_s_oracle(GridSet(ten), {0.5, 0.2, ten}) == 0.0);

    const GridScale big(100'000);
    try {
        h_delta_s_oracle(GridSet::from_runs({{0, 20'000}}, big), {0.5, 0.01, big});
        FAIL("expected TooLarge");
    } catch (const MeasureError& e) {
        CHECK(e.code() == ErrorCode::TooLarge);
    }
}

TEST_CASE("oracle agrees with brute-force composition enumeration") {
    for (Index k = 1; k <= 12; ++k) {
        for (Index m = 1; m <= 6; ++m) {
            for (double s : {0.25, 0.5, 0.9}) {
                const GridScale scale(20);
                const auto run = GridSet::from_runs({{3, k}}, scale);
                const MeasureParams p{s, static_cast<double>(m) / 20, scale};
                CHECK(h_delta_s_oracle(run, p) ==
                      doctest::Approx(enumerate_compositions(k, m, 20, s)).epsilon(1e-13));
            }
        }
    }
}

TEST_CASE("closed form equals the oracle on every set of n = 16") {
    const int n = 16;
    const GridScale scale(n);
    for (double delta : {2.0 / 16, 3.0 / 16, 5.0 / 16}) {
        for (double s : {0.3, 0.63, 1.0}) {
            const MeasureParams p{s, delta, scale};
            for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << (n + 1)); ++mask) {
                const auto set = GridSet::from_mask(mask, scale);
                if (h_delta_s_value(set, p).first != h_delta_s_oracle(set, p))
                    FAIL("mismatch: mask ", mask, " delta ", delta, " s ", s);
            }
        }
    }
}

TEST_CASE("witness partition is valid and optimal") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 300; ++trial) {
        const Index n = 20 + static_cast<Index>(rng() % 3000);
        const auto set = random_set(rng, n, 8);
        const double delta = (1.0 + static_cast<double>(rng() % 50)) / n;
        const double s = 0.05 + 0.95 * static_cast<double>(rng() % 1000) / 999.0;
        const MeasureParams p{s, delta, GridScale(n)};
        const auto r = h_delta_s(set, p);
        CHECK(r.partition.is_partition_of(set));
        CHECK(r.partition.max_piece_points() <= p.max_piece_points());
        CHECK(r.partition.recompute_cost() == r.value);
        CHECK(h_delta_s_value(set, p) == std::pair{r.value, static_cast<Index>(r.partition.pieces.size())});
        if (set.cardinality() <= kOracleMaxPoints) CHECK(r.value == h_delta_s_oracle(set, p));
    }
}

TEST_CASE("h_delta_s errors") {
    const GridScale ten(10);
    const auto set = GridSet::from_runs({{0, 3}}, ten);
    try {
        h_delta_s(set, {0.5, 0.05, ten});
        FAIL("expected GridTooCoarse");
    } catch (const MeasureError& e) {
        CHECK(e.code() == ErrorCode::GridTooCoarse);
    }
    CHECK(h_delta_s(GridSet(ten), {0.5, 0.05, ten}).value == 0.0);
    for (double s : {0.0, -0.5, 1.5, std::nan("")}) {
        try {
            h_delta_s(set, {s, 0.5, ten});
            FAIL("expected InvalidS");
        } catch (const MeasureError& e) {
            CHECK(e.code() == ErrorCode::InvalidS);
        }
    }
    CHECK_THROWS_AS(h_delta_s(set, {0.5, 0.5, GridScale(11)}), MeasureError);
}

TEST_CASE("value is zero exactly for the empty set") {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 100; ++trial) {
        const auto set = random_set(rng, 500, 5);
        const double v = h_delta_s_value(set, {0.5, 0.1, GridScale(500)}).first;
        CHECK((v == 0.0) == set.empty());
    }
}

TEST_CASE("monotone in delta and in s, additive over runs") {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 200; ++trial) {
        const Index n = 50 + static_cast<Index>(rng() % 5000);
        const auto set = random_set(rng, n, 10);
        const GridScale scale(n);
        double prev = -1.0;
        for (Index m = 40; m >= 1; m -= 3) {
            const double v = h_delta_s_value(set, {0.6, static_cast<double>(m) / n, scale}).first;
            CHECK(v >= prev);
            prev = v;
        }
        prev = std::numeric_limits<double>::infinity();
        for (double s = 0.05; s <= 1.0; s += 0.05) {
            const double v = h_delta_s_value(set, {s, 7.0 / n, scale}).first;
            CHECK(v <= prev * (1 + 1e-15));
            prev = v;
        }
        double parts = 0.0;
        for (const auto& run : set.runs())
            parts += h_delta_s_value(GridSet::from_runs({run}, scale), {0.4, 9.0 / n, scale}).first;
        CHECK(h_delta_s_value(set, {0.4, 9.0 / n, scale}).first ==
              doctest::Approx(parts).epsilon(1e-13));
    }
}

TEST_CASE("s = 1 reduces to card / n") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 200; ++trial) {
        const Index n = 1 + static_cast<Index>(rng() % 100000);
        const auto set = random_set(rng, n, 12);
        for (double delta : {1.0 / n, 0.001, 0.1, 1.0}) {
            if (static_cast<Index>(delta * n) < 1) continue;
            const double v = h_delta_s_value(set, {1.0, delta, GridScale(n)}).first;
            const double card_over_n = static_cast<double>(set.cardinality()) / n;
            CHECK(v == doctest::Approx(card_over_n).epsilon(1e-12));
            CHECK(std::abs(v - discrete_lebesgue(set)) <= 1.0 / n);
        }
    }
}

TEST_CASE("monotone in the set at s = 1 and for run-preserving inclusions") {
    const int n = 11;
    const GridScale scale(n);
    const std::uint64_t all = (std::uint64_t{1} << (n + 1)) - 1;
    for (std::uint64_t big = 0; big <= all; big += 5) {
        const auto sb = GridSet::from_mask(big, scale);
        for (std::uint64_t small = big;; small = (small - 1) & big) {
            const auto ss = GridSet::from_mask(small, scale);
            const MeasureParams p1{1.0, 4.0 / n, scale};
            CHECK(h_delta_s_value(ss, p1).first <= h_delta_s_value(sb, p1).first + 1e-15);
            // Each run of the larger set holds at most one run of the smaller.
            bool run_preserving = true;
            for (const auto& r : sb.runs()) {
                int inside = 0;
                for (const auto& q : ss.runs()) inside += (q.start >= r.start && q.last() <= r.last());
                run_preserving = run_preserving && inside <= 1;
            }
            if (run_preserving) {
                for (double s : {0.25, kCantorDim}) {
                    const MeasureParams p{s, 4.0 / n, scale};
                    CHECK(h_delta_s_value(ss, p).first <= h_delta_s_value(sb, p).first);
                }
            }
            if (small == 0) break;
        }
    }
}

TEST_CASE("splitting a run can raise the value when s < 1") {
    // {0, 2} inside {0, 1, 2}: two singleton pieces cost more than one piece of three.
    const GridScale scale(10);
    const MeasureParams p{0.5, 0.3, scale};
    const auto whole = GridSet::from_runs({{0, 3}}, scale);
    const auto ends = GridSet::from_runs({{0, 1}, {2, 1}}, scale);
    CHECK(ends.is_subset_of(whole));
    CHECK(h_delta_s_value(ends, p).first > h_delta_s_value(whole, p).first);
}

TEST_CASE("Cantor value scales like delta^(s-1) for small delta") {
    const Index n = pow3(14);
    const auto set = render({"c", CantorSet{1.0 / 3, 6}}, GridScale(n));
    std::vector<double> x, y;
    for (int k = 8; k <= 11; ++k) {
        const double delta = std::pow(3.0, -k);
        x.push_back(std::log(delta));
        y.push_back(std::log(h_delta_s_value(set, {kCantorDim, delta, GridScale(n)}).first));
    }
    CHECK(least_squares(x, y).slope == doctest::Approx(kCantorDim - 1).epsilon(0).scale(1).epsilon(0.02));
}

TEST_CASE("coarsen_partition examples") {
    const GridScale scale(100);
    Partition one;
    one.scale = scale;
    one.s = 0.5;
    one.delta = 0.05;
    one.pieces = {{10, 5}};
    one.cost = one.recompute_cost();
    const auto same = coarsen_partition(one, 0.2);
    CHECK(same.pieces == one.pieces);
    CHECK(same.cost == one.cost);

    Partition two = one;
    two.pieces = {{10, 5}, {15, 5}};
    two.cost = two.recompute_cost();
    const auto merged = coarsen_partition(two, 0.1);
    REQUIRE(merged.pieces.size() == 1);
    CHECK(merged.pieces[0] == DeltaInterval{10, 10});
    CHECK(merged.cost - two.cost == doctest::Approx(std::sqrt(0.1) - 2 * std::sqrt(0.05)));
    CHECK(merged.cost < two.cost);

    two.s = 1.0;
    two.cost = two.recompute_cost();
    CHECK(coarsen_partition(two, 0.1).cost == doctest::Approx(two.cost).epsilon(1e-15));

    for (double eta : {0.0, -1.0}) {
        try {
            coarsen_partition(two, eta);
            FAIL("expected InvalidEta");
        } catch (const MeasureError& e) {
            CHECK(e.code() == ErrorCode::InvalidEta);
        }
    }
}

TEST_CASE("coarsen_partition contract on random partitions") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 500; ++trial) {
        const Index n = 10 + static_cast<Index>(rng() % 191);
        const auto set = random_set(rng, n, 6);
        const Index m = 1 + static_cast<Index>(rng() % 8);
        const double s = 0.1 + 0.9 * static_cast<double>(rng() % 100) / 99.0;
        const auto part = random_partition(rng, set, m, s);
        const double eta = part.delta * (1.0 + static_cast<double>(rng() % 6));
        const auto out = coarsen_partition(part, eta);
        CHECK(out.is_partition_of(set));
        CHECK(static_cast<double>(out.max_piece_points()) / n <= eta + part.delta);
        CHECK(out.cost <= part.cost * (1 + 1e-12));
    }
}

TEST_CASE("standard_cover") {
    const GridScale ten(10);
    Partition whole;
    whole.scale = ten;
    whole.pieces = {{0, 11}};
    CHECK(standard_cover(whole) == RealCover{{0.0, 1.0}});
    CHECK(standard_cover(Partition{}).empty());

    Partition mixed = whole;
    mixed.pieces = {{0, 1}, {3, 4}};
    CHECK(standard_cover(mixed).size() == 2);
    CHECK(standard_cover(mixed, 0.1).size() == 1);

    // Stage-2 Cantor partition at n = 81 maps back onto the stage-2 intervals.
    const GridScale scale(81);
    const auto set = render({"c", CantorSet{1.0 / 3, 2}}, scale);
    const auto r = h_delta_s(set, {kCantorDim, 1.0 / 9 + 1.0 / 81, scale});
    const auto cover = standard_cover(r.partition);
    const auto exact = cantor_intervals(1.0 / 3, 2);
    REQUIRE(cover.size() == 4);
    double cover_cost = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(std::abs(cover[i].lo - exact[i].lo) <= 1.0 / 81);
        CHECK(std::abs(cover[i].hi - exact[i].hi) <= 1.0 / 81);
        CHECK(cover[i].length() <= 1.0 / 9 + 1.0 / 81);
        cover_cost += std::pow(cover[i].length(), kCantorDim);
    }
    CHECK(cover_cost <= r.partition.cost + 1e-12);
}

TEST_CASE("fattened_cover_superset examples") {
    const GridScale scale(1000);
    const auto all = fattened_cover_superset({{0.0, 1.0}}, 0.3, 0.7, scale);
    CHECK(all.set == GridSet::full(scale));

    // First interval widens by (eps/2)^(1/s) 2^(-1/s) per side: 0.005 at eps = 0.02, s = 1.
    const auto point = fattened_cover_superset({{1.0 / 3, 1.0 / 3}}, 0.02, 1.0, scale);
    const auto expected = render({"p", IntervalUnion{{{1.0 / 3 - 0.005, 1.0 / 3 + 0.005}}}}, scale);
    CHECK(point.set == expected);

    try {
        fattened_cover_superset({{0.2, 0.3}}, 0.0, 1.0, scale);
        FAIL("expected InvalidEps");
    } catch (const MeasureError& e) {
        CHECK(e.code() == ErrorCode::InvalidEps);
    }
    CHECK_THROWS_AS(fattened_cover_superset({{0.2, 0.3}}, 0.1, 0.0, scale), MeasureError);
}

TEST_CASE("fattened cover surplus stays within eps plus the grid allowance") {
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 400; ++trial) {
        const Index n = 100 + static_cast<Index>(rng() % 100000);
        const int count = 1 + static_cast<int>(rng() % 8);
        RealCover cover;
        for (int i = 0; i < count; ++i) {
            const double len = 0.1 + 0.2 * unit(rng);
            const double lo = (1.0 - len) * unit(rng);
            cover.push_back({lo, lo + len});
        }
        const double eps = 1e-3 + 0.2 * unit(rng);
        const double s = 0.5 + 0.5 * unit(rng);
        const auto f = fattened_cover_superset(cover, eps, s, GridScale(n));
        CHECK(f.rendered_cost <= f.guaranteed_bound(eps) + 1e-12);
        CHECK(f.surplus() <= eps + 4.0 * count / n);
        for (const auto& u : cover) {
            const auto inner = render({"u", IntervalUnion{{u}}}, GridScale(n));
            CHECK(inner.is_subset_of(f.set));
        }
    }
}

TEST_CASE("classical_cover_measure examples") {
    for (double ell : {0.1, 0.37, 1.0}) {
        for (double s : {0.3, 0.8, 1.0})
            CHECK(classical_cover_measure({{0.0, ell}}, ell, s, 64) ==
                  doctest::Approx(std::pow(ell, s)).epsilon(1e-12));
        CHECK(classical_cover_measure({{0.0, ell}}, ell / 7, 1.0, 1024) ==
              doctest::Approx(ell).epsilon(1e-12));
    }
    for (int m = 1; m <= 8; ++m) {
        const double delta = std::pow(3.0, -m);
        CHECK(classical_cover_measure(cantor_intervals(1.0 / 3, m), delta, kCantorDim, 256) ==
              doctest::Approx(std::pow(2.0, m) * std::pow(3.0, -m * kCantorDim)).epsilon(1e-9));
    }
    // Middle-half Cantor: 2^m intervals of 4^-m, critical exponent 1/2.
    for (int m = 1; m <= 6; ++m)
        CHECK(classical_cover_measure(cantor_intervals(0.5, m), std::pow(4.0, -m), 0.5, 256) ==
              doctest::Approx(1.0).epsilon(1e-9));
    // Isolated points are free; spanning a small gap is cheaper than two covers.
    CHECK(classical_cover_measure({{0.5, 0.5}}, 0.1, 0.5, 16) == 0.0);
    CHECK(classical_cover_measure({{0.0, 0.1}, {0.11, 0.2}}, 0.25, 0.5, 100) ==
          doctest::Approx(std::sqrt(0.2)));
    CHECK_THROWS_AS(classical_cover_measure({{-0.1, 0.2}}, 0.1, 0.5, 16), MeasureError);
}

TEST_CASE("classical_cover_measure does not increase under dyadic refinement") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 40; ++trial) {
        RealCover cover;
        for (int i = 0; i < 4; ++i) {
            const double a = unit(rng), b = unit(rng);
            cover.push_back({std::min(a, b), std::max(a, b)});
        }
        const double delta = 0.02 + 0.1 * unit(rng);
        const double s = 0.2 + 0.8 * unit(rng);
        double prev = std::numeric_limits<double>::infinity();
        for (Index res = 16; res <= 1024; res *= 2) {
            const double v = classical_cover_measure(cover, delta, s, res);
            CHECK(v <= prev);
            prev = v;
        }
    }
}

TEST_CASE("box_count_estimate") {
    const GridScale scale(Index{1} << 20);
    std::vector<Index> sizes;
    for (Index b = 16; b <= (Index{1} << 14); b *= 2) sizes.push_back(b);
    CHECK(box_count_estimate(GridSet::full(scale), sizes).dimension == doctest::Approx(1.0).epsilon(0.02));
    const auto point = box_count_estimate(GridSet::from_runs({{12345, 1}}, scale), sizes);
    CHECK(point.dimension == doctest::Approx(0.0).scale(1).epsilon(1e-12));
    for (const auto& [b, hits] : point.counts) CHECK(hits == 1);

    const Index n = pow3(8) * 8;
    const auto cantor = render({"c", CantorSet{1.0 / 3, 8}}, GridScale(n));
    std::vector<Index> triadic;
    for (int k = 0; k <= 6; ++k) triadic.push_back(pow3(k) * 8);
    CHECK(std::abs(box_count_estimate(cantor, triadic).dimension - kCantorDim) <= 0.03);

    try {
        box_count_estimate(GridSet::full(scale), {16});
        FAIL("expected DegenerateFit");
    } catch (const MeasureError& e) {
        CHECK(e.code() == ErrorCode::DegenerateFit);
    }
}
