#include <doctest.h>

#include <cmath>

#include "chronoml/metrics.hpp"
#include "helpers.hpp"

using namespace chronoml;
using namespace chronoml::testing;

TEST_CASE("mase: perfect forecast") {
    CHECK(mase({5, 6}, {5, 6}, {1, 2, 3, 4}, 1) == 0.0);
}

TEST_CASE("mase: hand-evaluated fixture") {
    // numerator mean(|5-4|, |6-4|) = 1.5, denominator mean lag-1 steps = 1.0
    CHECK(mase({5, 6}, {4, 4}, {1, 2, 3, 4}, 1) == doctest::Approx(1.5).epsilon(1e-12));
}

TEST_CASE("mase: constant insample has undefined scale") {
    CHECK_THROWS_AS(mase({1}, {2}, {2, 2, 2}, 1), UndefinedScaleError);
}

TEST_CASE("mase: length mismatch and short insample") {
    CHECK_THROWS(mase({1, 2}, {1}, {1, 2, 3}, 1));
    CHECK_THROWS_AS(mase({1}, {2}, {1, 2}, 2), UndefinedScaleError);
}

TEST_CASE("smape fixtures") {
    CHECK(smape({1, 2}, {1, 2}) == 0.0);
    CHECK(smape({1}, {3}) == doctest::Approx(1.0).epsilon(1e-12));  // 2*2/(1+3)
    CHECK(smape({0}, {0}) == 0.0);
}

TEST_CASE("rmse fixtures") {
    CHECK(rmse({1, 2, 3}, {1, 2, 3}) == 0.0);
    CHECK(rmse({0, 0}, {3, 4}) == doctest::Approx(std::sqrt(12.5)).epsilon(1e-12));
    CHECK(rmse({1}, {2}) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("panel_loss: single series equals the scalar metric") {
    const auto actual = make_panel({{5, 6}});
    const auto insample = make_panel({{1, 2, 3, 4}});
    const double got = panel_loss(LossKind::MASE, actual, {{{4}, {4}}}, insample, 1);
    CHECK(got == doctest::Approx(1.5).epsilon(1e-12));
}

TEST_CASE("panel_loss: mean over series") {
    // series 0: mase 1.0, series 1: mase 2.0 against unit lag-1 scale
    const auto actual = make_panel({{5, 6}, {5, 6}});
    const auto insample = make_panel({{1, 2, 3, 4}, {1, 2, 3, 4}});
    const double got =
        panel_loss(LossKind::MASE, actual, {{{4}, {5}}, {{3}, {4}}}, insample, 1);
    CHECK(got == doctest::Approx(1.5).epsilon(1e-12));
}

TEST_CASE("panel_loss: undefined-scale series skipped, all-undefined errors") {
    const auto actual = make_panel({{5}, {5}});
    auto insample = make_panel({{2, 2, 2}, {1, 2, 3}});
    // one series skipped, the other counted
    const double got = panel_loss(LossKind::MASE, actual, {{{4}}, {{4}}}, insample, 1);
    CHECK(got == doctest::Approx(1.0).epsilon(1e-12));

    const auto flat = make_panel({{2, 2, 2}, {3, 3, 3}});
    CHECK_THROWS_AS(panel_loss(LossKind::MASE, actual, {{{4}}, {{4}}}, flat, 1),
                    UndefinedScaleError);
}

TEST_CASE("metrics: nonnegative, zero iff equal") {
    Rng rng(5);
    for (int rep = 0; rep < 30; ++rep) {
        const auto actual = random_walk(rng, 8);
        auto forecast = actual;
        CHECK(rmse(actual, forecast) == 0.0);
        CHECK(smape(actual, forecast) == 0.0);
        forecast[3] += 0.5;
        CHECK(rmse(actual, forecast) > 0.0);
        CHECK(smape(actual, forecast) > 0.0);
    }
}

TEST_CASE("mase: shift invariance") {
    Rng rng(9);
    for (int rep = 0; rep < 20; ++rep) {
        const auto insample = random_walk(rng, 12);
        const auto actual = random_walk(rng, 4);
        const auto forecast = random_walk(rng, 4);
        const double c = uniform_real(rng, -50.0, 50.0);
        auto shift = [&](std::vector<double> v) {
            for (double &x : v) x += c;
            return v;
        };
        const double base = mase(actual, forecast, insample, 2);
        const double shifted = mase(shift(actual), shift(forecast), shift(insample), 2);
        CHECK(shifted == doctest::Approx(base).epsilon(1e-9));
    }
}

TEST_CASE("scaling: rmse linear, mase invariant") {
    Rng rng(13);
    for (int rep = 0; rep < 20; ++rep) {
        const auto actual = random_walk(rng, 6);
        const auto forecast = random_walk(rng, 6);
        const auto insample = random_walk(rng, 10);
        const double c = uniform_real(rng, 0.1, 10.0);
        auto scale = [&](std::vector<double> v) {
            for (double &x : v) x *= c;
            return v;
        };
        CHECK(rmse(scale(actual), scale(forecast)) ==
              doctest::Approx(c * rmse(actual, forecast)).epsilon(1e-9));
        CHECK(mase(scale(actual), scale(forecast), scale(insample), 1) ==
              doctest::Approx(mase(actual, forecast, insample, 1)).epsilon(1e-9));
    }
}

TEST_CASE("panel_loss: N copies equal the single-series loss") {
    Rng rng(17);
    const auto values = random_walk(rng, 10);
    const auto fc_vals = random_walk(rng, 2);
    const auto single_actual = make_panel({{values[8], values[9]}});
    const auto single_insample = make_panel({{values.begin(), values.begin() + 8}});
    std::vector<std::vector<double>> fc_rows{{fc_vals[0]}, {fc_vals[1]}};
    const double single =
        panel_loss(LossKind::RMSE, single_actual, {fc_rows}, single_insample, 1);

    const auto multi_actual = make_panel(
        {{values[8], values[9]}, {values[8], values[9]}, {values[8], values[9]}});
    const auto multi_insample =
        make_panel({{values.begin(), values.begin() + 8},
                    {values.begin(), values.begin() + 8},
                    {values.begin(), values.begin() + 8}});
    const double multi = panel_loss(LossKind::RMSE, multi_actual,
                                    {fc_rows, fc_rows, fc_rows}, multi_insample, 1);
    CHECK(multi == doctest::Approx(single).epsilon(1e-12));
}
