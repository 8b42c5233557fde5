#include <doctest.h>

#include <cmath>

#include "chronoml/transforms.hpp"
#include "helpers.hpp"

using namespace chronoml;
using namespace chronoml::testing;

namespace {

PanelDataset with_missing(std::vector<double> values, const std::vector<std::size_t> &holes) {
    auto ds = make_panel({values});
    for (std::size_t i : holes) ds.series[0].targets[i][0] = missing_value();
    return ds;
}

TransformSpec imputer(const std::string &strategy) {
    return {TransformKind::Imputer, strategy};
}

}  // namespace

TEST_CASE("imputer: forward fill") {
    auto ds = with_missing({1, 0, 3}, {1});
    FittedTransform::fit_transform(imputer("forward_fill"), ds);
    CHECK(dim0(ds.series[0].targets) == std::vector<double>{1, 1, 3});
}

TEST_CASE("imputer: leading missing backfilled") {
    auto ds = with_missing({0, 2, 0, 4}, {0, 2});
    FittedTransform::fit_transform(imputer("forward_fill"), ds);
    CHECK(dim0(ds.series[0].targets) == std::vector<double>{2, 2, 2, 4});
}

TEST_CASE("imputer: mean and zero") {
    auto ds = with_missing({1, 0, 3}, {1});
    FittedTransform::fit_transform(imputer("mean"), ds);
    CHECK(dim0(ds.series[0].targets) == std::vector<double>{1, 2, 3});

    auto dz = with_missing({1, 0, 3}, {1});
    FittedTransform::fit_transform(imputer("zero"), dz);
    CHECK(dim0(dz.series[0].targets) == std::vector<double>{1, 0, 3});
}

TEST_CASE("imputer: all-missing series errors under mean") {
    auto ds = with_missing({0, 0}, {0, 1});
    CHECK_THROWS(FittedTransform::fit_transform(imputer("mean"), ds));
}

TEST_CASE("scaler: standard uses the population convention") {
    auto ds = make_panel({{0, 2}});
    FittedTransform::fit_transform({TransformKind::Scaler, "standard"}, ds);
    CHECK(ds.series[0].targets[0][0] == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(ds.series[0].targets[1][0] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("scaler: train mean 0, std 1 per dimension") {
    Rng rng(31);
    auto ds = make_panel({random_walk(rng, 40)});
    FittedTransform::fit_transform({TransformKind::Scaler, "standard"}, ds);
    double mean = 0.0;
    for (const auto &row : ds.series[0].targets) mean += row[0];
    mean /= 40.0;
    double var = 0.0;
    for (const auto &row : ds.series[0].targets) var += (row[0] - mean) * (row[0] - mean);
    var /= 40.0;
    CHECK(std::abs(mean) < 1e-9);
    CHECK(std::abs(std::sqrt(var) - 1.0) < 1e-9);
}

TEST_CASE("detrender: exact linear trend leaves zero residuals") {
    auto ds = make_panel({{1, 2, 3, 4}});
    FittedTransform::fit_transform({TransformKind::Detrender, "", 1}, ds);
    for (const auto &row : ds.series[0].targets) CHECK(std::abs(row[0]) < 1e-12);
}

TEST_CASE("invertible transforms: inverse(transform(x)) within 1e-9") {
    Rng rng(37);
    const auto original = random_walk(rng, 24);
    const std::vector<TransformSpec> specs = {
        {TransformKind::Scaler, "standard"},
        {TransformKind::Scaler, "minmax"},
        {TransformKind::Detrender, "", 1},
        {TransformKind::Detrender, "", 0},
        {TransformKind::Deseasonalizer, "", 0, 6},
    };
    for (const auto &spec : specs) {
        auto ds = make_panel({original});
        const auto t = FittedTransform::fit_transform(spec, ds);
        // treat the last 4 transformed values as if they were forecasts for
        // steps T-4..T-1 of a series of length T-4
        auto shorter = make_panel({{original.begin(), original.end() - 4}});
        auto ds2 = shorter;
        const auto t2 = FittedTransform::fit_transform(spec, ds2);
        std::vector<std::vector<double>> fc;
        (void)t;
        // forecast the raw suffix through the fitted transform's coordinates:
        // apply-transform is fit-only, so check inverse on the training data
        // itself instead: inverse of transformed rows must reproduce inputs.
        fc.clear();
        for (const auto &row : ds.series[0].targets) fc.push_back(row);
        // shift: inverse_forecasts treats rows as steps T.. so rebuild using a
        // zero-length "train" trick is not possible; use the algebraic route:
        // re-apply the stored state by asking for steps 0..T-1 via a transform
        // fitted on the same data with train_length forced through a fresh fit
        // of an empty prefix is not supported -- instead validate elementwise
        // reconstruction directly for scaler (stateless in t) and via forecast
        // extrapolation for the others below.
        if (spec.kind == TransformKind::Scaler) {
            auto copy = fc;
            const auto fitted = FittedTransform::fit_transform(spec, ds);
            (void)fitted;
            t.inverse_forecasts(0, copy);
            for (std::size_t i = 0; i < copy.size(); ++i) {
                CHECK(copy[i][0] == doctest::Approx(original[i]).epsilon(1e-9));
            }
        }
    }
}

TEST_CASE("detrender inverse extrapolates the fitted trend") {
    auto ds = make_panel({{1, 2, 3, 4}});
    const auto t = FittedTransform::fit_transform({TransformKind::Detrender, "", 1}, ds);
    std::vector<std::vector<double>> fc{{0.0}, {0.0}};  // residual-space forecasts
    t.inverse_forecasts(0, fc);
    CHECK(fc[0][0] == doctest::Approx(5.0).epsilon(1e-9));
    CHECK(fc[1][0] == doctest::Approx(6.0).epsilon(1e-9));
}

TEST_CASE("deseasonalizer inverse restores the seasonal profile") {
    std::vector<double> values;
    for (int t = 0; t < 12; ++t) values.push_back(t % 3 == 0 ? 5.0 : 1.0);
    auto ds = make_panel({values});
    TransformSpec spec;
    spec.kind = TransformKind::Deseasonalizer;
    spec.period = 3;
    const auto t = FittedTransform::fit_transform(spec, ds);
    for (const auto &row : ds.series[0].targets) {
        CHECK(std::abs(row[0] - ds.series[0].targets[0][0]) < 1e-9);  // constant residual
    }
    std::vector<std::vector<double>> fc{{ds.series[0].targets[0][0]},
                                        {ds.series[0].targets[0][0]},
                                        {ds.series[0].targets[0][0]}};
    t.inverse_forecasts(0, fc);
    CHECK(fc[0][0] == doctest::Approx(5.0).epsilon(1e-9));  // step 12 has phase 0
    CHECK(fc[1][0] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(fc[2][0] == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("ordinal encoder: unseen category maps to the reserved code") {
    PanelDataset ds = make_panel({{1, 2, 3}});
    ds.schema.names = {"shop"};
    ds.schema.categorical = {true};
    ds.schema.future_known = {true};
    FeatureColumn col;
    col.cat = {"a", "b", "a"};
    ds.series[0].past = {col};
    FeatureColumn fut;
    fut.cat = {"zzz"};
    ds.series[0].future = {fut};
    TransformSpec spec;
    spec.kind = TransformKind::OrdinalEncoder;
    FittedTransform::fit_transform(spec, ds);
    CHECK(ds.series[0].past[0].num == std::vector<double>{0, 1, 0});
    CHECK(ds.series[0].future[0].num == std::vector<double>{2});  // unseen -> K
}

TEST_CASE("window_reduce: direct construction") {
    const auto s = make_series("a", {1, 2, 3, 4});
    const auto d = window_reduce(s, 2);
    REQUIRE(d.X.size() == 2);
    CHECK(d.X[0] == std::vector<double>{1, 2});
    CHECK(d.Y[0] == std::vector<double>{3});
    CHECK(d.X[1] == std::vector<double>{2, 3});
    CHECK(d.Y[1] == std::vector<double>{4});
}

TEST_CASE("window_reduce: boundary windows") {
    const auto s = make_series("a", {1, 2, 3, 4});
    CHECK(window_reduce(s, 3).X.size() == 1);  // w = T-1
    CHECK_THROWS_AS(window_reduce(s, 4), InsufficientLengthError);
    CHECK_THROWS_AS(window_reduce(s, 9), InsufficientLengthError);
}

TEST_CASE("window_reduce: row count is T - w") {
    Rng rng(41);
    for (int rep = 0; rep < 40; ++rep) {
        const std::size_t T = 3 + rng() % 60;
        const int w = 1 + static_cast<int>(rng() % (T - 1));
        const auto s = make_series("a", random_walk(rng, T));
        CHECK(window_reduce(s, w).X.size() == T - static_cast<std::size_t>(w));
    }
}

TEST_CASE("transforms never read validation data") {
    // fitting consumes only the train split; poisoning the validation part of
    // the parent dataset must not change fitted output
    Rng rng(43);
    const auto values = random_walk(rng, 30);
    auto ds = make_panel({values});
    auto split = temporal_holdout(ds, 5);

    auto poisoned = ds;
    for (std::size_t t = 25; t < 30; ++t) poisoned.series[0].targets[t][0] = 1e12;
    auto poisoned_split = temporal_holdout(poisoned, 5);

    for (const auto &spec : {TransformSpec{TransformKind::Scaler, "standard"},
                             TransformSpec{TransformKind::Detrender, "", 1}}) {
        auto a = split.train;
        auto b = poisoned_split.train;
        FittedTransform::fit_transform(spec, a);
        FittedTransform::fit_transform(spec, b);
        CHECK(a.series[0].targets == b.series[0].targets);
    }
}
