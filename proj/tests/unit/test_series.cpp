#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <fstream>

#include "chronoml/series.hpp"
#include "helpers.hpp"

using namespace chronoml;
using namespace chronoml::testing;

namespace {

struct TempFiles {
    std::string csv = "/tmp/chronoml_test.csv";
    std::string meta = "/tmp/chronoml_test.json";

    void write(const std::string &csv_body, const std::string &meta_body) {
        std::ofstream(csv) << csv_body;
        std::ofstream(meta) << meta_body;
    }
    ~TempFiles() {
        std::remove(csv.c_str());
        std::remove(meta.c_str());
    }
};

const char *kMetaH1 = R"({"horizon":1,"seasonal_period":1})";

}  // namespace

TEST_CASE("load_dataset: single series echo") {
    TempFiles f;
    f.write("series_id,timestamp,target\na,0,1\na,1,2\na,2,3\n", kMetaH1);
    const auto ds = load_dataset(f.csv, f.meta);
    CHECK(ds.size() == 1);
    CHECK(ds.series[0].length() == 3);
    CHECK(ds.series[0].targets[0][0] == 1.0);
    CHECK(ds.series[0].targets[2][0] == 3.0);
    CHECK(ds.horizon == 1);
}

TEST_CASE("load_dataset: two series") {
    TempFiles f;
    std::string body = "series_id,timestamp,target\n";
    for (int t = 0; t < 4; ++t) body += "a," + std::to_string(t) + ",1\n";
    for (int t = 0; t < 4; ++t) body += "b," + std::to_string(t) + ",2\n";
    f.write(body, kMetaH1);
    const auto ds = load_dataset(f.csv, f.meta);
    CHECK(ds.size() == 2);
    CHECK(ds.series[0].id == "a");
    CHECK(ds.series[1].id == "b");
}

TEST_CASE("load_dataset: blank target becomes missing marker") {
    TempFiles f;
    f.write("series_id,timestamp,target\na,0,1\na,1,\na,2,3\n", kMetaH1);
    const auto ds = load_dataset(f.csv, f.meta);
    REQUIRE(ds.series[0].length() == 3);
    CHECK(ds.series[0].targets[0][0] == 1.0);
    CHECK(is_missing(ds.series[0].targets[1][0]));
    CHECK(ds.series[0].targets[2][0] == 3.0);
}

TEST_CASE("load_dataset: malformed row reports the row number") {
    TempFiles f;
    f.write("series_id,timestamp,target\na,0,1\na,1\n", kMetaH1);
    try {
        load_dataset(f.csv, f.meta);
        FAIL("expected ParseError");
    } catch (const ParseError &e) {
        CHECK(std::string(e.what()).find("row 3") != std::string::npos);
    }
}

TEST_CASE("load_dataset: metadata schema mismatch") {
    TempFiles f;
    f.write("series_id,timestamp,target\na,0,1\n",
            R"({"horizon":1,"seasonal_period":1,"future_known_features":["promo"]})");
    CHECK_THROWS_AS(load_dataset(f.csv, f.meta), SchemaError);
}

TEST_CASE("load_dataset: non-monotone timestamps") {
    TempFiles f;
    f.write("series_id,timestamp,target\na,0,1\na,2,2\na,1,3\n", kMetaH1);
    CHECK_THROWS_AS(load_dataset(f.csv, f.meta), OrderingError);
}

TEST_CASE("load_dataset: irregular spacing rejected, calendar months accepted") {
    TempFiles f;
    f.write("series_id,timestamp,target\na,0,1\na,1,2\na,5,3\n", kMetaH1);
    CHECK_THROWS_AS(load_dataset(f.csv, f.meta), OrderingError);

    f.write("series_id,timestamp,target\na,2020-01-01,1\na,2020-02-01,2\na,2020-03-01,3\n",
            kMetaH1);
    CHECK(load_dataset(f.csv, f.meta).series[0].length() == 3);
}

TEST_CASE("load_dataset: future-known features split off trailing rows") {
    TempFiles f;
    f.write(
        "series_id,timestamp,target,promo\n"
        "a,0,1,0\na,1,2,1\na,2,3,0\na,3,,1\na,4,,0\n",
        R"({"horizon":2,"seasonal_period":1,"future_known_features":["promo"],"categorical_features":[]})");
    const auto ds = load_dataset(f.csv, f.meta);
    CHECK(ds.series[0].length() == 3);
    REQUIRE(ds.series[0].future.size() == 1);
    CHECK(ds.series[0].future[0].num == std::vector<double>{1.0, 0.0});
}

TEST_CASE("temporal_holdout: basic split") {
    const auto ds = make_panel({{1, 2, 3, 4, 5}});
    const auto split = temporal_holdout(ds, 2);
    CHECK(dim0(split.train.series[0].targets) == std::vector<double>{1, 2, 3});
    CHECK(dim0(split.validation.series[0].targets) == std::vector<double>{4, 5});
}

TEST_CASE("temporal_holdout: horizon 0 rejected") {
    const auto ds = make_panel({{1, 2, 3}});
    CHECK_THROWS_AS(temporal_holdout(ds, 0), InsufficientLengthError);
}

TEST_CASE("temporal_holdout: short series named in error") {
    Rng rng(7);
    auto ds = make_panel({random_walk(rng, 10), random_walk(rng, 10), random_walk(rng, 4)});
    try {
        temporal_holdout(ds, 5);
        FAIL("expected error");
    } catch (const InsufficientLengthError &e) {
        CHECK(std::string(e.what()).find("s2") != std::string::npos);
    }
}

TEST_CASE("temporal_holdout: re-concatenation reproduces the panel") {
    Rng rng(11);
    for (int rep = 0; rep < 20; ++rep) {
        const std::size_t n = 1 + rng() % 4;
        std::vector<std::vector<double>> series;
        for (std::size_t i = 0; i < n; ++i) series.push_back(random_walk(rng, 5 + rng() % 30));
        const auto ds = make_panel(series);
        std::size_t min_len = series[0].size();
        for (const auto &s : series) min_len = std::min(min_len, s.size());
        const int horizon = 1 + static_cast<int>(rng() % (min_len - 1));
        const auto split = temporal_holdout(ds, horizon);
        for (std::size_t i = 0; i < n; ++i) {
            auto joined = split.train.series[i].targets;
            joined.insert(joined.end(), split.validation.series[i].targets.begin(),
                          split.validation.series[i].targets.end());
            CHECK(joined == ds.series[i].targets);
        }
    }
}

TEST_CASE("tail") {
    const auto s = make_series("a", {1, 2, 3, 4});
    CHECK(dim0(tail(s, 2)) == std::vector<double>{3, 4});
    CHECK(dim0(tail(make_series("a", {1, 2}), 5)) == std::vector<double>{1, 2});
    CHECK(dim0(tail(make_series("a", {1, 2, 3}), 3)) == std::vector<double>{1, 2, 3});
}

TEST_CASE("tail is a suffix of length min(h, T)") {
    Rng rng(3);
    for (int rep = 0; rep < 50; ++rep) {
        const auto values = random_walk(rng, 1 + rng() % 40);
        const auto s = make_series("a", values);
        const int h = 1 + static_cast<int>(rng() % 50);
        const auto t = dim0(tail(s, h));
        CHECK(t.size() == std::min<std::size_t>(values.size(), static_cast<std::size_t>(h)));
        CHECK(std::equal(t.rbegin(), t.rend(), values.rbegin()));
    }
}

TEST_CASE("dataset writer round-trips exactly") {
    Rng rng(23);
    for (int rep = 0; rep < 5; ++rep) {
        PanelDataset ds = make_panel({random_walk(rng, 12), random_walk(rng, 12)}, 3, 4, "rt");
        ds.series[0].targets[5][0] = missing_value();
        TempFiles f;
        save_dataset(ds, f.csv, f.meta);
        const auto loaded = load_dataset(f.csv, f.meta);
        REQUIRE(loaded.series.size() == ds.series.size());
        CHECK(loaded.horizon == ds.horizon);
        CHECK(loaded.seasonal_period == ds.seasonal_period);
        for (std::size_t i = 0; i < ds.series.size(); ++i) {
            REQUIRE(loaded.series[i].length() == ds.series[i].length());
            for (std::size_t t = 0; t < ds.series[i].length(); ++t) {
                const double a = ds.series[i].targets[t][0];
                const double b = loaded.series[i].targets[t][0];
                if (is_missing(a)) {
                    CHECK(is_missing(b));
                } else {
                    CHECK(a == b);  // bit-exact via %.17g
                }
            }
        }
    }
}
