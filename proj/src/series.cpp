#include "chronoml/series.hpp"

#include <algorithm>
#include <charconv>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include <json.hpp>

namespace chronoml {
namespace {

std::vector<std::string> split_csv_line(const std::string &line) {
    std::vector<std::string> cells;
    std::string cell;
    for (char c : line) {
        if (c == ',') {
            cells.push_back(cell);
            cell.clear();
        } else if (c != '\r') {
            cell.push_back(c);
        }
    }
    cells.push_back(cell);
    return cells;
}

bool parse_double(const std::string &s, double &out) {
    const char *begin = s.data();
    const char *end = begin + s.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc() && ptr == end;
}

// Timestamps are either plain integer indices or ISO-8601 dates/datetimes.
// We reduce both to a comparable pair (seconds-like value, month index) so the
// equal-spacing check can accept second-regular and calendar-month-regular
// grids.
struct Timestamp {
    long long linear = 0;   // integer index or epoch-like seconds
    long long month = -1;   // year*12+month when date-based, else -1
    int day = 1;
    long long tod = 0;      // seconds within day
    std::string raw;
};

std::optional<Timestamp> parse_timestamp(const std::string &s) {
    Timestamp ts;
    ts.raw = s;
    long long idx = 0;
    const char *begin = s.data();
    const char *end = begin + s.size();
    auto [ptr, ec] = std::from_chars(begin, end, idx);
    if (ec == std::errc() && ptr == end) {
        ts.linear = idx;
        return ts;
    }
    int year = 0, month = 0, day = 0, hh = 0, mm = 0;
    double sec = 0.0;
    int consumed = 0;
    if (std::sscanf(s.c_str(), "%d-%d-%d%n", &year, &month, &day, &consumed) == 3) {
        if (month < 1 || month > 12 || day < 1 || day > 31) return std::nullopt;
        std::string rest = s.substr(static_cast<std::size_t>(consumed));
        if (!rest.empty()) {
            if (rest[0] != 'T' && rest[0] != ' ') return std::nullopt;
            if (std::sscanf(rest.c_str() + 1, "%d:%d:%lf", &hh, &mm, &sec) < 2) return std::nullopt;
        }
        // Days-since-epoch via the civil-day algorithm.
        const int y = year - (month <= 2 ? 1 : 0);
        const int era = (y >= 0 ? y : y - 399) / 400;
        const unsigned yoe = static_cast<unsigned>(y - era * 400);
        const unsigned doy = static_cast<unsigned>((153 * (month + (month > 2 ? -3 : 9)) + 2) / 5 + day - 1);
        const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
        const long long days = static_cast<long long>(era) * 146097 + static_cast<long long>(doe) - 719468;
        ts.tod = hh * 3600LL + mm * 60LL + static_cast<long long>(sec);
        ts.linear = days * 86400 + ts.tod;
        ts.month = static_cast<long long>(year) * 12 + (month - 1);
        ts.day = day;
        return ts;
    }
    return std::nullopt;
}

// Equally spaced: identical linear deltas, or identical month deltas with the
// same day-of-month and time-of-day (monthly/quarterly/yearly grids).
void check_regular(const std::vector<Timestamp> &stamps, const std::string &series_id) {
    if (stamps.size() < 2) return;
    for (std::size_t i = 1; i < stamps.size(); ++i) {
        if (stamps[i].linear <= stamps[i - 1].linear) {
            throw OrderingError("non-monotone timestamp '" + stamps[i].raw + "' in series '" +
                                series_id + "'");
        }
    }
    if (stamps.size() < 3) return;
    const long long lin_delta = stamps[1].linear - stamps[0].linear;
    bool linear_ok = true;
    for (std::size_t i = 2; i < stamps.size() && linear_ok; ++i) {
        linear_ok = (stamps[i].linear - stamps[i - 1].linear) == lin_delta;
    }
    if (linear_ok) return;
    if (stamps[0].month >= 0) {
        const long long month_delta = stamps[1].month - stamps[0].month;
        bool month_ok = month_delta > 0;
        for (std::size_t i = 1; i < stamps.size() && month_ok; ++i) {
            month_ok = stamps[i].month - stamps[i - 1].month == month_delta &&
                       stamps[i].day == stamps[0].day && stamps[i].tod == stamps[0].tod;
        }
        if (month_ok) return;
    }
    throw OrderingError("irregularly spaced timestamps in series '" + series_id + "'");
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

void PanelDataset::validate() const {
    if (series.empty()) throw SchemaError("dataset '" + name + "' has no series");
    if (horizon < 1) throw SchemaError("horizon must be >= 1");
    if (seasonal_period < 1) throw SchemaError("seasonal_period must be >= 1");
    const std::size_t d = series.front().target_dim();
    for (const auto &s : series) {
        if (s.length() < 1) throw SchemaError("series '" + s.id + "' is empty");
        if (s.target_dim() != d) throw SchemaError("series '" + s.id + "' target dimension mismatch");
        for (const auto &row : s.targets) {
            if (row.size() != d) throw SchemaError("ragged targets in series '" + s.id + "'");
        }
        if (!s.past.empty() && s.past.size() != schema.size()) {
            throw SchemaError("feature column count mismatch in series '" + s.id + "'");
        }
    }
}

PanelDataset load_dataset(const std::string &csv_path, const std::string &meta_path) {
    std::ifstream meta_in(meta_path);
    if (!meta_in) throw ParseError("cannot open metadata file: " + meta_path);
    nlohmann::json meta;
    try {
        meta_in >> meta;
    } catch (const std::exception &e) {
        throw ParseError("malformed metadata JSON (" + meta_path + "): " + e.what());
    }
    if (!meta.contains("horizon") || !meta.contains("seasonal_period")) {
        throw SchemaError("metadata must declare horizon and seasonal_period");
    }

    PanelDataset ds;
    ds.horizon = meta.at("horizon").get<int>();
    ds.seasonal_period = meta.at("seasonal_period").get<int>();
    std::vector<std::string> future_names =
        meta.value("future_known_features", std::vector<std::string>{});
    std::vector<std::string> cat_names =
        meta.value("categorical_features", std::vector<std::string>{});
    if (ds.horizon < 1) throw SchemaError("horizon must be >= 1");
    if (ds.seasonal_period < 1) throw SchemaError("seasonal_period must be >= 1");

    std::ifstream in(csv_path);
    if (!in) throw ParseError("cannot open dataset file: " + csv_path);
    {
        auto slash = csv_path.find_last_of('/');
        std::string stem = slash == std::string::npos ? csv_path : csv_path.substr(slash + 1);
        auto dot = stem.find_last_of('.');
        ds.name = dot == std::string::npos ? stem : stem.substr(0, dot);
    }

    std::string line;
    if (!std::getline(in, line)) throw ParseError("empty dataset file: " + csv_path);
    const auto header = split_csv_line(line);
    if (header.size() < 3 || header[0] != "series_id" || header[1] != "timestamp") {
        throw SchemaError("header must start with series_id,timestamp,target");
    }
    std::vector<std::size_t> target_cols;
    std::vector<std::size_t> feature_cols;
    for (std::size_t c = 2; c < header.size(); ++c) {
        if (header[c].rfind("target", 0) == 0) {
            target_cols.push_back(c);
        } else {
            feature_cols.push_back(c);
        }
    }
    if (target_cols.empty()) throw SchemaError("no target column found");

    for (const auto &fn : future_names) {
        bool known = false;
        for (auto c : feature_cols) known = known || header[c] == fn;
        if (!known) throw SchemaError("future_known_features names unknown column '" + fn + "'");
    }
    for (const auto &cn : cat_names) {
        bool known = false;
        for (auto c : feature_cols) known = known || header[c] == cn;
        if (!known) throw SchemaError("categorical_features names unknown column '" + cn + "'");
    }

    for (auto c : feature_cols) {
        const std::string &fname = header[c];
        ds.schema.names.push_back(fname);
        ds.schema.categorical.push_back(std::find(cat_names.begin(), cat_names.end(), fname) !=
                                        cat_names.end());
        ds.schema.future_known.push_back(std::find(future_names.begin(), future_names.end(),
                                                   fname) != future_names.end());
    }

    struct RawSeries {
        std::vector<Timestamp> stamps;
        std::vector<std::vector<double>> targets;  // NaN row == all targets empty
        std::vector<std::vector<std::string>> feats;
        std::vector<bool> target_empty;
    };
    std::vector<std::string> order;
    std::map<std::string, RawSeries> raw;

    std::size_t row_no = 1;
    while (std::getline(in, line)) {
        ++row_no;
        if (line.empty()) continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != header.size()) {
            throw ParseError("row " + std::to_string(row_no) + ": expected " +
                             std::to_string(header.size()) + " cells, got " +
                             std::to_string(cells.size()));
        }
        const std::string &sid = cells[0];
        auto it = raw.find(sid);
        if (it == raw.end()) {
            order.push_back(sid);
            it = raw.emplace(sid, RawSeries{}).first;
        }
        auto ts = parse_timestamp(cells[1]);
        if (!ts) throw ParseError("row " + std::to_string(row_no) + ": bad timestamp '" + cells[1] + "'");
        it->second.stamps.push_back(*ts);

        std::vector<double> tr;
        bool all_empty = true;
        for (auto c : target_cols) {
            if (cells[c].empty()) {
                tr.push_back(missing_value());
            } else {
                double v;
                if (!parse_double(cells[c], v)) {
                    throw ParseError("row " + std::to_string(row_no) + ": bad target value '" +
                                     cells[c] + "'");
                }
                tr.push_back(v);
                all_empty = false;
            }
        }
        it->second.targets.push_back(std::move(tr));
        it->second.target_empty.push_back(all_empty);

        std::vector<std::string> fr;
        for (auto c : feature_cols) fr.push_back(cells[c]);
        it->second.feats.push_back(std::move(fr));
    }
    if (order.empty()) throw ParseError("dataset has no data rows: " + csv_path);

    const bool has_future = !future_names.empty();
    for (const auto &sid : order) {
        RawSeries &rs = raw[sid];
        check_regular(rs.stamps, sid);
        std::size_t T = rs.stamps.size();
        std::size_t future_rows = 0;
        if (has_future) {
            // With future-known features each series carries exactly H trailing
            // rows holding only those feature values (empty target cells).
            if (T <= static_cast<std::size_t>(ds.horizon)) {
                throw SchemaError("series '" + sid + "' lacks the " + std::to_string(ds.horizon) +
                                  " trailing future-feature rows");
            }
            for (std::size_t t = T - static_cast<std::size_t>(ds.horizon); t < T; ++t) {
                if (!rs.target_empty[t]) {
                    throw SchemaError("series '" + sid +
                                      "': trailing future-feature rows must have empty targets");
                }
            }
            future_rows = static_cast<std::size_t>(ds.horizon);
            T -= future_rows;
        }

        TimeSeriesRecord rec;
        rec.id = sid;
        rec.targets.assign(rs.targets.begin(), rs.targets.begin() + static_cast<long>(T));
        rec.past.resize(feature_cols.size());
        rec.future.resize(feature_cols.size());
        for (std::size_t f = 0; f < feature_cols.size(); ++f) {
            const bool is_cat = ds.schema.categorical[f];
            for (std::size_t t = 0; t < T; ++t) {
                const std::string &cell = rs.feats[t][f];
                if (is_cat) {
                    rec.past[f].cat.push_back(cell);
                } else if (cell.empty()) {
                    rec.past[f].num.push_back(missing_value());
                } else {
                    double v;
                    if (!parse_double(cell, v)) {
                        throw ParseError("series '" + sid + "': bad numeric feature '" + cell + "'");
                    }
                    rec.past[f].num.push_back(v);
                }
            }
            if (ds.schema.future_known[f]) {
                for (std::size_t t = T; t < T + future_rows; ++t) {
                    const std::string &cell = rs.feats[t][f];
                    if (is_cat) {
                        rec.future[f].cat.push_back(cell);
                    } else if (cell.empty()) {
                        rec.future[f].num.push_back(missing_value());
                    } else {
                        double v;
                        if (!parse_double(cell, v)) {
                            throw ParseError("series '" + sid + "': bad numeric feature '" + cell +
                                             "'");
                        }
                        rec.future[f].num.push_back(v);
                    }
                }
            }
        }
        ds.series.push_back(std::move(rec));
    }
    ds.validate();
    return ds;
}

void save_dataset(const PanelDataset &dataset, const std::string &csv_path,
                  const std::string &meta_path) {
    std::ofstream out(csv_path);
    if (!out) throw ParseError("cannot write dataset file: " + csv_path);
    const std::size_t d = dataset.series.front().target_dim();
    out << "series_id,timestamp";
    if (d == 1) {
        out << ",target";
    } else {
        for (std::size_t k = 0; k < d; ++k) out << ",target_" << k;
    }
    for (const auto &n : dataset.schema.names) out << "," << n;
    out << "\n";

    bool has_future = false;
    for (bool f : dataset.schema.future_known) has_future = has_future || f;

    for (const auto &s : dataset.series) {
        for (std::size_t t = 0; t < s.length(); ++t) {
            out << s.id << "," << t;
            for (std::size_t k = 0; k < d; ++k) {
                out << ",";
                if (!is_missing(s.targets[t][k])) out << format_double(s.targets[t][k]);
            }
            for (std::size_t f = 0; f < dataset.schema.size(); ++f) {
                out << ",";
                if (dataset.schema.categorical[f]) {
                    out << s.past[f].cat[t];
                } else if (!is_missing(s.past[f].num[t])) {
                    out << format_double(s.past[f].num[t]);
                }
            }
            out << "\n";
        }
        if (has_future) {
            for (int h = 0; h < dataset.horizon; ++h) {
                out << s.id << "," << (s.length() + static_cast<std::size_t>(h));
                for (std::size_t k = 0; k < d; ++k) out << ",";
                for (std::size_t f = 0; f < dataset.schema.size(); ++f) {
                    out << ",";
                    if (!dataset.schema.future_known[f]) continue;
                    if (dataset.schema.categorical[f]) {
                        out << s.future[f].cat[static_cast<std::size_t>(h)];
                    } else if (!is_missing(s.future[f].num[static_cast<std::size_t>(h)])) {
                        out << format_double(s.future[f].num[static_cast<std::size_t>(h)]);
                    }
                }
                out << "\n";
            }
        }
    }

    nlohmann::json meta;
    meta["horizon"] = dataset.horizon;
    meta["seasonal_period"] = dataset.seasonal_period;
    auto future = nlohmann::json::array();
    auto cats = nlohmann::json::array();
    for (std::size_t f = 0; f < dataset.schema.size(); ++f) {
        if (dataset.schema.future_known[f]) future.push_back(dataset.schema.names[f]);
        if (dataset.schema.categorical[f]) cats.push_back(dataset.schema.names[f]);
    }
    meta["future_known_features"] = future;
    meta["categorical_features"] = cats;
    std::ofstream mout(meta_path);
    if (!mout) throw ParseError("cannot write metadata file: " + meta_path);
    mout << meta.dump(2) << "\n";
}

TemporalSplit temporal_holdout(const PanelDataset &dataset, int horizon) {
    if (horizon < 1) throw InsufficientLengthError("holdout horizon must be >= 1");
    for (const auto &s : dataset.series) {
        if (s.length() <= static_cast<std::size_t>(horizon)) {
            throw InsufficientLengthError("series '" + s.id + "' has length " +
                                          std::to_string(s.length()) +
                                          " <= holdout horizon " + std::to_string(horizon));
        }
    }

    TemporalSplit split;
    split.horizon = horizon;
    split.train = dataset;
    split.validation = dataset;
    const std::size_t h = static_cast<std::size_t>(horizon);
    for (std::size_t i = 0; i < dataset.series.size(); ++i) {
        const TimeSeriesRecord &src = dataset.series[i];
        TimeSeriesRecord &tr = split.train.series[i];
        TimeSeriesRecord &va = split.validation.series[i];
        const std::size_t cut = src.length() - h;

        tr.targets.assign(src.targets.begin(), src.targets.begin() + static_cast<long>(cut));
        va.targets.assign(src.targets.begin() + static_cast<long>(cut), src.targets.end());
        for (std::size_t f = 0; f < src.past.size(); ++f) {
            const FeatureColumn &col = src.past[f];
            FeatureColumn tcol, vcol, fcol;
            if (!col.num.empty()) {
                tcol.num.assign(col.num.begin(), col.num.begin() + static_cast<long>(cut));
                vcol.num.assign(col.num.begin() + static_cast<long>(cut), col.num.end());
            } else if (!col.cat.empty()) {
                tcol.cat.assign(col.cat.begin(), col.cat.begin() + static_cast<long>(cut));
                vcol.cat.assign(col.cat.begin() + static_cast<long>(cut), col.cat.end());
            }
            // The held-out window is the train part's future: future-known
            // columns are served from the observed rows being held out.
            if (f < dataset.schema.size() && dataset.schema.future_known[f]) {
                fcol = vcol;
            }
            tr.past[f] = std::move(tcol);
            va.past[f] = std::move(vcol);
            tr.future[f] = std::move(fcol);
        }
    }
    return split;
}

std::vector<std::vector<double>> tail(const TimeSeriesRecord &series, int h) {
    const std::size_t T = series.length();
    const std::size_t n = std::min<std::size_t>(T, h < 0 ? 0u : static_cast<std::size_t>(h));
    return {series.targets.end() - static_cast<long>(n), series.targets.end()};
}

std::vector<double> normalized_tail(const TimeSeriesRecord &series, int h) {
    auto rows = tail(series, h);
    std::vector<double> v;
    v.reserve(rows.size());
    for (const auto &r : rows) v.push_back(r.empty() ? 0.0 : r.front());
    double mean = 0.0;
    std::size_t n = 0;
    for (double x : v) {
        if (!is_missing(x)) {
            mean += x;
            ++n;
        }
    }
    if (n == 0) return std::vector<double>(v.size(), 0.0);
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double x : v) {
        if (!is_missing(x)) var += (x - mean) * (x - mean);
    }
    var /= static_cast<double>(n);
    const double sd = std::sqrt(var);
    for (double &x : v) {
        if (is_missing(x)) {
            x = 0.0;
        } else {
            x = sd > 0.0 ? (x - mean) / sd : 0.0;
        }
    }
    return v;
}

}  // namespace chronoml
