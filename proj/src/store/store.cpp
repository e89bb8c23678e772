#include "netobs/store/store.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

namespace netobs::store {

using nlohmann::json;

std::string MetricStore::tag_key(const std::map<std::string, std::string>& tags) {
    std::string key;
    for (const auto& [k, v] : tags) {
        key += k;
        key.push_back('\x1f');
        key += v;
        key.push_back('\x1e');
    }
    return key;
}

void MetricStore::put(const MetricPoint& point) {
    if (!std::isfinite(point.value))
        throw std::invalid_argument("metric value must be finite");
    std::lock_guard lock(*mu_);
    auto key = std::make_pair(point.metric_var, tag_key(point.tags));
    auto& s = series_[key];
    if (s.points.empty()) {
        s.metric = point.metric_var;
        s.tags = point.tags;
    } else if (point.timestamp_ms <= s.points.back().first) {
        throw OutOfOrder(point.metric_var, point.timestamp_ms);
    }
    s.points.emplace_back(point.timestamp_ms, point.value);
}

RangeResult MetricStore::query_range(
    const std::string& metric, const std::map<std::string, std::string>& tag_filter,
    std::int64_t t0, std::int64_t t1, Agg agg) const {
    if (t0 > t1) throw std::invalid_argument("query_range: t0 > t1");
    std::lock_guard lock(*mu_);

    RangeResult result;
    bool metric_seen = false;
    double sum = 0, mn = 0, mx = 0;
    bool first = true;

    for (const auto& [key, s] : series_) {
        if (key.first != metric) continue;
        metric_seen = true;
        bool tags_ok = true;
        for (const auto& [k, v] : tag_filter) {
            auto it = s.tags.find(k);
            if (it == s.tags.end() || it->second != v) {
                tags_ok = false;
                break;
            }
        }
        if (!tags_ok) continue;

        Series slice;
        slice.metric = s.metric;
        slice.tags = s.tags;
        auto lo = std::lower_bound(s.points.begin(), s.points.end(),
                                   std::make_pair(t0, -1e308));
        for (auto it = lo; it != s.points.end() && it->first < t1; ++it) {
            slice.points.push_back(*it);
            double v = it->second;
            sum += v;
            mn = first ? v : std::min(mn, v);
            mx = first ? v : std::max(mx, v);
            first = false;
            ++result.point_count;
        }
        if (!slice.points.empty() || agg == Agg::Raw)
            result.series.push_back(std::move(slice));
    }

    result.unknown_metric = !metric_seen;
    if (result.point_count > 0) {
        switch (agg) {
            case Agg::Raw: break;
            case Agg::Avg: result.scalar = sum / (double)result.point_count; break;
            case Agg::Min: result.scalar = mn; break;
            case Agg::Max: result.scalar = mx; break;
            case Agg::Sum: result.scalar = sum; break;
        }
    }
    return result;
}

std::size_t MetricStore::total_points() const {
    std::lock_guard lock(*mu_);
    std::size_t n = 0;
    for (const auto& [key, s] : series_) {
        (void)key;
        n += s.points.size();
    }
    return n;
}

std::size_t MetricStore::series_count() const {
    std::lock_guard lock(*mu_);
    return series_.size();
}

std::string MetricStore::encode_point(const MetricPoint& point) {
    json j;
    j["m"] = point.metric_var;
    j["t"] = point.timestamp_ms;
    j["v"] = point.value;
    j["tags"] = json::object();
    for (const auto& [k, v] : point.tags) j["tags"][k] = v;
    return j.dump();
}

MetricPoint MetricStore::decode_point(const std::string& line) {
    json j = json::parse(line);
    MetricPoint p;
    p.metric_var = j.at("m").get<std::string>();
    p.timestamp_ms = j.at("t").get<std::int64_t>();
    p.value = j.at("v").get<double>();
    if (j.contains("tags"))
        for (auto it = j["tags"].begin(); it != j["tags"].end(); ++it)
            p.tags[it.key()] = it.value().get<std::string>();
    return p;
}

void MetricStore::snapshot(const std::string& path) const {
    std::lock_guard lock(*mu_);
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open snapshot file " + path);
    for (const auto& [key, s] : series_) {
        (void)key;
        MetricPoint p;
        p.metric_var = s.metric;
        p.tags = s.tags;
        for (const auto& [ts, v] : s.points) {
            p.timestamp_ms = ts;
            p.value = v;
            out << encode_point(p) << '\n';
        }
    }
}

MetricStore MetricStore::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open snapshot file " + path);
    MetricStore store;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        store.put(decode_point(line));
    }
    return store;
}

} // namespace netobs::store
