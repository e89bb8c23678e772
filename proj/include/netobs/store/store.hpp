#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "netobs/zone/engine.hpp"

namespace netobs::store {

using zone::MetricPoint;

class OutOfOrder : public std::runtime_error {
public:
    OutOfOrder(const std::string& series, std::int64_t ts)
        : std::runtime_error("out-of-order timestamp " + std::to_string(ts) +
                             " for series " + series) {}
};

struct Series {
    std::string metric;
    std::map<std::string, std::string> tags;
    std::vector<std::pair<std::int64_t, double>> points;  // strictly increasing ts
};

enum class Agg { Raw, Avg, Min, Max, Sum };

struct RangeResult {
    std::vector<Series> series;          // Raw: selected slices per series
    std::optional<double> scalar;        // aggregate over the selection
    bool unknown_metric = false;
    std::size_t point_count = 0;
};

/// Append-only time-series store with a JSON-lines snapshot format, one
/// record per point: {"m": name, "t": epoch_ms, "v": value, "tags": {...}}.
/// Single writer, many readers; writes serialized internally.
class MetricStore {
public:
    void put(const MetricPoint& point);

    /// Points with t0 <= ts < t1 for the metric, filtered by tag subset.
    RangeResult query_range(const std::string& metric,
                            const std::map<std::string, std::string>& tag_filter,
                            std::int64_t t0, std::int64_t t1, Agg agg = Agg::Raw) const;

    std::size_t total_points() const;
    std::size_t series_count() const;

    void snapshot(const std::string& path) const;
    static MetricStore load(const std::string& path);

    /// Point <-> JSON-line codecs; also the broker payload format.
    static std::string encode_point(const MetricPoint& point);
    static MetricPoint decode_point(const std::string& line);

private:
    // behind a pointer so snapshots can be returned by value
    mutable std::unique_ptr<std::mutex> mu_ = std::make_unique<std::mutex>();
    std::map<std::pair<std::string, std::string>, Series> series_;  // (metric, tag key)

    static std::string tag_key(const std::map<std::string, std::string>& tags);
};

} // namespace netobs::store
