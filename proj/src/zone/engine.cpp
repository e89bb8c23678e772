#include "netobs/zone/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace netobs::zone {

using measure::AggFunc;
using measure::BoolExpr;
using measure::Cmp;
using measure::TriggerKind;

ZoneEngine::ZoneEngine(measure::MeasureSpec spec) : spec_(std::move(spec)) {
    for (const auto& m : spec_.measurements) horizon_s_[m.var] = 0.0;
    for (const measure::AggTerm* t : spec_.all_terms()) {
        auto it = horizon_s_.find(t->var);
        if (it == horizon_s_.end()) continue;
        if (t->window_s) it->second = std::max(it->second, *t->window_s);
    }
}

void ZoneEngine::ingest(const MetricPoint& point) {
    auto it = horizon_s_.find(point.metric_var);
    if (it == horizon_s_.end()) {
        ++dropped_;
        return;
    }
    if (!std::isfinite(point.value)) {
        ++dropped_;
        return;
    }
    auto& win = windows_[point.metric_var];
    win.emplace_back(point.timestamp_ms, point.value);
    last_sample_ms_[point.metric_var] = point.timestamp_ms;
    prune(point.metric_var, point.timestamp_ms);
}

void ZoneEngine::prune(const std::string& var, std::int64_t newest_ms) {
    auto hit = horizon_s_.find(var);
    if (hit == horizon_s_.end()) return;
    auto wit = windows_.find(var);
    if (wit == windows_.end()) return;
    auto horizon_ms = (std::int64_t)std::llround(hit->second * 1000.0);
    auto& win = wit->second;
    // Last has no window, so the newest sample always survives.
    while (win.size() > 1 && win.front().first <= newest_ms - horizon_ms)
        win.pop_front();
}

namespace {

bool compare(double lhs, Cmp cmp, double rhs) {
    switch (cmp) {
        case Cmp::Lt: return lhs < rhs;
        case Cmp::Gt: return lhs > rhs;
        case Cmp::Le: return lhs <= rhs;
        case Cmp::Ge: return lhs >= rhs;
        case Cmp::Eq: return lhs == rhs;
        case Cmp::Ne: return lhs != rhs;
    }
    return false;
}

} // namespace

bool ZoneEngine::eval_term(const measure::AggTerm& term, std::int64_t now_ms) const {
    if (term.is_age) {
        auto it = last_sample_ms_.find(term.var);
        double age_s = it == last_sample_ms_.end()
                           ? std::numeric_limits<double>::infinity()
                           : (now_ms - it->second) / 1000.0;
        return compare(age_s, term.cmp, term.threshold);
    }

    auto wit = windows_.find(term.var);
    if (wit == windows_.end() || wit->second.empty()) return false;

    std::int64_t from_ms = now_ms;
    if (term.window_s)
        from_ms = now_ms - (std::int64_t)std::llround(*term.window_s * 1000.0);

    if (term.func == AggFunc::Last) {
        return compare(wit->second.back().second, term.cmp, term.threshold);
    }

    double sum = 0, mn = std::numeric_limits<double>::infinity();
    double mx = -std::numeric_limits<double>::infinity();
    std::size_t n = 0;
    for (const auto& [ts, v] : wit->second) {
        if (ts <= from_ms || ts > now_ms) continue;
        sum += v;
        mn = std::min(mn, v);
        mx = std::max(mx, v);
        ++n;
    }
    if (n == 0) return false;  // empty window: comparison is false
    double agg = 0;
    switch (term.func) {
        case AggFunc::Avg: agg = sum / (double)n; break;
        case AggFunc::Min: agg = mn; break;
        case AggFunc::Max: agg = mx; break;
        case AggFunc::Sum: agg = sum; break;
        case AggFunc::Count: agg = (double)n; break;
        case AggFunc::Last: break;
    }
    return compare(agg, term.cmp, term.threshold);
}

bool ZoneEngine::eval_expr(const BoolExpr& e, std::int64_t now_ms) const {
    switch (e.kind) {
        case BoolExpr::Kind::Term:
            return eval_term(e.term, now_ms);
        case BoolExpr::Kind::Not:
            return !eval_expr(*e.children[0], now_ms);
        case BoolExpr::Kind::And:
            for (const auto& c : e.children)
                if (!eval_expr(*c, now_ms)) return false;
            return true;
        case BoolExpr::Kind::Or:
            for (const auto& c : e.children)
                if (eval_expr(*c, now_ms)) return true;
            return false;
    }
    return false;
}

std::vector<ReactionEvent> ZoneEngine::evaluate(std::int64_t now_ms) {
    for (auto& [var, win] : windows_) {
        (void)win;
        prune(var, now_ms);
    }

    std::set<std::string> next;
    for (const auto& z : spec_.zones)
        if (eval_expr(*z.predicate, now_ms)) next.insert(z.name);

    std::vector<ReactionEvent> events;
    auto entered = [&](const std::string& z) {
        return next.count(z) && !active_.count(z);
    };
    auto left = [&](const std::string& z) {
        return !next.count(z) && active_.count(z);
    };

    for (const auto& r : spec_.reactions) {
        bool fire = false;
        switch (r.trigger) {
            case TriggerKind::Transition:
                fire = left(r.from_zone) && entered(r.to_zone);
                break;
            case TriggerKind::Enter:
                fire = entered(r.to_zone);
                break;
            case TriggerKind::Leave:
                fire = left(r.from_zone);
                break;
            case TriggerKind::While:
                fire = next.count(r.to_zone) > 0;
                break;
        }
        if (!fire) continue;
        ReactionEvent ev;
        ev.trigger = r.trigger;
        ev.from_zone = r.from_zone;
        ev.to_zone = r.to_zone;
        ev.action = r.action;
        ev.args = r.args;
        ev.timestamp_ms = now_ms;
        ev.known_action = (r.action == "Publish" || r.action == "Log");
        events.push_back(std::move(ev));
    }

    active_ = std::move(next);
    return events;
}

const std::deque<std::pair<std::int64_t, double>>& ZoneEngine::window(
    const std::string& var) const {
    static const std::deque<std::pair<std::int64_t, double>> empty;
    auto it = windows_.find(var);
    return it == windows_.end() ? empty : it->second;
}

const char* to_string(OverloadClass c) {
    switch (c) {
        case OverloadClass::Normal: return "Normal";
        case OverloadClass::ScaleOut: return "ScaleOut";
        case OverloadClass::Troubleshoot: return "Troubleshoot";
    }
    return "?";
}

OverloadClass classify_overload(const std::vector<double>& per_port_risk,
                                double total_threshold, double imbalance_ratio) {
    if (per_port_risk.empty())
        throw std::invalid_argument("classify_overload: empty risk list");
    double sum = 0, mn = per_port_risk[0], mx = per_port_risk[0];
    for (double r : per_port_risk) {
        sum += r;
        mn = std::min(mn, r);
        mx = std::max(mx, r);
    }
    double mean = sum / (double)per_port_risk.size();
    if (mean < total_threshold) return OverloadClass::Normal;
    double ratio = mx / std::max(mn, 1e-9);
    return ratio <= imbalance_ratio ? OverloadClass::ScaleOut
                                    : OverloadClass::Troubleshoot;
}

} // namespace netobs::zone
