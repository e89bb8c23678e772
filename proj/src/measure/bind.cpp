#include "netobs/measure/bind.hpp"

namespace netobs::measure {

BindingReport bind(const MeasureSpec& spec,
                   const std::unordered_set<std::string>& entity_ids) {
    BindingReport report;
    for (const auto& m : spec.measurements) {
        for (const auto& a : m.args) {
            if (!a.key.empty() || a.value.kind != Value::Kind::Ident) continue;
            if (entity_ids.count(a.value.text))
                report.resolved.push_back(a.value.text);
            else
                report.unresolved.push_back(a.value.text);
        }
    }
    return report;
}

} // namespace netobs::measure
