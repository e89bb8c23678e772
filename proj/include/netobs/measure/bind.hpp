#pragma once

#include <string>
#include <unordered_set>
#include <vector>

#include "netobs/measure/ast.hpp"

namespace netobs::measure {

/// Result of resolving positional measurement arguments against the
/// entity ids of a forwarding graph. Unresolved names are report
/// entries, not failures.
struct BindingReport {
    std::vector<std::string> resolved;
    std::vector<std::string> unresolved;
};

BindingReport bind(const MeasureSpec& spec,
                   const std::unordered_set<std::string>& entity_ids);

} // namespace netobs::measure
