#pragma once

#include <string_view>

namespace fcm::detail {

/// Bundled water-scarcity grouping, generated at configure time from
/// data/hierarchy_water_scarcity.json.
std::string_view water_scarcity_hierarchy_json();

}  // namespace fcm::detail
