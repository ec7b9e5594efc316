#pragma once

#include <optional>
#include <string>
#include <vector>

#include "masim/scenario.hpp"

namespace masim {

// The four bundled attack scenarios: a stale-read/lost-update race on a
// shared resource, a narrow-role agent escalating through an unrestricted
// tool surface, a behavioral trigger leaking to a child through memory
// replication, and a sibling terminating a long-running peer.
std::vector<Scenario> bundled_scenarios();

std::optional<Scenario> find_bundled(const std::string& name);

}  // namespace masim
