#include "masim/sensitivity.hpp"

#include "masim/errors.hpp"

namespace masim {

std::vector<std::string> SensitivityLattice::default_levels() {
    return {"public", "task-local", "privileged"};
}

SensitivityLattice::SensitivityLattice(std::vector<std::string> levels)
    : levels_(std::move(levels)) {
    if (levels_.empty()) {
        fail(Errc::scenario_invalid, "lattice: must declare at least one level");
    }
    if (levels_.size() > 255) {
        fail(Errc::scenario_invalid, "lattice: too many levels");
    }
    for (std::size_t i = 0; i < levels_.size(); ++i) {
        for (std::size_t j = i + 1; j < levels_.size(); ++j) {
            if (levels_[i] == levels_[j]) {
                fail(Errc::scenario_invalid,
                     "lattice: duplicate level '" + levels_[i] + "'");
            }
        }
    }
}

std::optional<SensitivityLabel> SensitivityLattice::find(
    std::string_view name) const {
    for (std::size_t i = 0; i < levels_.size(); ++i) {
        if (levels_[i] == name) {
            return SensitivityLabel{static_cast<std::uint8_t>(i)};
        }
    }
    return std::nullopt;
}

SensitivityLabel SensitivityLattice::require(std::string_view name) const {
    if (auto label = find(name)) {
        return *label;
    }
    fail(Errc::scenario_invalid,
         "unknown sensitivity level '" + std::string(name) + "'");
}

const std::string& SensitivityLattice::name(SensitivityLabel label) const {
    if (label.rank >= levels_.size()) {
        fail(Errc::scenario_invalid, "sensitivity label outside lattice");
    }
    return levels_[label.rank];
}

SensitivityLabel SensitivityLattice::top() const {
    return SensitivityLabel{static_cast<std::uint8_t>(levels_.size() - 1)};
}

}  // namespace masim
