#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace masim {

// Position in a totally ordered label chain; rank 0 is the bottom element.
// Labels are only meaningful relative to the lattice that minted them.
struct SensitivityLabel {
    std::uint8_t rank = 0;
    auto operator<=>(const SensitivityLabel&) const = default;
};

// a dominates b (a is at least as high as b).
constexpr bool dominates(SensitivityLabel a, SensitivityLabel b) {
    return a.rank >= b.rank;
}

// Configurable totally ordered chain of sensitivity levels. Always non-empty,
// so a bottom element always exists.
class SensitivityLattice {
public:
    SensitivityLattice() : SensitivityLattice(default_levels()) {}
    explicit SensitivityLattice(std::vector<std::string> levels);

    static std::vector<std::string> default_levels();

    std::optional<SensitivityLabel> find(std::string_view name) const;
    // Throws scenario_invalid on unknown level names.
    SensitivityLabel require(std::string_view name) const;
    const std::string& name(SensitivityLabel label) const;

    SensitivityLabel bottom() const { return SensitivityLabel{0}; }
    SensitivityLabel top() const;
    std::size_t size() const { return levels_.size(); }
    const std::vector<std::string>& levels() const { return levels_; }

private:
    std::vector<std::string> levels_;
};

}  // namespace masim
