#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "masim/ids.hpp"
#include "masim/sensitivity.hpp"

namespace masim {

enum class MemoryMode { inherit_full, inherit_partial, agent_agnostic };
enum class EnforcementMode { permissive, enforced };

const char* memory_mode_name(MemoryMode mode) noexcept;
std::optional<MemoryMode> parse_memory_mode(std::string_view text);
const char* enforcement_mode_name(EnforcementMode mode) noexcept;
std::optional<EnforcementMode> parse_enforcement_mode(std::string_view text);

// Behavioral rule carried inside a segment: when `keyword` occurs in a
// message delivered to the segment's holder, the holder performs the tool
// invocation below. Rules travel with the segment through inheritance.
struct SegmentTrigger {
    std::string keyword;
    std::string tool;
    std::string target;

    auto operator<=>(const SegmentTrigger&) const = default;
};

struct MemorySegment {
    SegmentId id;
    SensitivityLabel label;  // immutable after creation
    std::string content;
    bool adversarial = false;  // ground-truth payload marker for analysis
    LogicalTime created_at = 0;
    std::optional<SegmentTrigger> trigger;
    // Workspace-style attributes; name is the file-like handle, executable is
    // toggled by fs_chmod in the simulated tool surface.
    std::optional<std::string> name;
    bool executable = false;
};

std::uint64_t segment_digest(const MemorySegment& seg);

// Ordered collection of segments. Ids within one store are distinct.
class MemoryStore {
public:
    MemoryStore() = default;
    explicit MemoryStore(std::optional<AgentId> owner) : owner_(owner) {}

    // Throws unknown_segment-flavored logic errors only through the kernel;
    // plain append asserts per-store id uniqueness.
    void append(MemorySegment seg);

    const MemorySegment* find(SegmentId id) const;
    MemorySegment* find(SegmentId id);
    const MemorySegment* find_named(std::string_view name) const;
    MemorySegment* find_named(std::string_view name);

    const std::vector<MemorySegment>& segments() const { return segments_; }
    std::optional<AgentId> owner() const { return owner_; }
    std::size_t size() const { return segments_.size(); }
    bool empty() const { return segments_.empty(); }

private:
    std::vector<MemorySegment> segments_;
    std::optional<AgentId> owner_;
};

std::uint64_t store_digest(const MemoryStore& store);

// Frozen copy of a store at a point in time. Immutable after capture.
struct MemorySnapshot {
    LogicalTime taken_at = 0;
    std::vector<MemorySegment> segments;
};

MemorySnapshot snapshot(const MemoryStore& store, LogicalTime now);
std::uint64_t snapshot_digest(const MemorySnapshot& snap);

// Keeps exactly the segments whose label the clearance dominates; order
// preserved. Idempotent, and monotone in the clearance.
MemoryStore project(const MemoryStore& store, SensitivityLabel clearance);

// Child-store initialization from a parent store. The permissive result
// honors the requested mode; the enforced result additionally filters the
// permissive result through project() with the child's clearance.
// Throws bad_selector when an inherit_partial selector names an unknown
// segment.
MemoryStore inherit(const MemoryStore& parent, MemoryMode mode,
                    const std::optional<std::vector<SegmentId>>& selector,
                    EnforcementMode enforcement,
                    SensitivityLabel child_clearance,
                    std::optional<AgentId> new_owner);

}  // namespace masim
