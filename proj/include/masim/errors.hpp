#pragma once

#include <stdexcept>
#include <string>

namespace masim {

enum class Errc {
    unknown_agent,
    already_terminated,
    capability_denied,
    privilege_escalation,
    bad_selector,
    unknown_segment,
    non_monotonic_time,
    not_authorized_revoker,
    not_authorized_approver,
    unknown_request,
    already_registered,
    unknown_role,
    bad_range,
    scenario_invalid,
    deadlock_detected,
    no_runnable_step,
    tool_failure,
};

inline const char* errc_name(Errc code) noexcept {
    switch (code) {
        case Errc::unknown_agent: return "unknown-agent";
        case Errc::already_terminated: return "already-terminated";
        case Errc::capability_denied: return "capability-denied";
        case Errc::privilege_escalation: return "privilege-escalation";
        case Errc::bad_selector: return "bad-selector";
        case Errc::unknown_segment: return "unknown-segment";
        case Errc::non_monotonic_time: return "non-monotonic-time";
        case Errc::not_authorized_revoker: return "not-authorized-revoker";
        case Errc::not_authorized_approver: return "not-authorized-approver";
        case Errc::unknown_request: return "unknown-request";
        case Errc::already_registered: return "already-registered";
        case Errc::unknown_role: return "unknown-role";
        case Errc::bad_range: return "bad-range";
        case Errc::scenario_invalid: return "scenario-invalid";
        case Errc::deadlock_detected: return "deadlock-detected";
        case Errc::no_runnable_step: return "no-runnable-step";
        case Errc::tool_failure: return "tool-failure";
    }
    return "unknown";
}

// Kernel and engine errors carry a stable machine-readable code next to the
// human-readable message; the trace and the CLI key off the code, not the text.
class KernelError : public std::runtime_error {
public:
    KernelError(Errc code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& message) {
    throw KernelError(code, message);
}

}  // namespace masim
