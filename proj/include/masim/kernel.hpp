#pragma once

// The security kernel: every mutation of the agent network, agent memory,
// the shared workspace, and the revision log flows through here, one entry
// per scheduler step. In enforced mode each entry is mediated by the
// capability registry (registration at spawn, decision at invocation); in
// permissive mode actions execute unchecked but the trace still records what
// enforcement would have decided.

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "masim/capability.hpp"
#include "masim/errors.hpp"
#include "masim/ids.hpp"
#include "masim/memory.hpp"
#include "masim/network.hpp"
#include "masim/registry.hpp"
#include "masim/revision_log.hpp"
#include "masim/sensitivity.hpp"
#include "masim/trace.hpp"

namespace masim {

struct KernelConfig {
    EnforcementMode mode = EnforcementMode::permissive;
    // Def-3.10-strict alternative: deny sibling termination outright instead
    // of suspending it for parent approval.
    bool flat_deny_sibling_termination = false;
};

enum class TerminationOutcome { executed, denied, suspended_pending_parent };
const char* termination_outcome_name(TerminationOutcome outcome) noexcept;

struct PendingTermination {
    std::uint64_t id = 0;
    AgentId actor;
    AgentId target;
    AgentId approver;  // shared parent of actor and target
    LogicalTime requested_at = 0;
};

struct InterceptOutcome {
    enum class Kind { executed, denied, suspended, failed, blocked_stale, skipped };

    Kind kind = Kind::executed;
    PolicyDecision decision;      // populated when denied
    std::string result;           // tool result when executed
    std::uint64_t request_id = 0; // populated when suspended
    std::string error;            // failure code when failed / blocked

    bool executed() const { return kind == Kind::executed; }
};

const char* intercept_kind_name(InterceptOutcome::Kind kind) noexcept;

// A simulated tool invocation as scripted by an agent.
struct ToolInvocation {
    ToolId tool;
    std::string target;                     // segment name or URL
    std::string content;                    // write payload
    std::optional<std::string> label;       // write label; writer clearance if absent
    std::vector<std::string> derived_from;  // source segments for commit checks
    bool own_store = false;                 // operate on agent memory, not workspace
};

struct RootSpec {
    std::string name = "main";
    Role role;
    CapabilitySet capabilities;
    Interaction interaction = Interaction::session_based;
};

// Digest over the full mutable state, shared by the live kernel and trace
// replay so both sides can prove they reached the same state.
std::uint64_t components_digest(const NetworkState& network,
                                const MemoryStore& workspace,
                                const CapabilityRegistry& registry,
                                const RevisionLog& log,
                                const std::vector<PendingTermination>& pending,
                                const std::vector<std::string>& exec_log,
                                const std::vector<std::string>& persistence);

std::set<AgentId> contamination_in(const NetworkState& network);

class Kernel {
public:
    Kernel(KernelConfig config, SensitivityLattice lattice,
           RoleResourceMap role_map, std::set<ToolId> tool_universe);

    // --- run setup -----------------------------------------------------

    AgentId bootstrap_root(const RootSpec& spec);
    SegmentId init_workspace_segment(const std::string& name,
                                     const std::string& content,
                                     SensitivityLabel label);

    // --- structural operations ------------------------------------------

    // Throws unknown_agent / capability_denied / privilege_escalation /
    // bad_selector / unknown_role / scenario_invalid.
    AgentId spawn(AgentId parent, const SpawnSpec& spec);

    // Permissive mode always executes (the trace keeps the would-have-been
    // decision); enforced mode permits parent/root kills, suspends sibling
    // requests for parent approval, and denies the rest.
    TerminationOutcome terminate_agent(AgentId actor, AgentId target);

    // Throws not_authorized_approver / unknown_request.
    TerminationOutcome resolve_pending_termination(AgentId approver,
                                                   std::uint64_t request_id,
                                                   bool approve);

    // --- memory operations ------------------------------------------------

    // Adversarial payload placement through a normal interaction channel;
    // succeeds in both modes by design (the threat model's given).
    SegmentId inject(AgentId target, const std::string& content,
                     SensitivityLabel label,
                     std::optional<SegmentTrigger> trigger = std::nullopt,
                     std::optional<std::string> seg_name = std::nullopt);

    InterceptOutcome invoke_tool(AgentId actor, const ToolInvocation& inv);

    // Throws not_authorized_revoker / unknown_segment / unknown_agent.
    void revoke_segment(AgentId author, SegmentId seg);

    // Delivers text, scans the recipient's memory for matching segment
    // triggers, and returns the rules that fired (the scheduler turns them
    // into follow-up steps). Enforced mode requires communicate capability.
    struct FiredTrigger {
        std::string keyword;
        ToolId tool;
        std::string target;
    };
    struct MessageOutcome {
        bool delivered = false;
        PolicyDecision decision;
        std::vector<FiredTrigger> fired;
    };
    MessageOutcome deliver_message(AgentId from, AgentId to,
                                   const std::string& text);

    // Engine-level step with no kernel effect beyond the clock and the trace
    // (scripted busy-work, skipped conditionals, empty resolutions).
    void note(const std::string& kind, AgentId actor, nlohmann::json detail);

    // --- analysis ---------------------------------------------------------

    // Agents whose store currently holds any adversarial-marked segment.
    std::set<AgentId> contamination_reach() const;

    std::uint64_t state_digest() const;

    // --- accessors ---------------------------------------------------------

    const NetworkState& state() const { return state_; }
    NetworkState& state() { return state_; }
    const MemoryStore& workspace() const { return workspace_; }
    const RevisionLog& revision_log() const { return revision_log_; }
    const CapabilityRegistry& registry() const { return registry_; }
    const RoleResourceMap& role_map() const { return role_map_; }
    const SensitivityLattice& lattice() const { return lattice_; }
    const std::vector<PendingTermination>& pending_terminations() const {
        return pending_;
    }
    const std::vector<std::string>& exec_log() const { return exec_log_; }
    const std::vector<std::string>& persistence_list() const {
        return persistence_;
    }
    Trace& trace() { return trace_; }
    const Trace& trace() const { return trace_; }
    EnforcementMode mode() const { return config_.mode; }
    LogicalTime clock() const { return state_.clock(); }

private:
    LogicalTime tick() { return state_.advance_clock(); }

    SegmentId allocate_segment_id() { return SegmentId{next_segment_id_++}; }

    AgentRecord& require_alive(AgentId id);
    void require_tool_known(const ToolId& tool) const;

    // Hypothetical enforced-mode decision, computed in permissive mode for
    // the would-have-denied trace annotations.
    PolicyDecision hypothetical_decision(AgentId agent,
                                         const ActionRef& action) const;

    bool termination_authorized(AgentId actor, AgentId target) const;

    InterceptOutcome execute_tool(AgentId actor, const ToolInvocation& inv,
                                  nlohmann::json& detail);
    TerminationOutcome execute_termination(AgentId actor, AgentId target,
                                           nlohmann::json detail);

    KernelConfig config_;
    SensitivityLattice lattice_;
    RoleResourceMap role_map_;
    std::set<ToolId> tool_universe_;

    NetworkState state_;
    CapabilityRegistry registry_;
    RevisionLog revision_log_;
    MemoryStore workspace_;
    Trace trace_;

    std::vector<PendingTermination> pending_;
    std::uint64_t next_request_id_ = 1;
    std::uint64_t next_segment_id_ = 1;

    // Origin owner per segment id (nullopt = shared workspace); revocation
    // authority derives from it.
    std::map<SegmentId, std::optional<AgentId>> segment_origin_;

    std::vector<std::string> exec_log_;
    std::vector<std::string> persistence_;
};

}  // namespace masim
