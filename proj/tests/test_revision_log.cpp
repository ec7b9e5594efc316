#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "masim/errors.hpp"
#include "masim/revision_log.hpp"

using namespace masim;
using namespace masim::test;

namespace {

constexpr SegmentId kSeg{1};
constexpr AgentId kAuthor{0};

// Direct quantifier evaluation of the validity predicate: revoked if any
// revoke exists after t0, else stale if any update exists after t0. Written
// against the event list only, independently of RevisionLog::validity.
ValidityVerdict quantifier_oracle(const std::vector<RevisionEvent>& events,
                                  SegmentId seg, LogicalTime t0) {
    LogicalTime earliest_revoke = 0;
    LogicalTime earliest_update = 0;
    for (const auto& ev : events) {
        if (ev.seg != seg || ev.t <= t0) continue;
        if (ev.op == RevisionOp::revoke &&
            (earliest_revoke == 0 || ev.t < earliest_revoke)) {
            earliest_revoke = ev.t;
        }
        if (ev.op == RevisionOp::update &&
            (earliest_update == 0 || ev.t < earliest_update)) {
            earliest_update = ev.t;
        }
    }
    if (earliest_revoke != 0) {
        return {ValidityVerdict::State::revoked, earliest_revoke};
    }
    if (earliest_update != 0) {
        return {ValidityVerdict::State::stale, earliest_update};
    }
    return {ValidityVerdict::State::valid, 0};
}

}  // namespace

TEST_CASE("append to empty log") {
    RevisionLog log;
    log.append({RevisionOp::update, kSeg, 1, kAuthor});
    CHECK(log.size() == 1);
}

TEST_CASE("append rejects non-increasing times") {
    RevisionLog log;
    log.append({RevisionOp::update, kSeg, 5, kAuthor});
    CHECK_THROWS_AS(log.append({RevisionOp::update, kSeg, 5, kAuthor}),
                    KernelError);
    CHECK_THROWS_AS(log.append({RevisionOp::revoke, kSeg, 3, kAuthor}),
                    KernelError);
    CHECK(log.size() == 1);
}

TEST_CASE("k appends replay to the identical sequence") {
    std::vector<RevisionEvent> events;
    for (LogicalTime t = 1; t <= 9; ++t) {
        events.push_back({t % 3 == 0 ? RevisionOp::revoke : RevisionOp::update,
                          SegmentId{t % 2}, t, kAuthor});
    }
    RevisionLog log;
    for (const auto& ev : events) log.append(ev);
    RevisionLog replayed;
    for (const auto& ev : log.events()) replayed.append(ev);
    CHECK(replayed.events() == log.events());
}

TEST_CASE("validity: no events after t0 is valid") {
    RevisionLog log;
    log.append({RevisionOp::update, kSeg, 3, kAuthor});
    CHECK(log.validity(kSeg, 3).state == ValidityVerdict::State::valid);
    CHECK(log.validity(kSeg, 9).state == ValidityVerdict::State::valid);
}

TEST_CASE("validity: later update marks the reader stale") {
    RevisionLog log;
    log.append({RevisionOp::update, kSeg, 7, kAuthor});
    ValidityVerdict v = log.validity(kSeg, 5);
    CHECK(v.state == ValidityVerdict::State::stale);
    CHECK(v.at == 7);
}

TEST_CASE("validity: later revoke dominates, reader spawned after is clean") {
    RevisionLog log;
    log.append({RevisionOp::update, kSeg, 4, kAuthor});
    log.append({RevisionOp::revoke, kSeg, 6, kAuthor});
    ValidityVerdict v = log.validity(kSeg, 2);
    CHECK(v.state == ValidityVerdict::State::revoked);
    CHECK(v.at == 6);
    // Boundary: a reader whose t0 is at or past the revoke does not see it.
    CHECK(log.validity(kSeg, 6).state == ValidityVerdict::State::valid);
    CHECK(log.validity(kSeg, 7).state == ValidityVerdict::State::valid);
}

TEST_CASE("validity ignores other segments") {
    RevisionLog log;
    log.append({RevisionOp::revoke, SegmentId{2}, 5, kAuthor});
    CHECK(log.validity(kSeg, 1).state == ValidityVerdict::State::valid);
}

TEST_CASE("validity respects the horizon") {
    RevisionLog log;
    log.append({RevisionOp::update, kSeg, 4, kAuthor});
    log.append({RevisionOp::revoke, kSeg, 8, kAuthor});
    CHECK(log.validity(kSeg, 1, 5).state == ValidityVerdict::State::stale);
    CHECK(log.validity(kSeg, 1, 8).state == ValidityVerdict::State::revoked);
    CHECK(log.validity(kSeg, 5, 7).state == ValidityVerdict::State::valid);
}

TEST_CASE("validity equals the quantifier oracle on all patterns <= 4") {
    // All op sequences of length 0..4 over {update, revoke} on one segment,
    // events at t = 1..k, crossed with every spawn time in range.
    for (int len = 0; len <= 4; ++len) {
        for (int mask = 0; mask < (1 << len); ++mask) {
            std::vector<RevisionEvent> events;
            RevisionLog log;
            for (int i = 0; i < len; ++i) {
                const RevisionOp op = (mask >> i) & 1 ? RevisionOp::revoke
                                                      : RevisionOp::update;
                RevisionEvent ev{op, kSeg, static_cast<LogicalTime>(i + 1),
                                 kAuthor};
                events.push_back(ev);
                log.append(ev);
            }
            for (LogicalTime t0 = 0; t0 <= 6; ++t0) {
                const ValidityVerdict got = log.validity(kSeg, t0);
                const ValidityVerdict want = quantifier_oracle(events, kSeg, t0);
                CHECK(got == want);
                // Revoked dominates stale whenever both clauses hold.
                bool has_revoke = false;
                bool has_update = false;
                for (const auto& ev : events) {
                    if (ev.t <= t0) continue;
                    has_revoke |= ev.op == RevisionOp::revoke;
                    has_update |= ev.op == RevisionOp::update;
                }
                if (has_revoke && has_update) {
                    CHECK(got.state == ValidityVerdict::State::revoked);
                }
            }
        }
    }
}

TEST_CASE("append-only: earlier log is a prefix of the later log") {
    RevisionLog log;
    std::vector<std::vector<RevisionEvent>> observations;
    for (LogicalTime t = 1; t <= 12; ++t) {
        log.append({t % 4 == 0 ? RevisionOp::revoke : RevisionOp::update,
                    SegmentId{t % 3}, t, kAuthor});
        observations.push_back(log.events());
    }
    for (std::size_t i = 1; i < observations.size(); ++i) {
        const auto& earlier = observations[i - 1];
        const auto& later = observations[i];
        REQUIRE(earlier.size() <= later.size());
        for (std::size_t k = 0; k < earlier.size(); ++k) {
            CHECK(earlier[k] == later[k]);
        }
    }
}

TEST_CASE("audit slices") {
    RevisionLog log;
    for (LogicalTime t = 1; t <= 10; ++t) {
        log.append({RevisionOp::update, SegmentId{t}, t, kAuthor});
    }
    CHECK(log.audit(1, 10) == log.events());
    CHECK(log.audit(11, 20).empty());
    CHECK_THROWS_AS((void)log.audit(5, 4), KernelError);

    // Concatenation of adjacent ranges equals the full range.
    auto left = log.audit(1, 6);
    auto right = log.audit(7, 10);
    left.insert(left.end(), right.begin(), right.end());
    CHECK(left == log.audit(1, 10));
}
