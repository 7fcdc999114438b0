#pragma once

#include <array>
#include <cstdint>
#include <optional>

#include "ecgra/common.hpp"

namespace ecgra {

/// One side of an elastic handshake, producer view.
struct ChannelOffer {
    bool valid = false;
    Word data = 0; // meaningful only when valid
};

/// Consumer view. ready must be a pure function of cycle-start state.
struct ChannelDemand {
    bool ready = false;
};

/// Two-slot latency-insensitive buffer. Equivalent to the registered
/// data/valid x2 + ready x1 hardware stage: 1 cycle forward latency,
/// capacity 2, ready decoupled from same-cycle valid.
class ElasticBuffer {
  public:
    ChannelOffer offer() const {
        ChannelOffer o;
        o.valid = len_ > 0;
        o.data = slots_[0];
        return o;
    }

    ChannelDemand demand() const { return ChannelDemand{len_ < 2}; }

    bool valid() const { return len_ > 0; }
    bool ready() const { return len_ < 2; }
    Word head() const { return slots_[0]; }
    int size() const { return len_; }

    /// Advance one cycle: push fired_in (if any) and/or pop the head.
    /// Firings must agree with cycle-start occupancy.
    void commit(std::optional<Word> fired_in, bool fired_out) {
        if (fired_in && len_ >= 2)
            throw PreconditionViolation("elastic buffer push while full");
        if (fired_out && len_ == 0)
            throw PreconditionViolation("elastic buffer pop while empty");
        if (fired_out) {
            slots_[0] = slots_[1];
            --len_;
        }
        if (fired_in) {
            slots_[len_] = *fired_in;
            ++len_;
        }
    }

    void clear() { len_ = 0; }

  private:
    std::array<Word, 2> slots_{0, 0};
    uint8_t len_ = 0;
};

enum class JoinMergeMode : uint8_t {
    JoinNoControl = 0,
    JoinWithControl = 1,
    Merge = 2,
};

/// Result of evaluating a fork sender for one cycle.
struct ForkResult {
    bool fire = false;
    uint8_t valids_out = 0; // bit d set => destination d sees valid this cycle
};

/// All-ready fork: fires only when every enabled destination is ready, and
/// then every enabled destination sees valid at once. Disabled destinations
/// never see valid. mask/readies are bit-vectors over `width` destinations.
ForkResult fork_eval(bool valid_in, uint8_t mask, uint8_t readies, int width = 6);

/// Join/Merge firing decision for one cycle.
struct JoinResult {
    bool fire = false;
    bool consume_a = false;
    bool consume_b = false;
    bool consume_ctrl = false;
    /// Merge only: which input committed (0 = A, 1 = B).
    std::optional<int> merge_sel;
    /// Merge only: both inputs were valid; A won, B left pending.
    bool collision = false;
};

JoinResult join_eval(JoinMergeMode mode, bool valid_a, bool valid_b, bool valid_ctrl,
                     bool ready_down);

} // namespace ecgra
