#include "ecgra/elastic.hpp"

namespace ecgra {

ForkResult fork_eval(bool valid_in, uint8_t mask, uint8_t readies, int width) {
    const uint8_t lane_mask = static_cast<uint8_t>((1u << width) - 1u);
    mask &= lane_mask;
    if (valid_in && mask == 0)
        throw InvalidConfig("fork sender has no enabled destinations but sees valid");
    ForkResult r;
    r.fire = valid_in && ((readies & mask) == mask);
    r.valids_out = r.fire ? mask : 0;
    return r;
}

JoinResult join_eval(JoinMergeMode mode, bool valid_a, bool valid_b, bool valid_ctrl,
                     bool ready_down) {
    JoinResult r;
    switch (mode) {
    case JoinMergeMode::JoinNoControl:
        r.fire = valid_a && valid_b && ready_down;
        r.consume_a = r.consume_b = r.fire;
        break;
    case JoinMergeMode::JoinWithControl:
        r.fire = valid_a && valid_b && valid_ctrl && ready_down;
        r.consume_a = r.consume_b = r.consume_ctrl = r.fire;
        break;
    case JoinMergeMode::Merge:
        // Control is generated internally; valid_ctrl is ignored. Well-formed
        // kernels never present both inputs at once; if they do, A commits
        // this cycle and B stays pending (reported as a collision).
        r.fire = (valid_a || valid_b) && ready_down;
        if (r.fire) {
            if (valid_a) {
                r.consume_a = true;
                r.merge_sel = 0;
                r.collision = valid_b;
            } else {
                r.consume_b = true;
                r.merge_sel = 1;
            }
        }
        break;
    }
    return r;
}

} // namespace ecgra
