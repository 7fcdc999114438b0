#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "ecgra/common.hpp"
#include "ecgra/elastic.hpp"

namespace ecgra {

enum class AluOp : uint8_t { Add = 0, Sub, Mult, Shl, Shr, And, Or, Xor };

enum class CmpOp : uint8_t { Disabled = 0, EqZero, GtZero };

enum class DpMuxSel : uint8_t { Alu = 0, Cmp, Mux };

/// Source selector for the two FU data inputs.
enum class FuInSel : uint8_t { N = 0, E, S, W, Const, Feedback };

/// Source selector for the FU control input (PE input ports only; feedback
/// is not allowed for control).
enum class FuCtrlSel : uint8_t { N = 0, E, S, W };

/// Data/valid source for one cardinal output port. in_P1..in_P3 are the
/// three input ports other than the port's own side, in N,E,S,W order.
enum class OutMuxSel : uint8_t {
    InP1 = 0,
    InP2,
    InP3,
    FU,
    FUDelayed,
    B1,
    B2,
    Disabled,
};

/// Cardinal directions, also the port index order used everywhere.
enum Dir : int { DIR_N = 0, DIR_E = 1, DIR_S = 2, DIR_W = 3 };

inline const char* dir_name(int d) {
    static const char* names[4] = {"N", "E", "S", "W"};
    return names[d];
}

/// Destination lanes of a PE input-port fork sender, fixed layout order.
enum ForkDest : int {
    FORK_FU_A = 0,
    FORK_FU_B = 1,
    FORK_FU_CTRL = 2,
    FORK_OUT_P1 = 3,
    FORK_OUT_P2 = 4,
    FORK_OUT_P3 = 5,
};

/// Destination lanes of the FU output fork sender.
enum FuForkDest : int {
    FUFORK_N = 0,
    FUFORK_E = 1,
    FUFORK_S = 2,
    FUFORK_W = 3,
    FUFORK_FB1 = 4, // back into FU input A's elastic buffer
    FUFORK_FB2 = 5, // back into FU input B's elastic buffer
};

/// Gate-mask lanes: four input-port buffers plus the two FU input buffers.
enum GateLane : int {
    GATE_IN_N = 0,
    GATE_IN_E = 1,
    GATE_IN_S = 2,
    GATE_IN_W = 3,
    GATE_FU_A = 4,
    GATE_FU_B = 5,
};

/// The k-th (0..2) "other" port of `dir`, in N,E,S,W order. This single
/// table defines both the out-port mux sources (in_P1..3 of port D are the
/// other ports) and the input-fork destinations (outP1..3 of port D are the
/// other ports).
int other_port(int dir, int k);

/// Inverse: lane index (0..2) of `other` among the other-ports of `dir`.
int other_port_lane(int dir, int other);

/// Decoded per-PE configuration word. Field layout across the five 32-bit
/// image words is normative; see pack_config.
struct PEConfig {
    uint8_t pe_id = 0;         // 0..63
    uint8_t eb_gate_mask = 0;  // GateLane bits; set = buffer clock enabled
    AluOp alu_op = AluOp::Add;
    bool alu_fb_sel = false;   // operand A from the output register (reductions)
    CmpOp cmp_op = CmpOp::Disabled;
    JoinMergeMode join_mode = JoinMergeMode::JoinNoControl;
    DpMuxSel dp_mux_sel = DpMuxSel::Alu;
    FuInSel fu_in_a_sel = FuInSel::N;
    FuInSel fu_in_b_sel = FuInSel::N;
    FuCtrlSel fu_ctrl_sel = FuCtrlSel::N;
    Word constant = 0;
    Word init_data_reg = 0;
    uint8_t init_valids = 0;   // bit0 plain, bit1 B1, bit2 B2
    uint8_t fu_fork_mask = 0;  // FuForkDest bits
    uint8_t delay_d = 0;       // delayed-valid period; 0 disables FU_d
    std::array<OutMuxSel, 4> out_mux_sel{OutMuxSel::InP1, OutMuxSel::InP1,
                                         OutMuxSel::InP1, OutMuxSel::InP1};
    std::array<uint8_t, 4> in_fork_mask{0, 0, 0, 0}; // ForkDest bits per port

    bool operator==(const PEConfig&) const = default;
};

/// Pack into the five little-endian image words. Validates the config.
std::array<Word, 5> pack_config(const PEConfig& cfg);

/// Decode five image words. Rejects out-of-range enum encodings and nonzero
/// reserved bits, then revalidates the decoded config.
PEConfig decode_config(const std::array<Word, 5>& words);

/// Structural validation shared by pack/decode/apply. Throws InvalidConfig.
void validate_config(const PEConfig& cfg);

} // namespace ecgra
