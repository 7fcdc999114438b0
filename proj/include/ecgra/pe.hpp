#pragma once

#include <array>
#include <optional>

#include "ecgra/elastic.hpp"
#include "ecgra/pe_config.hpp"

namespace ecgra {

/// Wrapping two's-complement ALU. Mult keeps the low 32 bits, shifts use the
/// low 5 bits of b, Shr is logical.
Word alu_eval(AluOp op, Word a, Word b);

/// Signed predicate on (a, b). op must not be Disabled.
bool cmp_eval(CmpOp op, Word a, Word b);

/// Registered FU state: the output data register, its valid flip-flops
/// (plain / B1 / B2 / delayed), the delayed-valid firing counter, and the
/// two operand elastic buffers.
struct FUState {
    ElasticBuffer eb_a;
    ElasticBuffer eb_b;
    Word data_reg = 0;
    bool v_plain = false;
    bool v_b1 = false;
    bool v_b2 = false;
    bool v_dly = false;
    uint16_t fire_count = 0;

    void reset(const PEConfig& cfg) {
        eb_a.clear();
        eb_b.clear();
        data_reg = cfg.init_data_reg;
        v_plain = cfg.init_valids & 1;
        v_b1 = cfg.init_valids & 2;
        v_b2 = cfg.init_valids & 4;
        v_dly = false;
        fire_count = 0;
    }
};

/// One cycle's decisions for the FU, produced by fu_settle from cycle-start
/// state and consumed unchanged by fu_commit.
struct FUPlan {
    JoinResult join;
    bool pop_a = false;
    bool pop_b = false;
    Word result = 0;
    bool next_plain = false;
    bool next_b1 = false;
    bool next_b2 = false;
    bool next_dly = false;
    uint16_t next_fire_count = 0;
    bool fork_fire = false;
    // Valid seen by each consumer class when the output fork fires.
    bool vout_fu = false;
    bool vout_fu_d = false;
    bool vout_b1 = false;
    bool vout_b2 = false;
};

/// Settle the FU: join decision, datapath result, output-fork firing.
/// `ctrl_valid`/`ctrl_bit` describe the control input (JoinWithControl only;
/// the control path has no elastic buffer). `fork_ready` is the AND of the
/// enabled output-fork destination readies; it goes straight to the join.
FUPlan fu_settle(const PEConfig& cfg, const FUState& st, bool ctrl_valid, bool ctrl_bit,
                 bool fork_ready);

/// Apply a plan. push_a/push_b are tokens entering the operand buffers this
/// cycle (from an input-port fork, the constant source, or a feedback path).
void fu_commit(const PEConfig& cfg, FUState& st, const FUPlan& plan,
               std::optional<Word> push_a, std::optional<Word> push_b);

/// Full PE state: four input-port buffers plus the FU.
struct PEState {
    std::array<ElasticBuffer, 4> in_eb;
    FUState fu;

    void reset(const PEConfig& cfg) {
        for (auto& eb : in_eb) eb.clear();
        fu.reset(cfg);
    }
};

/// Per-cycle environment a PE sees: readiness of each cardinal out-port's
/// consumer (neighbor input buffer or output node; false on idle borders).
struct PEEnv {
    std::array<bool, 4> out_dest_ready{false, false, false, false};
};

/// One cycle's decisions for a whole PE.
struct PEPlan {
    std::array<bool, 4> in_fire{};   // input-port fork firings
    FUPlan fu;
    std::array<bool, 4> out_valid{}; // transfer on each cardinal out port
    std::array<Word, 4> out_data{};
    std::optional<Word> push_a;
    std::optional<Word> push_b;
    bool any_fire = false;
};

/// Settle one PE from cycle-start state. Pure; no mutation.
PEPlan pe_settle(const PEConfig& cfg, const PEState& st, const PEEnv& env);

/// Commit a plan produced by pe_settle this cycle. Tokens arriving on the
/// in-port wires (from neighbor out ports / input nodes) are pushed by the
/// caller via push_in.
void pe_commit(const PEConfig& cfg, PEState& st, const PEPlan& plan);

} // namespace ecgra
