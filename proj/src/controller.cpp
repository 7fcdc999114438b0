#include "ecgra/controller.hpp"

#include <sstream>

namespace ecgra {

namespace {
constexpr uint64_t kConfigOverhead = 4; // fetch setup + apply handshake
}

Controller::Controller(Fabric& fabric, MemorySystem& mem) : fabric_(fabric), mem_(mem) {
    in_desc_.resize(mem_.columns());
    out_desc_.resize(mem_.columns());
    reset_counters();
}

void Controller::reset_counters() {
    perf_ = PerfCounters{};
    perf_.pe_active_cycles.assign(fabric_.rows() * fabric_.cols(), 0);
    perf_.pe_fire_cycles.assign(fabric_.rows() * fabric_.cols(), 0);
    perf_.input_fire_cycles.assign(mem_.columns(), {});
    fabric_.perf().active_cycles.assign(fabric_.rows() * fabric_.cols(), 0);
    fabric_.perf().fire_cycles.assign(fabric_.rows() * fabric_.cols(), 0);
    fabric_.perf().merge_collisions = 0;
    mem_.perf() = MemPerf{};
}

Word Controller::reg_read(Word addr) const {
    if (addr == kRegStatus) return (busy_ ? 1u : 0u) | (done_ ? 2u : 0u);
    if (addr == kRegCommand) return 0;
    if (addr == kRegConfigAddr) return config_addr_;
    if (addr == kRegConfigWords) return config_words_;
    const int cols = mem_.columns();
    if (addr >= kRegInBase && addr < kRegInBase + 0x10u * cols) {
        const int i = (addr - kRegInBase) / 0x10;
        switch ((addr - kRegInBase) % 0x10) {
        case 0x0: return in_desc_[i].base;
        case 0x4: return in_desc_[i].size;
        case 0x8: return static_cast<Word>(in_desc_[i].stride);
        case 0xC: return 0;
        }
    }
    if (addr >= kRegOutBase && addr < kRegOutBase + 0x10u * cols) {
        const int j = (addr - kRegOutBase) / 0x10;
        switch ((addr - kRegOutBase) % 0x10) {
        case 0x0: return out_desc_[j].base;
        case 0x4: return out_desc_[j].size;
        case 0x8: return static_cast<Word>(out_desc_[j].stride);
        case 0xC: return 0;
        }
    }
    if (addr >= kRegCounters && addr < kRegCounters + 0x20) {
        switch (addr - kRegCounters) {
        case 0x00: return static_cast<Word>(perf_.total_cycles);
        case 0x04: return static_cast<Word>(perf_.config_cycles);
        case 0x08: return static_cast<Word>(perf_.exec_cycles);
        case 0x0C: return static_cast<Word>(perf_.control_cycles);
        case 0x10: return static_cast<Word>(perf_.out_writes);
        case 0x14: return static_cast<Word>(perf_.shots);
        }
        return 0;
    }
    throw UnknownRegister("register 0x" + std::to_string(addr) + " is not mapped");
}

void Controller::reg_write(Word addr, Word value) {
    if (busy_ && !(addr == kRegCommand && value == kCmdAbort))
        throw BusyWrite("register write while the accelerator is busy");
    if (addr == kRegCommand) {
        switch (value) {
        case kCmdStart: start(false); return;
        case kCmdReconfigureAndStart: start(true); return;
        case kCmdAbort:
            busy_ = false;
            gates_.matrix_clock = false;
            return;
        default: throw Error("unknown command " + std::to_string(value));
        }
    }
    if (addr == kRegConfigAddr) {
        config_addr_ = value;
        return;
    }
    if (addr == kRegConfigWords) {
        config_words_ = value;
        return;
    }
    const int cols = mem_.columns();
    if (addr >= kRegInBase && addr < kRegInBase + 0x10u * cols) {
        const int i = (addr - kRegInBase) / 0x10;
        switch ((addr - kRegInBase) % 0x10) {
        case 0x0: in_desc_[i].base = value; return;
        case 0x4: in_desc_[i].size = value; return;
        case 0x8: in_desc_[i].stride = static_cast<int32_t>(value); return;
        case 0xC: return; // reserved
        }
    }
    if (addr >= kRegOutBase && addr < kRegOutBase + 0x10u * cols) {
        const int j = (addr - kRegOutBase) / 0x10;
        switch ((addr - kRegOutBase) % 0x10) {
        case 0x0: out_desc_[j].base = value; return;
        case 0x4: out_desc_[j].size = value; return;
        case 0x8: out_desc_[j].stride = static_cast<int32_t>(value); return;
        case 0xC: return;
        }
    }
    if (addr >= kRegCounters && addr < kRegCounters + 0x20)
        throw UnknownRegister("counter window is read-only");
    throw UnknownRegister("register 0x" + std::to_string(addr) + " is not mapped");
}

uint64_t Controller::fetch_configuration() {
    if (busy_) throw BusyWrite("configuration fetch while busy");
    if (config_words_ % 5 != 0)
        throw MalformedConfigStream("config_words must be a multiple of five");
    // The first input node streams the words at one word per cycle; it is
    // the only active master during configuration, so no conflicts arise.
    std::vector<Word> words;
    words.reserve(config_words_);
    for (Word k = 0; k < config_words_; ++k)
        words.push_back(mem_.image().load(config_addr_ + 4 * k));
    const auto configs = deserialize_config(words);
    fabric_.clear_configs();
    for (const auto& [id, cfg] : configs) fabric_.configure(cfg);
    if (!configs.empty()) fabric_.check_wiring();
    const uint64_t cycles = config_words_ + (config_words_ ? kConfigOverhead : 0);
    perf_.config_cycles += cycles;
    perf_.total_cycles += cycles;
    return cycles;
}

void Controller::start(bool reconfigure) {
    if (reconfigure) fetch_configuration();
    done_ = false;
    busy_ = true;
    gates_.matrix_clock = true;
    for (int c = 0; c < mem_.columns(); ++c) {
        mem_.in_node(c).launch(in_desc_[c]);
        mem_.out_node(c).launch(out_desc_[c]);
    }
    perf_.shots++;
}

void Controller::run_active(uint64_t max_cycles, int stall_window) {
    if (!busy_) throw PreconditionViolation("run without a started kernel");
    uint64_t stall = 0;
    uint64_t cycles = 0;
    const int cols = mem_.columns();
    while (!mem_.all_out_done()) {
        if (cycles >= max_cycles)
            throw TimeoutError("kernel exceeded " + std::to_string(max_cycles) + " cycles");
        BoundaryIO io;
        io.north_offers.resize(cols);
        io.south_readies.resize(cols);
        for (int c = 0; c < cols; ++c) {
            const MemNode& in = mem_.in_node(c);
            if (in.offer_valid()) io.north_offers[c] = {true, in.fifo.front()};
            io.south_readies[c] = mem_.out_node(c).accept_ready();
        }
        CyclePlan plan = fabric_.settle(io);
        const bool mem_fired = mem_.step();
        fabric_.commit(plan, io);
        for (int c = 0; c < cols; ++c) {
            if (plan.north_pops[c]) {
                mem_.in_node(c).fifo.pop_front();
                perf_.input_fire_cycles[c].push_back(perf_.exec_cycles + cycles);
            }
            if (plan.south_pushes[c])
                mem_.out_node(c).fifo.push_back(*plan.south_pushes[c]);
        }
        ++cycles;
        if (plan.any_fire || mem_fired)
            stall = 0;
        else if (++stall >= static_cast<uint64_t>(stall_window)) {
            std::ostringstream os;
            os << "no handshake fired for " << stall_window << " cycles\n"
               << fabric_.dump_state();
            for (int c = 0; c < cols; ++c) {
                const MemNode& in = mem_.in_node(c);
                const MemNode& out = mem_.out_node(c);
                os << "in" << c << " idx=" << in.next_index << "/" << in.desc.size
                   << " fifo=" << in.fifo.size() << "  out" << c << " idx=" << out.next_index
                   << "/" << out.desc.size << " fifo=" << out.fifo.size() << "\n";
            }
            busy_ = false;
            gates_.matrix_clock = false;
            throw DeadlockError("deadlock detected", os.str());
        }
    }
    perf_.exec_cycles += cycles;
    perf_.total_cycles += cycles;
    busy_ = false;
    done_ = true;
    gates_.matrix_clock = false;
}

RunResult Controller::run_shots(const std::vector<ShotRecord>& shots, uint64_t host_overhead,
                                uint64_t max_cycles, int stall_window) {
    const int cols = mem_.columns();
    for (const auto& shot : shots) {
        uint64_t writes = 0;
        if (shot.reconfigure) {
            reg_write(kRegConfigAddr, shot.config_addr);
            reg_write(kRegConfigWords, shot.config_words);
            writes += 2;
        }
        for (int c = 0; c < cols; ++c) {
            const StreamDescriptor in =
                c < static_cast<int>(shot.in.size()) ? shot.in[c] : StreamDescriptor{};
            const StreamDescriptor out =
                c < static_cast<int>(shot.out.size()) ? shot.out[c] : StreamDescriptor{};
            reg_write(kRegInBase + 0x10 * c + 0x0, in.base);
            reg_write(kRegInBase + 0x10 * c + 0x4, in.size);
            reg_write(kRegInBase + 0x10 * c + 0x8, static_cast<Word>(in.stride));
            reg_write(kRegOutBase + 0x10 * c + 0x0, out.base);
            reg_write(kRegOutBase + 0x10 * c + 0x4, out.size);
            reg_write(kRegOutBase + 0x10 * c + 0x8, static_cast<Word>(out.stride));
            writes += 6;
        }
        reg_write(kRegCommand, shot.reconfigure ? kCmdReconfigureAndStart : kCmdStart);
        writes += 1;
        perf_.control_cycles += writes + host_overhead;
        perf_.total_cycles += writes + host_overhead;
        run_active(max_cycles, stall_window);
    }
    return RunResult{snapshot_counters()};
}

PerfCounters Controller::snapshot_counters() const {
    PerfCounters p = perf_;
    p.pe_active_cycles = fabric_.perf().active_cycles;
    p.pe_fire_cycles = fabric_.perf().fire_cycles;
    p.merge_collisions = fabric_.perf().merge_collisions;
    p.bank_conflict_cycles = mem_.perf().conflict_cycles;
    p.node_transfers = mem_.perf().node_transfers;
    p.max_interleaved_grants = mem_.perf().max_interleaved_grants_per_cycle;
    p.out_writes = 0;
    for (int j = 0; j < mem_.columns(); ++j)
        p.out_writes += mem_.perf().node_transfers[mem_.columns() + j];
    return p;
}

} // namespace ecgra
