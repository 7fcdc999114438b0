#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "ecgra/common.hpp"
#include "ecgra/pe_config.hpp"

namespace ecgra {

/// (initial address, element count, byte stride) of one memory stream.
struct StreamDescriptor {
    Word base = 0;   // byte address, word-aligned
    Word size = 0;   // number of 32-bit elements
    int32_t stride = 0; // signed byte offset between elements

    bool operator==(const StreamDescriptor&) const = default;
};

/// Address of element `index`; validated against `capacity` bytes.
Word next_address(const StreamDescriptor& desc, Word index, Word capacity);

/// 256 KiB image backed by eight 32 KiB banks. The top `interleaved` banks
/// (2, 4 or 8) form the interleaved region where the low word-address bits
/// select the bank; the rest are contiguous, one bank per address range.
class MemoryImage {
  public:
    static constexpr Word kCapacity = 256 * 1024;
    static constexpr int kBanks = 8;
    static constexpr Word kBankBytes = 32 * 1024;

    explicit MemoryImage(int interleaved_banks = 4);

    int interleaved_banks() const { return interleaved_; }
    Word interleaved_base() const {
        return static_cast<Word>(kBanks - interleaved_) * kBankBytes;
    }

    /// Bank id for an interleaved-region address (spec operation); throws
    /// NotInterleavedRegion outside it.
    int bank_of(Word addr) const;
    /// Bank id for any valid address.
    int bank_of_any(Word addr) const;

    Word load(Word addr) const;
    void store(Word addr, Word value);

    const std::vector<Word>& words() const { return words_; }
    std::vector<Word>& words() { return words_; }

    /// Flat little-endian 32-bit image file; shorter files are zero-extended.
    void load_file(const std::string& path);
    void save_file(const std::string& path) const;

  private:
    void check(Word addr) const;
    int interleaved_;
    std::vector<Word> words_;
};

/// Per-bank round-robin arbiter over up to eight requesting nodes.
class BankArbiter {
  public:
    struct Request {
        int node = 0;
        int bank = 0;
        bool write = false;
    };

    /// Grants exactly one requester per bank, round-robin from each bank's
    /// cursor. Returns one flag per request, in request order.
    std::vector<bool> arbitrate(const std::vector<Request>& requests);

    const std::array<int, MemoryImage::kBanks>& cursors() const { return rr_; }

  private:
    std::array<int, MemoryImage::kBanks> rr_{};
};

enum class NodeKind : uint8_t { In, Out };

/// One streaming memory node: address generator plus a small FIFO that damps
/// transfers when the bus stalls.
struct MemNode {
    NodeKind kind = NodeKind::In;
    StreamDescriptor desc;
    Word next_index = 0;
    std::deque<Word> fifo;
    bool active = false;

    static constexpr size_t kFifoDepth = 4;

    bool wants_memory() const {
        if (!active) return false;
        if (kind == NodeKind::In) return next_index < desc.size && fifo.size() < kFifoDepth;
        return !fifo.empty() && next_index < desc.size;
    }
    bool done() const {
        if (!active) return true;
        if (kind == NodeKind::In) return next_index >= desc.size && fifo.empty();
        return next_index >= desc.size;
    }
    /// Fabric-side handshake, evaluated on cycle-start state.
    bool offer_valid() const { return active && !fifo.empty(); } // In nodes
    bool accept_ready() const { // Out nodes stop after `size` tokens
        return active && fifo.size() < kFifoDepth && next_index + fifo.size() < desc.size;
    }

    void launch(const StreamDescriptor& d) {
        desc = d;
        next_index = 0;
        fifo.clear();
        active = d.size > 0;
    }
};

/// Counter block for the memory side of a run.
struct MemPerf {
    std::array<uint64_t, MemoryImage::kBanks> conflict_cycles{};
    std::array<uint64_t, 8> node_transfers{};
    uint64_t max_interleaved_grants_per_cycle = 0;
    uint64_t cycles = 0;
};

/// Interleaved memory, arbiter and the 4+4 stream nodes, stepped once per
/// fabric cycle.
class MemorySystem {
  public:
    explicit MemorySystem(int interleaved_banks = 4, int columns = 4);

    MemoryImage& image() { return image_; }
    const MemoryImage& image() const { return image_; }

    MemNode& in_node(int i) { return in_nodes_.at(i); }
    MemNode& out_node(int j) { return out_nodes_.at(j); }
    const MemNode& in_node(int i) const { return in_nodes_.at(i); }
    const MemNode& out_node(int j) const { return out_nodes_.at(j); }
    int columns() const { return static_cast<int>(in_nodes_.size()); }

    /// Memory phase of one cycle: issue requests from cycle-start node state,
    /// arbitrate, perform granted transfers. Returns true if any transfer
    /// happened. Fabric-side pops/pushes are applied separately.
    bool step();

    bool all_out_done() const;
    bool all_done() const;

    MemPerf& perf() { return perf_; }
    const MemPerf& perf() const { return perf_; }

  private:
    MemoryImage image_;
    BankArbiter arbiter_;
    std::vector<MemNode> in_nodes_;
    std::vector<MemNode> out_nodes_;
    MemPerf perf_;
};

/// Joins five-word groups back into per-PE configurations. Rejects
/// truncation and duplicate PE ids within one kernel.
std::vector<std::pair<uint8_t, PEConfig>> deserialize_config(const std::vector<Word>& stream);

} // namespace ecgra
