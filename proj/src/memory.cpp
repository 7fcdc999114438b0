#include "ecgra/memory.hpp"

#include <fstream>
#include <set>

namespace ecgra {

Word next_address(const StreamDescriptor& desc, Word index, Word capacity) {
    if (index >= desc.size)
        throw PreconditionViolation("stream index past descriptor size");
    const int64_t addr = static_cast<int64_t>(desc.base) +
                         static_cast<int64_t>(index) * static_cast<int64_t>(desc.stride);
    if (addr < 0 || addr + 4 > static_cast<int64_t>(capacity))
        throw OutOfBounds("stream address 0x" + std::to_string(addr) + " outside memory");
    if (addr % 4 != 0)
        throw OutOfBounds("stream address not word-aligned");
    return static_cast<Word>(addr);
}

MemoryImage::MemoryImage(int interleaved_banks) : interleaved_(interleaved_banks) {
    if (interleaved_ != 2 && interleaved_ != 4 && interleaved_ != 8)
        throw InvalidDimensions("interleaved bank count must be 2, 4 or 8");
    words_.assign(kCapacity / 4, 0);
}

void MemoryImage::check(Word addr) const {
    if (addr % 4 != 0) throw OutOfBounds("unaligned word access");
    if (addr + 4 > kCapacity) throw OutOfBounds("address outside memory image");
}

int MemoryImage::bank_of(Word addr) const {
    check(addr);
    if (addr < interleaved_base())
        throw NotInterleavedRegion("address 0x" + std::to_string(addr) +
                                   " is in the contiguous region");
    return (kBanks - interleaved_) + static_cast<int>((addr >> 2) % interleaved_);
}

int MemoryImage::bank_of_any(Word addr) const {
    check(addr);
    if (addr >= interleaved_base()) return bank_of(addr);
    return static_cast<int>(addr / kBankBytes);
}

Word MemoryImage::load(Word addr) const {
    check(addr);
    return words_[addr / 4];
}

void MemoryImage::store(Word addr, Word value) {
    check(addr);
    words_[addr / 4] = value;
}

void MemoryImage::load_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open memory image: " + path);
    std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                               std::istreambuf_iterator<char>());
    if (bytes.size() > kCapacity) throw OutOfBounds("memory image file larger than 256 KiB");
    words_.assign(kCapacity / 4, 0);
    for (size_t i = 0; i < bytes.size(); ++i)
        words_[i / 4] |= static_cast<Word>(bytes[i]) << (8 * (i % 4));
}

void MemoryImage::save_file(const std::string& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot write memory image: " + path);
    for (Word w : words_) {
        const uint8_t b[4] = {static_cast<uint8_t>(w), static_cast<uint8_t>(w >> 8),
                              static_cast<uint8_t>(w >> 16), static_cast<uint8_t>(w >> 24)};
        f.write(reinterpret_cast<const char*>(b), 4);
    }
}

std::vector<bool> BankArbiter::arbitrate(const std::vector<BankArbiter::Request>& requests) {
    std::vector<bool> grants(requests.size(), false);
    for (int bank = 0; bank < MemoryImage::kBanks; ++bank) {
        int best = -1;
        int best_rank = 9;
        for (size_t i = 0; i < requests.size(); ++i) {
            if (requests[i].bank != bank) continue;
            const int rank = (requests[i].node - rr_[bank] + 8) % 8;
            if (rank < best_rank) {
                best_rank = rank;
                best = static_cast<int>(i);
            }
        }
        if (best >= 0) {
            grants[best] = true;
            rr_[bank] = (requests[best].node + 1) % 8;
        }
    }
    return grants;
}

MemorySystem::MemorySystem(int interleaved_banks, int columns) : image_(interleaved_banks) {
    in_nodes_.resize(columns);
    out_nodes_.resize(columns);
    for (auto& n : in_nodes_) n.kind = NodeKind::In;
    for (auto& n : out_nodes_) n.kind = NodeKind::Out;
}

bool MemorySystem::step() {
    std::vector<BankArbiter::Request> reqs;
    std::vector<MemNode*> owners;
    std::vector<Word> addrs;
    auto add = [&](MemNode& n, int node_id) {
        if (!n.wants_memory()) return;
        const Word idx = (n.kind == NodeKind::In) ? n.next_index : n.next_index;
        const Word addr = next_address(n.desc, idx, MemoryImage::kCapacity);
        reqs.push_back({node_id, image_.bank_of_any(addr), n.kind == NodeKind::Out});
        owners.push_back(&n);
        addrs.push_back(addr);
    };
    for (size_t i = 0; i < in_nodes_.size(); ++i) add(in_nodes_[i], static_cast<int>(i));
    for (size_t j = 0; j < out_nodes_.size(); ++j)
        add(out_nodes_[j], static_cast<int>(in_nodes_.size() + j));

    // Conflict accounting: a bank with more than one request this cycle.
    std::array<int, MemoryImage::kBanks> per_bank{};
    for (auto& r : reqs) per_bank[r.bank]++;
    for (int b = 0; b < MemoryImage::kBanks; ++b)
        if (per_bank[b] > 1) perf_.conflict_cycles[b]++;

    const auto grants = arbiter_.arbitrate(reqs);

    uint64_t interleaved_grants = 0;
    bool any = false;
    for (size_t i = 0; i < reqs.size(); ++i) {
        if (!grants[i]) continue;
        any = true;
        MemNode& n = *owners[i];
        if (addrs[i] >= image_.interleaved_base()) interleaved_grants++;
        perf_.node_transfers[reqs[i].node]++;
        if (n.kind == NodeKind::In) {
            n.fifo.push_back(image_.load(addrs[i]));
            n.next_index++;
        } else {
            image_.store(addrs[i], n.fifo.front());
            n.fifo.pop_front();
            n.next_index++;
        }
    }
    if (interleaved_grants > static_cast<uint64_t>(image_.interleaved_banks()))
        throw PreconditionViolation("interleaved bandwidth ceiling exceeded");
    perf_.max_interleaved_grants_per_cycle =
        std::max(perf_.max_interleaved_grants_per_cycle, interleaved_grants);
    perf_.cycles++;
    return any;
}

bool MemorySystem::all_out_done() const {
    for (const auto& n : out_nodes_)
        if (!n.done()) return false;
    return true;
}

bool MemorySystem::all_done() const {
    if (!all_out_done()) return false;
    for (const auto& n : in_nodes_)
        if (!n.done()) return false;
    return true;
}

std::vector<std::pair<uint8_t, PEConfig>> deserialize_config(const std::vector<Word>& stream) {
    if (stream.size() % 5 != 0)
        throw MalformedConfigStream("config stream length is not a multiple of five words");
    std::vector<std::pair<uint8_t, PEConfig>> out;
    std::set<uint8_t> seen;
    for (size_t i = 0; i < stream.size(); i += 5) {
        std::array<Word, 5> group;
        std::copy(stream.begin() + i, stream.begin() + i + 5, group.begin());
        PEConfig cfg = decode_config(group);
        if (!seen.insert(cfg.pe_id).second)
            throw MalformedConfigStream("duplicate pe id " + std::to_string(cfg.pe_id) +
                                        " in config stream");
        out.emplace_back(cfg.pe_id, cfg);
    }
    return out;
}

} // namespace ecgra
