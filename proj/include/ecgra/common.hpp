#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace ecgra {

/// 32-bit datapath word. Arithmetic is two's-complement with wraparound;
/// signedness is a matter of interpretation at the use site.
using Word = uint32_t;

inline int32_t as_signed(Word w) { return static_cast<int32_t>(w); }
inline Word as_word(int32_t v) { return static_cast<uint32_t>(v); }

struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// A firing contradicted cycle-start occupancy or a stale plan was committed.
/// Always an engine bug, never a data-dependent condition.
struct PreconditionViolation : Error {
    using Error::Error;
};

/// A configuration image or in-memory PEConfig violates an invariant.
struct InvalidConfig : Error {
    using Error::Error;
};

struct InvalidDimensions : Error {
    using Error::Error;
};

/// Settle did not reach a fixpoint within the component bound.
struct CombinationalLoop : Error {
    using Error::Error;
};

/// No handshake fired anywhere for a full stall window while output nodes
/// were still incomplete. Carries a state dump for debugging.
struct DeadlockError : Error {
    std::string dump;
    DeadlockError(const std::string& what, std::string dump_text)
        : Error(what), dump(std::move(dump_text)) {}
};

struct TimeoutError : Error {
    using Error::Error;
};

struct OutOfBounds : Error {
    using Error::Error;
};

struct NotInterleavedRegion : Error {
    using Error::Error;
};

struct MalformedConfigStream : Error {
    using Error::Error;
};

struct ParseError : Error {
    using Error::Error;
};

struct UnboundStream : Error {
    using Error::Error;
};

struct Unroutable : Error {
    using Error::Error;
};

struct UnrollIllegal : Error {
    using Error::Error;
};

struct DimensionMismatch : Error {
    using Error::Error;
};

struct UnknownRegister : Error {
    using Error::Error;
};

struct BusyWrite : Error {
    using Error::Error;
};

struct OracleMismatch : Error {
    using Error::Error;
};

} // namespace ecgra
