#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>

namespace cbnlab {

inline constexpr std::size_t kMemCells = 32;

inline constexpr int kIntBits = 12;
inline constexpr std::int64_t kIntMin = -2048;
inline constexpr std::int64_t kIntMax = 2047;

/// Two's complement wraparound at kIntBits.
std::int64_t wrap_int(std::int64_t x);
bool int_in_range(std::int64_t x);

/// Cell index in [0, kMemCells).
struct Address {
    std::uint8_t index = 0;

    static std::optional<Address> make(std::int64_t i) {
        if (i < 0 || static_cast<std::size_t>(i) >= kMemCells) return std::nullopt;
        return Address{static_cast<std::uint8_t>(i)};
    }
    bool operator==(const Address&) const = default;
    auto operator<=>(const Address&) const = default;
};

struct VUnit {
    bool operator==(const VUnit&) const = default;
};

/// Runtime value: bool, signed int, address or unit.
struct Value {
    std::variant<bool, std::int64_t, Address, VUnit> v;

    static Value boolean(bool b) { return Value{b}; }
    static Value integer(std::int64_t n) { return Value{n}; }
    static Value address(Address a) { return Value{a}; }
    static Value unit() { return Value{VUnit{}}; }

    bool is_bool() const { return std::holds_alternative<bool>(v); }
    bool is_int() const { return std::holds_alternative<std::int64_t>(v); }
    bool is_addr() const { return std::holds_alternative<Address>(v); }
    bool as_bool() const { return std::get<bool>(v); }
    std::int64_t as_int() const { return std::get<std::int64_t>(v); }
    Address as_addr() const { return std::get<Address>(v); }

    bool operator==(const Value&) const = default;
};

std::string to_string(const Value& v);

/// Fixed address space of optional values plus a throw flag. Persistent:
/// writes return a fresh state and never touch the input.
struct MemoryState {
    std::array<std::optional<Value>, kMemCells> cells;
    bool throw_flag = false;

    bool operator==(const MemoryState&) const = default;
};

MemoryState init_memory();
std::optional<Value> read_cell(const MemoryState& m, Address a);
MemoryState write_cell(const MemoryState& m, Address a, const Value& v);
MemoryState set_throw(const MemoryState& m);

/// "a0=5, a3=true; throw=false" (uninitialized cells omitted).
std::string print_memory(const MemoryState& m);

} // namespace cbnlab
