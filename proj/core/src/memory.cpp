#include "cbnlab/memory.hpp"

namespace cbnlab {

std::int64_t wrap_int(std::int64_t x) {
    std::uint64_t u = static_cast<std::uint64_t>(x) & 0xFFFu;
    if (u & 0x800u) return static_cast<std::int64_t>(u) - 4096;
    return static_cast<std::int64_t>(u);
}

bool int_in_range(std::int64_t x) { return x >= kIntMin && x <= kIntMax; }

std::string to_string(const Value& v) {
    if (v.is_bool()) return v.as_bool() ? "true" : "false";
    if (v.is_int()) return std::to_string(v.as_int());
    if (v.is_addr()) return "a" + std::to_string(v.as_addr().index);
    return "unit";
}

MemoryState init_memory() { return MemoryState{}; }

std::optional<Value> read_cell(const MemoryState& m, Address a) {
    return m.cells[a.index];
}

MemoryState write_cell(const MemoryState& m, Address a, const Value& v) {
    MemoryState out = m;
    out.cells[a.index] = v;
    return out;
}

MemoryState set_throw(const MemoryState& m) {
    MemoryState out = m;
    out.throw_flag = true;
    return out;
}

std::string print_memory(const MemoryState& m) {
    std::string line;
    for (std::size_t i = 0; i < kMemCells; ++i) {
        if (!m.cells[i]) continue;
        if (!line.empty()) line += ", ";
        line += "a" + std::to_string(i) + "=" + to_string(*m.cells[i]);
    }
    if (!line.empty()) line += "; ";
    line += m.throw_flag ? "throw=true" : "throw=false";
    return line;
}

} // namespace cbnlab
