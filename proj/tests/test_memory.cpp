#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "cbnlab/memory.hpp"

#include <random>
#include <utility>
#include <vector>

using namespace cbnlab;

namespace {

// reference model: newest binding first
struct AssocMemory {
    std::vector<std::pair<Address, Value>> bindings;
    bool throw_flag = false;

    std::optional<Value> read(Address a) const {
        for (const auto& [addr, val] : bindings)
            if (addr == a) return val;
        return std::nullopt;
    }
    void write(Address a, const Value& v) { bindings.insert(bindings.begin(), {a, v}); }
};

Value random_value(std::mt19937_64& rng) {
    switch (rng() % 4) {
    case 0: return Value::boolean(rng() % 2 == 0);
    case 1: return Value::integer(static_cast<std::int64_t>(rng() % 4096) + kIntMin);
    case 2: return Value::address(Address{static_cast<std::uint8_t>(rng() % kMemCells)});
    default: return Value::unit();
    }
}

} // namespace

TEST_CASE("wrap_int folds into twelve-bit two's complement") {
    CHECK(wrap_int(0) == 0);
    CHECK(wrap_int(5) == 5);
    CHECK(wrap_int(-5) == -5);
    CHECK(wrap_int(kIntMax) == kIntMax);
    CHECK(wrap_int(kIntMin) == kIntMin);
    CHECK(wrap_int(kIntMax + 1) == kIntMin);
    CHECK(wrap_int(kIntMin - 1) == kIntMax);
    CHECK(wrap_int(4096) == 0);
    CHECK(wrap_int(-4096) == 0);
    CHECK(wrap_int(kIntMax + kIntMax) == -2);
    CHECK(int_in_range(kIntMax));
    CHECK(int_in_range(kIntMin));
    CHECK(!int_in_range(kIntMax + 1));
    CHECK(!int_in_range(kIntMin - 1));
}

TEST_CASE("init memory has every cell uninitialized and the flag down") {
    MemoryState m = init_memory();
    for (std::size_t i = 0; i < kMemCells; ++i)
        CHECK(!read_cell(m, Address{static_cast<std::uint8_t>(i)}));
    CHECK(!m.throw_flag);
}

TEST_CASE("write then read returns the written value") {
    MemoryState m = init_memory();
    MemoryState m2 = write_cell(m, Address{3}, Value::integer(7));
    REQUIRE(read_cell(m2, Address{3}));
    CHECK(*read_cell(m2, Address{3}) == Value::integer(7));
    CHECK(!read_cell(m, Address{3}));
}

TEST_CASE("writes to one address leave the others alone") {
    MemoryState m = write_cell(init_memory(), Address{1}, Value::boolean(true));
    MemoryState m2 = write_cell(m, Address{2}, Value::integer(-9));
    CHECK(read_cell(m2, Address{1}) == read_cell(m, Address{1}));
    for (std::size_t i = 0; i < kMemCells; ++i) {
        if (i == 2) continue;
        Address a{static_cast<std::uint8_t>(i)};
        CHECK(read_cell(m2, a) == read_cell(m, a));
    }
}

TEST_CASE("the newest write to an address wins") {
    MemoryState m = init_memory();
    MemoryState a = write_cell(write_cell(m, Address{5}, Value::integer(1)), Address{5},
                               Value::integer(2));
    MemoryState b = write_cell(m, Address{5}, Value::integer(2));
    CHECK(a == b);
}

TEST_CASE("set_throw raises the flag and keeps the cells") {
    MemoryState m = write_cell(init_memory(), Address{0}, Value::unit());
    MemoryState t = set_throw(m);
    CHECK(t.throw_flag);
    CHECK(!m.throw_flag);
    CHECK(t.cells == m.cells);
}

TEST_CASE("print_memory lists initialized cells then the flag") {
    CHECK(print_memory(init_memory()) == "throw=false");
    MemoryState m = write_cell(init_memory(), Address{0}, Value::integer(5));
    m = write_cell(m, Address{3}, Value::boolean(true));
    CHECK(print_memory(m) == "a0=5, a3=true; throw=false");
    CHECK(print_memory(set_throw(m)) == "a0=5, a3=true; throw=true");
}

TEST_CASE("random operations agree with the association-list model") {
    std::mt19937_64 rng(42);
    for (int round = 0; round < 200; ++round) {
        MemoryState m = init_memory();
        AssocMemory oracle;
        for (int op = 0; op < 50; ++op) {
            Address a{static_cast<std::uint8_t>(rng() % kMemCells)};
            if (rng() % 3 == 0) {
                CHECK(read_cell(m, a) == oracle.read(a));
            } else {
                Value v = random_value(rng);
                m = write_cell(m, a, v);
                oracle.write(a, v);
            }
        }
        for (std::size_t i = 0; i < kMemCells; ++i) {
            Address a{static_cast<std::uint8_t>(i)};
            CHECK(read_cell(m, a) == oracle.read(a));
        }
    }
}
