#include "soda/adsb/crc24.hpp"

#include <array>

#include "soda/errors.hpp"

namespace soda::adsb {

namespace {

std::array<std::uint32_t, 256> make_table() {
    std::array<std::uint32_t, 256> table{};
    for (std::uint32_t n = 0; n < 256; ++n) {
        std::uint32_t crc = n << 16;
        for (int k = 0; k < 8; ++k) {
            if (crc & 0x800000)
                crc = ((crc << 1) ^ kCrcPoly) & 0xFFFFFF;
            else
                crc = (crc << 1) & 0xFFFFFF;
        }
        table[n] = crc;
    }
    return table;
}

const std::array<std::uint32_t, 256> kTable = make_table();

}  // namespace

std::uint32_t crc24(std::span<const std::uint8_t> data) {
    if (data.size() != 11)
        throw ShapeError("crc24 expects exactly 88 bits (11 bytes), got " +
                         std::to_string(data.size() * 8));
    std::uint32_t crc = 0;
    for (std::uint8_t byte : data)
        crc = ((crc << 8) & 0xFFFFFF) ^ kTable[((crc >> 16) ^ byte) & 0xFF];
    return crc;
}

}  // namespace soda::adsb
