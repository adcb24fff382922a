#ifndef SODA_ADSB_CRC24_HPP
#define SODA_ADSB_CRC24_HPP

#include <cstdint>
#include <span>

namespace soda::adsb {

// Mode S generator polynomial (x^24 term implicit).
inline constexpr std::uint32_t kCrcPoly = 0xFFF409;

/// CRC-24 over exactly 88 bits (11 bytes, MSB first): the remainder of the
/// message polynomial shifted left by 24 bits, divided by the Mode S
/// generator. Throws ShapeError when the input is not 11 bytes.
std::uint32_t crc24(std::span<const std::uint8_t> data);

}  // namespace soda::adsb

#endif
