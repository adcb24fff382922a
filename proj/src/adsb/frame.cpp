#include "soda/adsb/frame.hpp"

#include <cctype>
#include <cstdio>

#include "soda/adsb/crc24.hpp"
#include "soda/errors.hpp"

namespace soda {

std::string ParityError::to_hex6(std::uint32_t v) {
    char buf[8];
    std::snprintf(buf, sizeof buf, "%06X", v & 0xFFFFFF);
    return buf;
}

}  // namespace soda

namespace soda::adsb {

IcaoAddress::IcaoAddress(std::uint32_t v) : value(v) {
    if (v >= (1u << 24))
        throw RangeError("ICAO address exceeds 24 bits: " + std::to_string(v));
}

std::string IcaoAddress::to_hex() const {
    char buf[8];
    std::snprintf(buf, sizeof buf, "%06X", value);
    return buf;
}

IcaoAddress IcaoAddress::from_hex(const std::string& s) {
    if (s.size() != 6)
        throw FormatError("ICAO hex string must be 6 characters: '" + s + "'");
    std::uint32_t v = 0;
    for (char c : s) {
        if (!std::isxdigit(static_cast<unsigned char>(c)))
            throw FormatError("invalid hex digit in ICAO string: '" + s + "'");
        v = v * 16 + (std::isdigit(static_cast<unsigned char>(c))
                          ? c - '0'
                          : std::toupper(static_cast<unsigned char>(c)) - 'A' + 10);
    }
    return IcaoAddress(v);
}

FrameBytes encode_frame(std::uint8_t capability, IcaoAddress icao,
                        const MeBytes& me) {
    FrameBytes bytes{};
    bytes[0] = static_cast<std::uint8_t>((17u << 3) | (capability & 0x07));
    bytes[1] = static_cast<std::uint8_t>(icao.value >> 16);
    bytes[2] = static_cast<std::uint8_t>(icao.value >> 8);
    bytes[3] = static_cast<std::uint8_t>(icao.value);
    for (int i = 0; i < 7; ++i) bytes[4 + i] = me[i];
    std::uint32_t crc = crc24(std::span(bytes.data(), 11));
    bytes[11] = static_cast<std::uint8_t>(crc >> 16);
    bytes[12] = static_cast<std::uint8_t>(crc >> 8);
    bytes[13] = static_cast<std::uint8_t>(crc);
    return bytes;
}

AdsbFrame decode_frame(const FrameBytes& bytes) {
    std::uint8_t df = bytes[0] >> 3;
    if (df != 17)
        throw UnsupportedFormat("downlink format " + std::to_string(df) +
                                " is not supported (DF17 only)");
    std::uint32_t stored = (std::uint32_t(bytes[11]) << 16) |
                           (std::uint32_t(bytes[12]) << 8) | bytes[13];
    std::uint32_t computed = crc24(std::span(bytes.data(), 11));
    if (stored != computed) throw ParityError(computed, stored);

    AdsbFrame frame;
    frame.downlink_format = df;
    frame.capability = bytes[0] & 0x07;
    frame.icao = IcaoAddress((std::uint32_t(bytes[1]) << 16) |
                             (std::uint32_t(bytes[2]) << 8) | bytes[3]);
    for (int i = 0; i < 7; ++i) frame.me[i] = bytes[4 + i];
    frame.parity = stored;
    return frame;
}

FrameBytes frame_to_bytes(const AdsbFrame& frame) {
    return encode_frame(frame.capability, frame.icao, frame.me);
}

std::string frame_to_hex(const FrameBytes& bytes) {
    static const char* digits = "0123456789ABCDEF";
    std::string out;
    out.reserve(28);
    for (std::uint8_t b : bytes) {
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 0x0F]);
    }
    return out;
}

FrameBytes frame_from_hex(const std::string& hex) {
    if (hex.size() != 28)
        throw FormatError("frame hex string must be 28 characters, got " +
                          std::to_string(hex.size()));
    FrameBytes bytes{};
    for (int i = 0; i < 14; ++i) {
        int v = 0;
        for (int j = 0; j < 2; ++j) {
            char c = hex[2 * i + j];
            if (!std::isxdigit(static_cast<unsigned char>(c)))
                throw FormatError("invalid hex digit in frame string");
            v = v * 16 + (std::isdigit(static_cast<unsigned char>(c))
                              ? c - '0'
                              : std::toupper(static_cast<unsigned char>(c)) - 'A' + 10);
        }
        bytes[i] = static_cast<std::uint8_t>(v);
    }
    return bytes;
}

std::uint8_t type_code(const MeBytes& me) { return me[0] >> 3; }

}  // namespace soda::adsb
