#ifndef SODA_ADSB_FRAME_HPP
#define SODA_ADSB_FRAME_HPP

#include <array>
#include <cstdint>
#include <string>

namespace soda::adsb {

/// 112-bit extended squitter as raw bytes, MSB first (transmission order).
using FrameBytes = std::array<std::uint8_t, 14>;
/// 56-bit ME payload as raw bytes.
using MeBytes = std::array<std::uint8_t, 7>;

/// 24-bit aircraft identifier.
struct IcaoAddress {
    std::uint32_t value = 0;

    IcaoAddress() = default;
    explicit IcaoAddress(std::uint32_t v);

    bool operator==(const IcaoAddress&) const = default;
    auto operator<=>(const IcaoAddress&) const = default;

    std::string to_hex() const;  // 6 uppercase hex digits
    static IcaoAddress from_hex(const std::string& s);
};

/// Decoded DF17 extended squitter.
struct AdsbFrame {
    std::uint8_t downlink_format = 17;  // 5 bits
    std::uint8_t capability = 0;        // 3 bits
    IcaoAddress icao;
    MeBytes me{};
    std::uint32_t parity = 0;  // 24 bits

    bool operator==(const AdsbFrame&) const = default;
};

/// Kinematic state feeding the position/velocity encoders.
struct AircraftState {
    double latitude_deg = 0;    // |lat| <= 90
    double longitude_deg = 0;   // [-180, 180)
    double altitude_m = 0;
    double ground_speed_mps = 0;
    double heading_deg = 0;     // [0, 360)
    double timestamp_s = 0;
};

/// Builds DF(17) | CA | ICAO | ME | crc24(first 88 bits).
FrameBytes encode_frame(std::uint8_t capability, IcaoAddress icao,
                        const MeBytes& me);

/// Parses and parity-checks a 112-bit frame.
/// Throws ParityError on checksum mismatch, UnsupportedFormat if DF != 17.
AdsbFrame decode_frame(const FrameBytes& bytes);

/// Re-serializes a decoded frame (parity recomputed).
FrameBytes frame_to_bytes(const AdsbFrame& frame);

/// 28-character uppercase hex form, the conventional 1090ES text format.
std::string frame_to_hex(const FrameBytes& bytes);
FrameBytes frame_from_hex(const std::string& hex);

/// Type code: first 5 bits of the ME field.
std::uint8_t type_code(const MeBytes& me);

}  // namespace soda::adsb

#endif
