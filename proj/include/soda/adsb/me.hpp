#ifndef SODA_ADSB_ME_HPP
#define SODA_ADSB_ME_HPP

#include <cstdint>

#include "soda/adsb/frame.hpp"

namespace soda::adsb {

// Airborne CPR parameters (NZ = 15, 17-bit encoded coordinates).
inline constexpr int kCprNz = 15;
inline constexpr std::uint32_t kCprScale = 1u << 17;

/// Number of longitude zones at the given latitude (NL function).
int cpr_nl(double latitude_deg);

/// 17-bit CPR latitude/longitude pair for one frame of the even/odd pair.
struct CprPair {
    std::uint32_t lat;
    std::uint32_t lon;
};
CprPair cpr_encode(double latitude_deg, double longitude_deg, bool odd);

/// 12-bit barometric altitude field with Q=1 (25 ft increments).
/// Throws RangeError when the altitude is outside [-1000, 50175] ft.
std::uint16_t encode_altitude_field(double altitude_m);
double decode_altitude_field(std::uint16_t field);

/// Airborne position ME (TC 9..18): altitude, CPR format flag, 17-bit
/// encoded latitude and longitude.
MeBytes encode_airborne_position(const AircraftState& state, bool cpr_odd);

/// Airborne velocity ME (TC 19, ground-speed subtype).
/// Throws RangeError when the speed exceeds the 10-bit field.
MeBytes encode_airborne_velocity(const AircraftState& state);

/// Fields recovered from a position ME, still CPR-encoded.
struct AirbornePosition {
    std::uint8_t type_code;
    double altitude_m;
    bool cpr_odd;
    std::uint32_t cpr_lat;
    std::uint32_t cpr_lon;
};
AirbornePosition decode_airborne_position(const MeBytes& me);

/// Ground speed and heading recovered from a velocity ME.
struct AirborneVelocity {
    double ground_speed_mps;
    double heading_deg;
};
AirborneVelocity decode_airborne_velocity(const MeBytes& me);

/// Raw bit access within a 56-bit ME, MSB first.
std::uint64_t me_get_bits(const MeBytes& me, int start, int len);
void me_set_bits(MeBytes& me, int start, int len, std::uint64_t value);

}  // namespace soda::adsb

#endif
