#include "soda/adsb/me.hpp"

#include <cmath>
#include <numbers>

#include "soda/errors.hpp"

namespace soda::adsb {

namespace {

constexpr double kFeetPerMeter = 1.0 / 0.3048;
constexpr double kKnotsPerMps = 1.0 / 0.514444;
constexpr double kPi = std::numbers::pi;

double positive_mod(double x, double m) {
    double r = std::fmod(x, m);
    return r < 0 ? r + m : r;
}

}  // namespace

std::uint64_t me_get_bits(const MeBytes& me, int start, int len) {
    std::uint64_t v = 0;
    for (int i = 0; i < len; ++i) {
        int bit = start + i;
        v = (v << 1) | ((me[bit / 8] >> (7 - bit % 8)) & 1u);
    }
    return v;
}

void me_set_bits(MeBytes& me, int start, int len, std::uint64_t value) {
    for (int i = 0; i < len; ++i) {
        int bit = start + i;
        std::uint8_t mask = static_cast<std::uint8_t>(1u << (7 - bit % 8));
        if ((value >> (len - 1 - i)) & 1u)
            me[bit / 8] |= mask;
        else
            me[bit / 8] &= static_cast<std::uint8_t>(~mask);
    }
}

int cpr_nl(double lat) {
    lat = std::fabs(lat);
    if (lat < 1e-9) return 59;
    if (lat > 87.0) return 1;
    if (lat == 87.0) return 2;
    double a = 1.0 - std::cos(kPi / (2.0 * kCprNz));
    double b = std::cos(kPi / 180.0 * lat);
    double inner = 1.0 - a / (b * b);
    if (inner < -1.0) return 1;
    return static_cast<int>(std::floor(2.0 * kPi / std::acos(inner)));
}

CprPair cpr_encode(double lat, double lon, bool odd) {
    int i = odd ? 1 : 0;
    double dlat = 360.0 / (4.0 * kCprNz - i);
    std::uint32_t yz = static_cast<std::uint32_t>(std::floor(
                           kCprScale * positive_mod(lat, dlat) / dlat + 0.5)) %
                       kCprScale;
    // Latitude the receiver will reconstruct from this frame; selects NL.
    double rlat = dlat * (double(yz) / kCprScale + std::floor(lat / dlat));
    int nl = cpr_nl(rlat);
    double dlon = 360.0 / std::max(nl - i, 1);
    std::uint32_t xz = static_cast<std::uint32_t>(std::floor(
                           kCprScale * positive_mod(lon, dlon) / dlon + 0.5)) %
                       kCprScale;
    return {yz, xz};
}

std::uint16_t encode_altitude_field(double altitude_m) {
    double feet = altitude_m * kFeetPerMeter;
    long n = std::lround((feet + 1000.0) / 25.0);
    if (n < 0 || n > 2047)
        throw RangeError("altitude " + std::to_string(altitude_m) +
                         " m outside the encodable barometric range");
    std::uint16_t upper = static_cast<std::uint16_t>(n >> 4);
    std::uint16_t lower = static_cast<std::uint16_t>(n & 0x0F);
    return static_cast<std::uint16_t>((upper << 5) | (1u << 4) | lower);
}

double decode_altitude_field(std::uint16_t field) {
    if (!(field & (1u << 4)))
        throw FormatError("altitude field without Q bit is not supported");
    std::uint32_t n = ((field >> 5) << 4) | (field & 0x0F);
    return (25.0 * n - 1000.0) * 0.3048;
}

MeBytes encode_airborne_position(const AircraftState& state, bool cpr_odd) {
    if (std::fabs(state.latitude_deg) > 90.0 ||
        state.longitude_deg < -180.0 || state.longitude_deg >= 180.0)
        throw RangeError("aircraft state outside latitude/longitude bounds");
    MeBytes me{};
    me_set_bits(me, 0, 5, 11);  // TC 11: airborne position, barometric
    me_set_bits(me, 5, 2, 0);   // surveillance status
    me_set_bits(me, 7, 1, 0);   // single antenna flag
    me_set_bits(me, 8, 12, encode_altitude_field(state.altitude_m));
    me_set_bits(me, 20, 1, 0);  // time flag
    me_set_bits(me, 21, 1, cpr_odd ? 1 : 0);
    CprPair cpr = cpr_encode(state.latitude_deg, state.longitude_deg, cpr_odd);
    me_set_bits(me, 22, 17, cpr.lat);
    me_set_bits(me, 39, 17, cpr.lon);
    return me;
}

MeBytes encode_airborne_velocity(const AircraftState& state) {
    double speed_kt = state.ground_speed_mps * kKnotsPerMps;
    if (speed_kt >= 1021.5)
        throw RangeError("ground speed " +
                         std::to_string(state.ground_speed_mps) +
                         " m/s overflows the velocity field");
    double h = state.heading_deg * kPi / 180.0;
    double v_ew = speed_kt * std::sin(h);  // positive east
    double v_ns = speed_kt * std::cos(h);  // positive north
    std::uint32_t ew = static_cast<std::uint32_t>(std::lround(std::fabs(v_ew))) + 1;
    std::uint32_t ns = static_cast<std::uint32_t>(std::lround(std::fabs(v_ns))) + 1;

    MeBytes me{};
    me_set_bits(me, 0, 5, 19);  // TC 19
    me_set_bits(me, 5, 3, 1);   // subtype 1: ground speed
    me_set_bits(me, 10, 3, 1);  // NACv
    me_set_bits(me, 13, 1, v_ew < 0 ? 1 : 0);  // 1 = flying west
    me_set_bits(me, 14, 10, ew);
    me_set_bits(me, 24, 1, v_ns < 0 ? 1 : 0);  // 1 = flying south
    me_set_bits(me, 25, 10, ns);
    me_set_bits(me, 35, 1, 1);  // vertical rate source: barometric
    return me;
}

AirbornePosition decode_airborne_position(const MeBytes& me) {
    AirbornePosition out{};
    out.type_code = static_cast<std::uint8_t>(me_get_bits(me, 0, 5));
    if (out.type_code < 9 || out.type_code > 18)
        throw FormatError("ME is not an airborne position (TC " +
                          std::to_string(out.type_code) + ")");
    out.altitude_m = decode_altitude_field(
        static_cast<std::uint16_t>(me_get_bits(me, 8, 12)));
    out.cpr_odd = me_get_bits(me, 21, 1) != 0;
    out.cpr_lat = static_cast<std::uint32_t>(me_get_bits(me, 22, 17));
    out.cpr_lon = static_cast<std::uint32_t>(me_get_bits(me, 39, 17));
    return out;
}

AirborneVelocity decode_airborne_velocity(const MeBytes& me) {
    if (me_get_bits(me, 0, 5) != 19)
        throw FormatError("ME is not an airborne velocity (TC 19)");
    std::uint64_t ew = me_get_bits(me, 14, 10);
    std::uint64_t ns = me_get_bits(me, 25, 10);
    double v_ew = ew == 0 ? 0.0 : double(ew) - 1.0;
    double v_ns = ns == 0 ? 0.0 : double(ns) - 1.0;
    if (me_get_bits(me, 13, 1)) v_ew = -v_ew;
    if (me_get_bits(me, 24, 1)) v_ns = -v_ns;
    AirborneVelocity out{};
    out.ground_speed_mps = std::hypot(v_ew, v_ns) / kKnotsPerMps;
    double heading = std::atan2(v_ew, v_ns) * 180.0 / kPi;
    out.heading_deg = positive_mod(heading, 360.0);
    return out;
}

}  // namespace soda::adsb
