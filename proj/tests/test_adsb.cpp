#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "soda/adsb/crc24.hpp"
#include "soda/adsb/frame.hpp"
#include "soda/adsb/me.hpp"
#include "soda/errors.hpp"
#include "soda/rng.hpp"

using namespace soda;

namespace {

adsb::MeBytes random_me(Rng& rng) {
    adsb::MeBytes me;
    std::uniform_int_distribution<int> dist(0, 255);
    for (auto& b : me) b = std::uint8_t(dist(rng));
    return me;
}

std::array<std::uint8_t, 11> random_11(Rng& rng) {
    std::array<std::uint8_t, 11> data;
    std::uniform_int_distribution<int> dist(0, 255);
    for (auto& b : data) b = std::uint8_t(dist(rng));
    return data;
}

}  // namespace

TEST_CASE("crc24 matches the long-division oracle") {
    Rng rng(11);
    for (int i = 0; i < 1000; ++i) {
        auto data = random_11(rng);
        CHECK(adsb::crc24(data) == oracles::crc24_long_division(data));
    }
}

TEST_CASE("crc24 is linear over GF(2)") {
    Rng rng(12);
    for (int i = 0; i < 50; ++i) {
        auto a = random_11(rng);
        auto b = random_11(rng);
        std::array<std::uint8_t, 11> x;
        for (std::size_t k = 0; k < 11; ++k) x[k] = a[k] ^ b[k];
        CHECK(adsb::crc24(x) == (adsb::crc24(a) ^ adsb::crc24(b)));
    }
}

TEST_CASE("crc24 rejects wrong input sizes") {
    std::vector<std::uint8_t> short_input(10, 0);
    CHECK_THROWS_AS(adsb::crc24(short_input), ShapeError);
    std::vector<std::uint8_t> long_input(14, 0);
    CHECK_THROWS_AS(adsb::crc24(long_input), ShapeError);
}

TEST_CASE("every single-bit and adjacent double-bit error is detected") {
    Rng rng(13);
    auto data = random_11(rng);
    std::uint32_t clean = adsb::crc24(data);
    for (int bit = 0; bit < 88; ++bit) {
        auto corrupted = data;
        corrupted[std::size_t(bit / 8)] ^= std::uint8_t(1u << (7 - bit % 8));
        CHECK(adsb::crc24(corrupted) != clean);
        if (bit + 1 < 88) {
            corrupted[std::size_t((bit + 1) / 8)] ^=
                std::uint8_t(1u << (7 - (bit + 1) % 8));
            CHECK(adsb::crc24(corrupted) != clean);
        }
    }
}

TEST_CASE("frame encode/decode round trip") {
    Rng rng(14);
    std::uniform_int_distribution<std::uint32_t> icao_dist(0, (1u << 24) - 1);
    for (int i = 0; i < 200; ++i) {
        adsb::IcaoAddress icao(icao_dist(rng));
        adsb::MeBytes me = random_me(rng);
        adsb::FrameBytes bytes = adsb::encode_frame(5, icao, me);
        adsb::AdsbFrame frame = adsb::decode_frame(bytes);
        CHECK(frame.downlink_format == 17);
        CHECK(frame.capability == 5);
        CHECK(frame.icao == icao);
        CHECK(frame.me == me);
        CHECK(adsb::frame_to_bytes(frame) == bytes);
    }
}

TEST_CASE("decode_frame rejects corruption and foreign formats") {
    Rng rng(15);
    adsb::FrameBytes bytes =
        adsb::encode_frame(0, adsb::IcaoAddress(0xABCDEF), random_me(rng));
    auto corrupted = bytes;
    corrupted[7] ^= 0x10;
    CHECK_THROWS_AS(adsb::decode_frame(corrupted), ParityError);
    auto wrong_df = bytes;
    wrong_df[0] = std::uint8_t((11u << 3) | (wrong_df[0] & 0x07));  // DF 11
    CHECK_THROWS_AS(adsb::decode_frame(wrong_df), UnsupportedFormat);
}

TEST_CASE("hex round trip is 28 uppercase characters") {
    Rng rng(16);
    adsb::FrameBytes bytes =
        adsb::encode_frame(5, adsb::IcaoAddress(0x4840D6), random_me(rng));
    std::string hex = adsb::frame_to_hex(bytes);
    CHECK(hex.size() == 28);
    CHECK(adsb::frame_from_hex(hex) == bytes);
    CHECK_THROWS_AS(adsb::frame_from_hex("8D4840"), FormatError);
    CHECK_THROWS_AS(adsb::frame_from_hex(std::string(28, 'G')), FormatError);
}

TEST_CASE("icao address formatting") {
    CHECK(adsb::IcaoAddress(0x4840D6).to_hex() == "4840D6");
    CHECK(adsb::IcaoAddress::from_hex("4840D6").value == 0x4840D6);
    CHECK(adsb::IcaoAddress::from_hex("00001F").value == 0x1F);
    CHECK_THROWS_AS(adsb::IcaoAddress(1u << 24), RangeError);
    CHECK_THROWS_AS(adsb::IcaoAddress::from_hex("12345"), FormatError);
}

TEST_CASE("me bit accessors round trip") {
    adsb::MeBytes me{};
    adsb::me_set_bits(me, 3, 17, 0x1ABCD);
    CHECK(adsb::me_get_bits(me, 3, 17) == 0x1ABCD);
    adsb::me_set_bits(me, 0, 5, 19);
    CHECK(adsb::me_get_bits(me, 0, 5) == 19);
    CHECK(adsb::type_code(me) == 19);
}

TEST_CASE("NL function agrees with the reference and known values") {
    CHECK(adsb::cpr_nl(0.0) == 59);
    CHECK(adsb::cpr_nl(87.0) == 2);
    CHECK(adsb::cpr_nl(89.5) == 1);
    CHECK(adsb::cpr_nl(10.0) == 59);
    CHECK(adsb::cpr_nl(10.5) == 58);  // just past the first transition
    for (double lat = -85.0; lat <= 85.0; lat += 0.37)
        CHECK(adsb::cpr_nl(lat) == oracles::cpr_nl_reference(lat));
}

TEST_CASE("altitude field round trips on the 25 ft grid") {
    // -1000 ft + 25 ft * N, N in [0, 2047]
    for (long n : {0L, 1L, 40L, 400L, 2047L}) {
        double feet = -1000.0 + 25.0 * double(n);
        double meters = feet * 0.3048;
        std::uint16_t field = adsb::encode_altitude_field(meters);
        CHECK((field & (1u << 4)) != 0);  // Q bit
        CHECK(adsb::decode_altitude_field(field) == doctest::Approx(meters).epsilon(1e-12));
    }
    CHECK_THROWS_AS(adsb::encode_altitude_field(-400.0), RangeError);
    CHECK_THROWS_AS(adsb::encode_altitude_field(20000.0), RangeError);
    CHECK_THROWS_AS(adsb::decode_altitude_field(0x0000), FormatError);  // no Q
}

TEST_CASE("altitude quantization error is at most 12.5 ft") {
    Rng rng(17);
    std::uniform_real_distribution<double> alt(-300.0, 15000.0);
    for (int i = 0; i < 500; ++i) {
        double meters = alt(rng);
        double back = adsb::decode_altitude_field(adsb::encode_altitude_field(meters));
        CHECK(std::fabs(back - meters) <= 12.5 * 0.3048 + 1e-9);
    }
}

TEST_CASE("CPR pair decodes globally to the encoded position") {
    Rng rng(18);
    std::uniform_real_distribution<double> lat_dist(-85.0, 85.0);
    std::uniform_real_distribution<double> lon_dist(-180.0, 180.0);
    int decoded = 0;
    for (int i = 0; i < 1000; ++i) {
        double lat = lat_dist(rng);
        double lon = lon_dist(rng);
        if (lon >= 180.0) lon = 0.0;
        adsb::CprPair even = adsb::cpr_encode(lat, lon, false);
        adsb::CprPair odd = adsb::cpr_encode(lat, lon, true);
        auto result = oracles::cpr_global_decode(even.lat, even.lon, odd.lat,
                                                 odd.lon, false);
        if (!result) continue;  // NL zone boundary; pair is ambiguous by design
        ++decoded;
        double err = oracles::haversine_m(lat, lon, result->lat_deg, result->lon_deg);
        CHECK(err < 5100.0);
        CHECK(std::fabs(result->lat_deg - lat) < 0.01);
    }
    CHECK(decoded > 900);  // boundaries are rare
}

TEST_CASE("airborne position ME layout") {
    adsb::AircraftState state;
    state.latitude_deg = 47.0;
    state.longitude_deg = -122.0;
    state.altitude_m = 9000.0;
    adsb::MeBytes me = adsb::encode_airborne_position(state, true);
    CHECK(adsb::type_code(me) == 11);
    adsb::AirbornePosition decoded = adsb::decode_airborne_position(me);
    CHECK(decoded.cpr_odd);
    adsb::CprPair expected = adsb::cpr_encode(47.0, -122.0, true);
    CHECK(decoded.cpr_lat == expected.lat);
    CHECK(decoded.cpr_lon == expected.lon);
    CHECK(decoded.altitude_m == doctest::Approx(9000.0).epsilon(1e-3));

    state.latitude_deg = 91.0;
    CHECK_THROWS_AS(adsb::encode_airborne_position(state, false), RangeError);
}

TEST_CASE("airborne velocity round trip") {
    adsb::AircraftState state;
    state.ground_speed_mps = 230.0;

    SUBCASE("due east") {
        state.heading_deg = 90.0;
        adsb::AirborneVelocity v =
            adsb::decode_airborne_velocity(adsb::encode_airborne_velocity(state));
        CHECK(v.heading_deg == doctest::Approx(90.0).epsilon(0.01));
        CHECK(v.ground_speed_mps == doctest::Approx(230.0).epsilon(0.01));
    }
    SUBCASE("wraparound headings") {
        for (double heading : {0.0, 45.0, 179.5, 225.0, 359.5}) {
            state.heading_deg = heading;
            adsb::AirborneVelocity v = adsb::decode_airborne_velocity(
                adsb::encode_airborne_velocity(state));
            double diff = std::fabs(v.heading_deg - heading);
            diff = std::min(diff, 360.0 - diff);
            CHECK(diff < 0.5);
            CHECK(std::fabs(v.ground_speed_mps - 230.0) < 0.6);
        }
    }
    SUBCASE("speed overflow") {
        state.ground_speed_mps = 540.0;  // ~1050 kt
        CHECK_THROWS_AS(adsb::encode_airborne_velocity(state), RangeError);
    }
    SUBCASE("velocity quantization over random states") {
        Rng rng(19);
        std::uniform_real_distribution<double> speed(1.0, 500.0);
        std::uniform_real_distribution<double> heading(0.0, 360.0);
        for (int i = 0; i < 500; ++i) {
            state.ground_speed_mps = speed(rng);
            state.heading_deg = heading(rng);
            adsb::AirborneVelocity v = adsb::decode_airborne_velocity(
                adsb::encode_airborne_velocity(state));
            // Component quantization is 1 kt, so the vector error is < 1 kt.
            CHECK(std::fabs(v.ground_speed_mps - state.ground_speed_mps) <
                  0.52 * 1.5);
        }
    }
}
