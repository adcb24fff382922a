#include "soda/impair/synth.hpp"

#include <cmath>
#include <numbers>
#include <unordered_set>

#include "soda/errors.hpp"
#include "soda/phy/modem.hpp"

namespace soda::impair {

namespace {

constexpr double kEarthRadiusM = 6371000.0;
constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr std::uint8_t kCapability = 5;  // airborne Mode S level 2+

double uniform(Rng& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

double gaussian(Rng& rng, double mean, double sigma) {
    if (sigma <= 0) return mean;
    return std::normal_distribution<double>(mean, sigma)(rng);
}

double spoofer_doppler(const SpooferProfile& spoofer, double calculated_hz,
                       Rng& rng) {
    switch (spoofer.doppler_mode) {
        case DopplerMode::None: return 0.0;
        case DopplerMode::Calculated: return calculated_hz;
        case DopplerMode::Random:
            return uniform(rng, -spoofer.doppler_range_hz, spoofer.doppler_range_hz);
    }
    return 0.0;
}

double spoofer_cfo(const SpooferProfile& spoofer, Rng& rng) {
    double cfo = spoofer.base.cfo_mean_hz +
                 gaussian(rng, 0.0, spoofer.base.cfo_jitter_sigma_hz);
    if (spoofer.cfo_mode == CfoMode::Random)
        cfo += uniform(rng, -spoofer.cfo_range_hz, spoofer.cfo_range_hz);
    return cfo;
}

/// One over-the-air transmission: PPM modulation, carrier leak, per-message
/// CFO/phase draws, frequency offset, channel noise.
phy::IqCapture transmit(const adsb::FrameBytes& bytes,
                        const TransponderProfile& profile, double gain,
                        double doppler_hz, const ChannelParams& channel,
                        double sample_rate, Rng& rng) {
    double amp = profile.amplitude * gain *
                 std::max(0.05, 1.0 + gaussian(rng, 0.0, profile.amplitude_jitter_sigma));
    phy::IqCapture capture;
    capture.sample_rate = sample_rate;
    capture.samples = phy::modulate(bytes, sample_rate, amp);
    phy::Sample leak(profile.carrier_leak_i * amp, profile.carrier_leak_q * amp);
    for (phy::Sample& s : capture.samples) s += leak;
    double cfo = profile.cfo_mean_hz + gaussian(rng, 0.0, profile.cfo_jitter_sigma_hz);
    double phase = uniform(rng, 0.0, 2.0 * std::numbers::pi);
    capture = apply_frequency_offset(std::move(capture), cfo + doppler_hz, phase);
    return apply_awgn(std::move(capture), channel.snr_db, rng);
}

adsb::IcaoAddress random_icao(Rng& rng) {
    return adsb::IcaoAddress(
        std::uniform_int_distribution<std::uint32_t>(1, (1u << 24) - 1)(rng));
}

/// Position frames at even seconds (CPR parity alternating between them),
/// velocity frames at odd seconds.
adsb::FrameBytes frame_for_second(const Trajectory& trajectory, int second) {
    adsb::AircraftState state = state_at(trajectory, double(second));
    adsb::MeBytes me = (second % 2 == 0)
                           ? adsb::encode_airborne_position(state, (second / 2) % 2 != 0)
                           : adsb::encode_airborne_velocity(state);
    return adsb::encode_frame(kCapability, trajectory.icao, me);
}

}  // namespace

DopplerMode doppler_mode_for(DopplerCase c) {
    switch (c) {
        case DopplerCase::I: return DopplerMode::None;
        case DopplerCase::II:
        case DopplerCase::III: return DopplerMode::Calculated;
        case DopplerCase::IV:
        case DopplerCase::V: return DopplerMode::Random;
    }
    return DopplerMode::None;
}

CfoMode cfo_mode_for(DopplerCase c) {
    switch (c) {
        case DopplerCase::III:
        case DopplerCase::V: return CfoMode::Random;
        default: return CfoMode::None;
    }
}

adsb::AircraftState state_at(const Trajectory& trajectory, double t_s) {
    adsb::AircraftState s = trajectory.initial;
    double h = s.heading_deg * kDegToRad;
    double north = s.ground_speed_mps * std::cos(h) * t_s;
    double east = s.ground_speed_mps * std::sin(h) * t_s;
    s.latitude_deg += north / kEarthRadiusM / kDegToRad;
    s.longitude_deg +=
        east / (kEarthRadiusM * std::cos(s.latitude_deg * kDegToRad)) / kDegToRad;
    s.timestamp_s = trajectory.initial.timestamp_s + t_s;
    return s;
}

double closing_speed(const adsb::AircraftState& state,
                     const ChannelParams& channel) {
    double east = (state.longitude_deg - channel.station_lon_deg) * kDegToRad *
                  kEarthRadiusM * std::cos(channel.station_lat_deg * kDegToRad);
    double north = (state.latitude_deg - channel.station_lat_deg) * kDegToRad *
                   kEarthRadiusM;
    double up = state.altitude_m - channel.station_alt_m;
    double range = std::sqrt(east * east + north * north + up * up);
    if (range < 1.0) return 0.0;
    double h = state.heading_deg * kDegToRad;
    double v_east = state.ground_speed_mps * std::sin(h);
    double v_north = state.ground_speed_mps * std::cos(h);
    return -(v_east * east + v_north * north) / range;
}

std::vector<FleetAircraft> make_fleet(int n, const ChannelParams& channel,
                                      Rng& rng, const FleetConfig& config) {
    if (n < 1) throw ConfigError("fleet size must be at least 1");
    std::vector<FleetAircraft> fleet;
    fleet.reserve(std::size_t(n));
    std::unordered_set<std::uint32_t> used;
    double spacing = 2.0 * config.cfo_spread_hz / n;
    for (int i = 0; i < n; ++i) {
        FleetAircraft aircraft;
        aircraft.profile.cfo_mean_hz = -config.cfo_spread_hz + (i + 0.5) * spacing;
        aircraft.profile.cfo_jitter_sigma_hz = config.cfo_jitter_sigma_hz;
        aircraft.profile.amplitude = uniform(rng, 0.8, 1.2);
        aircraft.profile.amplitude_jitter_sigma = 0.05;
        double leak = uniform(rng, 0.0, config.max_leak);
        double leak_angle = uniform(rng, 0.0, 2.0 * std::numbers::pi);
        aircraft.profile.carrier_leak_i = leak * std::cos(leak_angle);
        aircraft.profile.carrier_leak_q = leak * std::sin(leak_angle);

        adsb::IcaoAddress icao = random_icao(rng);
        while (!used.insert(icao.value).second) icao = random_icao(rng);
        aircraft.trajectory.icao = icao;
        adsb::AircraftState& s = aircraft.trajectory.initial;
        s.latitude_deg = channel.station_lat_deg +
                         uniform(rng, -config.area_half_span_deg, config.area_half_span_deg);
        s.longitude_deg = channel.station_lon_deg +
                          uniform(rng, -config.area_half_span_deg, config.area_half_span_deg);
        s.altitude_m = gaussian(rng, config.altitude_mean_m, config.altitude_sigma_m);
        do {
            s.ground_speed_mps = gaussian(rng, config.speed_mean_mps, config.speed_sigma_mps);
        } while (s.ground_speed_mps <= 0);
        s.heading_deg = uniform(rng, 0.0, 360.0);
        fleet.push_back(aircraft);
    }
    return fleet;
}

Trajectory sample_ghost_trajectory(const ChannelParams& channel, Rng& rng) {
    Trajectory t;
    t.icao = random_icao(rng);
    adsb::AircraftState& s = t.initial;
    s.latitude_deg = channel.station_lat_deg + uniform(rng, -0.5, 0.5);
    s.longitude_deg = channel.station_lon_deg + uniform(rng, -0.5, 0.5);
    s.altitude_m = gaussian(rng, 9000.0, 500.0);
    do {
        s.ground_speed_mps = gaussian(rng, 230.0, 10.0);
    } while (s.ground_speed_mps <= 0);
    s.heading_deg = uniform(rng, 0.0, 360.0);
    return t;
}

std::vector<phy::IqCapture> synth_authentic(
    const std::vector<FleetAircraft>& fleet, double duration_s,
    const ChannelParams& channel, Rng& rng, double sample_rate) {
    if (fleet.empty()) throw ConfigError("fleet must not be empty");
    std::vector<phy::IqCapture> captures;
    for (const FleetAircraft& aircraft : fleet) {
        for (int t = 0; t < int(duration_s); ++t) {
            adsb::FrameBytes bytes = frame_for_second(aircraft.trajectory, t);
            adsb::AircraftState state = state_at(aircraft.trajectory, double(t));
            double doppler =
                doppler_shift(kCarrierHz, closing_speed(state, channel));
            phy::IqCapture capture = transmit(bytes, aircraft.profile, 1.0,
                                              doppler, channel, sample_rate, rng);
            capture.label = phy::Label::A0;
            capture.claimed_icao = aircraft.trajectory.icao;
            capture.truth_icao = aircraft.trajectory.icao;
            capture.timestamp_s = double(t);
            captures.push_back(std::move(capture));
        }
    }
    return captures;
}

std::vector<phy::IqCapture> synth_message_replay(
    const std::vector<adsb::AdsbFrame>& frames, const SpooferProfile& spoofer,
    const ChannelParams& channel, Rng& rng, double sample_rate) {
    std::vector<phy::IqCapture> captures;
    int index = 0;
    for (const adsb::AdsbFrame& frame : frames) {
        adsb::FrameBytes bytes = adsb::frame_to_bytes(frame);
        for (double gain : spoofer.gains) {
            TransponderProfile tx = spoofer.base;
            tx.cfo_mean_hz = spoofer_cfo(spoofer, rng);
            tx.cfo_jitter_sigma_hz = 0;  // the draw above is the per-message CFO
            double doppler = spoofer_doppler(spoofer, 0.0, rng);
            phy::IqCapture capture =
                transmit(bytes, tx, gain, doppler, channel, sample_rate, rng);
            capture.label = phy::Label::A1;
            capture.claimed_icao = frame.icao;
            capture.timestamp_s = double(index);
            captures.push_back(std::move(capture));
        }
        ++index;
    }
    return captures;
}

std::vector<phy::IqCapture> synth_iq_replay(
    const std::vector<phy::IqCapture>& authentic, const SpooferProfile& spoofer,
    const ChannelParams& channel, Rng& rng, bool worst_case) {
    std::vector<phy::IqCapture> captures;
    captures.reserve(authentic.size());
    std::size_t index = 0;
    for (const phy::IqCapture& source : authentic) {
        phy::IqCapture capture = source;
        capture.label = phy::Label::A2;
        if (!worst_case) {
            double gain = spoofer.gains.empty()
                              ? 1.0
                              : spoofer.gains[index % spoofer.gains.size()];
            phy::Sample leak(spoofer.base.carrier_leak_i * gain,
                             spoofer.base.carrier_leak_q * gain);
            for (phy::Sample& s : capture.samples) s = s * gain + leak;
            double doppler = spoofer_doppler(spoofer, 0.0, rng);
            capture = apply_frequency_offset(std::move(capture),
                                             spoofer_cfo(spoofer, rng) + doppler,
                                             uniform(rng, 0.0, 2.0 * std::numbers::pi));
        }
        capture = apply_awgn(std::move(capture), channel.snr_db, rng);
        captures.push_back(std::move(capture));
        ++index;
    }
    return captures;
}

std::vector<phy::IqCapture> synth_ghost_injection(
    int n_aircraft, double duration_s, const SpooferProfile& spoofer,
    const ChannelParams& channel, Rng& rng, double sample_rate) {
    if (n_aircraft < 1) throw ConfigError("ghost injection needs at least one aircraft");
    std::vector<Trajectory> ghosts;
    ghosts.reserve(std::size_t(n_aircraft));
    for (int i = 0; i < n_aircraft; ++i)
        ghosts.push_back(sample_ghost_trajectory(channel, rng));

    std::vector<phy::IqCapture> captures;
    std::size_t index = 0;
    for (const Trajectory& ghost : ghosts) {
        for (int t = 0; t < int(duration_s); ++t) {
            adsb::AircraftState state = state_at(ghost, double(t));
            double calculated =
                doppler_shift(kCarrierHz, closing_speed(state, channel));
            adsb::MeBytes position =
                adsb::encode_airborne_position(state, t % 2 != 0);
            adsb::MeBytes velocity = adsb::encode_airborne_velocity(state);
            for (const adsb::MeBytes& me : {position, velocity}) {
                adsb::FrameBytes bytes =
                    adsb::encode_frame(kCapability, ghost.icao, me);
                TransponderProfile tx = spoofer.base;
                tx.cfo_mean_hz = spoofer_cfo(spoofer, rng);
                tx.cfo_jitter_sigma_hz = 0;
                double gain = spoofer.gains.empty()
                                  ? 1.0
                                  : spoofer.gains[index % spoofer.gains.size()];
                double doppler = spoofer_doppler(spoofer, calculated, rng);
                phy::IqCapture capture =
                    transmit(bytes, tx, gain, doppler, channel, sample_rate, rng);
                capture.label = phy::Label::A3;
                capture.claimed_icao = ghost.icao;
                capture.timestamp_s = double(t);
                captures.push_back(std::move(capture));
                ++index;
            }
        }
    }
    return captures;
}

}  // namespace soda::impair
