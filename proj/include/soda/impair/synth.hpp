#ifndef SODA_IMPAIR_SYNTH_HPP
#define SODA_IMPAIR_SYNTH_HPP

#include <vector>

#include "soda/adsb/frame.hpp"
#include "soda/adsb/me.hpp"
#include "soda/impair/impair.hpp"
#include "soda/phy/iq.hpp"
#include "soda/rng.hpp"

namespace soda::impair {

/// Per-aircraft PHY fingerprint. The carrier leak (residual DC before
/// upconversion, expressed relative to the pulse amplitude) models the
/// transmitter's local-oscillator leakage; commercial transponders sit near
/// zero while SDR front ends show a clearly measurable leak.
struct TransponderProfile {
    double cfo_mean_hz = 0;
    double cfo_jitter_sigma_hz = 0;  // fresh draw per message
    double amplitude = 1.0;
    double amplitude_jitter_sigma = 0;
    double carrier_leak_i = 0;
    double carrier_leak_q = 0;
};

enum class DopplerMode { None, Calculated, Random };
enum class CfoMode { None, Random };

/// The five Doppler/CFO simulation cases for attack synthesis.
enum class DopplerCase { I, II, III, IV, V };
DopplerMode doppler_mode_for(DopplerCase c);
CfoMode cfo_mode_for(DopplerCase c);

/// SDR-based spoofer: a transponder-style fingerprint plus the configured
/// Doppler/CFO simulation behavior and the transmit gain sweep.
struct SpooferProfile {
    TransponderProfile base{.carrier_leak_i = 0.12, .carrier_leak_q = 0.04};
    DopplerMode doppler_mode = DopplerMode::None;
    CfoMode cfo_mode = CfoMode::Random;
    double doppler_range_hz = 1000;   // random Doppler ~ U[-range, +range]
    double cfo_range_hz = 10000;      // random CFO ~ U[-range, +range]
    std::vector<double> gains = {0.5, 1.0, 2.0};
};

/// Straight-line trajectory at constant speed, altitude and heading.
struct Trajectory {
    adsb::IcaoAddress icao;
    adsb::AircraftState initial;
};

/// Flat-earth propagation of the initial state to time t.
adsb::AircraftState state_at(const Trajectory& trajectory, double t_s);

/// Receiver-side channel: noise level and the station position used for
/// Doppler geometry.
struct ChannelParams {
    double snr_db = 20.0;
    double station_lat_deg = 47.6534;
    double station_lon_deg = -122.3076;
    double station_alt_m = 0;
};

/// Radial speed of the aircraft toward the station (positive = approaching).
double closing_speed(const adsb::AircraftState& state,
                     const ChannelParams& channel);

struct FleetAircraft {
    TransponderProfile profile;
    Trajectory trajectory;
};

struct FleetConfig {
    double cfo_spread_hz = 20000;     // per-aircraft means spread over +-spread
    double cfo_jitter_sigma_hz = 100;
    double max_leak = 0.03;
    double speed_mean_mps = 230;
    double speed_sigma_mps = 10;
    double altitude_mean_m = 9000;
    double altitude_sigma_m = 500;
    double area_half_span_deg = 0.5;  // start positions around the station
};

/// Synthetic fleet generator, substituting a real-world corpus: n aircraft
/// with distinct CFO means spread evenly over the configured band plus
/// per-aircraft leak/amplitude draws and random trajectories.
std::vector<FleetAircraft> make_fleet(int n, const ChannelParams& channel,
                                      Rng& rng, const FleetConfig& config = {});

/// Ghost-aircraft trajectory with the standard parameter distributions:
/// speed ~ N(230, 10) m/s (resampled if nonpositive), altitude ~ N(9000,
/// 500) m, heading ~ U[0, 360), random ICAO, one message per second.
Trajectory sample_ghost_trajectory(const ChannelParams& channel, Rng& rng);

/// Authentic traffic: per aircraft per second, alternately a position or a
/// velocity frame, modulated and passed through the transponder fingerprint
/// (per-message CFO draw, geometric Doppler, random phase) and the channel.
std::vector<phy::IqCapture> synth_authentic(
    const std::vector<FleetAircraft>& fleet, double duration_s,
    const ChannelParams& channel, Rng& rng, double sample_rate = 2e6);

/// Message replay (label A1): re-modulates the decoded bits from zero phase
/// and transmits them through the spoofer, one capture per frame per gain.
/// A Calculated Doppler mode degenerates to none here: a replayed message
/// has no trajectory to derive a shift from.
std::vector<phy::IqCapture> synth_message_replay(
    const std::vector<adsb::AdsbFrame>& frames, const SpooferProfile& spoofer,
    const ChannelParams& channel, Rng& rng, double sample_rate = 2e6);

/// IQ data replay (label A2): copies the recorded sample sequence and
/// applies the spoofer's re-transmission impairments (gain from the sweep,
/// spoofer leak and CFO, fresh channel noise). With worst_case set, the
/// replayed samples pass through untouched except for fresh noise.
std::vector<phy::IqCapture> synth_iq_replay(
    const std::vector<phy::IqCapture>& authentic, const SpooferProfile& spoofer,
    const ChannelParams& channel, Rng& rng, bool worst_case = false);

/// Ghost injection (label A3): simulates n_aircraft ghost trajectories and
/// per second encodes one position and one velocity frame each, transmitted
/// through the spoofer under its Doppler/CFO case.
std::vector<phy::IqCapture> synth_ghost_injection(
    int n_aircraft, double duration_s, const SpooferProfile& spoofer,
    const ChannelParams& channel, Rng& rng, double sample_rate = 2e6);

}  // namespace soda::impair

#endif
