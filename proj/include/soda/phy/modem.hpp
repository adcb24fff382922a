#ifndef SODA_PHY_MODEM_HPP
#define SODA_PHY_MODEM_HPP

#include <cstddef>
#include <span>
#include <vector>

#include "soda/adsb/frame.hpp"
#include "soda/phy/iq.hpp"

namespace soda::phy {

/// 1090ES pulse timing. One bit per microsecond, pulses are half-bit chips;
/// the data block starts after the 8 us preamble.
struct PulseTiming {
    static constexpr double kBitPeriodS = 1e-6;
    static constexpr double kHalfBitS = 0.5e-6;
    static constexpr double kPreambleS = 8e-6;
    static constexpr double kMessageS = 120e-6;
    static constexpr int kPreambleChips = 16;   // 0.5 us each
    static constexpr int kMessageChips = 240;
    // Preamble pulse positions in half-bit chips: 0, 1.0, 3.5, 4.5 us.
    static constexpr int kPreamblePulseChips[4] = {0, 2, 7, 9};
};

/// Samples per 0.5 us chip. Throws ConfigError unless sample_rate is a
/// positive integer multiple of 2 MHz.
int samples_per_chip(double sample_rate);

/// PPM-modulates a 112-bit frame into complex baseband samples with zero
/// initial phase (q = 0). Bit 1 puts energy in the first half of its slot.
std::vector<Sample> modulate(const adsb::FrameBytes& frame,
                             double sample_rate = 2e6,
                             double amplitude = 1.0);

struct PreambleDetectorConfig {
    double threshold = 0.1;    // minimum mean pulse-chip magnitude
    double margin_db = 6.0;    // pulse mean over off-chip mean, in dB
};

/// Correlates the magnitude sequence with the 4-pulse preamble template and
/// returns message start indices, strongest first within each message
/// length (non-maximum suppression).
std::vector<std::size_t> detect_preamble(std::span<const Sample> stream,
                                         double sample_rate,
                                         const PreambleDetectorConfig& config = {});

/// Recovers the 112 bits of a message-aligned capture by comparing the
/// summed magnitudes of the two halves of each bit slot.
adsb::FrameBytes demodulate(std::span<const Sample> samples,
                            double sample_rate);

}  // namespace soda::phy

#endif
