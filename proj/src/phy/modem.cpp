#include "soda/phy/modem.hpp"

#include <algorithm>
#include <cmath>

#include "soda/errors.hpp"

namespace soda::phy {

std::string label_to_string(Label label) {
    switch (label) {
        case Label::A0: return "A0";
        case Label::A1: return "A1";
        case Label::A2: return "A2";
        case Label::A3: return "A3";
    }
    throw ConfigError("invalid label value");
}

Label label_from_string(const std::string& s) {
    if (s == "A0" || s == "a0") return Label::A0;
    if (s == "A1" || s == "a1") return Label::A1;
    if (s == "A2" || s == "a2") return Label::A2;
    if (s == "A3" || s == "a3") return Label::A3;
    throw FormatError("unknown capture label '" + s + "'");
}

int samples_per_chip(double sample_rate) {
    if (sample_rate <= 0)
        throw ConfigError("sample rate must be positive");
    double ratio = sample_rate / 2e6;
    double rounded = std::round(ratio);
    if (rounded < 1.0 || std::fabs(ratio - rounded) > 1e-9)
        throw ConfigError("sample rate must be an integer multiple of 2 MHz, got " +
                          std::to_string(sample_rate));
    return static_cast<int>(rounded);
}

namespace {

inline bool frame_bit(const adsb::FrameBytes& frame, int m) {
    return (frame[m / 8] >> (7 - m % 8)) & 1u;
}

// Chip occupancy for one message: preamble pulses then PPM data chips.
void fill_chips(const adsb::FrameBytes& frame, bool (&chips)[240]) {
    std::fill(std::begin(chips), std::end(chips), false);
    for (int c : PulseTiming::kPreamblePulseChips) chips[c] = true;
    for (int m = 0; m < 112; ++m) {
        int base = PulseTiming::kPreambleChips + 2 * m;
        chips[frame_bit(frame, m) ? base : base + 1] = true;
    }
}

}  // namespace

std::vector<Sample> modulate(const adsb::FrameBytes& frame,
                             double sample_rate, double amplitude) {
    int spc = samples_per_chip(sample_rate);
    bool chips[240];
    fill_chips(frame, chips);
    std::vector<Sample> samples(240 * static_cast<std::size_t>(spc));
    for (int c = 0; c < 240; ++c)
        if (chips[c])
            for (int k = 0; k < spc; ++k)
                samples[c * spc + k] = Sample(amplitude, 0.0);
    return samples;
}

std::vector<std::size_t> detect_preamble(std::span<const Sample> stream,
                                         double sample_rate,
                                         const PreambleDetectorConfig& config) {
    int spc = samples_per_chip(sample_rate);
    std::size_t preamble_len = PulseTiming::kPreambleChips * std::size_t(spc);
    std::size_t message_len = PulseTiming::kMessageChips * std::size_t(spc);
    if (stream.size() < preamble_len) return {};

    std::vector<double> mag(stream.size());
    for (std::size_t i = 0; i < stream.size(); ++i) mag[i] = std::abs(stream[i]);

    bool pulse_chip[PulseTiming::kPreambleChips] = {};
    for (int c : PulseTiming::kPreamblePulseChips) pulse_chip[c] = true;

    double margin = std::pow(10.0, config.margin_db / 10.0);
    struct Candidate {
        std::size_t index;
        double score;
    };
    std::vector<Candidate> candidates;
    for (std::size_t i = 0; i + preamble_len <= stream.size(); ++i) {
        double pulse_sum = 0, off_sum = 0;
        for (int c = 0; c < PulseTiming::kPreambleChips; ++c) {
            double s = 0;
            for (int k = 0; k < spc; ++k) s += mag[i + c * spc + k];
            (pulse_chip[c] ? pulse_sum : off_sum) += s;
        }
        double pulse_mean = pulse_sum / (4.0 * spc);
        double off_mean = off_sum / (12.0 * spc);
        if (pulse_mean < config.threshold) continue;
        if (pulse_mean < margin * off_mean) continue;
        candidates.push_back({i, pulse_mean - off_mean});
    }

    // Non-maximum suppression within one message length.
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const Candidate& a, const Candidate& b) {
                         return a.score > b.score;
                     });
    std::vector<std::size_t> starts;
    for (const Candidate& c : candidates) {
        bool suppressed = false;
        for (std::size_t s : starts) {
            std::size_t d = c.index > s ? c.index - s : s - c.index;
            if (d < message_len) {
                suppressed = true;
                break;
            }
        }
        if (!suppressed) starts.push_back(c.index);
    }
    std::sort(starts.begin(), starts.end());
    return starts;
}

adsb::FrameBytes demodulate(std::span<const Sample> samples,
                            double sample_rate) {
    int spc = samples_per_chip(sample_rate);
    std::size_t needed = PulseTiming::kMessageChips * std::size_t(spc);
    if (samples.size() < needed)
        throw ShapeError("capture too short for one message: " +
                         std::to_string(samples.size()) + " < " +
                         std::to_string(needed) + " samples");
    adsb::FrameBytes frame{};
    for (int m = 0; m < 112; ++m) {
        std::size_t first = (PulseTiming::kPreambleChips + 2 * m) * std::size_t(spc);
        double e_first = 0, e_second = 0;
        for (int k = 0; k < spc; ++k) {
            e_first += std::abs(samples[first + k]);
            e_second += std::abs(samples[first + spc + k]);
        }
        if (e_first > e_second) frame[m / 8] |= std::uint8_t(1u << (7 - m % 8));
    }
    return frame;
}

}  // namespace soda::phy
