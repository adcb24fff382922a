#include "soda/impair/impair.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "soda/errors.hpp"

namespace soda::impair {

phy::IqCapture apply_frequency_offset(phy::IqCapture capture, double delta_f_hz,
                                      double delta_phi_rad) {
    double ts = 1.0 / capture.sample_rate;
    double step = 2.0 * std::numbers::pi * delta_f_hz * ts;
    for (std::size_t k = 0; k < capture.samples.size(); ++k) {
        double phase = step * double(k) + delta_phi_rad;
        capture.samples[k] *= phy::Sample(std::cos(phase), std::sin(phase));
    }
    return capture;
}

double doppler_alpha(double closing_speed_mps) {
    return kSpeedOfLight / (kSpeedOfLight - closing_speed_mps) - 1.0;
}

double doppler_shift(double carrier_hz, double closing_speed_mps) {
    return doppler_alpha(closing_speed_mps) * carrier_hz;
}

phy::IqCapture apply_doppler_exact(phy::IqCapture capture, double alpha) {
    if (alpha == 0.0) return capture;
    const std::vector<phy::Sample>& in = capture.samples;
    if (in.empty()) return capture;
    // Time-scaling of the passband signal maps to the complex baseband as a
    // time-scaled envelope times the carrier-induced rotation exp(j2*pi*
    // alpha*f_c*t); the envelope is resampled by linear interpolation.
    std::vector<phy::Sample> out;
    out.reserve(in.size() + 1);
    double gain = 1.0 + alpha;
    double step = 2.0 * std::numbers::pi * alpha * kCarrierHz / capture.sample_rate;
    for (std::size_t k = 0;; ++k) {
        double t = gain * double(k);
        auto idx = static_cast<std::size_t>(t);
        phy::Sample envelope;
        if (idx + 1 >= in.size()) {
            if (t > double(in.size() - 1) + 1e-12) break;
            envelope = in.back();
        } else {
            double frac = t - double(idx);
            envelope = (1.0 - frac) * in[idx] + frac * in[idx + 1];
        }
        double phase = step * double(k);
        out.push_back(gain * envelope *
                      phy::Sample(std::cos(phase), std::sin(phase)));
    }
    capture.samples = std::move(out);
    return capture;
}

phy::IqCapture apply_awgn(phy::IqCapture capture, double snr_db, Rng& rng) {
    if (std::isinf(snr_db) && snr_db > 0) return capture;
    double power = 0;
    for (const phy::Sample& s : capture.samples) power += std::norm(s);
    if (capture.samples.empty() || power == 0.0)
        throw DegenerateSignal("cannot set an SNR on a zero-power capture");
    power /= double(capture.samples.size());
    double noise_power = power / std::pow(10.0, snr_db / 10.0);
    std::normal_distribution<double> noise(0.0, std::sqrt(noise_power / 2.0));
    for (phy::Sample& s : capture.samples)
        s += phy::Sample(noise(rng), noise(rng));
    return capture;
}

}  // namespace soda::impair
