#ifndef SODA_IMPAIR_IMPAIR_HPP
#define SODA_IMPAIR_IMPAIR_HPP

#include "soda/phy/iq.hpp"
#include "soda/rng.hpp"

namespace soda::impair {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s
inline constexpr double kCarrierHz = 1090e6;

/// Rotates sample k by exp(j(2*pi*delta_f*k*Ts + delta_phi)).
/// Magnitudes are preserved exactly.
phy::IqCapture apply_frequency_offset(phy::IqCapture capture, double delta_f_hz,
                                      double delta_phi_rad = 0.0);

/// Doppler scale factor for a transmitter closing on a static receiver at
/// the given radial speed (positive = approaching).
double doppler_alpha(double closing_speed_mps);

/// Frequency shift seen at the given carrier: alpha * carrier.
double doppler_shift(double carrier_hz, double closing_speed_mps);

/// Time-scaling Doppler model: the passband effect s'(t) = (1+alpha) *
/// s((1+alpha) t) expressed at complex baseband, i.e. a linearly
/// interpolated time-scaled envelope rotated by the carrier term
/// exp(j 2 pi alpha f_c t). Output length differs from the input by at
/// most one sample for aviation-scale |alpha|.
phy::IqCapture apply_doppler_exact(phy::IqCapture capture, double alpha);

/// Adds white Gaussian noise scaled to the measured mean signal power.
/// An infinite snr_db is the no-noise identity. Throws DegenerateSignal on
/// an all-zero input.
phy::IqCapture apply_awgn(phy::IqCapture capture, double snr_db, Rng& rng);

}  // namespace soda::impair

#endif
