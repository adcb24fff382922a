#ifndef SODA_PHY_IQ_HPP
#define SODA_PHY_IQ_HPP

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "soda/adsb/frame.hpp"

namespace soda::phy {

using Sample = std::complex<double>;

/// Ground-truth label of a capture (authentic or one of the attack types).
enum class Label { A0, A1, A2, A3 };

std::string label_to_string(Label label);
Label label_from_string(const std::string& s);

/// One message worth of complex baseband samples plus metadata.
struct IqCapture {
    std::vector<Sample> samples;
    double sample_rate = 2e6;  // Hz
    Label label = Label::A0;
    adsb::IcaoAddress claimed_icao;
    std::optional<adsb::IcaoAddress> truth_icao;  // actual source, if known
    double timestamp_s = 0;
};

}  // namespace soda::phy

#endif
