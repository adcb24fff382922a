#ifndef SODA_PHY_IQFILE_HPP
#define SODA_PHY_IQFILE_HPP

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "soda/phy/iq.hpp"

namespace soda::phy {

/// RTL-SDR style byte format: each complex sample is two unsigned bytes,
/// I then Q, value = round(127.5 + 127.5 * component), clamped to [0, 255].
std::vector<std::uint8_t> iq_to_bytes(std::span<const Sample> samples);

/// Inverse of iq_to_bytes via (byte - 127.5) / 127.5.
/// Throws FormatError on an odd byte count.
std::vector<Sample> iq_from_bytes(std::span<const std::uint8_t> bytes);

/// Sidecar manifest record: one line per capture in the IQ file.
struct ManifestRecord {
    std::uint64_t byte_offset = 0;
    std::uint64_t num_samples = 0;
    double sample_rate = 2e6;
    Label label = Label::A0;
    adsb::IcaoAddress claimed_icao;
    std::optional<adsb::IcaoAddress> truth_icao;
    double timestamp_s = 0;
};

/// Writes captures as one concatenated IQ byte file plus a line-delimited
/// JSON manifest.
void write_capture_set(const std::vector<IqCapture>& captures,
                       const std::filesystem::path& iq_path,
                       const std::filesystem::path& manifest_path);

/// Reads a capture set back; inverse of write_capture_set up to the one-step
/// quantization error of the byte format.
std::vector<IqCapture> read_capture_set(const std::filesystem::path& iq_path,
                                        const std::filesystem::path& manifest_path);

/// Raw stream IO for cmd_detect style inputs.
std::vector<Sample> read_iq_stream(const std::filesystem::path& iq_path);
void write_iq_stream(std::span<const Sample> samples,
                     const std::filesystem::path& iq_path);

}  // namespace soda::phy

#endif
