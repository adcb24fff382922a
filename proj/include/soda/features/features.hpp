#ifndef SODA_FEATURES_FEATURES_HPP
#define SODA_FEATURES_FEATURES_HPP

#include <cstdint>
#include <filesystem>
#include <vector>

#include "soda/phy/iq.hpp"

namespace soda::features {

/// Interleaved (i0, q0, i1, q1, ...) samples of one message, optionally
/// divided by the capture's max absolute component so the vector lies in
/// [-1, 1] regardless of receive gain. 480 entries at 2 MHz.
std::vector<double> extract_iq_features(const phy::IqCapture& capture,
                                        bool normalize = true);

/// Per-sample two-argument arctangent of (q, i), each in (-pi, pi]; samples
/// with zero magnitude map to phase 0. 240 entries at 2 MHz.
std::vector<double> extract_phase_features(const phy::IqCapture& capture);

/// Dense feature matrix with one row per message plus an integer label per
/// row. For the aircraft stage, class_icaos maps class index -> ICAO.
struct FeatureSet {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;          // row-major, rows * cols
    std::vector<std::int32_t> labels;  // one per row
    std::vector<std::uint32_t> class_icaos;  // empty for the message stage

    double* row(std::size_t r) { return data.data() + r * cols; }
    const double* row(std::size_t r) const { return data.data() + r * cols; }
};

/// Binary tensor file: a one-line JSON header (rows, cols, class table)
/// followed by row-major little-endian doubles and one int32 label per row.
void save_features(const FeatureSet& set, const std::filesystem::path& path);
FeatureSet load_features(const std::filesystem::path& path);

}  // namespace soda::features

#endif
