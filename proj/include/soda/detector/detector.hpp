#ifndef SODA_DETECTOR_DETECTOR_HPP
#define SODA_DETECTOR_DETECTOR_HPP

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "soda/nn/model.hpp"
#include "soda/phy/iq.hpp"

namespace soda::detector {

/// Two-stage pipeline: the message classifier gates the aircraft classifier.
struct SodaPipeline {
    nn::MlpModel message_model;   // 2 classes: authentic / malicious
    nn::MlpModel aircraft_model;  // one class per known aircraft
    std::vector<std::uint32_t> class_to_icao;
    std::unordered_map<std::uint32_t, int> icao_to_class;
    double message_threshold = 0.5;
    bool normalize_iq = true;

    static SodaPipeline load(const std::filesystem::path& message_model_path,
                             const std::filesystem::path& aircraft_model_path,
                             double threshold = 0.5);
};

enum class VerdictKind { Authentic, GroundSpoof, AircraftSpoof };

std::string verdict_kind_to_string(VerdictKind kind);

struct Verdict {
    VerdictKind kind = VerdictKind::Authentic;
    adsb::IcaoAddress claimed;
    std::optional<adsb::IcaoAddress> predicted;
    double message_malicious_prob = 0;
    std::vector<double> aircraft_class_probs;  // empty when stage 2 skipped
    double timestamp_s = 0;
};

/// Softmax probability of the malicious class from IQ features.
double classify_message(SodaPipeline& pipeline, const phy::IqCapture& capture);

/// Argmax aircraft class from phase features, mapped through the ICAO table.
std::pair<adsb::IcaoAddress, std::vector<double>> classify_aircraft(
    SodaPipeline& pipeline, const phy::IqCapture& capture);

/// Full two-stage decision. Stage 2 never runs when stage 1 flags the
/// message. Throws UnknownAircraft when the claimed ICAO is not in the
/// trained class table.
Verdict detect(SodaPipeline& pipeline, const phy::IqCapture& capture);

/// Line-delimited JSON record for downstream tooling.
std::string verdict_to_json(const Verdict& verdict);

}  // namespace soda::detector

#endif
