#include "soda/detector/detector.hpp"

#include <json.hpp>

#include "soda/errors.hpp"
#include "soda/features/features.hpp"

namespace soda::detector {

SodaPipeline SodaPipeline::load(const std::filesystem::path& message_model_path,
                                const std::filesystem::path& aircraft_model_path,
                                double threshold) {
    auto [message_model, message_meta] = nn::load_model(message_model_path);
    auto [aircraft_model, aircraft_meta] = nn::load_model(aircraft_model_path);
    if (message_meta.stage != "message" || aircraft_meta.stage != "aircraft")
        throw FormatError("model stages do not match their pipeline roles");
    SodaPipeline pipeline;
    pipeline.message_model = std::move(message_model);
    pipeline.aircraft_model = std::move(aircraft_model);
    pipeline.class_to_icao = aircraft_meta.class_icaos;
    for (std::size_t i = 0; i < pipeline.class_to_icao.size(); ++i)
        pipeline.icao_to_class[pipeline.class_to_icao[i]] = int(i);
    pipeline.message_threshold = threshold;
    pipeline.normalize_iq = message_meta.normalize_iq;
    return pipeline;
}

std::string verdict_kind_to_string(VerdictKind kind) {
    switch (kind) {
        case VerdictKind::Authentic: return "authentic";
        case VerdictKind::GroundSpoof: return "ground_spoof";
        case VerdictKind::AircraftSpoof: return "aircraft_spoof";
    }
    return "?";
}

namespace {

nn::Matrix as_row(const std::vector<double>& values) {
    nn::Matrix m(1, Eigen::Index(values.size()));
    for (std::size_t i = 0; i < values.size(); ++i) m(0, Eigen::Index(i)) = values[i];
    return m;
}

}  // namespace

double classify_message(SodaPipeline& pipeline, const phy::IqCapture& capture) {
    std::vector<double> features =
        features::extract_iq_features(capture, pipeline.normalize_iq);
    nn::Matrix probs = pipeline.message_model.forward(as_row(features), false);
    return probs(0, 1);  // class 1 = malicious
}

std::pair<adsb::IcaoAddress, std::vector<double>> classify_aircraft(
    SodaPipeline& pipeline, const phy::IqCapture& capture) {
    std::vector<double> features = features::extract_phase_features(capture);
    nn::Matrix probs = pipeline.aircraft_model.forward(as_row(features), false);
    Eigen::Index best = 0;
    for (Eigen::Index c = 1; c < probs.cols(); ++c)
        if (probs(0, c) > probs(0, best)) best = c;
    std::vector<double> dist(probs.data(), probs.data() + probs.size());
    return {adsb::IcaoAddress(pipeline.class_to_icao.at(std::size_t(best))),
            std::move(dist)};
}

Verdict detect(SodaPipeline& pipeline, const phy::IqCapture& capture) {
    Verdict verdict;
    verdict.claimed = capture.claimed_icao;
    verdict.timestamp_s = capture.timestamp_s;
    verdict.message_malicious_prob = classify_message(pipeline, capture);
    if (verdict.message_malicious_prob >= pipeline.message_threshold) {
        verdict.kind = VerdictKind::GroundSpoof;
        return verdict;
    }
    if (!pipeline.icao_to_class.contains(capture.claimed_icao.value))
        throw UnknownAircraft("claimed ICAO " + capture.claimed_icao.to_hex() +
                              " is not in the trained class table");
    auto [predicted, dist] = classify_aircraft(pipeline, capture);
    verdict.predicted = predicted;
    verdict.aircraft_class_probs = std::move(dist);
    verdict.kind = predicted == capture.claimed_icao ? VerdictKind::Authentic
                                                     : VerdictKind::AircraftSpoof;
    return verdict;
}

std::string verdict_to_json(const Verdict& verdict) {
    nlohmann::json rec{
        {"timestamp", verdict.timestamp_s},
        {"kind", verdict_kind_to_string(verdict.kind)},
        {"claimed", verdict.claimed.to_hex()},
        {"message_malicious_prob", verdict.message_malicious_prob},
    };
    if (verdict.predicted) rec["predicted"] = verdict.predicted->to_hex();
    if (!verdict.aircraft_class_probs.empty())
        rec["aircraft_class_probs"] = verdict.aircraft_class_probs;
    return rec.dump();
}

}  // namespace soda::detector
