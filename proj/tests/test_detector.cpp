#include <doctest.h>

#include <memory>
#include <random>

#include "soda/adsb/frame.hpp"
#include "soda/detector/detector.hpp"
#include "soda/errors.hpp"
#include "soda/phy/modem.hpp"
#include "soda/rng.hpp"

using namespace soda;

namespace {

phy::IqCapture capture_claiming(std::uint32_t icao, Rng& rng) {
    adsb::MeBytes me;
    std::uniform_int_distribution<int> dist(0, 255);
    for (auto& b : me) b = std::uint8_t(dist(rng));
    phy::IqCapture c;
    c.samples = phy::modulate(adsb::encode_frame(5, adsb::IcaoAddress(icao), me));
    c.claimed_icao = adsb::IcaoAddress(icao);
    return c;
}

/// Dense-only model whose bias row fixes the predicted class.
nn::MlpModel biased_model(int input_dim, int n_classes, int favored) {
    nn::MlpModel model;
    model.input_dim = input_dim;
    model.output_dim = n_classes;
    auto dense = std::make_unique<nn::DenseLayer>(input_dim, n_classes);
    if (favored >= 0) dense->biases(0, favored) = 10.0;
    model.layers.push_back(std::move(dense));
    return model;
}

detector::SodaPipeline test_pipeline(int favored_aircraft_class) {
    detector::SodaPipeline pipeline;
    pipeline.message_model = biased_model(480, 2, -1);  // all-zero: prob 0.5
    pipeline.aircraft_model = biased_model(240, 3, favored_aircraft_class);
    pipeline.class_to_icao = {0x100001, 0x100002, 0x100003};
    for (std::size_t i = 0; i < pipeline.class_to_icao.size(); ++i)
        pipeline.icao_to_class[pipeline.class_to_icao[i]] = int(i);
    return pipeline;
}

}  // namespace

TEST_CASE("a zero-weight message model sits exactly at 0.5") {
    Rng rng(71);
    detector::SodaPipeline pipeline = test_pipeline(0);
    phy::IqCapture c = capture_claiming(0x100001, rng);
    CHECK(detector::classify_message(pipeline, c) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("message probability is invariant to receive gain") {
    Rng rng(72);
    detector::SodaPipeline pipeline = test_pipeline(0);
    // Give the message model some structure so the probe is nontrivial.
    auto* dense = dynamic_cast<nn::DenseLayer*>(pipeline.message_model.layers[0].get());
    REQUIRE(dense);
    Rng wrng(73);
    std::normal_distribution<double> wdist(0.0, 0.1);
    for (Eigen::Index i = 0; i < dense->weights.rows(); ++i)
        for (Eigen::Index j = 0; j < dense->weights.cols(); ++j)
            dense->weights(i, j) = wdist(wrng);

    phy::IqCapture c = capture_claiming(0x100001, rng);
    double base = detector::classify_message(pipeline, c);
    phy::IqCapture loud = c;
    for (auto& s : loud.samples) s *= 25.0;
    CHECK(detector::classify_message(pipeline, loud) ==
          doctest::Approx(base).epsilon(1e-9));
}

TEST_CASE("the message gate runs first and suppresses stage two") {
    Rng rng(74);
    detector::SodaPipeline pipeline = test_pipeline(0);
    pipeline.message_threshold = 0.5;  // 0.5 >= 0.5 flags the message
    phy::IqCapture c = capture_claiming(0xDEAD01, rng);  // unknown aircraft
    // With the gate closed the unknown ICAO must not matter.
    detector::Verdict verdict = detector::detect(pipeline, c);
    CHECK(verdict.kind == detector::VerdictKind::GroundSpoof);
    CHECK_FALSE(verdict.predicted.has_value());
    CHECK(verdict.aircraft_class_probs.empty());
}

TEST_CASE("unknown claimed icao below the gate throws") {
    Rng rng(75);
    detector::SodaPipeline pipeline = test_pipeline(0);
    pipeline.message_threshold = 0.9;
    phy::IqCapture c = capture_claiming(0xDEAD01, rng);
    CHECK_THROWS_AS(detector::detect(pipeline, c), UnknownAircraft);
}

TEST_CASE("matching prediction is authentic, mismatch is an aircraft spoof") {
    Rng rng(76);
    detector::SodaPipeline pipeline = test_pipeline(1);  // predicts 0x100002
    pipeline.message_threshold = 0.9;

    phy::IqCapture honest = capture_claiming(0x100002, rng);
    detector::Verdict ok = detector::detect(pipeline, honest);
    CHECK(ok.kind == detector::VerdictKind::Authentic);
    REQUIRE(ok.predicted.has_value());
    CHECK(*ok.predicted == adsb::IcaoAddress(0x100002));
    CHECK(ok.aircraft_class_probs.size() == 3);

    phy::IqCapture liar = capture_claiming(0x100001, rng);
    detector::Verdict bad = detector::detect(pipeline, liar);
    CHECK(bad.kind == detector::VerdictKind::AircraftSpoof);
    CHECK(*bad.predicted == adsb::IcaoAddress(0x100002));
}

TEST_CASE("aircraft classification ties break toward the lowest class") {
    Rng rng(77);
    detector::SodaPipeline pipeline = test_pipeline(-1);  // all-uniform
    phy::IqCapture c = capture_claiming(0x100003, rng);
    auto [predicted, dist] = detector::classify_aircraft(pipeline, c);
    CHECK(predicted == adsb::IcaoAddress(0x100001));
    CHECK(dist.size() == 3);
    double sum = 0;
    for (double p : dist) sum += p;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("verdict json carries the record fields") {
    detector::Verdict verdict;
    verdict.kind = detector::VerdictKind::AircraftSpoof;
    verdict.claimed = adsb::IcaoAddress(0xABCDEF);
    verdict.predicted = adsb::IcaoAddress(0x123456);
    verdict.message_malicious_prob = 0.25;
    verdict.aircraft_class_probs = {0.2, 0.8};
    verdict.timestamp_s = 1.5;
    std::string json = detector::verdict_to_json(verdict);
    CHECK(json.find("\"aircraft_spoof\"") != std::string::npos);
    CHECK(json.find("\"ABCDEF\"") != std::string::npos);
    CHECK(json.find("\"123456\"") != std::string::npos);
    CHECK(json.find("1.5") != std::string::npos);
}

TEST_CASE("pipeline load validates model roles") {
    Rng rng(78);
    auto dir = std::filesystem::temp_directory_path() / "soda_detector_test";
    std::filesystem::create_directories(dir);
    nn::ModelMeta message_meta;  // stage "message"
    nn::ModelMeta aircraft_meta;
    aircraft_meta.stage = "aircraft";
    aircraft_meta.class_icaos = {1, 2, 3};
    nn::save_model(biased_model(480, 2, -1), message_meta, dir / "msg.txt");
    nn::save_model(biased_model(240, 3, 0), aircraft_meta, dir / "air.txt");

    detector::SodaPipeline pipeline =
        detector::SodaPipeline::load(dir / "msg.txt", dir / "air.txt", 0.7);
    CHECK(pipeline.message_threshold == 0.7);
    CHECK(pipeline.class_to_icao == std::vector<std::uint32_t>{1, 2, 3});
    CHECK(pipeline.icao_to_class.at(2) == 1);

    // Swapped roles are rejected.
    CHECK_THROWS_AS(detector::SodaPipeline::load(dir / "air.txt", dir / "msg.txt"),
                    FormatError);
    std::filesystem::remove_all(dir);
}
