#include "soda/features/features.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "soda/errors.hpp"
#include "soda/phy/modem.hpp"

namespace soda::features {

namespace {

void check_geometry(const phy::IqCapture& capture) {
    std::size_t expected =
        phy::PulseTiming::kMessageChips *
        std::size_t(phy::samples_per_chip(capture.sample_rate));
    if (capture.samples.size() != expected)
        throw ShapeError("capture has " + std::to_string(capture.samples.size()) +
                         " samples, expected " + std::to_string(expected) +
                         " for one message at this sample rate");
}

}  // namespace

std::vector<double> extract_iq_features(const phy::IqCapture& capture,
                                        bool normalize) {
    check_geometry(capture);
    double peak = 0;
    for (const phy::Sample& s : capture.samples)
        peak = std::max({peak, std::fabs(s.real()), std::fabs(s.imag())});
    if (normalize && peak == 0.0)
        throw DegenerateSignal("all-zero capture cannot be normalized");
    double scale = normalize ? 1.0 / peak : 1.0;
    std::vector<double> values;
    values.reserve(capture.samples.size() * 2);
    for (const phy::Sample& s : capture.samples) {
        values.push_back(s.real() * scale);
        values.push_back(s.imag() * scale);
    }
    return values;
}

std::vector<double> extract_phase_features(const phy::IqCapture& capture) {
    check_geometry(capture);
    std::vector<double> values;
    values.reserve(capture.samples.size());
    for (const phy::Sample& s : capture.samples)
        values.push_back((s.real() == 0.0 && s.imag() == 0.0)
                             ? 0.0
                             : std::atan2(s.imag(), s.real()));
    return values;
}

void save_features(const FeatureSet& set, const std::filesystem::path& path) {
    if (set.data.size() != set.rows * set.cols || set.labels.size() != set.rows)
        throw ShapeError("feature set fields are inconsistent");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot open feature file for writing: " + path.string());
    nlohmann::json header{{"magic", "soda-features"},
                          {"version", 1},
                          {"rows", set.rows},
                          {"cols", set.cols},
                          {"class_icaos", set.class_icaos}};
    out << header.dump() << '\n';
    out.write(reinterpret_cast<const char*>(set.data.data()),
              std::streamsize(set.data.size() * sizeof(double)));
    out.write(reinterpret_cast<const char*>(set.labels.data()),
              std::streamsize(set.labels.size() * sizeof(std::int32_t)));
}

FeatureSet load_features(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open feature file: " + path.string());
    std::string header_line;
    if (!std::getline(in, header_line))
        throw FormatError("feature file is missing its header line");
    nlohmann::json header;
    try {
        header = nlohmann::json::parse(header_line);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("bad feature file header: ") + e.what());
    }
    if (header.value("magic", "") != "soda-features")
        throw FormatError("not a feature file: " + path.string());
    FeatureSet set;
    set.rows = header.at("rows").get<std::size_t>();
    set.cols = header.at("cols").get<std::size_t>();
    set.class_icaos = header.value("class_icaos", std::vector<std::uint32_t>{});
    set.data.resize(set.rows * set.cols);
    set.labels.resize(set.rows);
    in.read(reinterpret_cast<char*>(set.data.data()),
            std::streamsize(set.data.size() * sizeof(double)));
    in.read(reinterpret_cast<char*>(set.labels.data()),
            std::streamsize(set.labels.size() * sizeof(std::int32_t)));
    if (!in) throw FormatError("feature file truncated: " + path.string());
    return set;
}

}  // namespace soda::features
