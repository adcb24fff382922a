#include "soda/phy/iqfile.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "soda/errors.hpp"

namespace soda::phy {

namespace {

std::uint8_t quantize(double v) {
    double q = std::round(127.5 + 127.5 * v);
    if (q < 0) q = 0;
    if (q > 255) q = 255;
    return static_cast<std::uint8_t>(q);
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open IQ file: " + path.string());
    return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in),
                                     std::istreambuf_iterator<char>());
}

}  // namespace

std::vector<std::uint8_t> iq_to_bytes(std::span<const Sample> samples) {
    std::vector<std::uint8_t> bytes;
    bytes.reserve(samples.size() * 2);
    for (const Sample& s : samples) {
        bytes.push_back(quantize(s.real()));
        bytes.push_back(quantize(s.imag()));
    }
    return bytes;
}

std::vector<Sample> iq_from_bytes(std::span<const std::uint8_t> bytes) {
    if (bytes.size() % 2 != 0)
        throw FormatError("IQ byte stream has odd length " +
                          std::to_string(bytes.size()));
    std::vector<Sample> samples;
    samples.reserve(bytes.size() / 2);
    for (std::size_t i = 0; i < bytes.size(); i += 2)
        samples.emplace_back((bytes[i] - 127.5) / 127.5,
                             (bytes[i + 1] - 127.5) / 127.5);
    return samples;
}

void write_capture_set(const std::vector<IqCapture>& captures,
                       const std::filesystem::path& iq_path,
                       const std::filesystem::path& manifest_path) {
    std::ofstream iq(iq_path, std::ios::binary);
    std::ofstream manifest(manifest_path);
    if (!iq || !manifest)
        throw FormatError("cannot open output files under " +
                          iq_path.parent_path().string());
    std::uint64_t offset = 0;
    for (const IqCapture& capture : captures) {
        std::vector<std::uint8_t> bytes = iq_to_bytes(capture.samples);
        iq.write(reinterpret_cast<const char*>(bytes.data()),
                 static_cast<std::streamsize>(bytes.size()));
        nlohmann::json rec{
            {"byte_offset", offset},
            {"num_samples", capture.samples.size()},
            {"sample_rate", capture.sample_rate},
            {"label", label_to_string(capture.label)},
            {"claimed_icao", capture.claimed_icao.to_hex()},
            {"timestamp", capture.timestamp_s},
        };
        if (capture.truth_icao) rec["truth_icao"] = capture.truth_icao->to_hex();
        manifest << rec.dump() << '\n';
        offset += bytes.size();
    }
}

std::vector<IqCapture> read_capture_set(const std::filesystem::path& iq_path,
                                        const std::filesystem::path& manifest_path) {
    std::vector<std::uint8_t> bytes = read_file_bytes(iq_path);
    std::ifstream manifest(manifest_path);
    if (!manifest)
        throw FormatError("cannot open manifest: " + manifest_path.string());

    std::vector<IqCapture> captures;
    std::string line;
    while (std::getline(manifest, line)) {
        if (line.empty()) continue;
        nlohmann::json rec;
        try {
            rec = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw FormatError(std::string("bad manifest line: ") + e.what());
        }
        std::uint64_t offset = rec.at("byte_offset").get<std::uint64_t>();
        std::uint64_t n = rec.at("num_samples").get<std::uint64_t>();
        if (offset + 2 * n > bytes.size())
            throw FormatError("manifest record points past the end of the IQ file");
        IqCapture capture;
        capture.samples = iq_from_bytes(
            std::span(bytes.data() + offset, 2 * std::size_t(n)));
        capture.sample_rate = rec.at("sample_rate").get<double>();
        capture.label = label_from_string(rec.at("label").get<std::string>());
        capture.claimed_icao =
            adsb::IcaoAddress::from_hex(rec.at("claimed_icao").get<std::string>());
        if (rec.contains("truth_icao"))
            capture.truth_icao =
                adsb::IcaoAddress::from_hex(rec.at("truth_icao").get<std::string>());
        capture.timestamp_s = rec.at("timestamp").get<double>();
        captures.push_back(std::move(capture));
    }
    return captures;
}

std::vector<Sample> read_iq_stream(const std::filesystem::path& iq_path) {
    return iq_from_bytes(read_file_bytes(iq_path));
}

void write_iq_stream(std::span<const Sample> samples,
                     const std::filesystem::path& iq_path) {
    std::ofstream iq(iq_path, std::ios::binary);
    if (!iq) throw FormatError("cannot open IQ file for writing: " + iq_path.string());
    std::vector<std::uint8_t> bytes = iq_to_bytes(samples);
    iq.write(reinterpret_cast<const char*>(bytes.data()),
             static_cast<std::streamsize>(bytes.size()));
}

}  // namespace soda::phy
