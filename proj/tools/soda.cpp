// soda: synthesize ADS-B IQ corpora, train the two-stage detector, and run it.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "soda/adsb/frame.hpp"
#include "soda/detector/detector.hpp"
#include "soda/errors.hpp"
#include "soda/eval/experiments.hpp"
#include "soda/eval/metrics.hpp"
#include "soda/features/features.hpp"
#include "soda/impair/synth.hpp"
#include "soda/nn/model.hpp"
#include "soda/phy/iqfile.hpp"
#include "soda/phy/modem.hpp"

namespace fs = std::filesystem;
using namespace soda;

namespace {

void write_resolved_config(CLI::App& cmd, const fs::path& out_dir) {
    fs::create_directories(out_dir);
    std::ofstream out(out_dir / (cmd.get_name() + "_config.ini"));
    out << cmd.config_to_str(true, true);
}

std::set<phy::Label> parse_attacks(const std::string& csv) {
    std::set<phy::Label> labels;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::string up;
        for (char c : item)
            if (!std::isspace(static_cast<unsigned char>(c)))
                up += char(std::toupper(static_cast<unsigned char>(c)));
        if (up.empty()) continue;
        labels.insert(phy::label_from_string(up));
    }
    if (labels.empty()) throw ConfigError("empty --attacks list");
    return labels;
}

impair::DopplerCase parse_doppler_case(const std::string& s) {
    std::string lo;
    for (char c : s) lo += char(std::tolower(static_cast<unsigned char>(c)));
    if (lo == "i") return impair::DopplerCase::I;
    if (lo == "ii") return impair::DopplerCase::II;
    if (lo == "iii") return impair::DopplerCase::III;
    if (lo == "iv") return impair::DopplerCase::IV;
    if (lo == "v") return impair::DopplerCase::V;
    throw ConfigError("unknown doppler case: " + s + " (expected i..v)");
}

// ---------------------------------------------------------------- synth ----

struct SynthOptions {
    std::uint64_t seed = 0;
    double sample_rate = 2e6;
    int fleet = 20;
    double duration = 60;
    std::string attacks = "a0,a1,a2,a3";
    std::string doppler_case = "i";
    double snr_db = 20;
    int ghosts = 5;
    int replay_frames = 200;
    int replay_captures = 200;
    bool worst_case = false;
    std::string out_dir;
};

int cmd_synth(const SynthOptions& opt) {
    std::set<phy::Label> wanted = parse_attacks(opt.attacks);
    impair::ChannelParams channel;
    channel.snr_db = opt.snr_db;

    impair::SpooferProfile spoofer;
    impair::DopplerCase dcase = parse_doppler_case(opt.doppler_case);
    spoofer.doppler_mode = impair::doppler_mode_for(dcase);
    spoofer.cfo_mode = impair::cfo_mode_for(dcase);

    Rng fleet_rng = derive_rng(opt.seed, 1);
    std::vector<impair::FleetAircraft> fleet =
        impair::make_fleet(opt.fleet, channel, fleet_rng);

    Rng auth_rng = derive_rng(opt.seed, 2);
    std::vector<phy::IqCapture> authentic = impair::synth_authentic(
        fleet, opt.duration, channel, auth_rng, opt.sample_rate);

    std::vector<phy::IqCapture> corpus;
    if (wanted.count(phy::Label::A0))
        corpus.insert(corpus.end(), authentic.begin(), authentic.end());

    if (wanted.count(phy::Label::A1)) {
        // Recover the frames the way a spoofer would: demodulate and decode
        // the overheard captures, skipping any the channel corrupted.
        std::vector<adsb::AdsbFrame> frames;
        for (const phy::IqCapture& capture : authentic) {
            if (int(frames.size()) >= opt.replay_frames) break;
            try {
                frames.push_back(adsb::decode_frame(
                    phy::demodulate(capture.samples, capture.sample_rate)));
            } catch (const Error&) {
            }
        }
        Rng rng = derive_rng(opt.seed, 3);
        std::vector<phy::IqCapture> a1 = impair::synth_message_replay(
            frames, spoofer, channel, rng, opt.sample_rate);
        corpus.insert(corpus.end(), a1.begin(), a1.end());
    }

    if (wanted.count(phy::Label::A2)) {
        std::vector<phy::IqCapture> sources(
            authentic.begin(),
            authentic.begin() +
                std::min<std::size_t>(authentic.size(),
                                      std::size_t(opt.replay_captures)));
        Rng rng = derive_rng(opt.seed, 4);
        std::vector<phy::IqCapture> a2 = impair::synth_iq_replay(
            sources, spoofer, channel, rng, opt.worst_case);
        corpus.insert(corpus.end(), a2.begin(), a2.end());
    }

    if (wanted.count(phy::Label::A3)) {
        Rng rng = derive_rng(opt.seed, 5);
        std::vector<phy::IqCapture> a3 = impair::synth_ghost_injection(
            opt.ghosts, opt.duration, spoofer, channel, rng, opt.sample_rate);
        corpus.insert(corpus.end(), a3.begin(), a3.end());
    }

    fs::path dir(opt.out_dir);
    fs::create_directories(dir);
    phy::write_capture_set(corpus, dir / "corpus.iq", dir / "corpus.jsonl");
    std::cout << "wrote " << corpus.size() << " captures to " << dir.string()
              << "\n";
    return 0;
}

// ------------------------------------------------------------- features ----

struct FeatureOptions {
    std::string iq_path, manifest_path, out_path;
    std::string stage = "message";
    bool no_normalize = false;
};

int cmd_features(const FeatureOptions& opt) {
    std::vector<phy::IqCapture> corpus =
        phy::read_capture_set(opt.iq_path, opt.manifest_path);

    features::FeatureSet set;
    if (opt.stage == "message") {
        for (const phy::IqCapture& capture : corpus) {
            std::vector<double> row =
                features::extract_iq_features(capture, !opt.no_normalize);
            set.cols = row.size();
            set.data.insert(set.data.end(), row.begin(), row.end());
            set.labels.push_back(capture.label == phy::Label::A0 ? 0 : 1);
            ++set.rows;
        }
    } else if (opt.stage == "aircraft") {
        // Fingerprint training uses the authentic captures only; their truth
        // ICAO is the class label.
        std::vector<phy::IqCapture> authentic;
        for (const phy::IqCapture& capture : corpus)
            if (capture.label == phy::Label::A0) authentic.push_back(capture);
        auto [y, table] = eval::aircraft_labels(authentic);
        set.class_icaos = table;
        for (std::size_t i = 0; i < authentic.size(); ++i) {
            std::vector<double> row =
                features::extract_phase_features(authentic[i]);
            set.cols = row.size();
            set.data.insert(set.data.end(), row.begin(), row.end());
            set.labels.push_back(y(Eigen::Index(i)));
            ++set.rows;
        }
    } else {
        throw ConfigError("unknown stage: " + opt.stage);
    }
    if (set.rows == 0) throw ConfigError("no captures for stage " + opt.stage);
    features::save_features(set, opt.out_path);
    std::cout << "wrote " << set.rows << " x " << set.cols << " features to "
              << opt.out_path << "\n";
    return 0;
}

// ---------------------------------------------------------------- train ----

nn::Matrix matrix_rows(const features::FeatureSet& set,
                       const std::vector<std::size_t>& rows) {
    nn::Matrix x(Eigen::Index(rows.size()), Eigen::Index(set.cols));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t c = 0; c < set.cols; ++c)
            x(Eigen::Index(i), Eigen::Index(c)) = set.row(rows[i])[c];
    return x;
}

Eigen::VectorXi label_rows(const features::FeatureSet& set,
                           const std::vector<std::size_t>& rows) {
    Eigen::VectorXi y(Eigen::Index(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        y(Eigen::Index(i)) = set.labels[rows[i]];
    return y;
}

int n_classes_of(const features::FeatureSet& set) {
    int k = 0;
    for (std::int32_t label : set.labels) k = std::max(k, int(label) + 1);
    return std::max(k, 2);
}

struct TrainOptions {
    std::string features_path, out_dir;
    std::string preset = "d3";
    std::string stage = "message";
    std::uint64_t seed = 0;
    int epochs = -1;  // -1: preset default
    int batch_size = 32;
    double learning_rate = 1e-3;
    double l2 = 1e-4;
};

int cmd_train(const TrainOptions& opt) {
    features::FeatureSet set = features::load_features(opt.features_path);
    bool aircraft_features = !set.class_icaos.empty();
    if ((opt.stage == "aircraft") != aircraft_features)
        throw ConfigError("feature file stage does not match --stage " +
                          opt.stage);

    nn::ModelSpec spec = nn::preset(opt.preset);
    nn::TrainConfig config;
    config.epochs = opt.epochs > 0 ? opt.epochs : spec.default_epochs;
    config.batch_size = opt.batch_size;
    config.learning_rate = opt.learning_rate;
    config.l2_coefficient = opt.l2;
    config.seed = opt.seed;

    int n_classes = opt.stage == "message" ? 2 : int(set.class_icaos.size());
    if (n_classes_of(set) > n_classes)
        throw ConfigError("labels exceed the class count");

    std::vector<int> strata(set.labels.begin(), set.labels.end());
    eval::SplitSpec split_spec;
    split_spec.seed = opt.seed;
    eval::DatasetSplit split = eval::split_dataset(strata, split_spec);

    Rng rng = derive_rng(opt.seed, 6);
    nn::MlpModel model =
        nn::build_model(spec, int(set.cols), n_classes, rng);
    nn::TrainHistory history = nn::train(
        model, matrix_rows(set, split.train), label_rows(set, split.train),
        matrix_rows(set, split.validation), label_rows(set, split.validation),
        config);

    nn::ModelMeta meta;
    meta.stage = opt.stage;
    meta.class_icaos = set.class_icaos;

    fs::path dir(opt.out_dir);
    fs::create_directories(dir);
    nn::save_model(model, meta, dir / "model.txt");
    nn::save_history(history, dir / "history.tsv");
    std::cout << "best validation accuracy " << history.best_val_accuracy
              << " at epoch " << history.best_epoch << "\n";
    return 0;
}

// ----------------------------------------------------------------- eval ----

struct EvalOptions {
    std::string features_path, model_path, out_dir;
    std::string experiment = "none";
    std::string iq_path, manifest_path;
    std::string preset = "d3";
    std::uint64_t seed = 0;
    int epochs = 50;
};

int eval_model(const EvalOptions& opt) {
    features::FeatureSet set = features::load_features(opt.features_path);
    auto [model, meta] = nn::load_model(opt.model_path);

    std::vector<int> strata(set.labels.begin(), set.labels.end());
    eval::SplitSpec split_spec;
    split_spec.seed = opt.seed;
    eval::DatasetSplit split = eval::split_dataset(strata, split_spec);

    Eigen::VectorXi pred = model.predict(matrix_rows(set, split.test));
    Eigen::VectorXi truth = label_rows(set, split.test);
    std::vector<int> p(pred.data(), pred.data() + pred.size());
    std::vector<int> t(truth.data(), truth.data() + truth.size());

    fs::path dir(opt.out_dir);
    fs::create_directories(dir);
    std::ofstream out(dir / "metrics.tsv");
    out.precision(10);

    int k = meta.stage == "message" ? 2 : int(meta.class_icaos.size());
    eval::ConfusionMatrix confusion =
        eval::confusion_from_predictions(p, t, k);
    eval::PrfReport report = eval::prf_scores(confusion);
    eval::save_confusion_grid(confusion, dir / "confusion.tsv");

    if (meta.stage == "message") {
        auto [pd, pfa] = eval::pd_pfa(p, t);
        out << "p_d\t" << pd << "\np_fa\t" << pfa << "\n";
        std::cout << "P_d " << pd << "  P_fa " << pfa << "\n";
    }
    out << "accuracy\t" << report.accuracy << "\n"
        << "avg_precision_rate\t" << report.avg_precision_rate << "\n"
        << "avg_recall_rate\t" << report.avg_recall_rate << "\n"
        << "avg_f_rate\t" << report.avg_f_rate << "\n"
        << "avg_precision_count\t" << report.avg_precision_count << "\n"
        << "avg_recall_count\t" << report.avg_recall_count << "\n"
        << "avg_f_count\t" << report.avg_f_count << "\n"
        << "undefined_classes\t" << report.undefined_classes << "\n";
    std::cout << "accuracy " << report.accuracy << "  AvgF(rate) "
              << report.avg_f_rate << "\n";
    return 0;
}

int cmd_eval(const EvalOptions& opt) {
    if (opt.experiment == "none") return eval_model(opt);

    std::vector<phy::IqCapture> corpus =
        phy::read_capture_set(opt.iq_path, opt.manifest_path);
    eval::ExperimentConfig config;
    config.preset = opt.preset;
    config.train.seed = opt.seed;
    config.train.epochs = opt.epochs;
    config.split.seed = opt.seed;

    fs::path dir(opt.out_dir);
    fs::create_directories(dir);
    if (opt.experiment == "attack-diversity") {
        auto rows = eval::run_attack_diversity(corpus, config);
        eval::save_attack_diversity(rows, dir / "attack_diversity.tsv");
        std::cout << rows.size() << " subset rows written\n";
    } else if (opt.experiment == "ratio-sweep") {
        std::vector<double> ratios;
        for (int i = 2; i <= 10; ++i) ratios.push_back(i / 10.0);
        auto rows = eval::sweep_training_ratio(corpus, config, ratios);
        eval::save_sweep(rows, "ratio", dir / "ratio_sweep.tsv");
        std::cout << rows.size() << " ratio rows written\n";
    } else if (opt.experiment == "class-sweep") {
        auto [y, table] = eval::aircraft_labels(
            [&] {
                std::vector<phy::IqCapture> authentic;
                for (const phy::IqCapture& c : corpus)
                    if (c.label == phy::Label::A0) authentic.push_back(c);
                return authentic;
            }());
        (void)y;
        std::vector<int> counts;
        for (int k = 2; k <= int(table.size()); k += 3) counts.push_back(k);
        if (counts.back() != int(table.size()))
            counts.push_back(int(table.size()));
        std::vector<phy::IqCapture> authentic;
        for (const phy::IqCapture& c : corpus)
            if (c.label == phy::Label::A0) authentic.push_back(c);
        auto rows = eval::sweep_num_classes(authentic, config, counts);
        eval::save_sweep(rows, "classes", dir / "class_sweep.tsv");
        std::cout << rows.size() << " class rows written\n";
    } else {
        throw ConfigError("unknown experiment: " + opt.experiment);
    }
    return 0;
}

// --------------------------------------------------------------- detect ----

struct DetectOptions {
    std::string iq_path, message_model, aircraft_model, out_path;
    double threshold = 0.5;
    double sample_rate = 2e6;
};

int cmd_detect(const DetectOptions& opt) {
    detector::SodaPipeline pipeline = detector::SodaPipeline::load(
        opt.message_model, opt.aircraft_model, opt.threshold);
    std::vector<phy::Sample> stream = phy::read_iq_stream(opt.iq_path);
    std::vector<std::size_t> starts =
        phy::detect_preamble(stream, opt.sample_rate);
    if (starts.empty())
        std::cerr << "warning: no preambles detected in " << opt.iq_path
                  << "\n";

    std::ofstream file_out;
    bool to_stdout = opt.out_path.empty() || opt.out_path == "-";
    if (!to_stdout) file_out.open(opt.out_path);
    std::ostream& out = to_stdout ? std::cout : file_out;

    std::size_t message_len = std::size_t(phy::PulseTiming::kMessageChips) *
                              std::size_t(phy::samples_per_chip(opt.sample_rate));
    for (std::size_t start : starts) {
        if (start + message_len > stream.size()) continue;
        phy::IqCapture capture;
        capture.sample_rate = opt.sample_rate;
        capture.samples.assign(stream.begin() + long(start),
                               stream.begin() + long(start + message_len));
        capture.timestamp_s = double(start) / opt.sample_rate;
        try {
            adsb::AdsbFrame frame = adsb::decode_frame(
                phy::demodulate(capture.samples, opt.sample_rate));
            capture.claimed_icao = frame.icao;
        } catch (const Error& e) {
            std::cerr << "warning: undecodable message at sample " << start
                      << ": " << e.what() << "\n";
            continue;
        }
        try {
            detector::Verdict verdict = detector::detect(pipeline, capture);
            out << detector::verdict_to_json(verdict) << "\n";
        } catch (const UnknownAircraft& e) {
            out << "{\"verdict\":\"unknown_aircraft\",\"claimed\":\""
                << capture.claimed_icao.to_hex() << "\"}\n";
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"SODA: spoofing detection for ADS-B from raw IQ captures"};
    app.require_subcommand(1);
    app.set_config("--config");
    app.option_defaults()->always_capture_default();

    SynthOptions synth;
    CLI::App* s = app.add_subcommand("synth", "Synthesize an IQ corpus");
    s->add_option("--seed", synth.seed);
    s->add_option("--sample-rate", synth.sample_rate);
    s->add_option("--fleet", synth.fleet);
    s->add_option("--duration", synth.duration, "Scenario length in seconds");
    s->add_option("--attacks", synth.attacks, "Labels to emit, e.g. a0,a1,a3");
    s->add_option("--doppler-case", synth.doppler_case, "i..v");
    s->add_option("--snr", synth.snr_db);
    s->add_option("--ghosts", synth.ghosts);
    s->add_option("--replay-frames", synth.replay_frames);
    s->add_option("--replay-captures", synth.replay_captures);
    s->add_flag("--worst-case", synth.worst_case, "Untouched IQ replay");
    s->add_option("--out-dir", synth.out_dir)->required();

    FeatureOptions feat;
    CLI::App* f = app.add_subcommand("features", "Extract feature tensors");
    f->add_option("--iq", feat.iq_path)->required();
    f->add_option("--manifest", feat.manifest_path)->required();
    f->add_option("--stage", feat.stage, "message|aircraft");
    f->add_flag("--no-normalize", feat.no_normalize);
    f->add_option("--out", feat.out_path)->required();

    TrainOptions train;
    CLI::App* t = app.add_subcommand("train", "Train a classifier");
    t->add_option("--features", train.features_path)->required();
    t->add_option("--preset", train.preset, "d1/d2/d3/m1..m5");
    t->add_option("--stage", train.stage, "message|aircraft");
    t->add_option("--seed", train.seed);
    t->add_option("--epochs", train.epochs);
    t->add_option("--batch-size", train.batch_size);
    t->add_option("--learning-rate", train.learning_rate);
    t->add_option("--l2", train.l2);
    t->add_option("--out-dir", train.out_dir)->required();

    EvalOptions ev;
    CLI::App* e = app.add_subcommand("eval", "Evaluate a model or run sweeps");
    e->add_option("--features", ev.features_path);
    e->add_option("--model", ev.model_path);
    e->add_option("--experiment", ev.experiment,
                  "none|attack-diversity|ratio-sweep|class-sweep");
    e->add_option("--iq", ev.iq_path);
    e->add_option("--manifest", ev.manifest_path);
    e->add_option("--preset", ev.preset);
    e->add_option("--seed", ev.seed);
    e->add_option("--epochs", ev.epochs);
    e->add_option("--out-dir", ev.out_dir)->required();

    DetectOptions det;
    CLI::App* d = app.add_subcommand("detect", "Run detection on raw IQ");
    d->add_option("--iq", det.iq_path)->required();
    d->add_option("--message-model", det.message_model)->required();
    d->add_option("--aircraft-model", det.aircraft_model)->required();
    d->add_option("--threshold", det.threshold);
    d->add_option("--sample-rate", det.sample_rate);
    d->add_option("--out", det.out_path, "Verdict JSONL path, '-' for stdout");

    CLI11_PARSE(app, argc, argv);

    try {
        if (s->parsed()) {
            int rc = cmd_synth(synth);
            write_resolved_config(*s, synth.out_dir);
            return rc;
        }
        if (f->parsed()) return cmd_features(feat);
        if (t->parsed()) {
            int rc = cmd_train(train);
            write_resolved_config(*t, train.out_dir);
            return rc;
        }
        if (e->parsed()) {
            int rc = cmd_eval(ev);
            write_resolved_config(*e, ev.out_dir);
            return rc;
        }
        if (d->parsed()) return cmd_detect(det);
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 1;
    }
    return 0;
}
