#include "soda/eval/experiments.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>

#include "soda/errors.hpp"
#include "soda/features/features.hpp"

namespace soda::eval {

nn::Matrix iq_feature_matrix(const std::vector<phy::IqCapture>& captures,
                             bool normalize) {
    if (captures.empty()) throw ConfigError("empty corpus");
    std::vector<double> first = features::extract_iq_features(captures[0], normalize);
    nn::Matrix x(Eigen::Index(captures.size()), Eigen::Index(first.size()));
    for (std::size_t r = 0; r < captures.size(); ++r) {
        std::vector<double> row =
            r == 0 ? first : features::extract_iq_features(captures[r], normalize);
        for (std::size_t c = 0; c < row.size(); ++c)
            x(Eigen::Index(r), Eigen::Index(c)) = row[c];
    }
    return x;
}

nn::Matrix phase_feature_matrix(const std::vector<phy::IqCapture>& captures) {
    if (captures.empty()) throw ConfigError("empty corpus");
    std::vector<double> first = features::extract_phase_features(captures[0]);
    nn::Matrix x(Eigen::Index(captures.size()), Eigen::Index(first.size()));
    for (std::size_t r = 0; r < captures.size(); ++r) {
        std::vector<double> row =
            r == 0 ? first : features::extract_phase_features(captures[r]);
        for (std::size_t c = 0; c < row.size(); ++c)
            x(Eigen::Index(r), Eigen::Index(c)) = row[c];
    }
    return x;
}

Eigen::VectorXi binary_labels(const std::vector<phy::IqCapture>& captures) {
    Eigen::VectorXi y(Eigen::Index(captures.size()));
    for (std::size_t i = 0; i < captures.size(); ++i)
        y(Eigen::Index(i)) = captures[i].label == phy::Label::A0 ? 0 : 1;
    return y;
}

std::pair<Eigen::VectorXi, std::vector<std::uint32_t>> aircraft_labels(
    const std::vector<phy::IqCapture>& captures) {
    std::set<std::uint32_t> icaos;
    for (const phy::IqCapture& c : captures) {
        if (!c.truth_icao)
            throw ConfigError("aircraft labels need a truth ICAO on every capture");
        icaos.insert(c.truth_icao->value);
    }
    std::vector<std::uint32_t> table(icaos.begin(), icaos.end());
    std::map<std::uint32_t, int> index;
    for (std::size_t i = 0; i < table.size(); ++i) index[table[i]] = int(i);
    Eigen::VectorXi y(Eigen::Index(captures.size()));
    for (std::size_t i = 0; i < captures.size(); ++i)
        y(Eigen::Index(i)) = index.at(captures[i].truth_icao->value);
    return {std::move(y), std::move(table)};
}

namespace {

nn::Matrix take_rows(const nn::Matrix& x, const std::vector<std::size_t>& rows) {
    nn::Matrix out(Eigen::Index(rows.size()), x.cols());
    for (std::size_t i = 0; i < rows.size(); ++i)
        out.row(Eigen::Index(i)) = x.row(Eigen::Index(rows[i]));
    return out;
}

Eigen::VectorXi take_labels(const Eigen::VectorXi& y,
                            const std::vector<std::size_t>& rows) {
    Eigen::VectorXi out(Eigen::Index(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        out(Eigen::Index(i)) = y(Eigen::Index(rows[i]));
    return out;
}

}  // namespace

std::vector<AttackDiversityRow> run_attack_diversity(
    const std::vector<phy::IqCapture>& corpus, const ExperimentConfig& config) {
    bool has[4] = {};
    for (const phy::IqCapture& c : corpus) has[int(c.label)] = true;
    for (int i = 0; i < 4; ++i)
        if (!has[i])
            throw ConfigError("attack-diversity corpus is missing label A" +
                              std::to_string(i));

    nn::Matrix x = iq_feature_matrix(corpus, config.normalize_iq);
    Eigen::VectorXi y = binary_labels(corpus);
    std::vector<int> strata(corpus.size());
    for (std::size_t i = 0; i < corpus.size(); ++i) strata[i] = int(corpus[i].label);
    DatasetSplit split = split_dataset(strata, config.split);

    const phy::Label attacks[3] = {phy::Label::A1, phy::Label::A2, phy::Label::A3};
    std::vector<AttackDiversityRow> rows;
    for (unsigned mask = 1; mask < 8; ++mask) {
        auto in_subset = [&](phy::Label label) {
            if (label == phy::Label::A0) return true;
            for (int a = 0; a < 3; ++a)
                if ((mask >> a) & 1u && label == attacks[a]) return true;
            return false;
        };
        std::vector<std::size_t> train_rows, val_rows;
        for (std::size_t i : split.train)
            if (in_subset(corpus[i].label)) train_rows.push_back(i);
        for (std::size_t i : split.validation)
            if (in_subset(corpus[i].label)) val_rows.push_back(i);

        Rng rng = derive_rng(config.train.seed, 0xd1ce);
        nn::MlpModel model =
            nn::build_model(nn::preset(config.preset), int(x.cols()), 2, rng);
        nn::train(model, take_rows(x, train_rows), take_labels(y, train_rows),
                  take_rows(x, val_rows), take_labels(y, val_rows), config.train);

        Eigen::VectorXi pred = model.predict(take_rows(x, split.test));
        double pd[3] = {0, 0, 0};
        std::int64_t n_attack[3] = {0, 0, 0};
        std::int64_t n_auth = 0, fa = 0;
        for (std::size_t i = 0; i < split.test.size(); ++i) {
            phy::Label label = corpus[split.test[i]].label;
            bool flagged = pred(Eigen::Index(i)) == 1;
            if (label == phy::Label::A0) {
                ++n_auth;
                if (flagged) ++fa;
            } else {
                int a = int(label) - 1;
                ++n_attack[a];
                if (flagged) pd[a] += 1.0;
            }
        }
        AttackDiversityRow row;
        std::string names[3] = {"A1", "A2", "A3"};
        row.subset = "{";
        for (int a = 0; a < 3; ++a)
            if ((mask >> a) & 1u)
                row.subset += (row.subset.size() > 1 ? "," : "") + names[a];
        row.subset += "}";
        row.pd_a1 = n_attack[0] ? pd[0] / double(n_attack[0]) : 0;
        row.pd_a2 = n_attack[1] ? pd[1] / double(n_attack[1]) : 0;
        row.pd_a3 = n_attack[2] ? pd[2] / double(n_attack[2]) : 0;
        row.pfa = n_auth ? double(fa) / double(n_auth) : 0;
        rows.push_back(std::move(row));
    }
    return rows;
}

namespace {

struct AircraftData {
    nn::Matrix x;
    Eigen::VectorXi y;
    std::vector<std::uint32_t> table;
    DatasetSplit split;
};

AircraftData prepare_aircraft(const std::vector<phy::IqCapture>& corpus,
                              const ExperimentConfig& config) {
    AircraftData data;
    data.x = phase_feature_matrix(corpus);
    std::tie(data.y, data.table) = aircraft_labels(corpus);
    std::vector<int> strata(corpus.size());
    for (std::size_t i = 0; i < corpus.size(); ++i)
        strata[i] = data.y(Eigen::Index(i));
    data.split = split_dataset(strata, config.split);
    return data;
}

SweepRow evaluate_cell(const AircraftData& data,
                       const std::vector<std::size_t>& train_rows,
                       const std::vector<std::size_t>& val_rows,
                       const std::vector<std::size_t>& test_rows,
                       const Eigen::VectorXi& y, int n_classes,
                       const ExperimentConfig& config, double x_value) {
    Rng rng = derive_rng(config.train.seed, 0x5377);
    nn::MlpModel model = nn::build_model(nn::preset(config.preset),
                                         int(data.x.cols()), n_classes, rng);
    nn::train(model, take_rows(data.x, train_rows), take_labels(y, train_rows),
              take_rows(data.x, val_rows), take_labels(y, val_rows), config.train);
    Eigen::VectorXi pred = model.predict(take_rows(data.x, test_rows));
    Eigen::VectorXi truth = take_labels(y, test_rows);
    std::vector<int> pred_v(pred.data(), pred.data() + pred.size());
    std::vector<int> truth_v(truth.data(), truth.data() + truth.size());
    PrfReport report =
        prf_scores(confusion_from_predictions(pred_v, truth_v, n_classes));
    return {x_value, report.accuracy, report.avg_f_rate};
}

}  // namespace

std::vector<SweepRow> sweep_training_ratio(
    const std::vector<phy::IqCapture>& corpus, const ExperimentConfig& config,
    const std::vector<double>& ratios) {
    AircraftData data = prepare_aircraft(corpus, config);
    int n_classes = int(data.table.size());

    // Per-class shuffled train pools; a ratio takes a prefix of each pool so
    // larger ratios are supersets of smaller ones.
    std::map<int, std::vector<std::size_t>> pools;
    for (std::size_t i : data.split.train) pools[data.y(Eigen::Index(i))].push_back(i);
    for (auto& [cls, pool] : pools) {
        Rng rng = derive_rng(config.train.seed, 0x706f6f6cu ^ std::uint64_t(cls));
        std::shuffle(pool.begin(), pool.end(), rng);
    }

    std::vector<SweepRow> rows;
    for (double ratio : ratios) {
        if (!(ratio > 0.0 && ratio <= 1.0))
            throw ConfigError("training ratio must be in (0, 1]");
        std::vector<std::size_t> train_rows;
        if (ratio == 1.0) {
            train_rows = data.split.train;  // identity subsample
        } else {
            for (const auto& [cls, pool] : pools) {
                auto count = std::size_t(std::lround(ratio * double(pool.size())));
                count = std::max<std::size_t>(1, std::min(count, pool.size()));
                train_rows.insert(train_rows.end(), pool.begin(), pool.begin() + count);
            }
            std::sort(train_rows.begin(), train_rows.end());
        }
        rows.push_back(evaluate_cell(data, train_rows, data.split.validation,
                                     data.split.test, data.y, n_classes, config,
                                     ratio));
    }
    return rows;
}

std::vector<SweepRow> sweep_num_classes(
    const std::vector<phy::IqCapture>& corpus, const ExperimentConfig& config,
    const std::vector<int>& counts) {
    AircraftData data = prepare_aircraft(corpus, config);
    int fleet = int(data.table.size());

    std::vector<int> order;
    for (int i = 0; i < fleet; ++i) order.push_back(i);
    Rng rng = derive_rng(config.train.seed, 0x636c73);
    std::shuffle(order.begin(), order.end(), rng);

    std::vector<SweepRow> rows;
    for (int count : counts) {
        if (count < 2 || count > fleet)
            throw ConfigError("aircraft count " + std::to_string(count) +
                              " exceeds the fleet of " + std::to_string(fleet));
        std::vector<int> chosen(order.begin(), order.begin() + count);
        std::sort(chosen.begin(), chosen.end());
        std::vector<int> remap(std::size_t(fleet), -1);
        for (int i = 0; i < count; ++i) remap[std::size_t(chosen[std::size_t(i)])] = i;

        Eigen::VectorXi y(data.y.size());
        for (Eigen::Index i = 0; i < data.y.size(); ++i) y(i) = remap[std::size_t(data.y(i))];
        auto filter = [&](const std::vector<std::size_t>& rows_in) {
            std::vector<std::size_t> out;
            for (std::size_t i : rows_in)
                if (y(Eigen::Index(i)) >= 0) out.push_back(i);
            return out;
        };
        rows.push_back(evaluate_cell(data, filter(data.split.train),
                                     filter(data.split.validation),
                                     filter(data.split.test), y, count, config,
                                     double(count)));
    }
    return rows;
}

void save_attack_diversity(const std::vector<AttackDiversityRow>& rows,
                           const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot open results file: " + path.string());
    out << "training_subset\tpd_a1\tpd_a2\tpd_a3\tpfa\n";
    out.precision(6);
    for (const AttackDiversityRow& r : rows)
        out << r.subset << '\t' << r.pd_a1 << '\t' << r.pd_a2 << '\t' << r.pd_a3
            << '\t' << r.pfa << '\n';
}

void save_sweep(const std::vector<SweepRow>& rows, const std::string& x_name,
                const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot open results file: " + path.string());
    out << x_name << "\taccuracy\tavg_f\n";
    out.precision(6);
    for (const SweepRow& r : rows)
        out << r.x << '\t' << r.accuracy << '\t' << r.avg_f << '\n';
}

}  // namespace soda::eval
