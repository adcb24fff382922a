#ifndef SODA_EVAL_EXPERIMENTS_HPP
#define SODA_EVAL_EXPERIMENTS_HPP

#include <string>
#include <vector>

#include "soda/eval/metrics.hpp"
#include "soda/nn/model.hpp"
#include "soda/phy/iq.hpp"

namespace soda::eval {

/// Feature matrices over a capture corpus.
nn::Matrix iq_feature_matrix(const std::vector<phy::IqCapture>& captures,
                             bool normalize = true);
nn::Matrix phase_feature_matrix(const std::vector<phy::IqCapture>& captures);

/// 0 = authentic (A0), 1 = any attack.
Eigen::VectorXi binary_labels(const std::vector<phy::IqCapture>& captures);

/// Class labels keyed by truth ICAO plus the sorted class -> ICAO table.
/// Captures without a truth ICAO are rejected.
std::pair<Eigen::VectorXi, std::vector<std::uint32_t>> aircraft_labels(
    const std::vector<phy::IqCapture>& captures);

struct ExperimentConfig {
    std::string preset = "d3";
    nn::TrainConfig train;
    SplitSpec split;
    bool normalize_iq = true;
};

struct AttackDiversityRow {
    std::string subset;  // e.g. "{A1,A3}"
    double pd_a1, pd_a2, pd_a3, pfa;
};

/// Trains one fresh message classifier per nonempty subset of {A1,A2,A3}
/// (identical seeds across cells) and evaluates detection per attack type
/// plus the false-alarm rate on the pooled A0 test split.
std::vector<AttackDiversityRow> run_attack_diversity(
    const std::vector<phy::IqCapture>& corpus, const ExperimentConfig& config);

struct SweepRow {
    double x;  // training ratio or aircraft count
    double accuracy;
    double avg_f;
};

/// Aircraft-classifier accuracy as a function of the training-subset ratio;
/// the test split is fixed and ratio 1.0 reproduces the baseline run.
std::vector<SweepRow> sweep_training_ratio(
    const std::vector<phy::IqCapture>& corpus, const ExperimentConfig& config,
    const std::vector<double>& ratios);

/// Aircraft-classifier accuracy as a function of the number of aircraft;
/// class subsets are a seeded prefix of a shuffled fleet, kept in sorted
/// order so the full count reproduces the baseline.
std::vector<SweepRow> sweep_num_classes(
    const std::vector<phy::IqCapture>& corpus, const ExperimentConfig& config,
    const std::vector<int>& counts);

void save_attack_diversity(const std::vector<AttackDiversityRow>& rows,
                           const std::filesystem::path& path);
void save_sweep(const std::vector<SweepRow>& rows, const std::string& x_name,
                const std::filesystem::path& path);

}  // namespace soda::eval

#endif
