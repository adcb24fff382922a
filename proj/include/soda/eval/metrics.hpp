#ifndef SODA_EVAL_METRICS_HPP
#define SODA_EVAL_METRICS_HPP

#include <cstdint>
#include <filesystem>
#include <vector>

#include "soda/rng.hpp"

namespace soda::eval {

/// 60/20/20 stratified split parameters.
struct SplitSpec {
    double train = 0.60;
    double validation = 0.20;
    double test = 0.20;
    std::uint64_t seed = 0;
};

struct DatasetSplit {
    std::vector<std::size_t> train;
    std::vector<std::size_t> validation;
    std::vector<std::size_t> test;
};

/// Deterministic stratified partition of indices 0..strata.size()-1; each
/// stratum's proportions are preserved within rounding. Throws ConfigError
/// when fractions do not sum to 1 or a stratum has fewer than 5 members.
DatasetSplit split_dataset(const std::vector<int>& strata, const SplitSpec& spec);

/// Detection and false-alarm probabilities for binary labels
/// (1 = malicious). Throws UndefinedMetric when either class is absent.
std::pair<double, double> pd_pfa(const std::vector<int>& predictions,
                                 const std::vector<int>& labels);

/// k x k confusion counts, row = true class, column = predicted class.
struct ConfusionMatrix {
    explicit ConfusionMatrix(int k);
    void add(int true_class, int predicted_class);
    std::int64_t at(int true_class, int predicted_class) const;
    std::int64_t row_total(int true_class) const;
    std::int64_t col_total(int predicted_class) const;
    std::int64_t total() const;
    int classes() const { return k_; }

private:
    int k_;
    std::vector<std::int64_t> counts_;
};

ConfusionMatrix confusion_from_predictions(const std::vector<int>& predictions,
                                           const std::vector<int>& labels,
                                           int n_classes);

struct ClassScores {
    double tpr = 0, fpr = 0, fnr = 0;
    // Rate-based scores (precision built from TPR and FPR rates).
    double precision_rate = 0, recall_rate = 0, f_rate = 0;
    // Standard count-based scores, reported alongside.
    double precision_count = 0, recall_count = 0, f_count = 0;
    bool defined = true;  // false when the class has no test samples
};

struct PrfReport {
    std::vector<ClassScores> per_class;
    double avg_precision_rate = 0, avg_recall_rate = 0, avg_f_rate = 0;
    double avg_precision_count = 0, avg_recall_count = 0, avg_f_count = 0;
    double accuracy = 0;
    int undefined_classes = 0;  // excluded from the macro averages
};

/// Per-class precision/recall/F plus macro averages and accuracy. Both the
/// rate-based formulas and the standard count-based ones are reported.
PrfReport prf_scores(const ConfusionMatrix& confusion);

/// Dense numeric grid of row-normalized confusion rates, for plotting.
void save_confusion_grid(const ConfusionMatrix& confusion,
                         const std::filesystem::path& path);

}  // namespace soda::eval

#endif
