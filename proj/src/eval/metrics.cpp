#include "soda/eval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

#include "soda/errors.hpp"

namespace soda::eval {

DatasetSplit split_dataset(const std::vector<int>& strata, const SplitSpec& spec) {
    if (std::fabs(spec.train + spec.validation + spec.test - 1.0) > 1e-9)
        throw ConfigError("split fractions must sum to 1");
    std::map<int, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < strata.size(); ++i) groups[strata[i]].push_back(i);

    DatasetSplit split;
    for (auto& [stratum, indices] : groups) {
        if (indices.size() < 5)
            throw ConfigError("stratum " + std::to_string(stratum) +
                              " has only " + std::to_string(indices.size()) +
                              " members (minimum 5)");
        Rng rng = derive_rng(spec.seed, 0x73706c69u ^ std::uint64_t(stratum));
        std::shuffle(indices.begin(), indices.end(), rng);
        std::size_t n = indices.size();
        auto n_train = std::size_t(std::lround(spec.train * double(n)));
        auto n_val = std::size_t(std::lround(spec.validation * double(n)));
        n_train = std::min(n_train, n - 2);
        n_val = std::min(n_val, n - n_train - 1);
        for (std::size_t i = 0; i < n; ++i) {
            if (i < n_train)
                split.train.push_back(indices[i]);
            else if (i < n_train + n_val)
                split.validation.push_back(indices[i]);
            else
                split.test.push_back(indices[i]);
        }
    }
    std::sort(split.train.begin(), split.train.end());
    std::sort(split.validation.begin(), split.validation.end());
    std::sort(split.test.begin(), split.test.end());
    return split;
}

std::pair<double, double> pd_pfa(const std::vector<int>& predictions,
                                 const std::vector<int>& labels) {
    if (predictions.size() != labels.size())
        throw ShapeError("prediction/label counts differ");
    std::int64_t malicious = 0, flagged_malicious = 0;
    std::int64_t authentic = 0, flagged_authentic = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i]) {
            ++malicious;
            if (predictions[i]) ++flagged_malicious;
        } else {
            ++authentic;
            if (predictions[i]) ++flagged_authentic;
        }
    }
    if (malicious == 0 || authentic == 0)
        throw UndefinedMetric("pd_pfa needs both malicious and authentic samples");
    return {double(flagged_malicious) / double(malicious),
            double(flagged_authentic) / double(authentic)};
}

ConfusionMatrix::ConfusionMatrix(int k) : k_(k), counts_(std::size_t(k) * k, 0) {
    if (k < 2) throw ConfigError("confusion matrix needs at least 2 classes");
}

void ConfusionMatrix::add(int t, int p) {
    if (t < 0 || t >= k_ || p < 0 || p >= k_)
        throw RangeError("class index outside the confusion matrix");
    ++counts_[std::size_t(t) * k_ + p];
}

std::int64_t ConfusionMatrix::at(int t, int p) const {
    return counts_[std::size_t(t) * k_ + p];
}

std::int64_t ConfusionMatrix::row_total(int t) const {
    std::int64_t sum = 0;
    for (int p = 0; p < k_; ++p) sum += at(t, p);
    return sum;
}

std::int64_t ConfusionMatrix::col_total(int p) const {
    std::int64_t sum = 0;
    for (int t = 0; t < k_; ++t) sum += at(t, p);
    return sum;
}

std::int64_t ConfusionMatrix::total() const {
    std::int64_t sum = 0;
    for (std::int64_t c : counts_) sum += c;
    return sum;
}

ConfusionMatrix confusion_from_predictions(const std::vector<int>& predictions,
                                           const std::vector<int>& labels,
                                           int n_classes) {
    if (predictions.size() != labels.size())
        throw ShapeError("prediction/label counts differ");
    ConfusionMatrix confusion(n_classes);
    for (std::size_t i = 0; i < labels.size(); ++i)
        confusion.add(labels[i], predictions[i]);
    return confusion;
}

namespace {

double harmonic(double a, double b) { return a + b > 0 ? 2 * a * b / (a + b) : 0.0; }

}  // namespace

PrfReport prf_scores(const ConfusionMatrix& confusion) {
    int k = confusion.classes();
    std::int64_t total = confusion.total();
    PrfReport report;
    report.per_class.resize(std::size_t(k));
    std::int64_t correct = 0;
    double sum_pr_rate = 0, sum_re_rate = 0, sum_pr_count = 0, sum_re_count = 0;
    int defined = 0;
    for (int i = 0; i < k; ++i) {
        ClassScores& s = report.per_class[std::size_t(i)];
        std::int64_t row = confusion.row_total(i);
        std::int64_t col = confusion.col_total(i);
        std::int64_t tp = confusion.at(i, i);
        correct += tp;
        if (row == 0) {
            s.defined = false;
            ++report.undefined_classes;
            continue;
        }
        s.tpr = double(tp) / double(row);
        s.fnr = 1.0 - s.tpr;
        s.fpr = total > row ? double(col - tp) / double(total - row) : 0.0;
        s.precision_rate = s.tpr + s.fpr > 0 ? s.tpr / (s.tpr + s.fpr) : 0.0;
        s.recall_rate = s.tpr;  // TPR + FNR = 1
        s.f_rate = harmonic(s.precision_rate, s.recall_rate);
        s.precision_count = col > 0 ? double(tp) / double(col) : 0.0;
        s.recall_count = double(tp) / double(row);
        s.f_count = harmonic(s.precision_count, s.recall_count);
        sum_pr_rate += s.precision_rate;
        sum_re_rate += s.recall_rate;
        sum_pr_count += s.precision_count;
        sum_re_count += s.recall_count;
        ++defined;
    }
    if (defined > 0) {
        report.avg_precision_rate = sum_pr_rate / defined;
        report.avg_recall_rate = sum_re_rate / defined;
        report.avg_f_rate = harmonic(report.avg_precision_rate, report.avg_recall_rate);
        report.avg_precision_count = sum_pr_count / defined;
        report.avg_recall_count = sum_re_count / defined;
        report.avg_f_count = harmonic(report.avg_precision_count, report.avg_recall_count);
    }
    report.accuracy = total > 0 ? double(correct) / double(total) : 0.0;
    return report;
}

void save_confusion_grid(const ConfusionMatrix& confusion,
                         const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot open confusion grid file: " + path.string());
    out.precision(10);
    for (int t = 0; t < confusion.classes(); ++t) {
        std::int64_t row = confusion.row_total(t);
        for (int p = 0; p < confusion.classes(); ++p) {
            if (p) out << '\t';
            out << (row > 0 ? double(confusion.at(t, p)) / double(row) : 0.0);
        }
        out << '\n';
    }
}

}  // namespace soda::eval
