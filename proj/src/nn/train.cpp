#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "soda/errors.hpp"
#include "soda/nn/model.hpp"

namespace soda::nn {

void AdamState::step(std::vector<ParamRef>& params, const AdamConfig& config) {
    if (m_.empty()) {
        for (ParamRef& p : params) {
            m_.push_back(Matrix::Zero(p.value->rows(), p.value->cols()));
            v_.push_back(Matrix::Zero(p.value->rows(), p.value->cols()));
        }
    }
    if (m_.size() != params.size())
        throw ShapeError("Adam state does not match the parameter list");
    ++t_;
    double correction1 = 1.0 - std::pow(config.beta1, double(t_));
    double correction2 = 1.0 - std::pow(config.beta2, double(t_));
    for (std::size_t i = 0; i < params.size(); ++i) {
        const Matrix& g = *params[i].grad;
        m_[i] = config.beta1 * m_[i] + (1.0 - config.beta1) * g;
        v_[i] = config.beta2 * v_[i].array().matrix() +
                (1.0 - config.beta2) * g.array().square().matrix();
        Eigen::ArrayXXd m_hat = m_[i].array() / correction1;
        Eigen::ArrayXXd v_hat = v_[i].array() / correction2;
        params[i].value->array() -=
            config.learning_rate * m_hat / (v_hat.sqrt() + config.epsilon);
    }
}

namespace {

double accuracy(MlpModel& model, const Matrix& x, const Eigen::VectorXi& y) {
    Eigen::VectorXi pred = model.predict(x);
    double correct = 0;
    for (Eigen::Index i = 0; i < y.size(); ++i)
        if (pred(i) == y(i)) correct += 1.0;
    return y.size() ? correct / double(y.size()) : 0.0;
}

double eval_loss(MlpModel& model, const Matrix& x, const Matrix& t, double l2) {
    Matrix probs = model.forward(x, false);
    double ce = 0;
    for (Eigen::Index r = 0; r < probs.rows(); ++r)
        for (Eigen::Index c = 0; c < probs.cols(); ++c)
            if (t(r, c) != 0.0)
                ce -= t(r, c) * std::log(std::clamp(probs(r, c), 1e-12, 1.0));
    ce /= double(probs.rows());
    double penalty = 0;
    for (const auto& layer : model.layers)
        if (auto* dense = dynamic_cast<const DenseLayer*>(layer.get()))
            penalty += dense->weights.squaredNorm();
    return ce + l2 * penalty;
}

}  // namespace

TrainHistory train(MlpModel& model, const Matrix& train_x,
                   const Eigen::VectorXi& train_y, const Matrix& val_x,
                   const Eigen::VectorXi& val_y, const TrainConfig& config) {
    if (config.epochs < 1) throw ConfigError("epochs must be at least 1");
    if (config.batch_size < 1) throw ConfigError("batch size must be at least 1");
    if (train_x.rows() == 0 || val_x.rows() == 0)
        throw ConfigError("training and validation sets must be nonempty");
    if (train_x.rows() != train_y.size() || val_x.rows() != val_y.size())
        throw ShapeError("feature/label row counts differ");

    Matrix train_t = one_hot(train_y, model.output_dim);
    Matrix val_t = one_hot(val_y, model.output_dim);

    AdamConfig adam_config{config.learning_rate, config.beta1, config.beta2,
                           config.adam_epsilon};
    AdamState adam;
    Rng rng = derive_rng(config.seed, 0x7261696e);

    std::vector<Eigen::Index> order(std::size_t(train_x.rows()));
    std::iota(order.begin(), order.end(), 0);

    TrainHistory history;
    MlpModel best = model;
    for (int epoch = 1; epoch <= config.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double loss_sum = 0;
        long batches = 0;
        for (std::size_t start = 0; start < order.size();
             start += std::size_t(config.batch_size)) {
            std::size_t count =
                std::min(order.size() - start, std::size_t(config.batch_size));
            Matrix bx(count, train_x.cols());
            Matrix bt(count, train_t.cols());
            for (std::size_t i = 0; i < count; ++i) {
                bx.row(Eigen::Index(i)) = train_x.row(order[start + i]);
                bt.row(Eigen::Index(i)) = train_t.row(order[start + i]);
            }
            Matrix probs = model.forward(bx, true);
            double ce = 0;
            for (Eigen::Index r = 0; r < probs.rows(); ++r)
                for (Eigen::Index c = 0; c < probs.cols(); ++c)
                    if (bt(r, c) != 0.0)
                        ce -= bt(r, c) * std::log(std::clamp(probs(r, c), 1e-12, 1.0));
            loss_sum += ce / double(probs.rows());
            ++batches;
            model.backward(probs, bt, config.l2_coefficient);
            std::vector<ParamRef> refs = model.params();
            adam.step(refs, adam_config);
        }

        EpochStats stats;
        stats.epoch = epoch;
        stats.train_loss = batches ? loss_sum / double(batches) : 0.0;
        stats.val_loss = eval_loss(model, val_x, val_t, config.l2_coefficient);
        stats.val_accuracy = accuracy(model, val_x, val_y);
        history.epochs.push_back(stats);
        if (history.best_epoch < 0 ||
            stats.val_accuracy > history.best_val_accuracy) {
            history.best_epoch = epoch;
            history.best_val_accuracy = stats.val_accuracy;
            best = model;
        }
    }
    model = best;
    return history;
}

void save_history(const TrainHistory& history, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot open history file: " + path.string());
    out << "epoch\ttrain_loss\tval_loss\tval_accuracy\n";
    out.precision(17);
    for (const EpochStats& s : history.epochs)
        out << s.epoch << '\t' << s.train_loss << '\t' << s.val_loss << '\t'
            << s.val_accuracy << '\n';
}

}  // namespace soda::nn
