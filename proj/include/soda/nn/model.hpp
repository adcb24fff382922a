#ifndef SODA_NN_MODEL_HPP
#define SODA_NN_MODEL_HPP

#include <Eigen/Dense>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "soda/rng.hpp"

namespace soda::nn {

using Matrix = Eigen::MatrixXd;  // rows = batch, cols = features
using RowVector = Eigen::RowVectorXd;

/// Handle to one parameter tensor and its gradient buffer. Only tensors
/// with weight_decay set take part in the L2 penalty.
struct ParamRef {
    Matrix* value;
    Matrix* grad;
    bool weight_decay;
};

class Layer {
public:
    virtual ~Layer() = default;
    virtual Matrix forward(const Matrix& x, bool training) = 0;
    virtual Matrix backward(const Matrix& dy) = 0;
    virtual void collect_params(std::vector<ParamRef>& out) = 0;
    virtual std::unique_ptr<Layer> clone() const = 0;
    virtual void save(std::ostream& out) const = 0;
};

class DenseLayer final : public Layer {
public:
    DenseLayer(int fan_in, int fan_out);
    Matrix forward(const Matrix& x, bool training) override;
    Matrix backward(const Matrix& dy) override;
    void collect_params(std::vector<ParamRef>& out) override;
    std::unique_ptr<Layer> clone() const override;
    void save(std::ostream& out) const override;

    Matrix weights;  // fan_in x fan_out
    Matrix biases;   // 1 x fan_out

private:
    Matrix grad_weights_, grad_biases_, cached_input_;
};

/// Xavier-normal initialization: weights ~ N(0, 2/(fan_in+fan_out)),
/// biases zero.
std::unique_ptr<DenseLayer> init_xavier_normal(int fan_in, int fan_out, Rng& rng);

class ReluLayer final : public Layer {
public:
    Matrix forward(const Matrix& x, bool training) override;
    Matrix backward(const Matrix& dy) override;
    void collect_params(std::vector<ParamRef>&) override {}
    std::unique_ptr<Layer> clone() const override;
    void save(std::ostream& out) const override;

private:
    Matrix cached_input_;
};

class BatchNormLayer final : public Layer {
public:
    explicit BatchNormLayer(int dim, double momentum = 0.99, double epsilon = 1e-3);
    Matrix forward(const Matrix& x, bool training) override;
    Matrix backward(const Matrix& dy) override;
    void collect_params(std::vector<ParamRef>& out) override;
    std::unique_ptr<Layer> clone() const override;
    void save(std::ostream& out) const override;

    Matrix gamma, beta;              // 1 x dim
    Matrix running_mean, running_var;
    double momentum;
    double epsilon;

private:
    Matrix grad_gamma_, grad_beta_;
    Matrix cached_xc_, cached_xhat_;
    RowVector cached_inv_std_;
};

/// Feed-forward network ending in a softmax over the last dense layer's
/// outputs.
class MlpModel {
public:
    std::vector<std::unique_ptr<Layer>> layers;
    int input_dim = 0;
    int output_dim = 0;

    MlpModel() = default;
    MlpModel(const MlpModel& other);
    MlpModel& operator=(const MlpModel& other);
    MlpModel(MlpModel&&) = default;
    MlpModel& operator=(MlpModel&&) = default;

    /// Class probabilities per row (softmax via log-sum-exp).
    /// Throws ShapeError when the batch width does not match input_dim.
    Matrix forward(const Matrix& batch, bool training = false);

    /// Mean cross entropy against one-hot targets plus l2 * sum of squared
    /// dense weights.
    double loss(const Matrix& batch, const Matrix& one_hot_targets, double l2);

    /// Fills every parameter's gradient buffer from a cached forward pass.
    void backward(const Matrix& probs, const Matrix& one_hot_targets, double l2);

    std::vector<ParamRef> params();
    Eigen::VectorXi predict(const Matrix& batch);
};

/// Named architecture presets: d1/d2/d3 for the 2-class message stage,
/// m1..m5 for the aircraft stage (m5 adds batch norm and 200 epochs).
struct ModelSpec {
    std::string name;
    std::vector<int> hidden;
    bool batch_norm = false;
    int default_epochs = 50;
};
ModelSpec preset(const std::string& name);
MlpModel build_model(const ModelSpec& spec, int input_dim, int n_classes, Rng& rng);

Matrix one_hot(const Eigen::VectorXi& labels, int n_classes);

struct AdamConfig {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

/// Adam optimizer state; step() applies one bias-corrected update to every
/// parameter from its current gradient.
class AdamState {
public:
    void step(std::vector<ParamRef>& params, const AdamConfig& config);
    long t() const { return t_; }

private:
    std::vector<Matrix> m_, v_;
    long t_ = 0;
};

struct TrainConfig {
    int epochs = 50;
    int batch_size = 32;
    double learning_rate = 1e-3;
    double l2_coefficient = 1e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double adam_epsilon = 1e-8;
    std::uint64_t seed = 0;
};

struct EpochStats {
    int epoch;
    double train_loss;
    double val_loss;
    double val_accuracy;
};

struct TrainHistory {
    std::vector<EpochStats> epochs;
    int best_epoch = -1;
    double best_val_accuracy = 0;
};

/// Mini-batch training with per-epoch seeded shuffling. The model is left
/// at the parameter snapshot with the best validation accuracy.
TrainHistory train(MlpModel& model, const Matrix& train_x,
                   const Eigen::VectorXi& train_y, const Matrix& val_x,
                   const Eigen::VectorXi& val_y, const TrainConfig& config);

void save_history(const TrainHistory& history, const std::filesystem::path& path);

/// Metadata carried with a trained model: which feature stage it consumes,
/// the IQ normalization flag, and the class -> ICAO table.
struct ModelMeta {
    std::string stage = "message";  // "message" or "aircraft"
    bool normalize_iq = true;
    std::vector<std::uint32_t> class_icaos;
};

/// Portable text artifact; round trip preserves every parameter exactly.
void save_model(const MlpModel& model, const ModelMeta& meta,
                const std::filesystem::path& path);
std::pair<MlpModel, ModelMeta> load_model(const std::filesystem::path& path);

}  // namespace soda::nn

#endif
