#include "soda/nn/model.hpp"

#include <cmath>
#include <ostream>

#include "soda/errors.hpp"

namespace soda::nn {

// ---------------------------------------------------------------- Dense

DenseLayer::DenseLayer(int fan_in, int fan_out) {
    if (fan_in < 1 || fan_out < 1)
        throw ConfigError("dense layer fan sizes must be positive");
    weights = Matrix::Zero(fan_in, fan_out);
    biases = Matrix::Zero(1, fan_out);
    grad_weights_ = Matrix::Zero(fan_in, fan_out);
    grad_biases_ = Matrix::Zero(1, fan_out);
}

Matrix DenseLayer::forward(const Matrix& x, bool training) {
    if (x.cols() != weights.rows())
        throw ShapeError("dense layer expects " + std::to_string(weights.rows()) +
                         " inputs, got " + std::to_string(x.cols()));
    if (training) cached_input_ = x;
    return (x * weights).rowwise() + biases.row(0);
}

Matrix DenseLayer::backward(const Matrix& dy) {
    grad_weights_ = cached_input_.transpose() * dy;
    grad_biases_ = dy.colwise().sum();
    return dy * weights.transpose();
}

void DenseLayer::collect_params(std::vector<ParamRef>& out) {
    out.push_back({&weights, &grad_weights_, true});
    out.push_back({&biases, &grad_biases_, false});
}

std::unique_ptr<Layer> DenseLayer::clone() const {
    auto copy = std::make_unique<DenseLayer>(int(weights.rows()), int(weights.cols()));
    copy->weights = weights;
    copy->biases = biases;
    return copy;
}

std::unique_ptr<DenseLayer> init_xavier_normal(int fan_in, int fan_out, Rng& rng) {
    auto layer = std::make_unique<DenseLayer>(fan_in, fan_out);
    std::normal_distribution<double> dist(0.0, std::sqrt(2.0 / (fan_in + fan_out)));
    for (int i = 0; i < fan_in; ++i)
        for (int j = 0; j < fan_out; ++j) layer->weights(i, j) = dist(rng);
    return layer;
}

// ----------------------------------------------------------------- ReLU

Matrix ReluLayer::forward(const Matrix& x, bool training) {
    if (training) cached_input_ = x;
    return x.cwiseMax(0.0);
}

Matrix ReluLayer::backward(const Matrix& dy) {
    return (cached_input_.array() > 0.0).cast<double>() * dy.array();
}

std::unique_ptr<Layer> ReluLayer::clone() const {
    return std::make_unique<ReluLayer>();
}

// ------------------------------------------------------------ BatchNorm

BatchNormLayer::BatchNormLayer(int dim, double momentum_, double epsilon_)
    : momentum(momentum_), epsilon(epsilon_) {
    gamma = Matrix::Ones(1, dim);
    beta = Matrix::Zero(1, dim);
    running_mean = Matrix::Zero(1, dim);
    running_var = Matrix::Ones(1, dim);
    grad_gamma_ = Matrix::Zero(1, dim);
    grad_beta_ = Matrix::Zero(1, dim);
}

Matrix BatchNormLayer::forward(const Matrix& x, bool training) {
    if (x.cols() != gamma.cols())
        throw ShapeError("batch norm width mismatch");
    if (!training) {
        RowVector inv_std =
            (running_var.row(0).array() + epsilon).sqrt().inverse();
        Matrix xhat =
            (x.rowwise() - running_mean.row(0)).array().rowwise() * inv_std.array();
        return (xhat.array().rowwise() * gamma.row(0).array()).rowwise() +
               beta.row(0).array();
    }
    double n = double(x.rows());
    RowVector mean = x.colwise().mean();
    cached_xc_ = x.rowwise() - mean;
    RowVector var = cached_xc_.array().square().colwise().sum() / n;  // biased
    cached_inv_std_ = (var.array() + epsilon).sqrt().inverse();
    cached_xhat_ = cached_xc_.array().rowwise() * cached_inv_std_.array();
    running_mean.row(0) = momentum * running_mean.row(0) + (1.0 - momentum) * mean;
    running_var.row(0) = momentum * running_var.row(0) + (1.0 - momentum) * var;
    return (cached_xhat_.array().rowwise() * gamma.row(0).array()).rowwise() +
           beta.row(0).array();
}

Matrix BatchNormLayer::backward(const Matrix& dy) {
    double n = double(dy.rows());
    grad_gamma_.row(0) = (dy.array() * cached_xhat_.array()).colwise().sum();
    grad_beta_.row(0) = dy.colwise().sum();

    Matrix dxhat = dy.array().rowwise() * gamma.row(0).array();
    RowVector inv_std3 =
        cached_inv_std_.array() * cached_inv_std_.array() * cached_inv_std_.array();
    RowVector dvar = -0.5 *
                     ((dxhat.array() * cached_xc_.array()).colwise().sum() *
                      inv_std3.array());
    RowVector dmean =
        -(dxhat.array().rowwise() * cached_inv_std_.array()).colwise().sum() -
        dvar.array() * (2.0 / n) * cached_xc_.colwise().sum().array();
    Matrix dx = (dxhat.array().rowwise() * cached_inv_std_.array()) +
                (cached_xc_.array().rowwise() * dvar.array()) * (2.0 / n);
    dx.array().rowwise() += dmean.array() / n;
    return dx;
}

void BatchNormLayer::collect_params(std::vector<ParamRef>& out) {
    out.push_back({&gamma, &grad_gamma_, false});
    out.push_back({&beta, &grad_beta_, false});
}

std::unique_ptr<Layer> BatchNormLayer::clone() const {
    auto copy = std::make_unique<BatchNormLayer>(int(gamma.cols()), momentum, epsilon);
    copy->gamma = gamma;
    copy->beta = beta;
    copy->running_mean = running_mean;
    copy->running_var = running_var;
    return copy;
}

// ------------------------------------------------------------------ MLP

MlpModel::MlpModel(const MlpModel& other)
    : input_dim(other.input_dim), output_dim(other.output_dim) {
    layers.reserve(other.layers.size());
    for (const auto& layer : other.layers) layers.push_back(layer->clone());
}

MlpModel& MlpModel::operator=(const MlpModel& other) {
    if (this == &other) return *this;
    MlpModel copy(other);
    *this = std::move(copy);
    return *this;
}

namespace {

Matrix softmax_rows(Matrix logits) {
    for (Eigen::Index r = 0; r < logits.rows(); ++r) {
        double max = logits.row(r).maxCoeff();
        Eigen::ArrayXd shifted = logits.row(r).array() - max;
        double lse = std::log(shifted.exp().sum());
        logits.row(r) = (shifted - lse).exp();
    }
    return logits;
}

}  // namespace

Matrix MlpModel::forward(const Matrix& batch, bool training) {
    if (batch.cols() != input_dim)
        throw ShapeError("model expects " + std::to_string(input_dim) +
                         " features, got " + std::to_string(batch.cols()));
    Matrix x = batch;
    for (auto& layer : layers) x = layer->forward(x, training);
    return softmax_rows(std::move(x));
}

double MlpModel::loss(const Matrix& batch, const Matrix& targets, double l2) {
    Matrix probs = forward(batch, true);
    if (probs.rows() != targets.rows() || probs.cols() != targets.cols())
        throw ShapeError("target shape does not match model output");
    double ce = 0;
    for (Eigen::Index r = 0; r < probs.rows(); ++r)
        for (Eigen::Index c = 0; c < probs.cols(); ++c)
            if (targets(r, c) != 0.0)
                ce -= targets(r, c) *
                      std::log(std::clamp(probs(r, c), 1e-12, 1.0));
    ce /= double(probs.rows());
    double penalty = 0;
    for (const auto& layer : layers)
        if (auto* dense = dynamic_cast<const DenseLayer*>(layer.get()))
            penalty += dense->weights.squaredNorm();
    return ce + l2 * penalty;
}

void MlpModel::backward(const Matrix& probs, const Matrix& targets, double l2) {
    Matrix grad = (probs - targets) / double(probs.rows());
    for (auto it = layers.rbegin(); it != layers.rend(); ++it)
        grad = (*it)->backward(grad);
    if (l2 != 0.0) {
        std::vector<ParamRef> refs = params();
        for (ParamRef& ref : refs)
            if (ref.weight_decay) *ref.grad += 2.0 * l2 * *ref.value;
    }
}

std::vector<ParamRef> MlpModel::params() {
    std::vector<ParamRef> refs;
    for (auto& layer : layers) layer->collect_params(refs);
    return refs;
}

Eigen::VectorXi MlpModel::predict(const Matrix& batch) {
    Matrix probs = forward(batch, false);
    Eigen::VectorXi out(probs.rows());
    for (Eigen::Index r = 0; r < probs.rows(); ++r) {
        // Ties break toward the lowest class index.
        Eigen::Index best = 0;
        for (Eigen::Index c = 1; c < probs.cols(); ++c)
            if (probs(r, c) > probs(r, best)) best = c;
        out(r) = int(best);
    }
    return out;
}

Matrix one_hot(const Eigen::VectorXi& labels, int n_classes) {
    Matrix t = Matrix::Zero(labels.size(), n_classes);
    for (Eigen::Index r = 0; r < labels.size(); ++r) {
        if (labels(r) < 0 || labels(r) >= n_classes)
            throw RangeError("label " + std::to_string(labels(r)) +
                             " outside [0, " + std::to_string(n_classes) + ")");
        t(r, labels(r)) = 1.0;
    }
    return t;
}

// -------------------------------------------------------------- Presets

ModelSpec preset(const std::string& name) {
    if (name == "d1") return {name, {128}, false, 50};
    if (name == "d2") return {name, {256}, false, 50};
    if (name == "d3") return {name, {128, 128}, false, 50};
    if (name == "m1") return {name, {512}, false, 50};
    if (name == "m2") return {name, {1024}, false, 50};
    if (name == "m3") return {name, {512, 512}, false, 50};
    if (name == "m4") return {name, {512, 512, 512}, false, 50};
    if (name == "m5") return {name, {512, 256}, true, 200};
    throw ConfigError("unknown model preset '" + name + "'");
}

MlpModel build_model(const ModelSpec& spec, int input_dim, int n_classes, Rng& rng) {
    if (input_dim < 1 || n_classes < 2)
        throw ConfigError("model needs a positive input width and >= 2 classes");
    MlpModel model;
    model.input_dim = input_dim;
    model.output_dim = n_classes;
    int width = input_dim;
    for (int hidden : spec.hidden) {
        model.layers.push_back(init_xavier_normal(width, hidden, rng));
        if (spec.batch_norm)
            model.layers.push_back(std::make_unique<BatchNormLayer>(hidden));
        model.layers.push_back(std::make_unique<ReluLayer>());
        width = hidden;
    }
    model.layers.push_back(init_xavier_normal(width, n_classes, rng));
    return model;
}

}  // namespace soda::nn
