#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "oracles.hpp"
#include "soda/errors.hpp"
#include "soda/nn/model.hpp"
#include "soda/rng.hpp"

using namespace soda;

TEST_CASE("xavier init has the right variance") {
    Rng rng(61);
    int fan_in = 300, fan_out = 200;
    auto layer = nn::init_xavier_normal(fan_in, fan_out, rng);
    double mean = layer->weights.mean();
    double var = (layer->weights.array() - mean).square().mean();
    double expected = 2.0 / double(fan_in + fan_out);
    CHECK(std::fabs(mean) < 0.001);
    CHECK(var == doctest::Approx(expected).epsilon(0.05));
    CHECK(layer->biases.isZero());
}

TEST_CASE("softmax rows sum to one and a zero network is uniform") {
    nn::MlpModel model;
    model.input_dim = 4;
    model.output_dim = 3;
    model.layers.push_back(std::make_unique<nn::DenseLayer>(4, 3));  // all zero
    nn::Matrix x = nn::Matrix::Random(5, 4);
    nn::Matrix probs = model.forward(x);
    for (Eigen::Index r = 0; r < probs.rows(); ++r) {
        CHECK(probs.row(r).sum() == doctest::Approx(1.0).epsilon(1e-12));
        for (Eigen::Index c = 0; c < probs.cols(); ++c)
            CHECK(probs(r, c) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    }
    nn::Matrix bad = nn::Matrix::Random(5, 7);
    CHECK_THROWS_AS(model.forward(bad), ShapeError);
}

TEST_CASE("loss of a uniform model is ln k plus the l2 term") {
    nn::MlpModel model;
    model.input_dim = 4;
    model.output_dim = 3;
    auto dense = std::make_unique<nn::DenseLayer>(4, 3);
    dense->weights.setConstant(0.5);
    double squared_norm = dense->weights.squaredNorm();
    model.layers.push_back(std::move(dense));

    nn::Matrix x = nn::Matrix::Zero(6, 4);  // zero input -> uniform output
    Eigen::VectorXi y(6);
    y << 0, 1, 2, 0, 1, 2;
    nn::Matrix t = nn::one_hot(y, 3);
    CHECK(model.loss(x, t, 0.0) == doctest::Approx(std::log(3.0)).epsilon(1e-12));
    // The penalty is linear in the l2 coefficient.
    double base = model.loss(x, t, 0.0);
    CHECK(model.loss(x, t, 0.01) - base ==
          doctest::Approx(0.01 * squared_norm).epsilon(1e-9));
    CHECK(model.loss(x, t, 0.02) - base ==
          doctest::Approx(0.02 * squared_norm).epsilon(1e-9));
}

TEST_CASE("one_hot validates labels") {
    Eigen::VectorXi y(2);
    y << 0, 3;
    CHECK_THROWS_AS(nn::one_hot(y, 3), RangeError);
    y << 0, 2;
    nn::Matrix t = nn::one_hot(y, 3);
    CHECK(t(0, 0) == 1.0);
    CHECK(t(1, 2) == 1.0);
    CHECK(t.sum() == 2.0);
}

TEST_CASE("backward gradients match finite differences") {
    // Small network with every layer type: dense -> batch norm -> relu -> dense.
    Rng rng(62);
    nn::ModelSpec spec{"tiny", {5}, true, 1};
    nn::MlpModel model = nn::build_model(spec, 8, 3, rng);

    nn::Matrix x = nn::Matrix::Random(16, 8);
    Eigen::VectorXi y(16);
    for (int i = 0; i < 16; ++i) y(i) = i % 3;
    nn::Matrix t = nn::one_hot(y, 3);
    const double l2 = 1e-3;

    nn::Matrix probs = model.forward(x, true);
    model.backward(probs, t, l2);

    // Copy out the analytic gradients before probing.
    std::vector<nn::Matrix> grads;
    for (auto& p : model.params()) grads.push_back(*p.grad);

    const double h = 1e-5;
    std::vector<nn::ParamRef> refs = model.params();
    for (std::size_t pi = 0; pi < refs.size(); ++pi) {
        nn::Matrix& w = *refs[pi].value;
        for (Eigen::Index i = 0; i < w.rows(); ++i) {
            for (Eigen::Index j = 0; j < w.cols(); ++j) {
                double keep = w(i, j);
                w(i, j) = keep + h;
                double up = model.loss(x, t, l2);
                w(i, j) = keep - h;
                double down = model.loss(x, t, l2);
                w(i, j) = keep;
                double numeric = (up - down) / (2.0 * h);
                double analytic = grads[pi](i, j);
                // The floor absorbs pure roundoff on parameters whose true
                // gradient is zero (e.g. a dense bias feeding batch norm).
                double denom = std::max({std::fabs(numeric), std::fabs(analytic), 1e-6});
                CHECK(std::fabs(numeric - analytic) / denom < 1e-4);
            }
        }
    }
}

TEST_CASE("adam matches the scalar oracle on f(w) = w^2") {
    nn::Matrix w(1, 1), g(1, 1);
    w(0, 0) = 0.7;
    std::vector<nn::ParamRef> refs{{&w, &g, false}};
    nn::AdamState adam;
    nn::AdamConfig config;  // defaults: lr 1e-3, betas 0.9/0.999, eps 1e-8

    oracles::ScalarAdam oracle;
    double w_ref = 0.7;
    for (int step = 0; step < 10; ++step) {
        double grad = 2.0 * w_ref;  // same point for both
        g(0, 0) = 2.0 * w(0, 0);
        adam.step(refs, config);
        w_ref = oracle.step(w_ref, grad);
        CHECK(std::fabs(w(0, 0) - w_ref) < 1e-12);
    }
}

TEST_CASE("presets have the advertised shapes") {
    Rng rng(63);
    nn::MlpModel d3 = nn::build_model(nn::preset("d3"), 480, 2, rng);
    // 480 -> 128 -> 128 -> 2: three dense layers, two relus.
    int dense = 0, bn = 0;
    for (auto& layer : d3.layers) {
        if (dynamic_cast<nn::DenseLayer*>(layer.get())) ++dense;
        if (dynamic_cast<nn::BatchNormLayer*>(layer.get())) ++bn;
    }
    CHECK(dense == 3);
    CHECK(bn == 0);
    auto* first = dynamic_cast<nn::DenseLayer*>(d3.layers[0].get());
    REQUIRE(first);
    CHECK(first->weights.rows() == 480);
    CHECK(first->weights.cols() == 128);

    nn::ModelSpec m5 = nn::preset("m5");
    CHECK(m5.hidden == std::vector<int>{512, 256});
    CHECK(m5.batch_norm);
    CHECK(m5.default_epochs == 200);
    CHECK(nn::preset("m3").hidden == std::vector<int>{512, 512});
    CHECK_THROWS_AS(nn::preset("d9"), ConfigError);
}

namespace {

/// Two linearly separable blobs.
void make_blobs(nn::Matrix& x, Eigen::VectorXi& y, int n, Rng& rng) {
    std::normal_distribution<double> noise(0.0, 0.3);
    x.resize(n, 2);
    y.resize(n);
    for (int i = 0; i < n; ++i) {
        int cls = i % 2;
        double cx = cls ? 2.0 : -2.0;
        x(i, 0) = cx + noise(rng);
        x(i, 1) = -cx + noise(rng);
        y(i) = cls;
    }
}

}  // namespace

TEST_CASE("training separates an easy toy problem deterministically") {
    Rng data_rng(64);
    nn::Matrix train_x, val_x;
    Eigen::VectorXi train_y, val_y;
    make_blobs(train_x, train_y, 200, data_rng);
    make_blobs(val_x, val_y, 60, data_rng);

    nn::TrainConfig config;
    config.epochs = 20;
    config.learning_rate = 0.01;
    config.seed = 99;

    Rng m1(65), m2(65);
    nn::MlpModel a = nn::build_model(nn::ModelSpec{"t", {8}, false, 20}, 2, 2, m1);
    nn::MlpModel b = nn::build_model(nn::ModelSpec{"t", {8}, false, 20}, 2, 2, m2);
    nn::TrainHistory ha = nn::train(a, train_x, train_y, val_x, val_y, config);
    nn::TrainHistory hb = nn::train(b, train_x, train_y, val_x, val_y, config);

    CHECK(ha.best_val_accuracy >= 0.98);
    CHECK(ha.best_epoch == hb.best_epoch);
    REQUIRE(ha.epochs.size() == hb.epochs.size());
    for (std::size_t i = 0; i < ha.epochs.size(); ++i) {
        CHECK(ha.epochs[i].train_loss == hb.epochs[i].train_loss);
        CHECK(ha.epochs[i].val_accuracy == hb.epochs[i].val_accuracy);
    }
    // Identical training leaves identical predictions.
    CHECK((a.predict(val_x).array() == b.predict(val_x).array()).all());
}

TEST_CASE("training keeps the best-validation snapshot") {
    Rng data_rng(66);
    nn::Matrix train_x, val_x;
    Eigen::VectorXi train_y, val_y;
    make_blobs(train_x, train_y, 100, data_rng);
    make_blobs(val_x, val_y, 40, data_rng);

    nn::TrainConfig config;
    config.epochs = 15;
    config.seed = 7;
    Rng rng(67);
    nn::MlpModel model =
        nn::build_model(nn::ModelSpec{"t", {8}, false, 15}, 2, 2, rng);
    nn::TrainHistory history =
        nn::train(model, train_x, train_y, val_x, val_y, config);

    double final_acc = 0;
    Eigen::VectorXi pred = model.predict(val_x);
    for (Eigen::Index i = 0; i < val_y.size(); ++i)
        if (pred(i) == val_y(i)) final_acc += 1.0;
    final_acc /= double(val_y.size());
    CHECK(final_acc == doctest::Approx(history.best_val_accuracy).epsilon(1e-12));
}

TEST_CASE("train rejects bad configurations") {
    nn::Matrix x = nn::Matrix::Random(10, 2);
    Eigen::VectorXi y = Eigen::VectorXi::Zero(10);
    Rng rng(68);
    nn::MlpModel model =
        nn::build_model(nn::ModelSpec{"t", {4}, false, 1}, 2, 2, rng);

    nn::TrainConfig config;
    config.epochs = 0;
    CHECK_THROWS_AS(nn::train(model, x, y, x, y, config), ConfigError);
    config.epochs = 1;
    config.batch_size = 0;
    CHECK_THROWS_AS(nn::train(model, x, y, x, y, config), ConfigError);
    config.batch_size = 4;
    Eigen::VectorXi short_y = Eigen::VectorXi::Zero(7);
    CHECK_THROWS_AS(nn::train(model, x, short_y, x, y, config), ShapeError);
}

TEST_CASE("model files round trip exactly") {
    Rng rng(69);
    nn::MlpModel model =
        nn::build_model(nn::ModelSpec{"t", {6, 4}, true, 1}, 5, 3, rng);
    // Push the batch-norm running stats off their initial values.
    model.forward(nn::Matrix::Random(32, 5), true);

    nn::ModelMeta meta;
    meta.stage = "aircraft";
    meta.normalize_iq = false;
    meta.class_icaos = {0xA, 0xB, 0xC};

    auto dir = std::filesystem::temp_directory_path() / "soda_model_test";
    std::filesystem::create_directories(dir);
    auto path = dir / "m.txt";
    nn::save_model(model, meta, path);
    auto [back, back_meta] = nn::load_model(path);

    CHECK(back_meta.stage == meta.stage);
    CHECK(back_meta.normalize_iq == meta.normalize_iq);
    CHECK(back_meta.class_icaos == meta.class_icaos);
    CHECK(back.input_dim == model.input_dim);
    CHECK(back.output_dim == model.output_dim);
    REQUIRE(back.layers.size() == model.layers.size());

    nn::Matrix probe = nn::Matrix::Random(8, 5);
    nn::Matrix original = model.forward(probe, false);
    nn::Matrix restored = back.forward(probe, false);
    CHECK((original - restored).cwiseAbs().maxCoeff() == 0.0);

    // Truncation must fail loudly.
    std::filesystem::resize_file(path, std::filesystem::file_size(path) / 2);
    CHECK_THROWS_AS(nn::load_model(path), FormatError);
    std::filesystem::remove_all(dir);
}

TEST_CASE("predict breaks ties toward the lowest class") {
    nn::MlpModel model;
    model.input_dim = 2;
    model.output_dim = 3;
    model.layers.push_back(std::make_unique<nn::DenseLayer>(2, 3));
    Eigen::VectorXi pred = model.predict(nn::Matrix::Zero(4, 2));
    for (Eigen::Index i = 0; i < pred.size(); ++i) CHECK(pred(i) == 0);
}
