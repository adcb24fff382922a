#include <fstream>
#include <sstream>

#include "soda/errors.hpp"
#include "soda/nn/model.hpp"

namespace soda::nn {

namespace {

void write_matrix(std::ostream& out, const Matrix& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            if (c) out << ' ';
            out << m(r, c);
        }
        out << '\n';
    }
}

Matrix read_matrix(std::istream& in, Eigen::Index rows, Eigen::Index cols) {
    Matrix m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c)
            if (!(in >> m(r, c)))
                throw FormatError("model file truncated while reading parameters");
    return m;
}

}  // namespace

void DenseLayer::save(std::ostream& out) const {
    out << "dense " << weights.rows() << ' ' << weights.cols() << '\n';
    write_matrix(out, weights);
    write_matrix(out, biases);
}

void ReluLayer::save(std::ostream& out) const { out << "relu\n"; }

void BatchNormLayer::save(std::ostream& out) const {
    out << "batchnorm " << gamma.cols() << ' ' << momentum << ' ' << epsilon
        << '\n';
    write_matrix(out, gamma);
    write_matrix(out, beta);
    write_matrix(out, running_mean);
    write_matrix(out, running_var);
}

void save_model(const MlpModel& model, const ModelMeta& meta,
                const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot open model file for writing: " + path.string());
    out.precision(17);
    out << "soda-model 1\n";
    out << "stage " << meta.stage << '\n';
    out << "normalize_iq " << (meta.normalize_iq ? 1 : 0) << '\n';
    out << "input " << model.input_dim << '\n';
    out << "output " << model.output_dim << '\n';
    out << "classes " << meta.class_icaos.size();
    for (std::uint32_t icao : meta.class_icaos) out << ' ' << icao;
    out << '\n';
    out << "layers " << model.layers.size() << '\n';
    for (const auto& layer : model.layers) layer->save(out);
    out << "end\n";
    if (!out) throw FormatError("failed writing model file: " + path.string());
}

std::pair<MlpModel, ModelMeta> load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open model file: " + path.string());
    std::string token;
    int version = 0;
    if (!(in >> token >> version) || token != "soda-model" || version != 1)
        throw FormatError("not a model file: " + path.string());

    MlpModel model;
    ModelMeta meta;
    std::size_t n_classes = 0, n_layers = 0;
    int normalize = 1;
    if (!(in >> token >> meta.stage) || token != "stage")
        throw FormatError("model file: missing stage");
    if (!(in >> token >> normalize) || token != "normalize_iq")
        throw FormatError("model file: missing normalize_iq");
    meta.normalize_iq = normalize != 0;
    if (!(in >> token >> model.input_dim) || token != "input")
        throw FormatError("model file: missing input width");
    if (!(in >> token >> model.output_dim) || token != "output")
        throw FormatError("model file: missing output width");
    if (!(in >> token >> n_classes) || token != "classes")
        throw FormatError("model file: missing class table");
    meta.class_icaos.resize(n_classes);
    for (std::uint32_t& icao : meta.class_icaos)
        if (!(in >> icao)) throw FormatError("model file: truncated class table");
    if (!(in >> token >> n_layers) || token != "layers")
        throw FormatError("model file: missing layer count");

    for (std::size_t i = 0; i < n_layers; ++i) {
        if (!(in >> token)) throw FormatError("model file: truncated layer list");
        if (token == "dense") {
            Eigen::Index rows = 0, cols = 0;
            if (!(in >> rows >> cols) || rows < 1 || cols < 1)
                throw FormatError("model file: bad dense shape");
            auto dense = std::make_unique<DenseLayer>(int(rows), int(cols));
            dense->weights = read_matrix(in, rows, cols);
            dense->biases = read_matrix(in, 1, cols);
            model.layers.push_back(std::move(dense));
        } else if (token == "batchnorm") {
            Eigen::Index dim = 0;
            double momentum = 0, epsilon = 0;
            if (!(in >> dim >> momentum >> epsilon) || dim < 1)
                throw FormatError("model file: bad batchnorm header");
            auto bn = std::make_unique<BatchNormLayer>(int(dim), momentum, epsilon);
            bn->gamma = read_matrix(in, 1, dim);
            bn->beta = read_matrix(in, 1, dim);
            bn->running_mean = read_matrix(in, 1, dim);
            bn->running_var = read_matrix(in, 1, dim);
            model.layers.push_back(std::move(bn));
        } else if (token == "relu") {
            model.layers.push_back(std::make_unique<ReluLayer>());
        } else {
            throw FormatError("model file: unknown layer kind '" + token + "'");
        }
    }
    if (!(in >> token) || token != "end")
        throw FormatError("model file: missing end marker");
    if (meta.stage == "aircraft" &&
        meta.class_icaos.size() != std::size_t(model.output_dim))
        throw FormatError("model file: class table does not match output width");
    return {std::move(model), std::move(meta)};
}

}  // namespace soda::nn
