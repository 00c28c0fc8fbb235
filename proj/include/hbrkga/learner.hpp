#pragma once

/// @file learner.hpp
/// @brief Small feed-forward classifier used as a tunable objective.
///
/// Three ReLU hidden layers, softmax output, mean cross-entropy plus an L2
/// penalty on weights, full-batch ADAM, and early stopping on validation loss.
/// The five tuned hyperparameters are the three layer widths, the learning
/// rate and the L2 coefficient.

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <limits>
#include <memory>
#include <numbers>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include <hbrkga/errors.hpp>
#include <hbrkga/hyperspace.hpp>
#include <hbrkga/objective.hpp>
#include <hbrkga/rng.hpp>

namespace hbrkga::learner {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Labels = std::vector<std::size_t>;

struct MlpConfig {
    std::array<std::size_t, 3> hidden_sizes{8, 8, 8};
    double learning_rate = 1e-2;
    double reg = 0.0;
    std::size_t max_epochs = 300;
    std::size_t patience = 13;
    /// A validation loss counts as a decrease only if it beats the best by more than this.
    double tolerance = 1e-8;

    void validate() const {
        for (auto h : hidden_sizes) {
            if (h < 1) throw UsageError("hidden layer sizes must be >= 1");
        }
        if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
            throw UsageError("learning rate must be positive");
        }
        if (!(reg >= 0.0) || !std::isfinite(reg)) {
            throw UsageError("L2 coefficient must be non-negative");
        }
        if (max_epochs < 1) throw UsageError("max_epochs must be >= 1");
    }
};

struct Dataset {
    Matrix train_x;
    Labels train_y;
    Matrix val_x;
    Labels val_y;
    std::size_t classes = 0;

    [[nodiscard]] std::size_t features() const noexcept {
        return static_cast<std::size_t>(train_x.cols());
    }

    void validate() const {
        if (classes < 1) throw UsageError("dataset needs at least one class");
        if (train_x.rows() == 0 || val_x.rows() == 0) throw UsageError("dataset split is empty");
        if (train_x.cols() != val_x.cols()) throw UsageError("feature widths differ");
        if (static_cast<std::size_t>(train_x.rows()) != train_y.size() ||
            static_cast<std::size_t>(val_x.rows()) != val_y.size()) {
            throw UsageError("feature and label counts differ");
        }
        for (auto y : train_y) {
            if (y >= classes) throw UsageError("label out of range");
        }
        for (auto y : val_y) {
            if (y >= classes) throw UsageError("label out of range");
        }
    }
};

/// Affine layer computing x * weights + bias for row-vector samples.
struct Layer {
    Matrix weights; ///< fan_in x fan_out
    Vector bias;    ///< fan_out
};

struct MlpParams {
    std::vector<Layer> layers;

    [[nodiscard]] std::size_t input_width() const {
        return static_cast<std::size_t>(layers.front().weights.rows());
    }
    [[nodiscard]] std::size_t classes() const {
        return static_cast<std::size_t>(layers.back().weights.cols());
    }

    /// Same shapes, all zeros.
    [[nodiscard]] MlpParams zeros_like() const {
        MlpParams z;
        for (const auto& l : layers) {
            z.layers.push_back(Layer{Matrix::Zero(l.weights.rows(), l.weights.cols()),
                                     Vector::Zero(l.bias.size())});
        }
        return z;
    }
};

using Gradients = MlpParams;

/// He-style uniform init, U(-sqrt(6/fan_in), sqrt(6/fan_in)); zero biases.
inline MlpParams init_params(std::size_t inputs, const std::array<std::size_t, 3>& hidden,
                             std::size_t classes, Rng& rng) {
    std::vector<std::size_t> widths{inputs, hidden[0], hidden[1], hidden[2], classes};
    MlpParams p;
    for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
        const auto fan_in = static_cast<Eigen::Index>(widths[l]);
        const auto fan_out = static_cast<Eigen::Index>(widths[l + 1]);
        const double limit = std::sqrt(6.0 / static_cast<double>(fan_in));
        Layer layer{Matrix(fan_in, fan_out), Vector::Zero(fan_out)};
        for (Eigen::Index j = 0; j < fan_out; ++j) {
            for (Eigen::Index i = 0; i < fan_in; ++i) {
                layer.weights(i, j) = uniform_draw(rng, -limit, limit);
            }
        }
        p.layers.push_back(std::move(layer));
    }
    return p;
}

namespace detail {

inline void check_input(const MlpParams& params, const Matrix& x) {
    if (params.layers.empty()) {
        throw UsageError("network has no layers");
    }
    if (static_cast<std::size_t>(x.cols()) != params.input_width()) {
        throw UsageError("feature width does not match the network input");
    }
    for (std::size_t l = 1; l < params.layers.size(); ++l) {
        if (params.layers[l].weights.rows() != params.layers[l - 1].weights.cols()) {
            throw UsageError("layer shapes are inconsistent");
        }
    }
}

struct ForwardPass {
    std::vector<Matrix> pre;  ///< pre-activations per layer
    std::vector<Matrix> post; ///< post[0] = input, post[l+1] = ReLU(pre[l]) for hidden layers
    Matrix logits;
};

inline ForwardPass forward_pass(const MlpParams& params, const Matrix& x) {
    ForwardPass fp;
    fp.post.push_back(x);
    for (std::size_t l = 0; l < params.layers.size(); ++l) {
        const auto& layer = params.layers[l];
        Matrix z = fp.post.back() * layer.weights;
        z.rowwise() += layer.bias.transpose();
        if (l + 1 == params.layers.size()) {
            fp.logits = std::move(z);
        } else {
            fp.post.push_back(z.cwiseMax(0.0));
            fp.pre.push_back(std::move(z));
        }
    }
    return fp;
}

/// Row-wise log-sum-exp.
inline Vector log_sum_exp(const Matrix& logits) {
    const Vector row_max = logits.rowwise().maxCoeff();
    Vector out(logits.rows());
    for (Eigen::Index r = 0; r < logits.rows(); ++r) {
        out(r) = row_max(r) + std::log((logits.row(r).array() - row_max(r)).exp().sum());
    }
    return out;
}

inline Matrix softmax(const Matrix& logits) {
    const Vector lse = log_sum_exp(logits);
    Matrix p = logits;
    for (Eigen::Index r = 0; r < p.rows(); ++r) {
        p.row(r) = (p.row(r).array() - lse(r)).exp();
        p.row(r) /= p.row(r).sum();
    }
    return p;
}

inline double mean_cross_entropy(const Matrix& logits, const Labels& y) {
    const Vector lse = log_sum_exp(logits);
    double total = 0.0;
    for (Eigen::Index r = 0; r < logits.rows(); ++r) {
        total += lse(r) - logits(r, static_cast<Eigen::Index>(y[static_cast<std::size_t>(r)]));
    }
    return total / static_cast<double>(logits.rows());
}

inline double l2_penalty(const MlpParams& params) {
    double s = 0.0;
    for (const auto& l : params.layers) {
        s += l.weights.squaredNorm();
    }
    return s;
}

} // namespace detail

/// Class probabilities, one row per sample.
inline Matrix forward(const MlpParams& params, const Matrix& x) {
    detail::check_input(params, x);
    return detail::softmax(detail::forward_pass(params, x).logits);
}

/// Mean cross-entropy without the L2 term.
inline double cross_entropy(const MlpParams& params, const Matrix& x, const Labels& y) {
    detail::check_input(params, x);
    if (static_cast<std::size_t>(x.rows()) != y.size()) {
        throw UsageError("feature and label counts differ");
    }
    return detail::mean_cross_entropy(detail::forward_pass(params, x).logits, y);
}

struct LossAndGrads {
    double loss = 0.0;
    Gradients grads;
};

/// Mean cross-entropy + reg * sum of squared weights, with its gradient.
inline LossAndGrads loss_and_grads(const MlpParams& params, const Matrix& x, const Labels& y,
                                   double reg) {
    detail::check_input(params, x);
    if (static_cast<std::size_t>(x.rows()) != y.size()) {
        throw UsageError("feature and label counts differ");
    }
    const auto fp = detail::forward_pass(params, x);
    const double n = static_cast<double>(x.rows());

    LossAndGrads out;
    out.loss = detail::mean_cross_entropy(fp.logits, y) + reg * detail::l2_penalty(params);
    out.grads = params.zeros_like();

    Matrix delta = detail::softmax(fp.logits);
    for (Eigen::Index r = 0; r < delta.rows(); ++r) {
        delta(r, static_cast<Eigen::Index>(y[static_cast<std::size_t>(r)])) -= 1.0;
    }
    delta /= n;

    for (std::size_t l = params.layers.size(); l-- > 0;) {
        const auto& layer = params.layers[l];
        auto& g = out.grads.layers[l];
        g.weights = fp.post[l].transpose() * delta + 2.0 * reg * layer.weights;
        g.bias = delta.colwise().sum().transpose();
        if (l > 0) {
            Matrix upstream = delta * layer.weights.transpose();
            delta = upstream.cwiseProduct((fp.pre[l - 1].array() > 0.0).cast<double>().matrix());
        }
    }
    return out;
}

/// ADAM moments with the canonical constants.
struct AdamState {
    MlpParams m;
    MlpParams v;
    std::size_t t = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;

    AdamState() = default;
    explicit AdamState(const MlpParams& like) : m(like.zeros_like()), v(like.zeros_like()) {}
};

namespace detail {
template <class Param>
void adam_update(Param& theta, const Param& grad, Param& m, Param& v, double lr, double c1,
                 double c2, const AdamState& s) {
    m = s.beta1 * m + (1.0 - s.beta1) * grad;
    v = s.beta2 * v + (1.0 - s.beta2) * grad.cwiseProduct(grad);
    theta.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + s.eps);
}
} // namespace detail

/// One bias-corrected ADAM update of params in place.
inline void adam_step(AdamState& state, MlpParams& params, const Gradients& grads,
                      double learning_rate) {
    if (state.m.layers.size() != params.layers.size() ||
        grads.layers.size() != params.layers.size()) {
        throw UsageError("adam_step: state, params and gradients differ in shape");
    }
    ++state.t;
    const double c1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.t));
    const double c2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.t));
    for (std::size_t l = 0; l < params.layers.size(); ++l) {
        auto& p = params.layers[l];
        const auto& g = grads.layers[l];
        detail::adam_update(p.weights, g.weights, state.m.layers[l].weights,
                            state.v.layers[l].weights, learning_rate, c1, c2, state);
        detail::adam_update(p.bias, g.bias, state.m.layers[l].bias, state.v.layers[l].bias,
                            learning_rate, c1, c2, state);
    }
}

/// Patience counter over a stream of validation losses.
class EarlyStopping {
  public:
    EarlyStopping(std::size_t patience, double tolerance)
        : patience_(patience), tolerance_(tolerance) {}

    /// Record one epoch's loss; true when it is a new best.
    bool observe(double loss) {
        ++epochs_;
        if (loss < best_ - tolerance_) {
            best_ = loss;
            since_best_ = 0;
            return true;
        }
        ++since_best_;
        return false;
    }

    [[nodiscard]] bool should_stop() const noexcept { return since_best_ >= patience_; }
    [[nodiscard]] double best() const noexcept { return best_; }
    [[nodiscard]] std::size_t epochs() const noexcept { return epochs_; }

  private:
    std::size_t patience_;
    double tolerance_;
    double best_ = std::numeric_limits<double>::infinity();
    std::size_t since_best_ = 0;
    std::size_t epochs_ = 0;
};

inline Labels predict(const MlpParams& params, const Matrix& x) {
    const auto fp = detail::forward_pass(params, x);
    Labels out(static_cast<std::size_t>(x.rows()));
    for (Eigen::Index r = 0; r < fp.logits.rows(); ++r) {
        Eigen::Index arg = 0;
        fp.logits.row(r).maxCoeff(&arg);
        out[static_cast<std::size_t>(r)] = static_cast<std::size_t>(arg);
    }
    return out;
}

struct TrainResult {
    MlpParams params; ///< parameters from the best validation epoch
    ConfusionCounts validation;
    double best_validation_loss = 0.0;
    std::size_t epochs_run = 0;
    std::vector<double> validation_losses;
};

/// Full-batch ADAM with early stopping on validation cross-entropy.
inline TrainResult train(const MlpConfig& config, const Dataset& data, std::uint64_t seed) {
    config.validate();
    data.validate();
    Rng rng(seed);
    MlpParams params = init_params(data.features(), config.hidden_sizes, data.classes, rng);
    AdamState adam(params);
    EarlyStopping stopper(config.patience, config.tolerance);

    TrainResult out;
    out.params = params;
    for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
        auto step = loss_and_grads(params, data.train_x, data.train_y, config.reg);
        if (!std::isfinite(step.loss)) {
            throw TrainingError("training loss is not finite", epoch);
        }
        adam_step(adam, params, step.grads, config.learning_rate);
        const double val_loss = cross_entropy(params, data.val_x, data.val_y);
        if (!std::isfinite(val_loss)) {
            throw TrainingError("validation loss is not finite", epoch);
        }
        out.validation_losses.push_back(val_loss);
        if (stopper.observe(val_loss)) {
            out.params = params;
        }
        if (stopper.should_stop()) {
            break;
        }
    }
    out.epochs_run = stopper.epochs();
    out.best_validation_loss = stopper.best();
    out.validation =
        ConfusionCounts::from_predictions(data.val_y, predict(out.params, data.val_x), data.classes);
    return out;
}

/// Gaussian clusters with means evenly spaced on a circle of radius 2 (first
/// two features; any further features are pure noise around zero). Each class
/// is shuffled and split 80/20 into train and validation.
inline Dataset make_blobs(std::size_t classes, std::size_t per_class, double spread,
                          std::uint64_t seed, std::size_t features = 2) {
    if (classes < 1 || per_class < 1) {
        throw UsageError("make_blobs: counts must be >= 1");
    }
    if (features < 2) {
        throw UsageError("make_blobs: need at least two features");
    }
    if (!(spread >= 0.0)) {
        throw UsageError("make_blobs: spread must be non-negative");
    }
    Rng rng = make_stream(seed, "blobs");
    std::normal_distribution<double> noise(0.0, 1.0);

    const std::size_t train_per_class = per_class * 4 / 5;
    const std::size_t val_per_class = per_class - train_per_class;
    Dataset d;
    d.classes = classes;
    d.train_x.resize(static_cast<Eigen::Index>(classes * train_per_class),
                     static_cast<Eigen::Index>(features));
    d.val_x.resize(static_cast<Eigen::Index>(classes * val_per_class),
                   static_cast<Eigen::Index>(features));

    Eigen::Index tr = 0;
    Eigen::Index va = 0;
    for (std::size_t c = 0; c < classes; ++c) {
        const double angle = 2.0 * std::numbers::pi * static_cast<double>(c) /
                             static_cast<double>(classes);
        Matrix points(static_cast<Eigen::Index>(per_class), static_cast<Eigen::Index>(features));
        for (Eigen::Index i = 0; i < points.rows(); ++i) {
            for (Eigen::Index f = 0; f < points.cols(); ++f) {
                const double mean = f == 0 ? 2.0 * std::cos(angle)
                                  : f == 1 ? 2.0 * std::sin(angle)
                                           : 0.0;
                points(i, f) = mean + spread * noise(rng);
            }
        }
        // Fisher-Yates over row order.
        std::vector<Eigen::Index> order(per_class);
        for (std::size_t i = 0; i < per_class; ++i) order[i] = static_cast<Eigen::Index>(i);
        for (std::size_t i = per_class; i-- > 1;) {
            std::swap(order[i], order[index_draw(rng, i + 1)]);
        }
        for (std::size_t i = 0; i < per_class; ++i) {
            if (i < train_per_class) {
                d.train_x.row(tr++) = points.row(order[i]);
                d.train_y.push_back(c);
            } else {
                d.val_x.row(va++) = points.row(order[i]);
                d.val_y.push_back(c);
            }
        }
    }
    return d;
}

/// Writes "split,label,x0,x1,..." rows with full round-trip precision.
inline void save_dataset_csv(const Dataset& d, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw UsageError("cannot write dataset file " + path);
    out.precision(17);
    out << "split,label";
    for (std::size_t f = 0; f < d.features(); ++f) out << ",x" << f;
    out << '\n';
    auto dump = [&](const char* split, const Matrix& x, const Labels& y) {
        for (Eigen::Index r = 0; r < x.rows(); ++r) {
            out << split << ',' << y[static_cast<std::size_t>(r)];
            for (Eigen::Index f = 0; f < x.cols(); ++f) out << ',' << x(r, f);
            out << '\n';
        }
    };
    dump("train", d.train_x, d.train_y);
    dump("val", d.val_x, d.val_y);
}

inline Dataset load_dataset_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read dataset file " + path);
    std::string line;
    std::getline(in, line);
    std::vector<std::vector<double>> rows[2];
    Labels labels[2];
    std::size_t line_no = 1;
    std::size_t width = 0;
    std::size_t classes = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::getline(ss, cell, ',');
        int split = cell == "train" ? 0 : cell == "val" ? 1 : -1;
        if (split < 0) throw ConfigError("unknown split '" + cell + "'", line_no);
        std::getline(ss, cell, ',');
        std::size_t label = 0;
        std::vector<double> feats;
        try {
            label = std::stoul(cell);
            while (std::getline(ss, cell, ',')) feats.push_back(std::stod(cell));
        } catch (const std::exception&) {
            throw ConfigError("malformed number", line_no);
        }
        if (width == 0) width = feats.size();
        if (feats.size() != width || width == 0) throw ConfigError("inconsistent width", line_no);
        classes = std::max(classes, label + 1);
        rows[split].push_back(std::move(feats));
        labels[split].push_back(label);
    }
    Dataset d;
    d.classes = classes;
    auto fill = [&](Matrix& x, Labels& y, int split) {
        x.resize(static_cast<Eigen::Index>(rows[split].size()), static_cast<Eigen::Index>(width));
        for (std::size_t r = 0; r < rows[split].size(); ++r)
            for (std::size_t f = 0; f < width; ++f)
                x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(f)) = rows[split][r][f];
        y = labels[split];
    };
    fill(d.train_x, d.train_y, 0);
    fill(d.val_x, d.val_y, 1);
    d.validate();
    return d;
}

/// Space with the five tuned dimensions: three widths, learning rate, L2 coefficient.
inline HyperSpace mlp_space(std::array<std::pair<double, double>, 3> widths,
                            std::pair<double, double> learning_rate = {1e-6, 1e-1},
                            std::pair<double, double> reg = {0.0, 1e-3}) {
    return HyperSpace({
        {"n1", DimKind::integer, widths[0].first, widths[0].second, {}},
        {"n2", DimKind::integer, widths[1].first, widths[1].second, {}},
        {"n3", DimKind::integer, widths[2].first, widths[2].second, {}},
        {"learning_rate", DimKind::real, learning_rate.first, learning_rate.second, {}},
        {"reg", DimKind::real, reg.first, reg.second, {}},
    });
}

/// Smallest of the reference spaces: n1 in [5,15], n2 in [5,30], n3 in [5,45].
inline HyperSpace cosmos_space() {
    return mlp_space({{{5, 15}, {5, 30}, {5, 45}}});
}

/// Seed for a training run: stable in the hyperparameter values, so equal
/// candidates always train identically regardless of evaluation order.
inline std::uint64_t trial_seed(std::uint64_t base, const HyperVector& gamma) {
    std::uint64_t s = derive_seed(base, "ann");
    for (double v : gamma.values) {
        s = splitmix64(s ^ std::bit_cast<std::uint64_t>(v));
    }
    return s;
}

/// Objective: train with gamma = (n1, n2, n3, learning_rate, reg) and return
/// the negated validation macro-F1.
inline ObjectiveContract ann_objective(Dataset data, const HyperSpace& space, std::uint64_t seed,
                                       std::size_t max_epochs = 300, std::size_t patience = 13) {
    data.validate();
    if (space.size() != 5) {
        throw UsageError("ann_objective: space must have exactly 5 dimensions");
    }
    for (std::size_t i = 0; i < 3; ++i) {
        if (space.kind(i) != DimKind::integer || space.bounds(i).first < 1.0) {
            throw UsageError("ann_objective: layer widths must be integer dimensions >= 1");
        }
    }
    auto shared = std::make_shared<const Dataset>(std::move(data));
    return ObjectiveContract{
        "ann", 5, [shared, seed, max_epochs, patience](const HyperVector& g) {
            if (g.size() != 5) throw UsageError("ann objective expects 5 hyperparameters");
            MlpConfig cfg;
            cfg.hidden_sizes = {static_cast<std::size_t>(g[0]), static_cast<std::size_t>(g[1]),
                                static_cast<std::size_t>(g[2])};
            cfg.learning_rate = g[3];
            cfg.reg = g[4];
            cfg.max_epochs = max_epochs;
            cfg.patience = patience;
            const TrainResult r = train(cfg, *shared, trial_seed(seed, g));
            return wrap_maximize(macro_f1(r.validation));
        }};
}

} // namespace hbrkga::learner
