#include "fairgap/model.hpp"

#include <algorithm>
#include <cmath>

#include "fairgap/errors.hpp"
#include "fairgap/rng.hpp"

namespace fairgap::nn {

namespace {

constexpr double kProbClamp = 1e-12;

double stable_sigmoid(double z) {
    double p;
    if (z >= 0.0) {
        p = 1.0 / (1.0 + std::exp(-z));
    } else {
        const double e = std::exp(z);
        p = e / (1.0 + e);
    }
    return std::clamp(p, kProbClamp, 1.0 - kProbClamp);
}

double activate(Activation a, double z) {
    return a == Activation::relu ? (z > 0.0 ? z : 0.0) : std::tanh(z);
}

// derivative as a function of the pre-activation; relu' at 0 is taken as 0
double activate_deriv(Activation a, double z) {
    if (a == Activation::relu) return z > 0.0 ? 1.0 : 0.0;
    const double t = std::tanh(z);
    return 1.0 - t * t;
}

void check_features(const ModelSpec& spec, const Matrix& features) {
    if (features.cols != static_cast<std::size_t>(spec.input_dim))
        throw InputError("feature matrix has " + std::to_string(features.cols) +
                         " columns, model expects " + std::to_string(spec.input_dim));
    for (double v : features.data)
        if (!std::isfinite(v)) throw InputError("non-finite feature value");
}

void check_params(const ModelSpec& spec, const ParameterVector& params) {
    if (params.size() != param_count(spec))
        throw InputError("parameter vector size " + std::to_string(params.size()) +
                         " does not match model (" + std::to_string(param_count(spec)) + ")");
}

}  // namespace

Activation activation_from_string(const std::string& s) {
    if (s == "relu") return Activation::relu;
    if (s == "tanh") return Activation::tanh;
    throw InputError("unknown activation: " + s);
}

std::string to_string(Activation a) { return a == Activation::relu ? "relu" : "tanh"; }

void ModelSpec::validate() const {
    if (input_dim <= 0) throw InputError("ModelSpec: input_dim must be positive");
    if (hidden_dim < 0) throw InputError("ModelSpec: hidden_dim must be nonnegative");
}

std::size_t param_count(const ModelSpec& spec) {
    const auto d = static_cast<std::size_t>(spec.input_dim);
    const auto h = static_cast<std::size_t>(spec.hidden_dim);
    if (h == 0) return d + 1;
    return h * d + h + h + 1;
}

bool ParameterVector::all_finite() const {
    return std::all_of(values.begin(), values.end(),
                       [](double v) { return std::isfinite(v); });
}

ParameterVector init_params(const ModelSpec& spec) {
    spec.validate();
    ParameterVector p;
    p.input_dim = spec.input_dim;
    p.hidden_dim = spec.hidden_dim;
    p.values.assign(param_count(spec), 0.0);
    SplitMix64 rng(spec.seed);
    const auto d = static_cast<std::size_t>(spec.input_dim);
    const auto h = static_cast<std::size_t>(spec.hidden_dim);
    if (h == 0) {
        const double limit = std::sqrt(6.0 / (spec.input_dim + 1));
        for (std::size_t j = 0; j < d; ++j) p.values[j] = rng.uniform(-limit, limit);
        // bias stays 0
    } else {
        const double limit1 = std::sqrt(6.0 / (spec.input_dim + spec.hidden_dim));
        for (std::size_t i = 0; i < h * d; ++i) p.values[i] = rng.uniform(-limit1, limit1);
        const double limit2 = std::sqrt(6.0 / (spec.hidden_dim + 1));
        for (std::size_t k = 0; k < h; ++k)
            p.values[h * d + h + k] = rng.uniform(-limit2, limit2);
    }
    return p;
}

std::vector<double> forward(const ModelSpec& spec, const ParameterVector& params,
                            const Matrix& features) {
    spec.validate();
    check_features(spec, features);
    check_params(spec, params);
    const std::size_t n = features.rows;
    const auto d = static_cast<std::size_t>(spec.input_dim);
    const auto h = static_cast<std::size_t>(spec.hidden_dim);
    std::vector<double> probs(n);
    const double* w = params.values.data();
    if (h == 0) {
        const double b = w[d];
        for (std::size_t i = 0; i < n; ++i) {
            double z = b;
            const auto x = features.row(i);
            for (std::size_t j = 0; j < d; ++j) z += w[j] * x[j];
            probs[i] = stable_sigmoid(z);
        }
        return probs;
    }
    const double* w1 = w;            // h x d
    const double* b1 = w + h * d;    // h
    const double* w2 = b1 + h;       // h
    const double b2 = w2[h];
    for (std::size_t i = 0; i < n; ++i) {
        const auto x = features.row(i);
        double z2 = b2;
        for (std::size_t k = 0; k < h; ++k) {
            double z1 = b1[k];
            const double* wk = w1 + k * d;
            for (std::size_t j = 0; j < d; ++j) z1 += wk[j] * x[j];
            z2 += w2[k] * activate(spec.activation, z1);
        }
        probs[i] = stable_sigmoid(z2);
    }
    return probs;
}

ParameterVector backward_from_prob_grad(const ModelSpec& spec, const ParameterVector& params,
                                        const Matrix& features,
                                        std::span<const double> dloss_dprob) {
    spec.validate();
    check_features(spec, features);
    check_params(spec, params);
    if (dloss_dprob.size() != features.rows)
        throw InputError("dloss_dprob length does not match batch size");

    const std::size_t n = features.rows;
    const auto d = static_cast<std::size_t>(spec.input_dim);
    const auto h = static_cast<std::size_t>(spec.hidden_dim);
    ParameterVector grad;
    grad.input_dim = params.input_dim;
    grad.hidden_dim = params.hidden_dim;
    grad.values.assign(params.size(), 0.0);
    const double* w = params.values.data();
    double* g = grad.values.data();

    if (h == 0) {
        const double b = w[d];
        for (std::size_t i = 0; i < n; ++i) {
            const auto x = features.row(i);
            double z = b;
            for (std::size_t j = 0; j < d; ++j) z += w[j] * x[j];
            const double p = stable_sigmoid(z);
            const double gz = dloss_dprob[i] * p * (1.0 - p);
            for (std::size_t j = 0; j < d; ++j) g[j] += gz * x[j];
            g[d] += gz;
        }
        return grad;
    }

    const double* w1 = w;
    const double* b1 = w + h * d;
    const double* w2 = b1 + h;
    const double b2 = w2[h];
    double* g1 = g;
    double* gb1 = g + h * d;
    double* g2 = gb1 + h;
    double* gb2 = g2 + h;
    std::vector<double> z1(h), h1(h);
    for (std::size_t i = 0; i < n; ++i) {
        const auto x = features.row(i);
        double z2 = b2;
        for (std::size_t k = 0; k < h; ++k) {
            double zk = b1[k];
            const double* wk = w1 + k * d;
            for (std::size_t j = 0; j < d; ++j) zk += wk[j] * x[j];
            z1[k] = zk;
            h1[k] = activate(spec.activation, zk);
            z2 += w2[k] * h1[k];
        }
        const double p = stable_sigmoid(z2);
        const double gz2 = dloss_dprob[i] * p * (1.0 - p);
        *gb2 += gz2;
        for (std::size_t k = 0; k < h; ++k) {
            g2[k] += gz2 * h1[k];
            const double gz1 = gz2 * w2[k] * activate_deriv(spec.activation, z1[k]);
            if (gz1 == 0.0) continue;
            gb1[k] += gz1;
            double* gk = g1 + k * d;
            for (std::size_t j = 0; j < d; ++j) gk[j] += gz1 * x[j];
        }
    }
    return grad;
}

}  // namespace fairgap::nn
