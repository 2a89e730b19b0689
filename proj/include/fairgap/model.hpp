#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace fairgap::nn {

// Dense row-major matrix of doubles; the only tensor shape the models need.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
    double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    std::span<const double> row(std::size_t r) const {
        return std::span<const double>(data).subspan(r * cols, cols);
    }
};

enum class Activation { relu, tanh };

Activation activation_from_string(const std::string& s);
std::string to_string(Activation a);

// hidden_dim = 0 selects plain logistic regression; otherwise a one-hidden-
// layer perceptron with the given width and activation, sigmoid output.
struct ModelSpec {
    int input_dim = 0;
    int hidden_dim = 0;
    Activation activation = Activation::relu;
    std::uint64_t seed = 0;

    void validate() const;
};

std::size_t param_count(const ModelSpec& spec);

// Flat parameter storage. Layout for the MLP: W1 (hidden x input, row-major),
// b1, w2, b2. For logistic regression: w, b.
struct ParameterVector {
    std::vector<double> values;
    int input_dim = 0;
    int hidden_dim = 0;

    std::size_t size() const { return values.size(); }
    bool all_finite() const;
};

// Glorot-style uniform init (+-sqrt(6/(fan_in+fan_out))), zero biases,
// deterministic in the model seed.
ParameterVector init_params(const ModelSpec& spec);

// Per-sample probabilities in (0,1); output clamped to [1e-12, 1 - 1e-12].
std::vector<double> forward(const ModelSpec& spec, const ParameterVector& params,
                            const Matrix& features);

// Reverse-mode pass: given dLoss/dprob per sample, produce dLoss/dparams.
// This is the whole gradient machinery; objectives supply dLoss/dprob.
ParameterVector backward_from_prob_grad(const ModelSpec& spec, const ParameterVector& params,
                                        const Matrix& features,
                                        std::span<const double> dloss_dprob);

}  // namespace fairgap::nn
