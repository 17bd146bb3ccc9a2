#include "socsim/policy_model.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace socsim {

PolicyModel::PolicyModel(int input_dim, int policy_out, int hidden)
    : input_dim_(input_dim), policy_out_(policy_out), hidden_(hidden) {
    if (input_dim <= 0 || policy_out <= 0 || hidden <= 0)
        throw std::invalid_argument("PolicyModel: dimensions must be positive");
    auto d = static_cast<std::size_t>(input_dim);
    auto h = static_cast<std::size_t>(hidden);
    auto p = static_cast<std::size_t>(policy_out);
    w1_ = 0;
    b1_ = w1_ + h * d;
    w2_ = b1_ + h;
    b2_ = w2_ + h * h;
    wp_ = b2_ + h;
    bp_ = wp_ + p * h;
    wv_ = bp_ + p;
    bv_ = wv_ + h;
    theta_.assign(bv_ + 1, 0.0);
}

void PolicyModel::init_params(Rng& rng) {
    auto xavier = [&](std::size_t offset, std::size_t rows, std::size_t cols) {
        double r = std::sqrt(6.0 / static_cast<double>(rows + cols));
        for (std::size_t i = 0; i < rows * cols; ++i) theta_[offset + i] = (rng.uniform01() * 2.0 - 1.0) * r;
    };
    auto d = static_cast<std::size_t>(input_dim_);
    auto h = static_cast<std::size_t>(hidden_);
    auto p = static_cast<std::size_t>(policy_out_);
    xavier(w1_, h, d);
    xavier(w2_, h, h);
    xavier(wp_, p, h);
    xavier(wv_, 1, h);
    for (std::size_t i = 0; i < h; ++i) theta_[b1_ + i] = 0.0;
    for (std::size_t i = 0; i < h; ++i) theta_[b2_ + i] = 0.0;
    for (std::size_t i = 0; i < p; ++i) theta_[bp_ + i] = 0.0;
    theta_[bv_] = 0.0;
}

PolicyModel::Forward PolicyModel::forward(std::span<const double> input) const {
    if (input.size() != static_cast<std::size_t>(input_dim_))
        throw std::invalid_argument("PolicyModel::forward: bad input size");
    auto d = static_cast<std::size_t>(input_dim_);
    auto h = static_cast<std::size_t>(hidden_);
    auto p = static_cast<std::size_t>(policy_out_);

    Forward f;
    f.h1.resize(h);
    f.h2.resize(h);
    f.logits.resize(p);
    for (std::size_t i = 0; i < h; ++i) {
        double acc = theta_[b1_ + i];
        const double* row = &theta_[w1_ + i * d];
        for (std::size_t j = 0; j < d; ++j) acc += row[j] * input[j];
        f.h1[i] = std::tanh(acc);
    }
    for (std::size_t i = 0; i < h; ++i) {
        double acc = theta_[b2_ + i];
        const double* row = &theta_[w2_ + i * h];
        for (std::size_t j = 0; j < h; ++j) acc += row[j] * f.h1[j];
        f.h2[i] = std::tanh(acc);
    }
    for (std::size_t i = 0; i < p; ++i) {
        double acc = theta_[bp_ + i];
        const double* row = &theta_[wp_ + i * h];
        for (std::size_t j = 0; j < h; ++j) acc += row[j] * f.h2[j];
        f.logits[i] = acc;
    }
    double v = theta_[bv_];
    for (std::size_t j = 0; j < h; ++j) v += theta_[wv_ + j] * f.h2[j];
    f.value = v;
    return f;
}

void PolicyModel::backward(std::span<const double> input, const Forward& fwd, std::span<const double> dlogits,
                           double dvalue, std::span<double> grad) const {
    if (grad.size() != theta_.size()) throw std::invalid_argument("PolicyModel::backward: bad grad size");
    if (dlogits.size() != static_cast<std::size_t>(policy_out_))
        throw std::invalid_argument("PolicyModel::backward: bad dlogits size");
    auto d = static_cast<std::size_t>(input_dim_);
    auto h = static_cast<std::size_t>(hidden_);
    auto p = static_cast<std::size_t>(policy_out_);

    std::vector<double> dh2(h, 0.0);
    for (std::size_t i = 0; i < p; ++i) {
        double g = dlogits[i];
        if (g == 0.0) continue;
        grad[bp_ + i] += g;
        const double* row = &theta_[wp_ + i * h];
        double* grow = &grad[wp_ + i * h];
        for (std::size_t j = 0; j < h; ++j) {
            grow[j] += g * fwd.h2[j];
            dh2[j] += g * row[j];
        }
    }
    if (dvalue != 0.0) {
        grad[bv_] += dvalue;
        for (std::size_t j = 0; j < h; ++j) {
            grad[wv_ + j] += dvalue * fwd.h2[j];
            dh2[j] += dvalue * theta_[wv_ + j];
        }
    }

    std::vector<double> dh1(h, 0.0);
    for (std::size_t i = 0; i < h; ++i) {
        double g = dh2[i] * (1.0 - fwd.h2[i] * fwd.h2[i]); // through tanh
        if (g == 0.0) continue;
        grad[b2_ + i] += g;
        const double* row = &theta_[w2_ + i * h];
        double* grow = &grad[w2_ + i * h];
        for (std::size_t j = 0; j < h; ++j) {
            grow[j] += g * fwd.h1[j];
            dh1[j] += g * row[j];
        }
    }
    for (std::size_t i = 0; i < h; ++i) {
        double g = dh1[i] * (1.0 - fwd.h1[i] * fwd.h1[i]);
        if (g == 0.0) continue;
        grad[b1_ + i] += g;
        double* grow = &grad[w1_ + i * d];
        for (std::size_t j = 0; j < d; ++j) grow[j] += g * input[j];
    }
}

MaskedDistribution masked_softmax(std::span<const double> logits, std::span<const std::uint8_t> mask) {
    if (logits.size() != mask.size()) throw std::invalid_argument("masked_softmax: size mismatch");
    double zmax = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < logits.size(); ++i)
        if (mask[i] && logits[i] > zmax) zmax = logits[i];
    if (!std::isfinite(zmax)) throw std::invalid_argument("masked_softmax: every entry is masked");

    MaskedDistribution dist;
    dist.probs.assign(logits.size(), 0.0);
    dist.log_probs.assign(logits.size(), -std::numeric_limits<double>::infinity());
    double sum = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i)
        if (mask[i]) sum += std::exp(logits[i] - zmax);
    double log_sum = std::log(sum);
    for (std::size_t i = 0; i < logits.size(); ++i) {
        if (!mask[i]) continue;
        double lp = logits[i] - zmax - log_sum;
        dist.log_probs[i] = lp;
        dist.probs[i] = std::exp(lp);
        dist.entropy -= dist.probs[i] * lp;
    }
    return dist;
}

int sample_masked(const MaskedDistribution& dist, Rng& rng) {
    double u = rng.uniform01();
    double acc = 0.0;
    int last_allowed = -1;
    for (std::size_t i = 0; i < dist.probs.size(); ++i) {
        if (dist.probs[i] <= 0.0) continue;
        last_allowed = static_cast<int>(i);
        acc += dist.probs[i];
        if (u < acc) return static_cast<int>(i);
    }
    return last_allowed; // rounding left acc slightly below 1
}

AdamOptimizer::AdamOptimizer(std::size_t dim, double lr_, double beta1, double beta2, double eps)
    : lr(lr_), beta1_(beta1), beta2_(beta2), eps_(eps), m_(dim, 0.0), v_(dim, 0.0) {}

void AdamOptimizer::step(std::span<double> params, std::span<const double> grad) {
    if (params.size() != m_.size() || grad.size() != m_.size())
        throw std::invalid_argument("AdamOptimizer::step: size mismatch");
    ++t_;
    double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    for (std::size_t i = 0; i < params.size(); ++i) {
        m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grad[i];
        v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grad[i] * grad[i];
        double mhat = m_[i] / bc1;
        double vhat = v_[i] / bc2;
        params[i] -= lr * mhat / (std::sqrt(vhat) + eps_);
    }
}

void AdamOptimizer::set_state(std::vector<double> m, std::vector<double> v, std::int64_t t) {
    if (m.size() != m_.size() || v.size() != v_.size())
        throw std::invalid_argument("AdamOptimizer::set_state: size mismatch");
    m_ = std::move(m);
    v_ = std::move(v);
    t_ = t;
}

void clip_global_norm(std::span<double> grad, double max_norm) {
    double sq = 0.0;
    for (double g : grad) sq += g * g;
    double norm = std::sqrt(sq);
    if (norm <= max_norm || norm == 0.0) return;
    double scale = max_norm / norm;
    for (double& g : grad) g *= scale;
}

} // namespace socsim
