#pragma once

#include "socsim/rng.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace socsim {

// Shared-trunk function approximator: two tanh hidden layers feeding a
// policy-logit head and a scalar value head. Parameters live in one flat
// vector so the optimizer, checkpointing, and finite-difference checks can
// treat the model as theta in R^n.
class PolicyModel {
public:
    PolicyModel(int input_dim, int policy_out, int hidden = 128);

    int input_dim() const { return input_dim_; }
    int policy_out() const { return policy_out_; }
    int hidden() const { return hidden_; }

    std::vector<double>& params() { return theta_; }
    const std::vector<double>& params() const { return theta_; }
    std::size_t param_count() const { return theta_.size(); }

    void init_params(Rng& rng); // Xavier-uniform weights, zero biases

    struct Forward {
        std::vector<double> h1;
        std::vector<double> h2;
        std::vector<double> logits;
        double value = 0.0;
    };
    Forward forward(std::span<const double> input) const;

    // Accumulates d(loss)/d(theta) into grad given upstream gradients on the
    // logits and the value output. grad must have param_count() entries.
    void backward(std::span<const double> input, const Forward& fwd, std::span<const double> dlogits,
                  double dvalue, std::span<double> grad) const;

private:
    int input_dim_;
    int policy_out_;
    int hidden_;
    std::vector<double> theta_;

    // flat layout offsets
    std::size_t w1_, b1_, w2_, b2_, wp_, bp_, wv_, bv_;
};

struct MaskedDistribution {
    std::vector<double> probs;     // exactly 0 on masked entries
    std::vector<double> log_probs; // -inf on masked entries
    double entropy = 0.0;          // -sum p log p over allowed entries
};

// Softmax restricted to mask[i] != 0. Throws when everything is masked.
MaskedDistribution masked_softmax(std::span<const double> logits, std::span<const std::uint8_t> mask);

// Inverse-CDF sample from a masked distribution.
int sample_masked(const MaskedDistribution& dist, Rng& rng);

class AdamOptimizer {
public:
    AdamOptimizer(std::size_t dim, double lr = 3e-4, double beta1 = 0.9, double beta2 = 0.999,
                  double eps = 1e-8);

    void step(std::span<double> params, std::span<const double> grad);

    double lr = 3e-4;
    std::vector<double>& first_moment() { return m_; }
    std::vector<double>& second_moment() { return v_; }
    std::int64_t step_count() const { return t_; }
    void set_state(std::vector<double> m, std::vector<double> v, std::int64_t t);

private:
    double beta1_, beta2_, eps_;
    std::vector<double> m_, v_;
    std::int64_t t_ = 0;
};

// Scales grad in place so its global L2 norm is at most max_norm.
void clip_global_norm(std::span<double> grad, double max_norm);

} // namespace socsim
