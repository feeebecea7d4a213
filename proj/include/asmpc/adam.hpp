#pragma once

// Adam over a flat list of parameter tensors. State order must match the
// parameter order on every step.

#include <vector>

#include "asmpc/error.hpp"
#include "asmpc/tensor.hpp"

namespace asmpc {

class Adam {
public:
    explicit Adam(double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8)
        : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}

    void step(std::vector<Tensor*> params, const std::vector<Tensor>& grads) {
        if (params.size() != grads.size())
            throw ContractError("Adam::step: parameter/gradient count mismatch");
        if (m_.empty()) {
            for (const Tensor* p : params) {
                m_.push_back(Tensor::zeros(p->shape()));
                v_.push_back(Tensor::zeros(p->shape()));
            }
        }
        ++t_;
        const double bc1 = 1.0 - std::pow(beta1_, t_);
        const double bc2 = 1.0 - std::pow(beta2_, t_);
        for (std::size_t j = 0; j < params.size(); ++j) {
            Tensor& p = *params[j];
            const Tensor& g = grads[j];
            for (std::size_t i = 0; i < p.size(); ++i) {
                m_[j][i] = beta1_ * m_[j][i] + (1.0 - beta1_) * g[i];
                v_[j][i] = beta2_ * v_[j][i] + (1.0 - beta2_) * g[i] * g[i];
                const double mhat = m_[j][i] / bc1;
                const double vhat = v_[j][i] / bc2;
                p[i] -= lr_ * mhat / (std::sqrt(vhat) + eps_);
            }
        }
    }

    double lr() const { return lr_; }

private:
    double lr_, beta1_, beta2_, eps_;
    long t_ = 0;
    std::vector<Tensor> m_, v_;
};

}  // namespace asmpc
