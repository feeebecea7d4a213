#pragma once

// Variational Bayesian network for the plant-model mismatch. The body
// (2 -> 8 ELU -> 8 ELU) is deterministic; the output layer (8 -> 8, no
// activation) carries a mean-field Gaussian posterior sampled by the
// reparameterization W = mu + softplus(rho) (.) eps. The 8 outputs are
// reshaped to the 2x4 matrix h(x), and the prediction is
//     g(x,u) = h(x) [x1; x1*x2; u1; u2].
// Training is Bayes-by-Backprop: minibatch-weighted KL between posterior
// and prior plus a fixed-noise Gaussian likelihood of the g targets.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include <json.hpp>

#include "asmpc/adam.hpp"
#include "asmpc/autodiff.hpp"
#include "asmpc/dataset.hpp"
#include "asmpc/error.hpp"
#include "asmpc/rng.hpp"
#include "asmpc/tensor.hpp"

namespace asmpc {

constexpr std::size_t kBnnIn = 2;
constexpr std::size_t kBnnHidden = 8;
constexpr std::size_t kBnnHeadOut = 8;   // reshaped to 2x4
constexpr std::size_t kRegressorLen = 4; // [rho1, rho2, u1, u2]

struct VariationalPosterior {
    Tensor mu_w;   // (8,8)
    Tensor rho_w;  // (8,8), sigma = softplus(rho)
    Tensor mu_b;   // (8)
    Tensor rho_b;  // (8)

    // Flat parameter order used by the update law: mu_w, rho_w, mu_b, rho_b.
    static constexpr std::size_t param_count() {
        return 2 * kBnnHeadOut * kBnnHidden + 2 * kBnnHeadOut;
    }
};

struct MixturePrior {
    double pi = 0.5;
    double sigma1 = 1.5;
    double sigma2 = 0.1;
};

struct FrozenPosterior {
    VariationalPosterior theta0;
};

using Prior = std::variant<MixturePrior, FrozenPosterior>;

struct BnnBody {
    Tensor w1;  // (8,2)
    Tensor b1;  // (8)
    Tensor w2;  // (8,8)
    Tensor b2;  // (8)
};

struct BnnModel {
    BnnBody body;
    VariationalPosterior head;
    Prior prior = MixturePrior{};
};

inline double softplus_inverse(double sigma) {
    if (!(sigma > 0)) throw ContractError("softplus_inverse: sigma must be positive");
    return sigma + std::log1p(-std::exp(-sigma));
}

inline BnnModel init_bnn(std::uint64_t seed, double sigma_init = 0.05,
                         Prior prior = MixturePrior{}) {
    RngStream rng(seed);
    BnnModel m;
    const double s1 = std::sqrt(2.0 / (kBnnIn + kBnnHidden));
    const double s2 = std::sqrt(2.0 / (2.0 * kBnnHidden));
    m.body.w1 = randn({kBnnHidden, kBnnIn}, rng, s1);
    m.body.b1 = Tensor::zeros({kBnnHidden});
    m.body.w2 = randn({kBnnHidden, kBnnHidden}, rng, s2);
    m.body.b2 = Tensor::zeros({kBnnHidden});
    m.head.mu_w = randn({kBnnHeadOut, kBnnHidden}, rng, s2);
    m.head.mu_b = Tensor::zeros({kBnnHeadOut});
    const double rho0 = softplus_inverse(sigma_init);
    m.head.rho_w = Tensor::full({kBnnHeadOut, kBnnHidden}, rho0);
    m.head.rho_b = Tensor::full({kBnnHeadOut}, rho0);
    m.prior = std::move(prior);
    return m;
}

// ---------------------------------------------------------------------------
// forward graph pieces (work on tracked or constant Vars alike)

// Sampled head weights for one draw; eps is fixed at call time.
struct HeadSample {
    ad::Var w;  // (8,8)
    ad::Var b;  // (8)
};

inline HeadSample sample_head(const ad::Var& mu_w, const ad::Var& rho_w, const ad::Var& mu_b,
                              const ad::Var& rho_b, RngStream& rng) {
    Tensor eps_w({kBnnHeadOut, kBnnHidden});
    for (std::size_t i = 0; i < eps_w.size(); ++i) eps_w[i] = rng.normal();
    Tensor eps_b({kBnnHeadOut});
    for (std::size_t i = 0; i < eps_b.size(); ++i) eps_b[i] = rng.normal();
    return {ad::add(mu_w, ad::mul(ad::softplus(rho_w), ad::Var::constant(eps_w))),
            ad::add(mu_b, ad::mul(ad::softplus(rho_b), ad::Var::constant(eps_b)))};
}

inline ad::Var body_features(const ad::Var& w1, const ad::Var& b1, const ad::Var& w2,
                             const ad::Var& b2, const ad::Var& x) {
    auto h1 = ad::elu(ad::add(ad::matmul(w1, x), b1));
    return ad::elu(ad::add(ad::matmul(w2, h1), b2));
}

// [rho(x); u] = [x1, x1*x2, u1, u2]
inline ad::Var regressor(const ad::Var& x, const ad::Var& u) {
    auto x1 = ad::slice(x, 0, 1);
    auto x2 = ad::slice(x, 1, 1);
    return ad::concat({x1, ad::mul(x1, x2), u});
}

inline ad::Var bnn_predict(const ad::Var& w1, const ad::Var& b1, const ad::Var& w2,
                           const ad::Var& b2, const ad::Var& head_w, const ad::Var& head_b,
                           const ad::Var& x, const ad::Var& u) {
    auto feats = body_features(w1, b1, w2, b2, x);
    auto y = ad::add(ad::matmul(head_w, feats), head_b);
    auto h = ad::reshape(y, {2, kRegressorLen});
    return ad::matmul(h, regressor(x, u));
}

// Eager convenience: prediction with explicitly supplied head weights.
inline std::array<double, 2> bnn_predict_eager(const BnnModel& m, const Tensor& head_w,
                                               const Tensor& head_b, const PlantState& x,
                                               const ControlInput& u) {
    auto c = [](const Tensor& t) { return ad::Var::constant(t); };
    auto g = bnn_predict(c(m.body.w1), c(m.body.b1), c(m.body.w2), c(m.body.b2), c(head_w),
                         c(head_b), c(Tensor::vec({x.x1, x.x2})), c(Tensor::vec({u.u1, u.u2})));
    return {g.value()[0], g.value()[1]};
}

// Eager draw of head weights: W = mu + softplus(rho) (.) eps.
inline std::pair<Tensor, Tensor> sample_weights(const VariationalPosterior& p, RngStream& rng) {
    Tensor w = p.mu_w, b = p.mu_b;
    for (std::size_t i = 0; i < w.size(); ++i) {
        const double sigma = std::max(p.rho_w[i], 0.0) + std::log1p(std::exp(-std::abs(p.rho_w[i])));
        w[i] = p.mu_w[i] + sigma * rng.normal();
    }
    for (std::size_t i = 0; i < b.size(); ++i) {
        const double sigma = std::max(p.rho_b[i], 0.0) + std::log1p(std::exp(-std::abs(p.rho_b[i])));
        b[i] = p.mu_b[i] + sigma * rng.normal();
    }
    return {w, b};
}

// ---------------------------------------------------------------------------
// densities

inline constexpr double kLog2Pi = 1.8378770664093454835606594728112;

// log q(W; mu, rho) for a mean-field Gaussian, evaluated per dimension.
inline ad::Var gaussian_log_density(const ad::Var& w, const ad::Var& mu, const ad::Var& rho) {
    auto sigma = ad::softplus(rho);
    auto z2 = ad::div(ad::square(ad::sub(w, mu)), ad::scale(ad::square(sigma), 2.0));
    auto terms = ad::add(ad::log(sigma), z2);
    const double n = static_cast<double>(w.value().size());
    return ad::add_const(ad::neg(ad::sum(terms)), -0.5 * kLog2Pi * n);
}

inline constexpr double kSqrt2Pi = 2.5066282746310005024157652848110;

// log of the two-component scale mixture prior, elementwise then summed.
inline ad::Var mixture_log_density(const ad::Var& w, const MixturePrior& p) {
    const double c1 = p.pi / (p.sigma1 * kSqrt2Pi);
    const double c2 = (1.0 - p.pi) / (p.sigma2 * kSqrt2Pi);
    auto w2 = ad::square(w);
    auto n1 = ad::scale(ad::exp(ad::scale(w2, -0.5 / (p.sigma1 * p.sigma1))), c1);
    auto n2 = ad::scale(ad::exp(ad::scale(w2, -0.5 / (p.sigma2 * p.sigma2))), c2);
    return ad::sum(ad::log(ad::add(n1, n2)));
}

// Concatenated [weight entries, bias entries] of a posterior: the order
// used whenever head parameters are flattened.
inline Tensor posterior_mu_flat(const VariationalPosterior& p) {
    std::vector<double> v(p.mu_w.values());
    v.insert(v.end(), p.mu_b.values().begin(), p.mu_b.values().end());
    return Tensor::vec(std::move(v));
}

inline Tensor posterior_rho_flat(const VariationalPosterior& p) {
    std::vector<double> v(p.rho_w.values());
    v.insert(v.end(), p.rho_b.values().begin(), p.rho_b.values().end());
    return Tensor::vec(std::move(v));
}

// log p(W) under the model prior (mixture or frozen posterior).
inline ad::Var prior_log_density(const ad::Var& w_flat, const Prior& prior) {
    if (std::holds_alternative<MixturePrior>(prior))
        return mixture_log_density(w_flat, std::get<MixturePrior>(prior));
    const auto& fp = std::get<FrozenPosterior>(prior);
    return gaussian_log_density(w_flat, ad::Var::constant(posterior_mu_flat(fp.theta0)),
                                ad::Var::constant(posterior_rho_flat(fp.theta0)));
}

// ---------------------------------------------------------------------------
// ELBO

struct BnnLeaves {
    ad::Var w1, b1, w2, b2, mu_w, rho_w, mu_b, rho_b;
};

inline BnnLeaves make_bnn_leaves(ad::Tape& tape, const BnnModel& m) {
    return {tape.leaf(m.body.w1),   tape.leaf(m.body.b1),   tape.leaf(m.body.w2),
            tape.leaf(m.body.b2),   tape.leaf(m.head.mu_w), tape.leaf(m.head.rho_w),
            tape.leaf(m.head.mu_b), tape.leaf(m.head.rho_b)};
}

inline std::vector<Tensor*> bnn_params(BnnModel& m) {
    return {&m.body.w1,   &m.body.b1,   &m.body.w2,   &m.body.b2,
            &m.head.mu_w, &m.head.rho_w, &m.head.mu_b, &m.head.rho_b};
}

// Gaussian NLL of the g targets of `batch` under one weight draw, summed
// over records (Bayes-by-Backprop minibatch convention).
inline ad::Var batch_nll(const BnnLeaves& lv, const HeadSample& hs,
                         const TransitionDataset& ds, const std::vector<std::size_t>& batch,
                         double sigma_obs) {
    ad::Var acc;
    bool first = true;
    for (std::size_t idx : batch) {
        const Transition& r = ds.records[idx];
        auto g = bnn_predict(lv.w1, lv.b1, lv.w2, lv.b2, hs.w, hs.b,
                             ad::Var::constant(Tensor::vec({r.x.x1, r.x.x2})),
                             ad::Var::constant(Tensor::vec({r.u.u1, r.u.u2})));
        auto err = ad::sub(g, ad::Var::constant(Tensor::vec({r.g1, r.g2})));
        auto sq = ad::sum(ad::square(err));
        acc = first ? sq : ad::add(acc, sq);
        first = false;
    }
    const double n_terms = 2.0 * static_cast<double>(batch.size());
    return ad::add_const(ad::scale(acc, 0.5 / (sigma_obs * sigma_obs)),
                         0.5 * n_terms * (kLog2Pi + 2.0 * std::log(sigma_obs)));
}

// Monte-Carlo ELBO over n_samples draws:
//   kl_weight * (log q(W) - log p(W)) + NLL(batch | W).
inline ad::Var elbo_loss(const BnnLeaves& lv, const BnnModel& m, const TransitionDataset& ds,
                         const std::vector<std::size_t>& batch, std::size_t n_samples,
                         double kl_weight, double sigma_obs, RngStream& rng) {
    if (batch.empty()) throw ContractError("elbo_loss: empty batch");
    if (n_samples < 1) throw ContractError("elbo_loss: n_samples must be >= 1");
    ad::Var total;
    for (std::size_t s = 0; s < n_samples; ++s) {
        HeadSample hs = sample_head(lv.mu_w, lv.rho_w, lv.mu_b, lv.rho_b, rng);
        auto w_flat = ad::concat({hs.w, hs.b});
        auto mu_flat = ad::concat({lv.mu_w, lv.mu_b});
        auto rho_flat = ad::concat({lv.rho_w, lv.rho_b});
        auto log_q = gaussian_log_density(w_flat, mu_flat, rho_flat);
        auto log_p = prior_log_density(w_flat, m.prior);
        auto kl = ad::scale(ad::sub(log_q, log_p), kl_weight);
        auto draw = ad::add(kl, batch_nll(lv, hs, ds, batch, sigma_obs));
        total = s == 0 ? draw : ad::add(total, draw);
    }
    return ad::scale(total, 1.0 / static_cast<double>(n_samples));
}

// ---------------------------------------------------------------------------
// prediction statistics

struct McStats {
    std::array<double, 2> mean{};
    std::array<double, 2> stddev{};  // population (1/N)
};

// Sample mean / std over n_mc forward draws. Each draw uses its own
// substream, so the result is independent of threading.
inline McStats mc_stats(const BnnModel& m, const PlantState& x, const ControlInput& u,
                        std::size_t n_mc, const RngStream& stream, int threads = 1) {
    if (n_mc < 2) throw ContractError("mc_stats: n_mc must be >= 2");
    std::vector<std::array<double, 2>> draws(n_mc);
    auto run_range = [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            RngStream r = stream.substream(i);
            auto [w, b] = sample_weights(m.head, r);
            draws[i] = bnn_predict_eager(m, w, b, x, u);
        }
    };
    if (threads <= 1 || n_mc < 8) {
        run_range(0, n_mc);
    } else {
        const std::size_t t = std::min<std::size_t>(threads, n_mc);
        std::vector<std::thread> pool;
        for (std::size_t j = 0; j < t; ++j) {
            const std::size_t lo = n_mc * j / t, hi = n_mc * (j + 1) / t;
            pool.emplace_back(run_range, lo, hi);
        }
        for (auto& th : pool) th.join();
    }
    McStats s;
    for (int c = 0; c < 2; ++c) {
        double mean = 0;
        for (const auto& d : draws) mean += d[c];
        mean /= static_cast<double>(n_mc);
        double var = 0;
        for (const auto& d : draws) var += (d[c] - mean) * (d[c] - mean);
        var /= static_cast<double>(n_mc);
        s.mean[c] = mean;
        s.stddev[c] = std::sqrt(var);
    }
    return s;
}

// ---------------------------------------------------------------------------
// training

struct TrainOptions {
    int epochs = 3000;
    int batch = 32;
    double lr = 1e-3;
    std::size_t n_samples = 1;
    double sigma_obs = 0.05;
    std::uint64_t seed = 3;
    int eval_every = 25;  // held-out NLL cadence for early-keep
};

struct TrainResult {
    std::vector<double> epoch_loss;
    std::vector<double> heldout_nll;  // sampled every eval_every epochs
    int best_epoch = -1;
    double best_heldout_nll = 0.0;
};

// Held-out Gaussian NLL of posterior-mean predictions (per record).
inline double heldout_mean_nll(const BnnModel& m, const TransitionDataset& ds,
                               const std::vector<std::size_t>& idx, double sigma_obs) {
    double acc = 0;
    for (std::size_t i : idx) {
        const Transition& r = ds.records[i];
        auto g = bnn_predict_eager(m, m.head.mu_w, m.head.mu_b, r.x, r.u);
        const double e1 = g[0] - r.g1, e2 = g[1] - r.g2;
        acc += (e1 * e1 + e2 * e2) / (2 * sigma_obs * sigma_obs) +
               kLog2Pi + 2.0 * std::log(sigma_obs);
    }
    return acc / static_cast<double>(idx.size());
}

// Deterministic pretraining of the same architecture with MSE loss; the
// trained weights seed the BNN (ANN-to-BNN transfer).
inline TrainResult train_ann(BnnModel& m, const TransitionDataset& ds,
                             const std::vector<std::size_t>& train_idx, const TrainOptions& opt) {
    if (!ds.has_g) throw ContractError("train_ann: dataset has no mismatch targets");
    RngStream order_rng(opt.seed);
    Adam adam(opt.lr);
    TrainResult res;
    std::vector<std::size_t> order = train_idx;
    for (int epoch = 0; epoch < opt.epochs; ++epoch) {
        order_rng.shuffle(order.data(), order.size());
        double epoch_loss = 0;
        std::size_t steps = 0;
        for (std::size_t at = 0; at < order.size(); at += opt.batch) {
            const std::size_t hi = std::min(order.size(), at + opt.batch);
            std::vector<std::size_t> batch(order.begin() + at, order.begin() + hi);
            ad::Tape tape;
            auto lv = make_bnn_leaves(tape, m);
            ad::Var acc;
            for (std::size_t bi = 0; bi < batch.size(); ++bi) {
                const Transition& r = ds.records[batch[bi]];
                auto g = bnn_predict(lv.w1, lv.b1, lv.w2, lv.b2, lv.mu_w, lv.mu_b,
                                     ad::Var::constant(Tensor::vec({r.x.x1, r.x.x2})),
                                     ad::Var::constant(Tensor::vec({r.u.u1, r.u.u2})));
                auto sq = ad::sum(ad::square(
                    ad::sub(g, ad::Var::constant(Tensor::vec({r.g1, r.g2})))));
                acc = bi == 0 ? sq : ad::add(acc, sq);
            }
            auto loss = ad::scale(acc, 1.0 / static_cast<double>(batch.size()));
            tape.backward(loss);
            // rho has no gradient in the deterministic pass
            std::vector<Tensor> grads{lv.w1.grad(),
                                      lv.b1.grad(),
                                      lv.w2.grad(),
                                      lv.b2.grad(),
                                      lv.mu_w.grad(),
                                      Tensor::zeros(m.head.rho_w.shape()),
                                      lv.mu_b.grad(),
                                      Tensor::zeros(m.head.rho_b.shape())};
            adam.step(bnn_params(m), grads);
            epoch_loss += loss.value()[0];
            ++steps;
        }
        res.epoch_loss.push_back(epoch_loss / static_cast<double>(steps));
    }
    return res;
}

inline TrainResult train_bnn(BnnModel& m, const TransitionDataset& ds,
                             const std::vector<std::size_t>& train_idx,
                             const std::vector<std::size_t>& heldout_idx,
                             const TrainOptions& opt) {
    if (!ds.has_g) throw ContractError("train_bnn: dataset has no mismatch targets");
    if (train_idx.empty()) throw ContractError("train_bnn: empty training set");
    RngStream order_rng(opt.seed);
    RngStream eps_rng(RngStream(opt.seed).substream(1).next_u64());
    Adam adam(opt.lr);
    TrainResult res;
    const std::size_t n_batches = (train_idx.size() + opt.batch - 1) / opt.batch;
    const double kl_weight = 1.0 / static_cast<double>(n_batches);
    std::vector<std::size_t> order = train_idx;
    BnnModel best = m;
    res.best_heldout_nll = heldout_idx.empty()
                               ? 0.0
                               : heldout_mean_nll(m, ds, heldout_idx, opt.sigma_obs);
    int last_finite_epoch = -1;
    for (int epoch = 0; epoch < opt.epochs; ++epoch) {
        order_rng.shuffle(order.data(), order.size());
        double epoch_loss = 0;
        std::size_t steps = 0;
        try {
            for (std::size_t at = 0; at < order.size(); at += opt.batch) {
                const std::size_t hi = std::min(order.size(), at + opt.batch);
                std::vector<std::size_t> batch(order.begin() + at, order.begin() + hi);
                ad::Tape tape;
                auto lv = make_bnn_leaves(tape, m);
                auto loss =
                    elbo_loss(lv, m, ds, batch, opt.n_samples, kl_weight, opt.sigma_obs, eps_rng);
                tape.backward(loss);
                std::vector<Tensor> grads{lv.w1.grad(),    lv.b1.grad(),  lv.w2.grad(),
                                          lv.b2.grad(),    lv.mu_w.grad(), lv.rho_w.grad(),
                                          lv.mu_b.grad(),  lv.rho_b.grad()};
                adam.step(bnn_params(m), grads);
                epoch_loss += loss.value()[0];
                ++steps;
            }
        } catch (const NumericError& e) {
            throw DivergenceError("train_bnn: loss diverged at epoch " + std::to_string(epoch) +
                                  " (last finite epoch " + std::to_string(last_finite_epoch) +
                                  "): " + e.what());
        }
        last_finite_epoch = epoch;
        res.epoch_loss.push_back(epoch_loss / static_cast<double>(steps));
        if (!heldout_idx.empty() &&
            (epoch % opt.eval_every == 0 || epoch == opt.epochs - 1)) {
            const double nll = heldout_mean_nll(m, ds, heldout_idx, opt.sigma_obs);
            res.heldout_nll.push_back(nll);
            if (res.best_epoch < 0 || nll < res.best_heldout_nll) {
                res.best_heldout_nll = nll;
                res.best_epoch = epoch;
                best = m;
            }
        }
    }
    if (res.best_epoch >= 0) m = best;
    return res;
}

// ---------------------------------------------------------------------------
// checkpoints

inline nlohmann::json posterior_to_json(const VariationalPosterior& p) {
    return {{"mu_w", p.mu_w.values()},
            {"rho_w", p.rho_w.values()},
            {"mu_b", p.mu_b.values()},
            {"rho_b", p.rho_b.values()}};
}

inline VariationalPosterior posterior_from_json(const nlohmann::json& j) {
    VariationalPosterior p;
    p.mu_w = Tensor({kBnnHeadOut, kBnnHidden}, j.at("mu_w").get<std::vector<double>>());
    p.rho_w = Tensor({kBnnHeadOut, kBnnHidden}, j.at("rho_w").get<std::vector<double>>());
    p.mu_b = Tensor({kBnnHeadOut}, j.at("mu_b").get<std::vector<double>>());
    p.rho_b = Tensor({kBnnHeadOut}, j.at("rho_b").get<std::vector<double>>());
    return p;
}

inline nlohmann::json bnn_to_json(const BnnModel& m) {
    nlohmann::json j;
    j["body"] = {{{"w", m.body.w1.values()}, {"b", m.body.b1.values()}},
                 {{"w", m.body.w2.values()}, {"b", m.body.b2.values()}}};
    j["head"] = posterior_to_json(m.head);
    if (std::holds_alternative<MixturePrior>(m.prior)) {
        const auto& p = std::get<MixturePrior>(m.prior);
        j["prior"] = {{"type", "mixture"}, {"pi", p.pi}, {"sigma1", p.sigma1},
                      {"sigma2", p.sigma2}};
    } else {
        j["prior"] = {{"type", "frozen"},
                      {"theta0", posterior_to_json(std::get<FrozenPosterior>(m.prior).theta0)}};
    }
    return j;
}

inline BnnModel bnn_from_json(const nlohmann::json& j) {
    BnnModel m;
    m.body.w1 = Tensor({kBnnHidden, kBnnIn}, j.at("body").at(0).at("w").get<std::vector<double>>());
    m.body.b1 = Tensor({kBnnHidden}, j.at("body").at(0).at("b").get<std::vector<double>>());
    m.body.w2 =
        Tensor({kBnnHidden, kBnnHidden}, j.at("body").at(1).at("w").get<std::vector<double>>());
    m.body.b2 = Tensor({kBnnHidden}, j.at("body").at(1).at("b").get<std::vector<double>>());
    m.head = posterior_from_json(j.at("head"));
    const auto& pj = j.at("prior");
    if (pj.at("type") == "mixture") {
        m.prior = MixturePrior{pj.at("pi").get<double>(), pj.at("sigma1").get<double>(),
                               pj.at("sigma2").get<double>()};
    } else {
        m.prior = FrozenPosterior{posterior_from_json(pj.at("theta0"))};
    }
    return m;
}

inline void save_bnn_json(const BnnModel& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("save_bnn_json: cannot open " + path);
    out << bnn_to_json(m).dump(2) << '\n';
}

inline BnnModel load_bnn_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("load_bnn_json: cannot open " + path);
    nlohmann::json j;
    in >> j;
    return bnn_from_json(j);
}

}  // namespace asmpc
