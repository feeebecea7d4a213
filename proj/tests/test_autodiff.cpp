#include <catch2/catch_amalgamated.hpp>

#include "asmpc/autodiff.hpp"
#include "asmpc/rng.hpp"
#include "test_util.hpp"

using namespace asmpc;
namespace adx = asmpc::ad;

TEST_CASE("matmul identity and ELU branches", "[autodiff]") {
    adx::Var I = adx::Var::constant(Tensor::mat(2, 2, {1, 0, 0, 1}));
    adx::Var v = adx::Var::constant(Tensor::mat(2, 1, {3, 4}));
    auto r = adx::matmul(I, v);
    CHECK(r.value()[0] == 3.0);
    CHECK(r.value()[1] == 4.0);

    auto e1 = adx::elu(adx::Var::constant(Tensor::scalar(-30.0)));
    CHECK(e1.value()[0] == Catch::Approx(-1.0).epsilon(1e-9));
    auto e2 = adx::elu(adx::Var::constant(Tensor::scalar(2.0)));
    CHECK(e2.value()[0] == 2.0);

    auto sp = adx::softplus(adx::Var::constant(Tensor::scalar(0.0)));
    CHECK(sp.value()[0] == Catch::Approx(0.6931471805599453).epsilon(1e-12));
}

TEST_CASE("constant-only ops stay off the tape", "[autodiff]") {
    adx::Tape tape;
    auto a = adx::Var::constant(Tensor::vec({1, 2}));
    auto b = adx::Var::constant(Tensor::vec({3, 4}));
    auto c = adx::add(a, b);
    CHECK_FALSE(c.tracked());
    CHECK(tape.node_count() == 0);

    auto t = tape.leaf(Tensor::vec({1, 1}));
    auto d = adx::add(t, b);
    CHECK(d.tracked());
    CHECK(tape.node_count() == 2);
}

TEST_CASE("d/dx x^2 at 3 is 6; reparameterization passthrough", "[autodiff]") {
    adx::Tape tape;
    auto x = tape.leaf(Tensor::scalar(3.0));
    auto y = adx::square(x);
    tape.backward(y);
    CHECK(x.grad()[0] == 6.0);

    tape.reset();
    auto mu = tape.leaf(Tensor::vec({0.3, -0.7, 1.1}));
    auto sigma = adx::Var::constant(Tensor::vec({0.5, 0.2, 0.9}));
    auto eps = adx::Var::constant(Tensor::vec({1.3, -0.2, 0.4}));
    auto w = adx::add(mu, adx::mul(sigma, eps));
    auto loss = adx::sum(w);
    tape.backward(loss);
    for (std::size_t i = 0; i < 3; ++i) CHECK(mu.grad()[i] == 1.0);
}

TEST_CASE("backward contract violations", "[autodiff]") {
    adx::Tape tape;
    auto x = tape.leaf(Tensor::vec({1, 2}));
    auto y = adx::square(x);
    CHECK_THROWS_AS(tape.backward(y), ContractError);  // non-scalar

    auto s = adx::sum(y);
    tape.backward(s);
    CHECK_THROWS_AS(tape.backward(s), ContractError);  // repeated

    auto c = adx::Var::constant(Tensor::scalar(1.0));
    adx::Tape other;
    CHECK_THROWS_AS(other.backward(c), ContractError);  // untracked
}

TEST_CASE("shape mismatch names the primitive", "[autodiff]") {
    auto a = adx::Var::constant(Tensor::vec({1, 2}));
    auto b = adx::Var::constant(Tensor::vec({1, 2, 3}));
    try {
        adx::add(a, b);
        FAIL("expected ContractError");
    } catch (const ContractError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("add") != std::string::npos);
        CHECK(msg.find("[2]") != std::string::npos);
        CHECK(msg.find("[3]") != std::string::npos);
    }
    auto m = adx::Var::constant(Tensor::mat(2, 3, {1, 2, 3, 4, 5, 6}));
    CHECK_THROWS_AS(adx::matmul(m, a), ContractError);
}

namespace {

// Builds a scalar expression exercising one primitive inside a smooth
// composite, evaluates it from `params`, and returns the loss Var.
double run_composite(const char* prim, std::vector<Tensor>& params, std::vector<Tensor>* grads) {
    adx::Tape tape;
    auto a = tape.leaf(params[0]);
    auto b = tape.leaf(params[1]);
    adx::Var out;
    const std::string p = prim;
    if (p == "add") out = adx::add(a, b);
    else if (p == "sub") out = adx::sub(a, b);
    else if (p == "mul") out = adx::mul(a, b);
    else if (p == "div") out = adx::div(a, adx::add_const(adx::square(b), 1.0));
    else if (p == "elu") out = adx::elu(adx::sub(a, b));
    else if (p == "softplus") out = adx::softplus(adx::mul(a, b));
    else if (p == "square") out = adx::square(adx::add(a, b));
    else if (p == "exp") out = adx::exp(adx::scale(adx::sub(a, b), 0.3));
    else if (p == "log") out = adx::log(adx::add_const(adx::square(adx::add(a, b)), 0.5));
    else if (p == "relu") out = adx::relu(adx::sub(a, b));
    else if (p == "neg") out = adx::neg(adx::mul(a, b));
    else if (p == "scalar_mul") out = adx::mul(adx::slice(a, 0, 1), b);
    else throw std::runtime_error("unknown primitive");
    auto loss = adx::mean(adx::square(out));
    if (grads) {
        tape.backward(loss);
        *grads = {a.grad(), b.grad()};
    }
    return loss.value()[0];
}

double run_matmul(std::vector<Tensor>& params, std::vector<Tensor>* grads) {
    adx::Tape tape;
    auto a = tape.leaf(params[0]);  // 3x4
    auto b = tape.leaf(params[1]);  // flattened 4x2 stored as size-8 vec
    auto bm = adx::reshape(b, {4, 2});
    auto out = adx::matmul(a, bm);
    auto loss = adx::mean(adx::square(out));
    if (grads) {
        tape.backward(loss);
        *grads = {a.grad(), b.grad()};
    }
    return loss.value()[0];
}

}  // namespace

TEST_CASE("every primitive matches central finite differences", "[autodiff][oracle]") {
    RngStream rng(20240811);
    const char* prims[] = {"add", "sub", "mul", "div",  "elu", "softplus",
                           "square", "exp", "log", "relu", "neg", "scalar_mul"};
    for (const char* prim : prims) {
        for (int rep = 0; rep < 5; ++rep) {
            std::vector<Tensor> params{randn({6}, rng), randn({6}, rng)};
            std::vector<Tensor> grads;
            run_composite(prim, params, &grads);
            auto rep_fd = test_util::fd_compare(
                params, [&] { return run_composite(prim, params, nullptr); }, grads);
            INFO("primitive " << prim << " rep " << rep);
            CHECK(rep_fd.max_rel_err < 1e-4);
        }
    }
    for (int rep = 0; rep < 5; ++rep) {
        std::vector<Tensor> params{randn({3, 4}, rng), randn({8}, rng)};
        std::vector<Tensor> grads;
        run_matmul(params, &grads);
        auto rep_fd =
            test_util::fd_compare(params, [&] { return run_matmul(params, nullptr); }, grads);
        CHECK(rep_fd.max_rel_err < 1e-4);
    }
}

TEST_CASE("concat and slice route gradients to the right places", "[autodiff]") {
    adx::Tape tape;
    auto a = tape.leaf(Tensor::vec({1, 2}));
    auto b = tape.leaf(Tensor::vec({3, 4, 5}));
    auto c = adx::concat({a, b});
    REQUIRE(c.value().size() == 5);
    auto part = adx::slice(c, 1, 3);  // [2,3,4]
    CHECK(part.value()[0] == 2.0);
    auto loss = adx::sum(adx::mul(part, part));
    tape.backward(loss);
    CHECK(a.grad()[0] == 0.0);
    CHECK(a.grad()[1] == 4.0);
    CHECK(b.grad()[0] == 6.0);
    CHECK(b.grad()[1] == 8.0);
    CHECK(b.grad()[2] == 0.0);
}

TEST_CASE("backward of a sum of losses equals sum of backwards", "[autodiff][property]") {
    RngStream rng(7);
    for (int rep = 0; rep < 20; ++rep) {
        Tensor p = randn({5}, rng);

        auto grad_of = [&](int which) {
            adx::Tape tape;
            auto x = tape.leaf(p);
            auto l1 = adx::mean(adx::square(x));
            auto l2 = adx::sum(adx::softplus(x));
            adx::Var loss;
            if (which == 0) loss = l1;
            else if (which == 1) loss = l2;
            else loss = adx::add(l1, l2);
            tape.backward(loss);
            return x.grad();
        };

        Tensor g1 = grad_of(0), g2 = grad_of(1), gs = grad_of(2);
        for (std::size_t i = 0; i < p.size(); ++i)
            CHECK(test_util::close(gs[i], g1[i] + g2[i], 1e-12));
    }
}

TEST_CASE("identical seeds give bit-identical forwards and gradients", "[autodiff][property]") {
    auto run = [] {
        RngStream rng(99);
        std::vector<Tensor> params{randn({3, 4}, rng), randn({8}, rng)};
        std::vector<Tensor> grads;
        const double loss = run_matmul(params, &grads);
        return std::make_pair(loss, grads);
    };
    auto [l1, g1] = run();
    auto [l2, g2] = run();
    CHECK(l1 == l2);
    for (std::size_t p = 0; p < g1.size(); ++p)
        for (std::size_t i = 0; i < g1[p].size(); ++i) CHECK(g1[p][i] == g2[p][i]);
}
