#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>

#include "asmpc/dataset.hpp"
#include "asmpc/plant.hpp"
#include "test_util.hpp"

using namespace asmpc;

TEST_CASE("plant derivative values", "[plant]") {
    auto d0 = plant_derivative({0, 0}, {0, 0});
    CHECK(d0[0] == 0.0);
    CHECK(d0[1] == 0.0);

    // direct substitution into the vector field
    auto d1 = plant_derivative({-1, 5}, {0, 0});
    CHECK(d1[0] == Catch::Approx(15.5).margin(1e-12));
    CHECK(d1[1] == Catch::Approx(10.1).margin(1e-12));

    auto d2 = plant_derivative({1, 1}, {1, 1});
    CHECK(d2[0] == Catch::Approx(10.5).margin(1e-12));
    CHECK(d2[1] == Catch::Approx(1.1).margin(1e-12));
}

TEST_CASE("equilibrium is a fixed point of step", "[plant]") {
    for (double dt : {0.01, 0.1, 1.0}) {
        PlantState x = plant_step({0, 0}, {0, 0}, dt);
        CHECK(x.x1 == 0.0);
        CHECK(x.x2 == 0.0);
    }
}

namespace {
// Fine-step explicit Euler; crude but an independent integration route.
PlantState euler_oracle(PlantState x, const ControlInput& u, double dt, int substeps) {
    const double h = dt / substeps;
    for (int i = 0; i < substeps; ++i) {
        auto d = plant_derivative(x, u);
        x = {x.x1 + h * d[0], x.x2 + h * d[1]};
    }
    return x;
}
}  // namespace

TEST_CASE("RK4 agrees with fine-step Euler oracle", "[plant][oracle]") {
    PlantState a = plant_step({-1, 5}, {0, 0}, 0.1);
    PlantState b = euler_oracle({-1, 5}, {0, 0}, 0.1, 200000);
    CHECK(std::abs(a.x1 - b.x1) < 1e-5);
    CHECK(std::abs(a.x2 - b.x2) < 1e-5);
}

TEST_CASE("RK4 substep halving converges", "[plant][oracle]") {
    PlantState a = plant_step({-1, 5}, {0.2, -0.3}, 0.1, 100);
    PlantState b = plant_step({-1, 5}, {0.2, -0.3}, 0.1, 200);
    CHECK(std::abs(a.x1 - b.x1) < 1e-8);
    CHECK(std::abs(a.x2 - b.x2) < 1e-8);
}

TEST_CASE("RK4 self-consistency over a 100-step trajectory", "[plant][property]") {
    RngStream rng(5);
    PlantState xa{0.5, 1.0}, xb{0.5, 1.0};
    double sup = 0.0;
    for (int k = 0; k < 100; ++k) {
        ControlInput u{rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)};
        xa = plant_step(xa, u, 0.1, 100);
        xb = plant_step(xb, u, 0.1, 200);
        sup = std::max({sup, std::abs(xa.x1 - xb.x1), std::abs(xa.x2 - xb.x2)});
        if (!kStateBox.scaled(2.0).contains(xa.x1, xa.x2)) {
            xa = xb = {0.5, 1.0};  // keep the check inside the operating region
        }
    }
    CHECK(sup < 1e-7);
}

TEST_CASE("dataset collection is reproducible and well-formed", "[plant][dataset]") {
    auto d1 = collect_dataset(1000, 42);
    auto d2 = collect_dataset(1000, 42);
    REQUIRE(d1.size() == 1000);
    for (std::size_t i = 0; i < d1.size(); ++i) {
        CHECK(d1.records[i].x.x1 == d2.records[i].x.x1);
        CHECK(d1.records[i].u.u2 == d2.records[i].u.u2);
        CHECK(d1.records[i].x_next.x2 == d2.records[i].x_next.x2);
    }
    // consecutive records chain within a segment
    for (std::size_t i = 1; i < d1.size(); ++i) {
        if (d1.records[i].segment == d1.records[i - 1].segment) {
            CHECK(d1.records[i].x.x1 == d1.records[i - 1].x_next.x1);
            CHECK(d1.records[i].x.x2 == d1.records[i - 1].x_next.x2);
        }
    }
}

TEST_CASE("single record at origin with zero input", "[plant][dataset]") {
    CollectOptions opt;
    opt.x0 = {0, 0};
    opt.input_lo = opt.input_hi = 0.0;
    auto ds = collect_dataset(1, 1, opt);
    REQUIRE(ds.size() == 1);
    CHECK(ds.records[0].x.x1 == 0.0);
    CHECK(ds.records[0].x_next.x1 == 0.0);
    CHECK(ds.records[0].x_next.x2 == 0.0);
}

TEST_CASE("split is disjoint and covering", "[plant][dataset]") {
    auto s = split_dataset(1000, 0.75, 7);
    CHECK(s.train.size() == 750);
    CHECK(s.test.size() == 250);
    std::vector<bool> seen(1000, false);
    for (auto i : s.train) seen[i] = true;
    for (auto i : s.test) {
        CHECK_FALSE(seen[i]);
        seen[i] = true;
    }
    CHECK(std::all_of(seen.begin(), seen.end(), [](bool b) { return b; }));
}

TEST_CASE("mismatch targets: identity and zero nominal", "[plant][dataset]") {
    auto ds = collect_dataset(50, 3);

    // exact one-step map as nominal -> g identically zero
    build_mismatch_dataset(ds, [](const PlantState& x, const ControlInput& u) {
        return plant_step(x, u, 0.1, 100);
    });
    for (const auto& r : ds.records) {
        CHECK(r.g1 == 0.0);
        CHECK(r.g2 == 0.0);
    }

    // zero nominal -> g equals the next state
    build_mismatch_dataset(ds, [](const PlantState&, const ControlInput&) {
        return PlantState{0, 0};
    });
    for (const auto& r : ds.records) {
        CHECK(r.g1 == r.x_next.x1);
        CHECK(r.g2 == r.x_next.x2);
    }
}

TEST_CASE("dataset CSV round-trips bit-exactly", "[plant][dataset]") {
    auto ds = collect_dataset(100, 11);
    build_mismatch_dataset(ds, [](const PlantState& x, const ControlInput& u) {
        return plant_step(x, u, 0.1, 100);
    });
    const std::string path = std::filesystem::temp_directory_path() / "asmpc_ds_test.csv";
    save_dataset_csv(ds, path);
    auto back = load_dataset_csv(path);
    REQUIRE(back.size() == ds.size());
    REQUIRE(back.has_g);
    for (std::size_t i = 0; i < ds.size(); ++i) {
        CHECK(back.records[i].x.x1 == ds.records[i].x.x1);
        CHECK(back.records[i].x.x2 == ds.records[i].x.x2);
        CHECK(back.records[i].u.u1 == ds.records[i].u.u1);
        CHECK(back.records[i].x_next.x2 == ds.records[i].x_next.x2);
        CHECK(back.records[i].g1 == ds.records[i].g1);
        CHECK(back.records[i].segment == ds.records[i].segment);
    }
    std::remove(path.c_str());
}
