#pragma once

// Transition datasets: collection from the simulated plant, train/test
// splitting, mismatch targets g = x+ - f(x,u), and CSV persistence.

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "asmpc/plant.hpp"

namespace asmpc {

struct Transition {
    PlantState x;
    ControlInput u;
    PlantState x_next;
    double g1 = 0.0, g2 = 0.0;
    // Consecutive records share a segment until a collection restart.
    std::uint32_t segment = 0;
};

using NominalMap = std::function<PlantState(const PlantState&, const ControlInput&)>;

struct TransitionDataset {
    std::vector<Transition> records;
    bool has_g = false;

    std::size_t size() const { return records.size(); }

    // True when records i..i+len-1 form one uninterrupted stretch of the
    // source trajectory.
    bool consecutive(std::size_t i, std::size_t len) const {
        if (i + len > records.size()) return false;
        for (std::size_t k = 1; k < len; ++k)
            if (records[i + k].segment != records[i].segment) return false;
        return true;
    }
};

struct CollectOptions {
    PlantState x0{-0.5, 2.0};
    double dt = 0.1;
    double input_lo = -0.5;
    double input_hi = 0.5;
    Box collect_box = kStateBox.scaled(2.0);
    int rk4_substeps = 100;
};

// Simulates one excitation trajectory and records n transitions. When the
// state leaves the collection box the trajectory restarts from a uniform
// sample inside the state constraint set; the transition across a restart
// is not recorded.
inline TransitionDataset collect_dataset(std::size_t n, std::uint64_t seed,
                                         const CollectOptions& opt = {}) {
    if (n < 1) throw ContractError("collect_dataset: n must be >= 1");
    if (!(opt.input_hi >= opt.input_lo))
        throw ContractError("collect_dataset: invalid input bounds");
    RngStream rng(seed);
    TransitionDataset ds;
    ds.records.reserve(n);
    PlantState x = opt.x0;
    std::uint32_t segment = 0;
    while (ds.records.size() < n) {
        const ControlInput u{rng.uniform(opt.input_lo, opt.input_hi),
                             rng.uniform(opt.input_lo, opt.input_hi)};
        PlantState x_next;
        try {
            x_next = plant_step(x, u, opt.dt, opt.rk4_substeps);
        } catch (const PlantDivergence&) {
            x = {rng.uniform(kStateBox.lo1, kStateBox.hi1),
                 rng.uniform(kStateBox.lo2, kStateBox.hi2)};
            ++segment;
            continue;
        }
        if (!opt.collect_box.contains(x_next.x1, x_next.x2)) {
            x = {rng.uniform(kStateBox.lo1, kStateBox.hi1),
                 rng.uniform(kStateBox.lo2, kStateBox.hi2)};
            ++segment;
            continue;
        }
        ds.records.push_back(Transition{x, u, x_next, 0.0, 0.0, segment});
        x = x_next;
    }
    return ds;
}

// Populates g = x_next - f(x,u) for every record.
inline void build_mismatch_dataset(TransitionDataset& ds, const NominalMap& nominal) {
    for (Transition& r : ds.records) {
        const PlantState pred = nominal(r.x, r.u);
        r.g1 = r.x_next.x1 - pred.x1;
        r.g2 = r.x_next.x2 - pred.x2;
    }
    ds.has_g = true;
}

struct SplitIndices {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

// Random split by shuffled permutation; disjoint and covering. Indices are
// sorted within each part so downstream iteration is in time order.
inline SplitIndices split_dataset(std::size_t n, double train_ratio, std::uint64_t seed) {
    if (!(train_ratio >= 0.0 && train_ratio <= 1.0))
        throw ContractError("split_dataset: ratio must be in [0,1]");
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    RngStream rng(seed);
    rng.shuffle(perm.data(), perm.size());
    const std::size_t n_train = static_cast<std::size_t>(train_ratio * n + 0.5);
    SplitIndices s;
    s.train.assign(perm.begin(), perm.begin() + n_train);
    s.test.assign(perm.begin() + n_train, perm.end());
    std::sort(s.train.begin(), s.train.end());
    std::sort(s.test.begin(), s.test.end());
    return s;
}

// 17 significant digits: enough for exact double round-trips.
inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline void save_dataset_csv(const TransitionDataset& ds, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("save_dataset_csv: cannot open " + path);
    out << "x1,x2,u1,u2,x1_next,x2_next,g1,g2\n";
    for (const Transition& r : ds.records) {
        out << fmt17(r.x.x1) << ',' << fmt17(r.x.x2) << ',' << fmt17(r.u.u1) << ','
            << fmt17(r.u.u2) << ',' << fmt17(r.x_next.x1) << ',' << fmt17(r.x_next.x2) << ',';
        if (ds.has_g)
            out << fmt17(r.g1) << ',' << fmt17(r.g2);
        else
            out << ',';
        out << '\n';
    }
}

inline TransitionDataset load_dataset_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("load_dataset_csv: cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw Error("load_dataset_csv: empty file " + path);
    if (line != "x1,x2,u1,u2,x1_next,x2_next,g1,g2")
        throw Error("load_dataset_csv: unexpected header in " + path);
    TransitionDataset ds;
    bool any_g = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) f.push_back(cell);
        while (f.size() < 8) f.emplace_back();
        Transition r;
        r.x = {std::stod(f[0]), std::stod(f[1])};
        r.u = {std::stod(f[2]), std::stod(f[3])};
        r.x_next = {std::stod(f[4]), std::stod(f[5])};
        if (!f[6].empty() && !f[7].empty()) {
            r.g1 = std::stod(f[6]);
            r.g2 = std::stod(f[7]);
            any_g = true;
        }
        ds.records.push_back(r);
    }
    ds.has_g = any_g;
    // Segment boundaries are recovered from trajectory continuity.
    std::uint32_t segment = 0;
    for (std::size_t i = 0; i < ds.records.size(); ++i) {
        if (i > 0 && (ds.records[i].x.x1 != ds.records[i - 1].x_next.x1 ||
                      ds.records[i].x.x2 != ds.records[i - 1].x_next.x2))
            ++segment;
        ds.records[i].segment = segment;
    }
    return ds;
}

}  // namespace asmpc
