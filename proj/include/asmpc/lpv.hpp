#pragma once

// Nominal model: discrete-time LPV map x+ = A(rho) x + B(rho) u with
// scheduling rho(x) = [x1; x1*x2] and affine matrix dependence
// A(rho) = A0 + rho1*A1 + rho2*A2 (same for B). Identified by ridge
// least squares, which is exact for this model class: an affine matrix
// function of rho is a one-layer network without activation.

#include <array>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "asmpc/dataset.hpp"
#include "asmpc/error.hpp"
#include "asmpc/linalg.hpp"
#include "asmpc/plant.hpp"

namespace asmpc {

using Mat2 = std::array<double, 4>;  // row-major 2x2

struct LpvModel {
    std::array<Mat2, 3> A{};  // A0, A1, A2
    std::array<Mat2, 3> B{};  // B0, B1, B2

    static std::array<double, 2> scheduling(const PlantState& x) {
        return {x.x1, x.x1 * x.x2};
    }
};

inline Mat2 lpv_matrix(const std::array<Mat2, 3>& m, const std::array<double, 2>& rho) {
    Mat2 out;
    for (int i = 0; i < 4; ++i) out[i] = m[0][i] + rho[0] * m[1][i] + rho[1] * m[2][i];
    return out;
}

inline PlantState eval_nominal(const LpvModel& m, const PlantState& x, const ControlInput& u) {
    const auto rho = LpvModel::scheduling(x);
    const Mat2 A = lpv_matrix(m.A, rho);
    const Mat2 B = lpv_matrix(m.B, rho);
    return {A[0] * x.x1 + A[1] * x.x2 + B[0] * u.u1 + B[1] * u.u2,
            A[2] * x.x1 + A[3] * x.x2 + B[2] * u.u1 + B[3] * u.u2};
}

inline NominalMap nominal_map(const LpvModel& m) {
    return [m](const PlantState& x, const ControlInput& u) { return eval_nominal(m, x, u); };
}

namespace detail_lpv {

// Regressor for one record; both output rows share it.
inline std::array<double, 12> features(const Transition& r) {
    const auto rho = LpvModel::scheduling(r.x);
    return {r.x.x1,          r.x.x2,          rho[0] * r.x.x1, rho[0] * r.x.x2,
            rho[1] * r.x.x1, rho[1] * r.x.x2, r.u.u1,          r.u.u2,
            rho[0] * r.u.u1, rho[0] * r.u.u2, rho[1] * r.u.u1, rho[1] * r.u.u2};
}

}  // namespace detail_lpv

// Ridge least squares via normal equations, one 12-coefficient problem per
// state component. `indices` selects the training records.
inline LpvModel fit_lpv(const TransitionDataset& ds, const std::vector<std::size_t>& indices,
                        double ridge = 1e-8) {
    constexpr std::size_t kF = 12;
    if (indices.size() < 2 * kF)
        throw ContractError("fit_lpv: need at least 24 records, got " +
                            std::to_string(indices.size()));
    std::vector<double> gram(kF * kF, 0.0);
    std::array<std::vector<double>, 2> rhs{std::vector<double>(kF, 0.0),
                                           std::vector<double>(kF, 0.0)};
    for (std::size_t idx : indices) {
        const Transition& r = ds.records[idx];
        const auto phi = detail_lpv::features(r);
        const double y[2] = {r.x_next.x1, r.x_next.x2};
        for (std::size_t i = 0; i < kF; ++i) {
            for (std::size_t j = i; j < kF; ++j) gram[i * kF + j] += phi[i] * phi[j];
            rhs[0][i] += phi[i] * y[0];
            rhs[1][i] += phi[i] * y[1];
        }
    }
    for (std::size_t i = 0; i < kF; ++i) {
        for (std::size_t j = 0; j < i; ++j) gram[i * kF + j] = gram[j * kF + i];
        gram[i * kF + i] += ridge;
    }

    LpvModel m;
    for (int row = 0; row < 2; ++row) {
        std::vector<double> w;
        try {
            w = solve_linear(gram, rhs[row], kF);
        } catch (const NumericError&) {
            throw NumericError("fit_lpv: normal matrix is singular; use a nonzero ridge weight");
        }
        // feature order: [x | rho1*x | rho2*x | u | rho1*u | rho2*u]
        for (int k = 0; k < 3; ++k) {
            m.A[k][row * 2 + 0] = w[2 * k + 0];
            m.A[k][row * 2 + 1] = w[2 * k + 1];
            m.B[k][row * 2 + 0] = w[6 + 2 * k + 0];
            m.B[k][row * 2 + 1] = w[6 + 2 * k + 1];
        }
    }
    return m;
}

struct BfrScore {
    double x1 = 0.0;  // percent
    double x2 = 0.0;
};

// Best fit rate per state: 100 * max(0, 1 - ||e||_2 / ||x - mean(x)||_2).
inline BfrScore bfr(const std::vector<PlantState>& predicted,
                    const std::vector<PlantState>& actual) {
    if (predicted.size() != actual.size() || actual.size() < 2)
        throw ContractError("bfr: sequences must have equal length >= 2");
    BfrScore out;
    for (int comp = 0; comp < 2; ++comp) {
        auto get = [comp](const PlantState& s) { return comp == 0 ? s.x1 : s.x2; };
        double mean = 0;
        for (const auto& s : actual) mean += get(s);
        mean /= static_cast<double>(actual.size());
        double err2 = 0, dev2 = 0;
        for (std::size_t i = 0; i < actual.size(); ++i) {
            const double e = get(actual[i]) - get(predicted[i]);
            const double d = get(actual[i]) - mean;
            err2 += e * e;
            dev2 += d * d;
        }
        if (dev2 == 0.0)
            throw ContractError("bfr: actual sequence is constant; score undefined");
        const double score = 100.0 * std::max(0.0, 1.0 - std::sqrt(err2) / std::sqrt(dev2));
        (comp == 0 ? out.x1 : out.x2) = score;
    }
    return out;
}

// One-step-ahead BFR over the selected records.
inline BfrScore one_step_bfr(const LpvModel& m, const TransitionDataset& ds,
                             const std::vector<std::size_t>& indices) {
    std::vector<PlantState> pred, act;
    pred.reserve(indices.size());
    for (std::size_t i : indices) {
        const Transition& r = ds.records[i];
        pred.push_back(eval_nominal(m, r.x, r.u));
        act.push_back(r.x_next);
    }
    return bfr(pred, act);
}

// Free-run BFR: within each maximal consecutive stretch the model is rolled
// out from the first recorded state using the recorded inputs. Reported for
// information; one-step BFR is the contractual score.
inline BfrScore free_run_bfr(const LpvModel& m, const TransitionDataset& ds,
                             const std::vector<std::size_t>& indices) {
    std::vector<PlantState> pred, act;
    std::size_t k = 0;
    while (k < indices.size()) {
        std::size_t run_end = k + 1;
        while (run_end < indices.size() && indices[run_end] == indices[run_end - 1] + 1 &&
               ds.records[indices[run_end]].segment == ds.records[indices[k]].segment)
            ++run_end;
        PlantState sim = ds.records[indices[k]].x;
        for (std::size_t j = k; j < run_end; ++j) {
            const Transition& r = ds.records[indices[j]];
            sim = eval_nominal(m, sim, r.u);
            if (!sim.finite()) sim = r.x_next;  // restart a diverged rollout
            pred.push_back(sim);
            act.push_back(r.x_next);
        }
        k = run_end;
    }
    return bfr(pred, act);
}

inline void save_lpv_json(const LpvModel& m, const std::string& path) {
    nlohmann::json j;
    for (int k = 0; k < 3; ++k) {
        j["A"].push_back(std::vector<double>(m.A[k].begin(), m.A[k].end()));
        j["B"].push_back(std::vector<double>(m.B[k].begin(), m.B[k].end()));
    }
    std::ofstream out(path);
    if (!out) throw Error("save_lpv_json: cannot open " + path);
    out << j.dump(2) << '\n';
}

inline LpvModel load_lpv_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("load_lpv_json: cannot open " + path);
    nlohmann::json j;
    in >> j;
    LpvModel m;
    for (int k = 0; k < 3; ++k) {
        for (int i = 0; i < 4; ++i) {
            m.A[k][i] = j.at("A").at(k).at(i).get<double>();
            m.B[k][i] = j.at("B").at(k).at(i).get<double>();
        }
    }
    return m;
}

}  // namespace asmpc
