#include "capdyn/model.hpp"

#include <cmath>

namespace capdyn {

namespace {

void require(bool ok, const std::string& message) {
    if (!ok) throw std::invalid_argument(message);
}

bool finite(double x) { return std::isfinite(x); }

} // namespace

void ModelParams::validate() const {
    require(finite(alpha) && alpha > 0.0, "params.alpha must be finite and > 0");
    require(finite(beta) && beta > 0.0, "params.beta must be finite and > 0");
    require(finite(gamma) && gamma > 0.0, "params.gamma must be finite and > 0");
    // delta = 0 (no social pressure) is a tested sensitivity setting.
    require(finite(delta) && delta >= 0.0, "params.delta must be finite and >= 0");
    require(finite(epsilon) && epsilon >= 0.0 && epsilon <= 0.5,
            "params.epsilon out of range [0, 0.5]");
    require(finite(k_ai) && k_ai >= 0.0 && k_ai <= 1.2,
            "params.k_ai out of range [0, 1.2]");
    require(finite(scope) && scope > 0.0 && scope <= 1.0,
            "params.scope out of range (0, 1]");
}

void SystemState::validate() const {
    require(finite(h) && h >= 0.0 && h <= 1.0, "state.h out of range [0, 1]");
    require(finite(d) && d >= 0.0 && d <= 1.0, "state.d out of range [0, 1]");
}

const char* stability_name(Stability s) {
    switch (s) {
        case Stability::stable_node: return "stable-node";
        case Stability::unstable_node: return "unstable-node";
        case Stability::saddle: return "saddle";
        case Stability::marginal: return "marginal";
    }
    return "?";
}

const char* fixed_point_name(FixedPointLabel l) {
    switch (l) {
        case FixedPointLabel::fp1: return "FP1";
        case FixedPointLabel::fp2: return "FP2";
        case FixedPointLabel::fp3: return "FP3";
        case FixedPointLabel::interior: return "interior";
    }
    return "?";
}

} // namespace capdyn
