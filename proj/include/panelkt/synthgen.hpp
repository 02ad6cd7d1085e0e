#pragma once

#include "panelkt/panel.hpp"

#include <cstdint>
#include <string>
#include <utility>

namespace panelkt {

enum class Protocol { MeanShift, VarShift, LinearDep, SharedCoeff, Rotation };

/// Distribution family of the basis-function coefficients (rotation protocol).
enum class CoeffDist { Gaussian, StudentT, Uniform, Exponential };

/// Parameters of one synthetic draw. N(a, b) below always means variance b.
///
/// MeanShift    mu_X(t) = t, mu_Y(t) = t + delta_mu t^3; xi_1 ~ N(0,10),
///              xi_2 ~ N(0,5), eps ~ N(0,0.25).
/// VarShift     mu = 0; xi_X1 ~ N(0,10), xi_Y1 ~ N(0,10+delta_sigma).
/// LinearDep    X as MeanShift's X; y_i = x_{i,1} + eps_i, eps ~ N(0,1).
/// SharedCoeff  both panels as MeanShift's X, sharing xi_2 per realisation.
/// Rotation     independent panels with coefficients from coeff_dist, then
///              (x, y) <- R(theta)(x, y) pointwise, theta in [0, pi/4].
struct GeneratorSpec {
    Protocol protocol = Protocol::MeanShift;
    std::size_t m = 100;
    std::size_t n = 100;
    std::size_t T = 100;
    double delta_mu = 0.0;
    double delta_sigma = 0.0;
    double theta = 0.0;
    CoeffDist coeff_dist = CoeffDist::Gaussian;
    std::uint64_t seed = 0;
    double linear_noise_variance = 1.0;  ///< LinearDep only; tests shrink it

    void validate() const;
};

struct PanelPair {
    SamplePanel x;
    SamplePanel y;
};

struct FourierPair {
    double phi1;
    double phi2;
};

/// (sqrt(2) sin 2 pi t, sqrt(2) cos 2 pi t).
[[nodiscard]] FourierPair fourier_basis(double t);

[[nodiscard]] PanelPair gen_mixed_effects(const GeneratorSpec& spec);
[[nodiscard]] PanelPair gen_linear_dep(const GeneratorSpec& spec);
[[nodiscard]] PanelPair gen_shared_coeff(const GeneratorSpec& spec);
[[nodiscard]] PanelPair gen_rotation(const GeneratorSpec& spec);

/// The unrotated pair (X0, Y0) that gen_rotation mixes.
[[nodiscard]] PanelPair gen_rotation_source(const GeneratorSpec& spec);

/// Applies R(theta) = [[cos, -sin], [sin, cos]] to every (x_it, y_it).
[[nodiscard]] PanelPair rotate(const PanelPair& source, double theta);

/// Dispatches on spec.protocol.
[[nodiscard]] PanelPair generate(const GeneratorSpec& spec);

Protocol parse_protocol(const std::string& name);
CoeffDist parse_coeff_dist(const std::string& name);
std::string to_string(Protocol protocol);
std::string to_string(CoeffDist dist);

}  // namespace panelkt
