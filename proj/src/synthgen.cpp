#include "panelkt/synthgen.hpp"

#include "panelkt/errors.hpp"
#include "panelkt/rng.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace panelkt {

namespace {

constexpr double kXi1Var = 10.0;
constexpr double kXi2Var = 5.0;
constexpr double kNoiseVar = 0.25;

enum PanelTag : std::uint64_t { kPanelX = 0, kPanelY = 1, kPair = 2 };

double normal(Engine& rng, double variance) {
    if (variance == 0.0) return 0.0;
    return std::normal_distribution<double>(0.0, std::sqrt(variance))(rng);
}

struct Basis {
    std::vector<double> t, phi1, phi2;
    explicit Basis(std::size_t T) : t(unit_grid(T)), phi1(T), phi2(T) {
        for (std::size_t j = 0; j < T; ++j) {
            const auto f = fourier_basis(t[j]);
            phi1[j] = f.phi1;
            phi2[j] = f.phi2;
        }
    }
};

// x_t = mean(t) + xi1 phi1(t) + xi2 phi2(t) + eps_t with eps_t ~ N(0, 0.25).
template <class Mean>
void fill_row(Matrix& out, Eigen::Index row, const Basis& b, Mean mean, double xi1, double xi2, Engine& rng) {
    for (std::size_t j = 0; j < b.t.size(); ++j)
        out(row, static_cast<Eigen::Index>(j)) =
            mean(b.t[j]) + xi1 * b.phi1[j] + xi2 * b.phi2[j] + normal(rng, kNoiseVar);
}

double draw_coeff(Engine& rng, CoeffDist dist, int k) {
    switch (dist) {
        case CoeffDist::Gaussian: return normal(rng, k == 1 ? kXi1Var : kXi2Var);
        case CoeffDist::StudentT: return std::student_t_distribution<double>(k == 1 ? 3.0 : 5.0)(rng);
        case CoeffDist::Uniform:
            return k == 1 ? std::uniform_real_distribution<double>(-10.0, 10.0)(rng)
                          : std::uniform_real_distribution<double>(-5.0, 5.0)(rng);
        case CoeffDist::Exponential: {
            const double lambda = k == 1 ? 1.5 : 3.0;
            return std::exponential_distribution<double>(lambda)(rng) - 1.0 / lambda;
        }
    }
    return 0.0;
}

std::uint64_t protocol_label(Protocol p) { return static_cast<std::uint64_t>(p) + 1; }

void require_paired(const GeneratorSpec& spec) {
    if (spec.n != spec.m) throw ParameterError("this protocol pairs realisations; n must equal m");
}

}  // namespace

void GeneratorSpec::validate() const {
    if (m < 1 || n < 1 || T < 1) throw ParameterError("m, n and T must be positive");
    if (!(delta_mu >= 0.0) || !(delta_sigma >= 0.0)) throw ParameterError("shift parameters must be nonnegative");
    if (!(linear_noise_variance >= 0.0)) throw ParameterError("noise variance must be nonnegative");
    if (protocol == Protocol::Rotation) {
        if (!(theta >= 0.0 && theta <= std::numbers::pi / 4.0 + 1e-12))
            throw ParameterError("rotation angle must lie in [0, pi/4]");
        if (coeff_dist == CoeffDist::Gaussian)
            throw ParameterError("rotation protocol needs student, uniform or exponential coefficients");
    }
}

FourierPair fourier_basis(double t) {
    const double a = 2.0 * std::numbers::pi * t;
    return {std::numbers::sqrt2 * std::sin(a), std::numbers::sqrt2 * std::cos(a)};
}

PanelPair gen_mixed_effects(const GeneratorSpec& spec) {
    spec.validate();
    if (spec.protocol != Protocol::MeanShift && spec.protocol != Protocol::VarShift)
        throw ParameterError("mixed-effects generator handles meanshift and varshift only");
    const Basis basis(spec.T);
    const auto T = static_cast<Eigen::Index>(spec.T);
    Matrix x(static_cast<Eigen::Index>(spec.m), T);
    Matrix y(static_cast<Eigen::Index>(spec.n), T);
    const bool mean_shift = spec.protocol == Protocol::MeanShift;
    const double dmu = spec.delta_mu;
    auto mean_x = [mean_shift](double t) { return mean_shift ? t : 0.0; };
    auto mean_y = [mean_shift, dmu](double t) { return mean_shift ? t + dmu * t * t * t : 0.0; };
    const double xi1_var_y = mean_shift ? kXi1Var : kXi1Var + spec.delta_sigma;

    for (std::size_t i = 0; i < spec.m; ++i) {
        auto rng = make_engine(spec.seed, {protocol_label(spec.protocol), kPanelX, i});
        const double xi1 = normal(rng, kXi1Var);
        const double xi2 = normal(rng, kXi2Var);
        fill_row(x, static_cast<Eigen::Index>(i), basis, mean_x, xi1, xi2, rng);
    }
    for (std::size_t i = 0; i < spec.n; ++i) {
        auto rng = make_engine(spec.seed, {protocol_label(spec.protocol), kPanelY, i});
        const double xi1 = normal(rng, xi1_var_y);
        const double xi2 = normal(rng, kXi2Var);
        fill_row(y, static_cast<Eigen::Index>(i), basis, mean_y, xi1, xi2, rng);
    }
    return {SamplePanel(std::move(x), basis.t), SamplePanel(std::move(y), basis.t)};
}

PanelPair gen_linear_dep(const GeneratorSpec& spec) {
    spec.validate();
    require_paired(spec);
    const Basis basis(spec.T);
    Matrix x(static_cast<Eigen::Index>(spec.m), static_cast<Eigen::Index>(spec.T));
    Matrix y(static_cast<Eigen::Index>(spec.m), 1);
    auto mean = [](double t) { return t; };
    for (std::size_t i = 0; i < spec.m; ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        auto rng = make_engine(spec.seed, {protocol_label(spec.protocol), kPair, i});
        const double xi1 = normal(rng, kXi1Var);
        const double xi2 = normal(rng, kXi2Var);
        fill_row(x, r, basis, mean, xi1, xi2, rng);
        y(r, 0) = x(r, 0) + normal(rng, spec.linear_noise_variance);
    }
    return {SamplePanel(std::move(x), basis.t), SamplePanel(std::move(y), {0.0})};
}

PanelPair gen_shared_coeff(const GeneratorSpec& spec) {
    spec.validate();
    require_paired(spec);
    const Basis basis(spec.T);
    const auto rows = static_cast<Eigen::Index>(spec.m);
    const auto T = static_cast<Eigen::Index>(spec.T);
    Matrix x(rows, T);
    Matrix y(rows, T);
    auto mean = [](double t) { return t; };
    for (std::size_t i = 0; i < spec.m; ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        auto rng = make_engine(spec.seed, {protocol_label(spec.protocol), kPair, i});
        const double xi2 = normal(rng, kXi2Var);
        const double xi1_x = normal(rng, kXi1Var);
        const double xi1_y = normal(rng, kXi1Var);
        fill_row(x, r, basis, mean, xi1_x, xi2, rng);
        fill_row(y, r, basis, mean, xi1_y, xi2, rng);
    }
    return {SamplePanel(std::move(x), basis.t), SamplePanel(std::move(y), basis.t)};
}

PanelPair gen_rotation_source(const GeneratorSpec& spec) {
    spec.validate();
    require_paired(spec);
    const Basis basis(spec.T);
    const auto rows = static_cast<Eigen::Index>(spec.m);
    const auto T = static_cast<Eigen::Index>(spec.T);
    Matrix x(rows, T);
    Matrix y(rows, T);
    auto mean = [](double t) { return t; };
    for (std::size_t i = 0; i < spec.m; ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        auto rng = make_engine(spec.seed, {protocol_label(Protocol::Rotation), kPair, i});
        const double xi1_x = draw_coeff(rng, spec.coeff_dist, 1);
        const double xi2_x = draw_coeff(rng, spec.coeff_dist, 2);
        fill_row(x, r, basis, mean, xi1_x, xi2_x, rng);
        const double xi1_y = draw_coeff(rng, spec.coeff_dist, 1);
        const double xi2_y = draw_coeff(rng, spec.coeff_dist, 2);
        fill_row(y, r, basis, mean, xi1_y, xi2_y, rng);
    }
    return {SamplePanel(std::move(x), basis.t), SamplePanel(std::move(y), basis.t)};
}

PanelPair rotate(const PanelPair& source, double theta) {
    const Matrix& x0 = source.x.values();
    const Matrix& y0 = source.y.values();
    if (x0.rows() != y0.rows() || x0.cols() != y0.cols())
        throw DimensionError("rotation needs panels of identical shape");
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    Matrix x = c * x0 - s * y0;
    Matrix y = s * x0 + c * y0;
    return {SamplePanel(std::move(x), source.x.grid()), SamplePanel(std::move(y), source.y.grid())};
}

PanelPair gen_rotation(const GeneratorSpec& spec) {
    if (spec.protocol != Protocol::Rotation) throw ParameterError("rotation generator needs protocol = rotation");
    return rotate(gen_rotation_source(spec), spec.theta);
}

PanelPair generate(const GeneratorSpec& spec) {
    switch (spec.protocol) {
        case Protocol::MeanShift:
        case Protocol::VarShift: return gen_mixed_effects(spec);
        case Protocol::LinearDep: return gen_linear_dep(spec);
        case Protocol::SharedCoeff: return gen_shared_coeff(spec);
        case Protocol::Rotation: return gen_rotation(spec);
    }
    throw ParameterError("unknown protocol");
}

Protocol parse_protocol(const std::string& name) {
    if (name == "meanshift") return Protocol::MeanShift;
    if (name == "varshift") return Protocol::VarShift;
    if (name == "lineardep") return Protocol::LinearDep;
    if (name == "sharedcoeff") return Protocol::SharedCoeff;
    if (name == "rotation") return Protocol::Rotation;
    throw ConfigError("unknown protocol '" + name + "'");
}

CoeffDist parse_coeff_dist(const std::string& name) {
    if (name == "gaussian") return CoeffDist::Gaussian;
    if (name == "student") return CoeffDist::StudentT;
    if (name == "uniform") return CoeffDist::Uniform;
    if (name == "exponential") return CoeffDist::Exponential;
    throw ConfigError("unknown coefficient distribution '" + name + "'");
}

std::string to_string(Protocol protocol) {
    switch (protocol) {
        case Protocol::MeanShift: return "meanshift";
        case Protocol::VarShift: return "varshift";
        case Protocol::LinearDep: return "lineardep";
        case Protocol::SharedCoeff: return "sharedcoeff";
        case Protocol::Rotation: return "rotation";
    }
    return "meanshift";
}

std::string to_string(CoeffDist dist) {
    switch (dist) {
        case CoeffDist::Gaussian: return "gaussian";
        case CoeffDist::StudentT: return "student";
        case CoeffDist::Uniform: return "uniform";
        case CoeffDist::Exponential: return "exponential";
    }
    return "gaussian";
}

}  // namespace panelkt
