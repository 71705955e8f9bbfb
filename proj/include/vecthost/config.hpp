#ifndef VECTHOST_CONFIG_HPP
#define VECTHOST_CONFIG_HPP

#include "vecthost/dynamics.hpp"
#include "vecthost/expression.hpp"
#include "vecthost/grid.hpp"

#include <optional>
#include <string>
#include <vector>

namespace vecthost {

/// Raw run description as read from a config file: sectioned key = value
/// text, expressions in double quotes. Nothing here is evaluated yet.
struct Config {
    double Lx = 0.0, Ly = 0.0;
    int nx = 0, ny = 0;
    Rect star, starstar;

    Expression d1, d2, beta, m, sigma1, sigma2;

    Expression lambda;
    double tau = 0.0;
    std::optional<double> a_max; // absent: extent chosen from the survival tail

    Expression u0, phi0, psi0, z0, k;

    double dt = 0.0, t_end = 0.0;
    int output_every = 1;

    Tolerances tol;
    bool strict = true; // mode = paper; lab mode relaxes the model checks
};

/// Parse config text. Errors carry the line number and the offending key.
Config parse_config(const std::string& text, const std::string& name);
Config load_config(const std::string& path);

struct ScenarioBuild {
    Scenario scenario;
    std::vector<std::string> warnings; // e.g. tau snapped to the step grid
};

/// Evaluate the config on its grid: build masks, coefficient fields, the age
/// grid and survival table, normalize the seed profile, snap tau.
ScenarioBuild build_scenario(const Config& cfg);

} // namespace vecthost

#endif
