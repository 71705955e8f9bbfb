#ifndef VECTHOST_VERIFY_HPP
#define VECTHOST_VERIFY_HPP

#include "vecthost/config.hpp"

#include <string>
#include <vector>

namespace vecthost {

struct VerifyCheck {
    std::string name;
    bool pass = false;
    std::string detail; // worst error observed, or the reason for failure
};

/// Self-checks of the time stepper against independent representations, run
/// on a small canonical geometry (5x5 cells, 3x3 vector habitat, 8 cohorts)
/// with the coefficient expressions taken from the given config:
///   - every cohort at every step against its characteristic representation
///   - the infectious-host integral on [0, tau] against the seed-only form,
///     including invariance under scaling the host-infection rate
///   - a zero-diffusivity flat run against the scalar shadow of the stepper
///   - the logistic closed form on a pure vector run
bool run_verify_suite(const Config& cfg, std::vector<VerifyCheck>& out);

} // namespace vecthost

#endif
