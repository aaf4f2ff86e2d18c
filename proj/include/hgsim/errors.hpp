#pragma once

#include <stdexcept>
#include <string>

namespace hgsim {

// Bad scenario/config/CLI input or unusable data files.  CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Simulation left its validity envelope (slip angle blow-up, vehicle off the
// course corridor).  Carries the simulation time of the abort.  Exit code 3.
class DynamicsError : public std::runtime_error {
public:
    DynamicsError(const std::string& msg, double t_abort)
        : std::runtime_error(msg), t(t_abort) {}
    double t;
};

}  // namespace hgsim
