#pragma once

#include <stdexcept>
#include <string>

namespace hiersim {

/// Invalid scenario file, bad override, or violated configuration invariant.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Contract violation or numeric fault while a simulation is running.
class SimError : public std::runtime_error {
public:
    explicit SimError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace hiersim
