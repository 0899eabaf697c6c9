#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace movnet {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ZeroOutDegree : public Error {
public:
    explicit ZeroOutDegree(std::size_t node)
        : Error("node " + std::to_string(node) + " has zero out-degree"), node_(node) {}
    std::size_t node() const noexcept { return node_; }

private:
    std::size_t node_;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

class NotStronglyConnected : public Error {
public:
    NotStronglyConnected() : Error("graph is not strongly connected") {}
};

class NotConverged : public Error {
public:
    using Error::Error;
};

class SingularSystem : public Error {
public:
    using Error::Error;
};

class Degenerate : public Error {
public:
    using Error::Error;
};

class ModeMismatch : public Error {
public:
    using Error::Error;
};

class ShapeMismatch : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class InvalidEpsilon : public Error {
public:
    using Error::Error;
};

/// Which modelling assumption a configuration failed.
enum class Assumption { StronglyConnected, Aperiodic, BalancedSnapshots };

inline const char* to_string(Assumption a) {
    switch (a) {
        case Assumption::StronglyConnected: return "underlying graph not strongly connected";
        case Assumption::Aperiodic: return "underlying graph is periodic";
        case Assumption::BalancedSnapshots: return "arc sampling does not guarantee balanced snapshots";
    }
    return "unknown";
}

class AssumptionViolated : public Error {
public:
    AssumptionViolated(Assumption which, const std::string& detail)
        : Error(std::string("assumption violated: ") + to_string(which) +
                (detail.empty() ? "" : " (" + detail + ")")),
          which_(which) {}
    Assumption which() const noexcept { return which_; }

private:
    Assumption which_;
};

class InsufficientSamples : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace movnet
