#pragma once

#include <stdexcept>
#include <string>

namespace icrb {

/// Thrown when a rotation angle reaches the cut locus, where the
/// principal logarithm (and everything built on it) stops being defined.
class AngleNearPiError : public std::domain_error {
public:
    explicit AngleNearPiError(const std::string& what) : std::domain_error(what) {}
};

/// Thrown when the measurement geometry cannot determine the attitude
/// (fewer than two directions, or all directions collinear).
class UnobservableError : public std::domain_error {
public:
    explicit UnobservableError(const std::string& what) : std::domain_error(what) {}
};

/// Thrown when a Fisher information matrix is numerically singular and a
/// bound that needs its inverse is requested.
class SingularInformationError : public std::runtime_error {
public:
    explicit SingularInformationError(const std::string& what) : std::runtime_error(what) {}
};

/// Thrown on any malformed, incomplete, or inconsistent scenario input.
/// Parsing is fail-closed: unknown fields are errors too.
class InvalidScenarioError : public std::runtime_error {
public:
    explicit InvalidScenarioError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace icrb
