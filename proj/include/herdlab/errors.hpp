#pragma once

#include <stdexcept>
#include <string>

namespace herdlab {

/// Pursuer-evader distance fell below the singularity guard: the
/// inverse-square repulsion is undefined at contact and the model breaks down.
class SingularityError : public std::runtime_error {
public:
    SingularityError(int evader_index, double time, const std::string& what)
        : std::runtime_error(what), evader_index_(evader_index), time_(time) {}

    int evader_index() const noexcept { return evader_index_; }
    double time() const noexcept { return time_; }

private:
    int evader_index_;  // -1 when the caller did not supply an index
    double time_;       // NaN when unknown at throw site
};

class DomainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Operation requires a rotating-frame trajectory but was given a fixed one.
class FrameError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NoRootError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Circular-mode equilibria do not exist for the supplied parameters.
class ExistenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class RangeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NotHurwitzError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SeedInfeasibleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The densified boundary check rejected the optimizer's candidate region.
class CertificationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class EmptyIntersectionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ValidationError : public std::runtime_error {
public:
    ValidationError(const std::string& field, const std::string& reason)
        : std::runtime_error(field + ": " + reason), field_(field) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

}  // namespace herdlab
