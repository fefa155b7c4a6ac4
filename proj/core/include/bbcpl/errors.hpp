#pragma once

#include <stdexcept>
#include <string>

namespace bbcpl {

/// Argument outside the domain of a model function (nonpositive state, etc.).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A documented precondition was violated by the caller.
class PreconditionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// The state reached the 1/x2 singularity of the load term.
class SingularityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Non-finite value produced during integration.
class IntegrationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A search (saddle, bracket) did not find what it was looking for.
class NotFoundError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace bbcpl
