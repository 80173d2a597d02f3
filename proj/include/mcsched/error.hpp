#pragma once

#include <stdexcept>
#include <string>

namespace mcsched {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Graph structure is invalid (cycle, self-loop, duplicate edge, unknown id).
class StructuralError : public Error {
public:
    using Error::Error;
};

/// An input document could not be ingested.
class IngestionError : public Error {
public:
    using Error::Error;
};

/// An argument lies outside the domain of a model function.
class DomainError : public Error {
public:
    using Error::Error;
};

/// No assignment satisfies the security constraints.
class InfeasibleError : public Error {
public:
    using Error::Error;
};

/// The resource pool cannot host a topological level.
class CapacityError : public Error {
public:
    using Error::Error;
};

/// The instance is too large for an exhaustive method.
class SizeError : public Error {
public:
    using Error::Error;
};

} // namespace mcsched
