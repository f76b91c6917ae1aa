#pragma once

#include <stdexcept>
#include <string>

namespace symmetria {

// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed mesh file syntax. Carries line context in the message.
class ParseError : public Error {
public:
    using Error::Error;
};

// Structurally invalid mesh (bad index, degenerate face, disconnected).
class ValidationError : public Error {
public:
    using Error::Error;
};

// An edge with more than two incident faces.
class NonManifoldError : public Error {
public:
    using Error::Error;
};

// Non-finite value produced during operator assembly.
class NumericalError : public Error {
public:
    using Error::Error;
};

// Iterative eigensolver failed to converge.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

// Requested eigenpair count out of range.
class DimensionError : public Error {
public:
    using Error::Error;
};

// lambda_2 too small to define a diffusion time scale.
class DegenerateSpectrumError : public Error {
public:
    using Error::Error;
};

// No strict local maxima in the feature field.
class NoFeaturesError : public Error {
public:
    using Error::Error;
};

// Assignment cardinality exceeds available points (2c > d).
class InfeasibleError : public Error {
public:
    using Error::Error;
};

// Target vertex unreachable from the source (connected meshes exclude this).
class UnreachableError : public Error {
public:
    using Error::Error;
};

// Index outside a container's valid range.
class IndexError : public Error {
public:
    using Error::Error;
};

// Too few usable eigenfunctions to embed the shape.
class DegenerateMapError : public Error {
public:
    using Error::Error;
};

// Ground-truth correspondence list is empty.
class EmptyGroundTruthError : public Error {
public:
    using Error::Error;
};

} // namespace symmetria
