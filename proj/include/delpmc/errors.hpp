#pragma once

#include <stdexcept>
#include <string>

namespace delpmc {

/// Parameter outside its admissible set (maps to CLI exit code 1).
class DomainError : public std::invalid_argument {
public:
    explicit DomainError(const std::string& what) : std::invalid_argument(what) {}
};

/// Numerical procedure failed to reach its tolerance (maps to CLI exit code 2).
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// Adaptive ODE integration failed (step-size underflow).
class IntegrationError : public NumericalError {
public:
    explicit IntegrationError(const std::string& what) : NumericalError(what) {}
};

/// Linear problem is not solvable: the right-hand side has a component along
/// the kernel of the operator. Carries the violated orthogonality condition.
class SolvabilityError : public NumericalError {
public:
    SolvabilityError(const std::string& what, int mode, double component)
        : NumericalError(what), mode(mode), component(component) {}
    int mode;
    double component;
};

/// Nondegenerate solve refused at a degenerate half-length; carries the
/// obstruction integral as a diagnostic.
class ObstructionError : public std::runtime_error {
public:
    ObstructionError(const std::string& what, double integral)
        : std::runtime_error(what), integral(integral) {}
    double integral;
};

/// A sampled symmetry/structure contract was violated by the input.
class ContractError : public std::invalid_argument {
public:
    explicit ContractError(const std::string& what) : std::invalid_argument(what) {}
};

} // namespace delpmc
