#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace daqc {

// Base class. Every error carries the module whose contract failed so the
// CLI can name it.
class Error : public std::runtime_error {
public:
    Error(std::string module, const std::string& what)
        : std::runtime_error(module + ": " + what), module_(std::move(module)) {}
    const std::string& module() const { return module_; }
    virtual bool is_numeric() const { return false; }

private:
    std::string module_;
};

// Bad input: the caller asked for something outside the contract.
class ValidationError : public Error {
public:
    using Error::Error;
};

// The input was acceptable but the numerics could not deliver.
class NumericError : public Error {
public:
    using Error::Error;
    bool is_numeric() const override { return true; }
};

#define DAQC_VALIDATION_ERROR(Name, Module)                                  \
    class Name : public ValidationError {                                    \
    public:                                                                  \
        explicit Name(const std::string& what) : ValidationError(Module, what) {} \
    };

#define DAQC_NUMERIC_ERROR(Name, Module)                                     \
    class Name : public NumericError {                                       \
    public:                                                                  \
        explicit Name(const std::string& what) : NumericError(Module, what) {} \
    };

DAQC_VALIDATION_ERROR(InvalidHamiltonian, "quantum-core")
DAQC_VALIDATION_ERROR(DimensionError, "quantum-core")
DAQC_VALIDATION_ERROR(InvalidState, "quantum-core")
DAQC_NUMERIC_ERROR(ConvergenceError, "quantum-core")

DAQC_VALIDATION_ERROR(IndexError, "daqc-compiler")
DAQC_VALIDATION_ERROR(SingularSignMatrix, "daqc-compiler")
DAQC_NUMERIC_ERROR(SingularPhaseSystem, "daqc-compiler")
DAQC_NUMERIC_ERROR(SynthesisResidualError, "daqc-compiler")
DAQC_VALIDATION_ERROR(TooFewQubits, "daqc-compiler")
DAQC_VALIDATION_ERROR(UnsupportedSize, "daqc-compiler")
DAQC_VALIDATION_ERROR(InvalidTarget, "daqc-compiler")

DAQC_VALIDATION_ERROR(WrongMode, "scheduler")
DAQC_VALIDATION_ERROR(ScheduleError, "scheduler")

DAQC_VALIDATION_ERROR(ParamError, "noise-engine")
DAQC_VALIDATION_ERROR(RequiresDensityMatrix, "noise-engine")

DAQC_VALIDATION_ERROR(InvalidProblem, "algorithms")
DAQC_VALIDATION_ERROR(SpectrumError, "algorithms")
DAQC_VALIDATION_ERROR(CircuitError, "algorithms")

DAQC_VALIDATION_ERROR(InvalidLayer, "cross-resonance")
DAQC_VALIDATION_ERROR(Unsupported, "cross-resonance")

DAQC_VALIDATION_ERROR(DegenerateSamples, "mitigation")
DAQC_VALIDATION_ERROR(PlanError, "mitigation")

DAQC_VALIDATION_ERROR(ConfigError, "cli-harness")

#undef DAQC_VALIDATION_ERROR
#undef DAQC_NUMERIC_ERROR

}  // namespace daqc
