#pragma once

#include <stdexcept>
#include <string>

namespace rankspectra {

/// Coarse error classes; the CLI maps them onto process exit codes.
enum class ErrorKind { Validation, Computation, Io };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

#define RANKSPECTRA_DEFINE_ERROR(Name, Base, Kind)                             \
    class Name : public Base {                                                 \
    public:                                                                    \
        explicit Name(const std::string& what) : Base(ErrorKind::Kind, what) {} \
    protected:                                                                 \
        Name(ErrorKind kind, const std::string& what) : Base(kind, what) {}    \
    }

RANKSPECTRA_DEFINE_ERROR(ValidationError, Error, Validation);
RANKSPECTRA_DEFINE_ERROR(ComputationError, Error, Computation);
RANKSPECTRA_DEFINE_ERROR(IoError, Error, Io);

#define RANKSPECTRA_DEFINE_LEAF(Name, Base, Kind)                              \
    class Name : public Base {                                                 \
    public:                                                                    \
        explicit Name(const std::string& what) : Base(ErrorKind::Kind, what) {} \
    }

RANKSPECTRA_DEFINE_LEAF(TiesError, ValidationError, Validation);
RANKSPECTRA_DEFINE_LEAF(ArityError, ValidationError, Validation);
RANKSPECTRA_DEFINE_LEAF(SizeError, ValidationError, Validation);
RANKSPECTRA_DEFINE_LEAF(DomainError, ValidationError, Validation);
RANKSPECTRA_DEFINE_LEAF(RangeError, ValidationError, Validation);
RANKSPECTRA_DEFINE_LEAF(MarginError, ValidationError, Validation);
RANKSPECTRA_DEFINE_LEAF(IndexError, ValidationError, Validation);
RANKSPECTRA_DEFINE_LEAF(SymmetryError, ValidationError, Validation);
RANKSPECTRA_DEFINE_LEAF(ComplexityGuardError, ValidationError, Validation);
RANKSPECTRA_DEFINE_LEAF(MemoryGuardError, ValidationError, Validation);
RANKSPECTRA_DEFINE_LEAF(ConvergenceError, ComputationError, Computation);

#undef RANKSPECTRA_DEFINE_LEAF
#undef RANKSPECTRA_DEFINE_ERROR

} // namespace rankspectra
