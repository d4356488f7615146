#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace psc {

/// Root of every error raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define PSC_DECLARE_ERROR(Name)              \
    class Name : public Error {              \
    public:                                  \
        using Error::Error;                  \
    };

// core / io
PSC_DECLARE_ERROR(SchemaError)
PSC_DECLARE_ERROR(OffsetError)
PSC_DECLARE_ERROR(ReconstructionError)
PSC_DECLARE_ERROR(PreconditionError)
PSC_DECLARE_ERROR(IoError)
PSC_DECLARE_ERROR(ConfigError)

// inference
PSC_DECLARE_ERROR(EndpointError)
PSC_DECLARE_ERROR(UnsupportedError)
PSC_DECLARE_ERROR(EmptyCompletionError)

// python front end and transformations
PSC_DECLARE_ERROR(RenameCollisionError)
PSC_DECLARE_ERROR(HarnessError)

// alignment and scoring
PSC_DECLARE_ERROR(UnalignableError)
PSC_DECLARE_ERROR(MissingSegmentError)
PSC_DECLARE_ERROR(BoundsMismatchError)

// statistics
PSC_DECLARE_ERROR(DegenerateError)
PSC_DECLARE_ERROR(InsufficientDataError)
PSC_DECLARE_ERROR(SingularError)

#undef PSC_DECLARE_ERROR

/// Syntax error in a Python snippet; carries the 1-based line and 0-based byte column.
class ParseError : public Error {
public:
    ParseError(const std::string& what, int line, int col)
        : Error(what + " (line " + std::to_string(line) + ", col " + std::to_string(col) + ")"),
          line_(line), col_(col) {}

    int line() const noexcept { return line_; }
    int col() const noexcept { return col_; }

private:
    int line_;
    int col_;
};

/// Schema violation in a line-oriented file.
inline SchemaError schema_error_at(std::size_t line_no, const std::string& what) {
    return SchemaError("line " + std::to_string(line_no) + ": " + what);
}

}  // namespace psc
