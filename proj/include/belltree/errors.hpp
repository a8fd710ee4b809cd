#pragma once

#include <stdexcept>
#include <string>

namespace belltree {

// Every recoverable failure in the library is reported as an Error carrying
// one of these codes. Callers that care about the cause switch on code();
// everyone else just sees a std::runtime_error with a readable message.
enum class Err {
    MissingTargetColumn,
    NonNumericFeature,
    EmptyDataset,
    TooFewInstances,
    IncompatibleSchemas,
    FewerThanTwoProjects,
    EmptyInput,
    InputMismatch,
    EmptyTrainingSet,
    NotALeaf,
    UnknownFeature,
    SingleClassTraining,
    ZeroBaseline,
    TargetInFamily,
    EmptyGroup,
    InvalidParameter,
    IoError,
};

const char* err_name(Err code) noexcept;

class Error : public std::runtime_error {
public:
    Error(Err code, const std::string& message)
        : std::runtime_error(std::string(err_name(code)) + ": " + message), code_(code) {}

    Err code() const noexcept { return code_; }

private:
    Err code_;
};

[[noreturn]] inline void fail(Err code, const std::string& message) {
    throw Error(code, message);
}

} // namespace belltree
