#include "belltree/errors.hpp"

namespace belltree {

const char* err_name(Err code) noexcept {
    switch (code) {
    case Err::MissingTargetColumn: return "MissingTargetColumn";
    case Err::NonNumericFeature: return "NonNumericFeature";
    case Err::EmptyDataset: return "EmptyDataset";
    case Err::TooFewInstances: return "TooFewInstances";
    case Err::IncompatibleSchemas: return "IncompatibleSchemas";
    case Err::FewerThanTwoProjects: return "FewerThanTwoProjects";
    case Err::EmptyInput: return "EmptyInput";
    case Err::InputMismatch: return "InputMismatch";
    case Err::EmptyTrainingSet: return "EmptyTrainingSet";
    case Err::NotALeaf: return "NotALeaf";
    case Err::UnknownFeature: return "UnknownFeature";
    case Err::SingleClassTraining: return "SingleClassTraining";
    case Err::ZeroBaseline: return "ZeroBaseline";
    case Err::TargetInFamily: return "TargetInFamily";
    case Err::EmptyGroup: return "EmptyGroup";
    case Err::InvalidParameter: return "InvalidParameter";
    case Err::IoError: return "IoError";
    }
    return "UnknownError";
}

} // namespace belltree
