#include "nlstplan/error.h"

namespace nlstplan {

std::string_view error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidGeometry: return "InvalidGeometry";
        case ErrorCode::IncompatibleOperands: return "IncompatibleOperands";
        case ErrorCode::EmptyInput: return "EmptyInput";
        case ErrorCode::InvalidK: return "InvalidK";
        case ErrorCode::BadEncoding: return "BadEncoding";
        case ErrorCode::MissingCatalog: return "MissingCatalog";
        case ErrorCode::SchemaMismatch: return "SchemaMismatch";
        case ErrorCode::BadGeometry: return "BadGeometry";
        case ErrorCode::UnknownRelation: return "UnknownRelation";
        case ErrorCode::NoTemplates: return "NoTemplates";
        case ErrorCode::Unrepairable: return "Unrepairable";
        case ErrorCode::UnknownEntity: return "UnknownEntity";
        case ErrorCode::AmbiguousEntity: return "AmbiguousEntity";
        case ErrorCode::InvalidPeriod: return "InvalidPeriod";
        case ErrorCode::InsufficientData: return "InsufficientData";
        case ErrorCode::ModelLoadError: return "ModelLoadError";
        case ErrorCode::MissingSlot: return "MissingSlot";
        case ErrorCode::UnsupportedType: return "UnsupportedType";
        case ErrorCode::PlanSyntaxError: return "PlanSyntaxError";
        case ErrorCode::ExecError: return "ExecError";
        case ErrorCode::FileNotFound: return "FileNotFound";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

}  // namespace nlstplan
