#include "off/error.hpp"

namespace off {

std::string_view to_string(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::NonNumericCell: return "NonNumericCell";
    case ErrorCode::NaInBaseFeature: return "NaInBaseFeature";
    case ErrorCode::AlreadyMissing: return "AlreadyMissing";
    case ErrorCode::EmptySplit: return "EmptySplit";
    case ErrorCode::DegenerateLabels: return "DegenerateLabels";
    case ErrorCode::Singular: return "Singular";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InsufficientSubset: return "InsufficientSubset";
    case ErrorCode::UnknownSubset: return "UnknownSubset";
    case ErrorCode::NonBinaryFeature: return "NonBinaryFeature";
    case ErrorCode::ZeroMassEvent: return "ZeroMassEvent";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::SingleClass: return "SingleClass";
    case ErrorCode::NoMissingRows: return "NoMissingRows";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Io: return "Io";
    case ErrorCode::Config: return "Config";
    }
    return "Unknown";
}

} // namespace off
