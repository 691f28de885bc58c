#include "rti/errors.hpp"

namespace rti {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::ForbiddenTransition: return "ForbiddenTransition";
        case ErrorCode::GroundStateEmitter: return "GroundStateEmitter";
        case ErrorCode::NoAbsorbers: return "NoAbsorbers";
        case ErrorCode::ChannelMismatch: return "ChannelMismatch";
        case ErrorCode::EnergyMismatch: return "EnergyMismatch";
        case ErrorCode::InvalidAlpha: return "InvalidAlpha";
        case ErrorCode::InvalidThresholds: return "InvalidThresholds";
        case ErrorCode::InvalidTarget: return "InvalidTarget";
        case ErrorCode::InvalidCount: return "InvalidCount";
        case ErrorCode::DuplicateEvent: return "DuplicateEvent";
        case ErrorCode::CycleDetected: return "CycleDetected";
        case ErrorCode::UnknownEvent: return "UnknownEvent";
        case ErrorCode::SchemaError: return "SchemaError";
        case ErrorCode::NormalizationError: return "NormalizationError";
        case ErrorCode::InvalidScenario: return "InvalidScenario";
        case ErrorCode::IoError: return "IoError";
    }
    return "UnknownError";
}

} // namespace rti
