#include "kahler/error.hpp"

namespace kahler {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::NonFiniteIntegrand: return "NonFiniteIntegrand";
        case ErrorCode::NoBracket: return "NoBracket";
        case ErrorCode::NoConvergence: return "NoConvergence";
        case ErrorCode::RankDeficient: return "RankDeficient";
        case ErrorCode::NonFiniteCurvature: return "NonFiniteCurvature";
        case ErrorCode::NotAdmissible: return "NotAdmissible";
        case ErrorCode::OutOfDomain: return "OutOfDomain";
        case ErrorCode::SearchFailed: return "SearchFailed";
        case ErrorCode::BadDirection: return "BadDirection";
        case ErrorCode::WeightSignError: return "WeightSignError";
        case ErrorCode::NotTraceless: return "NotTraceless";
        case ErrorCode::InvalidConfig: return "InvalidConfig";
    }
    return "Unknown";
}

}  // namespace kahler
