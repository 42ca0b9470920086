#include "loss/error.hpp"

namespace loss {

const char* error_class_name(ErrorCode code)
{
    switch (code) {
    case ErrorCode::usage: return "usage";
    case ErrorCode::config: return "config";
    case ErrorCode::io: return "io";
    case ErrorCode::numeric: return "numeric";
    case ErrorCode::horizon: return "horizon";
    case ErrorCode::layout: return "layout";
    case ErrorCode::exchange: return "exchange";
    case ErrorCode::domain: return "domain";
    case ErrorCode::dimension: return "dimension";
    case ErrorCode::internal: return "internal";
    }
    return "internal";
}

} // namespace loss
