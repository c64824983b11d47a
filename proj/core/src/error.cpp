#include "chaintrace/error.hpp"

namespace chaintrace {

const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::Usage: return "usage";
    case ErrorKind::Data: return "data";
    case ErrorKind::Transport: return "transport";
    case ErrorKind::Service: return "service";
    case ErrorKind::Internal: return "internal";
    }
    return "internal";
}

} // namespace chaintrace
