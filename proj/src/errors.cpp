#include "cdnozzle/errors.hpp"

namespace cdnozzle {

int exit_code(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::config: return 2;
    case ErrorKind::closure:
    case ErrorKind::domain:
    case ErrorKind::range:
    case ErrorKind::assembly: return 3;
    case ErrorKind::numeric:
    case ErrorKind::convergence: return 4;
    case ErrorKind::consistency: return 5;
    }
    return 5;
}

const char* kind_name(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::config: return "config";
    case ErrorKind::closure: return "closure";
    case ErrorKind::domain: return "domain";
    case ErrorKind::range: return "range";
    case ErrorKind::assembly: return "assembly";
    case ErrorKind::numeric: return "numeric";
    case ErrorKind::convergence: return "convergence";
    case ErrorKind::consistency: return "consistency";
    }
    return "unknown";
}

}  // namespace cdnozzle
