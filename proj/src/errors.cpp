#include "expdyn/errors.hpp"

namespace expdyn {

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(message), kind_(kind) {}

}  // namespace expdyn
