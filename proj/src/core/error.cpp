#include "luxp/error.hpp"

namespace luxp {

void fail_validation(const std::string& message) { throw ValidationError(message); }

void fail_io(const std::string& message) { throw IoError(message); }

} // namespace luxp
