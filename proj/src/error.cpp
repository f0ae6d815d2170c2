#include "microlocal/error.hpp"

namespace microlocal {

Error::Error(std::string name, const std::string& message)
    : std::runtime_error(name + ": " + message), name_(std::move(name)) {}

void fail(const char* name, const std::string& message) { throw Error(name, message); }

}  // namespace microlocal
