#pragma once

#include <stdexcept>

namespace beamsurfer {

// Unreadable or invalid scenario, scene or codebook input.
class ConfigError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

} // namespace beamsurfer
