#pragma once

#include <stdexcept>
#include <string>

namespace beauty {

// Raised when a credence or frequency is requested for a protocol that
// never wakes anybody up: the per-awakening quantities are undefined.
class NoAwakeningsError : public std::runtime_error {
public:
  NoAwakeningsError() : std::runtime_error("protocol produces no awakenings") {}
  explicit NoAwakeningsError(const std::string& what) : std::runtime_error(what) {}
};

// Malformed or invalid protocol description. The message starts with the
// path of the offending field ("coin.pH: ...").
class ProtocolError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace beauty
