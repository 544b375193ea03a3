#pragma once

#include <stdexcept>
#include <string>

namespace mbc {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EmptyDomain : Error {
  using Error::Error;
};
struct DegenerateInput : Error {
  using Error::Error;
};
struct UnsupportedMeasure : Error {
  using Error::Error;
};
struct InfeasiblePerturbation : Error {
  using Error::Error;
};
struct InfeasibleBlueprint : Error {
  using Error::Error;
};
struct FormatError : Error {
  using Error::Error;
};
struct TooLarge : Error {
  using Error::Error;
};
struct SingularSystem : Error {
  using Error::Error;
};

}  // namespace mbc
