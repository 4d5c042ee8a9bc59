#include "fsda/error.hpp"

namespace fsda {

void check_dimension(std::string_view what, std::size_t expected, std::size_t actual) {
  if (expected != actual) {
    throw DimensionError(std::string(what) + ": expected length " + std::to_string(expected) +
                         ", got " + std::to_string(actual));
  }
}

}  // namespace fsda
