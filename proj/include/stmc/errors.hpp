#pragma once

#include <stdexcept>
#include <string>

namespace stmc {

// Base for every error the library raises on a well-formed call.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Not/Or above occupancy or edge facts, or a guard the grounder cannot read.
class UnsupportedFragment : public Error {
 public:
  using Error::Error;
};

// A TimeStamp(TERTP(...)) guard reached grounding without a trigger binding.
class UnresolvedEventTime : public Error {
 public:
  using Error::Error;
};

class UnknownOwner : public Error {
 public:
  using Error::Error;
};

class UnknownNode : public Error {
 public:
  using Error::Error;
};

class EmptySelection : public Error {
 public:
  using Error::Error;
};

class PointOutOfBounds : public Error {
 public:
  using Error::Error;
};

}  // namespace stmc
