#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace finsler {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed expression text. offset is a byte offset into the input.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(what + " at offset " + std::to_string(offset)), offset_(offset), detail_(what) {}

  std::size_t offset() const noexcept { return offset_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::size_t offset_;
  std::string detail_;
};

// Evaluation left the domain of an expression node. order is the lowest
// partial-derivative order that could not be produced (0 = the value itself).
class DomainError : public Error {
 public:
  DomainError(const std::string& node, std::size_t offset, int order, const std::string& why)
      : Error("domain violation in '" + node + "' (offset " + std::to_string(offset) + ", order " +
              std::to_string(order) + "): " + why),
        node_(node),
        offset_(offset),
        order_(order) {}

  const std::string& node() const noexcept { return node_; }
  std::size_t offset() const noexcept { return offset_; }
  int order() const noexcept { return order_; }

 private:
  std::string node_;
  std::size_t offset_;
  int order_;
};

// Geometric precondition failed: inadmissible point, non-positive phi,
// degenerate denominators, wrong dimension.
class GeometryError : public Error {
 public:
  using Error::Error;
};

}  // namespace finsler
