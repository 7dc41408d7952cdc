#pragma once

#include <stdexcept>
#include <string>

namespace evcrp {

// Malformed or unreadable input artifacts (instance files, CSVs, configs).
class io_error : public std::runtime_error {
 public:
  explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

// A model/dataset was built against a different codec layout.
class codec_mismatch_error : public std::runtime_error {
 public:
  explicit codec_mismatch_error(const std::string& what)
      : std::runtime_error(what) {}
};

// A solve could not produce a usable result (infeasible pins, missing model).
class solve_error : public std::runtime_error {
 public:
  explicit solve_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace evcrp
