#pragma once

#include <stdexcept>
#include <string>

namespace pwave {

// Loss of the timelike condition (g or D below the configured floor).
class DegenerateMetricError : public std::runtime_error {
 public:
  explicit DegenerateMetricError(const std::string& what) : std::runtime_error(what) {}
};

class TimelikeViolationError : public std::runtime_error {
 public:
  TimelikeViolationError(const std::string& what, double t, int node)
      : std::runtime_error(what), time(t), node_index(node) {}
  double time = 0.0;
  int node_index = -1;
};

class QuadratureError : public std::runtime_error {
 public:
  explicit QuadratureError(const std::string& what) : std::runtime_error(what) {}
};

class OrderNotImplementedError : public std::logic_error {
 public:
  explicit OrderNotImplementedError(const std::string& what) : std::logic_error(what) {}
};

class RegionError : public std::invalid_argument {
 public:
  explicit RegionError(const std::string& what) : std::invalid_argument(what) {}
};

class SupportOverflowError : public std::invalid_argument {
 public:
  explicit SupportOverflowError(const std::string& what) : std::invalid_argument(what) {}
};

}  // namespace pwave
