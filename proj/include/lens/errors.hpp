// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lens {

// Invalid values or states detected while running the pipeline
// (non-finite inputs, inverted ranges, mismatched dimensions, ...).
// The CLI maps this to exit code 3.
class DomainError : public std::runtime_error {
 public:
  explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

// Malformed or unreadable input files. The CLI maps this to exit code 2.
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}

  // Convenience for "file:line: message" diagnostics.
  ParseError(const std::string& file, std::size_t line, const std::string& what)
      : std::runtime_error(file + ":" + std::to_string(line) + ": " + what) {}
};

// Camera placement ran out of refinement iterations before reaching the
// requested camera count. The CLI maps this to exit code 4.
class PlacementInfeasibleError : public DomainError {
 public:
  PlacementInfeasibleError(int last_resolution, std::size_t last_retained,
                           std::size_t requested)
      : DomainError("placement infeasible: " + std::to_string(last_retained) +
                    " of " + std::to_string(requested) +
                    " cameras retained at final resolution parameter " +
                    std::to_string(last_resolution)),
        last_resolution_(last_resolution),
        last_retained_(last_retained),
        requested_(requested) {}

  int last_resolution() const { return last_resolution_; }
  std::size_t last_retained() const { return last_retained_; }
  std::size_t requested() const { return requested_; }

 private:
  int last_resolution_;
  std::size_t last_retained_;
  std::size_t requested_;
};

// A numerical failure while shading a ray (non-finite sample, bad interval).
// Carries enough context to locate the offending pixel.
class RenderError : public DomainError {
 public:
  explicit RenderError(const std::string& what) : DomainError(what) {}
};

}  // namespace lens
