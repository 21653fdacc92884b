#pragma once

#include <stdexcept>
#include <string>

namespace sgcv {

/// A leverage entry is too close to 1 for the leave-one-out identity to be
/// evaluated at usable precision.
class degenerate_leverage_error : public std::runtime_error {
 public:
  explicit degenerate_leverage_error(const std::string& what)
      : std::runtime_error(what) {}
};

/// The constraint system has no usable minimum-norm solution (e.g. a
/// predictor asked to train on fewer samples than its polynomial needs).
class singular_system_error : public std::runtime_error {
 public:
  explicit singular_system_error(const std::string& what)
      : std::runtime_error(what) {}
};

}  // namespace sgcv
