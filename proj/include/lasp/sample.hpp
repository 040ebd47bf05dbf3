// Copyright 2026 The LASP Authors
// Licensed under the Apache License, Version 2.0

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lasp {

/// One measured execution of a configuration.
struct Sample {
  std::size_t config_index = 0;
  double exec_time = 0.0;  // seconds
  double power = 0.0;      // watts
  double fidelity = 1.0;
  double noise_applied = 0.0;
};

/// A measurement that cannot be used: non-finite, negative, or a probe fault.
class MeasurementError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace lasp
