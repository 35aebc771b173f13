#pragma once

namespace roiscope {

// Selects between the OpenMP kernels and their serial reference versions.
// Both paths produce identical results; the serial one exists for testing
// and benchmarking.
enum class Exec { serial, parallel };

}  // namespace roiscope
