#pragma once

namespace cdnozzle {

// every data-parallel kernel has an OpenMP version and a plain-loop reference; both
// produce bitwise identical results
enum class Exec { serial, parallel };

void set_num_threads(int n);
int max_threads();

}  // namespace cdnozzle
