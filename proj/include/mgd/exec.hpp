#pragma once

namespace mgd {

// Serial keeps the straightforward reference loops; Parallel runs the OpenMP
// kernels. Both must produce identical results (work is decomposed so no
// floating-point reduction order depends on the thread count).
enum class Exec { serial, parallel };

}  // namespace mgd
