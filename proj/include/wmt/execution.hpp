#pragma once

namespace wmt {

/// Selects the serial reference loop or the OpenMP loop for the report kernels.
/// Both produce identical results; the serial path is the reference.
enum class Execution { sequential, parallel };

}  // namespace wmt
