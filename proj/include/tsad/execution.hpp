#pragma once

namespace tsad {

/// Selects the OpenMP kernel or the serial reference it is tested against.
/// Both produce bit-identical results.
enum class Execution { serial, parallel };

}  // namespace tsad
