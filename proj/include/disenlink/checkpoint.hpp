#pragma once

#include <string>

#include "disenlink/model.hpp"

namespace disenlink {

/// Text checkpoint: header (format tag, factor count, widths, seed, full
/// hyperparameter block) followed by one named tensor per parameter.
/// Values are written with 17 significant digits, so save → load → save is
/// value-exact and byte-identical.
void save_checkpoint(const ModelState& state, const std::string& path);
ModelState load_checkpoint(const std::string& path);

}  // namespace disenlink
