#pragma once

#include <string_view>

#include "gridlocus/network.hpp"

namespace gridlocus {

/// Imports the bus/gen/branch tables of a MATPOWER-style case file.
///
/// Net injection per bus is (sum of in-service Pg - Pd) / baseMVA, and the
/// same for Q. PV buses are imported as PQ buses with the generator's Qg, so
/// a case only reproduces a reference solution when Qg holds the solved
/// values. The reference bus becomes the swing bus with voltage Vg (or Vm when
/// it has no generator) at angle Va. Out-of-service branches and generators
/// are skipped.
///
/// Throws UnsupportedFeature for transformer taps, phase shifters, bus shunts,
/// isolated-type buses and multiple reference buses; MalformedDocument for
/// anything that does not parse; plus every GridCase::create error.
GridCase import_matpower(std::string_view text);

}  // namespace gridlocus
