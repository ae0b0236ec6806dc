#pragma once

#include <string>

#include "cylwave/config.hpp"
#include "cylwave/inversion.hpp"
#include "cylwave/synthdata.hpp"

namespace cylwave {

inline constexpr const char* kVersion = "0.1.0";

/// Problem objects assembled from a configuration.
Grid3 make_grid(const RunConfig& cfg);
RegionMask make_mask(const RunConfig& cfg, const Grid3& grid);
GaussianSum make_phantom(const RunConfig& cfg);
ScalarField3 make_theta0(const RunConfig& cfg, const Grid3& grid);
TruthSetup make_truth(const RunConfig& cfg);
KnownParts make_known(const RunConfig& cfg, const Grid3& grid);

/// Runs one subcommand end to end, writing the run manifest before any other
/// artifact. Returns the process exit status: 0 success, 2 validation
/// failure, 3 numerical failure.
int dispatch(const std::string& subcommand, const RunConfig& cfg);

} // namespace cylwave
