// Generated by `treecomp experiment pilot`; do not edit by hand.
#pragma once

#include "treecomp/experiments.hpp"

namespace treecomp {

inline constexpr std::uint64_t kPilotSeed = 20240601ULL;

// family, n, pilot trials, mean, sd, reference sample, lo, hi, sample consistent
inline const PilotBand kPilotBands[] = {
    {Family::Recursive, 500, 1000, 91.784999999999997, 4.6667497847595749, 250, 89.805065748657384, 93.764934251342609, false},
    {Family::Bst, 500, 1000, 176.267, 5.1070336588662562, 172, 172, 178.43373087915936, true},
    {Family::Recursive, 5000, 1000, 647.05700000000002, 13.150920032366479, 663, 641.47753715976296, 663, true},
    {Family::Bst, 5000, 1000, 1342.769, 15.281202640962315, 1361, 1336.2857347927338, 1361, true},
};

}  // namespace treecomp
