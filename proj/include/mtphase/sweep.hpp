#pragma once

#include "mtphase/threshold.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace mtphase {

/// Worker count from an explicit value, else MTPHASE_WORKERS, else the
/// hardware concurrency (at least 1).
int resolve_workers(std::optional<int> requested);

/// Evaluates fn(0..n-1) on a pool of `workers` threads. Results are stored by
/// index, so the output order never depends on completion order. Exceptions
/// escape only from fn calls that the caller does not guard.
template <typename T>
std::vector<T> parallel_map(std::size_t n, int workers, const std::function<T(std::size_t)>& fn);

struct SweepCell {
    int ix = 0;
    int iy = 0;
    double x = 0;
    double y = 0;
    std::optional<RegionReport> region;
    std::string error;  ///< "<ErrorCode>: message" when the cell failed
};

struct SweepSpec {
    ParameterPlane plane;
    int nx = 1;
    int ny = 1;

    /// Cell coordinates: endpoints included; a single point sits at the lower bound.
    double x_at(int ix) const;
    double y_at(int iy) const;
};

/// classify_region over the grid, row-major in (iy, ix). Per-cell errors are
/// recorded and the sweep continues.
std::vector<SweepCell> sweep_regions(const SweepSpec& spec, int workers);

}  // namespace mtphase

#include "mtphase/detail/parallel_map.hpp"
