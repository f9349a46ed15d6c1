#include "mtphase/sweep.hpp"

#include "mtphase/errors.hpp"

#include <cstdlib>
#include <thread>

namespace mtphase {

int resolve_workers(std::optional<int> requested) {
    if (requested && *requested > 0) return *requested;
    if (const char* env = std::getenv("MTPHASE_WORKERS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<int>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

double SweepSpec::x_at(int ix) const {
    return nx == 1 ? plane.x_lo : plane.x_lo + (plane.x_hi - plane.x_lo) * ix / (nx - 1);
}

double SweepSpec::y_at(int iy) const {
    return ny == 1 ? plane.y_lo : plane.y_lo + (plane.y_hi - plane.y_lo) * iy / (ny - 1);
}

std::vector<SweepCell> sweep_regions(const SweepSpec& spec, int workers) {
    const auto n = static_cast<std::size_t>(spec.nx) * static_cast<std::size_t>(spec.ny);
    return parallel_map<SweepCell>(n, workers, [&](std::size_t k) {
        SweepCell cell;
        cell.ix = static_cast<int>(k % static_cast<std::size_t>(spec.nx));
        cell.iy = static_cast<int>(k / static_cast<std::size_t>(spec.nx));
        cell.x = spec.x_at(cell.ix);
        cell.y = spec.y_at(cell.iy);
        try {
            cell.region = classify_region(spec.plane.at(cell.x, cell.y));
        } catch (const Error& e) {
            cell.error = std::string(error_code_name(e.code())) + ": " + e.what();
        }
        return cell;
    });
}

}  // namespace mtphase
