#include "capdyn/parallel.hpp"

#include <cstdlib>
#include <string>

namespace capdyn {

int resolve_threads(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("CAPDYN_THREADS")) {
        try {
            const int n = std::stoi(env);
            if (n > 0) return n;
        } catch (...) {
            // fall through to the hardware default
        }
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

} // namespace capdyn
