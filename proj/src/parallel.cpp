#include "kslg/parallel.hpp"

#include <cstdlib>
#include <string>

namespace kslg {

std::size_t worker_limit() {
    if (const char* env = std::getenv("KSLG_THREADS")) {
        try {
            std::size_t used = 0;
            const long n = std::stol(env, &used);
            if (used == std::string(env).size() && n > 0) return static_cast<std::size_t>(n);
        } catch (const std::exception&) {
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace kslg
