#include "bcp/configuration.hpp"

namespace bcp {

Configuration seen_from_edge(const Configuration& config) {
    const int64_t shift = config.rightmost();  // throws on empty
    Configuration out;
    out.mode = config.mode;
    out.window = {config.window.lo - shift, config.window.hi - shift};
    for (int64_t s : config.occupied) out.occupied.insert(s - shift);
    return out;
}

}  // namespace bcp
