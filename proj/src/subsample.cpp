#include "decorr/subsample.hpp"

#include <cmath>
#include <numeric>

#include "decorr/errors.hpp"

namespace decorr {

IndexSet subsample_indices(int T, double p, Rng& rng) {
    if (T < 1) throw ContractViolation("subsample_indices: T must be >= 1");
    if (!(p > 0.0) || p > 1.0)
        throw ConfigError("subsample_p must be in (0, 1], got " + std::to_string(p));

    IndexSet set;
    set.fraction = p;
    set.indices.resize(static_cast<std::size_t>(T));
    std::iota(set.indices.begin(), set.indices.end(), 0);

    if (p == 1.0) return set;

    const int m = static_cast<int>(std::floor(p * static_cast<double>(T)));
    for (int i = 0; i < m; ++i) {
        const int j = i + static_cast<int>(rng.uniform_int(
                              static_cast<std::uint64_t>(T - i)));
        std::swap(set.indices[static_cast<std::size_t>(i)],
                  set.indices[static_cast<std::size_t>(j)]);
    }
    set.indices.resize(static_cast<std::size_t>(m));
    return set;
}

}  // namespace decorr
