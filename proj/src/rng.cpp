#include "crsense/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace crsense {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t mix_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t index) {
    return splitmix64(splitmix64(master ^ (stream * 0xA24BAED4963EE407ULL)) ^
                      (index * 0x9FB21C651E98DF25ULL));
}

std::vector<double> discount_weights(double discount, int slots) {
    if (discount <= 0.0 || discount >= 1.0)
        throw std::invalid_argument("discount must lie in (0,1)");
    if (slots <= 0)
        throw std::invalid_argument("slots must be positive");
    std::vector<double> w(static_cast<std::size_t>(slots));
    const double norm = 1.0 - std::pow(discount, slots);
    double g = 1.0;
    for (int n = 0; n < slots; ++n) {
        w[static_cast<std::size_t>(n)] = (1.0 - discount) * g / norm;
        g *= discount;
    }
    return w;
}

} // namespace crsense
