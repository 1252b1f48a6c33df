#pragma once

#include <complex>
#include <cstdint>
#include <string_view>

namespace ris {

// Deterministic, platform-independent random stream (splitmix64 core with
// Box-Muller gaussians). Distinct named streams are derived from one master
// seed so that scenario variants can replay identical channel draws.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    static Rng stream(std::uint64_t master_seed, std::string_view label,
                      std::uint64_t index = 0);

    std::uint64_t next_u64();
    double uniform();             // [0, 1)
    double gaussian();            // N(0, 1)
    // CN(0, 1): independent re/im with variance 1/2 each
    std::complex<double> cgaussian();

  private:
    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace ris
