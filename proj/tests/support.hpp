#pragma once

// Shared fixtures and random generators for the test binaries.

#include <cstdint>
#include <random>
#include <vector>

#include "synctrans/brusselator.hpp"
#include "synctrans/engineering.hpp"
#include "synctrans/phase_model.hpp"

namespace testing_support {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

  /// 1..max_n harmonics with a_1 = 1 and random higher terms.
  synctrans::HarmonicCoupling coupling(int max_n, bool zero_phases = false, double max_amp = 1.0) {
    const int n = integer(1, max_n);
    std::vector<synctrans::Harmonic> hs{{1, 1.0, zero_phases ? 0.0 : uniform(-3.0, 3.0)}};
    for (int m = 2; m <= n; ++m)
      hs.push_back({m, uniform(-max_amp, max_amp), zero_phases ? 0.0 : uniform(-3.0, 3.0)});
    return synctrans::HarmonicCoupling(hs);
  }

 private:
  std::mt19937_64 rng_;
};

// Limit cycle, PRC and fitted coupling at A = 0.9, B = 2.3, computed once per binary.
struct Oscillator {
  synctrans::BrusselatorParams params;
  synctrans::LimitCycle lc;
  synctrans::PhaseResponseCurve prc;
  synctrans::EngineeredCoupling coupling;
};

inline const Oscillator& oscillator() {
  static const Oscillator osc = [] {
    Oscillator o;
    o.lc = synctrans::find_limit_cycle(o.params);
    o.prc = synctrans::compute_prc(o.lc, o.params);
    o.coupling = synctrans::engineer_coupling(o.prc, o.lc, synctrans::HmmTarget{});
    return o;
  }();
  return osc;
}

}  // namespace testing_support
