#include "synctrans/phase_sweep.hpp"

#include <cmath>
#include <random>

#include "synctrans/angles.hpp"
#include "synctrans/error.hpp"

namespace synctrans {

namespace {

// F(psi) = sum_m b_m sin(m psi) with b_m = -a_m cos(m alpha + gamma_m) fixed for one alpha.
class FrozenRhs {
 public:
  FrozenRhs(const HarmonicCoupling& c, double alpha) : coeff_(c.max_order() + 1, 0.0) {
    for (const auto& h : c.harmonics()) coeff_[h.m] = -h.a * std::cos(h.m * alpha + h.gamma);
  }

  double operator()(double psi) const {
    const double s1 = std::sin(psi);
    const double twice_cos = 2.0 * std::cos(psi);
    double s_prev = 0.0;
    double s_cur = s1;
    double sum = coeff_[1] * s1;
    for (std::size_t m = 2; m < coeff_.size(); ++m) {
      const double s_next = twice_cos * s_cur - s_prev;
      s_prev = s_cur;
      s_cur = s_next;
      sum += coeff_[m] * s_cur;
    }
    return sum;
  }

 private:
  std::vector<double> coeff_;
};

struct CellResult {
  std::optional<Criticality> zero;
  std::optional<Criticality> pi;
};

std::optional<Criticality> classify_central(const HarmonicCoupling& c, Base base) {
  try {
    const auto root = find_central_bifurcation(c, base);
    if (!root) return std::nullopt;
    return classify_criticality(c, base, root->alpha).tag;
  } catch (const NumericalError&) {
    return std::nullopt;
  }
}

CellResult map_cell(double gamma2, double gamma3, double r, double s) {
  const auto c = HarmonicCoupling::three_harmonic(r, s, gamma2, gamma3);
  return {classify_central(c, Base::Zero), classify_central(c, Base::Pi)};
}

CriticalityMap empty_map(const std::vector<double>& r_grid, const std::vector<double>& s_grid) {
  if (r_grid.empty() || s_grid.empty())
    throw NumericalError(ErrorCode::InvalidArgument, "criticality map grids must be nonempty");
  CriticalityMap map;
  map.r_grid = r_grid;
  map.s_grid = s_grid;
  const std::size_t n = r_grid.size() * s_grid.size();
  map.class0.resize(n);
  map.class_pi.resize(n);
  map.combined.resize(n, RegionLabel::Undetermined);
  return map;
}

void store(CriticalityMap& map, std::size_t idx, const CellResult& cell) {
  map.class0[idx] = cell.zero;
  map.class_pi[idx] = cell.pi;
  map.combined[idx] = combine_criticality(cell.zero, cell.pi);
}

}  // namespace

void SweepProtocol::validate() const {
  if (alpha_grid.empty()) throw NumericalError(ErrorCode::InvalidArgument, "empty alpha grid");
  if (!(settle_time > 0.0)) throw NumericalError(ErrorCode::InvalidArgument, "settle_time must be > 0");
  if (!(perturbation_scale >= 0.0))
    throw NumericalError(ErrorCode::InvalidArgument, "perturbation_scale must be >= 0");
  if (!(integrator_step > 0.0)) throw NumericalError(ErrorCode::InvalidArgument, "integrator_step must be > 0");
  if (alpha_grid.size() > 1) {
    const bool ascending = alpha_grid[1] > alpha_grid[0];
    for (std::size_t i = 1; i < alpha_grid.size(); ++i) {
      const bool ok = ascending ? alpha_grid[i] > alpha_grid[i - 1] : alpha_grid[i] < alpha_grid[i - 1];
      if (!ok) throw NumericalError(ErrorCode::InvalidArgument, "alpha grid must be strictly monotone");
    }
  }
}

std::vector<SweepPoint> pseudocontinuation_sweep(const HarmonicCoupling& c, const SweepProtocol& proto,
                                                 double psi_init) {
  proto.validate();
  std::mt19937_64 rng(proto.rng_seed);
  std::uniform_real_distribution<double> kick(-1.0, 1.0);

  const double h = proto.integrator_step;
  const auto steps = static_cast<long>(std::ceil(proto.settle_time / h - 1e-9));
  const long tail = std::max(1L, static_cast<long>(std::ceil(0.01 * static_cast<double>(steps))));

  std::vector<SweepPoint> out;
  out.reserve(proto.alpha_grid.size());
  double psi = psi_init;
  for (std::size_t k = 0; k < proto.alpha_grid.size(); ++k) {
    const double alpha = proto.alpha_grid[k];
    if (k > 0) psi += proto.perturbation_scale * kick(rng);
    const FrozenRhs f(c, alpha);
    double tail_sum = 0.0;
    for (long i = 0; i < steps; ++i) {
      const double k1 = f(psi);
      const double k2 = f(psi + 0.5 * h * k1);
      const double k3 = f(psi + 0.5 * h * k2);
      const double k4 = f(psi + h * k3);
      const double next = psi + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      if (next == psi) {
        // exact fixed point of the step map: every remaining step repeats it
        const long counted = std::max(0L, i - (steps - tail));
        tail_sum += static_cast<double>(tail - counted) * psi;
        break;
      }
      psi = next;
      if (i >= steps - tail) tail_sum += psi;
    }
    psi = wrap_two_pi(tail_sum / static_cast<double>(tail));
    out.push_back({alpha, psi});
  }
  return out;
}

std::string_view to_string(RegionLabel label) {
  switch (label) {
    case RegionLabel::ZeroContPiDisc: return "ZeroContPiDisc";
    case RegionLabel::ZeroDiscPiCont: return "ZeroDiscPiCont";
    case RegionLabel::Same: return "Same";
    case RegionLabel::Undetermined: return "Undetermined";
  }
  return "Unknown";
}

RegionLabel combine_criticality(std::optional<Criticality> zero, std::optional<Criticality> pi) {
  if (!zero || !pi || *zero == Criticality::Degenerate || *pi == Criticality::Degenerate)
    return RegionLabel::Undetermined;
  if (*zero == *pi) return RegionLabel::Same;
  return *zero == Criticality::Continuous ? RegionLabel::ZeroContPiDisc : RegionLabel::ZeroDiscPiCont;
}

CriticalityMap criticality_map(double gamma2, double gamma3, const std::vector<double>& r_grid,
                               const std::vector<double>& s_grid) {
  auto map = empty_map(r_grid, s_grid);
  const auto nr = static_cast<long>(r_grid.size());
  const auto ns = static_cast<long>(s_grid.size());
#pragma omp parallel for collapse(2) schedule(dynamic, 16)
  for (long ir = 0; ir < nr; ++ir)
    for (long is = 0; is < ns; ++is)
      store(map, map.index(ir, is), map_cell(gamma2, gamma3, r_grid[ir], s_grid[is]));
  return map;
}

CriticalityMap criticality_map_reference(double gamma2, double gamma3, const std::vector<double>& r_grid,
                                         const std::vector<double>& s_grid) {
  auto map = empty_map(r_grid, s_grid);
  for (std::size_t ir = 0; ir < r_grid.size(); ++ir)
    for (std::size_t is = 0; is < s_grid.size(); ++is)
      store(map, map.index(ir, is), map_cell(gamma2, gamma3, r_grid[ir], s_grid[is]));
  return map;
}

}  // namespace synctrans
