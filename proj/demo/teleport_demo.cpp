// Odd cat through symmetric fixed links: fidelity and the sign of the
// teleported Wigner function at the origin, then the beam-wandering law for
// the default receiver.

#include <cstdio>

#include "catlink/catlink.hpp"

int main() {
  using namespace catlink;
  const CatState cat({0.0, 1.5}, std::numbers::pi);
  const double eta = eta_from_intensity(0.99);

  std::printf("%8s %10s %10s %14s\n", "loss dB", "V'", "F", "W_out(0,0)");
  for (double loss : {0.0, 2.0, 5.0, 10.0, 20.0}) {
    const double t = symmetric_transmissivity_for_loss(loss);
    const double v = effective_variance(teleport_variance({1.15, 1.0, t, t, eta}), eta);
    std::printf("%8.1f %10.5f %10.5f %+14.6e\n", loss, v, closed_form_fidelity(v, cat),
                teleported_cat_analytic(cat, 1.0, v, {0.0, 0.0}));
  }

  const auto law = BeamWanderingLaw::for_geometry(BeamGeometry{});
  std::printf("\nbeam wandering, W = a: T0 = %.6f, shape = %.6f, scale = %.6f\n",
              law.max_transmissivity, law.shape, law.scale);
  for (double s : {0.2, 0.7, 1.5}) {
    const BeamWanderingChannel ch{BeamGeometry{}, s};
    const auto est = estimate_mean_loss(ch, 100000, 7);
    std::printf("  sigma/a = %.1f: mean loss %.3f dB\n", s, est.loss_db);
  }
}
