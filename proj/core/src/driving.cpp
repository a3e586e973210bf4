#include <cmath>

#include "slitflow/error.hpp"
#include "slitflow/flow.hpp"
#include "slitflow/rng.hpp"

namespace slitflow::flow {

namespace {

constexpr std::uint64_t kIncrementStream = 1;
constexpr std::uint64_t kBridgeStream = 2;

DrivingPath make_grid(double kappa, double alpha, double T, double dt) {
  if (!(T > 0.0) || !(dt > 0.0) || dt > T * (1.0 + 1e-12))
    throw Error(ErrorCode::ParameterRange, "driving grid needs 0 < dt <= T");
  if (!(kappa > 0.0)) throw Error(ErrorCode::ParameterRange, "kappa must be positive");
  DrivingPath d;
  d.kappa = kappa;
  d.alpha = alpha;
  d.dt = dt;
  const auto n = static_cast<std::size_t>(std::llround(std::ceil(T / dt - 1e-9)));
  d.times.resize(n + 1);
  for (std::size_t k = 0; k <= n; ++k) d.times[k] = std::min(T, static_cast<double>(k) * dt);
  d.times[n] = T;
  d.dB.assign(n, 0.0);
  d.xi.assign(n + 1, 0.0);
  return d;
}

void fill_xi(DrivingPath& d) {
  const double sk = std::sqrt(d.kappa);
  double b = 0.0;
  d.xi[0] = 0.0;
  for (std::size_t k = 0; k < d.dB.size(); ++k) {
    b += d.dB[k];
    d.xi[k + 1] = sk * b + d.alpha * d.times[k + 1];
  }
}

}  // namespace

std::uint64_t DrivingPath::bridge_seed() const { return rng::stream_seed(seed, kBridgeStream); }

DrivingPath sample_driving(double kappa, double alpha, double T, double dt, std::uint64_t seed) {
  DrivingPath d = make_grid(kappa, alpha, T, dt);
  d.seed = seed;
  d.stochastic = true;
  rng::Engine eng(rng::stream_seed(seed, kIncrementStream));
  rng::Normal normal;
  for (std::size_t k = 0; k < d.dB.size(); ++k)
    d.dB[k] = std::sqrt(d.times[k + 1] - d.times[k]) * normal(eng);
  fill_xi(d);
  return d;
}

DrivingPath zero_noise_driving(double kappa, double alpha, double T, double dt) {
  DrivingPath d = make_grid(kappa, alpha, T, dt);
  d.stochastic = false;
  fill_xi(d);
  return d;
}

DrivingPath driving_from_function(double kappa, double T, double dt,
                                  const std::function<double(double)>& xi) {
  DrivingPath d = make_grid(kappa, 0.0, T, dt);
  d.stochastic = false;
  const double sk = std::sqrt(kappa);
  for (std::size_t k = 0; k <= d.steps(); ++k) d.xi[k] = xi(d.times[k]);
  if (d.xi[0] != 0.0) throw Error(ErrorCode::ParameterRange, "driving function must start at 0");
  for (std::size_t k = 0; k < d.steps(); ++k) d.dB[k] = (d.xi[k + 1] - d.xi[k]) / sk;
  return d;
}

}  // namespace slitflow::flow
