#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <thread>
#include <vector>

#include "uowc/channel.hpp"
#include "uowc/config.hpp"
#include "uowc/errors.hpp"
#include "uowc/geometry.hpp"

namespace uowc::mc {

struct McConfig {
  std::uint64_t seed = 42;
  unsigned workers = 1;
  std::size_t chunk_size = 1u << 14;
};

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n_samples = 0;
  std::uint64_t seed = 0;
  double elapsed_ms = 0.0;  // wall time; informational, never serialized into data files

  double z_score(double reference) const {
    return std_error > 0.0 ? (mean - reference) / std_error : (mean == reference ? 0.0 : INFINITY);
  }
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed of chunk `index` under master seed `seed`.
inline std::uint64_t chunk_seed(std::uint64_t seed, std::uint64_t index) { return splitmix64(seed ^ splitmix64(index)); }

/// Per-chunk generator with a uniform on [0, 1) from the top 53 bits.
class ChunkRng {
 public:
  explicit ChunkRng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

/// Splits n samples into fixed-size chunks, runs `body(chunk_index, count, rng)`
/// for each on `workers` threads and returns the per-chunk results in chunk
/// order. The partition and the chunk seeds depend only on (n, chunk_size,
/// seed), so any reduction in chunk order is schedule independent.
template <class Body>
auto run_chunks(std::size_t n, const McConfig& cfg, Body body) {
  using Result = decltype(body(std::size_t{}, std::size_t{}, std::declval<ChunkRng&>()));
  const std::size_t chunk = std::max<std::size_t>(1, cfg.chunk_size);
  const std::size_t n_chunks = (n + chunk - 1) / chunk;
  std::vector<Result> results(n_chunks);
  auto run_one = [&](std::size_t c) {
    ChunkRng rng(chunk_seed(cfg.seed, c));
    const std::size_t count = std::min(chunk, n - c * chunk);
    results[c] = body(c, count, rng);
  };
  const unsigned workers = std::max(1u, std::min<unsigned>(cfg.workers, static_cast<unsigned>(std::max<std::size_t>(1, n_chunks))));
  if (workers == 1) {
    for (std::size_t c = 0; c < n_chunks; ++c) run_one(c);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t c = next++; c < n_chunks; c = next++) run_one(c);
      });
    }
    for (auto& t : pool) t.join();
  }
  return results;
}

struct Moments {
  double sum = 0.0;
  double sum_sq = 0.0;
  std::size_t n = 0;

  void add(double x) {
    sum += x;
    sum_sq += x * x;
    ++n;
  }
};

namespace detail {

inline McEstimate reduce(const std::vector<Moments>& chunks, std::uint64_t seed, double scale = 1.0) {
  Moments total;
  for (const auto& m : chunks) {
    total.sum += m.sum;
    total.sum_sq += m.sum_sq;
    total.n += m.n;
  }
  McEstimate e;
  e.seed = seed;
  e.n_samples = total.n;
  if (total.n == 0) return e;
  const double n = static_cast<double>(total.n);
  const double mean = total.sum / n;
  const double var = total.n > 1 ? std::max(0.0, (total.sum_sq - n * mean * mean) / (n - 1.0)) : 0.0;
  e.mean = scale * mean;
  e.std_error = std::abs(scale) * std::sqrt(var / n);
  return e;
}

inline double elapsed_ms(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Point-process sampling

struct NNSample {
  double distance;  // m, to the origin
  double height;    // m, z of the nearest point
};

struct NNSampleSet {
  std::vector<NNSample> samples;       // trial order
  std::size_t empty_realizations = 0;  // trials with no point in the window (excluded)
  double window_radius = 0.0;
  std::uint64_t seed = 0;
};

/// Disc radius beyond which the closed-form survival is below 1e-9.
inline double window_radius(double lambda_2d, double slab_depth) {
  return std::max(slab_depth, std::sqrt(slab_depth * slab_depth / 3.0 + std::log(1e9) / (pi * lambda_2d)));
}

/// Draws `trials` independent realizations of the slab process restricted to
/// a disc x [0, R] and records each one's nearest point to the origin.
inline NNSampleSet sample_nearest_neighbors(double lambda_2d, double slab_depth, std::size_t trials,
                                            const McConfig& cfg) {
  if (trials < 1000) throw DomainError("nearest-neighbour sampling needs at least 1000 trials");
  if (!(lambda_2d > 0.0) || !(slab_depth > 0.0)) throw DomainError("lambda_2d and slab_depth must be > 0");
  const double rw = window_radius(lambda_2d, slab_depth);
  const double mean_count = lambda_2d * pi * rw * rw;

  struct Chunk {
    std::vector<NNSample> samples;
    std::size_t empty = 0;
  };
  auto chunks = run_chunks(trials, cfg, [&](std::size_t, std::size_t count, ChunkRng& rng) {
    Chunk out;
    out.samples.reserve(count);
    std::poisson_distribution<long long> poisson(mean_count);
    for (std::size_t t = 0; t < count; ++t) {
      const long long k = poisson(rng.engine());
      double best_d2 = std::numeric_limits<double>::infinity();
      double best_z = 0.0;
      for (long long i = 0; i < k; ++i) {
        const double rho2 = rw * rw * rng.uniform();
        const double z = slab_depth * rng.uniform();
        const double d2 = rho2 + z * z;
        if (d2 < best_d2) {
          best_d2 = d2;
          best_z = z;
        }
      }
      if (k == 0) {
        ++out.empty;
      } else {
        out.samples.push_back({std::sqrt(best_d2), best_z});
      }
    }
    return out;
  });

  NNSampleSet set;
  set.window_radius = rw;
  set.seed = cfg.seed;
  set.samples.reserve(trials);
  for (auto& c : chunks) {
    set.samples.insert(set.samples.end(), c.samples.begin(), c.samples.end());
    set.empty_realizations += c.empty;
  }
  return set;
}

/// Kolmogorov-Smirnov distance between the sample and a reference CDF.
template <class Cdf>
double ks_statistic(std::vector<double> xs, Cdf cdf) {
  if (xs.empty()) return 0.0;
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

struct NNDistanceReport {
  NNSampleSet set;
  double ks_statistic;
  McEstimate mean_distance;
};

inline NNDistanceReport mc_nn_distance(double lambda_2d, double slab_depth, std::size_t trials, const McConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  NNDistanceReport rep{sample_nearest_neighbors(lambda_2d, slab_depth, trials, cfg), 0.0, {}};
  const NNDistribution dist(lambda_2d, slab_depth);
  std::vector<double> xs;
  xs.reserve(rep.set.samples.size());
  Moments m;
  for (const auto& s : rep.set.samples) {
    xs.push_back(s.distance);
    m.add(s.distance);
  }
  rep.ks_statistic = ks_statistic(std::move(xs), [&](double s) { return dist.cdf(s); });
  rep.mean_distance = detail::reduce({m}, cfg.seed);
  rep.mean_distance.elapsed_ms = detail::elapsed_ms(t0);
  return rep;
}

/// Mean height of the nearest neighbour.
inline McEstimate mc_expected_depth(double lambda_2d, double slab_depth, std::size_t trials, const McConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto set = sample_nearest_neighbors(lambda_2d, slab_depth, trials, cfg);
  Moments m;
  for (const auto& s : set.samples) m.add(s.height);
  McEstimate e = detail::reduce({m}, cfg.seed);
  e.elapsed_ms = detail::elapsed_ms(t0);
  return e;
}

// ---------------------------------------------------------------------------
// Angular integrals of the aperture power

/// Polar range of the receiver position, measured from the emitter axis.
/// [0, pi/2] is the random-orientation theorem, [0, phi_half] the main lobe,
/// [delta, delta + phi_half] the offset corollary.
struct AngularWindow {
  double theta_min = 0.0;
  double theta_max = half_pi;
};

/// C0' = r P_Tx (m+1) pi r_circle^2 e^{-cL} / (16 pi^3 L^2).
inline double angular_prefactor(const SystemParams& params, double L) {
  const double m = lambertian_order(params->phi_half);
  const double r = params.aperture_radius();
  return params->responsivity_factor * params->tx_power * (m + 1.0) * pi * r * r *
         std::exp(-params->extinction * L) / (16.0 * pi * pi * pi * L * L);
}

/// Estimates C0' * I where I is the four-angle integral of
/// cos^m(theta) |sin(theta) sin(a) cos(phi - b) + cos(theta) cos(a)| against
/// sin(theta) sin(a). Every sin-weighted angle is drawn cosine-uniform, so the
/// estimator is a plain mean times the measure of the domain.
inline McEstimate mc_power_angular(const SystemParams& params, double L, std::size_t samples, const McConfig& cfg,
                                   AngularWindow window = {}) {
  if (samples < 10000) throw DomainError("mc_power_angular needs at least 1e4 samples");
  if (!(L > 0.0)) throw DomainError("link length must be > 0");
  if (!(window.theta_min >= 0.0 && window.theta_min < window.theta_max && window.theta_max <= half_pi + 1e-12)) {
    throw DomainError("angular window must satisfy 0 <= min < max <= pi/2");
  }
  const auto t0 = std::chrono::steady_clock::now();
  const double m = lambertian_order(params->phi_half);
  const double cos_hi = std::cos(window.theta_min);
  const double cos_lo = std::max(0.0, std::cos(window.theta_max));
  const double measure = (cos_hi - cos_lo) * (2.0 * pi) * 2.0 * (2.0 * pi);

  auto chunks = run_chunks(samples, cfg, [&](std::size_t, std::size_t count, ChunkRng& rng) {
    Moments mo;
    for (std::size_t i = 0; i < count; ++i) {
      const double ct = rng.uniform(cos_lo, cos_hi);
      const double phi = rng.uniform(0.0, 2.0 * pi);
      const double ca = rng.uniform(-1.0, 1.0);
      const double beta = rng.uniform(0.0, 2.0 * pi);
      const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
      const double sa = std::sqrt(std::max(0.0, 1.0 - ca * ca));
      const double cos_gamma = st * sa * std::cos(phi - beta) + ct * ca;
      mo.add(std::pow(ct, m) * std::abs(cos_gamma));
    }
    return mo;
  });
  McEstimate e = detail::reduce(chunks, cfg.seed, angular_prefactor(params, L) * measure);
  e.elapsed_ms = detail::elapsed_ms(t0);
  return e;
}

namespace detail {

using Vec3 = std::array<double, 3>;

inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

/// Orthonormal pair perpendicular to unit n (Duff et al. 2017).
inline void orthonormal_basis(const Vec3& n, Vec3& t, Vec3& b) {
  const double sign = std::copysign(1.0, n[2]);
  const double a = -1.0 / (sign + n[2]);
  const double c = n[0] * n[1] * a;
  t = {1.0 + sign * n[0] * n[0] * a, sign * c, -sign * n[0]};
  b = {c, sign + n[1] * n[1] * a, -n[1]};
}

}  // namespace detail

/// Finite-aperture version of the same average: additionally samples a point
/// on the receiver disc and uses the exact distance, emission angle and
/// incidence angle of that point instead of the disc-centre values.
inline McEstimate mc_power_full(const SystemParams& params, double L, std::size_t samples, const McConfig& cfg) {
  if (samples < 10000) throw DomainError("mc_power_full needs at least 1e4 samples");
  if (!(L > 0.0)) throw DomainError("link length must be > 0");
  const auto t0 = std::chrono::steady_clock::now();
  const double m = lambertian_order(params->phi_half);
  const double r_circle = params.aperture_radius();
  const double c = params->extinction;

  auto chunks = run_chunks(samples, cfg, [&](std::size_t, std::size_t count, ChunkRng& rng) {
    Moments mo;
    for (std::size_t i = 0; i < count; ++i) {
      const double ct = rng.uniform();
      const double phi = rng.uniform(0.0, 2.0 * pi);
      const double ca = rng.uniform(-1.0, 1.0);
      const double beta = rng.uniform(0.0, 2.0 * pi);
      const double rho = r_circle * std::sqrt(rng.uniform());
      const double tp = rng.uniform(0.0, 2.0 * pi);

      const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
      const double sa = std::sqrt(std::max(0.0, 1.0 - ca * ca));
      const detail::Vec3 centre{L * st * std::cos(phi), L * st * std::sin(phi), L * ct};
      const detail::Vec3 normal{sa * std::cos(beta), sa * std::sin(beta), ca};
      detail::Vec3 e1, e2;
      detail::orthonormal_basis(normal, e1, e2);
      const double u = rho * std::cos(tp);
      const double v = rho * std::sin(tp);
      const detail::Vec3 p{centre[0] + u * e1[0] + v * e2[0], centre[1] + u * e1[1] + v * e2[1],
                           centre[2] + u * e1[2] + v * e2[2]};
      const double r = std::sqrt(detail::dot(p, p));
      const double cos_theta = p[2] / r;
      if (cos_theta <= 0.0) {
        mo.add(0.0);
        continue;
      }
      const double cos_gamma = std::abs(detail::dot(p, normal)) / r;
      mo.add(std::pow(cos_theta, m) / (r * r) * std::exp(-c * r) * cos_gamma);
    }
    return mo;
  });
  // (1/2) r P_Tx (m+1) / (8 pi^3) times the measure 8 pi^2 of the four
  // angles times the disc area.
  const double scale = 0.5 * params->responsivity_factor * params->tx_power * (m + 1.0) / (8.0 * pi * pi * pi) *
                       (8.0 * pi * pi) * (pi * r_circle * r_circle);
  McEstimate e = detail::reduce(chunks, cfg.seed, scale);
  e.elapsed_ms = detail::elapsed_ms(t0);
  return e;
}

}  // namespace uowc::mc
