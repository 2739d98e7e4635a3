#include "uvscatter/monte_carlo.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>

#include "uvscatter/rng.hpp"
#include "uvscatter/scattering.hpp"
#include "uvscatter/threads.hpp"

namespace uvscatter::monte_carlo {

namespace {

using geometry::Vec3;

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr long long kBlockPhotons = 1 << 16;
constexpr long kDenseBins = 1 << 14;  // sparse map takes the far tail

struct BlockAccum {
  std::vector<double> sum, sumsq;           // dense bins
  std::map<long, std::pair<double, double>> far;
  std::vector<double> order_energy;

  explicit BlockAccum(int orders) : sum(kDenseBins, 0.0), sumsq(kDenseBins, 0.0),
                                    order_energy(orders, 0.0) {}

  void reset() {
    std::fill(sum.begin(), sum.end(), 0.0);
    std::fill(sumsq.begin(), sumsq.end(), 0.0);
    far.clear();
    std::fill(order_energy.begin(), order_energy.end(), 0.0);
  }

  void add(long bin, double x, double xsq) {
    if (bin < kDenseBins) {
      sum[bin] += x;
      sumsq[bin] += xsq;
    } else {
      auto& slot = far[bin];
      slot.first += x;
      slot.second += xsq;
    }
  }
};

struct GlobalAccum {
  std::vector<long double> sum, sumsq;
  std::map<long, std::pair<long double, long double>> far;
  std::vector<long double> order_energy;
  long max_bin = -1;

  explicit GlobalAccum(int orders) : sum(kDenseBins, 0.0L), sumsq(kDenseBins, 0.0L),
                                     order_energy(orders, 0.0L) {}

  void fold(const BlockAccum& b) {
    for (long i = 0; i < kDenseBins; ++i) {
      if (b.sum[i] != 0.0) {
        sum[i] += b.sum[i];
        sumsq[i] += b.sumsq[i];
        max_bin = std::max(max_bin, i);
      }
    }
    for (const auto& [bin, v] : b.far) {
      auto& slot = far[bin];
      slot.first += v.first;
      slot.second += v.second;
      max_bin = std::max(max_bin, bin);
    }
    for (std::size_t k = 0; k < order_energy.size(); ++k) order_energy[k] += b.order_energy[k];
  }
};

// Per-photon transport. Contributions are gathered first so that two
// events of one photon landing in the same bin square as one sample.
//
// The detector tally is the expected-value (shadow-ray) estimator with
// one refinement: the local estimate diverges like 1/d^2 at the
// detector, which leaves a heavy-tailed share of the energy in
// collisions too rare to sample. Whenever a flight segment crosses a
// sphere of radius `near_radius` around the Rx, the collision-density-
// weighted detector contribution over that crossing is tallied
// deterministically (the exact conditional expectation) and a sampled
// collision inside the crossing is excluded from point scoring. Point
// and segment scores sum to the same expectation as the plain
// estimator, with bounded variance.
struct Transport {
  const single_scatter::Scenario& s;
  const Config& cfg;
  const scattering::PhaseSampler& sampler;
  scattering::PhaseEval phase;
  Vec3 tx_pos, mu_t, e1, e2, mu_r;
  double k_s, k_a, k_e, cos_half_fov, area, inv_c;
  double near_radius, near_radius_sq;
  double omega_cap;  // solid angle of the detector saturates at 2*pi
  int orders;

  static constexpr int kSegmentSteps = 64;

  Transport(const single_scatter::Scenario& sc, const Config& c,
            const scattering::PhaseSampler& ps)
      : s(sc), cfg(c), sampler(ps), phase(sc.atmosphere) {
    tx_pos = sc.geometry.tx_position();
    mu_t = sc.geometry.tx_direction();
    std::tie(e1, e2) = geometry::orthonormal_basis(mu_t);
    mu_r = sc.geometry.rx_direction();
    k_s = sc.atmosphere.k_s();
    k_a = sc.atmosphere.k_a;
    k_e = sc.atmosphere.k_e();
    cos_half_fov = std::cos(0.5 * sc.geometry.fov_full_angle_rad);
    area = sc.detector_area_m2;
    inv_c = 1.0 / sc.light_speed;
    near_radius = 0.1 * sc.geometry.range_m;
    near_radius_sq = near_radius * near_radius;
    omega_cap = kTwoPi;
    orders = c.first_order_only ? 1 : c.max_scatter_order;
  }

  // Detector score for a photon of unit weight colliding at `pos` with
  // incoming direction `dir`; 0 outside the FOV.
  double detector_score(const Vec3& pos, const Vec3& dir, double d) const {
    const double cos_zeta = geometry::dot(mu_r, pos) / d;
    if (cos_zeta < cos_half_fov) return 0.0;
    const double mu_det = std::clamp(-geometry::dot(dir, pos) / d, -1.0, 1.0);
    const double omega = std::min(area * cos_zeta / (d * d), omega_cap);
    return phase(mu_det) * std::exp(-k_e * d) * omega;
  }

  // Expected detector contribution of the segment [la, lb] of the flight
  // line pos + l*dir, integrated against the collision density
  // k_s exp(-k_e l). The substitution l = l0 + b tan(u) flattens the
  // 1/d^2 peak at the closest approach.
  void segment_tally(const Vec3& pos, const Vec3& dir, double weight, double path,
                     double la, double lb, double l0, double b, int order,
                     std::vector<std::pair<long, double>>& hits,
                     std::vector<double>& order_hits) const {
    b = std::max(b, 1e-6);
    const double ua = std::atan((la - l0) / b);
    const double ub = std::atan((lb - l0) / b);
    const double du = (ub - ua) / kSegmentSteps;
    for (int j = 0; j < kSegmentSteps; ++j) {
      const double u = ua + (j + 0.5) * du;
      const double ell = l0 + b * std::tan(u);
      const Vec3 x = pos + ell * dir;
      const double dsq = geometry::dot(x, x);
      const double d = std::sqrt(dsq);
      if (d <= 0.0) continue;
      const double score = detector_score(x, dir, d);
      if (score <= 0.0) continue;
      const double value = weight * k_s * std::exp(-k_e * ell) * score * (dsq / b) * du;
      const long bin = static_cast<long>((path + ell + d) * inv_c / cfg.bin_width_s);
      hits.emplace_back(bin, value);
      order_hits[order - 1] += value;
    }
  }

  // Runs one photon; appends (bin, value) contributions per order.
  void run(std::uint64_t seed, long long photon,
           std::vector<std::pair<long, double>>& hits,
           std::vector<double>& order_hits) const {
    rng::Philox rng(seed, static_cast<std::uint64_t>(photon));
    hits.clear();

    const double cg = emission::sample_cos_gamma(s.emission, rng.next_double());
    const double psi = kTwoPi * rng.next_double();
    const double sg = std::sqrt(std::max(0.0, 1.0 - cg * cg));
    Vec3 dir{sg * (std::cos(psi) * e1.x + std::sin(psi) * e2.x) + cg * mu_t.x,
             sg * (std::cos(psi) * e1.y + std::sin(psi) * e2.y) + cg * mu_t.y,
             sg * (std::cos(psi) * e1.z + std::sin(psi) * e2.z) + cg * mu_t.z};
    Vec3 pos = tx_pos;
    double weight = 1.0;
    double path = 0.0;

    for (int order = 1; order <= orders; ++order) {
      // Near-detector crossing of this flight line, if any.
      const double l0 = -geometry::dot(pos, dir);
      const double bsq = std::max(0.0, geometry::dot(pos, pos) - l0 * l0);
      double la = 0.0, lb = -1.0;
      if (bsq < near_radius_sq) {
        const double h = std::sqrt(near_radius_sq - bsq);
        la = std::max(0.0, l0 - h);
        lb = l0 + h;
        if (lb > la) {
          segment_tally(pos, dir, weight, path, la, lb, l0, std::sqrt(bsq), order, hits,
                        order_hits);
        }
      }

      const double ell = -std::log(1.0 - rng.next_double()) / k_s;
      pos = pos + ell * dir;
      path += ell;
      weight *= std::exp(-k_a * ell);

      // Point estimate, unless this collision falls inside the segment
      // already tallied in expectation.
      if (!(ell >= la && ell <= lb)) {
        const double d = geometry::norm(pos);
        if (d > 0.0) {
          const double contrib = weight * detector_score(pos, dir, d);
          if (contrib > 0.0) {
            const long bin = static_cast<long>((path + d) * inv_c / cfg.bin_width_s);
            hits.emplace_back(bin, contrib);
            order_hits[order - 1] += contrib;
          }
        }
      }

      if (order < orders) dir = sampler.sample_direction(rng, dir);
    }
  }
};

Estimate run(const single_scatter::Scenario& s, const Config& cfg, bool parallel) {
  s.validate();
  cfg.validate();
  const scattering::PhaseSampler sampler(s.atmosphere);
  const Transport transport(s, cfg, sampler);
  const int orders = transport.orders;

  const long long n = cfg.n_photons;
  const long long n_blocks = (n + kBlockPhotons - 1) / kBlockPhotons;
  GlobalAccum global(orders);

  const int workers = parallel ? threads::worker_count() : 1;
#pragma omp parallel num_threads(workers)
  {
    BlockAccum block(orders);
    std::vector<std::pair<long, double>> hits;
    std::vector<double> order_hits(orders, 0.0);
    hits.reserve(orders + 1);

#pragma omp for schedule(dynamic, 1) ordered
    for (long long blk = 0; blk < n_blocks; ++blk) {
      block.reset();
      std::fill(order_hits.begin(), order_hits.end(), 0.0);
      const long long lo = blk * kBlockPhotons;
      const long long hi = std::min(n, lo + kBlockPhotons);
      for (long long i = lo; i < hi; ++i) {
        transport.run(cfg.seed, i, hits, order_hits);
        // Merge same-bin contributions before squaring.
        std::sort(hits.begin(), hits.end());
        std::size_t j = 0;
        while (j < hits.size()) {
          double x = hits[j].second;
          const long bin = hits[j].first;
          ++j;
          while (j < hits.size() && hits[j].first == bin) {
            x += hits[j].second;
            ++j;
          }
          block.add(bin, x, x * x);
        }
      }
      for (int k = 0; k < orders; ++k) block.order_energy[k] += order_hits[k];

#pragma omp ordered
      global.fold(block);
    }
  }

  // Scale to physical units: each photon carries Q_T / n joules.
  Estimate out;
  const double q_scale = s.pulse_energy_j / static_cast<double>(n);
  const double h_scale = q_scale / (s.detector_area_m2 * cfg.bin_width_s);

  const long n_bins = global.max_bin + 1;
  out.series.provenance = single_scatter::Provenance::monte_carlo;
  out.series.mc_order = orders;
  out.series.t_s.resize(n_bins);
  out.series.h_w_m2.assign(n_bins, 0.0);
  out.per_bin_stderr.assign(n_bins, 0.0);
  const auto emit_bin = [&](long bin, long double sum, long double sumsq) {
    double var = 0.0;
    if (n > 1) {
      var = static_cast<double>((sumsq - sum * sum / n) / (n - 1));
      var = std::max(0.0, var);
    }
    out.series.h_w_m2[bin] = static_cast<double>(sum) * h_scale;
    out.per_bin_stderr[bin] = std::sqrt(var / static_cast<double>(n)) *
                              s.pulse_energy_j / (s.detector_area_m2 * cfg.bin_width_s);
  };
  for (long i = 0; i < std::min<long>(n_bins, kDenseBins); ++i) {
    if (global.sum[i] != 0.0L) emit_bin(i, global.sum[i], global.sumsq[i]);
  }
  for (const auto& [bin, v] : global.far) emit_bin(bin, v.first, v.second);
  for (long i = 0; i < n_bins; ++i) {
    out.series.t_s[i] = (static_cast<double>(i) + 0.5) * cfg.bin_width_s;
  }

  out.per_order_energy.resize(orders);
  for (int k = 0; k < orders; ++k) {
    out.per_order_energy[k] = static_cast<double>(global.order_energy[k]) * q_scale;
  }
  out.q_r_estimate = 0.0;
  for (double e : out.per_order_energy) out.q_r_estimate += e;
  return out;
}

}  // namespace

void Config::validate() const {
  if (n_photons < 1) throw std::invalid_argument("McConfig: need at least one photon");
  if (max_scatter_order < 1)
    throw std::invalid_argument("McConfig: max scattering order must be >= 1");
  if (!(bin_width_s > 0.0)) throw std::invalid_argument("McConfig: bin width must be > 0");
}

Estimate simulate(const single_scatter::Scenario& s, const Config& cfg) {
  return run(s, cfg, true);
}

Estimate simulate_serial(const single_scatter::Scenario& s, const Config& cfg) {
  return run(s, cfg, false);
}

}  // namespace uvscatter::monte_carlo
