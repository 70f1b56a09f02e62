// Copyright 2026 The tomostat Authors
// SPDX-License-Identifier: Apache-2.0

#include "tomostat/simulate.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "tomostat/error.hpp"
#include "tomostat/format.hpp"
#include "tomostat/laguerre.hpp"
#include "tomostat/parallel.hpp"
#include "tomostat/polar.hpp"
#include "tomostat/quadrature.hpp"
#include "tomostat/rng.hpp"

namespace tomostat {

namespace {

constexpr double kPi = std::numbers::pi;

}  // namespace

void ExperimentConfig::validate() const {
  state.validate();
  if (n < 1) throw Error(ErrorKind::invalid_argument, "N must be >= 1");
  if (!(eta > 0.0 && eta <= 1.0)) {
    throw Error(ErrorKind::invalid_efficiency, "eta must lie in (0, 1]");
  }
  if (scheme == Scheme::cascaded && !(t > 0.0 && t <= 1.0)) {
    throw Error(ErrorKind::invalid_transmissivity, "t must lie in (0, 1]");
  }
}

GaussianState ExperimentConfig::measured_state() const {
  GaussianState s = state;
  if (scheme == Scheme::cascaded) s = s.mixed(t, alpha);
  return s.with_loss(eta);
}

double quadrature_pdf(const GaussianState& state, double x, double phi) {
  const double v = state.quadrature_variance(phi);
  const double d = x - state.quadrature_mean(phi);
  return std::exp(-0.5 * d * d / v) / std::sqrt(2.0 * kPi * v);
}

double phase_diffused_pdf(const GaussianState& state, double x) {
  auto integrand = [&](double phi) { return quadrature_pdf(state, x, phi); };
  return quad::integrate(integrand, 0.0, kPi, 1e-15, 1e-12).value / kPi;
}

QuadratureSampleSet sample_quadratures(const ExperimentConfig& config) {
  config.validate();
  if (config.scheme == Scheme::unbalanced) {
    throw Error(ErrorKind::invalid_argument,
                "the unbalanced scheme records photon counts, not quadratures");
  }
  const GaussianState measured = config.measured_state();
  const CounterRng rng(config.seed);
  QuadratureSampleSet set;
  set.seed = config.seed;
  set.records.resize(config.n);
  parallel_for(config.n, [&](std::size_t j) {
    const auto first = rng.uniform_pair(j, 0);
    const auto second = rng.uniform_pair(j, 1);
    const double phi = kPi * first[0];
    const double radius = std::sqrt(-2.0 * std::log1p(-first[1]));
    const double z = radius * std::cos(2.0 * kPi * second[0]);
    set.records[j] = {measured.quadrature_mean(phi) +
                          std::sqrt(measured.quadrature_variance(phi)) * z,
                      phi};
  });
  return set;
}

PhotonDistribution photon_number_distribution(const CharFn& state, Complex alpha, int n_max) {
  if (n_max < 0) throw Error(ErrorKind::invalid_argument, "n_max must be >= 0");
  // Radial truncation: s e^{-s^2/2} |L_n(s^2)| < 1e-17 for every n <= n_max.
  std::vector<double> lag(n_max + 1);
  double radius = 1.0;
  for (double s = 0.05; s < 80.0; s += 0.05) {
    laguerre_all(s * s, lag);
    double worst = 0.0;
    for (double l : lag) worst = std::max(worst, std::abs(l));
    if (std::log(s) - 0.5 * s * s + std::log(worst) > std::log(1e-17)) radius = s + 0.05;
  }
  const RadialGrid grid = RadialGrid::make(radius);
  std::vector<std::vector<double>> profiles(n_max + 1, std::vector<double>(grid.size()));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double s = grid.radii[i];
    laguerre_all(s * s, lag);
    for (int n = 0; n <= n_max; ++n) profiles[n][i] = s * std::exp(-0.5 * s * s) * lag[n] / kPi;
  }
  const CharFn shifted = displace_cf(state, -alpha);
  const auto integrals = radial_profile_integrals(shifted, grid, profiles);

  PhotonDistribution dist;
  dist.n_max = n_max;
  dist.p.resize(n_max + 1);
  double total = 0.0;
  for (int n = 0; n <= n_max; ++n) {
    double p = integrals[n].real();
    if (p < 0.0) {
      if (p < -1e-10) {
        throw Error(ErrorKind::quadrature_nonconvergence,
                    "p_" + std::to_string(n) + " = " + std::to_string(p) + " is negative");
      }
      std::ostringstream msg;
      msg << "p_" << n << " = " << p << " clamped to 0";
      dist.warnings.push_back(msg.str());
      p = 0.0;
    }
    dist.p[n] = p;
    total += p;
  }
  dist.truncation_mass = 1.0 - total;
  return dist;
}

PhotonDistribution photon_number_distribution(const GaussianState& state, Complex alpha,
                                              int n_max) {
  return photon_number_distribution(gaussian_cf(state), alpha, n_max);
}

std::vector<int> sample_photon_counts(const PhotonDistribution& dist, std::size_t n,
                                      std::uint64_t seed) {
  std::vector<double> cdf(dist.p.size());
  double acc = 0.0;
  for (std::size_t k = 0; k < dist.p.size(); ++k) cdf[k] = (acc += dist.p[k]);
  const CounterRng rng(seed);
  std::vector<int> counts(n);
  parallel_for(n, [&](std::size_t j) {
    const double u = rng.uniform_pair(j, 2)[0];
    counts[j] = static_cast<int>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
  });
  return counts;
}

void write_quadratures(std::ostream& out, const QuadratureSampleSet& set) {
  out << "# tomostat-quadratures v1 seed=" << set.seed << " N=" << set.records.size() << '\n';
  for (const auto& r : set.records) out << format_double(r.x) << '\t' << format_double(r.phi) << '\n';
}

QuadratureSampleSet read_quadratures(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::io_error, "empty quadrature file");
  QuadratureSampleSet set;
  std::size_t declared = 0;
  {
    std::istringstream header(line);
    std::string hash, tag, version, seed_field, n_field;
    header >> hash >> tag >> version >> seed_field >> n_field;
    if (hash != "#" || tag != "tomostat-quadratures" || version != "v1" ||
        seed_field.rfind("seed=", 0) != 0 || n_field.rfind("N=", 0) != 0) {
      throw Error(ErrorKind::io_error, "unrecognized quadrature header: " + line);
    }
    try {
      set.seed = std::stoull(seed_field.substr(5));
      declared = std::stoull(n_field.substr(2));
    } catch (const std::exception&) {
      throw Error(ErrorKind::io_error, "malformed quadrature header: " + line);
    }
  }
  set.records.reserve(declared);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    QuadratureSample s;
    const char* end = line.data() + line.size();
    if (tab == std::string::npos ||
        std::from_chars(line.data(), line.data() + tab, s.x).ec != std::errc{} ||
        std::from_chars(line.data() + tab + 1, end, s.phi).ec != std::errc{}) {
      throw Error(ErrorKind::io_error, "malformed record on line " + std::to_string(line_no));
    }
    set.records.push_back(s);
  }
  if (set.records.size() != declared) {
    throw Error(ErrorKind::io_error, "header declares N=" + std::to_string(declared) +
                                         " but file holds " +
                                         std::to_string(set.records.size()) + " records");
  }
  return set;
}

void save_quadratures(const std::string& path, const QuadratureSampleSet& set) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::io_error, "cannot open " + path + " for writing");
  write_quadratures(out, set);
  if (!out) throw Error(ErrorKind::io_error, "write to " + path + " failed");
}

QuadratureSampleSet load_quadratures(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io_error, "cannot open " + path);
  return read_quadratures(in);
}

void write_photon_distribution(std::ostream& out, const PhotonDistribution& dist) {
  out << "n,p_n\n";
  for (std::size_t n = 0; n < dist.p.size(); ++n) out << n << ',' << format_double(dist.p[n]) << '\n';
}

}  // namespace tomostat
