// Copyright 2026 The tomostat Authors
// SPDX-License-Identifier: Apache-2.0

#include "tomostat/pattern.hpp"

#include <charconv>
#include <cmath>
#include <cstring>
#include <istream>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>

#include "tomostat/error.hpp"
#include "tomostat/format.hpp"
#include "tomostat/parallel.hpp"
#include "tomostat/quadrature.hpp"

namespace tomostat {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kPanelOrder = 10;

double panel_width(double max_frequency) {
  return std::min(0.25, kPi / (4.0 * max_frequency + 1.0));
}

class Fnv1a {
 public:
  void bytes(const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      state_ ^= p[i];
      state_ *= 0x100000001b3ull;
    }
  }
  void number(double v) { bytes(&v, sizeof v); }
  std::uint64_t value() const { return state_; }

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ull;
};

}  // namespace

double pattern_value(const OperatorSpec& op, double x, double phi, double panel_scale) {
  const CharFn cf = op.cf();
  const double radius = op.cutoff();
  const auto rule = quad::composite_gauss_legendre(
      0.0, radius, panel_scale * panel_width(std::abs(x) + 2.0 * std::abs(op.alpha)),
      kPanelOrder);
  const Complex i_dir = Complex(0.0, 1.0) * std::polar(1.0, phi);
  double sum = 0.0;
  for (std::size_t k = 0; k < rule.size(); ++k) {
    const double b = rule.nodes[k];
    const Complex term = std::polar(1.0, b * x) * std::conj(cf(b * i_dir));
    sum += rule.weights[k] * b * 2.0 * term.real();
  }
  return sum;
}

double pattern_profile(const OperatorSpec& op, double u) {
  OperatorSpec centered = op;
  centered.alpha = {0.0, 0.0};
  return pattern_value(centered, u, 0.0);
}

std::uint64_t operator_hash(const OperatorSpec& op) {
  Fnv1a h;
  h.bytes(op.kernel.name.data(), op.kernel.name.size());
  if (!op.kernel.distributional) {
    for (int i = 0; i <= 64; ++i) h.number(op.kernel.log_at(0.125 * i));
  }
  h.number(op.alpha.real());
  h.number(op.alpha.imag());
  return h.value();
}

PatternTable PatternTable::build(const OperatorSpec& op, double x_min, double x_max, double dx,
                                 int phi_count) {
  if (!(dx > 0.0) || !(x_max > x_min) || dx >= x_max - x_min) {
    throw Error(ErrorKind::insufficient_range,
                "pattern grid is degenerate: need 0 < dx < x_max - x_min");
  }
  if (phi_count < 1) throw Error(ErrorKind::insufficient_range, "phi_count must be >= 1");
  const double radius = op.cutoff();
  const double shift = 2.0 * std::abs(op.alpha);
  auto profile = std::make_shared<Profile>();
  profile->spacing = dx;
  profile->u_min = x_min - shift - 3.0 * dx;
  const double u_max = x_max + shift + 3.0 * dx;
  const auto count = static_cast<std::size_t>(std::ceil((u_max - profile->u_min) / dx)) + 1;

  const double max_u = std::max(std::abs(profile->u_min), std::abs(u_max));
  const auto rule = quad::composite_gauss_legendre(0.0, radius, panel_width(max_u), kPanelOrder);
  std::vector<double> weights(rule.size());
  for (std::size_t k = 0; k < rule.size(); ++k) {
    const double b = rule.nodes[k];
    weights[k] = rule.weights[k] * 2.0 / kPi * b * std::exp(op.kernel.log_at(b) + 0.5 * b * b);
  }
  profile->values.resize(count);
  parallel_for(count, [&](std::size_t i) {
    const double u = profile->u_min + i * dx;
    double sum = 0.0;
    for (std::size_t k = 0; k < rule.size(); ++k) sum += weights[k] * std::cos(rule.nodes[k] * u);
    profile->values[i] = sum;
  });
  OperatorSpec centered = op;
  centered.alpha = {0.0, 0.0};
  profile->base_hash = operator_hash(centered);

  PatternTable table;
  table.profile_ = std::move(profile);
  table.x_min_ = x_min;
  table.x_max_ = x_max;
  table.phi_count_ = phi_count;
  table.alpha_ = op.alpha;
  table.hash_ = operator_hash(op);
  return table;
}

double PatternTable::profile_at(double u) const {
  const auto& v = profile_->values;
  const double pos = (u - profile_->u_min) / profile_->spacing;
  const int n = static_cast<int>(v.size());
  const int first = static_cast<int>(std::floor(pos)) - 2;
  if (first < 0 || first + 5 >= n) {
    throw Error(ErrorKind::insufficient_range,
                "pattern argument " + std::to_string(u) + " is outside the tabulated profile");
  }
  double sum = 0.0;
  for (int j = 0; j < 6; ++j) {
    double l = 1.0;
    for (int m = 0; m < 6; ++m) {
      if (m != j) l *= (pos - (first + m)) / static_cast<double>(j - m);
    }
    sum += l * v[first + j];
  }
  return sum;
}

double PatternTable::operator()(double x, double phi) const {
  if (!covers(x)) {
    throw Error(ErrorKind::insufficient_range,
                "quadrature value " + std::to_string(x) + " outside table range [" +
                    std::to_string(x_min_) + ", " + std::to_string(x_max_) + "]");
  }
  return profile_at(x - 2.0 * (alpha_ * std::polar(1.0, -phi)).real());
}

PatternTable PatternTable::retarget(const OperatorSpec& op) const {
  OperatorSpec centered = op;
  centered.alpha = {0.0, 0.0};
  if (operator_hash(centered) != profile_->base_hash) {
    throw Error(ErrorKind::invalid_argument, "pattern table was built for a different kernel");
  }
  const double shift = 2.0 * std::abs(op.alpha);
  const double u_max = profile_->u_min + (profile_->values.size() - 1) * profile_->spacing;
  if (x_min_ - shift < profile_->u_min + 2.0 * profile_->spacing ||
      x_max_ + shift > u_max - 3.0 * profile_->spacing) {
    throw Error(ErrorKind::insufficient_range,
                "tabulated profile does not cover displacement |alpha| = " +
                    std::to_string(std::abs(op.alpha)));
  }
  PatternTable out = *this;
  out.alpha_ = op.alpha;
  out.hash_ = operator_hash(op);
  return out;
}

void PatternTable::write(std::ostream& out) const {
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(hash_));
  char base_hex[17];
  std::snprintf(base_hex, sizeof base_hex, "%016llx",
                static_cast<unsigned long long>(profile_->base_hash));
  out << "# tomostat-pattern v1 hash=" << hex << " base_hash=" << base_hex
      << " alpha_re=" << format_double(alpha_.real()) << " alpha_im=" << format_double(alpha_.imag())
      << " x_min=" << format_double(x_min_) << " x_max=" << format_double(x_max_)
      << " u_min=" << format_double(profile_->u_min) << " du=" << format_double(profile_->spacing)
      << " count=" << profile_->values.size() << " phi_count=" << phi_count_ << " order=6\n";
  for (double v : profile_->values) out << format_double(v) << '\n';
}

PatternTable PatternTable::read(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::io_error, "empty pattern file");
  std::istringstream header(line);
  std::string hash_mark, tag, version, field;
  header >> hash_mark >> tag >> version;
  if (hash_mark != "#" || tag != "tomostat-pattern" || version != "v1") {
    throw Error(ErrorKind::io_error, "unrecognized pattern header: " + line);
  }
  std::map<std::string, std::string> fields;
  while (header >> field) {
    const auto eq = field.find('=');
    if (eq == std::string::npos) throw Error(ErrorKind::io_error, "bad header field " + field);
    fields[field.substr(0, eq)] = field.substr(eq + 1);
  }
  auto get = [&](const std::string& key) -> const std::string& {
    auto it = fields.find(key);
    if (it == fields.end()) throw Error(ErrorKind::io_error, "pattern header lacks " + key);
    return it->second;
  };
  try {
    auto profile = std::make_shared<Profile>();
    profile->u_min = std::stod(get("u_min"));
    profile->spacing = std::stod(get("du"));
    profile->base_hash = std::stoull(get("base_hash"), nullptr, 16);
    const std::size_t count = std::stoull(get("count"));
    profile->values.reserve(count);
    while (profile->values.size() < count && std::getline(in, line)) {
      double v = 0.0;
      if (std::from_chars(line.data(), line.data() + line.size(), v).ec != std::errc{}) {
        throw Error(ErrorKind::io_error, "malformed pattern value: " + line);
      }
      profile->values.push_back(v);
    }
    if (profile->values.size() != count) {
      throw Error(ErrorKind::io_error, "pattern file truncated");
    }
    PatternTable table;
    table.profile_ = std::move(profile);
    table.hash_ = std::stoull(get("hash"), nullptr, 16);
    table.alpha_ = {std::stod(get("alpha_re")), std::stod(get("alpha_im"))};
    table.x_min_ = std::stod(get("x_min"));
    table.x_max_ = std::stod(get("x_max"));
    table.phi_count_ = std::stoi(get("phi_count"));
    return table;
  } catch (const std::logic_error&) {
    throw Error(ErrorKind::io_error, "malformed pattern header: " + line);
  }
}

}  // namespace tomostat
