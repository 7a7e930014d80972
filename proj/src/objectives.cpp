#include "tagd/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <ranges>
#include <sstream>
#include <stdexcept>

namespace tagd {

namespace {

std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream)};
  return std::mt19937_64(seq);
}

// Root of a continuous function with a sign change on [lo, hi], bisected
// until the bracket cannot shrink further.
template <typename F>
double bisect(F f, double lo, double hi) {
  double flo = f(lo);
  while (true) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return std::abs(f(lo)) <= std::abs(f(hi)) ? lo : hi;
}

}  // namespace

// --- Quadratic ------------------------------------------------------------

Quadratic::Quadratic(std::vector<double> curvature, std::vector<double> center)
    : curvature_(std::move(curvature)), center_(std::move(center)) {
  if (curvature_.empty() || curvature_.size() != center_.size()) {
    throw DimensionMismatch("quadratic: curvature and center sizes differ");
  }
  for (double c : curvature_) {
    if (!(c > 0.0)) throw InvalidCoefficient("quadratic: curvature must be > 0");
  }
}

Quadratic Quadratic::unit_1d() { return Quadratic({1.0}, {0.0}); }

double Quadratic::value_and_gradient(std::span<const double> w,
                                     std::span<double> grad) const {
  double e = 0.0;
  for (std::size_t i = 0; i < curvature_.size(); ++i) {
    const double d = w[i] - center_[i];
    e += curvature_[i] * d * d;
    grad[i] = 2.0 * curvature_[i] * d;
  }
  return e;
}

ParamVector Quadratic::initial_point(std::uint64_t seed) const {
  auto rng = make_rng(seed, 11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ParamVector w(center_.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = center_[i] + u(rng);
  return w;
}

Landmarks Quadratic::landmarks() const {
  return Landmarks{{ParamVector(center_), 0.0}, {}, 2};
}

double Quadratic::max_curvature() const {
  return 2.0 * *std::max_element(curvature_.begin(), curvature_.end());
}

// --- Double well ----------------------------------------------------------

std::pair<double, double> two_well(double w) {
  using namespace two_well_shape;
  const double u = w - 1.0;
  const double v = w + 1.0;
  const double u3 = u * u * u;
  const double quart = u3 * u;
  const double shoulder = v * v + kShoulder;
  const double num = quart * shoulder;
  const double den = 1.0 + kTail * quart;
  // d(num)/dw = u^3 (4 shoulder + 2 u v), d(den)/dw = 4 d u^3.
  const double dnum = u3 * (4.0 * shoulder + 2.0 * u * v);
  const double dden = 4.0 * kTail * u3;
  return {num / den, (dnum * den - num * dden) / (den * den)};
}

TwoWell::TwoWell() {
  auto slope = [](double w) { return two_well(w).second; };
  local_min_ = bisect(slope, -1.5, -0.6);
  barrier_ = bisect(slope, -0.6, 0.5);
}

double TwoWell::value_and_gradient(std::span<const double> w,
                                   std::span<double> grad) const {
  const auto [e, de] = two_well(w[0]);
  grad[0] = de;
  return e;
}

ParamVector TwoWell::initial_point(std::uint64_t seed) const {
  auto rng = make_rng(seed, 21);
  std::uniform_real_distribution<double> u(local_min_ - 0.5, barrier_ - 0.1);
  return ParamVector{u(rng)};
}

Landmarks TwoWell::landmarks() const {
  return Landmarks{{ParamVector{1.0}, 0.0},
                   {{ParamVector{local_min_}, two_well(local_min_).first}},
                   4};
}

double TwoWell2D::value_and_gradient(std::span<const double> w,
                                     std::span<double> grad) const {
  const auto [ex, dx] = two_well(w[0]);
  const auto [ey, dy] = two_well(w[1]);
  grad[0] = dx;
  grad[1] = dy;
  return ex + ey;
}

ParamVector TwoWell2D::initial_point(std::uint64_t seed) const {
  auto rng = make_rng(seed, 22);
  std::uniform_real_distribution<double> u(well_.local_min() - 0.5,
                                           well_.barrier() - 0.1);
  const double x = u(rng);
  return ParamVector{x, u(rng)};
}

Landmarks TwoWell2D::landmarks() const {
  const double m = well_.local_min();
  const double em = two_well(m).first;
  return Landmarks{{ParamVector{1.0, 1.0}, 0.0},
                   {{ParamVector{m, 1.0}, em},
                    {ParamVector{1.0, m}, em},
                    {ParamVector{m, m}, 2.0 * em}},
                   4};
}

// --- Dataset --------------------------------------------------------------

double target_function(double x1, double x2) {
  return std::sin(x1 * x1) + std::sin(x2 * x2);
}

std::array<double, 2> Normalization::normalize(
    const std::array<double, 2>& x) const {
  return {(x[0] - shift[0]) / scale[0], (x[1] - shift[1]) / scale[1]};
}

std::array<double, 2> Normalization::denormalize(
    const std::array<double, 2>& x) const {
  return {x[0] * scale[0] + shift[0], x[1] * scale[1] + shift[1]};
}

Dataset Dataset::from_raw(std::vector<std::array<double, 2>> raw,
                          std::vector<double> targets) {
  if (raw.size() != targets.size()) {
    throw DimensionMismatch("dataset: input and target counts differ");
  }
  if (raw.empty()) throw std::invalid_argument("dataset must not be empty");
  Dataset d;
  const double n = static_cast<double>(raw.size());
  for (std::size_t f = 0; f < 2; ++f) {
    double mean = 0.0;
    for (const auto& x : raw) mean += x[f];
    mean /= n;
    double var = 0.0;
    for (const auto& x : raw) var += (x[f] - mean) * (x[f] - mean);
    var /= n;
    d.norm.shift[f] = mean;
    d.norm.scale[f] = var > 0.0 ? std::sqrt(var) : 1.0;
  }
  d.inputs.reserve(raw.size());
  for (const auto& x : raw) d.inputs.push_back(d.norm.normalize(x));
  d.raw_inputs = std::move(raw);
  d.targets = std::move(targets);
  return d;
}

Dataset gen_dataset(std::size_t n, std::uint64_t seed, double low,
                    double high) {
  if (n < 1) throw std::invalid_argument("dataset size must be >= 1");
  if (!(low < high)) throw std::invalid_argument("dataset domain is empty");
  auto rng = make_rng(seed, 1);
  std::uniform_real_distribution<double> u(low, high);
  std::vector<std::array<double, 2>> raw(n);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x1 = u(rng);
    const double x2 = u(rng);
    raw[i] = {x1, x2};
    y[i] = target_function(x1, x2);
  }
  return Dataset::from_raw(std::move(raw), std::move(y));
}

void write_dataset_csv(std::ostream& out, const Dataset& data) {
  out << "x1,x2,y\n";
  char buf[96];
  for (std::size_t i = 0; i < data.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", data.raw_inputs[i][0],
                  data.raw_inputs[i][1], data.targets[i]);
    out << buf;
  }
}

Dataset read_dataset_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("dataset CSV is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "x1,x2,y") {
    throw std::runtime_error("dataset CSV: expected header x1,x2,y, got '" +
                             line + "'");
  }
  std::vector<std::array<double, 2>> raw;
  std::vector<double> y;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    std::array<double, 3> vals{};
    const char* p = line.c_str();
    for (std::size_t k = 0; k < 3; ++k) {
      char* end = nullptr;
      vals[k] = std::strtod(p, &end);
      if (end == p || (k < 2 && *end != ',')) {
        throw std::runtime_error("dataset CSV: bad row at line " +
                                 std::to_string(lineno));
      }
      p = end + (k < 2 ? 1 : 0);
    }
    raw.push_back({vals[0], vals[1]});
    y.push_back(vals[2]);
  }
  return Dataset::from_raw(std::move(raw), std::move(y));
}

// --- MLP ------------------------------------------------------------------

ParamVector MlpParams::flatten() const {
  std::vector<double> flat;
  flat.reserve(kMlpParams);
  flat.insert(flat.end(), hidden_w.begin(), hidden_w.end());
  flat.insert(flat.end(), hidden_b.begin(), hidden_b.end());
  flat.insert(flat.end(), out_w.begin(), out_w.end());
  flat.push_back(out_b);
  return ParamVector(std::move(flat));
}

MlpParams MlpParams::unflatten(std::span<const double> flat) {
  if (flat.size() != kMlpParams) {
    throw DimensionMismatch("MLP expects " + std::to_string(kMlpParams) +
                            " parameters, got " + std::to_string(flat.size()));
  }
  MlpParams m;
  auto it = flat.begin();
  std::copy_n(it, m.hidden_w.size(), m.hidden_w.begin());
  it += static_cast<std::ptrdiff_t>(m.hidden_w.size());
  std::copy_n(it, m.hidden_b.size(), m.hidden_b.begin());
  it += static_cast<std::ptrdiff_t>(m.hidden_b.size());
  std::copy_n(it, m.out_w.size(), m.out_w.begin());
  it += static_cast<std::ptrdiff_t>(m.out_w.size());
  m.out_b = *it;
  return m;
}

MlpParams MlpParams::glorot(std::uint64_t seed) {
  auto rng = make_rng(seed, 2);
  const double a1 = std::sqrt(6.0 / static_cast<double>(kMlpInputs + kMlpHidden));
  const double a2 = std::sqrt(6.0 / static_cast<double>(kMlpHidden + 1));
  std::uniform_real_distribution<double> u1(-a1, a1);
  std::uniform_real_distribution<double> u2(-a2, a2);
  MlpParams m;
  for (double& v : m.hidden_w) v = u1(rng);
  for (double& v : m.out_w) v = u2(rng);
  return m;
}

double MlpParams::predict(const std::array<double, 2>& x) const {
  double y = out_b;
  for (std::size_t j = 0; j < kMlpHidden; ++j) {
    const double z = hidden_w[j * kMlpInputs] * x[0] +
                     hidden_w[j * kMlpInputs + 1] * x[1] + hidden_b[j];
    if (z > 0.0) y += out_w[j] * z;
  }
  return y;
}

namespace {

// MSE over the listed samples; gradient written in flattened order.
template <typename IndexRange>
double mlp_mse(const MlpParams& m, const Dataset& data,
               const IndexRange& samples, std::size_t count,
               std::span<double> grad) {
  std::fill(grad.begin(), grad.end(), 0.0);
  double* g_hw = grad.data();
  double* g_hb = g_hw + kMlpHidden * kMlpInputs;
  double* g_ow = g_hb + kMlpHidden;
  double* g_ob = g_ow + kMlpHidden;

  const double inv_n = 1.0 / static_cast<double>(count);
  double sse = 0.0;
  std::array<double, kMlpHidden> z{};
  for (std::size_t i : samples) {
    const auto& x = data.inputs[i];
    double y = m.out_b;
    for (std::size_t j = 0; j < kMlpHidden; ++j) {
      z[j] = m.hidden_w[j * kMlpInputs] * x[0] +
             m.hidden_w[j * kMlpInputs + 1] * x[1] + m.hidden_b[j];
      if (z[j] > 0.0) y += m.out_w[j] * z[j];
    }
    const double r = y - data.targets[i];
    sse += r * r;
    const double dy = 2.0 * r * inv_n;
    *g_ob += dy;
    for (std::size_t j = 0; j < kMlpHidden; ++j) {
      if (!(z[j] > 0.0)) continue;
      g_ow[j] += dy * z[j];
      const double dz = dy * m.out_w[j];
      g_hb[j] += dz;
      g_hw[j * kMlpInputs] += dz * x[0];
      g_hw[j * kMlpInputs + 1] += dz * x[1];
    }
  }
  return sse * inv_n;
}

}  // namespace

GradEval mlp_loss_grad(const MlpParams& params, const Dataset& data) {
  ParamVector grad(kMlpParams);
  const double e =
      mlp_mse(params, data, std::views::iota(std::size_t{0}, data.size()),
              data.size(), grad.span());
  if (!std::isfinite(e) || !grad.all_finite()) {
    throw NonFiniteEnergy("MLP loss overflowed");
  }
  return GradEval::from_gradient(e, std::move(grad));
}

MlpObjective::MlpObjective(Dataset data) : data_(std::move(data)) {
  if (data_.size() == 0) throw std::invalid_argument("MLP needs data");
}

double MlpObjective::value_and_gradient(std::span<const double> w,
                                        std::span<double> grad) const {
  return mlp_mse(MlpParams::unflatten(w), data_,
                 std::views::iota(std::size_t{0}, data_.size()), data_.size(),
                 grad);
}

ParamVector MlpObjective::initial_point(std::uint64_t seed) const {
  return MlpParams::glorot(seed).flatten();
}

double MlpObjective::batch_value_and_gradient(
    std::span<const double> w, std::span<const std::size_t> samples,
    std::span<double> grad) const {
  if (samples.empty()) throw std::invalid_argument("empty mini-batch");
  return mlp_mse(MlpParams::unflatten(w), data_, samples, samples.size(), grad);
}

}  // namespace tagd
