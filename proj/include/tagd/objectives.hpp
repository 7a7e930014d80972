#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "tagd/core.hpp"

namespace tagd {

struct Minimum {
  ParamVector w;
  double energy = 0.0;
};

/// Known stationary structure of an analytic test objective.
struct Landmarks {
  Minimum global_min;
  std::vector<Minimum> local_minima;
  int multiplicity = 2;  // order 2m of the global minimum
};

class AnalyticObjective : public Objective {
 public:
  virtual Landmarks landmarks() const = 0;
};

/// E(w) = sum_i c_i (w_i - m_i)^2 with c_i > 0.
class Quadratic final : public AnalyticObjective {
 public:
  Quadratic(std::vector<double> curvature, std::vector<double> center);
  /// E(w) = w^2 in one dimension.
  static Quadratic unit_1d();

  std::string name() const override { return "quadratic"; }
  std::size_t dimension() const override { return curvature_.size(); }
  double value_and_gradient(std::span<const double> w,
                            std::span<double> grad) const override;
  ParamVector initial_point(std::uint64_t seed) const override;
  Landmarks landmarks() const override;

  /// Largest second derivative 2 max c_i.
  double max_curvature() const;

 private:
  std::vector<double> curvature_;
  std::vector<double> center_;
};

// One-dimensional double well
//
//   E(w) = (w-1)^4 ((w+1)^2 + a) / (1 + d (w-1)^4)
//
// with a = d = 0.05. The global minimum w = 1 has E = 0 and multiplicity 4.
// A shallow local minimum near w = -0.97 (E ~ 0.44) is separated from it by a
// barrier near w = -0.32. Far from the wells E grows like (w+1)^2 / d.
namespace two_well_shape {
inline constexpr double kShoulder = 0.05;  // a
inline constexpr double kTail = 0.05;      // d
}  // namespace two_well_shape

/// (E, dE/dw) of the double well.
std::pair<double, double> two_well(double w);

class TwoWell final : public AnalyticObjective {
 public:
  TwoWell();

  std::string name() const override { return "two_well"; }
  std::size_t dimension() const override { return 1; }
  double value_and_gradient(std::span<const double> w,
                            std::span<double> grad) const override;
  /// Uniform in [local_min - 0.5, barrier - 0.1], inside the shallow basin.
  ParamVector initial_point(std::uint64_t seed) const override;
  Landmarks landmarks() const override;

  double local_min() const { return local_min_; }
  double barrier() const { return barrier_; }
  /// Distance from the shallow minimum to the barrier.
  double well_width() const { return barrier_ - local_min_; }
  /// True when w lies in the basin of attraction of the shallow minimum.
  bool in_shallow_basin(double w) const { return w < barrier_; }

 private:
  double local_min_;
  double barrier_;
};

/// E(x, y) = two_well(x) + two_well(y); global minimum (1, 1).
class TwoWell2D final : public AnalyticObjective {
 public:
  std::string name() const override { return "two_well_2d"; }
  std::size_t dimension() const override { return 2; }
  double value_and_gradient(std::span<const double> w,
                            std::span<double> grad) const override;
  ParamVector initial_point(std::uint64_t seed) const override;
  Landmarks landmarks() const override;

 private:
  TwoWell well_;
};

// ---------------------------------------------------------------------------
// Function approximation task: a 2-5-1 ReLU network fitted by MSE to
// y = sin(x1^2) + sin(x2^2).

double target_function(double x1, double x2);

/// Per-feature standardization x' = (x - shift) / scale.
struct Normalization {
  std::array<double, 2> shift{0.0, 0.0};
  std::array<double, 2> scale{1.0, 1.0};

  std::array<double, 2> normalize(const std::array<double, 2>& x) const;
  std::array<double, 2> denormalize(const std::array<double, 2>& x) const;
};

struct Dataset {
  std::vector<std::array<double, 2>> raw_inputs;
  std::vector<std::array<double, 2>> inputs;  // normalized
  std::vector<double> targets;
  Normalization norm;

  std::size_t size() const { return targets.size(); }

  /// Builds a dataset from raw inputs, fitting the standardization
  /// (population variance; features with zero spread keep scale 1).
  static Dataset from_raw(std::vector<std::array<double, 2>> raw,
                          std::vector<double> targets);
};

/// n points uniform in [low, high]^2 with exact targets.
Dataset gen_dataset(std::size_t n, std::uint64_t seed, double low = 0.0,
                    double high = 1.0);

/// CSV with header "x1,x2,y", raw (un-normalized) inputs, 17 significant
/// digits so a round trip is exact.
void write_dataset_csv(std::ostream& out, const Dataset& data);
Dataset read_dataset_csv(std::istream& in);

inline constexpr std::size_t kMlpInputs = 2;
inline constexpr std::size_t kMlpHidden = 5;
inline constexpr std::size_t kMlpParams =
    kMlpHidden * kMlpInputs + kMlpHidden + kMlpHidden + 1;

/// Network weights. Flattened order: hidden weights (row-major, one row per
/// hidden unit), hidden biases, output weights, output bias.
struct MlpParams {
  std::array<double, kMlpHidden * kMlpInputs> hidden_w{};
  std::array<double, kMlpHidden> hidden_b{};
  std::array<double, kMlpHidden> out_w{};
  double out_b = 0.0;

  ParamVector flatten() const;
  static MlpParams unflatten(std::span<const double> flat);

  /// Weights uniform in [-a, a], a = sqrt(6 / (fan_in + fan_out)); biases 0.
  static MlpParams glorot(std::uint64_t seed);

  double predict(const std::array<double, 2>& x) const;
};

/// MSE and its gradient by backpropagation. ReLU'(0) is taken as 0.
/// Throws NonFiniteEnergy on overflow.
GradEval mlp_loss_grad(const MlpParams& params, const Dataset& data);

class MlpObjective final : public Objective {
 public:
  explicit MlpObjective(Dataset data);

  std::string name() const override { return "mlp"; }
  std::size_t dimension() const override { return kMlpParams; }
  double value_and_gradient(std::span<const double> w,
                            std::span<double> grad) const override;
  ParamVector initial_point(std::uint64_t seed) const override;
  std::size_t sample_count() const override { return data_.size(); }
  double batch_value_and_gradient(std::span<const double> w,
                                  std::span<const std::size_t> samples,
                                  std::span<double> grad) const override;

  const Dataset& data() const { return data_; }

 private:
  Dataset data_;
};

}  // namespace tagd
