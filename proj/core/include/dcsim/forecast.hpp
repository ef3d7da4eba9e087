#ifndef DCSIM_FORECAST_HPP
#define DCSIM_FORECAST_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <vector>

namespace dcsim {

/// Minute-by-minute price predictions made during the ISP preceding
/// `isp_start`, each predicting that ISP's shortage price. Real exports
/// may gap; any 1..15 minutes are accepted.
struct IspForecast {
  std::int64_t isp_start = 0;
  std::vector<double> minute_predictions_eur_mwh; // in prediction-time order
};

enum class InferenceMode { First, Last, Average };

/// Collapses an ISP's minute predictions to one value.
double select_inference(const IspForecast& forecast, InferenceMode mode);

/// `prediction_time_iso8601,target_isp_start_iso8601,predicted_shortage_eur_mwh`.
/// Rows are grouped by target ISP; prediction times must fall within the
/// ISP preceding the target.
std::map<std::int64_t, IspForecast> load_inference_csv(const std::filesystem::path& path);

/// Deterministic, platform-independent N(0, sigma) sampler: a splitmix64
/// uniform stream fed through a polar Box-Muller transform. The algorithm
/// is fixed here (not delegated to std::normal_distribution, whose output
/// is implementation-defined) so sigma sweeps reproduce anywhere.
class GaussianSampler {
public:
  GaussianSampler(double sigma, std::uint64_t seed);
  double next();

private:
  double uniform01(); // in (0, 1)
  double sigma_;
  std::uint64_t state_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

/// Derives an independent sub-seed for parallel sweeps (splitmix64 mix
/// of seed and index).
std::uint64_t sub_seed(std::uint64_t seed, std::uint64_t index);

/// Synthetic predictor: actual shortage prices plus Gaussian noise.
std::vector<double> synth_forecast(const std::vector<double>& actual_eur_mwh, double sigma,
                                   std::uint64_t seed);

enum class AaMode {
  Literal,     // count ISPs where the two agreement bits are equal
  Conjunction, // count ISPs where both agreement bits are 1
};

/// Agreement accuracy over aligned per-ISP series: bit 1 compares the
/// signs of actual and forecast imbalance prices, bit 2 the signs of
/// their margins over the spot price.
double agreement_accuracy(const std::vector<double>& actual_imbalance,
                          const std::vector<double>& forecast_imbalance,
                          const std::vector<double>& spot, AaMode mode = AaMode::Literal);

/// Three-way sign with S(0) = 0.
int sign_of(double x);

} // namespace dcsim

#endif
