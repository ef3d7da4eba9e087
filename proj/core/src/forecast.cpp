#include "dcsim/forecast.hpp"

#include "dcsim/csv.hpp"
#include "dcsim/errors.hpp"
#include "dcsim/timeutil.hpp"

#include <cmath>
#include <numeric>

namespace dcsim {

double select_inference(const IspForecast& forecast, InferenceMode mode) {
  const auto& p = forecast.minute_predictions_eur_mwh;
  if (p.empty()) throw DomainError("ISP forecast has no predictions");
  switch (mode) {
    case InferenceMode::First:
      return p.front();
    case InferenceMode::Last:
      return p.back();
    case InferenceMode::Average:
      return std::accumulate(p.begin(), p.end(), 0.0) / static_cast<double>(p.size());
  }
  throw ConfigError("unknown inference mode");
}

std::map<std::int64_t, IspForecast> load_inference_csv(const std::filesystem::path& path) {
  auto t = csv::read_file(
      path, {"prediction_time_iso8601", "target_isp_start_iso8601", "predicted_shortage_eur_mwh"});
  std::map<std::int64_t, IspForecast> out;
  for (const auto& row : t.rows) {
    std::int64_t made_at = timeutil::parse_iso8601(row[0]);
    std::int64_t target = timeutil::parse_iso8601(row[1]);
    if (target % timeutil::kIspSeconds != 0)
      throw DataError("target ISP not on a 15-minute boundary: " + row[1]);
    if (made_at < target - timeutil::kIspSeconds || made_at >= target)
      throw DataError("prediction at " + row[0] + " falls outside the ISP preceding " + row[1]);
    auto& f = out[target];
    f.isp_start = target;
    if (f.minute_predictions_eur_mwh.size() >= 15)
      throw DataError("more than 15 predictions for ISP " + row[1]);
    f.minute_predictions_eur_mwh.push_back(csv::to_double(row[2], path.string()));
  }
  return out;
}

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

} // namespace

std::uint64_t sub_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t s = seed ^ (0x6a09e667f3bcc909ULL + index * 0x9e3779b97f4a7c15ULL);
  return splitmix64(s);
}

GaussianSampler::GaussianSampler(double sigma, std::uint64_t seed)
    : sigma_(sigma), state_(seed) {
  if (sigma < 0.0) throw DomainError("sigma must be >= 0");
}

double GaussianSampler::uniform01() {
  // 53-bit mantissa draw, shifted into (0, 1).
  return (static_cast<double>(splitmix64(state_) >> 11) + 0.5) * 0x1.0p-53;
}

double GaussianSampler::next() {
  if (sigma_ == 0.0) return 0.0;
  if (has_cached_) {
    has_cached_ = false;
    return cached_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform01() - 1.0;
    v = 2.0 * uniform01() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  cached_ = sigma_ * v * f;
  has_cached_ = true;
  return sigma_ * u * f;
}

std::vector<double> synth_forecast(const std::vector<double>& actual_eur_mwh, double sigma,
                                   std::uint64_t seed) {
  GaussianSampler noise(sigma, seed);
  std::vector<double> out;
  out.reserve(actual_eur_mwh.size());
  for (double p : actual_eur_mwh) out.push_back(p + noise.next());
  return out;
}

int sign_of(double x) { return x > 0.0 ? 1 : (x < 0.0 ? -1 : 0); }

double agreement_accuracy(const std::vector<double>& actual_imbalance,
                          const std::vector<double>& forecast_imbalance,
                          const std::vector<double>& spot, AaMode mode) {
  const std::size_t n = actual_imbalance.size();
  if (n == 0 || forecast_imbalance.size() != n || spot.size() != n)
    throw DomainError("agreement accuracy needs equally sized, non-empty series");
  std::size_t agree = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const bool bit1 = sign_of(actual_imbalance[i]) == sign_of(forecast_imbalance[i]);
    const bool bit2 =
        sign_of(actual_imbalance[i] - spot[i]) == sign_of(forecast_imbalance[i] - spot[i]);
    if (mode == AaMode::Literal ? (bit1 == bit2) : (bit1 && bit2)) ++agree;
  }
  return static_cast<double>(agree) / static_cast<double>(n);
}

} // namespace dcsim
