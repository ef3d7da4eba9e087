#ifndef DCSIM_MARKET_HPP
#define DCSIM_MARKET_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace dcsim {

struct ImbalancePrice {
  double shortage_eur_mwh = 0.0; // paid when delivered > scheduled
  double surplus_eur_mwh = 0.0;  // refunded (one-price) when scheduled > delivered
  int regulation_state = 0;
};

/// Aligned day-ahead hourly spot prices and per-ISP imbalance prices.
/// Immutable after ingestion. All keys are Unix seconds, UTC.
struct PriceBook {
  std::map<std::int64_t, double> spot;             // hour start -> EUR/MWh
  std::map<std::int64_t, ImbalancePrice> imbalance; // ISP start -> prices

  double spot_for(std::int64_t isp_start) const;          // throws DataError on gaps
  const ImbalancePrice& imbalance_for(std::int64_t) const; // throws DataError on gaps
};

/// `hour_start_iso8601,price_eur_mwh`; timestamps must carry UTC offsets.
void ingest_spot(const std::filesystem::path& path, PriceBook& book);

/// `isp_start_iso8601,shortage_eur_mwh,surplus_eur_mwh,regulation_state`;
/// ISP starts must align to 15-minute boundaries.
void ingest_imbalance(const std::filesystem::path& path, PriceBook& book);

enum class ProcurementKind { BaseLoad, QuantileScalar };

struct ProcurementStrategy {
  ProcurementKind kind = ProcurementKind::BaseLoad;
  double q = 0.0; // quantile in [0, 1]
  double s = 1.0; // scalar in [0.97, 1.30]

  void validate() const;
};

/// Linear-interpolation quantile over order statistics; q in [0, 1].
double quantile(std::vector<double> values, double q);

/// Flat hourly quantity (MWh/h) to schedule for a day of hourly load
/// forecasts: the q-quantile scaled by s, or the day's minimum hourly
/// load for the base-load strategy.
double schedule_quantity(const std::vector<double>& hourly_forecast_mwh,
                         const ProcurementStrategy& strategy);

enum class PriceSystem { OnePrice, TwoPrice };

struct IspDispatch {
  std::int64_t isp_start = 0;
  double scheduled_mwh = 0.0;
  double delivered_mwh = 0.0;
};

struct SettlementLine {
  std::int64_t isp_start = 0;
  double scheduled_mwh = 0.0;
  double delivered_mwh = 0.0;
  double shortage_mwh = 0.0; // max(0, delivered - scheduled)
  double surplus_mwh = 0.0;  // max(0, scheduled - delivered)
  double cost_eur = 0.0;     // this ISP's contribution (day-ahead + imbalance)
};

struct SettlementResult {
  double day_ahead_eur = 0.0;
  double imbalance_eur = 0.0; // shortage payments minus surplus refunds
  double total_eur = 0.0;
  std::vector<SettlementLine> lines;
};

/// Single-BRP imbalance settlement. Shortage pays the shortage price;
/// surplus refunds at the imbalance surplus price (one-price) or at the
/// hour's spot price (two-price). Negative prices keep their sign.
SettlementResult settle(const PriceBook& book, PriceSystem system,
                        const std::vector<IspDispatch>& dispatch);

struct OnDemandTariff {
  std::string label; // low | mid | high
  double price_eur_mwh = 0.0;
};

double ondemand_cost(double energy_mwh, const OnDemandTariff& tariff);

/// Gain from deviating from the schedule at a locational marginal price.
double balance_gain(double delivered_mwh, double scheduled_mwh, double zeta_eur_mwh);

inline constexpr double kJoulesPerMwh = 3.6e9;

} // namespace dcsim

#endif
