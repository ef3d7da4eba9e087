#include "dcsim/market.hpp"

#include "dcsim/csv.hpp"
#include "dcsim/errors.hpp"
#include "dcsim/timeutil.hpp"

#include <algorithm>
#include <cmath>

namespace dcsim {

double PriceBook::spot_for(std::int64_t isp_start) const {
  auto it = spot.find(timeutil::floor_to(isp_start, timeutil::kHourSeconds));
  if (it == spot.end())
    throw DataError("no spot price for hour of " + timeutil::format_utc(isp_start));
  return it->second;
}

const ImbalancePrice& PriceBook::imbalance_for(std::int64_t isp_start) const {
  auto it = imbalance.find(isp_start);
  if (it == imbalance.end())
    throw DataError("no imbalance price for ISP " + timeutil::format_utc(isp_start));
  return it->second;
}

void ingest_spot(const std::filesystem::path& path, PriceBook& book) {
  auto t = csv::read_file(path, {"hour_start_iso8601", "price_eur_mwh"});
  for (const auto& row : t.rows) {
    std::int64_t ts = timeutil::parse_iso8601(row[0]);
    if (ts % timeutil::kHourSeconds != 0)
      throw DataError("spot timestamp not on an hour boundary: " + row[0]);
    book.spot[ts] = csv::to_double(row[1], path.string());
  }
}

void ingest_imbalance(const std::filesystem::path& path, PriceBook& book) {
  auto t = csv::read_file(
      path, {"isp_start_iso8601", "shortage_eur_mwh", "surplus_eur_mwh", "regulation_state"});
  for (const auto& row : t.rows) {
    std::int64_t ts = timeutil::parse_iso8601(row[0]);
    if (ts % timeutil::kIspSeconds != 0)
      throw DataError("ISP timestamp not on a 15-minute boundary: " + row[0]);
    ImbalancePrice p;
    p.shortage_eur_mwh = csv::to_double(row[1], path.string());
    p.surplus_eur_mwh = csv::to_double(row[2], path.string());
    p.regulation_state = static_cast<int>(csv::to_int(row[3], path.string()));
    book.imbalance[ts] = p;
  }
}

void ProcurementStrategy::validate() const {
  if (kind == ProcurementKind::QuantileScalar) {
    if (q < 0.0 || q > 1.0) throw ConfigError("procurement quantile must lie in [0, 1]");
    if (s < 0.97 || s > 1.30) throw ConfigError("procurement scalar must lie in [0.97, 1.30]");
  }
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw DomainError("quantile of an empty set");
  if (q < 0.0 || q > 1.0) throw DomainError("quantile level must lie in [0, 1]");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = static_cast<std::size_t>(std::ceil(pos));
  if (lo == hi) return values[lo];
  const double w = pos - static_cast<double>(lo);
  return values[lo] * (1.0 - w) + values[hi] * w;
}

double schedule_quantity(const std::vector<double>& hourly_forecast_mwh,
                         const ProcurementStrategy& strategy) {
  if (hourly_forecast_mwh.empty()) throw DomainError("empty load forecast");
  strategy.validate();
  for (double v : hourly_forecast_mwh)
    if (v < 0.0) throw DomainError("load forecast must be non-negative");
  if (strategy.kind == ProcurementKind::BaseLoad)
    return *std::min_element(hourly_forecast_mwh.begin(), hourly_forecast_mwh.end());
  return quantile(hourly_forecast_mwh, strategy.q) * strategy.s;
}

SettlementResult settle(const PriceBook& book, PriceSystem system,
                        const std::vector<IspDispatch>& dispatch) {
  SettlementResult out;
  out.lines.reserve(dispatch.size());
  std::vector<std::int64_t> gaps;
  for (const auto& d : dispatch) {
    if (book.imbalance.find(d.isp_start) == book.imbalance.end() ||
        book.spot.find(timeutil::floor_to(d.isp_start, timeutil::kHourSeconds)) ==
            book.spot.end())
      gaps.push_back(d.isp_start);
  }
  if (!gaps.empty()) {
    std::string msg = "missing prices for ISPs:";
    for (auto g : gaps) msg += " " + timeutil::format_utc(g);
    throw DataError(msg);
  }

  for (const auto& d : dispatch) {
    const double spot = book.spot_for(d.isp_start);
    const auto& imb = book.imbalance_for(d.isp_start);

    SettlementLine line;
    line.isp_start = d.isp_start;
    line.scheduled_mwh = d.scheduled_mwh;
    line.delivered_mwh = d.delivered_mwh;
    line.shortage_mwh = std::max(0.0, d.delivered_mwh - d.scheduled_mwh);
    line.surplus_mwh = std::max(0.0, d.scheduled_mwh - d.delivered_mwh);

    const double da = d.scheduled_mwh * spot;
    const double refund_price =
        system == PriceSystem::OnePrice ? imb.surplus_eur_mwh : spot;
    const double imbalance =
        line.shortage_mwh * imb.shortage_eur_mwh - line.surplus_mwh * refund_price;
    line.cost_eur = da + imbalance;

    out.day_ahead_eur += da;
    out.imbalance_eur += imbalance;
    out.lines.push_back(line);
  }
  out.total_eur = out.day_ahead_eur + out.imbalance_eur;
  return out;
}

double ondemand_cost(double energy_mwh, const OnDemandTariff& tariff) {
  if (energy_mwh < 0.0) throw DomainError("energy must be >= 0");
  return energy_mwh * tariff.price_eur_mwh;
}

double balance_gain(double delivered_mwh, double scheduled_mwh, double zeta_eur_mwh) {
  return (delivered_mwh - scheduled_mwh) * zeta_eur_mwh;
}

} // namespace dcsim
