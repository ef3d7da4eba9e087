#include "dcsim/power_models.hpp"

#include "dcsim/csv.hpp"
#include "dcsim/errors.hpp"

#include <cmath>
#include <string>

namespace dcsim {

void PowerModelSpec::validate() const {
  if (kind == PowerModelKind::Constant) return;
  if (p_idle_w > p_max_w) throw ConfigError("power model: p_idle exceeds p_max");
  if (kind == PowerModelKind::Mse && r <= 0.0) throw ConfigError("power model: r must be > 0");
  if ((kind == PowerModelKind::Asymptotic || kind == PowerModelKind::AsymptoticDvfs) && a <= 0.0)
    throw ConfigError("power model: a must be > 0");
  if (kind == PowerModelKind::Interpolation) {
    if (table.size() < 2) throw ConfigError("interpolation table needs at least two knots");
    if (table.front().first != 0.0 || table.back().first != 1.0)
      throw ConfigError("interpolation table must cover usage 0 and 1");
    for (std::size_t i = 1; i < table.size(); ++i) {
      if (table[i].first <= table[i - 1].first)
        throw ConfigError("interpolation table not strictly increasing in usage");
    }
  }
}

double interpolate_power(const std::vector<PowerKnot>& table, double u) {
  if (table.empty()) throw ConfigError("empty interpolation table");
  if (u < table.front().first || u > table.back().first)
    throw DomainError("usage " + std::to_string(u) + " outside interpolation table span");
  for (std::size_t i = 1; i < table.size(); ++i) {
    const auto& [u1, p1] = table[i - 1];
    const auto& [u2, p2] = table[i];
    if (u <= u2) return p1 + (p2 - p1) * (u - u1) / (u2 - u1);
  }
  return table.back().second;
}

double eval_power(const PowerModelSpec& m, double u) {
  if (u < 0.0 || u > 1.0)
    throw DomainError("usage " + std::to_string(u) + " outside [0, 1]");
  const double span = m.p_max_w - m.p_idle_w;
  switch (m.kind) {
    case PowerModelKind::Constant:
      return m.constant_w;
    case PowerModelKind::Linear:
      return m.p_idle_w + span * u;
    case PowerModelKind::Square:
      return m.p_idle_w + span * u * u;
    case PowerModelKind::Cubic:
      return m.p_idle_w + span * u * u * u;
    case PowerModelKind::Sqrt:
      return m.p_idle_w + span * std::sqrt(u);
    case PowerModelKind::Mse:
      return m.p_idle_w + span * (2.0 * u - std::pow(u, m.r));
    case PowerModelKind::Interpolation:
      return interpolate_power(m.table, u);
    case PowerModelKind::Asymptotic:
      return m.p_idle_w + span / 2.0 * (1.0 + u - std::exp(-u / m.a));
    case PowerModelKind::AsymptoticDvfs: {
      const double u3 = u * u * u;
      return m.p_idle_w + span / 2.0 * (1.0 + u3 - std::exp(-u3 / m.a));
    }
  }
  throw ConfigError("unknown power model variant");
}

void validate_pstates(const std::vector<PState>& table) {
  if (table.empty()) throw ConfigError("empty P-state table");
  for (std::size_t i = 1; i < table.size(); ++i) {
    if (table[i].frequency_mhz >= table[i - 1].frequency_mhz)
      throw ConfigError("P-state frequencies must strictly decrease with index");
    if (table[i].power_w > table[i - 1].power_w)
      throw ConfigError("P-state power must not increase with index");
  }
}

std::vector<PState> load_pstate_csv(const std::filesystem::path& path) {
  auto t = csv::read_file(path, {"index", "frequency_mhz", "voltage_v", "power_w"});
  std::vector<PState> out;
  out.reserve(t.rows.size());
  for (const auto& row : t.rows) {
    PState p;
    p.index = static_cast<int>(csv::to_int(row[0], path.string()));
    p.frequency_mhz = csv::to_double(row[1], path.string());
    p.voltage_v = csv::to_double(row[2], path.string());
    p.power_w = csv::to_double(row[3], path.string());
    out.push_back(p);
  }
  validate_pstates(out);
  return out;
}

std::vector<PowerKnot> load_interpolation_csv(const std::filesystem::path& path) {
  auto t = csv::read_file(path, {"usage", "power_w"});
  std::vector<PowerKnot> out;
  out.reserve(t.rows.size());
  for (const auto& row : t.rows) {
    out.emplace_back(csv::to_double(row[0], path.string()),
                     csv::to_double(row[1], path.string()));
  }
  PowerModelSpec probe;
  probe.kind = PowerModelKind::Interpolation;
  probe.p_max_w = 1.0;
  probe.table = out;
  probe.validate();
  return out;
}

} // namespace dcsim
