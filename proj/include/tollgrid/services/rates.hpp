#pragma once

#include <array>
#include <string>

#include "tollgrid/services/messages.hpp"

namespace tollgrid::services {

// Per-kilometre rate for each pollution level 0..5.
class RateTable {
 public:
  // 0.05 EUR/km per level: {0, 0.05, 0.10, 0.15, 0.20, 0.25}.
  RateTable();
  // Throws DataError unless rate(0) == 0 and rates strictly increase.
  explicit RateTable(std::array<MicroEuros, 6> micro_eur_per_km);

  // Throws ContractError for a level outside 0..5.
  MicroEuros micro_eur_per_km(int level) const;
  double eur_per_km(int level) const { return to_eur(micro_eur_per_km(level)); }

  const std::array<MicroEuros, 6>& rates() const { return rates_; }

 private:
  std::array<MicroEuros, 6> rates_;
};

// Rates file: {"rate_eur_per_km": {"0": 0, "1": 0.05, ..., "5": 0.25}}.
// Every level must be present.
RateTable parse_rates(const std::string& json_text);
RateTable load_rates(const std::string& path);

}  // namespace tollgrid::services
