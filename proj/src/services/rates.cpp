#include "tollgrid/services/rates.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "tollgrid/error.hpp"

namespace tollgrid::services {

RateTable::RateTable() : rates_{0, 50'000, 100'000, 150'000, 200'000, 250'000} {}

RateTable::RateTable(std::array<MicroEuros, 6> micro_eur_per_km) : rates_(micro_eur_per_km) {
  if (rates_[0] != 0) throw DataError("rate table: level 0 must be free");
  for (std::size_t l = 1; l < rates_.size(); ++l) {
    if (rates_[l] <= rates_[l - 1]) {
      throw DataError("rate table: rates must strictly increase with level (level " +
                      std::to_string(l) + ")");
    }
  }
}

MicroEuros RateTable::micro_eur_per_km(int level) const {
  if (level < 0 || level > 5) {
    throw ContractError("no rate for pollution level " + std::to_string(level));
  }
  return rates_[static_cast<std::size_t>(level)];
}

RateTable parse_rates(const std::string& json_text) {
  std::array<MicroEuros, 6> rates{};
  try {
    const auto doc = nlohmann::json::parse(json_text);
    const auto& table = doc.at("rate_eur_per_km");
    for (int l = 0; l <= 5; ++l) {
      const double eur = table.at(std::to_string(l)).get<double>();
      if (!std::isfinite(eur) || eur < 0) throw DataError("negative or non-finite rate");
      rates[static_cast<std::size_t>(l)] = std::llround(eur * 1e6);
    }
  } catch (const nlohmann::json::exception& e) {
    throw LoadError(std::string("rates file: ") + e.what());
  }
  return RateTable(rates);
}

RateTable load_rates(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open rates file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_rates(ss.str());
}

}  // namespace tollgrid::services
