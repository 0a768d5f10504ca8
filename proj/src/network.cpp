#include "gridlocus/network.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <queue>
#include <unordered_set>
#include <utility>

#include <json.hpp>

#include "gridlocus/errors.hpp"

namespace gridlocus {

namespace {

using nlohmann::json;

[[noreturn]] void malformed(const std::string& what) { throw Error(ErrorCode::MalformedDocument, what); }

void require_finite(double value, const std::string& field) {
  if (!std::isfinite(value)) malformed("field '" + field + "' is not a finite number");
}

bool connected(int count, const std::vector<Branch>& branches) {
  std::vector<std::vector<int>> adjacency(static_cast<std::size_t>(count));
  for (const auto& br : branches) {
    adjacency[static_cast<std::size_t>(br.from)].push_back(br.to);
    adjacency[static_cast<std::size_t>(br.to)].push_back(br.from);
  }
  std::vector<char> seen(static_cast<std::size_t>(count), 0);
  std::queue<int> frontier;
  frontier.push(0);
  seen[0] = 1;
  int reached = 1;
  while (!frontier.empty()) {
    int bus = frontier.front();
    frontier.pop();
    for (int next : adjacency[static_cast<std::size_t>(bus)]) {
      if (!seen[static_cast<std::size_t>(next)]) {
        seen[static_cast<std::size_t>(next)] = 1;
        ++reached;
        frontier.push(next);
      }
    }
  }
  return reached == count;
}

double number_field(const json& obj, const char* key, const std::string& where) {
  const auto it = obj.find(key);
  if (it == obj.end()) malformed(where + ": missing field '" + key + "'");
  if (!it->is_number()) malformed(where + ": field '" + key + "' must be a number");
  double value = it->get<double>();
  require_finite(value, where + "." + key);
  return value;
}

int int_field(const json& obj, const char* key, const std::string& where) {
  const auto it = obj.find(key);
  if (it == obj.end()) malformed(where + ": missing field '" + key + "'");
  if (!it->is_number_integer()) malformed(where + ": field '" + key + "' must be an integer");
  return it->get<int>();
}

}  // namespace

GridCase GridCase::create(std::vector<Bus> buses, std::vector<Branch> branches) {
  if (buses.empty()) throw Error(ErrorCode::NoSwingBus, "case has no buses");

  std::unordered_set<int> ids;
  for (const auto& bus : buses) {
    if (!ids.insert(bus.id).second) {
      throw Error(ErrorCode::DuplicateBusId, "bus id " + std::to_string(bus.id) + " appears twice");
    }
    const std::string where = "bus " + std::to_string(bus.id);
    require_finite(bus.p, where + ".p");
    require_finite(bus.q, where + ".q");
    require_finite(bus.v_swing.real(), where + ".v_re");
    require_finite(bus.v_swing.imag(), where + ".v_im");
  }

  const auto swing_count = std::count_if(buses.begin(), buses.end(),
                                         [](const Bus& b) { return b.kind == BusKind::Swing; });
  if (swing_count == 0) throw Error(ErrorCode::NoSwingBus, "no bus of kind 'swing'");
  if (swing_count > 1) {
    throw Error(ErrorCode::MultipleSwingBuses,
                std::to_string(swing_count) + " buses of kind 'swing'");
  }

  GridCase grid;
  auto swing_it = std::find_if(buses.begin(), buses.end(),
                               [](const Bus& b) { return b.kind == BusKind::Swing; });
  Bus swing = *swing_it;
  swing.p = 0.0;
  swing.q = 0.0;
  if (std::abs(swing.v_swing) == 0.0) {
    malformed("bus " + std::to_string(swing.id) + ": swing voltage must be nonzero");
  }
  grid.buses_.push_back(swing);
  for (auto it = buses.begin(); it != buses.end(); ++it) {
    if (it == swing_it) continue;
    Bus bus = *it;
    bus.v_swing = {1.0, 0.0};
    grid.buses_.push_back(bus);
  }
  for (std::size_t i = 0; i < grid.buses_.size(); ++i) {
    grid.index_of_.emplace(grid.buses_[i].id, static_cast<int>(i));
  }

  std::map<std::pair<int, int>, int> parallel_count;
  for (std::size_t k = 0; k < branches.size(); ++k) {
    Branch br = branches[k];
    const std::string where = "branch " + std::to_string(k);
    if (!grid.index_of_.count(br.from) || !grid.index_of_.count(br.to)) {
      malformed(where + ": endpoint references unknown bus (" + std::to_string(br.from) + ", " +
                std::to_string(br.to) + ")");
    }
    if (br.from == br.to) malformed(where + ": connects bus " + std::to_string(br.from) + " to itself");
    require_finite(br.r, where + ".r");
    require_finite(br.x, where + ".x");
    require_finite(br.b, where + ".b");
    if (br.r < 0.0) throw Error(ErrorCode::InvalidImpedance, where + ": negative resistance");
    if (br.r == 0.0 && br.x == 0.0) throw Error(ErrorCode::InvalidImpedance, where + ": zero impedance");
    br.from = grid.index_of_.at(br.from);
    br.to = grid.index_of_.at(br.to);
    auto key = std::minmax(br.from, br.to);
    br.ordinal = parallel_count[key]++;
    grid.branches_.push_back(br);
  }

  if (!connected(static_cast<int>(grid.buses_.size()), grid.branches_)) {
    throw Error(ErrorCode::DisconnectedGraph, "branch graph does not connect every bus");
  }
  return grid;
}

int GridCase::internal_index(int external) const {
  auto it = index_of_.find(external);
  if (it == index_of_.end()) malformed("unknown bus id " + std::to_string(external));
  return it->second;
}

AdmittanceMatrix build_admittance(const GridCase& grid) {
  const auto size = static_cast<Eigen::Index>(grid.buses().size());
  AdmittanceMatrix adm{Eigen::MatrixXcd::Zero(size, size)};
  for (const auto& br : grid.branches()) {
    const std::complex<double> series = 1.0 / std::complex<double>(br.r, br.x);
    const std::complex<double> shunt(0.0, br.b / 2.0);
    adm.y(br.from, br.from) += series + shunt;
    adm.y(br.to, br.to) += series + shunt;
    adm.y(br.from, br.to) -= series;
    adm.y(br.to, br.from) -= series;
  }
  return adm;
}

GridCase parse_case(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    malformed(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) malformed("top level must be an object");
  if (!doc.contains("buses") || !doc["buses"].is_array()) malformed("missing array 'buses'");
  if (!doc.contains("branches") || !doc["branches"].is_array()) malformed("missing array 'branches'");

  std::vector<Bus> buses;
  for (std::size_t i = 0; i < doc["buses"].size(); ++i) {
    const json& entry = doc["buses"][i];
    std::string where = "buses[" + std::to_string(i) + "]";
    if (!entry.is_object()) malformed(where + " must be an object");
    Bus bus;
    bus.id = int_field(entry, "id", where);
    where = "bus " + std::to_string(bus.id);
    if (!entry.contains("kind") || !entry["kind"].is_string()) malformed(where + ": missing string field 'kind'");
    const auto kind = entry["kind"].get<std::string>();
    if (kind == "swing") {
      bus.kind = BusKind::Swing;
      if (entry.contains("p") || entry.contains("q")) {
        malformed(where + ": fields 'p'/'q' are forbidden on the swing bus");
      }
      double re = entry.contains("v_re") ? number_field(entry, "v_re", where) : 1.0;
      double im = entry.contains("v_im") ? number_field(entry, "v_im", where) : 0.0;
      bus.v_swing = {re, im};
    } else if (kind == "pq") {
      bus.kind = BusKind::PQ;
      bus.p = number_field(entry, "p", where);
      bus.q = number_field(entry, "q", where);
      if (entry.contains("v_re") || entry.contains("v_im")) {
        malformed(where + ": fields 'v_re'/'v_im' are only allowed on the swing bus");
      }
    } else {
      malformed(where + ": field 'kind' must be \"swing\" or \"pq\", got \"" + kind + "\"");
    }
    buses.push_back(bus);
  }

  std::vector<Branch> branches;
  for (std::size_t i = 0; i < doc["branches"].size(); ++i) {
    const json& entry = doc["branches"][i];
    const std::string where = "branches[" + std::to_string(i) + "]";
    if (!entry.is_object()) malformed(where + " must be an object");
    Branch br;
    br.from = int_field(entry, "from", where);
    br.to = int_field(entry, "to", where);
    br.r = number_field(entry, "r", where);
    br.x = number_field(entry, "x", where);
    br.b = entry.contains("b") ? number_field(entry, "b", where) : 0.0;
    branches.push_back(br);
  }
  return GridCase::create(std::move(buses), std::move(branches));
}

std::string serialize_case(const GridCase& grid) {
  nlohmann::ordered_json doc;
  doc["buses"] = nlohmann::ordered_json::array();
  for (const auto& bus : grid.buses()) {
    nlohmann::ordered_json entry;
    entry["id"] = bus.id;
    if (bus.kind == BusKind::Swing) {
      entry["kind"] = "swing";
      entry["v_re"] = bus.v_swing.real();
      entry["v_im"] = bus.v_swing.imag();
    } else {
      entry["kind"] = "pq";
      entry["p"] = bus.p;
      entry["q"] = bus.q;
    }
    doc["buses"].push_back(entry);
  }
  doc["branches"] = nlohmann::ordered_json::array();
  for (const auto& br : grid.branches()) {
    nlohmann::ordered_json entry;
    entry["from"] = grid.external_id(br.from);
    entry["to"] = grid.external_id(br.to);
    entry["r"] = br.r;
    entry["x"] = br.x;
    if (br.b != 0.0) entry["b"] = br.b;
    doc["branches"].push_back(entry);
  }
  return doc.dump(2) + "\n";
}

}  // namespace gridlocus
