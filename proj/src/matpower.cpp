#include "gridlocus/matpower.hpp"

#include <charconv>
#include <cmath>
#include <map>
#include <numbers>
#include <optional>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "gridlocus/errors.hpp"

namespace gridlocus {

namespace {

using Table = std::vector<std::vector<double>>;

[[noreturn]] void malformed(const std::string& what) { throw Error(ErrorCode::MalformedDocument, what); }
[[noreturn]] void unsupported(const std::string& what) { throw Error(ErrorCode::UnsupportedFeature, what); }

std::string strip_comments(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool in_comment = false;
  for (char c : text) {
    if (c == '%') in_comment = true;
    if (c == '\n') in_comment = false;
    if (!in_comment) out.push_back(c);
  }
  return out;
}

double parse_number(const std::string& token, const std::string& where) {
  if (token == "Inf" || token == "inf") return std::numeric_limits<double>::infinity();
  if (token == "-Inf" || token == "-inf") return -std::numeric_limits<double>::infinity();
  double value = 0.0;
  const char* first = token.data();
  if (!token.empty() && token.front() == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    malformed(where + ": cannot parse number '" + token + "'");
  }
  return value;
}

std::optional<Table> find_table(const std::string& text, const std::string& name) {
  const std::regex head("mpc\\." + name + "\\s*=\\s*\\[");
  std::smatch match;
  if (!std::regex_search(text, match, head)) return std::nullopt;
  const auto begin = static_cast<std::size_t>(match.position(0) + match.length(0));
  const auto end = text.find(']', begin);
  if (end == std::string::npos) malformed("table mpc." + name + " is not terminated by ']'");
  std::string body = text.substr(begin, end - begin);

  Table table;
  std::vector<double> row;
  std::string token;
  auto flush_token = [&] {
    if (!token.empty()) {
      row.push_back(parse_number(token, "mpc." + name));
      token.clear();
    }
  };
  auto flush_row = [&] {
    flush_token();
    if (!row.empty()) {
      table.push_back(row);
      row.clear();
    }
  };
  for (char c : body) {
    if (c == ';' || c == '\n' || c == '\r') {
      flush_row();
    } else if (c == ' ' || c == '\t' || c == ',') {
      flush_token();
    } else {
      token.push_back(c);
    }
  }
  flush_row();
  return table;
}

double scalar_field(const std::string& text, const std::string& name) {
  const std::regex pattern("mpc\\." + name + "\\s*=\\s*([-+0-9.eE]+)\\s*;");
  std::smatch match;
  if (!std::regex_search(text, match, pattern)) malformed("missing scalar mpc." + name);
  return parse_number(match[1].str(), "mpc." + name);
}

void require_columns(const Table& table, std::size_t count, const std::string& name) {
  for (std::size_t i = 0; i < table.size(); ++i) {
    if (table[i].size() < count) {
      malformed("mpc." + name + " row " + std::to_string(i + 1) + " has " +
                std::to_string(table[i].size()) + " columns, need at least " + std::to_string(count));
    }
  }
}

int as_id(double value, const std::string& where) {
  if (value != std::floor(value)) malformed(where + ": bus number must be an integer");
  return static_cast<int>(value);
}

}  // namespace

GridCase import_matpower(std::string_view raw) {
  const std::string text = strip_comments(raw);
  const double base_mva = scalar_field(text, "baseMVA");
  if (!(base_mva > 0.0)) malformed("mpc.baseMVA must be positive");

  auto bus_table = find_table(text, "bus");
  auto branch_table = find_table(text, "branch");
  if (!bus_table) malformed("missing table mpc.bus");
  if (!branch_table) malformed("missing table mpc.branch");
  Table gen_table = find_table(text, "gen").value_or(Table{});

  // Column layout follows the MATPOWER case format (1-based in its docs).
  require_columns(*bus_table, 9, "bus");
  require_columns(*branch_table, 11, "branch");
  require_columns(gen_table, 8, "gen");

  struct GenSum {
    double p = 0.0;
    double q = 0.0;
    std::optional<double> vg;
  };
  std::map<int, GenSum> gens;
  for (const auto& row : gen_table) {
    if (row[7] <= 0.0) continue;  // GEN_STATUS
    auto& sum = gens[as_id(row[0], "mpc.gen")];
    sum.p += row[1];
    sum.q += row[2];
    if (!sum.vg) sum.vg = row[5];
  }

  std::vector<Bus> buses;
  int reference_count = 0;
  for (const auto& row : *bus_table) {
    const int id = as_id(row[0], "mpc.bus");
    const int type = static_cast<int>(row[1]);
    const double pd = row[2];
    const double qd = row[3];
    const double gs = row[4];
    const double bs = row[5];
    const double vm = row[7];
    const double va = row[8];
    const std::string where = "bus " + std::to_string(id);
    if (gs != 0.0 || bs != 0.0) unsupported(where + ": bus shunt (Gs/Bs)");
    if (type == 4) unsupported(where + ": isolated bus type");
    if (type < 1 || type > 4) malformed(where + ": unknown bus type " + std::to_string(type));

    Bus bus;
    bus.id = id;
    const auto gen = gens.count(id) ? gens.at(id) : GenSum{};
    if (type == 3) {
      ++reference_count;
      bus.kind = BusKind::Swing;
      const double magnitude = gen.vg.value_or(vm);
      bus.v_swing = std::polar(magnitude, va * std::numbers::pi / 180.0);
    } else {
      bus.kind = BusKind::PQ;
      bus.p = (gen.p - pd) / base_mva;
      bus.q = (gen.q - qd) / base_mva;
    }
    buses.push_back(bus);
  }
  if (reference_count > 1) unsupported("multiple reference buses");

  std::vector<Branch> branches;
  for (std::size_t i = 0; i < branch_table->size(); ++i) {
    const auto& row = (*branch_table)[i];
    const std::string where = "branch " + std::to_string(i + 1);
    if (row[10] <= 0.0) continue;  // BR_STATUS
    if (row[8] != 0.0) unsupported(where + ": transformer tap ratio");
    if (row[9] != 0.0) unsupported(where + ": phase shifter");
    Branch br;
    br.from = as_id(row[0], "mpc.branch");
    br.to = as_id(row[1], "mpc.branch");
    br.r = row[2];
    br.x = row[3];
    br.b = row[4];
    branches.push_back(br);
  }
  return GridCase::create(std::move(buses), std::move(branches));
}

}  // namespace gridlocus
