#pragma once

#include <complex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

namespace gridlocus {

enum class BusKind { Swing, PQ };

/// A network node. Injections are per-unit and generation-positive; they are
/// meaningful on PQ buses only. `v_swing` is meaningful on the swing bus only.
struct Bus {
  int id = 0;  // external (operator-facing) id
  BusKind kind = BusKind::PQ;
  double p = 0.0;
  double q = 0.0;
  std::complex<double> v_swing{1.0, 0.0};

  bool operator==(const Bus&) const = default;
};

/// Series branch with optional total line-charging susceptance `b`, split
/// half per terminal. Inside a GridCase `from`/`to` are internal indices;
/// when passed to GridCase::create they are external ids.
struct Branch {
  int from = 0;
  int to = 0;
  double r = 0.0;
  double x = 0.0;
  double b = 0.0;
  int ordinal = 0;  // distinguishes parallel branches between the same pair

  bool operator==(const Branch&) const = default;
};

/// Immutable, validated network. Internal bus index 0 is the swing bus;
/// the remaining buses keep their input order.
class GridCase {
 public:
  /// Validates and renumbers. Branch endpoints are external bus ids.
  /// Throws gridlocus::Error (DuplicateBusId, NoSwingBus, MultipleSwingBuses,
  /// MalformedDocument, InvalidImpedance, DisconnectedGraph).
  static GridCase create(std::vector<Bus> buses, std::vector<Branch> branches);

  const std::vector<Bus>& buses() const noexcept { return buses_; }
  const std::vector<Branch>& branches() const noexcept { return branches_; }

  /// Number of non-swing buses.
  int n() const noexcept { return static_cast<int>(buses_.size()) - 1; }

  const Bus& swing() const noexcept { return buses_.front(); }
  std::complex<double> swing_voltage() const noexcept { return buses_.front().v_swing; }

  int external_id(int internal) const { return buses_.at(static_cast<std::size_t>(internal)).id; }
  /// Throws MalformedDocument for unknown ids.
  int internal_index(int external) const;

  bool operator==(const GridCase& other) const {
    return buses_ == other.buses_ && branches_ == other.branches_;
  }

 private:
  GridCase() = default;

  std::vector<Bus> buses_;
  std::vector<Branch> branches_;
  std::unordered_map<int, int> index_of_;
};

struct AdmittanceMatrix {
  Eigen::MatrixXcd y;  // (n+1) x (n+1), internal ordering
};

AdmittanceMatrix build_admittance(const GridCase& grid);

/// Parses the native JSON case document.
GridCase parse_case(std::string_view text);

/// Serializes to the native JSON case document (external ids, input order
/// with the swing bus first).
std::string serialize_case(const GridCase& grid);

/// Series conductance weight R/(R^2+X^2) of a branch.
inline double loss_weight(const Branch& br) { return br.r / (br.r * br.r + br.x * br.x); }

}  // namespace gridlocus
