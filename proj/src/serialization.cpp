#include "convex_auction/serialization.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace convex_auction {
namespace {

using Json = nlohmann::ordered_json;

constexpr const char* kFormat = "convex_auction.mechanism";
constexpr int kVersion = 1;

Json vector_json(const VectorX<double>& v) {
  Json out = Json::array();
  for (Index k = 0; k < v.size(); ++k) out.push_back(v[k]);
  return out;
}

VectorX<double> vector_from(const Json& j) {
  VectorX<double> v(static_cast<Index>(j.size()));
  for (std::size_t k = 0; k < j.size(); ++k) v[static_cast<Index>(k)] = j.at(k).get<double>();
  return v;
}

Json matrix_json(const MatrixX<double>& m) {
  Json out = Json::array();
  for (Index i = 0; i < m.rows(); ++i) out.push_back(vector_json(m.row(i).transpose()));
  return out;
}

MatrixX<double> matrix_from(const Json& j, Index rows, Index cols) {
  if (static_cast<Index>(j.size()) != rows) throw std::invalid_argument("mechanism file: wrong number of bidders");
  MatrixX<double> m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    const auto& row = j.at(static_cast<std::size_t>(i));
    if (static_cast<Index>(row.size()) != cols) throw std::invalid_argument("mechanism file: wrong number of profiles");
    for (Index p = 0; p < cols; ++p) m(i, p) = row.at(static_cast<std::size_t>(p)).get<double>();
  }
  return m;
}

template <typename Table>
Json interim_json(const Table& t) {
  Json out = Json::array();
  for (const auto& v : t.per_bidder) out.push_back(vector_json(v));
  return out;
}

template <typename Table>
Table interim_from(const Json& j, const AuctionInstance& instance) {
  if (static_cast<Index>(j.size()) != instance.num_bidders()) {
    throw std::invalid_argument("mechanism file: wrong number of bidders in interim table");
  }
  Table out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    VectorX<double> v = vector_from(j.at(i));
    if (v.size() != instance.bidder(static_cast<Index>(i)).size()) {
      throw std::invalid_argument("mechanism file: wrong number of types in interim table");
    }
    out.per_bidder.push_back(std::move(v));
  }
  return out;
}

}  // namespace

std::string save_mechanism(const AuctionInstance& instance, const Mechanism& mechanism) {
  Json j;
  j["format"] = kFormat;
  j["version"] = kVersion;
  j["provenance"] = mechanism.provenance;
  j["cost"] = std::string(to_string(mechanism.cost));
  j["profile_order"] = "lexicographic, bidder 0 slowest";
  Json bidders = Json::array();
  for (const auto& b : instance.bidders()) {
    Json entry;
    entry["types"] = vector_json(b.types.values());
    entry["pmf"] = vector_json(b.distribution.pmf());
    bidders.push_back(std::move(entry));
  }
  j["instance"]["bidders"] = std::move(bidders);
  j["allocation"] = mechanism.has_ex_post_allocation() ? matrix_json(mechanism.allocation.table) : Json(nullptr);
  j["robust_payments"] = mechanism.robust_payments ? matrix_json(mechanism.robust_payments->table) : Json(nullptr);
  j["interim_allocation"] =
      mechanism.interim_allocation ? interim_json(*mechanism.interim_allocation) : Json(nullptr);
  j["interim_payments"] = mechanism.interim_payments ? interim_json(*mechanism.interim_payments) : Json(nullptr);
  return j.dump(2) + "\n";
}

MechanismFile load_mechanism(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("mechanism file: ") + e.what());
  }
  if (j.value("format", "") != kFormat) throw std::invalid_argument("mechanism file: unrecognized format");
  if (j.value("version", 0) != kVersion) throw std::invalid_argument("mechanism file: unsupported version");

  std::vector<Bidder<double>> bidders;
  for (const auto& entry : j.at("instance").at("bidders")) {
    bidders.emplace_back(TypeSpace<double>(vector_from(entry.at("types"))),
                         DiscreteDistribution<double>(vector_from(entry.at("pmf"))));
  }
  MechanismFile out{AuctionInstance(std::move(bidders)), {}};
  const auto& instance = out.instance;
  auto& m = out.mechanism;
  m.provenance = j.at("provenance").get<std::string>();
  m.cost = parse_cost_model(j.at("cost").get<std::string>());
  if (!j.at("allocation").is_null()) {
    m.allocation.table = matrix_from(j.at("allocation"), instance.num_bidders(), instance.num_profiles());
  }
  if (!j.at("robust_payments").is_null()) {
    m.robust_payments = RobustPaymentRule<double>(
        matrix_from(j.at("robust_payments"), instance.num_bidders(), instance.num_profiles()));
  }
  if (!j.at("interim_allocation").is_null()) {
    m.interim_allocation = interim_from<InterimAllocation<double>>(j.at("interim_allocation"), instance);
  }
  if (!j.at("interim_payments").is_null()) {
    m.interim_payments = interim_from<InterimPaymentRule<double>>(j.at("interim_payments"), instance);
  }
  return out;
}

void write_mechanism_file(const std::filesystem::path& path, const AuctionInstance& instance,
                          const Mechanism& mechanism) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << save_mechanism(instance, mechanism);
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

MechanismFile read_mechanism_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return load_mechanism(buffer.str());
}

}  // namespace convex_auction
