#pragma once

#include "convex_auction/mechanism.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace convex_auction {

struct MechanismFile {
  AuctionInstance instance;
  Mechanism mechanism;
};

/// JSON text with a fixed key order. Tables are nested arrays indexed
/// [bidder][profile] (profiles in lexicographic order, bidder 0 slowest) or
/// [bidder][type]. Doubles are written in shortest round-trip form, so
/// load_mechanism(save_mechanism(m)) reproduces every entry bit for bit.
std::string save_mechanism(const AuctionInstance& instance, const Mechanism& mechanism);
MechanismFile load_mechanism(std::string_view text);

void write_mechanism_file(const std::filesystem::path& path, const AuctionInstance& instance,
                          const Mechanism& mechanism);
MechanismFile read_mechanism_file(const std::filesystem::path& path);

}  // namespace convex_auction
