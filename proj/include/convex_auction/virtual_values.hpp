#pragma once

#include "convex_auction/core.hpp"

#include <algorithm>
#include <vector>

namespace convex_auction {

/// Discrete virtual values phi and their positive parts, per bidder per type.
template <typename Scalar>
struct VirtualValueTable {
  std::vector<VectorX<Scalar>> phi;
  std::vector<VectorX<Scalar>> phi_plus;

  Scalar operator()(Index bidder, Index k) const { return phi[static_cast<std::size_t>(bidder)][k]; }
  Scalar plus(Index bidder, Index k) const { return phi_plus[static_cast<std::size_t>(bidder)][k]; }
  Index num_bidders() const { return static_cast<Index>(phi.size()); }
};

/// phi_{i,k} = z_k - (z_{k+1} - z_k) (1 - F_k) / f_k for one bidder.
template <typename Scalar>
VectorX<Scalar> virtual_values(const Bidder<Scalar>& bidder) {
  const Index K = bidder.size();
  VectorX<Scalar> phi(K);
  for (Index k = 0; k < K; ++k) {
    if (k + 1 == K) {
      phi[k] = bidder.types[k];
    } else {
      phi[k] = bidder.types[k] -
               bidder.types.gap(k) * bidder.distribution.survival(k) / bidder.distribution.pmf(k);
    }
  }
  return phi;
}

template <typename Scalar>
VirtualValueTable<Scalar> virtual_values(const BasicAuctionInstance<Scalar>& instance) {
  VirtualValueTable<Scalar> out;
  for (const auto& b : instance.bidders()) {
    VectorX<Scalar> phi = virtual_values(b);
    out.phi_plus.push_back(phi.cwiseMax(Scalar(0)));
    out.phi.push_back(std::move(phi));
  }
  return out;
}

/// One flag per bidder: true iff phi is non-decreasing in the type index.
template <typename Scalar>
std::vector<bool> is_regular(const VirtualValueTable<Scalar>& table) {
  std::vector<bool> out;
  out.reserve(table.phi.size());
  for (const auto& phi : table.phi) {
    bool regular = true;
    for (Index k = 0; k + 1 < phi.size(); ++k) regular = regular && phi[k + 1] >= phi[k];
    out.push_back(regular);
  }
  return out;
}

inline bool all_regular(const std::vector<bool>& flags) {
  return std::all_of(flags.begin(), flags.end(), [](bool b) { return b; });
}

}  // namespace convex_auction
