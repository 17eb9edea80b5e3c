#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace convex_auction {

using Index = Eigen::Index;

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Absolute slack used by every feasibility, monotonicity and equality check
/// unless a caller supplies its own.
inline constexpr double kDefaultTolerance = 1e-9;

/// Sorted support z_1 < ... < z_K of one bidder's type distribution.
///
/// The sentinel z_{K+1} = z_K is realized by clamping in next(); it is never
/// stored, so size() is always the true number of types.
template <typename Scalar>
class TypeSpace {
 public:
  TypeSpace() = default;

  explicit TypeSpace(VectorX<Scalar> values) : values_(std::move(values)) {
    if (values_.size() < 1) {
      throw std::invalid_argument("TypeSpace: at least one type is required");
    }
    for (Index k = 0; k < values_.size(); ++k) {
      if (!std::isfinite(static_cast<double>(values_[k])) || values_[k] < Scalar(0)) {
        throw std::invalid_argument("TypeSpace: types must be finite and non-negative");
      }
      if (k > 0 && !(values_[k] > values_[k - 1])) {
        throw std::invalid_argument("TypeSpace: types must be strictly increasing");
      }
    }
  }

  Index size() const { return values_.size(); }
  Scalar operator[](Index k) const { return values_[k]; }
  const VectorX<Scalar>& values() const { return values_; }

  /// z_{k+1}, with z_{K+1} = z_K.
  Scalar next(Index k) const { return values_[k + 1 < size() ? k + 1 : k]; }
  Scalar gap(Index k) const { return next(k) - values_[k]; }

  Scalar max() const { return values_[size() - 1]; }

 private:
  VectorX<Scalar> values_;
};

/// Probability mass function over a TypeSpace, with its running CDF.
template <typename Scalar>
class DiscreteDistribution {
 public:
  DiscreteDistribution() = default;

  explicit DiscreteDistribution(VectorX<Scalar> pmf, double tolerance = 1e-12)
      : pmf_(std::move(pmf)), cdf_(pmf_.size()) {
    if (pmf_.size() < 1) {
      throw std::invalid_argument("DiscreteDistribution: empty pmf");
    }
    Scalar running(0);
    for (Index k = 0; k < pmf_.size(); ++k) {
      if (!(pmf_[k] > Scalar(0)) || pmf_[k] > Scalar(1)) {
        throw std::invalid_argument("DiscreteDistribution: masses must lie in (0, 1]");
      }
      running += pmf_[k];
      cdf_[k] = running;
    }
    if (std::abs(static_cast<double>(running) - 1.0) > tolerance) {
      throw std::invalid_argument("DiscreteDistribution: masses must sum to 1");
    }
  }

  Index size() const { return pmf_.size(); }
  const VectorX<Scalar>& pmf() const { return pmf_; }
  const VectorX<Scalar>& cdf() const { return cdf_; }
  Scalar pmf(Index k) const { return pmf_[k]; }
  Scalar cdf(Index k) const { return cdf_[k]; }

  /// 1 - F_k, computed as a tail sum so it is exactly 0 at the top type.
  Scalar survival(Index k) const {
    Scalar tail(0);
    for (Index j = k + 1; j < pmf_.size(); ++j) tail += pmf_[j];
    return tail;
  }

 private:
  VectorX<Scalar> pmf_;
  VectorX<Scalar> cdf_;
};

template <typename Scalar>
struct Bidder {
  TypeSpace<Scalar> types;
  DiscreteDistribution<Scalar> distribution;

  Bidder() = default;
  Bidder(TypeSpace<Scalar> t, DiscreteDistribution<Scalar> d)
      : types(std::move(t)), distribution(std::move(d)) {
    if (types.size() != distribution.size()) {
      throw std::invalid_argument("Bidder: type space and pmf lengths differ");
    }
  }

  Index size() const { return types.size(); }
};

/// Mixed-radix indexing of the profile space V = V_1 x ... x V_n.
///
/// Profiles are numbered lexicographically with bidder 0 as the slowest
/// digit, so profile p has digits d_0 ... d_{n-1} with
/// p = sum_i d_i * stride_i and stride_{n-1} = 1.
class ProfileSpace {
 public:
  ProfileSpace() = default;

  explicit ProfileSpace(std::vector<Index> sizes) : sizes_(std::move(sizes)), strides_(sizes_.size()) {
    Index stride = 1;
    for (std::size_t i = sizes_.size(); i-- > 0;) {
      strides_[i] = stride;
      stride *= sizes_[i];
    }
    count_ = stride;
  }

  Index num_bidders() const { return static_cast<Index>(sizes_.size()); }
  Index count() const { return count_; }
  Index types(Index bidder) const { return sizes_[static_cast<std::size_t>(bidder)]; }
  Index stride(Index bidder) const { return strides_[static_cast<std::size_t>(bidder)]; }
  const std::vector<Index>& sizes() const { return sizes_; }

  Index digit(Index profile, Index bidder) const {
    return (profile / stride(bidder)) % types(bidder);
  }

  std::vector<Index> digits(Index profile) const {
    std::vector<Index> out(sizes_.size());
    for (Index i = 0; i < num_bidders(); ++i) out[static_cast<std::size_t>(i)] = digit(profile, i);
    return out;
  }

  Index index(const std::vector<Index>& digits) const {
    Index p = 0;
    for (Index i = 0; i < num_bidders(); ++i) p += digits[static_cast<std::size_t>(i)] * stride(i);
    return p;
  }

  /// Profile obtained from `profile` by replacing bidder's type with k.
  Index with_type(Index profile, Index bidder, Index k) const {
    return profile + (k - digit(profile, bidder)) * stride(bidder);
  }

  /// Number of opponent profiles v_{-i}.
  Index chains(Index bidder) const { return count_ / types(bidder); }

  /// Profile index of (z_{i,0}, v_{-i}) for the c-th opponent profile, in
  /// lexicographic order of v_{-i}.
  Index chain_base(Index bidder, Index c) const {
    const Index low = c % stride(bidder);
    const Index high = c / stride(bidder);
    return high * stride(bidder) * types(bidder) + low;
  }

  template <typename F>
  void for_each_chain(Index bidder, F&& f) const {
    const Index n = chains(bidder);
    for (Index c = 0; c < n; ++c) f(chain_base(bidder, c));
  }

 private:
  std::vector<Index> sizes_;
  std::vector<Index> strides_;
  Index count_ = 1;
};

/// n independent bidders with discrete type distributions.
template <typename Scalar>
class BasicAuctionInstance {
 public:
  BasicAuctionInstance() = default;

  explicit BasicAuctionInstance(std::vector<Bidder<Scalar>> bidders, double tolerance = kDefaultTolerance)
      : bidders_(std::move(bidders)) {
    if (bidders_.empty()) {
      throw std::invalid_argument("AuctionInstance: at least one bidder is required");
    }
    std::vector<Index> sizes;
    sizes.reserve(bidders_.size());
    for (const auto& b : bidders_) sizes.push_back(b.size());
    space_ = ProfileSpace(std::move(sizes));

    joint_.resize(space_.count());
    for (Index p = 0; p < space_.count(); ++p) {
      Scalar prob(1);
      for (Index i = 0; i < num_bidders(); ++i) prob *= bidder(i).distribution.pmf(space_.digit(p, i));
      joint_[p] = prob;
    }
    if (std::abs(static_cast<double>(joint_.sum()) - 1.0) > tolerance) {
      throw std::invalid_argument("AuctionInstance: joint pmf does not sum to 1");
    }
  }

  static BasicAuctionInstance symmetric(const Bidder<Scalar>& bidder, Index n) {
    if (n < 1) throw std::invalid_argument("AuctionInstance: at least one bidder is required");
    return BasicAuctionInstance(std::vector<Bidder<Scalar>>(static_cast<std::size_t>(n), bidder));
  }

  Index num_bidders() const { return static_cast<Index>(bidders_.size()); }
  const Bidder<Scalar>& bidder(Index i) const { return bidders_[static_cast<std::size_t>(i)]; }
  const std::vector<Bidder<Scalar>>& bidders() const { return bidders_; }
  const ProfileSpace& space() const { return space_; }
  Index num_profiles() const { return space_.count(); }

  /// Joint probability f(v) of profile p.
  Scalar probability(Index p) const { return joint_[p]; }
  const VectorX<Scalar>& probabilities() const { return joint_; }

  /// f_{-i}(v_{-i}) for the opponents of `bidder` in profile p.
  Scalar others_probability(Index bidder_index, Index p) const {
    Scalar prob(1);
    for (Index j = 0; j < num_bidders(); ++j) {
      if (j != bidder_index) prob *= bidder(j).distribution.pmf(space_.digit(p, j));
    }
    return prob;
  }

  /// z_{i, d_i(p)}: bidder's type in profile p.
  Scalar value(Index bidder_index, Index p) const {
    return bidder(bidder_index).types[space_.digit(p, bidder_index)];
  }

  Scalar max_value() const {
    Scalar m(0);
    for (const auto& b : bidders_) m = std::max(m, b.types.max());
    return m;
  }

  Index max_types() const {
    Index k = 0;
    for (const auto& b : bidders_) k = std::max(k, b.size());
    return k;
  }

  Index total_types() const {
    Index k = 0;
    for (const auto& b : bidders_) k += b.size();
    return k;
  }

  bool is_symmetric() const {
    for (const auto& b : bidders_) {
      if (b.types.values() != bidders_.front().types.values() ||
          b.distribution.pmf() != bidders_.front().distribution.pmf()) {
        return false;
      }
    }
    return true;
  }

 private:
  std::vector<Bidder<Scalar>> bidders_;
  ProfileSpace space_;
  VectorX<Scalar> joint_;
};

using AuctionInstance = BasicAuctionInstance<double>;

template <typename Scalar>
struct ProfileEntry {
  Index index = 0;
  std::vector<Index> types;
  Scalar probability{};
};

/// Every type profile exactly once, in lexicographic index order.
template <typename Scalar>
std::vector<ProfileEntry<Scalar>> profiles(const BasicAuctionInstance<Scalar>& instance) {
  std::vector<ProfileEntry<Scalar>> out;
  out.reserve(static_cast<std::size_t>(instance.num_profiles()));
  for (Index p = 0; p < instance.num_profiles(); ++p) {
    out.push_back({p, instance.space().digits(p), instance.probability(p)});
  }
  return out;
}

// Tables. Ex-post tables are n x |V| matrices indexed [bidder][profile];
// interim tables hold one vector per bidder indexed by type.

struct AllocationTag;
struct PaymentTag;
struct PerceivedPaymentTag;

template <typename Scalar, typename Tag>
struct ExPostTable {
  MatrixX<Scalar> table;

  ExPostTable() = default;
  explicit ExPostTable(MatrixX<Scalar> t) : table(std::move(t)) {}
  ExPostTable(Index bidders, Index profiles) : table(MatrixX<Scalar>::Zero(bidders, profiles)) {}

  Scalar& operator()(Index bidder, Index profile) { return table(bidder, profile); }
  Scalar operator()(Index bidder, Index profile) const { return table(bidder, profile); }
  Index num_bidders() const { return table.rows(); }
  Index num_profiles() const { return table.cols(); }

  friend bool operator==(const ExPostTable& a, const ExPostTable& b) {
    return a.table.rows() == b.table.rows() && a.table.cols() == b.table.cols() && a.table == b.table;
  }
};

template <typename Scalar>
using ExPostAllocation = ExPostTable<Scalar, AllocationTag>;
/// Actual payments p_i(v); the perceived cost is p^2 (or p, for linear mechanisms).
template <typename Scalar>
using RobustPaymentRule = ExPostTable<Scalar, PaymentTag>;
/// Perceived payments q_i(v).
template <typename Scalar>
using PerceivedPayments = ExPostTable<Scalar, PerceivedPaymentTag>;

struct InterimAllocationTag;
struct InterimPaymentTag;

template <typename Scalar, typename Tag>
struct InterimTable {
  std::vector<VectorX<Scalar>> per_bidder;

  InterimTable() = default;
  explicit InterimTable(std::vector<VectorX<Scalar>> t) : per_bidder(std::move(t)) {}

  template <typename S2>
  static InterimTable zeros_like(const BasicAuctionInstance<S2>& instance) {
    InterimTable out;
    for (const auto& b : instance.bidders()) out.per_bidder.push_back(VectorX<Scalar>::Zero(b.size()));
    return out;
  }

  Scalar& operator()(Index bidder, Index k) { return per_bidder[static_cast<std::size_t>(bidder)][k]; }
  Scalar operator()(Index bidder, Index k) const { return per_bidder[static_cast<std::size_t>(bidder)][k]; }
  const VectorX<Scalar>& bidder(Index i) const { return per_bidder[static_cast<std::size_t>(i)]; }
  Index num_bidders() const { return static_cast<Index>(per_bidder.size()); }

  friend bool operator==(const InterimTable& a, const InterimTable& b) {
    if (a.per_bidder.size() != b.per_bidder.size()) return false;
    for (std::size_t i = 0; i < a.per_bidder.size(); ++i) {
      if (a.per_bidder[i].size() != b.per_bidder[i].size() || a.per_bidder[i] != b.per_bidder[i]) return false;
    }
    return true;
  }
};

/// x̂_i(z_{i,k}) = E_{v_{-i}}[x_i(z_{i,k}, v_{-i})].
template <typename Scalar>
using InterimAllocation = InterimTable<Scalar, InterimAllocationTag>;
/// h_i(z_{i,k}): deterministic per-type payment.
template <typename Scalar>
using InterimPaymentRule = InterimTable<Scalar, InterimPaymentTag>;

// Experiment distributions.

template <typename Scalar = double>
Bidder<Scalar> make_categorical(Scalar low, Scalar high, Scalar p_low) {
  if (!(low >= Scalar(0)) || !(low < high)) {
    throw std::invalid_argument("make_categorical: requires 0 <= low < high");
  }
  if (!(p_low > Scalar(0)) || !(p_low < Scalar(1))) {
    throw std::invalid_argument("make_categorical: p_low must lie in (0, 1)");
  }
  VectorX<Scalar> values(2), pmf(2);
  values << low, high;
  pmf << p_low, Scalar(1) - p_low;
  return {TypeSpace<Scalar>(values), DiscreteDistribution<Scalar>(pmf)};
}

/// Evenly spaced grid {0, 1/(points-1), ..., 1} with uniform mass.
template <typename Scalar = double>
Bidder<Scalar> make_uniform(int points) {
  if (points < 1) throw std::invalid_argument("make_uniform: points must be >= 1");
  VectorX<Scalar> values(points);
  for (int j = 0; j < points; ++j) {
    values[j] = points == 1 ? Scalar(0) : Scalar(j) / Scalar(points - 1);
  }
  VectorX<Scalar> pmf = VectorX<Scalar>::Constant(points, Scalar(1) / Scalar(points));
  return {TypeSpace<Scalar>(values), DiscreteDistribution<Scalar>(pmf)};
}

template <typename Scalar = double>
Bidder<Scalar> make_binomial(int trials, Scalar p) {
  if (trials < 1) throw std::invalid_argument("make_binomial: trials must be >= 1");
  if (!(p > Scalar(0)) || !(p < Scalar(1))) {
    throw std::invalid_argument("make_binomial: p must lie in (0, 1)");
  }
  VectorX<Scalar> values(trials + 1), pmf(trials + 1);
  Scalar choose(1);
  for (int k = 0; k <= trials; ++k) {
    values[k] = Scalar(k);
    using std::pow;
    pmf[k] = choose * pow(p, Scalar(k)) * pow(Scalar(1) - p, Scalar(trials - k));
    choose = choose * Scalar(trials - k) / Scalar(k + 1);
  }
  return {TypeSpace<Scalar>(values), DiscreteDistribution<Scalar>(pmf)};
}

}  // namespace convex_auction
