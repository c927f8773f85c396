#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace activelab {

/// Ordered, immutable set of unique labels. Shared between every
/// distribution defined over it.
class Domain {
 public:
  explicit Domain(std::vector<std::string> labels);

  /// Labels "0", "1", ... for distributions with no natural names.
  static std::shared_ptr<const Domain> indexed(std::size_t n);

  std::size_t size() const noexcept { return labels_.size(); }
  const std::string& label(std::size_t i) const { return labels_.at(i); }
  const std::vector<std::string>& labels() const noexcept { return labels_; }

  /// Throws UnknownLabel.
  std::size_t index(std::string_view label) const;
  bool contains(std::string_view label) const noexcept;

  bool operator==(const Domain& other) const noexcept { return labels_ == other.labels_; }

 private:
  std::vector<std::string> labels_;
};

using DomainPtr = std::shared_ptr<const Domain>;

DomainPtr make_domain(std::vector<std::string> labels);

/// Normalized probability vector over a labeled domain.
class CategoricalDist {
 public:
  static constexpr double kTolerance = 1e-9;

  /// Validates non-negativity and unit mass (within kTolerance).
  CategoricalDist(DomainPtr domain, std::vector<double> probs);

  const DomainPtr& domain() const noexcept { return domain_; }
  std::size_t size() const noexcept { return probs_.size(); }
  const std::vector<double>& probs() const noexcept { return probs_; }
  double operator[](std::size_t i) const { return probs_.at(i); }
  double at(std::string_view label) const { return probs_.at(domain_->index(label)); }

  /// Index of the largest entry; ties go to the lowest index.
  std::size_t argmax() const noexcept;
  double entropy() const noexcept;

  bool operator==(const CategoricalDist& other) const noexcept;

 private:
  DomainPtr domain_;
  std::vector<double> probs_;
};

/// Scales a non-negative vector to unit mass. Throws DegenerateDistribution
/// on negative, non-finite or zero-sum input. With no domain, labels are
/// the entry indices.
CategoricalDist normalize(std::span<const double> values, DomainPtr domain = nullptr);

/// Per-entry absolute comparison.
bool approx_equal(const CategoricalDist& a, const CategoricalDist& b,
                  double tolerance = CategoricalDist::kTolerance);

}  // namespace activelab
