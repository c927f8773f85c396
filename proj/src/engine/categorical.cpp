#include "activelab/categorical.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

#include "activelab/error.hpp"

namespace activelab {

Domain::Domain(std::vector<std::string> labels) : labels_(std::move(labels)) {
  if (labels_.empty()) throw Error(ErrorKind::ShapeError, "domain must have at least one label");
  std::unordered_set<std::string> seen;
  for (const auto& l : labels_) {
    if (!seen.insert(l).second) throw Error(ErrorKind::InvalidConfig, "duplicate domain label '" + l + "'");
  }
}

std::shared_ptr<const Domain> Domain::indexed(std::size_t n) {
  std::vector<std::string> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = std::to_string(i);
  return std::make_shared<const Domain>(std::move(labels));
}

std::size_t Domain::index(std::string_view label) const {
  auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) throw Error(ErrorKind::UnknownLabel, "unknown label '" + std::string(label) + "'");
  return static_cast<std::size_t>(it - labels_.begin());
}

bool Domain::contains(std::string_view label) const noexcept {
  return std::find(labels_.begin(), labels_.end(), label) != labels_.end();
}

DomainPtr make_domain(std::vector<std::string> labels) {
  return std::make_shared<const Domain>(std::move(labels));
}

CategoricalDist::CategoricalDist(DomainPtr domain, std::vector<double> probs)
    : domain_(std::move(domain)), probs_(std::move(probs)) {
  if (!domain_) domain_ = Domain::indexed(probs_.size());
  if (domain_->size() != probs_.size()) {
    throw Error(ErrorKind::ShapeError, "distribution has " + std::to_string(probs_.size()) +
                                           " entries but domain has " + std::to_string(domain_->size()));
  }
  double total = 0.0;
  for (double p : probs_) {
    if (!(p >= 0.0) || !std::isfinite(p)) throw Error(ErrorKind::DegenerateDistribution, "negative or non-finite probability");
    total += p;
  }
  if (std::abs(total - 1.0) > kTolerance) {
    throw Error(ErrorKind::DegenerateDistribution, "probabilities sum to " + std::to_string(total));
  }
}

std::size_t CategoricalDist::argmax() const noexcept {
  std::size_t best = 0;
  for (std::size_t i = 1; i < probs_.size(); ++i) {
    if (probs_[i] > probs_[best]) best = i;
  }
  return best;
}

double CategoricalDist::entropy() const noexcept {
  double h = 0.0;
  for (double p : probs_) {
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

bool CategoricalDist::operator==(const CategoricalDist& other) const noexcept {
  return *domain_ == *other.domain_ && probs_ == other.probs_;
}

CategoricalDist normalize(std::span<const double> values, DomainPtr domain) {
  if (values.empty()) throw Error(ErrorKind::DegenerateDistribution, "empty vector");
  double total = 0.0;
  for (double v : values) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw Error(ErrorKind::DegenerateDistribution, "negative or non-finite entry");
    total += v;
  }
  if (!(total > 0.0)) throw Error(ErrorKind::DegenerateDistribution, "zero-sum vector");
  std::vector<double> probs(values.begin(), values.end());
  for (double& p : probs) p /= total;
  return CategoricalDist(std::move(domain), std::move(probs));
}

bool approx_equal(const CategoricalDist& a, const CategoricalDist& b, double tolerance) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::abs(a[i] - b[i]) > tolerance) return false;
  }
  return true;
}

}  // namespace activelab
