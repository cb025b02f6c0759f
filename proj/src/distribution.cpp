#include "pvd/distribution.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <stdexcept>

namespace pvd {

OutcomeDistribution OutcomeDistribution::exact(std::string alphabet) {
  return OutcomeDistribution(DistMode::exact, std::move(alphabet));
}

OutcomeDistribution OutcomeDistribution::empirical(std::string alphabet) {
  return OutcomeDistribution(DistMode::empirical, std::move(alphabet));
}

void OutcomeDistribution::add(const std::string& key, double mass) {
  if (mass < 0.0) throw std::invalid_argument("add: negative mass");
  if (mass == 0.0) return;
  w_[key] += mass;
}

void OutcomeDistribution::add_block(const std::string& key, double mass,
                                    const Mat& block) {
  if (mass < 0.0) throw std::invalid_argument("add_block: negative mass");
  if (mass == 0.0) return;
  w_[key] += mass;
  auto it = blocks_.find(key);
  if (it == blocks_.end())
    blocks_.emplace(key, block);
  else
    it->second += block;
}

void OutcomeDistribution::set_total(double total) {
  if (total <= 0.0) throw std::invalid_argument("set_total: nonpositive total");
  total_ = total;
}

std::uint64_t OutcomeDistribution::samples() const {
  if (mode_ != DistMode::empirical)
    throw std::logic_error("samples: exact distribution");
  return static_cast<std::uint64_t>(total_);
}

double OutcomeDistribution::prob(const std::string& key) const {
  auto it = w_.find(key);
  return it == w_.end() ? 0.0 : it->second / total_;
}

double OutcomeDistribution::valid_raw_mass() const {
  double v = 0.0;
  for (const auto& [k, m] : w_)
    if (k != kBottom) v += m;
  return v;
}

void OutcomeDistribution::check() const {
  if (total_ <= 0.0) throw std::logic_error("distribution: total not set");
  double sum = 0.0;
  for (const auto& [k, m] : w_) {
    if (m < 0.0) throw std::logic_error("distribution: negative weight");
    sum += m;
  }
  if (std::abs(sum / total_ - 1.0) > 1e-9)
    throw std::logic_error("distribution: weights do not sum to 1");
  for (const auto& [k, b] : blocks_) {
    auto it = w_.find(k);
    if (it == w_.end() || std::abs(b.trace().real() - it->second) > 1e-9)
      throw std::logic_error("distribution: block trace mismatch");
  }
}

namespace {

// Union of key sets, so one-sided outcomes are counted against zero.
template <typename F>
void for_union(const OutcomeDistribution& p, const OutcomeDistribution& q,
               F&& f) {
  auto ip = p.raw().begin();
  auto iq = q.raw().begin();
  while (ip != p.raw().end() || iq != q.raw().end()) {
    if (iq == q.raw().end() || (ip != p.raw().end() && ip->first < iq->first)) {
      f(ip->first, ip->second, 0.0);
      ++ip;
    } else if (ip == p.raw().end() || iq->first < ip->first) {
      f(iq->first, 0.0, iq->second);
      ++iq;
    } else {
      f(ip->first, ip->second, iq->second);
      ++ip;
      ++iq;
    }
  }
}

const Mat* find_block(const OutcomeDistribution& d, const std::string& key) {
  auto it = d.blocks().find(key);
  return it == d.blocks().end() ? nullptr : &it->second;
}

double block_aware_term(const OutcomeDistribution& p,
                        const OutcomeDistribution& q, const std::string& key,
                        double pm, double qm, double pt, double qt) {
  const Mat* bp = find_block(p, key);
  const Mat* bq = find_block(q, key);
  if (!bp && !bq) return 0.5 * std::abs(pm / pt - qm / qt);
  const Eigen::Index dim = bp ? bp->rows() : bq->rows();
  Mat d = Mat::Zero(dim, dim);
  if (bp) d += *bp / pt;
  if (bq) {
    if (bq->rows() != dim)
      throw std::invalid_argument("tv_distance: residual dimension mismatch");
    d -= *bq / qt;
  }
  return half_trace_norm(d);
}

}  // namespace

double tv_distance(const OutcomeDistribution& p, const OutcomeDistribution& q) {
  if (p.alphabet() != q.alphabet())
    throw std::invalid_argument("tv_distance: alphabet mismatch");
  double tv = 0.0;
  for_union(p, q, [&](const std::string& key, double pm, double qm) {
    tv += block_aware_term(p, q, key, pm, qm, p.total(), q.total());
  });
  return tv;
}

bool exactly_equal(const OutcomeDistribution& p, const OutcomeDistribution& q) {
  if (p.alphabet() != q.alphabet() || p.total() != q.total()) return false;
  if (p.raw().size() != q.raw().size()) return false;
  auto ip = p.raw().begin();
  for (auto iq = q.raw().begin(); iq != q.raw().end(); ++ip, ++iq)
    if (ip->first != iq->first || ip->second != iq->second) return false;
  if (p.blocks().size() != q.blocks().size()) return false;
  auto bp = p.blocks().begin();
  for (auto bq = q.blocks().begin(); bq != q.blocks().end(); ++bp, ++bq) {
    if (bp->first != bq->first || bp->second.rows() != bq->second.rows())
      return false;
    if (bp->second != bq->second) return false;
  }
  return true;
}

double tv_ci_bound(const OutcomeDistribution& p, const OutcomeDistribution& q,
                   double alpha) {
  if (alpha <= 0.0 || alpha >= 1.0)
    throw std::invalid_argument("tv_ci_bound: alpha out of range");
  auto side = [&](const OutcomeDistribution& d) {
    if (d.mode() != DistMode::empirical) return 0.0;
    return std::sqrt(std::log(2.0 / alpha) / (2.0 * d.total()));
  };
  return side(p) + side(q);
}

double conditional_valid_tv(const OutcomeDistribution& p,
                            const OutcomeDistribution& q) {
  if (p.alphabet() != q.alphabet())
    throw std::invalid_argument("conditional_valid_tv: alphabet mismatch");
  const double vp = p.valid_raw_mass(), vq = q.valid_raw_mass();
  if (vp <= 0.0 || vq <= 0.0) return 0.0;
  double tv = 0.0;
  for_union(p, q, [&](const std::string& key, double pm, double qm) {
    if (key == kBottom) return;
    tv += block_aware_term(p, q, key, pm, qm, vp, vq);
  });
  return tv;
}

OutcomeDistribution bottom_mixture(double bottom_weight,
                                   const OutcomeDistribution& base) {
  if (base.mode() != DistMode::exact)
    throw std::invalid_argument("bottom_mixture: exact mode only");
  if (bottom_weight < 0.0 || bottom_weight > 1.0)
    throw std::invalid_argument("bottom_mixture: weight out of range");
  OutcomeDistribution out = OutcomeDistribution::exact(base.alphabet());
  out.set_total(base.total());
  out.add(kBottom, bottom_weight * base.total());
  for (const auto& [key, mass] : base.raw()) {
    const double m = (1.0 - bottom_weight) * mass;
    if (const Mat* block = find_block(base, key))
      out.add_block(key, m, (1.0 - bottom_weight) * (*block));
    else
      out.add(key, m);
  }
  return out;
}

BinomialCi wilson_interval(std::uint64_t successes, std::uint64_t trials,
                           double alpha) {
  if (trials == 0) throw std::invalid_argument("wilson_interval: no trials");
  if (successes > trials)
    throw std::invalid_argument("wilson_interval: successes > trials");
  const boost::math::normal_distribution<double> norm;
  const double z = boost::math::quantile(norm, 1.0 - alpha / 2.0);
  const double n = static_cast<double>(trials);
  const double phat = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (phat + z2 / (2.0 * n)) / denom;
  const double half =
      z * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n)) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

double chi_square_pvalue(double stat, double dof) {
  if (dof <= 0.0) throw std::invalid_argument("chi_square_pvalue: dof <= 0");
  if (stat < 0.0) throw std::invalid_argument("chi_square_pvalue: negative stat");
  const boost::math::chi_squared_distribution<double> dist(dof);
  return boost::math::cdf(boost::math::complement(dist, stat));
}

}  // namespace pvd
