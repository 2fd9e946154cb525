#include "herm/herm_complex.hpp"

namespace herm {

namespace {
const HermSpace kZeroSpace{};
}

HermComplex::HermComplex(std::map<int, HermSpace> spaces, std::map<int, Mat> diffs)
    : spaces_(std::move(spaces)), diffs_(std::move(diffs)) {
  prune();
}

void HermComplex::prune() {
  for (auto it = spaces_.begin(); it != spaces_.end();)
    it = (it->second.dim() == 0) ? spaces_.erase(it) : std::next(it);
  for (auto it = diffs_.begin(); it != diffs_.end();) {
    if (dim(it->first) == 0 || dim(it->first + 1) == 0 || it->second.size() == 0)
      it = diffs_.erase(it);
    else
      ++it;
  }
}

HermComplex HermComplex::concentrated(const HermSpace& v, int degree) {
  if (v.dim() == 0) return {};
  return HermComplex({{degree, v}}, {});
}

HermComplex HermComplex::generator(double a) {
  Mat d(1, 1);
  d(0, 0) = std::exp(a);
  return HermComplex({{0, HermSpace::standard(1)}, {1, HermSpace::standard(1)}},
                     {{0, d}});
}

int HermComplex::total_dim() const {
  int n = 0;
  for (auto& [i, v] : spaces_) n += v.dim();
  return n;
}

const HermSpace& HermComplex::space(int i) const {
  auto it = spaces_.find(i);
  return it == spaces_.end() ? kZeroSpace : it->second;
}

Mat HermComplex::diff(int i) const {
  auto it = diffs_.find(i);
  if (it != diffs_.end()) return it->second;
  return Mat::Zero(dim(i + 1), dim(i));
}

std::vector<int> HermComplex::degrees() const {
  std::vector<int> out;
  out.reserve(spaces_.size());
  for (auto& [i, v] : spaces_) out.push_back(i);
  return out;
}

std::string HermComplex::check(const Tol& tol) const {
  for (auto& [i, v] : spaces_) {
    std::string err = v.check(tol);
    if (!err.empty()) return "degree " + std::to_string(i) + ": " + err;
  }
  for (auto& [i, d] : diffs_) {
    if (d.rows() != dim(i + 1) || d.cols() != dim(i))
      return "differential at degree " + std::to_string(i) + " has wrong shape";
    if (!d.allFinite()) return "differential at degree " + std::to_string(i) + " not finite";
  }
  for (auto& [i, d] : diffs_) {
    Mat next = diff(i + 1);
    if (next.rows() == 0 || d.rows() == 0) continue;
    double scale = next.norm() * d.norm();
    if (rel_fro(next * d, scale) > tol.chain)
      return "d∘d != 0 between degrees " + std::to_string(i) + " and " + std::to_string(i + 2);
  }
  return {};
}

bool HermComplex::isometric_equal(const HermComplex& o, double tol) const {
  if (degrees() != o.degrees()) return false;
  for (int i : degrees()) {
    if (dim(i) != o.dim(i)) return false;
    double gs = std::max(1.0, space(i).gram().norm());
    if ((space(i).gram() - o.space(i).gram()).norm() > tol * gs) return false;
    double ds = std::max(1.0, diff(i).norm());
    if ((diff(i) - o.diff(i)).norm() > tol * ds) return false;
  }
  return true;
}

Mat ChainMap::at(int i) const {
  auto it = maps.find(i);
  if (it != maps.end()) return it->second;
  return Mat::Zero(target.dim(i), source.dim(i));
}

std::string ChainMap::check(const Tol& tol) const {
  for (auto& [i, m] : maps)
    if (m.rows() != target.dim(i) || m.cols() != source.dim(i))
      return "component at degree " + std::to_string(i) + " has wrong shape";
  int lo = std::min(source.lo(), target.lo());
  int hi = std::max(source.hi(), target.hi());
  for (int i = lo; i <= hi; ++i) {
    Mat lhs = target.diff(i) * at(i);
    Mat rhs = at(i + 1) * source.diff(i);
    if (lhs.rows() == 0 || lhs.cols() == 0) continue;
    double scale = std::max(lhs.norm(), rhs.norm());
    if (rel_fro(lhs - rhs, scale) > tol.chain)
      return "does not commute with d at degree " + std::to_string(i);
  }
  return {};
}

ChainMap ChainMap::identity(const HermComplex& c) {
  ChainMap f{c, c, {}};
  for (int i : c.degrees()) f.maps[i] = Mat::Identity(c.dim(i), c.dim(i));
  return f;
}

ChainMap ChainMap::zero(const HermComplex& src, const HermComplex& tgt) {
  return ChainMap{src, tgt, {}};
}

Mat Homotopy::at(int i) const {
  auto it = maps.find(i);
  if (it != maps.end()) return it->second;
  return Mat::Zero(target.dim(i - 1), source.dim(i));
}

ChainMap Homotopy::boundary() const {
  ChainMap f{source, target, {}};
  int lo = std::min(source.lo(), target.lo());
  int hi = std::max(source.hi(), target.hi());
  for (int i = lo; i <= hi; ++i) {
    if (target.dim(i) == 0 || source.dim(i) == 0) continue;
    f.maps[i] = target.diff(i - 1) * at(i) + at(i + 1) * source.diff(i);
  }
  return f;
}

ChainMap compose(const ChainMap& g, const ChainMap& f) {
  ChainMap out{f.source, g.target, {}};
  int lo = std::min(f.source.lo(), g.target.lo());
  int hi = std::max(f.source.hi(), g.target.hi());
  for (int i = lo; i <= hi; ++i) {
    if (out.target.dim(i) == 0 || out.source.dim(i) == 0) continue;
    out.maps[i] = g.at(i) * f.at(i);
  }
  return out;
}

ChainMap add(const ChainMap& f, const ChainMap& g) {
  ChainMap out{f.source, f.target, {}};
  int lo = std::min(f.source.lo(), f.target.lo());
  int hi = std::max(f.source.hi(), f.target.hi());
  for (int i = lo; i <= hi; ++i) {
    if (f.target.dim(i) == 0 || f.source.dim(i) == 0) continue;
    out.maps[i] = f.at(i) + g.at(i);
  }
  return out;
}

ChainMap scale(const cplx& c, const ChainMap& f) {
  ChainMap out = f;
  for (auto& [i, m] : out.maps) m *= c;
  return out;
}

int DoubleComplex::dim(int p, int q) const {
  auto it = spaces.find({p, q});
  return it == spaces.end() ? 0 : it->second.dim();
}

const HermSpace& DoubleComplex::space(int p, int q) const {
  auto it = spaces.find({p, q});
  return it == spaces.end() ? kZeroSpace : it->second;
}

Mat DoubleComplex::dh_at(int p, int q) const {
  auto it = dh.find({p, q});
  if (it != dh.end()) return it->second;
  return Mat::Zero(dim(p + 1, q), dim(p, q));
}

Mat DoubleComplex::dv_at(int p, int q) const {
  auto it = dv.find({p, q});
  if (it != dv.end()) return it->second;
  return Mat::Zero(dim(p, q + 1), dim(p, q));
}

std::string DoubleComplex::check(const Tol& tol) const {
  for (auto& [pq, v] : spaces) {
    std::string err = v.check(tol);
    if (!err.empty()) return "entry: " + err;
  }
  for (auto& [pq, m] : dh)
    if (m.rows() != dim(pq.first + 1, pq.second) || m.cols() != dim(pq.first, pq.second))
      return "dh shape mismatch";
  for (auto& [pq, m] : dv)
    if (m.rows() != dim(pq.first, pq.second + 1) || m.cols() != dim(pq.first, pq.second))
      return "dv shape mismatch";
  for (auto& [pq, v] : spaces) {
    auto [p, q] = pq;
    Mat hh = dh_at(p + 1, q) * dh_at(p, q);
    if (hh.size() && rel_fro(hh, std::max(1.0, dh_at(p + 1, q).norm() * dh_at(p, q).norm())) > tol.chain)
      return "dh∘dh != 0";
    Mat vv = dv_at(p, q + 1) * dv_at(p, q);
    if (vv.size() && rel_fro(vv, std::max(1.0, dv_at(p, q + 1).norm() * dv_at(p, q).norm())) > tol.chain)
      return "dv∘dv != 0";
    Mat sq = dv_at(p + 1, q) * dh_at(p, q) - dh_at(p, q + 1) * dv_at(p, q);
    if (sq.size() && rel_fro(sq, 1.0) > tol.chain) return "squares do not commute";
  }
  return {};
}

std::vector<int> DoubleComplex::p_range() const {
  std::vector<int> out;
  for (auto& [pq, v] : spaces)
    if (v.dim() > 0 && (out.empty() || out.back() != pq.first)) out.push_back(pq.first);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<int> DoubleComplex::q_range() const {
  std::vector<int> out;
  for (auto& [pq, v] : spaces)
    if (v.dim() > 0) out.push_back(pq.second);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

HermComplex DoubleComplex::row(int q) const {
  std::map<int, HermSpace> sp;
  std::map<int, Mat> df;
  for (auto& [pq, v] : spaces)
    if (pq.second == q && v.dim() > 0) sp[pq.first] = v;
  for (auto& [p, v] : sp)
    if (dim(p + 1, q) > 0) df[p] = dh_at(p, q);
  return HermComplex(std::move(sp), std::move(df));
}

HermComplex DoubleComplex::column(int p) const {
  std::map<int, HermSpace> sp;
  std::map<int, Mat> df;
  for (auto& [pq, v] : spaces)
    if (pq.first == p && v.dim() > 0) sp[pq.second] = v;
  for (auto& [q, v] : sp)
    if (dim(p, q + 1) > 0) df[q] = dv_at(p, q);
  return HermComplex(std::move(sp), std::move(df));
}

DoubleComplex DoubleComplex::transpose() const {
  DoubleComplex t;
  for (auto& [pq, v] : spaces) t.spaces[{pq.second, pq.first}] = v;
  for (auto& [pq, m] : dh) t.dv[{pq.second, pq.first}] = m;
  for (auto& [pq, m] : dv) t.dh[{pq.second, pq.first}] = m;
  return t;
}

}  // namespace herm
