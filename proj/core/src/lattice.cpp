#include "paraboloid/lattice.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numeric>
#include <string>

#include "paraboloid/errors.hpp"

namespace paraboloid {
namespace {
__extension__ using uint128 = unsigned __int128;

constexpr std::int64_t kMaxDenseElements = std::int64_t{1} << 26;

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t out = 0;
  if (__builtin_mul_overflow(a, b, &out)) throw CapacityError("lattice box volume overflows int64");
  return out;
}

std::int64_t next_pow2(std::int64_t x) {
  std::int64_t p = 1;
  while (p < x) p <<= 1;
  return p;
}

void require_same_dim(const LatticeFunction& f, const LatticeFunction& g) {
  if (f.dim() != g.dim()) {
    throw DomainError("dimension mismatch: " + std::to_string(f.dim()) + " vs " + std::to_string(g.dim()));
  }
}

// Flat coordinates + values of the nonzero amplitudes.
struct FlatEntries {
  std::vector<std::int64_t> coords;
  std::vector<Amplitude> values;
};

FlatEntries flatten_nonzero(const LatticeFunction& f) {
  FlatEntries out;
  f.for_each([&](const LatticePoint& p, Amplitude v) {
    if (v == Amplitude{}) return;
    out.coords.insert(out.coords.end(), p.coords().begin(), p.coords().end());
    out.values.push_back(v);
  });
  return out;
}

// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double result() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

bool is_small_integer(Amplitude v) {
  constexpr double kLimit = 2147483648.0;  // 2^31: squares stay exact in 128-bit sums
  return v.imag() == 0.0 && std::abs(v.real()) <= kLimit && std::trunc(v.real()) == v.real();
}

std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwBuffer {
  explicit FftwBuffer(std::size_t n)
      : data(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n))), size(n) {
    if (data == nullptr) throw CapacityError("fftw_malloc failed");
    std::fill_n(reinterpret_cast<double*>(data), 2 * n, 0.0);
  }
  ~FftwBuffer() { fftw_free(data); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;

  fftw_complex* data;
  std::size_t size;
};

class FftwPlan {
 public:
  FftwPlan(const std::vector<int>& dims, FftwBuffer& buffer, int sign) {
    std::lock_guard lock(fftw_planner_mutex());
    plan_ = fftw_plan_dft(static_cast<int>(dims.size()), dims.data(), buffer.data, buffer.data, sign,
                          FFTW_ESTIMATE);
    if (plan_ == nullptr) throw CapacityError("fftw_plan_dft failed");
  }
  ~FftwPlan() {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(plan_);
  }
  FftwPlan(const FftwPlan&) = delete;
  FftwPlan& operator=(const FftwPlan&) = delete;

  void execute() const { fftw_execute(plan_); }

 private:
  fftw_plan plan_ = nullptr;
};

LatticeFunction convolve_direct(const LatticeFunction& f, const LatticeFunction& g) {
  const std::size_t dim = f.dim();
  const FlatEntries fe = flatten_nonzero(f);
  const FlatEntries ge = flatten_nonzero(g);
  if (fe.values.empty() || ge.values.empty()) return LatticeFunction::zero(dim);

  Box fb = f.support_box();
  Box gb = g.support_box();
  const Box out_box = fb.minkowski_sum(gb);
  const std::int64_t volume = out_box.volume();
  const auto pairs = static_cast<std::int64_t>(fe.values.size()) * static_cast<std::int64_t>(ge.values.size());

  std::vector<std::int64_t> strides(dim, 1);
  for (std::size_t d = dim; d-- > 1;) strides[d - 1] = checked_mul(strides[d], out_box.axis(d).length());

  auto key_of = [&](std::size_t i, std::size_t j) {
    std::int64_t key = 0;
    for (std::size_t d = 0; d < dim; ++d) {
      key += (fe.coords[i * dim + d] + ge.coords[j * dim + d] - out_box.axis(d).lo) * strides[d];
    }
    return key;
  };

  std::vector<std::pair<std::int64_t, Amplitude>> merged;
  if (volume <= std::max<std::int64_t>(4 * pairs, std::int64_t{1} << 16) && volume <= kMaxDenseElements) {
    std::vector<Amplitude> acc(static_cast<std::size_t>(volume));
    std::vector<unsigned char> touched(static_cast<std::size_t>(volume), 0);
    for (std::size_t i = 0; i < fe.values.size(); ++i) {
      for (std::size_t j = 0; j < ge.values.size(); ++j) {
        const auto k = static_cast<std::size_t>(key_of(i, j));
        acc[k] += fe.values[i] * ge.values[j];
        touched[k] = 1;
      }
    }
    for (std::size_t k = 0; k < acc.size(); ++k) {
      if (touched[k]) merged.emplace_back(static_cast<std::int64_t>(k), acc[k]);
    }
  } else {
    std::vector<std::pair<std::int64_t, Amplitude>> terms;
    terms.reserve(static_cast<std::size_t>(pairs));
    for (std::size_t i = 0; i < fe.values.size(); ++i) {
      for (std::size_t j = 0; j < ge.values.size(); ++j) {
        terms.emplace_back(key_of(i, j), fe.values[i] * ge.values[j]);
      }
    }
    std::stable_sort(terms.begin(), terms.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (const auto& [key, v] : terms) {
      if (!merged.empty() && merged.back().first == key) {
        merged.back().second += v;
      } else {
        merged.emplace_back(key, v);
      }
    }
  }

  std::vector<LatticeFunction::Entry> entries;
  entries.reserve(merged.size());
  for (const auto& [key, v] : merged) entries.push_back({out_box.point_at(key), v});
  return LatticeFunction::from_entries(dim, std::move(entries));
}

LatticeFunction convolve_fft(const LatticeFunction& f, const LatticeFunction& g) {
  const std::size_t dim = f.dim();
  if (f.is_zero() || g.is_zero()) return LatticeFunction::zero(dim);
  const Box& fb = f.support_box();
  const Box& gb = g.support_box();
  const Box out_box = fb.minkowski_sum(gb);

  std::vector<int> dims(dim);
  std::int64_t total = 1;
  for (std::size_t d = 0; d < dim; ++d) {
    const std::int64_t padded = next_pow2(out_box.axis(d).length());
    if (padded > (std::int64_t{1} << 30)) throw CapacityError("FFT axis too long");
    dims[d] = static_cast<int>(padded);
    total = checked_mul(total, padded);
  }
  if (total > kMaxDenseElements) throw CapacityError("FFT convolution box exceeds the dense element cap");

  std::vector<std::int64_t> strides(dim, 1);
  for (std::size_t d = dim; d-- > 1;) strides[d - 1] = strides[d] * dims[d];

  auto scatter = [&](const LatticeFunction& h, const Box& hb, FftwBuffer& buf) {
    h.for_each([&](const LatticePoint& p, Amplitude v) {
      std::int64_t idx = 0;
      for (std::size_t d = 0; d < dim; ++d) idx += (p[d] - hb.axis(d).lo) * strides[d];
      buf.data[idx][0] += v.real();
      buf.data[idx][1] += v.imag();
    });
  };

  const auto n = static_cast<std::size_t>(total);
  FftwBuffer a(n);
  FftwBuffer b(n);
  scatter(f, fb, a);
  scatter(g, gb, b);
  {
    FftwPlan pa(dims, a, FFTW_FORWARD);
    FftwPlan pb(dims, b, FFTW_FORWARD);
    pa.execute();
    pb.execute();
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double re = a.data[i][0] * b.data[i][0] - a.data[i][1] * b.data[i][1];
    const double im = a.data[i][0] * b.data[i][1] + a.data[i][1] * b.data[i][0];
    a.data[i][0] = re;
    a.data[i][1] = im;
  }
  {
    FftwPlan inverse(dims, a, FFTW_BACKWARD);
    inverse.execute();
  }

  const double scale = 1.0 / static_cast<double>(total);
  const std::int64_t out_volume = out_box.volume();
  std::vector<Amplitude> values(static_cast<std::size_t>(out_volume));
  for (std::int64_t k = 0; k < out_volume; ++k) {
    const LatticePoint p = out_box.point_at(k);
    std::int64_t idx = 0;
    for (std::size_t d = 0; d < dim; ++d) idx += (p[d] - out_box.axis(d).lo) * strides[d];
    values[static_cast<std::size_t>(k)] = Amplitude(a.data[idx][0], a.data[idx][1]) * scale;
  }
  return LatticeFunction::from_dense(out_box, std::move(values));
}

}  // namespace

LatticePoint operator+(const LatticePoint& a, const LatticePoint& b) {
  if (a.dim() != b.dim()) throw DomainError("lattice point dimension mismatch");
  LatticePoint out = a;
  for (std::size_t i = 0; i < a.dim(); ++i) out[i] += b[i];
  return out;
}

LatticePoint operator-(const LatticePoint& a, const LatticePoint& b) {
  if (a.dim() != b.dim()) throw DomainError("lattice point dimension mismatch");
  LatticePoint out = a;
  for (std::size_t i = 0; i < a.dim(); ++i) out[i] -= b[i];
  return out;
}

LatticePoint operator-(const LatticePoint& a) {
  LatticePoint out = a;
  for (std::size_t i = 0; i < a.dim(); ++i) out[i] = -out[i];
  return out;
}

bool Box::empty() const {
  return std::any_of(axes_.begin(), axes_.end(), [](const AxisRange& r) { return r.empty(); });
}

bool Box::contains(const LatticePoint& p) const {
  if (p.dim() != dim()) return false;
  for (std::size_t i = 0; i < dim(); ++i) {
    if (!axes_[i].contains(p[i])) return false;
  }
  return true;
}

std::int64_t Box::volume() const {
  if (axes_.empty() || empty()) return 0;
  std::int64_t v = 1;
  for (const auto& r : axes_) v = checked_mul(v, r.length());
  return v;
}

std::int64_t Box::linear_index(const LatticePoint& p) const {
  std::int64_t idx = 0;
  for (std::size_t i = 0; i < dim(); ++i) idx = idx * axes_[i].length() + (p[i] - axes_[i].lo);
  return idx;
}

LatticePoint Box::point_at(std::int64_t index) const {
  LatticePoint p = LatticePoint::origin(dim());
  for (std::size_t i = dim(); i-- > 0;) {
    const std::int64_t len = axes_[i].length();
    p[i] = axes_[i].lo + index % len;
    index /= len;
  }
  return p;
}

Box Box::reflected() const {
  std::vector<AxisRange> out(axes_.size());
  for (std::size_t i = 0; i < axes_.size(); ++i) out[i] = {-axes_[i].hi, -axes_[i].lo};
  return Box(std::move(out));
}

Box Box::minkowski_sum(const Box& other) const {
  if (other.dim() != dim()) throw DomainError("box dimension mismatch");
  std::vector<AxisRange> out(axes_.size());
  for (std::size_t i = 0; i < axes_.size(); ++i) {
    out[i] = {axes_[i].lo + other.axes_[i].lo, axes_[i].hi + other.axes_[i].hi};
  }
  return Box(std::move(out));
}

Box Box::hull(const Box& other) const {
  if (other.dim() != dim()) throw DomainError("box dimension mismatch");
  if (empty()) return other;
  if (other.empty()) return *this;
  std::vector<AxisRange> out(axes_.size());
  for (std::size_t i = 0; i < axes_.size(); ++i) {
    out[i] = {std::min(axes_[i].lo, other.axes_[i].lo), std::max(axes_[i].hi, other.axes_[i].hi)};
  }
  return Box(std::move(out));
}

LatticeFunction LatticeFunction::zero(std::size_t dim) {
  LatticeFunction f;
  f.dim_ = dim;
  f.box_ = Box(std::vector<AxisRange>(dim));
  return f;
}

LatticeFunction LatticeFunction::from_entries(std::size_t dim, std::vector<Entry> entries) {
  for (const auto& e : entries) {
    if (e.point.dim() != dim) throw DomainError("entry dimension does not match function dimension");
  }
  std::vector<std::size_t> order(entries.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return entries[a].point < entries[b].point; });

  LatticeFunction f = zero(dim);
  std::vector<AxisRange> axes(dim, AxisRange{std::numeric_limits<std::int64_t>::max(),
                                             std::numeric_limits<std::int64_t>::min()});
  for (std::size_t idx : order) {
    const Entry& e = entries[idx];
    const std::size_t n = f.values_.size();
    if (n > 0 && std::equal(e.point.coords().begin(), e.point.coords().end(), f.coords_.end() - dim)) {
      f.values_.back() += e.value;
      continue;
    }
    f.coords_.insert(f.coords_.end(), e.point.coords().begin(), e.point.coords().end());
    f.values_.push_back(e.value);
    for (std::size_t d = 0; d < dim; ++d) {
      axes[d].lo = std::min(axes[d].lo, e.point[d]);
      axes[d].hi = std::max(axes[d].hi, e.point[d]);
    }
  }
  if (!f.values_.empty()) f.box_ = Box(std::move(axes));
  return f;
}

LatticeFunction LatticeFunction::from_dense(Box box, std::vector<Amplitude> values) {
  if (box.volume() != static_cast<std::int64_t>(values.size())) {
    throw DomainError("dense value count does not match box volume");
  }
  LatticeFunction f;
  f.dim_ = box.dim();
  f.storage_ = Storage::dense;
  f.box_ = std::move(box);
  f.values_ = std::move(values);
  return f;
}

bool LatticeFunction::is_zero() const {
  return std::all_of(values_.begin(), values_.end(), [](Amplitude v) { return v == Amplitude{}; });
}

Amplitude LatticeFunction::operator()(const LatticePoint& p) const {
  if (p.dim() != dim_) throw DomainError("evaluation point has wrong dimension");
  if (values_.empty() || !box_.contains(p)) return {};
  if (storage_ == Storage::dense) return values_[static_cast<std::size_t>(box_.linear_index(p))];

  std::size_t lo = 0;
  std::size_t hi = values_.size();
  const auto key = p.coords();
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    const auto* c = coords_.data() + mid * dim_;
    if (std::lexicographical_compare(c, c + dim_, key.begin(), key.end())) {
      lo = mid + 1;
    } else {
      hi = mid;
    }
  }
  if (lo < values_.size() && std::equal(key.begin(), key.end(), coords_.data() + lo * dim_)) return values_[lo];
  return {};
}

std::vector<LatticeFunction::Entry> LatticeFunction::entries() const {
  std::vector<Entry> out;
  for_each([&](const LatticePoint& p, Amplitude v) {
    if (v != Amplitude{}) out.push_back({p, v});
  });
  return out;
}

LatticeFunction LatticeFunction::to_sparse() const {
  if (storage_ == Storage::sparse) return *this;
  return from_entries(dim_, entries());
}

LatticeFunction LatticeFunction::to_dense() const {
  if (storage_ == Storage::dense) return *this;
  if (values_.empty()) return from_dense(Box(std::vector<AxisRange>(dim_, AxisRange{0, 0})), {Amplitude{}});
  const std::int64_t volume = box_.volume();
  if (volume > kMaxDenseElements) throw CapacityError("support box too large for dense storage");
  std::vector<Amplitude> values(static_cast<std::size_t>(volume));
  for_each([&](const LatticePoint& p, Amplitude v) { values[static_cast<std::size_t>(box_.linear_index(p))] = v; });
  return from_dense(box_, std::move(values));
}

LatticeFunction LatticeFunction::scaled(Amplitude factor) const {
  LatticeFunction out = *this;
  for (auto& v : out.values_) v *= factor;
  return out;
}

LatticeFunction LatticeFunction::divided(double divisor) const {
  LatticeFunction out = *this;
  for (auto& v : out.values_) v = Amplitude(v.real() / divisor, v.imag() / divisor);
  return out;
}

LatticeFunction LatticeFunction::translated(const LatticePoint& shift) const {
  if (shift.dim() != dim_) throw DomainError("shift has wrong dimension");
  LatticeFunction out = *this;
  if (values_.empty()) return out;
  std::vector<AxisRange> axes(box_.axes().begin(), box_.axes().end());
  for (std::size_t d = 0; d < dim_; ++d) {
    axes[d].lo += shift[d];
    axes[d].hi += shift[d];
  }
  out.box_ = Box(std::move(axes));
  if (storage_ == Storage::sparse) {
    for (std::size_t i = 0; i < out.values_.size(); ++i) {
      for (std::size_t d = 0; d < dim_; ++d) out.coords_[i * dim_ + d] += shift[d];
    }
  }
  return out;
}

LatticeFunction operator+(const LatticeFunction& f, const LatticeFunction& g) {
  require_same_dim(f, g);
  std::vector<LatticeFunction::Entry> all = f.entries();
  auto more = g.entries();
  all.insert(all.end(), std::make_move_iterator(more.begin()), std::make_move_iterator(more.end()));
  return LatticeFunction::from_entries(f.dim(), std::move(all));
}

LatticeFunction delta(const LatticePoint& point) {
  return LatticeFunction::from_entries(point.dim(), {{point, Amplitude{1.0, 0.0}}});
}

LatticeFunction box_indicator(const LatticePoint& lo, const LatticePoint& hi) {
  if (lo.dim() != hi.dim()) throw DomainError("box corners have different dimensions");
  std::vector<AxisRange> axes(lo.dim());
  for (std::size_t i = 0; i < lo.dim(); ++i) {
    if (lo[i] > hi[i]) throw DomainError("box_indicator requires lo <= hi on every axis");
    axes[i] = {lo[i], hi[i]};
  }
  Box box(std::move(axes));
  const std::int64_t volume = box.volume();
  if (volume > kMaxDenseElements) throw CapacityError("box indicator too large");
  return LatticeFunction::from_dense(std::move(box),
                                     std::vector<Amplitude>(static_cast<std::size_t>(volume), Amplitude{1.0, 0.0}));
}

double lp_power_sum(const LatticeFunction& f, double p) {
  if (!(p >= 1.0) || std::isinf(p)) throw DomainError("lp_power_sum requires 1 <= p < inf");
  const auto values = f.stored_values();

  if ((p == 1.0 || p == 2.0) && std::all_of(values.begin(), values.end(), is_small_integer)) {
    uint128 acc = 0;
    for (Amplitude v : values) {
      const auto a = static_cast<uint128>(std::llabs(static_cast<long long>(v.real())));
      acc += (p == 1.0) ? a : a * a;
    }
    return static_cast<double>(static_cast<long double>(acc));
  }

  std::vector<double> mags;
  mags.reserve(values.size());
  for (Amplitude v : values) {
    if (v != Amplitude{}) mags.push_back(std::abs(v));
  }
  std::sort(mags.begin(), mags.end());
  CompensatedSum sum;
  for (std::size_t i = 0; i < mags.size();) {
    std::size_t j = i;
    while (j < mags.size() && mags[j] == mags[i]) ++j;
    const double power = (p == 1.0) ? mags[i] : (p == 2.0 ? mags[i] * mags[i] : std::pow(mags[i], p));
    sum.add(static_cast<double>(j - i) * power);
    i = j;
  }
  return sum.result();
}

double lp_norm(const LatticeFunction& f, double p) {
  if (!(p >= 1.0)) throw DomainError("lp_norm requires p >= 1");
  if (std::isinf(p)) {
    double m = 0.0;
    for (Amplitude v : f.stored_values()) m = std::max(m, std::abs(v));
    return m;
  }
  const double s = lp_power_sum(f, p);
  if (p == 1.0) return s;
  if (p == 2.0) return std::sqrt(s);
  return std::pow(s, 1.0 / p);
}

LatticeFunction convolve(const LatticeFunction& f, const LatticeFunction& g, ConvolutionStrategy strategy) {
  require_same_dim(f, g);
  if (strategy == ConvolutionStrategy::automatic) {
    if (f.is_zero() || g.is_zero()) return LatticeFunction::zero(f.dim());
    const double pairs = static_cast<double>(f.stored_size()) * static_cast<double>(g.stored_size());
    double padded = 1.0;
    const Box box = f.support_box().minkowski_sum(g.support_box());
    for (std::size_t d = 0; d < box.dim(); ++d) padded *= static_cast<double>(next_pow2(box.axis(d).length()));
    const double fft_cost = 6.0 * padded * std::max(1.0, std::log2(padded));
    strategy = (pairs <= fft_cost || padded > static_cast<double>(kMaxDenseElements)) ? ConvolutionStrategy::direct
                                                                                      : ConvolutionStrategy::fft;
  }
  return strategy == ConvolutionStrategy::fft ? convolve_fft(f, g) : convolve_direct(f, g);
}

LatticeFunction reflect(const LatticeFunction& f) {
  if (f.storage() == LatticeFunction::Storage::dense) {
    std::vector<Amplitude> values(f.stored_values().rbegin(), f.stored_values().rend());
    return LatticeFunction::from_dense(f.support_box().reflected(), std::move(values));
  }
  std::vector<LatticeFunction::Entry> entries;
  entries.reserve(f.stored_size());
  f.for_each([&](const LatticePoint& p, Amplitude v) { entries.push_back({-p, v}); });
  return LatticeFunction::from_entries(f.dim(), std::move(entries));
}

double max_abs_difference(const LatticeFunction& f, const LatticeFunction& g) {
  require_same_dim(f, g);
  double m = 0.0;
  f.for_each([&](const LatticePoint& p, Amplitude v) { m = std::max(m, std::abs(v - g(p))); });
  g.for_each([&](const LatticePoint& p, Amplitude v) { m = std::max(m, std::abs(f(p) - v)); });
  return m;
}

}  // namespace paraboloid
