#pragma once

#include <complex>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <iosfwd>
#include <limits>
#include <span>
#include <utility>
#include <vector>

namespace paraboloid {

using Amplitude = std::complex<double>;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// A point of Z^n.
class LatticePoint {
 public:
  LatticePoint() = default;
  explicit LatticePoint(std::vector<std::int64_t> coords) : coords_(std::move(coords)) {}
  LatticePoint(std::initializer_list<std::int64_t> coords) : coords_(coords) {}

  static LatticePoint origin(std::size_t dim) { return LatticePoint(std::vector<std::int64_t>(dim, 0)); }

  std::size_t dim() const { return coords_.size(); }
  std::int64_t operator[](std::size_t i) const { return coords_[i]; }
  std::int64_t& operator[](std::size_t i) { return coords_[i]; }
  std::span<const std::int64_t> coords() const { return coords_; }

  friend LatticePoint operator+(const LatticePoint& a, const LatticePoint& b);
  friend LatticePoint operator-(const LatticePoint& a, const LatticePoint& b);
  friend LatticePoint operator-(const LatticePoint& a);
  friend auto operator<=>(const LatticePoint&, const LatticePoint&) = default;
  friend bool operator==(const LatticePoint&, const LatticePoint&) = default;

 private:
  std::vector<std::int64_t> coords_;
};

struct AxisRange {
  std::int64_t lo = 0;
  std::int64_t hi = -1;  // inclusive; hi < lo means empty

  bool empty() const { return hi < lo; }
  std::int64_t length() const { return empty() ? 0 : hi - lo + 1; }
  bool contains(std::int64_t x) const { return lo <= x && x <= hi; }
  friend bool operator==(const AxisRange&, const AxisRange&) = default;
};

/// Axis-aligned box of Z^n with inclusive per-axis ranges.
class Box {
 public:
  Box() = default;
  explicit Box(std::vector<AxisRange> axes) : axes_(std::move(axes)) {}

  std::size_t dim() const { return axes_.size(); }
  const AxisRange& axis(std::size_t i) const { return axes_[i]; }
  std::span<const AxisRange> axes() const { return axes_; }
  bool empty() const;
  bool contains(const LatticePoint& p) const;
  // Number of points; throws CapacityError if it does not fit in int64.
  std::int64_t volume() const;
  // Row-major linear index (last axis fastest) of a contained point.
  std::int64_t linear_index(const LatticePoint& p) const;
  LatticePoint point_at(std::int64_t index) const;

  Box reflected() const;
  Box minkowski_sum(const Box& other) const;
  Box hull(const Box& other) const;

  friend bool operator==(const Box&, const Box&) = default;

 private:
  std::vector<AxisRange> axes_;
};

/// Finitely supported complex function on Z^n.
///
/// Either sparse (lexicographically sorted unique points) or dense (values
/// over a box, row-major). Values are immutable once constructed; every
/// operation returns a new function. Unstored points evaluate to exactly 0.
class LatticeFunction {
 public:
  enum class Storage { sparse, dense };

  struct Entry {
    LatticePoint point;
    Amplitude value;
  };

  LatticeFunction() = default;

  static LatticeFunction zero(std::size_t dim);
  // Duplicate points are summed, in input order.
  static LatticeFunction from_entries(std::size_t dim, std::vector<Entry> entries);
  static LatticeFunction from_dense(Box box, std::vector<Amplitude> values);

  std::size_t dim() const { return dim_; }
  Storage storage() const { return storage_; }
  // Bounding box of the stored points (the dense box for dense storage).
  const Box& support_box() const { return box_; }
  // Number of stored amplitudes (may include explicit zeros).
  std::size_t stored_size() const { return values_.size(); }
  bool is_zero() const;

  Amplitude operator()(const LatticePoint& p) const;

  // Calls fn(point, value) for every stored amplitude, in lexicographic order.
  template <typename Fn>
  void for_each(Fn&& fn) const {
    if (storage_ == Storage::sparse) {
      LatticePoint p = LatticePoint::origin(dim_);
      for (std::size_t i = 0; i < values_.size(); ++i) {
        for (std::size_t d = 0; d < dim_; ++d) p[d] = coords_[i * dim_ + d];
        fn(static_cast<const LatticePoint&>(p), values_[i]);
      }
    } else {
      for (std::size_t i = 0; i < values_.size(); ++i) {
        fn(box_.point_at(static_cast<std::int64_t>(i)), values_[i]);
      }
    }
  }

  // Nonzero entries in lexicographic order.
  std::vector<Entry> entries() const;
  std::span<const Amplitude> stored_values() const { return values_; }

  LatticeFunction to_sparse() const;
  // Throws CapacityError when the bounding box is too large.
  LatticeFunction to_dense() const;

  LatticeFunction scaled(Amplitude factor) const;
  // Divides every amplitude (exact when the quotient is representable).
  LatticeFunction divided(double divisor) const;
  // g(x) = f(x - shift), i.e. the support moves by +shift.
  LatticeFunction translated(const LatticePoint& shift) const;
  friend LatticeFunction operator+(const LatticeFunction& f, const LatticeFunction& g);

 private:
  std::size_t dim_ = 0;
  Storage storage_ = Storage::sparse;
  Box box_;
  std::vector<std::int64_t> coords_;  // sparse only: flat, dim_ per entry
  std::vector<Amplitude> values_;
};

LatticeFunction delta(const LatticePoint& point);

// Indicator of the product of ranges [lo_i, hi_i]. Throws DomainError when
// lo_i > hi_i for some axis or the lengths differ.
LatticeFunction box_indicator(const LatticePoint& lo, const LatticePoint& hi);

// Sum of |f|^p, p in [1, inf). Integer-valued amplitudes with p in {1, 2} are
// accumulated exactly in integer arithmetic.
double lp_power_sum(const LatticeFunction& f, double p);

// (sum |f|^p)^(1/p), or sup |f| for p = kInfinity. Throws DomainError for p < 1.
double lp_norm(const LatticeFunction& f, double p);

enum class ConvolutionStrategy { automatic, direct, fft };

// (f * g)(x) = sum_y f(y) g(x - y). The direct path sums sparse pairs; the FFT
// path zero-pads the Minkowski-sum box to a power of two per axis. Throws
// DomainError on dimension mismatch and CapacityError on box overflow.
LatticeFunction convolve(const LatticeFunction& f, const LatticeFunction& g,
                         ConvolutionStrategy strategy = ConvolutionStrategy::automatic);

// Rf(x) = f(-x).
LatticeFunction reflect(const LatticeFunction& f);

// Maximum |f(x) - g(x)| over the union of stored points.
double max_abs_difference(const LatticeFunction& f, const LatticeFunction& g);

// Sparse text format: a header line `dim n` followed by one line per stored
// point, `x_1 ... x_n re im`, using shortest round-trip decimal doubles.
void write_sparse_text(std::ostream& out, const LatticeFunction& f);
// Throws DomainError on malformed input.
LatticeFunction read_sparse_text(std::istream& in);

}  // namespace paraboloid
