#pragma once

#include "onebit/real_expansion.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace onebit {

enum class Modulation { Psk, Qam };

/// Two basis-aligned components of a symbol: s = a + b with a and b parallel
/// to the two detection boundaries of s.
struct SymbolDecomposition {
  Complex a;
  Complex b;
};

namespace detail {

inline unsigned gray_encode(unsigned v) { return v ^ (v >> 1); }

inline unsigned gray_decode(unsigned g) {
  unsigned v = 0;
  for (; g != 0; g >>= 1) v ^= g;
  return v;
}

inline int log2_exact(int order) {
  int bits = 0;
  while ((1 << bits) < order) ++bits;
  if ((1 << bits) != order) throw std::invalid_argument("constellation order must be a power of two");
  return bits;
}

}  // namespace detail

/// PSK or square QAM alphabet with Gray labels. Point i carries the label i,
/// i.e. points() is indexed by the integer value of the bit label.
class Constellation {
 public:
  static Constellation psk(int order) {
    if (order < 2) throw std::invalid_argument("PSK order must be >= 2");
    Constellation c(Modulation::Psk, order);
    const double pi = std::numbers::pi;
    for (int label = 0; label < order; ++label) {
      const unsigned pos = detail::gray_decode(static_cast<unsigned>(label));
      const double angle = pi / order + 2.0 * pi * pos / order;
      c.points_[label] = std::polar(1.0, angle);
      c.angle_index_[label] = static_cast<int>(pos);
    }
    return c;
  }

  static Constellation qam(int order) {
    const int bits = detail::log2_exact(order);
    if (bits % 2 != 0 || order < 4) throw std::invalid_argument("QAM order must be a square power of two");
    Constellation c(Modulation::Qam, order);
    const int axis_bits = bits / 2;
    const int levels = 1 << axis_bits;
    // Unit average energy: E|s|^2 = 2(M-1)/3 on the odd-integer grid.
    c.qam_norm_ = 1.0 / std::sqrt(2.0 * (order - 1) / 3.0);
    for (int label = 0; label < order; ++label) {
      const unsigned li = static_cast<unsigned>(label) >> axis_bits;
      const unsigned lq = static_cast<unsigned>(label) & static_cast<unsigned>(levels - 1);
      const double re = 2.0 * detail::gray_decode(li) - (levels - 1);
      const double im = 2.0 * detail::gray_decode(lq) - (levels - 1);
      c.points_[label] = Complex(re * c.qam_norm_, im * c.qam_norm_);
    }
    c.max_axis_ = (levels - 1) * c.qam_norm_;
    return c;
  }

  /// Accepts names such as "qpsk", "8psk", "16psk", "16qam", "64qam".
  static Constellation parse(std::string_view name) {
    std::string n(name);
    std::transform(n.begin(), n.end(), n.begin(), [](unsigned char ch) { return std::tolower(ch); });
    if (n == "qpsk" || n == "4psk") return psk(4);
    if (n == "bpsk") return psk(2);
    auto numeric_prefix = [&](std::string_view suffix) -> int {
      if (n.size() <= suffix.size() || n.substr(n.size() - suffix.size()) != suffix) return -1;
      const std::string digits = n.substr(0, n.size() - suffix.size());
      if (!std::all_of(digits.begin(), digits.end(), [](unsigned char ch) { return std::isdigit(ch); })) return -1;
      return std::stoi(digits);
    };
    if (int m = numeric_prefix("psk"); m > 0) return psk(m);
    if (int m = numeric_prefix("qam"); m > 0) return qam(m);
    throw std::invalid_argument("unknown modulation: " + std::string(name));
  }

  Modulation kind() const { return kind_; }
  int order() const { return order_; }
  int bits_per_symbol() const { return bits_; }
  const std::vector<Complex>& points() const { return points_; }
  Complex point(int index) const { return points_.at(static_cast<std::size_t>(index)); }

  std::string name() const {
    if (kind_ == Modulation::Psk) return order_ == 4 ? "qpsk" : std::to_string(order_) + "psk";
    return std::to_string(order_) + "qam";
  }

  /// Largest |Re| (equivalently |Im|) over a QAM alphabet.
  double max_axis_magnitude() const { return max_axis_; }

  /// Position of a PSK point on the circle (angle = pi/M + 2*pi*pos/M).
  int angle_index(int index) const { return angle_index_.at(static_cast<std::size_t>(index)); }

  /// Index of the alphabet point equal to s within tol; throws if none.
  int index_of(Complex s, double tol = 1e-9) const {
    for (int i = 0; i < order_; ++i) {
      if (std::abs(points_[i] - s) <= tol) return i;
    }
    throw std::invalid_argument("symbol is not on the constellation");
  }

 private:
  Constellation(Modulation kind, int order)
      : kind_(kind), order_(order), bits_(detail::log2_exact(order)),
        points_(static_cast<std::size_t>(order)), angle_index_(static_cast<std::size_t>(order), 0) {}

  Modulation kind_;
  int order_;
  int bits_;
  std::vector<Complex> points_;
  std::vector<int> angle_index_;
  double qam_norm_ = 1.0;
  double max_axis_ = 1.0;
};

/// Splits an M-PSK point at angle theta into a·e^{i(theta-pi/M)} + b·e^{i(theta+pi/M)}
/// by solving the 2x2 real system; a, b > 0.
inline SymbolDecomposition decompose_psk(Complex s, int order) {
  const double pi = std::numbers::pi;
  if (std::abs(std::abs(s) - 1.0) > 1e-9) throw std::invalid_argument("decompose_psk: symbol is not unit modulus");
  const double theta = std::arg(s);
  // Angle must be pi/M + 2*pi*k/M.
  const double pos = (theta - pi / order) * order / (2.0 * pi);
  if (std::abs(pos - std::round(pos)) * 2.0 * pi / order > 1e-9) {
    throw std::invalid_argument("decompose_psk: symbol angle is off the constellation");
  }
  const Complex u = std::polar(1.0, theta - pi / order);
  const Complex v = std::polar(1.0, theta + pi / order);
  const double det = u.real() * v.imag() - u.imag() * v.real();
  const double a = (s.real() * v.imag() - s.imag() * v.real()) / det;
  const double b = (u.real() * s.imag() - u.imag() * s.real()) / det;
  return {a * u, b * v};
}

inline SymbolDecomposition decompose_qam(Complex s) { return {Complex(s.real(), 0.0), Complex(0.0, s.imag())}; }

inline SymbolDecomposition decompose(Complex s, const Constellation& c) {
  if (c.kind() == Modulation::Psk) return decompose_psk(s, c.order());
  return decompose_qam(s);
}

/// Split of the 2K scaling coefficients [alpha_1^A..alpha_K^A, alpha_1^B..alpha_K^B]
/// into coordinates that may exploit CI (outer) and those pinned to the target (inner).
struct QamPartition {
  std::vector<int> outer;
  std::vector<int> inner;
  std::vector<bool> is_outer;  // size 2K
};

inline QamPartition partition_qam(const ComplexVector& s, const Constellation& c) {
  if (c.kind() != Modulation::Qam) throw std::invalid_argument("partition_qam: constellation is not QAM");
  const auto k = static_cast<int>(s.size());
  QamPartition p;
  p.is_outer.assign(static_cast<std::size_t>(2 * k), false);
  const double edge = c.max_axis_magnitude();
  for (int i = 0; i < k; ++i) {
    c.index_of(s[i]);
    p.is_outer[i] = std::abs(std::abs(s[i].real()) - edge) <= 1e-9;
    p.is_outer[k + i] = std::abs(std::abs(s[i].imag()) - edge) <= 1e-9;
  }
  for (int l = 0; l < 2 * k; ++l) (p.is_outer[l] ? p.outer : p.inner).push_back(l);
  return p;
}

struct Decision {
  int index;
  unsigned bits;
};

/// Hard decision. PSK: nearest phase. QAM: nearest point to beta·y.
/// Ties go to the lowest symbol index.
inline Decision demodulate(Complex y, const Constellation& c, double beta = 1.0) {
  const auto& pts = c.points();
  int best = 0;
  if (c.kind() == Modulation::Psk) {
    // Nearest phase == largest projection onto the unit point.
    double best_proj = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < c.order(); ++i) {
      const double proj = y.real() * pts[i].real() + y.imag() * pts[i].imag();
      if (proj > best_proj) {
        best_proj = proj;
        best = i;
      }
    }
  } else {
    if (!(beta > 0.0)) throw std::invalid_argument("demodulate: QAM requires beta > 0");
    const Complex r = beta * y;
    double best_d = std::numeric_limits<double>::infinity();
    for (int i = 0; i < c.order(); ++i) {
      const double d = std::norm(r - pts[i]);
      if (d < best_d) {
        best_d = d;
        best = i;
      }
    }
  }
  return {best, static_cast<unsigned>(best)};
}

/// Maps MSB-first groups of log2(M) bits (values 0/1) to symbols.
inline ComplexVector modulate(std::span<const std::uint8_t> bits, const Constellation& c) {
  const int bps = c.bits_per_symbol();
  if (bits.size() % static_cast<std::size_t>(bps) != 0) {
    throw std::invalid_argument("modulate: bit count is not a multiple of bits per symbol");
  }
  const auto n = static_cast<Eigen::Index>(bits.size() / static_cast<std::size_t>(bps));
  ComplexVector s(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    unsigned label = 0;
    for (int b = 0; b < bps; ++b) label = (label << 1) | (bits[static_cast<std::size_t>(k * bps + b)] & 1u);
    s[k] = c.point(static_cast<int>(label));
  }
  return s;
}

inline void append_bits(unsigned label, int bps, std::vector<std::uint8_t>& out) {
  for (int b = bps - 1; b >= 0; --b) out.push_back(static_cast<std::uint8_t>((label >> b) & 1u));
}

inline std::size_t count_bit_errors(std::span<const std::uint8_t> sent, std::span<const std::uint8_t> decided) {
  if (sent.size() != decided.size()) throw std::invalid_argument("count_bit_errors: length mismatch");
  std::size_t errors = 0;
  for (std::size_t i = 0; i < sent.size(); ++i) errors += (sent[i] & 1u) != (decided[i] & 1u);
  return errors;
}

}  // namespace onebit
