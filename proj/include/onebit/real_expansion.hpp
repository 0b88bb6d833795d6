#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <stdexcept>

namespace onebit {

using Complex = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

/// The 1-bit DAC output alphabet {±scale ± i·scale} with scale = 1/sqrt(2·Nt),
/// so that any vector of Nt DAC outputs has unit total power.
class DacAlphabet {
 public:
  DacAlphabet() = default;
  explicit DacAlphabet(int num_antennas) : nt_(num_antennas) {
    if (num_antennas <= 0) {
      throw std::invalid_argument("DacAlphabet: antenna count must be positive");
    }
    scale_ = 1.0 / std::sqrt(2.0 * num_antennas);
  }

  int num_antennas() const { return nt_; }
  double scale() const { return scale_; }

  // sign(0) := +1 so quantization is total.
  double quantize(double v) const { return v < 0.0 ? -scale_ : scale_; }

  bool contains(double v) const { return v == scale_ || v == -scale_; }
  bool contains(Complex v) const { return contains(v.real()) && contains(v.imag()); }

 private:
  int nt_ = 1;
  double scale_ = 1.0 / std::sqrt(2.0);
};

/// [Re(x); Im(x)]
inline RealVector expand_vector(const ComplexVector& x) {
  const Eigen::Index n = x.size();
  RealVector out(2 * n);
  out.head(n) = x.real();
  out.tail(n) = x.imag();
  return out;
}

/// Real equivalent [[Re H, -Im H], [Im H, Re H]], so expand(Hx) = H_E expand(x).
inline RealMatrix expand_channel(const ComplexMatrix& H) {
  const Eigen::Index k = H.rows();
  const Eigen::Index n = H.cols();
  RealMatrix out(2 * k, 2 * n);
  out.topLeftCorner(k, n) = H.real();
  out.topRightCorner(k, n) = -H.imag();
  out.bottomLeftCorner(k, n) = H.imag();
  out.bottomRightCorner(k, n) = H.real();
  return out;
}

inline ComplexVector collapse(const RealVector& x_e) {
  if (x_e.size() % 2 != 0) {
    throw std::invalid_argument("collapse: real-expanded vector must have even length");
  }
  const Eigen::Index n = x_e.size() / 2;
  ComplexVector out(n);
  for (Eigen::Index i = 0; i < n; ++i) out[i] = Complex(x_e[i], x_e[i + n]);
  return out;
}

inline RealVector quantize_1bit(const RealVector& x, const DacAlphabet& dac) {
  RealVector out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) out[i] = dac.quantize(x[i]);
  return out;
}

inline ComplexVector quantize_1bit(const ComplexVector& x, const DacAlphabet& dac) {
  ComplexVector out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    out[i] = Complex(dac.quantize(x[i].real()), dac.quantize(x[i].imag()));
  }
  return out;
}

}  // namespace onebit
