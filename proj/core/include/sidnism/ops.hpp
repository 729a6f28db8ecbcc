#pragma once

#include "sidnism/tape.hpp"

namespace sidnism::ad {

// Binary ops accept equal shapes, a single-element operand (scalar
// broadcast), or operands that differ only in a leading extent of 1
// (a 1xHxW map broadcast over the channels of a CxHxW map).
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
/// The recorded derivative floors |b| at machine epsilon.
Tensor div(const Tensor& a, const Tensor& b);

Tensor add(const Tensor& a, double b);
Tensor mul(const Tensor& a, double b);

Tensor neg(const Tensor& a);
/// Subgradient 0 at 0.
Tensor abs(const Tensor& a);
Tensor exp(const Tensor& a);
Tensor pow(const Tensor& a, double exponent);
Tensor sigmoid(const Tensor& a);
Tensor tanh(const Tensor& a);
Tensor relu(const Tensor& a);
/// Gradient passes only where lo < a < hi.
Tensor clamp(const Tensor& a, double lo, double hi);

/// Angle in (-pi, pi]; atan2(0, 0) is 0 with zero gradient.
Tensor atan2(const Tensor& y, const Tensor& x);
/// Wraps angles into (-pi, pi]; unit derivative.
Tensor wrap_angle(const Tensor& a);

Tensor sum(const Tensor& a);
Tensor mean(const Tensor& a);
/// Sum of magnitudes.
Tensor l1(const Tensor& a);
/// Frobenius norm; backward divides by max(norm, 1e-12).
Tensor fro(const Tensor& a);
Tensor fro_sq(const Tensor& a);

/// 3x3 cross-correlation, stride 1, zero padding 1.
/// input [Cin,H,W], kernel [Cout,Cin,3,3], bias [Cout] -> [Cout,H,W].
Tensor conv2d(const Tensor& input, const Tensor& kernel, const Tensor& bias);

enum class Axis { horizontal, vertical };

/// Forward difference over the last (horizontal) or second-to-last
/// (vertical) extent; the final column/row is zero.
Tensor spatial_diff(const Tensor& a, Axis axis);

/// Same values, recorded as a constant.
Tensor detach(const Tensor& a);

/// Slice `index` of the leading extent, keeping rank: [C,...] -> [1,...].
Tensor channel(const Tensor& a, std::size_t index);
/// Leading-extent range [first, first + count): [C,...] -> [count,...].
Tensor slice_channels(const Tensor& a, std::size_t first, std::size_t count);
/// Mean over the leading extent: [C,...] -> [1,...].
Tensor channel_mean(const Tensor& a);

inline Tensor operator+(const Tensor& a, const Tensor& b) { return add(a, b); }
inline Tensor operator-(const Tensor& a, const Tensor& b) { return sub(a, b); }
inline Tensor operator*(const Tensor& a, const Tensor& b) { return mul(a, b); }
inline Tensor operator/(const Tensor& a, const Tensor& b) { return div(a, b); }
inline Tensor operator-(const Tensor& a) { return neg(a); }
inline Tensor operator+(const Tensor& a, double b) { return add(a, b); }
inline Tensor operator+(double a, const Tensor& b) { return add(b, a); }
inline Tensor operator-(const Tensor& a, double b) { return add(a, -b); }
inline Tensor operator-(double a, const Tensor& b) { return add(neg(b), a); }
inline Tensor operator*(const Tensor& a, double b) { return mul(a, b); }
inline Tensor operator*(double a, const Tensor& b) { return mul(b, a); }
inline Tensor operator/(const Tensor& a, double b) { return mul(a, 1.0 / b); }

}  // namespace sidnism::ad
