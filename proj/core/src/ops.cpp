#include "sidnism/ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace sidnism::ad {

namespace {

enum class Broadcast { none, a_scalar, b_scalar, a_plane, b_plane };

struct BinaryLayout {
  Shape out_shape;
  Broadcast mode = Broadcast::none;
  std::size_t plane = 0;

  std::size_t index_a(std::size_t i) const {
    switch (mode) {
      case Broadcast::a_scalar: return 0;
      case Broadcast::a_plane: return i % plane;
      default: return i;
    }
  }
  std::size_t index_b(std::size_t i) const {
    switch (mode) {
      case Broadcast::b_scalar: return 0;
      case Broadcast::b_plane: return i % plane;
      default: return i;
    }
  }
};

bool differs_in_leading_only(const Shape& wide, const Shape& narrow) {
  if (wide.size() != narrow.size() || wide.size() < 2 || narrow[0] != 1) return false;
  return std::equal(wide.begin() + 1, wide.end(), narrow.begin() + 1);
}

BinaryLayout layout_for(const Tensor& a, const Tensor& b, const char* op) {
  const Shape& sa = a.shape();
  const Shape& sb = b.shape();
  if (sa == sb) return {sa, Broadcast::none, 0};
  if (numel(sb) == 1) return {sa, Broadcast::b_scalar, 0};
  if (numel(sa) == 1) return {sb, Broadcast::a_scalar, 0};
  if (differs_in_leading_only(sa, sb)) return {sa, Broadcast::b_plane, numel(sb)};
  if (differs_in_leading_only(sb, sa)) return {sb, Broadcast::a_plane, numel(sa)};
  throw std::invalid_argument(std::string(op) + ": incompatible shapes " + to_string(sa) + " and " +
                              to_string(sb));
}

// f(a, b) -> out; da/db(a, b, out) -> local partial derivatives.
template <typename F, typename DA, typename DB>
Tensor binary(const char* name, const Tensor& a, const Tensor& b, F f, DA da, DB db) {
  BinaryLayout layout = layout_for(a, b, name);
  const auto va = a.values();
  const auto vb = b.values();
  std::vector<double> out(numel(layout.out_shape));
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(va[layout.index_a(i)], vb[layout.index_b(i)]);

  const std::size_t ia = a.id();
  const std::size_t ib = b.id();
  return a.tape().record(
      layout.out_shape, std::move(out), {a, b},
      [layout, ia, ib, da, db](Tape& tape, std::size_t self) {
        const auto g = tape.grad_of(self);
        const auto y = tape.value_of(self);
        const auto xa = tape.value_of(ia);
        const auto xb = tape.value_of(ib);
        auto ga = tape.input_grad(ia);
        auto gb = tape.input_grad(ib);
        for (std::size_t i = 0; i < g.size(); ++i) {
          const std::size_t ja = layout.index_a(i);
          const std::size_t jb = layout.index_b(i);
          if (!ga.empty()) ga[ja] += g[i] * da(xa[ja], xb[jb], y[i]);
          if (!gb.empty()) gb[jb] += g[i] * db(xa[ja], xb[jb], y[i]);
        }
      });
}

// f(x) -> y; d(x, y) -> dy/dx.
template <typename F, typename D>
Tensor unary(const Tensor& a, F f, D d) {
  const auto va = a.values();
  std::vector<double> out(va.size());
  std::transform(va.begin(), va.end(), out.begin(), f);
  const std::size_t ia = a.id();
  return a.tape().record(a.shape(), std::move(out), {a}, [ia, d](Tape& tape, std::size_t self) {
    const auto g = tape.grad_of(self);
    const auto y = tape.value_of(self);
    const auto x = tape.value_of(ia);
    auto gx = tape.input_grad(ia);
    for (std::size_t i = 0; i < g.size(); ++i) gx[i] += g[i] * d(x[i], y[i]);
  });
}

// Reduction to a single element; d(x, y) -> dy/dx_i.
template <typename D>
Tensor reduce(const Tensor& a, double value, D d) {
  if (a.numel() == 0) throw std::invalid_argument("reduction of an empty tensor");
  const std::size_t ia = a.id();
  return a.tape().record(Shape{1}, {value}, {a}, [ia, d](Tape& tape, std::size_t self) {
    const double g = tape.grad_of(self)[0];
    const double y = tape.value_of(self)[0];
    const auto x = tape.value_of(ia);
    auto gx = tape.input_grad(ia);
    for (std::size_t i = 0; i < x.size(); ++i) gx[i] += g * d(x[i], y);
  });
}

double guarded(double b) {
  constexpr double floor = std::numeric_limits<double>::epsilon();
  return std::copysign(std::max(std::abs(b), floor), b);
}

double sign_of(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

double safe_atan2(double y, double x) {
  if (y == 0.0 && x == 0.0) return 0.0;
  const double h = std::atan2(y, x);
  return h == -std::numbers::pi ? std::numbers::pi : h;
}

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) {
  return binary(
      "add", a, b, [](double x, double y) { return x + y; },
      [](double, double, double) { return 1.0; }, [](double, double, double) { return 1.0; });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  return binary(
      "sub", a, b, [](double x, double y) { return x - y; },
      [](double, double, double) { return 1.0; }, [](double, double, double) { return -1.0; });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  return binary(
      "mul", a, b, [](double x, double y) { return x * y; },
      [](double, double y, double) { return y; }, [](double x, double, double) { return x; });
}

Tensor div(const Tensor& a, const Tensor& b) {
  return binary(
      "div", a, b, [](double x, double y) { return x / y; },
      [](double, double y, double) { return 1.0 / guarded(y); },
      [](double x, double y, double) {
        const double d = guarded(y);
        return -x / (d * d);
      });
}

Tensor add(const Tensor& a, double b) {
  return unary(a, [b](double x) { return x + b; }, [](double, double) { return 1.0; });
}

Tensor mul(const Tensor& a, double b) {
  return unary(a, [b](double x) { return x * b; }, [b](double, double) { return b; });
}

Tensor neg(const Tensor& a) {
  return unary(a, [](double x) { return -x; }, [](double, double) { return -1.0; });
}

Tensor abs(const Tensor& a) {
  return unary(a, [](double x) { return std::abs(x); }, [](double x, double) { return sign_of(x); });
}

Tensor exp(const Tensor& a) {
  return unary(a, [](double x) { return std::exp(x); }, [](double, double y) { return y; });
}

Tensor pow(const Tensor& a, double exponent) {
  return unary(
      a, [exponent](double x) { return std::pow(x, exponent); },
      [exponent](double x, double) {
        if (x == 0.0 && exponent < 1.0) return 0.0;
        return exponent * std::pow(x, exponent - 1.0);
      });
}

Tensor sigmoid(const Tensor& a) {
  return unary(
      a, [](double x) { return 1.0 / (1.0 + std::exp(-x)); },
      [](double, double y) { return y * (1.0 - y); });
}

Tensor tanh(const Tensor& a) {
  return unary(a, [](double x) { return std::tanh(x); }, [](double, double y) { return 1.0 - y * y; });
}

Tensor relu(const Tensor& a) {
  return unary(
      a, [](double x) { return x > 0.0 ? x : 0.0; }, [](double x, double) { return x > 0.0 ? 1.0 : 0.0; });
}

Tensor clamp(const Tensor& a, double lo, double hi) {
  if (lo > hi) throw std::invalid_argument("clamp: lo > hi");
  return unary(
      a, [lo, hi](double x) { return std::clamp(x, lo, hi); },
      [lo, hi](double x, double) { return (x > lo && x < hi) ? 1.0 : 0.0; });
}

Tensor atan2(const Tensor& y, const Tensor& x) {
  return binary(
      "atan2", y, x, safe_atan2,
      [](double yv, double xv, double) {
        const double r2 = xv * xv + yv * yv;
        return r2 == 0.0 ? 0.0 : xv / r2;
      },
      [](double yv, double xv, double) {
        const double r2 = xv * xv + yv * yv;
        return r2 == 0.0 ? 0.0 : -yv / r2;
      });
}

Tensor wrap_angle(const Tensor& a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  return unary(
      a,
      [](double x) {
        double w = x - two_pi * std::round(x / two_pi);
        if (w <= -std::numbers::pi) w += two_pi;
        if (w > std::numbers::pi) w -= two_pi;
        return w;
      },
      [](double, double) { return 1.0; });
}

Tensor sum(const Tensor& a) {
  double acc = 0.0;
  for (double v : a.values()) acc += v;
  return reduce(a, acc, [](double, double) { return 1.0; });
}

Tensor mean(const Tensor& a) {
  const double n = static_cast<double>(a.numel());
  double acc = 0.0;
  for (double v : a.values()) acc += v;
  return reduce(a, n == 0 ? 0.0 : acc / n, [n](double, double) { return 1.0 / n; });
}

Tensor l1(const Tensor& a) {
  double acc = 0.0;
  for (double v : a.values()) acc += std::abs(v);
  return reduce(a, acc, [](double x, double) { return sign_of(x); });
}

Tensor fro(const Tensor& a) {
  double acc = 0.0;
  for (double v : a.values()) acc += v * v;
  return reduce(a, std::sqrt(acc), [](double x, double y) { return x / std::max(y, 1e-12); });
}

Tensor fro_sq(const Tensor& a) {
  double acc = 0.0;
  for (double v : a.values()) acc += v * v;
  return reduce(a, acc, [](double x, double) { return 2.0 * x; });
}

Tensor conv2d(const Tensor& input, const Tensor& kernel, const Tensor& bias) {
  const Shape& si = input.shape();
  const Shape& sk = kernel.shape();
  const Shape& sb = bias.shape();
  if (si.size() != 3) throw std::invalid_argument("conv2d: input must be [C,H,W], got " + to_string(si));
  if (sk.size() != 4 || sk[2] != 3 || sk[3] != 3) {
    throw std::invalid_argument("conv2d: kernel must be [Cout,Cin,3,3], got " + to_string(sk));
  }
  if (sk[1] != si[0]) {
    throw std::invalid_argument("conv2d: kernel expects " + std::to_string(sk[1]) +
                                " input channels, input has " + std::to_string(si[0]));
  }
  if (numel(sb) != sk[0]) throw std::invalid_argument("conv2d: bias length must equal Cout");
  if (si[1] == 0 || si[2] == 0) throw std::invalid_argument("conv2d: empty spatial extent");

  const std::size_t cin = si[0];
  const std::size_t h = si[1];
  const std::size_t w = si[2];
  const std::size_t cout = sk[0];
  const std::size_t plane = h * w;

  const auto in = input.values();
  const auto k = kernel.values();
  const auto b = bias.values();
  std::vector<double> out(cout * plane);

  // Tap (ky, kx) reads input offset (ky-1, kx-1); rows/cols outside the
  // image are zero padding and are simply skipped.
  auto row_span = [h](std::size_t ky) {
    const std::size_t y0 = ky == 0 ? 1 : 0;
    const std::size_t y1 = ky == 2 ? h - 1 : h;
    return std::pair{y0, y1};
  };
  auto col_span = [w](std::size_t kx) {
    const std::size_t x0 = kx == 0 ? 1 : 0;
    const std::size_t x1 = kx == 2 ? w - 1 : w;
    return std::pair{x0, x1};
  };

  for (std::size_t co = 0; co < cout; ++co) {
    double* dst = out.data() + co * plane;
    std::fill(dst, dst + plane, b[co]);
    for (std::size_t ci = 0; ci < cin; ++ci) {
      const double* src = in.data() + ci * plane;
      for (std::size_t ky = 0; ky < 3; ++ky) {
        const auto [y0, y1] = row_span(ky);
        for (std::size_t kx = 0; kx < 3; ++kx) {
          const double wt = k[((co * cin + ci) * 3 + ky) * 3 + kx];
          if (wt == 0.0) continue;
          const auto [x0, x1] = col_span(kx);
          for (std::size_t y = y0; y < y1; ++y) {
            double* o = dst + y * w;
            const double* s = src + (y + ky - 1) * w;
            for (std::size_t x = x0; x < x1; ++x) o[x] += wt * s[x + kx - 1];
          }
        }
      }
    }
  }

  const std::size_t i_in = input.id();
  const std::size_t i_k = kernel.id();
  const std::size_t i_b = bias.id();
  return input.tape().record(
      Shape{cout, h, w}, std::move(out), {input, kernel, bias},
      [=](Tape& tape, std::size_t self) {
        const auto g = tape.grad_of(self);
        const auto x = tape.value_of(i_in);
        const auto kv = tape.value_of(i_k);
        auto gx = tape.input_grad(i_in);
        auto gk = tape.input_grad(i_k);
        auto gb = tape.input_grad(i_b);

        if (!gb.empty()) {
          for (std::size_t co = 0; co < cout; ++co) {
            double acc = 0.0;
            const double* go = g.data() + co * plane;
            for (std::size_t i = 0; i < plane; ++i) acc += go[i];
            gb[co] += acc;
          }
        }
        for (std::size_t co = 0; co < cout; ++co) {
          const double* go = g.data() + co * plane;
          for (std::size_t ci = 0; ci < cin; ++ci) {
            const double* src = x.data() + ci * plane;
            double* gsrc = gx.empty() ? nullptr : gx.data() + ci * plane;
            for (std::size_t ky = 0; ky < 3; ++ky) {
              const auto [y0, y1] = row_span(ky);
              for (std::size_t kx = 0; kx < 3; ++kx) {
                const auto [x0, x1] = col_span(kx);
                const std::size_t kidx = ((co * cin + ci) * 3 + ky) * 3 + kx;
                const double wt = kv[kidx];
                double acc = 0.0;
                for (std::size_t y = y0; y < y1; ++y) {
                  const double* gr = go + y * w;
                  const std::size_t row = (y + ky - 1) * w;
                  const double* s = src + row;
                  if (!gk.empty()) {
                    for (std::size_t xx = x0; xx < x1; ++xx) acc += gr[xx] * s[xx + kx - 1];
                  }
                  if (gsrc != nullptr && wt != 0.0) {
                    double* gs = gsrc + row;
                    for (std::size_t xx = x0; xx < x1; ++xx) gs[xx + kx - 1] += wt * gr[xx];
                  }
                }
                if (!gk.empty()) gk[kidx] += acc;
              }
            }
          }
        }
      });
}

Tensor spatial_diff(const Tensor& a, Axis axis) {
  const Shape& s = a.shape();
  if (s.size() < 2) throw std::invalid_argument("spatial_diff needs rank >= 2, got " + to_string(s));
  const std::size_t h = s[s.size() - 2];
  const std::size_t w = s[s.size() - 1];
  const std::size_t planes = numel(s) / (h * w);
  const auto v = a.values();
  std::vector<double> out(v.size(), 0.0);
  for (std::size_t p = 0; p < planes; ++p) {
    const double* src = v.data() + p * h * w;
    double* dst = out.data() + p * h * w;
    for (std::size_t y = 0; y < h; ++y) {
      for (std::size_t x = 0; x < w; ++x) {
        if (axis == Axis::horizontal) {
          if (x + 1 < w) dst[y * w + x] = src[y * w + x + 1] - src[y * w + x];
        } else if (y + 1 < h) {
          dst[y * w + x] = src[(y + 1) * w + x] - src[y * w + x];
        }
      }
    }
  }
  const std::size_t ia = a.id();
  return a.tape().record(s, std::move(out), {a}, [=](Tape& tape, std::size_t self) {
    const auto g = tape.grad_of(self);
    auto gx = tape.input_grad(ia);
    const std::size_t step = axis == Axis::horizontal ? 1 : w;
    for (std::size_t p = 0; p < planes; ++p) {
      for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t x = 0; x < w; ++x) {
          if (axis == Axis::horizontal ? x + 1 >= w : y + 1 >= h) continue;
          const std::size_t i = p * h * w + y * w + x;
          gx[i + step] += g[i];
          gx[i] -= g[i];
        }
      }
    }
  });
}

Tensor detach(const Tensor& a) {
  const auto v = a.values();
  return a.tape().constant(a.shape(), std::vector<double>(v.begin(), v.end()));
}

Tensor channel(const Tensor& a, std::size_t index) { return slice_channels(a, index, 1); }

Tensor slice_channels(const Tensor& a, std::size_t first, std::size_t count) {
  const Shape& s = a.shape();
  if (s.size() < 2) throw std::invalid_argument("channel slicing needs rank >= 2");
  if (count == 0 || first + count > s[0]) throw std::out_of_range("channel range out of bounds");
  Shape out_shape = s;
  out_shape[0] = count;
  const std::size_t plane = numel(s) / s[0];
  const std::size_t offset = first * plane;
  const std::size_t length = count * plane;
  const auto v = a.values();
  std::vector<double> out(v.begin() + offset, v.begin() + offset + length);
  const std::size_t ia = a.id();
  return a.tape().record(out_shape, std::move(out), {a}, [=](Tape& tape, std::size_t self) {
    const auto g = tape.grad_of(self);
    auto gx = tape.input_grad(ia);
    for (std::size_t i = 0; i < length; ++i) gx[offset + i] += g[i];
  });
}

Tensor channel_mean(const Tensor& a) {
  const Shape& s = a.shape();
  if (s.size() < 2) throw std::invalid_argument("channel_mean() needs rank >= 2");
  Shape out_shape = s;
  out_shape[0] = 1;
  const std::size_t plane = numel(out_shape);
  const std::size_t count = s[0];
  const auto v = a.values();
  std::vector<double> out(plane, 0.0);
  for (std::size_t c = 0; c < count; ++c) {
    for (std::size_t i = 0; i < plane; ++i) out[i] += v[c * plane + i];
  }
  for (double& o : out) o /= static_cast<double>(count);
  const std::size_t ia = a.id();
  return a.tape().record(out_shape, std::move(out), {a}, [=](Tape& tape, std::size_t self) {
    const auto g = tape.grad_of(self);
    auto gx = tape.input_grad(ia);
    const double scale = 1.0 / static_cast<double>(count);
    for (std::size_t c = 0; c < count; ++c) {
      for (std::size_t i = 0; i < plane; ++i) gx[c * plane + i] += g[i] * scale;
    }
  });
}

}  // namespace sidnism::ad
