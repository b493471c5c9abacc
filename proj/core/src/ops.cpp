#include "hpn/ops.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <memory>

#include "hpn/errors.hpp"

namespace hpn::op {

namespace {

using std::int64_t;

int floor_div(int a, int b) {
  const int q = a / b;
  const int r = a % b;
  return (r != 0 && ((r < 0) != (b < 0))) ? q - 1 : q;
}

int ceil_div(int a, int b) { return -floor_div(-a, b); }

void check_conv_args(const Tensor& in, const Tensor& w, int stride, int pad) {
  if (in.rank() != 4) throw DimensionError("conv3d: input must be [C,X,Y,Z], got " + in.shape_str());
  if (w.rank() != 5) throw DimensionError("conv3d: weights must be [Co,Ci,k,k,k], got " + w.shape_str());
  if (w.extent(2) != w.extent(3) || w.extent(3) != w.extent(4))
    throw DimensionError("conv3d: kernel must be cubic, got " + w.shape_str());
  if (w.extent(1) != in.extent(0))
    throw DimensionError("conv3d: weights expect " + std::to_string(w.extent(1)) +
                         " input channels, input has " + std::to_string(in.extent(0)));
  if (stride < 1) throw ContractError("conv3d: stride must be >= 1");
  if (pad < 0) throw ContractError("conv3d: zero_padding must be >= 0");
}

std::vector<int> conv_out_shape(const Tensor& in, const Tensor& w, int stride, int pad) {
  const int k = w.extent(2);
  std::vector<int> out{w.extent(0), 0, 0, 0};
  for (int axis = 1; axis <= 3; ++axis) {
    const int padded = in.extent(axis) + 2 * pad;
    if (padded < k) throw DimensionError("conv3d: extent after padding smaller than kernel");
    if ((padded - k) % stride != 0)
      throw DimensionError("conv3d: extent " + std::to_string(in.extent(axis)) +
                           " incompatible with kernel " + std::to_string(k) + " stride " +
                           std::to_string(stride) + " pad " + std::to_string(pad));
    out[static_cast<std::size_t>(axis)] = (padded - k) / stride + 1;
  }
  return out;
}

void conv3d_forward_values(const Tensor& in, const Tensor& w, const Tensor* bias, int s, int p, Tensor& out) {
  const int Ci = in.extent(0), X = in.extent(1), Y = in.extent(2), Z = in.extent(3);
  const int Co = w.extent(0), k = w.extent(2);
  const int Xo = out.extent(1), Yo = out.extent(2), Zo = out.extent(3);
  const int64_t in_ch = static_cast<int64_t>(X) * Y * Z;
  const int64_t out_ch = static_cast<int64_t>(Xo) * Yo * Zo;
  const double* IN = in.data();
  const double* W = w.data();
  double* OUT = out.data();

  for (int co = 0; co < Co; ++co) {
    const double b = bias ? (*bias)[co] : 0.0;
    std::fill(OUT + co * out_ch, OUT + (co + 1) * out_ch, b);
  }

  for (int co = 0; co < Co; ++co) {
    for (int ci = 0; ci < Ci; ++ci) {
      const double* wbase = W + (static_cast<int64_t>(co) * Ci + ci) * k * k * k;
      for (int kz = 0; kz < k; ++kz) {
        for (int ky = 0; ky < k; ++ky) {
          for (int kx = 0; kx < k; ++kx) {
            const double wv = wbase[(kz * k + ky) * k + kx];
            const int xlo = std::max(0, ceil_div(p - kx, s));
            const int xhi = std::min(Xo - 1, floor_div(X - 1 + p - kx, s));
            if (xlo > xhi) continue;
            for (int zo = 0; zo < Zo; ++zo) {
              const int zi = zo * s - p + kz;
              if (zi < 0 || zi >= Z) continue;
              for (int yo = 0; yo < Yo; ++yo) {
                const int yi = yo * s - p + ky;
                if (yi < 0 || yi >= Y) continue;
                const double* irow = IN + ci * in_ch + (static_cast<int64_t>(zi) * Y + yi) * X;
                double* orow = OUT + co * out_ch + (static_cast<int64_t>(zo) * Yo + yo) * Xo;
                if (s == 1) {
                  const double* ishift = irow + kx - p;
                  for (int xo = xlo; xo <= xhi; ++xo) orow[xo] += wv * ishift[xo];
                } else {
                  for (int xo = xlo; xo <= xhi; ++xo) orow[xo] += wv * irow[xo * s - p + kx];
                }
              }
            }
          }
        }
      }
    }
  }
}

struct Conv3dOp final : TapeOp {
  int stride, pad;
  const char* name() const override { return "conv3d"; }

  void forward(Tape& tape, NodeId self) override {
    conv3d_forward_values(tape.value(inputs[0]), tape.value(inputs[1]), &tape.value(inputs[2]),
                          stride, pad, tape.mutable_value(self));
  }

  void backward(Tape& tape, NodeId self) override {
    const Tensor& in = tape.value(inputs[0]);
    const Tensor& w = tape.value(inputs[1]);
    const Tensor& gout = tape.grad(self);
    Tensor& gin = tape.mutable_grad(inputs[0]);
    Tensor& gw = tape.mutable_grad(inputs[1]);
    Tensor& gb = tape.mutable_grad(inputs[2]);

    const int Ci = in.extent(0), X = in.extent(1), Y = in.extent(2), Z = in.extent(3);
    const int Co = w.extent(0), k = w.extent(2);
    const int Xo = gout.extent(1), Yo = gout.extent(2), Zo = gout.extent(3);
    const int64_t in_ch = static_cast<int64_t>(X) * Y * Z;
    const int64_t out_ch = static_cast<int64_t>(Xo) * Yo * Zo;
    const int s = stride, p = pad;
    const double* IN = in.data();
    const double* W = w.data();
    const double* GO = gout.data();

    for (int co = 0; co < Co; ++co) {
      const double* goch = GO + co * out_ch;
      double acc = 0.0;
      for (int64_t i = 0; i < out_ch; ++i) acc += goch[i];
      gb[co] += acc;
    }

    for (int co = 0; co < Co; ++co) {
      for (int ci = 0; ci < Ci; ++ci) {
        double* gwbase = gw.data() + (static_cast<int64_t>(co) * Ci + ci) * k * k * k;
        for (int kz = 0; kz < k; ++kz) {
          for (int ky = 0; ky < k; ++ky) {
            for (int kx = 0; kx < k; ++kx) {
              const double wv = W[(static_cast<int64_t>(co) * Ci + ci) * k * k * k + (kz * k + ky) * k + kx];
              const int xlo = std::max(0, ceil_div(p - kx, s));
              const int xhi = std::min(Xo - 1, floor_div(X - 1 + p - kx, s));
              if (xlo > xhi) continue;
              double wacc = 0.0;
              for (int zo = 0; zo < Zo; ++zo) {
                const int zi = zo * s - p + kz;
                if (zi < 0 || zi >= Z) continue;
                for (int yo = 0; yo < Yo; ++yo) {
                  const int yi = yo * s - p + ky;
                  if (yi < 0 || yi >= Y) continue;
                  const double* irow = IN + ci * in_ch + (static_cast<int64_t>(zi) * Y + yi) * X;
                  double* girow = gin.data() + ci * in_ch + (static_cast<int64_t>(zi) * Y + yi) * X;
                  const double* gorow = GO + co * out_ch + (static_cast<int64_t>(zo) * Yo + yo) * Xo;
                  if (s == 1) {
                    const int off = kx - p;
                    for (int xo = xlo; xo <= xhi; ++xo) {
                      wacc += gorow[xo] * irow[xo + off];
                      girow[xo + off] += wv * gorow[xo];
                    }
                  } else {
                    for (int xo = xlo; xo <= xhi; ++xo) {
                      const int xi = xo * s - p + kx;
                      wacc += gorow[xo] * irow[xi];
                      girow[xi] += wv * gorow[xo];
                    }
                  }
                }
              }
              gwbase[(kz * k + ky) * k + kx] += wacc;
            }
          }
        }
      }
    }
  }
};

struct ConvTransposed3dOp final : TapeOp {
  int stride;
  const char* name() const override { return "conv3d_transposed"; }

  void forward(Tape& tape, NodeId self) override {
    const Tensor& in = tape.value(inputs[0]);
    const Tensor& w = tape.value(inputs[1]);
    Tensor& out = tape.mutable_value(self);
    out.fill(0.0);

    const int Ci = in.extent(0), X = in.extent(1), Y = in.extent(2), Z = in.extent(3);
    const int Co = w.extent(0), s = stride;
    const int Xo = out.extent(1), Yo = out.extent(2);
    const int64_t in_ch = static_cast<int64_t>(X) * Y * Z;
    const int64_t out_ch = static_cast<int64_t>(Xo) * Yo * (static_cast<int64_t>(Z) * s);
    const double* IN = in.data();
    const double* W = w.data();
    double* OUT = out.data();

    for (int co = 0; co < Co; ++co) {
      for (int ci = 0; ci < Ci; ++ci) {
        const double* wbase = W + (static_cast<int64_t>(co) * Ci + ci) * s * s * s;
        for (int kz = 0; kz < s; ++kz) {
          for (int ky = 0; ky < s; ++ky) {
            for (int kx = 0; kx < s; ++kx) {
              const double wv = wbase[(kz * s + ky) * s + kx];
              for (int zi = 0; zi < Z; ++zi) {
                for (int yi = 0; yi < Y; ++yi) {
                  const double* irow = IN + ci * in_ch + (static_cast<int64_t>(zi) * Y + yi) * X;
                  double* orow = OUT + co * out_ch +
                                 (static_cast<int64_t>(zi * s + kz) * Yo + (yi * s + ky)) * Xo + kx;
                  for (int xi = 0; xi < X; ++xi) orow[xi * s] += wv * irow[xi];
                }
              }
            }
          }
        }
      }
    }
  }

  void backward(Tape& tape, NodeId self) override {
    const Tensor& in = tape.value(inputs[0]);
    const Tensor& w = tape.value(inputs[1]);
    const Tensor& gout = tape.grad(self);
    Tensor& gin = tape.mutable_grad(inputs[0]);
    Tensor& gw = tape.mutable_grad(inputs[1]);

    const int Ci = in.extent(0), X = in.extent(1), Y = in.extent(2), Z = in.extent(3);
    const int Co = w.extent(0), s = stride;
    const int Xo = gout.extent(1), Yo = gout.extent(2);
    const int64_t in_ch = static_cast<int64_t>(X) * Y * Z;
    const int64_t out_ch = static_cast<int64_t>(Xo) * Yo * (static_cast<int64_t>(Z) * s);
    const double* IN = in.data();
    const double* W = w.data();
    const double* GO = gout.data();

    for (int co = 0; co < Co; ++co) {
      for (int ci = 0; ci < Ci; ++ci) {
        const int64_t woff = (static_cast<int64_t>(co) * Ci + ci) * s * s * s;
        for (int kz = 0; kz < s; ++kz) {
          for (int ky = 0; ky < s; ++ky) {
            for (int kx = 0; kx < s; ++kx) {
              const double wv = W[woff + (kz * s + ky) * s + kx];
              double wacc = 0.0;
              for (int zi = 0; zi < Z; ++zi) {
                for (int yi = 0; yi < Y; ++yi) {
                  const double* irow = IN + ci * in_ch + (static_cast<int64_t>(zi) * Y + yi) * X;
                  double* girow = gin.data() + ci * in_ch + (static_cast<int64_t>(zi) * Y + yi) * X;
                  const double* gorow = GO + co * out_ch +
                                        (static_cast<int64_t>(zi * s + kz) * Yo + (yi * s + ky)) * Xo + kx;
                  for (int xi = 0; xi < X; ++xi) {
                    const double g = gorow[xi * s];
                    wacc += g * irow[xi];
                    girow[xi] += wv * g;
                  }
                }
              }
              gw[woff + (kz * s + ky) * s + kx] += wacc;
            }
          }
        }
      }
    }
  }
};

struct ConcatChannelsOp final : TapeOp {
  const char* name() const override { return "concat_channels"; }

  void forward(Tape& tape, NodeId self) override {
    std::vector<const Tensor*> parts;
    parts.reserve(inputs.size());
    for (NodeId id : inputs) parts.push_back(&tape.value(id));
    tape.mutable_value(self) = concat_channels_values(parts);
  }

  void backward(Tape& tape, NodeId self) override {
    const Tensor& gout = tape.grad(self);
    int64_t offset = 0;
    for (NodeId id : inputs) {
      Tensor& gin = tape.mutable_grad(id);
      const int64_t n = gin.size();
      const double* src = gout.data() + offset;
      double* dst = gin.data();
      for (int64_t i = 0; i < n; ++i) dst[i] += src[i];
      offset += n;
    }
  }
};

struct ReluOp final : TapeOp {
  const char* name() const override { return "relu"; }

  void forward(Tape& tape, NodeId self) override {
    const Tensor& in = tape.value(inputs[0]);
    Tensor& out = tape.mutable_value(self);
    const int64_t n = in.size();
    for (int64_t i = 0; i < n; ++i) out[i] = in[i] > 0.0 ? in[i] : 0.0;
  }

  void backward(Tape& tape, NodeId self) override {
    const Tensor& in = tape.value(inputs[0]);
    const Tensor& gout = tape.grad(self);
    Tensor& gin = tape.mutable_grad(inputs[0]);
    const int64_t n = in.size();
    for (int64_t i = 0; i < n; ++i)
      if (in[i] > 0.0) gin[i] += gout[i];
  }
};

void softmax_forward_values(const Tensor& in, Tensor& out) {
  const int K = in.extent(0);
  const int64_t n = in.size() / K;
  const double* Z = in.data();
  double* P = out.data();
  for (int64_t j = 0; j < n; ++j) {
    double m = Z[j];
    for (int c = 1; c < K; ++c) m = std::max(m, Z[c * n + j]);
    double denom = 0.0;
    for (int c = 0; c < K; ++c) {
      const double e = std::exp(Z[c * n + j] - m);
      P[c * n + j] = e;
      denom += e;
    }
    const double inv = 1.0 / denom;
    for (int c = 0; c < K; ++c) P[c * n + j] *= inv;
  }
}

struct SoftmaxChannelsOp final : TapeOp {
  const char* name() const override { return "softmax_channels"; }

  void forward(Tape& tape, NodeId self) override {
    softmax_forward_values(tape.value(inputs[0]), tape.mutable_value(self));
  }

  void backward(Tape& tape, NodeId self) override {
    const Tensor& p = tape.value(self);
    const Tensor& gout = tape.grad(self);
    Tensor& gin = tape.mutable_grad(inputs[0]);
    const int K = p.extent(0);
    const int64_t n = p.size() / K;
    const double* P = p.data();
    const double* G = gout.data();
    double* GI = gin.data();
    for (int64_t j = 0; j < n; ++j) {
      double dot = 0.0;
      for (int c = 0; c < K; ++c) dot += G[c * n + j] * P[c * n + j];
      for (int c = 0; c < K; ++c) GI[c * n + j] += P[c * n + j] * (G[c * n + j] - dot);
    }
  }
};

struct SumOp final : TapeOp {
  const char* name() const override { return "sum"; }

  void forward(Tape& tape, NodeId self) override {
    const Tensor& in = tape.value(inputs[0]);
    double acc = 0.0;
    for (int64_t i = 0; i < in.size(); ++i) acc += in[i];
    tape.mutable_value(self)[0] = acc;
  }

  void backward(Tape& tape, NodeId self) override {
    const double g = tape.grad(self)[0];
    Tensor& gin = tape.mutable_grad(inputs[0]);
    for (int64_t i = 0; i < gin.size(); ++i) gin[i] += g;
  }
};

struct ScaleOp final : TapeOp {
  double factor;
  const char* name() const override { return "scale"; }

  void forward(Tape& tape, NodeId self) override {
    const Tensor& in = tape.value(inputs[0]);
    Tensor& out = tape.mutable_value(self);
    for (int64_t i = 0; i < in.size(); ++i) out[i] = factor * in[i];
  }

  void backward(Tape& tape, NodeId self) override {
    const Tensor& gout = tape.grad(self);
    Tensor& gin = tape.mutable_grad(inputs[0]);
    for (int64_t i = 0; i < gin.size(); ++i) gin[i] += factor * gout[i];
  }
};

struct AddOp final : TapeOp {
  const char* name() const override { return "add"; }

  void forward(Tape& tape, NodeId self) override {
    const Tensor& a = tape.value(inputs[0]);
    const Tensor& b = tape.value(inputs[1]);
    Tensor& out = tape.mutable_value(self);
    for (int64_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  }

  void backward(Tape& tape, NodeId self) override {
    const Tensor& gout = tape.grad(self);
    for (NodeId id : inputs) {
      Tensor& gin = tape.mutable_grad(id);
      for (int64_t i = 0; i < gin.size(); ++i) gin[i] += gout[i];
    }
  }
};

struct CrossEntropyLogitsOp final : TapeOp {
  std::vector<std::uint8_t> labels;
  const char* name() const override { return "cross_entropy_with_logits"; }

  void forward(Tape& tape, NodeId self) override {
    const Tensor& z = tape.value(inputs[0]);
    const int K = z.extent(0);
    const int64_t n = z.size() / K;
    const double* Z = z.data();
    double acc = 0.0;
    for (int64_t j = 0; j < n; ++j) {
      double m = Z[j];
      for (int c = 1; c < K; ++c) m = std::max(m, Z[c * n + j]);
      double denom = 0.0;
      for (int c = 0; c < K; ++c) denom += std::exp(Z[c * n + j] - m);
      acc += m + std::log(denom) - Z[static_cast<int64_t>(labels[static_cast<std::size_t>(j)]) * n + j];
    }
    tape.mutable_value(self)[0] = acc / static_cast<double>(n);
  }

  void backward(Tape& tape, NodeId self) override {
    const Tensor& z = tape.value(inputs[0]);
    Tensor& gin = tape.mutable_grad(inputs[0]);
    const double g = tape.grad(self)[0];
    const int K = z.extent(0);
    const int64_t n = z.size() / K;
    const double* Z = z.data();
    double* GI = gin.data();
    const double scale = g / static_cast<double>(n);
    for (int64_t j = 0; j < n; ++j) {
      double m = Z[j];
      for (int c = 1; c < K; ++c) m = std::max(m, Z[c * n + j]);
      double denom = 0.0;
      for (int c = 0; c < K; ++c) denom += std::exp(Z[c * n + j] - m);
      const double inv = 1.0 / denom;
      for (int c = 0; c < K; ++c) {
        double p = std::exp(Z[c * n + j] - m) * inv;
        if (c == labels[static_cast<std::size_t>(j)]) p -= 1.0;
        GI[c * n + j] += scale * p;
      }
    }
  }
};

struct PairingLossOp final : TapeOp {
  double eps;
  const char* name() const override { return "pairing_loss"; }

  void forward(Tape& tape, NodeId self) override {
    const Tensor& a = tape.value(inputs[0]);
    const Tensor& b = tape.value(inputs[1]);
    const int64_t n = a.size();
    double ma = 0.0, mb = 0.0;
    for (int64_t i = 0; i < n; ++i) {
      ma += a[i];
      mb += b[i];
    }
    ma /= static_cast<double>(n);
    mb /= static_cast<double>(n);
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (int64_t i = 0; i < n; ++i) {
      const double xa = a[i] - ma;
      const double xb = b[i] - mb;
      sxx += xa * xa;
      syy += xb * xb;
      sxy += xa * xb;
    }
    const double denom = std::sqrt(sxx * syy + eps);
    const double r = std::clamp(sxy / denom, -1.0, 1.0);
    tape.mutable_value(self)[0] = -r;
  }

  void backward(Tape& tape, NodeId self) override {
    const Tensor& a = tape.value(inputs[0]);
    const Tensor& b = tape.value(inputs[1]);
    Tensor& ga = tape.mutable_grad(inputs[0]);
    Tensor& gb = tape.mutable_grad(inputs[1]);
    const double g = tape.grad(self)[0];
    const int64_t n = a.size();
    double ma = 0.0, mb = 0.0;
    for (int64_t i = 0; i < n; ++i) {
      ma += a[i];
      mb += b[i];
    }
    ma /= static_cast<double>(n);
    mb /= static_cast<double>(n);
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (int64_t i = 0; i < n; ++i) {
      const double xa = a[i] - ma;
      const double xb = b[i] - mb;
      sxx += xa * xa;
      syy += xb * xb;
      sxy += xa * xb;
    }
    const double d2 = sxx * syy + eps;
    const double denom = std::sqrt(d2);
    // d(-r)/da_j = -( (b_j - mb)/denom - sxy*(a_j - ma)*syy/denom^3 )
    const double c1 = -g / denom;
    const double ca = g * sxy * syy / (d2 * denom);
    const double cb = g * sxy * sxx / (d2 * denom);
    for (int64_t i = 0; i < n; ++i) {
      ga[i] += c1 * (b[i] - mb) + ca * (a[i] - ma);
      gb[i] += c1 * (a[i] - ma) + cb * (b[i] - mb);
    }
  }
};

}  // namespace

NodeId conv3d(Tape& tape, NodeId input, NodeId weights, NodeId bias, int stride, int zero_padding) {
  const Tensor& in = tape.value(input);
  const Tensor& w = tape.value(weights);
  const Tensor& b = tape.value(bias);
  check_conv_args(in, w, stride, zero_padding);
  if (b.rank() != 1 || b.extent(0) != w.extent(0))
    throw DimensionError("conv3d: bias must be [C_out]");
  Tensor out(conv_out_shape(in, w, stride, zero_padding));
  conv3d_forward_values(in, w, &b, stride, zero_padding, out);
  auto op = std::make_unique<Conv3dOp>();
  op->inputs = {input, weights, bias};
  op->stride = stride;
  op->pad = zero_padding;
  return tape.emit(std::move(op), std::move(out));
}

NodeId conv3d_transposed(Tape& tape, NodeId input, NodeId weights, int stride) {
  const Tensor& in = tape.value(input);
  const Tensor& w = tape.value(weights);
  if (in.rank() != 4) throw DimensionError("conv3d_transposed: input must be [C,X,Y,Z], got " + in.shape_str());
  if (stride < 1) throw ContractError("conv3d_transposed: stride must be >= 1");
  if (w.rank() != 5 || w.extent(2) != stride || w.extent(3) != stride || w.extent(4) != stride)
    throw DimensionError("conv3d_transposed: kernel extent must equal the stride");
  if (w.extent(1) != in.extent(0))
    throw DimensionError("conv3d_transposed: weights expect " + std::to_string(w.extent(1)) +
                         " input channels, input has " + std::to_string(in.extent(0)));
  auto op = std::make_unique<ConvTransposed3dOp>();
  op->inputs = {input, weights};
  op->stride = stride;
  Tensor out({w.extent(0), in.extent(1) * stride, in.extent(2) * stride, in.extent(3) * stride});
  const NodeId id = tape.emit(std::move(op), std::move(out));
  static_cast<ConvTransposed3dOp*>(nullptr);  // (placeholder removed below)
  return id;
}

NodeId concat_channels(Tape& tape, const std::vector<NodeId>& parts) {
  std::vector<const Tensor*> vals;
  vals.reserve(parts.size());
  for (NodeId id : parts) vals.push_back(&tape.value(id));
  Tensor out = concat_channels_values(vals);
  auto op = std::make_unique<ConcatChannelsOp>();
  op->inputs = parts;
  return tape.emit(std::move(op), std::move(out));
}

NodeId relu(Tape& tape, NodeId x) {
  auto op = std::make_unique<ReluOp>();
  op->inputs = {x};
  Tensor out(tape.value(x).shape());
  const NodeId id = tape.emit(std::move(op), std::move(out));
  static_cast<ReluOp*>(nullptr);
  return id;
}

NodeId softmax_channels(Tape& tape, NodeId logits) {
  const Tensor& z = tape.value(logits);
  if (z.rank() < 2) throw DimensionError("softmax_channels: need a channel axis plus voxels");
  auto op = std::make_unique<SoftmaxChannelsOp>();
  op->inputs = {logits};
  Tensor out(z.shape());
  softmax_forward_values(z, out);
  return tape.emit(std::move(op), std::move(out));
}

NodeId sum(Tape& tape, NodeId x) {
  auto op = std::make_unique<SumOp>();
  op->inputs = {x};
  return tape.emit(std::move(op), Tensor({1}));
}

NodeId scale(Tape& tape, NodeId x, double factor) {
  auto op = std::make_unique<ScaleOp>();
  op->inputs = {x};
  op->factor = factor;
  return tape.emit(std::move(op), Tensor(tape.value(x).shape()));
}

NodeId add(Tape& tape, NodeId a, NodeId b) {
  if (!tape.value(a).same_shape(tape.value(b)))
    throw DimensionError("add: shapes differ: " + tape.value(a).shape_str() + " vs " + tape.value(b).shape_str());
  auto op = std::make_unique<AddOp>();
  op->inputs = {a, b};
  return tape.emit(std::move(op), Tensor(tape.value(a).shape()));
}

NodeId cross_entropy_with_logits(Tape& tape, NodeId logits, std::vector<std::uint8_t> labels) {
  const Tensor& z = tape.value(logits);
  if (z.rank() < 2) throw DimensionError("cross_entropy_with_logits: need [K+1, ...spatial] logits");
  const int K = z.extent(0);
  const std::int64_t n = z.size() / K;
  if (static_cast<std::int64_t>(labels.size()) != n)
    throw DimensionError("cross_entropy_with_logits: label count " + std::to_string(labels.size()) +
                         " does not match voxel count " + std::to_string(n));
  for (std::uint8_t y : labels)
    if (y >= K) throw ContractError("cross_entropy_with_logits: label out of range");
  auto op = std::make_unique<CrossEntropyLogitsOp>();
  op->inputs = {logits};
  op->labels = std::move(labels);
  return tape.emit(std::move(op), Tensor({1}));
}

NodeId pairing_loss(Tape& tape, NodeId f1, NodeId f2, double eps) {
  const Tensor& a = tape.value(f1);
  const Tensor& b = tape.value(f2);
  if (!a.same_shape(b))
    throw DimensionError("pairing_loss: shapes differ: " + a.shape_str() + " vs " + b.shape_str());
  if (a.size() < 2) throw ContractError("pairing_loss: need at least 2 elements");
  auto op = std::make_unique<PairingLossOp>();
  op->inputs = {f1, f2};
  op->eps = eps;
  return tape.emit(std::move(op), Tensor({1}));
}

}  // namespace hpn::op

namespace hpn {

Tensor softmax_channels_values(const Tensor& logits) {
  if (logits.rank() < 2) throw DimensionError("softmax_channels: need a channel axis plus voxels");
  Tensor out(logits.shape());
  op::softmax_forward_values(logits, out);
  return out;
}

}  // namespace hpn
