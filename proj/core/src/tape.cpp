// Copyright 2026 The lfkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "lfkit/nn/tape.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "lfkit/geometry.hpp"
#include "lfkit/parallel.hpp"

namespace lfkit::nn {
namespace {

void check_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (!a.same_shape(b))
    throw Error(std::string(op) + ": shape mismatch " + a.shape_str() + " vs " + b.shape_str());
}

void require_rank4(const Tensor& t, const char* op) {
  if (t.rank() != 4) throw Error(std::string(op) + ": expected rank-4 tensor, got " + t.shape_str());
}

inline real sign_of(real x) { return x > real(0) ? real(1) : (x < real(0) ? real(-1) : real(0)); }

}  // namespace

Tape::NodeId Tape::add(NodeId a, NodeId b) {
  check_same_shape(value(a), value(b), "add");
  Tensor out(value(a).shape);
  const Tensor& va = value(a);
  const Tensor& vb = value(b);
  for (std::int64_t i = 0; i < out.numel(); ++i) out.v[i] = va.v[i] + vb.v[i];
  const bool ng = needs_grad(a) || needs_grad(b);
  NodeId id = push(std::move(out), ng, {});
  if (ng)
    nodes_[id].back = [id, a, b](Tape& t) {
      const Tensor& g = t.grad(id);
      if (t.needs_grad(a)) {
        Tensor& ga = t.grad_buffer(a);
        for (std::int64_t i = 0; i < g.numel(); ++i) ga.v[i] += g.v[i];
      }
      if (t.needs_grad(b)) {
        Tensor& gb = t.grad_buffer(b);
        for (std::int64_t i = 0; i < g.numel(); ++i) gb.v[i] += g.v[i];
      }
    };
  return id;
}

Tape::NodeId Tape::sub(NodeId a, NodeId b) {
  check_same_shape(value(a), value(b), "sub");
  Tensor out(value(a).shape);
  for (std::int64_t i = 0; i < out.numel(); ++i) out.v[i] = value(a).v[i] - value(b).v[i];
  const bool ng = needs_grad(a) || needs_grad(b);
  NodeId id = push(std::move(out), ng, {});
  if (ng)
    nodes_[id].back = [id, a, b](Tape& t) {
      const Tensor& g = t.grad(id);
      if (t.needs_grad(a)) {
        Tensor& ga = t.grad_buffer(a);
        for (std::int64_t i = 0; i < g.numel(); ++i) ga.v[i] += g.v[i];
      }
      if (t.needs_grad(b)) {
        Tensor& gb = t.grad_buffer(b);
        for (std::int64_t i = 0; i < g.numel(); ++i) gb.v[i] -= g.v[i];
      }
    };
  return id;
}

Tape::NodeId Tape::mul(NodeId a, NodeId b) {
  check_same_shape(value(a), value(b), "mul");
  Tensor out(value(a).shape);
  for (std::int64_t i = 0; i < out.numel(); ++i) out.v[i] = value(a).v[i] * value(b).v[i];
  const bool ng = needs_grad(a) || needs_grad(b);
  NodeId id = push(std::move(out), ng, {});
  if (ng)
    nodes_[id].back = [id, a, b](Tape& t) {
      const Tensor& g = t.grad(id);
      if (t.needs_grad(a)) {
        Tensor& ga = t.grad_buffer(a);
        const Tensor& vb = t.value(b);
        for (std::int64_t i = 0; i < g.numel(); ++i) ga.v[i] += g.v[i] * vb.v[i];
      }
      if (t.needs_grad(b)) {
        Tensor& gb = t.grad_buffer(b);
        const Tensor& va = t.value(a);
        for (std::int64_t i = 0; i < g.numel(); ++i) gb.v[i] += g.v[i] * va.v[i];
      }
    };
  return id;
}

Tape::NodeId Tape::add_many(const std::vector<NodeId>& xs) {
  if (xs.empty()) throw Error("add_many: empty input list");
  NodeId acc = xs[0];
  for (std::size_t i = 1; i < xs.size(); ++i) acc = add(acc, xs[i]);
  return acc;
}

Tape::NodeId Tape::affine(NodeId x, real scale, real shift) {
  Tensor out(value(x).shape);
  for (std::int64_t i = 0; i < out.numel(); ++i) out.v[i] = scale * value(x).v[i] + shift;
  const bool ng = needs_grad(x);
  NodeId id = push(std::move(out), ng, {});
  if (ng)
    nodes_[id].back = [id, x, scale](Tape& t) {
      const Tensor& g = t.grad(id);
      Tensor& gx = t.grad_buffer(x);
      for (std::int64_t i = 0; i < g.numel(); ++i) gx.v[i] += scale * g.v[i];
    };
  return id;
}

Tape::NodeId Tape::activation(NodeId x, Act kind, real alpha) {
  const Tensor& vx = value(x);
  Tensor out(vx.shape);
  switch (kind) {
    case Act::kIdentity:
      out.v = vx.v;
      break;
    case Act::kRelu:
      for (std::int64_t i = 0; i < out.numel(); ++i)
        out.v[i] = vx.v[i] > real(0) ? vx.v[i] : real(0);
      break;
    case Act::kLeakyRelu:
      for (std::int64_t i = 0; i < out.numel(); ++i)
        out.v[i] = vx.v[i] > real(0) ? vx.v[i] : alpha * vx.v[i];
      break;
    case Act::kTanh:
      for (std::int64_t i = 0; i < out.numel(); ++i) out.v[i] = std::tanh(vx.v[i]);
      break;
    case Act::kSoftplus:
      // log(1 + exp(x)), stabilized for large |x|.
      for (std::int64_t i = 0; i < out.numel(); ++i) {
        const real z = vx.v[i];
        out.v[i] = z > real(20) ? z : std::log1p(std::exp(z));
      }
      break;
  }
  const bool ng = needs_grad(x);
  NodeId id = push(std::move(out), ng, {});
  if (ng)
    nodes_[id].back = [id, x, kind, alpha](Tape& t) {
      const Tensor& g = t.grad(id);
      const Tensor& vx2 = t.value(x);
      const Tensor& vy = t.value(id);
      Tensor& gx = t.grad_buffer(x);
      switch (kind) {
        case Act::kIdentity:
          for (std::int64_t i = 0; i < g.numel(); ++i) gx.v[i] += g.v[i];
          break;
        case Act::kRelu:
          // subgradient convention g(0) = 0
          for (std::int64_t i = 0; i < g.numel(); ++i)
            if (vx2.v[i] > real(0)) gx.v[i] += g.v[i];
          break;
        case Act::kLeakyRelu:
          for (std::int64_t i = 0; i < g.numel(); ++i)
            gx.v[i] += (vx2.v[i] > real(0) ? real(1) : alpha) * g.v[i];
          break;
        case Act::kTanh:
          for (std::int64_t i = 0; i < g.numel(); ++i)
            gx.v[i] += (real(1) - vy.v[i] * vy.v[i]) * g.v[i];
          break;
        case Act::kSoftplus:
          for (std::int64_t i = 0; i < g.numel(); ++i)
            gx.v[i] += g.v[i] / (real(1) + std::exp(-vx2.v[i]));
          break;
      }
    };
  return id;
}

Tape::NodeId Tape::reshape(NodeId x, std::vector<int> new_shape) {
  if (Tensor::numel_of(new_shape) != value(x).numel())
    throw Error("reshape: element count mismatch");
  Tensor out(std::move(new_shape), value(x).v);
  const bool ng = needs_grad(x);
  NodeId id = push(std::move(out), ng, {});
  if (ng)
    nodes_[id].back = [id, x](Tape& t) {
      const Tensor& g = t.grad(id);
      Tensor& gx = t.grad_buffer(x);
      for (std::int64_t i = 0; i < g.numel(); ++i) gx.v[i] += g.v[i];
    };
  return id;
}

Tape::NodeId Tape::concat_channels(const std::vector<NodeId>& xs) {
  if (xs.empty()) throw Error("concat_channels: empty input list");
  const Tensor& first = value(xs[0]);
  require_rank4(first, "concat_channels");
  const int batch = first.dim(0), height = first.dim(2), width = first.dim(3);
  int total_c = 0;
  bool ng = false;
  for (NodeId x : xs) {
    const Tensor& t = value(x);
    require_rank4(t, "concat_channels");
    if (t.dim(0) != batch || t.dim(2) != height || t.dim(3) != width)
      throw Error("concat_channels: incompatible shapes");
    total_c += t.dim(1);
    ng = ng || needs_grad(x);
  }
  Tensor out({batch, total_c, height, width});
  const std::int64_t plane = static_cast<std::int64_t>(height) * width;
  int c_off = 0;
  for (NodeId x : xs) {
    const Tensor& t = value(x);
    const int c_in = t.dim(1);
    for (int b = 0; b < batch; ++b)
      std::copy_n(t.data() + static_cast<std::int64_t>(b) * c_in * plane, c_in * plane,
                  out.data() + (static_cast<std::int64_t>(b) * total_c + c_off) * plane);
    c_off += c_in;
  }
  NodeId id = push(std::move(out), ng, {});
  if (ng)
    nodes_[id].back = [id, xs, batch, total_c, plane](Tape& t) {
      const Tensor& g = t.grad(id);
      int off = 0;
      for (NodeId x : xs) {
        const int c_in = t.value(x).dim(1);
        if (t.needs_grad(x)) {
          Tensor& gx = t.grad_buffer(x);
          for (int b = 0; b < batch; ++b) {
            const real* src = g.data() + (static_cast<std::int64_t>(b) * total_c + off) * plane;
            real* dst = gx.data() + static_cast<std::int64_t>(b) * c_in * plane;
            for (std::int64_t i = 0; i < c_in * plane; ++i) dst[i] += src[i];
          }
        }
        off += c_in;
      }
    };
  return id;
}

Tape::NodeId Tape::slice_channels(NodeId x, int c0, int c1) {
  const Tensor& t = value(x);
  require_rank4(t, "slice_channels");
  if (c0 < 0 || c1 > t.dim(1) || c0 >= c1) throw Error("slice_channels: bad range");
  const int batch = t.dim(0), channels = t.dim(1);
  const std::int64_t plane = static_cast<std::int64_t>(t.dim(2)) * t.dim(3);
  Tensor out({batch, c1 - c0, t.dim(2), t.dim(3)});
  for (int b = 0; b < batch; ++b)
    std::copy_n(t.data() + (static_cast<std::int64_t>(b) * channels + c0) * plane,
                static_cast<std::int64_t>(c1 - c0) * plane,
                out.data() + static_cast<std::int64_t>(b) * (c1 - c0) * plane);
  const bool ng = needs_grad(x);
  NodeId id = push(std::move(out), ng, {});
  if (ng)
    nodes_[id].back = [id, x, c0, c1, batch, channels, plane](Tape& t2) {
      const Tensor& g = t2.grad(id);
      Tensor& gx = t2.grad_buffer(x);
      for (int b = 0; b < batch; ++b) {
        const real* src = g.data() + static_cast<std::int64_t>(b) * (c1 - c0) * plane;
        real* dst = gx.data() + (static_cast<std::int64_t>(b) * channels + c0) * plane;
        for (std::int64_t i = 0; i < (c1 - c0) * plane; ++i) dst[i] += src[i];
      }
    };
  return id;
}

Tape::NodeId Tape::slice_batch(NodeId x, int b0, int b1) {
  const Tensor& t = value(x);
  require_rank4(t, "slice_batch");
  if (b0 < 0 || b1 > t.dim(0) || b0 >= b1) throw Error("slice_batch: bad range");
  const std::int64_t stride = t.numel() / t.dim(0);
  Tensor out({b1 - b0, t.dim(1), t.dim(2), t.dim(3)});
  std::copy_n(t.data() + b0 * stride, (b1 - b0) * stride, out.data());
  const bool ng = needs_grad(x);
  NodeId id = push(std::move(out), ng, {});
  if (ng)
    nodes_[id].back = [id, x, b0, b1, stride](Tape& t2) {
      const Tensor& g = t2.grad(id);
      Tensor& gx = t2.grad_buffer(x);
      for (std::int64_t i = 0; i < (b1 - b0) * stride; ++i) gx.v[b0 * stride + i] += g.v[i];
    };
  return id;
}

Tape::NodeId Tape::stack_batch(const std::vector<NodeId>& slots, const std::vector<Tensor>& constants,
                               const std::vector<int>& use_node) {
  const std::size_t n = use_node.size();
  if (slots.size() != n || constants.size() != n || n == 0)
    throw Error("stack_batch: inconsistent slot lists");
  const Tensor& ref = use_node[0] ? value(slots[0]) : constants[0];
  require_rank4(ref, "stack_batch");
  if (ref.dim(0) != 1) throw Error("stack_batch: slots must have batch 1");
  const std::int64_t stride = ref.numel();
  Tensor out({static_cast<int>(n), ref.dim(1), ref.dim(2), ref.dim(3)});
  bool ng = false;
  for (std::size_t i = 0; i < n; ++i) {
    const Tensor& src = use_node[i] ? value(slots[i]) : constants[i];
    if (!src.same_shape(ref)) throw Error("stack_batch: slot shape mismatch");
    std::copy_n(src.data(), stride, out.data() + static_cast<std::int64_t>(i) * stride);
    ng = ng || (use_node[i] && needs_grad(slots[i]));
  }
  NodeId id = push(std::move(out), ng, {});
  if (ng)
    nodes_[id].back = [id, slots, use_node, stride](Tape& t) {
      const Tensor& g = t.grad(id);
      for (std::size_t i = 0; i < use_node.size(); ++i) {
        if (!use_node[i] || !t.needs_grad(slots[i])) continue;
        Tensor& gx = t.grad_buffer(slots[i]);
        const real* src = g.data() + static_cast<std::int64_t>(i) * stride;
        for (std::int64_t j = 0; j < stride; ++j) gx.v[j] += src[j];
      }
    };
  return id;
}

namespace {

// spatial (M*N, C, H, W) index <-> angular (W*H, C, M, N) index.
// spatial[(um*N+vn), c, y, x] == angular[(y*W+x), c, um, vn]
void relayout_copy(const real* src, real* dst, int m, int n, int c_dim, int height, int width,
                   bool to_angular, bool accumulate) {
  const std::int64_t mn = static_cast<std::int64_t>(m) * n;
  const std::int64_t wh = static_cast<std::int64_t>(width) * height;
  parallel_for(c_dim, [&](std::int64_t c_begin, std::int64_t c_end) {
    for (std::int64_t c = c_begin; c < c_end; ++c)
      for (std::int64_t vi = 0; vi < mn; ++vi)
        for (std::int64_t p = 0; p < wh; ++p) {
          const std::int64_t spatial_idx = (vi * c_dim + c) * wh + p;
          const std::int64_t angular_idx = (p * c_dim + c) * mn + vi;
          const std::int64_t from = to_angular ? spatial_idx : angular_idx;
          const std::int64_t to = to_angular ? angular_idx : spatial_idx;
          if (accumulate)
            dst[to] += src[from];
          else
            dst[to] = src[from];
        }
  });
}

}  // namespace

Tape::NodeId Tape::relayout_to_angular(NodeId x, int m, int n, int height, int width) {
  const Tensor& t = value(x);
  require_rank4(t, "relayout");
  if (t.dim(0) != m * n || t.dim(2) != height || t.dim(3) != width)
    throw Error("relayout_to_angular: expected [M*N,C,H,W], got " + t.shape_str());
  const int c_dim = t.dim(1);
  Tensor out({width * height, c_dim, m, n});
  relayout_copy(t.data(), out.data(), m, n, c_dim, height, width, true, false);
  const bool ng = needs_grad(x);
  NodeId id = push(std::move(out), ng, {});
  if (ng)
    nodes_[id].back = [id, x, m, n, c_dim, height, width](Tape& t2) {
      // gradient flows through the inverse permutation
      relayout_copy(t2.grad(id).data(), t2.grad_buffer(x).data(), m, n, c_dim, height, width,
                    false, true);
    };
  return id;
}

Tape::NodeId Tape::relayout_to_spatial(NodeId x, int m, int n, int height, int width) {
  const Tensor& t = value(x);
  require_rank4(t, "relayout");
  if (t.dim(0) != width * height || t.dim(2) != m || t.dim(3) != n)
    throw Error("relayout_to_spatial: expected [W*H,C,M,N], got " + t.shape_str());
  const int c_dim = t.dim(1);
  Tensor out({m * n, c_dim, height, width});
  relayout_copy(t.data(), out.data(), m, n, c_dim, height, width, false, false);
  const bool ng = needs_grad(x);
  NodeId id = push(std::move(out), ng, {});
  if (ng)
    nodes_[id].back = [id, x, m, n, c_dim, height, width](Tape& t2) {
      relayout_copy(t2.grad(id).data(), t2.grad_buffer(x).data(), m, n, c_dim, height, width,
                    true, true);
    };
  return id;
}

namespace {

struct ConvDims {
  int batch, c_in, height, width, c_out, kh, kw;
};

ConvDims conv_dims(const Tensor& x, const Tensor& w, const Tensor& b) {
  require_rank4(x, "conv2d");
  require_rank4(w, "conv2d weight");
  if (b.rank() != 1) throw Error("conv2d: bias must be rank 1");
  ConvDims d{x.dim(0), x.dim(1), x.dim(2), x.dim(3), w.dim(0), w.dim(2), w.dim(3)};
  if (w.dim(1) != d.c_in)
    throw Error("conv2d: weight expects " + std::to_string(w.dim(1)) + " input channels, input has " +
                std::to_string(d.c_in));
  if (b.dim(0) != d.c_out) throw Error("conv2d: bias size mismatch");
  if (d.kh % 2 == 0 || d.kw % 2 == 0) throw Error("conv2d: kernel extents must be odd");
  return d;
}

void conv2d_forward(const real* x, const real* w, const real* b, real* out, const ConvDims& d) {
  const std::int64_t plane = static_cast<std::int64_t>(d.height) * d.width;
  const std::int64_t jobs = static_cast<std::int64_t>(d.batch) * d.c_out;
  parallel_for(jobs, [&](std::int64_t begin, std::int64_t end) {
    for (std::int64_t job = begin; job < end; ++job) {
      const int bi = static_cast<int>(job / d.c_out);
      const int co = static_cast<int>(job % d.c_out);
      real* o = out + job * plane;
      for (std::int64_t i = 0; i < plane; ++i) o[i] = b[co];
      for (int ci = 0; ci < d.c_in; ++ci) {
        const real* xin = x + (static_cast<std::int64_t>(bi) * d.c_in + ci) * plane;
        const real* wk = w + ((static_cast<std::int64_t>(co) * d.c_in + ci) * d.kh) * d.kw;
        for (int ky = 0; ky < d.kh; ++ky) {
          const int dy = ky - d.kh / 2;
          const int y0 = std::max(0, -dy), y1 = std::min(d.height, d.height - dy);
          for (int kx = 0; kx < d.kw; ++kx) {
            const real wv = wk[ky * d.kw + kx];
            if (wv == real(0)) continue;
            const int dx = kx - d.kw / 2;
            const int x0 = std::max(0, -dx), x1 = std::min(d.width, d.width - dx);
            for (int y = y0; y < y1; ++y) {
              real* orow = o + static_cast<std::int64_t>(y) * d.width;
              const real* irow = xin + static_cast<std::int64_t>(y + dy) * d.width + dx;
              for (int xx = x0; xx < x1; ++xx) orow[xx] += wv * irow[xx];
            }
          }
        }
      }
    }
  });
}

void conv2d_backward_bias(const real* g, real* gb, const ConvDims& d) {
  const std::int64_t plane = static_cast<std::int64_t>(d.height) * d.width;
  parallel_for(d.c_out, [&](std::int64_t begin, std::int64_t end) {
    for (std::int64_t co = begin; co < end; ++co) {
      real acc = 0;
      for (int bi = 0; bi < d.batch; ++bi) {
        const real* gp = g + (static_cast<std::int64_t>(bi) * d.c_out + co) * plane;
        for (std::int64_t i = 0; i < plane; ++i) acc += gp[i];
      }
      gb[co] += acc;
    }
  });
}

void conv2d_backward_weight(const real* x, const real* g, real* gw, const ConvDims& d) {
  const std::int64_t plane = static_cast<std::int64_t>(d.height) * d.width;
  parallel_for(d.c_out, [&](std::int64_t begin, std::int64_t end) {
    for (std::int64_t co = begin; co < end; ++co)
      for (int bi = 0; bi < d.batch; ++bi) {
        const real* gp = g + (static_cast<std::int64_t>(bi) * d.c_out + co) * plane;
        for (int ci = 0; ci < d.c_in; ++ci) {
          const real* xin = x + (static_cast<std::int64_t>(bi) * d.c_in + ci) * plane;
          real* wk = gw + ((co * d.c_in + ci) * d.kh) * d.kw;
          for (int ky = 0; ky < d.kh; ++ky) {
            const int dy = ky - d.kh / 2;
            const int y0 = std::max(0, -dy), y1 = std::min(d.height, d.height - dy);
            for (int kx = 0; kx < d.kw; ++kx) {
              const int dx = kx - d.kw / 2;
              const int x0 = std::max(0, -dx), x1 = std::min(d.width, d.width - dx);
              real acc = 0;
              for (int y = y0; y < y1; ++y) {
                const real* grow = gp + static_cast<std::int64_t>(y) * d.width;
                const real* irow = xin + static_cast<std::int64_t>(y + dy) * d.width + dx;
                for (int xx = x0; xx < x1; ++xx) acc += grow[xx] * irow[xx];
              }
              wk[ky * d.kw + kx] += acc;
            }
          }
        }
      }
  });
}

void conv2d_backward_input(const real* w, const real* g, real* gx, const ConvDims& d) {
  const std::int64_t plane = static_cast<std::int64_t>(d.height) * d.width;
  const std::int64_t jobs = static_cast<std::int64_t>(d.batch) * d.c_in;
  parallel_for(jobs, [&](std::int64_t begin, std::int64_t end) {
    for (std::int64_t job = begin; job < end; ++job) {
      const int bi = static_cast<int>(job / d.c_in);
      const int ci = static_cast<int>(job % d.c_in);
      real* gxin = gx + job * plane;
      for (int co = 0; co < d.c_out; ++co) {
        const real* gp = g + (static_cast<std::int64_t>(bi) * d.c_out + co) * plane;
        const real* wk = w + ((static_cast<std::int64_t>(co) * d.c_in + ci) * d.kh) * d.kw;
        for (int ky = 0; ky < d.kh; ++ky) {
          const int dy = ky - d.kh / 2;
          const int y0 = std::max(0, -dy), y1 = std::min(d.height, d.height - dy);
          for (int kx = 0; kx < d.kw; ++kx) {
            const real wv = wk[ky * d.kw + kx];
            if (wv == real(0)) continue;
            const int dx = kx - d.kw / 2;
            const int x0 = std::max(0, -dx), x1 = std::min(d.width, d.width - dx);
            for (int y = y0; y < y1; ++y) {
              const real* grow = gp + static_cast<std::int64_t>(y) * d.width;
              real* xrow = gxin + static_cast<std::int64_t>(y + dy) * d.width + dx;
              for (int xx = x0; xx < x1; ++xx) xrow[xx] += wv * grow[xx];
            }
          }
        }
      }
    }
  });
}

}  // namespace

Tape::NodeId Tape::conv2d(NodeId x, NodeId w, NodeId b) {
  const ConvDims d = conv_dims(value(x), value(w), value(b));
  Tensor out({d.batch, d.c_out, d.height, d.width});
  conv2d_forward(value(x).data(), value(w).data(), value(b).data(), out.data(), d);
  const bool ng = needs_grad(x) || needs_grad(w) || needs_grad(b);
  NodeId id = push(std::move(out), ng, {});
  if (ng)
    nodes_[id].back = [id, x, w, b, d](Tape& t) {
      const Tensor& g = t.grad(id);
      if (t.needs_grad(b)) conv2d_backward_bias(g.data(), t.grad_buffer(b).data(), d);
      if (t.needs_grad(w))
        conv2d_backward_weight(t.value(x).data(), g.data(), t.grad_buffer(w).data(), d);
      if (t.needs_grad(x))
        conv2d_backward_input(t.value(w).data(), g.data(), t.grad_buffer(x).data(), d);
    };
  return id;
}

Tape::NodeId Tape::channel_softmax(NodeId x) {
  const Tensor& t = value(x);
  require_rank4(t, "channel_softmax");
  const int batch = t.dim(0), k = t.dim(1), height = t.dim(2), width = t.dim(3);
  if (k < 1) throw Error("channel_softmax: need at least one channel");
  Tensor out(t.shape);
  const std::int64_t plane = static_cast<std::int64_t>(height) * width;
  for (int bi = 0; bi < batch; ++bi) {
    const real* in = t.data() + static_cast<std::int64_t>(bi) * k * plane;
    real* o = out.data() + static_cast<std::int64_t>(bi) * k * plane;
    for (std::int64_t p = 0; p < plane; ++p) {
      real mx = in[p];
      for (int c = 1; c < k; ++c) mx = std::max(mx, in[c * plane + p]);
      real z = 0;
      for (int c = 0; c < k; ++c) {
        const real e = std::exp(in[c * plane + p] - mx);
        o[c * plane + p] = e;
        z += e;
      }
      for (int c = 0; c < k; ++c) o[c * plane + p] /= z;
    }
  }
  const bool ng = needs_grad(x);
  NodeId id = push(std::move(out), ng, {});
  if (ng)
    nodes_[id].back = [id, x, batch, k, plane](Tape& t2) {
      const Tensor& g = t2.grad(id);
      const Tensor& y = t2.value(id);
      Tensor& gx = t2.grad_buffer(x);
      for (int bi = 0; bi < batch; ++bi) {
        const std::int64_t base = static_cast<std::int64_t>(bi) * k * plane;
        for (std::int64_t p = 0; p < plane; ++p) {
          real dot = 0;
          for (int c = 0; c < k; ++c) dot += g.v[base + c * plane + p] * y.v[base + c * plane + p];
          for (int c = 0; c < k; ++c)
            gx.v[base + c * plane + p] +=
                y.v[base + c * plane + p] * (g.v[base + c * plane + p] - dot);
        }
      }
    };
  return id;
}

Tape::NodeId Tape::warp_image(const Image& src, NodeId disparity, double du, double dv) {
  const Tensor& dten = value(disparity);
  require_rank4(dten, "warp_image");
  if (dten.dim(0) != 1 || dten.dim(1) != 1) throw Error("warp_image: disparity must be [1,1,H,W]");
  const int height = dten.dim(2), width = dten.dim(3);
  if (src.width != width || src.height != height || src.channels != 1)
    throw Error("warp_image: source/disparity shape mismatch");

  // Owned double copy of the constant source, shared with the backward pass.
  auto src_data = std::make_shared<std::vector<real>>(src.data.size());
  for (std::size_t i = 0; i < src.data.size(); ++i) (*src_data)[i] = static_cast<real>(src.data[i]);

  Tensor out({1, 1, height, width});
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      const real d = dten.v[static_cast<std::int64_t>(y) * width + x];
      out.v[static_cast<std::int64_t>(y) * width + x] = detail::bilinear_fetch<real>(
          src_data->data(), width, height, static_cast<real>(x + dv * d),
          static_cast<real>(y + du * d));
    }
  const bool ng = needs_grad(disparity);
  NodeId id = push(std::move(out), ng, {});
  if (ng)
    nodes_[id].back = [id, disparity, src_data, du, dv, width, height](Tape& t) {
      const Tensor& g = t.grad(id);
      const Tensor& dval = t.value(disparity);
      Tensor& gd = t.grad_buffer(disparity);
      for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) {
          const std::int64_t i = static_cast<std::int64_t>(y) * width + x;
          real dfdx, dfdy;
          detail::bilinear_fetch_grad<real>(src_data->data(), width, height,
                                            static_cast<real>(x + dv * dval.v[i]),
                                            static_cast<real>(y + du * dval.v[i]), &dfdx, &dfdy);
          gd.v[i] += g.v[i] * (static_cast<real>(dv) * dfdx + static_cast<real>(du) * dfdy);
        }
    };
  return id;
}

Tape::NodeId Tape::l1_to_constant(NodeId a, const Tensor& b) {
  return l1_to_constant_masked(a, b, {});
}

Tape::NodeId Tape::l1_to_constant_masked(NodeId a, const Tensor& b,
                                         const std::vector<real>& batch_weight) {
  const Tensor& va = value(a);
  check_same_shape(va, b, "l1");
  std::vector<real> weights = batch_weight;
  std::int64_t stride = va.numel();
  if (!weights.empty()) {
    require_rank4(va, "masked l1");
    if (static_cast<int>(weights.size()) != va.dim(0))
      throw Error("masked l1: weight count must equal batch extent");
    stride = va.numel() / va.dim(0);
  } else {
    weights = {real(1)};
    stride = va.numel();
  }
  real total = 0;
  for (std::size_t bi = 0; bi < weights.size(); ++bi) {
    if (weights[bi] == real(0)) continue;
    real acc = 0;
    const std::int64_t base = static_cast<std::int64_t>(bi) * stride;
    for (std::int64_t i = 0; i < stride; ++i) acc += std::abs(va.v[base + i] - b.v[base + i]);
    total += weights[bi] * acc;
  }
  Tensor out({1});
  out.v[0] = total;
  const bool ng = needs_grad(a);
  NodeId id = push(std::move(out), ng, {});
  if (ng) {
    auto bcopy = std::make_shared<Tensor>(b);
    nodes_[id].back = [id, a, bcopy, weights, stride](Tape& t) {
      const real g = t.grad(id).v[0];
      const Tensor& va2 = t.value(a);
      Tensor& ga = t.grad_buffer(a);
      for (std::size_t bi = 0; bi < weights.size(); ++bi) {
        if (weights[bi] == real(0)) continue;
        const std::int64_t base = static_cast<std::int64_t>(bi) * stride;
        for (std::int64_t i = 0; i < stride; ++i)
          ga.v[base + i] += g * weights[bi] * sign_of(va2.v[base + i] - bcopy->v[base + i]);
      }
    };
  }
  return id;
}

Tape::NodeId Tape::second_order_smoothness(NodeId disparity) {
  const Tensor& t = value(disparity);
  require_rank4(t, "second_order_smoothness");
  if (t.dim(0) != 1 || t.dim(1) != 1)
    throw Error("second_order_smoothness: expected [1,1,H,W]");
  const int height = t.dim(2), width = t.dim(3);
  if (height < 3 || width < 3) throw Error("second_order_smoothness: map smaller than 3x3");
  const auto at = [&](const std::vector<real>& v, int x, int y) -> real {
    return v[static_cast<std::int64_t>(y) * width + x];
  };
  real total = 0;
  for (int y = 0; y < height; ++y)
    for (int x = 1; x + 1 < width; ++x)
      total += std::abs(at(t.v, x + 1, y) - 2 * at(t.v, x, y) + at(t.v, x - 1, y));
  for (int y = 1; y + 1 < height; ++y)
    for (int x = 0; x < width; ++x)
      total += std::abs(at(t.v, x, y + 1) - 2 * at(t.v, x, y) + at(t.v, x, y - 1));
  // forward mixed differences coincide for xy and yx; both are retained
  for (int y = 0; y + 1 < height; ++y)
    for (int x = 0; x + 1 < width; ++x)
      total += 2 * std::abs(at(t.v, x + 1, y + 1) - at(t.v, x, y + 1) - at(t.v, x + 1, y) +
                            at(t.v, x, y));
  Tensor out({1});
  out.v[0] = total;
  const bool ng = needs_grad(disparity);
  NodeId id = push(std::move(out), ng, {});
  if (ng)
    nodes_[id].back = [id, disparity, width, height](Tape& tp) {
      const real g = tp.grad(id).v[0];
      const Tensor& v = tp.value(disparity);
      Tensor& gd = tp.grad_buffer(disparity);
      const auto at = [&](const std::vector<real>& vec, int x, int y) -> real {
        return vec[static_cast<std::int64_t>(y) * width + x];
      };
      const auto gat = [&](int x, int y) -> real& {
        return gd.v[static_cast<std::int64_t>(y) * width + x];
      };
      for (int y = 0; y < height; ++y)
        for (int x = 1; x + 1 < width; ++x) {
          const real s = g * sign_of(at(v.v, x + 1, y) - 2 * at(v.v, x, y) + at(v.v, x - 1, y));
          gat(x + 1, y) += s;
          gat(x, y) -= 2 * s;
          gat(x - 1, y) += s;
        }
      for (int y = 1; y + 1 < height; ++y)
        for (int x = 0; x < width; ++x) {
          const real s = g * sign_of(at(v.v, x, y + 1) - 2 * at(v.v, x, y) + at(v.v, x, y - 1));
          gat(x, y + 1) += s;
          gat(x, y) -= 2 * s;
          gat(x, y - 1) += s;
        }
      for (int y = 0; y + 1 < height; ++y)
        for (int x = 0; x + 1 < width; ++x) {
          const real s = 2 * g *
                         sign_of(at(v.v, x + 1, y + 1) - at(v.v, x, y + 1) - at(v.v, x + 1, y) +
                                 at(v.v, x, y));
          gat(x + 1, y + 1) += s;
          gat(x, y + 1) -= s;
          gat(x + 1, y) -= s;
          gat(x, y) += s;
        }
    };
  return id;
}

Tape::NodeId Tape::scale(NodeId x, real s) { return affine(x, s, real(0)); }

FeatureStack relayout(Tape& tape, const FeatureStack& f) {
  FeatureStack out = f;
  if (f.layout == StackLayout::kSpatial) {
    out.node = tape.relayout_to_angular(f.node, f.rows, f.cols, f.height, f.width);
    out.layout = StackLayout::kAngular;
  } else {
    out.node = tape.relayout_to_spatial(f.node, f.rows, f.cols, f.height, f.width);
    out.layout = StackLayout::kSpatial;
  }
  return out;
}

void Tape::backward(NodeId root) {
  if (value(root).numel() != 1) throw Error("backward: root must be scalar");
  if (!needs_grad(root)) return;
  grad_buffer(root).v[0] = real(1);
  for (NodeId id = root; id >= 0; --id) {
    Node& n = nodes_[id];
    if (!n.needs_grad || !n.back || n.grad.v.empty()) continue;
    n.back(*this);
  }
}

}  // namespace lfkit::nn
