#pragma once

#include <cblas.h>

#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include "s2k/nn/autodiff.hpp"

namespace s2k::nn {

// ---------------------------------------------------------------------------
// BLAS plumbing

inline void gemm(bool trans_a, bool trans_b, int m, int n, int k, float alpha,
                 const float* a, int lda, const float* b, int ldb, float beta,
                 float* c, int ldc) {
  cblas_sgemm(CblasRowMajor, trans_a ? CblasTrans : CblasNoTrans,
              trans_b ? CblasTrans : CblasNoTrans, m, n, k, alpha, a, lda, b,
              ldb, beta, c, ldc);
}

inline void gemm(bool trans_a, bool trans_b, int m, int n, int k, double alpha,
                 const double* a, int lda, const double* b, int ldb,
                 double beta, double* c, int ldc) {
  cblas_dgemm(CblasRowMajor, trans_a ? CblasTrans : CblasNoTrans,
              trans_b ? CblasTrans : CblasNoTrans, m, n, k, alpha, a, lda, b,
              ldb, beta, c, ldc);
}

// ---------------------------------------------------------------------------
// Shape helpers

template <class T>
void expect_rank(const Var<T>& v, std::size_t rank, const char* op) {
  if (!v || v->shape.size() != rank)
    throw InvalidArgument(std::string(op) + ": expected rank " +
                          std::to_string(rank) + " tensor");
}

template <class T>
void expect_same_shape(const Var<T>& a, const Var<T>& b, const char* op) {
  if (!a || !b || a->shape != b->shape)
    throw InvalidArgument(std::string(op) + ": shape mismatch");
}

template <class T>
bool any_requires(std::initializer_list<const Var<T>*> vars) {
  for (auto* v : vars)
    if (*v && (*v)->requires_grad) return true;
  return false;
}

template <class T>
Var<T> make_output(std::vector<int> shape, bool requires_grad) {
  auto out = make_var<T>(std::move(shape), requires_grad);
  return out;
}

// ---------------------------------------------------------------------------
// im2col / col2im for stride-s, pad-p convolutions, NCHW layout.
// col has one row per (c, ky, kx) and one column per output position.

template <class T>
void im2col(const T* src, int c_count, int h, int w, int kh, int kw, int s,
            int p, int oh, int ow, T* col) {
  std::size_t idx = 0;
  for (int c = 0; c < c_count; ++c) {
    const T* plane = src + std::size_t(c) * h * w;
    for (int ky = 0; ky < kh; ++ky) {
      for (int kx = 0; kx < kw; ++kx) {
        for (int oy = 0; oy < oh; ++oy) {
          int iy = oy * s - p + ky;
          if (iy < 0 || iy >= h) {
            for (int ox = 0; ox < ow; ++ox) col[idx++] = T(0);
            continue;
          }
          const T* row = plane + std::size_t(iy) * w;
          for (int ox = 0; ox < ow; ++ox) {
            int ix = ox * s - p + kx;
            col[idx++] = (ix < 0 || ix >= w) ? T(0) : row[ix];
          }
        }
      }
    }
  }
}

template <class T>
void col2im_add(const T* col, int c_count, int h, int w, int kh, int kw, int s,
                int p, int oh, int ow, T* dst) {
  std::size_t idx = 0;
  for (int c = 0; c < c_count; ++c) {
    T* plane = dst + std::size_t(c) * h * w;
    for (int ky = 0; ky < kh; ++ky) {
      for (int kx = 0; kx < kw; ++kx) {
        for (int oy = 0; oy < oh; ++oy) {
          int iy = oy * s - p + ky;
          if (iy < 0 || iy >= h) {
            idx += ow;
            continue;
          }
          T* row = plane + std::size_t(iy) * w;
          for (int ox = 0; ox < ow; ++ox) {
            int ix = ox * s - p + kx;
            if (ix >= 0 && ix < w) row[ix] += col[idx];
            ++idx;
          }
        }
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Convolutions

// x [N, C, H, W], w [F, C, kh, kw], optional b [F]. Output
// [N, F, (H + 2p - kh)/s + 1, (W + 2p - kw)/s + 1]; the padded extent
// must divide evenly by the stride so conv / conv_transpose mirror each
// other exactly.
template <class T>
Var<T> conv2d(const Var<T>& x, const Var<T>& w, const Var<T>& b, int stride,
              int pad) {
  expect_rank(x, 4, "conv2d");
  expect_rank(w, 4, "conv2d weights");
  if (stride < 1 || pad < 0) throw InvalidArgument("conv2d: bad stride/pad");

  int n = x->shape[0], c = x->shape[1], h = x->shape[2], wd = x->shape[3];
  int f = w->shape[0], kh = w->shape[2], kw = w->shape[3];
  if (w->shape[1] != c)
    throw InvalidArgument("conv2d: weight channels do not match input");
  if (b) {
    expect_rank(b, 1, "conv2d bias");
    if (b->shape[0] != f) throw InvalidArgument("conv2d: bias size mismatch");
  }
  if ((h + 2 * pad - kh) % stride != 0 || (wd + 2 * pad - kw) % stride != 0)
    throw InvalidArgument("conv2d: size does not divide by stride");
  int oh = (h + 2 * pad - kh) / stride + 1;
  int ow = (wd + 2 * pad - kw) / stride + 1;
  if (oh < 1 || ow < 1) throw InvalidArgument("conv2d: empty output");

  int ckk = c * kh * kw;
  int ohw = oh * ow;
  bool needs = any_requires<T>({&x, &w, &b});
  auto out = make_output<T>({n, f, oh, ow}, needs);

  auto cols = std::make_shared<std::vector<std::vector<T>>>();
  cols->resize(n);
  for (int i = 0; i < n; ++i) {
    auto& col = (*cols)[i];
    col.resize(std::size_t(ckk) * ohw);
    im2col(x->val.data() + std::size_t(i) * c * h * wd, c, h, wd, kh, kw,
           stride, pad, oh, ow, col.data());
    T* y = out->val.data() + std::size_t(i) * f * ohw;
    gemm(false, false, f, ohw, ckk, T(1), w->val.data(), ckk, col.data(), ohw,
         T(0), y, ohw);
    if (b)
      for (int fc = 0; fc < f; ++fc) {
        T bias = b->val[fc];
        T* row = y + std::size_t(fc) * ohw;
        for (int i2 = 0; i2 < ohw; ++i2) row[i2] += bias;
      }
  }
  check_finite(*out, "conv2d");

  out->parents = b ? std::vector<Var<T>>{x, w, b} : std::vector<Var<T>>{x, w};
  if (needs) {
    Node<T>* self = out.get();
    Var<T> xv = x, wv = w, bv = b;
    int sp = stride, pp = pad;
    out->backprop = [self, xv, wv, bv, cols, n, c, h, wd, f, kh, kw, sp, pp,
                     oh, ow, ckk, ohw]() {
      std::vector<T> gcol(std::size_t(ckk) * ohw);
      for (int i = 0; i < n; ++i) {
        const T* gy = self->grad.data() + std::size_t(i) * f * ohw;
        if (wv->requires_grad)
          gemm(false, true, f, ckk, ohw, T(1), gy, ohw, (*cols)[i].data(), ohw,
               T(1), wv->grad.data(), ckk);
        if (xv->requires_grad) {
          gemm(true, false, ckk, ohw, f, T(1), wv->val.data(), ckk, gy, ohw,
               T(0), gcol.data(), ohw);
          col2im_add(gcol.data(), c, h, wd, kh, kw, sp, pp, oh, ow,
                     xv->grad.data() + std::size_t(i) * c * h * wd);
        }
        if (bv && bv->requires_grad)
          for (int fc = 0; fc < f; ++fc) {
            const T* row = gy + std::size_t(fc) * ohw;
            T acc = T(0);
            for (int i2 = 0; i2 < ohw; ++i2) acc += row[i2];
            bv->grad[fc] += acc;
          }
      }
    };
  }
  return out;
}

// Transposed convolution (the exact adjoint of conv2d on the same
// geometry). x [N, C, H, W], w [C, F, kh, kw], optional b [F]. Output
// [N, F, (H-1)s - 2p + kh, (W-1)s - 2p + kw].
template <class T>
Var<T> conv2d_transpose(const Var<T>& x, const Var<T>& w, const Var<T>& b,
                        int stride, int pad) {
  expect_rank(x, 4, "conv2d_transpose");
  expect_rank(w, 4, "conv2d_transpose weights");
  if (stride < 1 || pad < 0)
    throw InvalidArgument("conv2d_transpose: bad stride/pad");

  int n = x->shape[0], c = x->shape[1], h = x->shape[2], wd = x->shape[3];
  int f = w->shape[1], kh = w->shape[2], kw = w->shape[3];
  if (w->shape[0] != c)
    throw InvalidArgument("conv2d_transpose: weight channels mismatch");
  if (b) {
    expect_rank(b, 1, "conv2d_transpose bias");
    if (b->shape[0] != f)
      throw InvalidArgument("conv2d_transpose: bias size mismatch");
  }
  int oh = (h - 1) * stride - 2 * pad + kh;
  int ow = (wd - 1) * stride - 2 * pad + kw;
  if (oh < 1 || ow < 1) throw InvalidArgument("conv2d_transpose: empty output");

  int fkk = f * kh * kw;
  int hw = h * wd;
  bool needs = any_requires<T>({&x, &w, &b});
  auto out = make_output<T>({n, f, oh, ow}, needs);

  std::vector<T> col(std::size_t(fkk) * hw);
  for (int i = 0; i < n; ++i) {
    // col[(f, ky, kx), (y, x)] = sum_c w[c, f, ky, kx] * x[c, y, x]
    gemm(true, false, fkk, hw, c, T(1), w->val.data(), fkk,
         x->val.data() + std::size_t(i) * c * hw, hw, T(0), col.data(), hw);
    T* y = out->val.data() + std::size_t(i) * f * oh * ow;
    col2im_add(col.data(), f, oh, ow, kh, kw, stride, pad, h, wd, y);
    if (b)
      for (int fc = 0; fc < f; ++fc) {
        T bias = b->val[fc];
        T* row = y + std::size_t(fc) * oh * ow;
        for (int i2 = 0; i2 < oh * ow; ++i2) row[i2] += bias;
      }
  }
  check_finite(*out, "conv2d_transpose");

  out->parents = b ? std::vector<Var<T>>{x, w, b} : std::vector<Var<T>>{x, w};
  if (needs) {
    Node<T>* self = out.get();
    Var<T> xv = x, wv = w, bv = b;
    int sp = stride, pp = pad;
    out->backprop = [self, xv, wv, bv, n, c, h, wd, f, kh, kw, sp, pp, oh, ow,
                     fkk, hw]() {
      std::vector<T> gcol(std::size_t(fkk) * hw);
      for (int i = 0; i < n; ++i) {
        const T* gy = self->grad.data() + std::size_t(i) * f * oh * ow;
        im2col(gy, f, oh, ow, kh, kw, sp, pp, h, wd, gcol.data());
        if (xv->requires_grad)
          gemm(false, false, c, hw, fkk, T(1), wv->val.data(), fkk,
               gcol.data(), hw, T(1),
               xv->grad.data() + std::size_t(i) * c * hw, hw);
        if (wv->requires_grad)
          gemm(false, true, c, fkk, hw, T(1),
               xv->val.data() + std::size_t(i) * c * hw, hw, gcol.data(), hw,
               T(1), wv->grad.data(), fkk);
        if (bv && bv->requires_grad)
          for (int fc = 0; fc < f; ++fc) {
            const T* row = gy + std::size_t(fc) * oh * ow;
            T acc = T(0);
            for (int i2 = 0; i2 < oh * ow; ++i2) acc += row[i2];
            bv->grad[fc] += acc;
          }
      }
    };
  }
  return out;
}

// ---------------------------------------------------------------------------
// Elementwise and shape ops

template <class T>
Var<T> add(const Var<T>& a, const Var<T>& b) {
  expect_same_shape(a, b, "add");
  bool needs = any_requires<T>({&a, &b});
  auto out = make_output<T>(a->shape, needs);
  for (std::size_t i = 0; i < out->count(); ++i)
    out->val[i] = a->val[i] + b->val[i];
  check_finite(*out, "add");
  out->parents = {a, b};
  if (needs) {
    Node<T>* self = out.get();
    Var<T> av = a, bv = b;
    out->backprop = [self, av, bv]() {
      if (av->requires_grad)
        for (std::size_t i = 0; i < self->grad.size(); ++i)
          av->grad[i] += self->grad[i];
      if (bv->requires_grad)
        for (std::size_t i = 0; i < self->grad.size(); ++i)
          bv->grad[i] += self->grad[i];
    };
  }
  return out;
}

template <class T>
Var<T> sub(const Var<T>& a, const Var<T>& b) {
  expect_same_shape(a, b, "sub");
  bool needs = any_requires<T>({&a, &b});
  auto out = make_output<T>(a->shape, needs);
  for (std::size_t i = 0; i < out->count(); ++i)
    out->val[i] = a->val[i] - b->val[i];
  check_finite(*out, "sub");
  out->parents = {a, b};
  if (needs) {
    Node<T>* self = out.get();
    Var<T> av = a, bv = b;
    out->backprop = [self, av, bv]() {
      if (av->requires_grad)
        for (std::size_t i = 0; i < self->grad.size(); ++i)
          av->grad[i] += self->grad[i];
      if (bv->requires_grad)
        for (std::size_t i = 0; i < self->grad.size(); ++i)
          bv->grad[i] -= self->grad[i];
    };
  }
  return out;
}

template <class T>
Var<T> mul(const Var<T>& a, const Var<T>& b) {
  expect_same_shape(a, b, "mul");
  bool needs = any_requires<T>({&a, &b});
  auto out = make_output<T>(a->shape, needs);
  for (std::size_t i = 0; i < out->count(); ++i)
    out->val[i] = a->val[i] * b->val[i];
  check_finite(*out, "mul");
  out->parents = {a, b};
  if (needs) {
    Node<T>* self = out.get();
    Var<T> av = a, bv = b;
    out->backprop = [self, av, bv]() {
      if (av->requires_grad)
        for (std::size_t i = 0; i < self->grad.size(); ++i)
          av->grad[i] += self->grad[i] * bv->val[i];
      if (bv->requires_grad)
        for (std::size_t i = 0; i < self->grad.size(); ++i)
          bv->grad[i] += self->grad[i] * av->val[i];
    };
  }
  return out;
}

template <class T>
Var<T> scale(const Var<T>& a, T s) {
  bool needs = a->requires_grad;
  auto out = make_output<T>(a->shape, needs);
  for (std::size_t i = 0; i < out->count(); ++i) out->val[i] = s * a->val[i];
  check_finite(*out, "scale");
  out->parents = {a};
  if (needs) {
    Node<T>* self = out.get();
    Var<T> av = a;
    out->backprop = [self, av, s]() {
      for (std::size_t i = 0; i < self->grad.size(); ++i)
        av->grad[i] += s * self->grad[i];
    };
  }
  return out;
}

template <class T>
Var<T> leaky_relu(const Var<T>& x, T slope) {
  bool needs = x->requires_grad;
  auto out = make_output<T>(x->shape, needs);
  for (std::size_t i = 0; i < out->count(); ++i) {
    T v = x->val[i];
    out->val[i] = v > T(0) ? v : slope * v;
  }
  check_finite(*out, "leaky_relu");
  out->parents = {x};
  if (needs) {
    Node<T>* self = out.get();
    Var<T> xv = x;
    out->backprop = [self, xv, slope]() {
      for (std::size_t i = 0; i < self->grad.size(); ++i)
        xv->grad[i] += self->grad[i] * (xv->val[i] > T(0) ? T(1) : slope);
    };
  }
  return out;
}

template <class T>
Var<T> relu(const Var<T>& x) {
  return leaky_relu(x, T(0));
}

template <class T>
Var<T> sigmoid(const Var<T>& x) {
  bool needs = x->requires_grad;
  auto out = make_output<T>(x->shape, needs);
  for (std::size_t i = 0; i < out->count(); ++i) {
    T v = x->val[i];
    if (v >= T(0)) {
      out->val[i] = T(1) / (T(1) + std::exp(-v));
    } else {
      T e = std::exp(v);
      out->val[i] = e / (T(1) + e);
    }
  }
  check_finite(*out, "sigmoid");
  out->parents = {x};
  if (needs) {
    Node<T>* self = out.get();
    Var<T> xv = x;
    out->backprop = [self, xv]() {
      for (std::size_t i = 0; i < self->grad.size(); ++i) {
        T y = self->val[i];
        xv->grad[i] += self->grad[i] * y * (T(1) - y);
      }
    };
  }
  return out;
}

// Per-sample, per-channel normalization over the spatial extent
// (biased variance), followed by a learned affine. x [N, C, H, W],
// gamma / beta [C].
template <class T>
Var<T> instance_norm(const Var<T>& x, const Var<T>& gamma, const Var<T>& beta,
                     T eps = T(1e-5)) {
  expect_rank(x, 4, "instance_norm");
  expect_rank(gamma, 1, "instance_norm gamma");
  expect_rank(beta, 1, "instance_norm beta");
  int n = x->shape[0], c = x->shape[1], hw = x->shape[2] * x->shape[3];
  if (gamma->shape[0] != c || beta->shape[0] != c)
    throw InvalidArgument("instance_norm: affine size mismatch");
  if (hw < 2)
    throw InvalidArgument("instance_norm: needs at least 2 spatial samples");

  bool needs = any_requires<T>({&x, &gamma, &beta});
  auto out = make_output<T>(x->shape, needs);
  auto stats = std::make_shared<std::vector<T>>();  // (mu, inv) per (n, c)
  stats->resize(std::size_t(n) * c * 2);

  for (int i = 0; i < n; ++i) {
    for (int ch = 0; ch < c; ++ch) {
      const T* src = x->val.data() + (std::size_t(i) * c + ch) * hw;
      T* dst = out->val.data() + (std::size_t(i) * c + ch) * hw;
      T mu = T(0);
      for (int k = 0; k < hw; ++k) mu += src[k];
      mu /= T(hw);
      T var = T(0);
      for (int k = 0; k < hw; ++k) {
        T d = src[k] - mu;
        var += d * d;
      }
      var /= T(hw);
      T inv = T(1) / std::sqrt(var + eps);
      (*stats)[(std::size_t(i) * c + ch) * 2] = mu;
      (*stats)[(std::size_t(i) * c + ch) * 2 + 1] = inv;
      T g = gamma->val[ch], be = beta->val[ch];
      for (int k = 0; k < hw; ++k) dst[k] = g * (src[k] - mu) * inv + be;
    }
  }
  check_finite(*out, "instance_norm");

  out->parents = {x, gamma, beta};
  if (needs) {
    Node<T>* self = out.get();
    Var<T> xv = x, gv = gamma, bv = beta;
    out->backprop = [self, xv, gv, bv, stats, n, c, hw]() {
      for (int i = 0; i < n; ++i) {
        for (int ch = 0; ch < c; ++ch) {
          std::size_t base = (std::size_t(i) * c + ch) * hw;
          const T* src = xv->val.data() + base;
          const T* gy = self->grad.data() + base;
          T mu = (*stats)[(std::size_t(i) * c + ch) * 2];
          T inv = (*stats)[(std::size_t(i) * c + ch) * 2 + 1];
          T g = gv->val[ch];

          T sum_g = T(0), sum_gx = T(0), sum_y = T(0), sum_yx = T(0);
          for (int k = 0; k < hw; ++k) {
            T xhat = (src[k] - mu) * inv;
            T gh = gy[k] * g;
            sum_g += gh;
            sum_gx += gh * xhat;
            sum_y += gy[k];
            sum_yx += gy[k] * xhat;
          }
          if (gv->requires_grad) gv->grad[ch] += sum_yx;
          if (bv->requires_grad) bv->grad[ch] += sum_y;
          if (xv->requires_grad) {
            T* gx = xv->grad.data() + base;
            T mean_g = sum_g / T(hw), mean_gx = sum_gx / T(hw);
            for (int k = 0; k < hw; ++k) {
              T xhat = (src[k] - mu) * inv;
              gx[k] += inv * (gy[k] * g - mean_g - xhat * mean_gx);
            }
          }
        }
      }
    };
  }
  return out;
}

// Concatenate along the channel axis: [N, C1, H, W] + [N, C2, H, W].
template <class T>
Var<T> concat_channels(const Var<T>& a, const Var<T>& b) {
  expect_rank(a, 4, "concat_channels");
  expect_rank(b, 4, "concat_channels");
  if (a->shape[0] != b->shape[0] || a->shape[2] != b->shape[2] ||
      a->shape[3] != b->shape[3])
    throw InvalidArgument("concat_channels: incompatible shapes");

  int n = a->shape[0], c1 = a->shape[1], c2 = b->shape[1];
  int hw = a->shape[2] * a->shape[3];
  bool needs = any_requires<T>({&a, &b});
  auto out = make_output<T>({n, c1 + c2, a->shape[2], a->shape[3]}, needs);

  for (int i = 0; i < n; ++i) {
    std::memcpy(out->val.data() + std::size_t(i) * (c1 + c2) * hw,
                a->val.data() + std::size_t(i) * c1 * hw,
                sizeof(T) * c1 * hw);
    std::memcpy(out->val.data() + (std::size_t(i) * (c1 + c2) + c1) * hw,
                b->val.data() + std::size_t(i) * c2 * hw,
                sizeof(T) * c2 * hw);
  }
  out->parents = {a, b};
  if (needs) {
    Node<T>* self = out.get();
    Var<T> av = a, bv = b;
    out->backprop = [self, av, bv, n, c1, c2, hw]() {
      for (int i = 0; i < n; ++i) {
        const T* g1 = self->grad.data() + std::size_t(i) * (c1 + c2) * hw;
        const T* g2 = g1 + std::size_t(c1) * hw;
        if (av->requires_grad) {
          T* ga = av->grad.data() + std::size_t(i) * c1 * hw;
          for (std::size_t k = 0; k < std::size_t(c1) * hw; ++k) ga[k] += g1[k];
        }
        if (bv->requires_grad) {
          T* gb = bv->grad.data() + std::size_t(i) * c2 * hw;
          for (std::size_t k = 0; k < std::size_t(c2) * hw; ++k) gb[k] += g2[k];
        }
      }
    };
  }
  return out;
}

// Cuts the graph: same values, no parents, no gradient flow.
template <class T>
Var<T> detach(const Var<T>& x) {
  auto out = make_var<T>(x->shape, false);
  out->val = x->val;
  return out;
}

// ---------------------------------------------------------------------------
// Reductions and losses

template <class T>
Var<T> sum_all(const Var<T>& x) {
  bool needs = x->requires_grad;
  auto out = make_output<T>({1}, needs);
  T acc = T(0);
  for (T v : x->val) acc += v;
  out->val[0] = acc;
  check_finite(*out, "sum_all");
  out->parents = {x};
  if (needs) {
    Node<T>* self = out.get();
    Var<T> xv = x;
    out->backprop = [self, xv]() {
      T g = self->grad[0];
      for (std::size_t i = 0; i < xv->grad.size(); ++i) xv->grad[i] += g;
    };
  }
  return out;
}

template <class T>
Var<T> mean_all(const Var<T>& x) {
  return scale(sum_all(x), T(1) / T(x->count()));
}

// L1 with SUM reduction: sum_i |a_i - b_i|. Subgradient at ties is 0.
template <class T>
Var<T> l1_loss(const Var<T>& a, const Var<T>& b) {
  expect_same_shape(a, b, "l1_loss");
  bool needs = any_requires<T>({&a, &b});
  auto out = make_output<T>({1}, needs);
  T acc = T(0);
  for (std::size_t i = 0; i < a->count(); ++i)
    acc += std::abs(a->val[i] - b->val[i]);
  out->val[0] = acc;
  check_finite(*out, "l1_loss");
  out->parents = {a, b};
  if (needs) {
    Node<T>* self = out.get();
    Var<T> av = a, bv = b;
    out->backprop = [self, av, bv]() {
      T g = self->grad[0];
      for (std::size_t i = 0; i < av->count(); ++i) {
        T d = av->val[i] - bv->val[i];
        T s = d > T(0) ? T(1) : (d < T(0) ? T(-1) : T(0));
        if (av->requires_grad) av->grad[i] += g * s;
        if (bv->requires_grad) bv->grad[i] -= g * s;
      }
    };
  }
  return out;
}

// MSE with MEAN reduction: mean_i (a_i - b_i)^2.
template <class T>
Var<T> mse_loss(const Var<T>& a, const Var<T>& b) {
  expect_same_shape(a, b, "mse_loss");
  bool needs = any_requires<T>({&a, &b});
  auto out = make_output<T>({1}, needs);
  T acc = T(0);
  for (std::size_t i = 0; i < a->count(); ++i) {
    T d = a->val[i] - b->val[i];
    acc += d * d;
  }
  out->val[0] = acc / T(a->count());
  check_finite(*out, "mse_loss");
  out->parents = {a, b};
  if (needs) {
    Node<T>* self = out.get();
    Var<T> av = a, bv = b;
    out->backprop = [self, av, bv]() {
      T g = self->grad[0] * T(2) / T(av->count());
      for (std::size_t i = 0; i < av->count(); ++i) {
        T d = av->val[i] - bv->val[i];
        if (av->requires_grad) av->grad[i] += g * d;
        if (bv->requires_grad) bv->grad[i] -= g * d;
      }
    };
  }
  return out;
}

// mean_i (a_i - t)^2 against a fixed scalar target (LSGAN objectives).
template <class T>
Var<T> mse_to_scalar(const Var<T>& a, T target) {
  bool needs = a->requires_grad;
  auto out = make_output<T>({1}, needs);
  T acc = T(0);
  for (std::size_t i = 0; i < a->count(); ++i) {
    T d = a->val[i] - target;
    acc += d * d;
  }
  out->val[0] = acc / T(a->count());
  check_finite(*out, "mse_to_scalar");
  out->parents = {a};
  if (needs) {
    Node<T>* self = out.get();
    Var<T> av = a;
    out->backprop = [self, av, target]() {
      T g = self->grad[0] * T(2) / T(av->count());
      for (std::size_t i = 0; i < av->count(); ++i)
        av->grad[i] += g * (av->val[i] - target);
    };
  }
  return out;
}

// Anisotropic total variation with SUM reduction over the last two
// axes; leading axes are treated as batch. Rank must be >= 2.
template <class T>
Var<T> tv_loss(const Var<T>& x) {
  if (!x || x->shape.size() < 2) throw InvalidArgument("tv_loss: rank < 2");
  int w = x->shape.back();
  int h = x->shape[x->shape.size() - 2];
  std::size_t planes = x->count() / (std::size_t(h) * w);

  bool needs = x->requires_grad;
  auto out = make_output<T>({1}, needs);
  T acc = T(0);
  for (std::size_t pl = 0; pl < planes; ++pl) {
    const T* p = x->val.data() + pl * h * w;
    for (int y = 0; y < h; ++y)
      for (int xx = 0; xx + 1 < w; ++xx)
        acc += std::abs(p[y * w + xx + 1] - p[y * w + xx]);
    for (int y = 0; y + 1 < h; ++y)
      for (int xx = 0; xx < w; ++xx)
        acc += std::abs(p[(y + 1) * w + xx] - p[y * w + xx]);
  }
  out->val[0] = acc;
  check_finite(*out, "tv_loss");
  out->parents = {x};
  if (needs) {
    Node<T>* self = out.get();
    Var<T> xv = x;
    out->backprop = [self, xv, h, w, planes]() {
      T g = self->grad[0];
      auto sign = [](T d) { return d > T(0) ? T(1) : (d < T(0) ? T(-1) : T(0)); };
      for (std::size_t pl = 0; pl < planes; ++pl) {
        const T* p = xv->val.data() + pl * h * w;
        T* gx = xv->grad.data() + pl * h * w;
        for (int y = 0; y < h; ++y)
          for (int xx = 0; xx + 1 < w; ++xx) {
            T s = sign(p[y * w + xx + 1] - p[y * w + xx]);
            gx[y * w + xx + 1] += g * s;
            gx[y * w + xx] -= g * s;
          }
        for (int y = 0; y + 1 < h; ++y)
          for (int xx = 0; xx < w; ++xx) {
            T s = sign(p[(y + 1) * w + xx] - p[y * w + xx]);
            gx[(y + 1) * w + xx] += g * s;
            gx[y * w + xx] -= g * s;
          }
      }
    };
  }
  return out;
}

}  // namespace s2k::nn
