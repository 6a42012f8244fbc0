#include "mmhar/nn_ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mmhar/errors.hpp"

namespace mmhar {

Tensor conv1d_valid_forward(const Tensor& x, const Tensor& w, const Tensor& b) {
  const std::int64_t n = x.dim(0), c_in = x.dim(1), len = x.dim(2);
  const std::int64_t c_out = w.dim(0), k = w.dim(2);
  if (w.dim(1) != c_in) {
    throw ShapeError("conv1d: weight expects " + std::to_string(w.dim(1)) + " input channels, got " +
                     std::to_string(c_in));
  }
  const std::int64_t out_len = len - k + 1;
  if (out_len < 1) {
    throw ShapeError("conv1d: input length " + std::to_string(len) + " shorter than kernel " +
                     std::to_string(k));
  }

  Tensor y({n, c_out, out_len});
  for (std::int64_t i = 0; i < n; ++i) {
    for (std::int64_t oc = 0; oc < c_out; ++oc) {
      const double bias = b[oc];
      for (std::int64_t t = 0; t < out_len; ++t) {
        double acc = bias;
        for (std::int64_t ic = 0; ic < c_in; ++ic) {
          const double* xrow = x.data() + (i * c_in + ic) * len + t;
          const double* wrow = w.data() + (oc * c_in + ic) * k;
          for (std::int64_t j = 0; j < k; ++j) acc += wrow[j] * xrow[j];
        }
        y.at(i, oc, t) = acc;
      }
    }
  }
  return y;
}

void conv1d_valid_backward(const Tensor& x, const Tensor& w, const Tensor& dy,
                           Tensor* dx, Tensor* dw, Tensor* db) {
  const std::int64_t n = x.dim(0), c_in = x.dim(1), len = x.dim(2);
  const std::int64_t c_out = w.dim(0), k = w.dim(2);
  const std::int64_t out_len = len - k + 1;

  if (db) {
    for (std::int64_t oc = 0; oc < c_out; ++oc) {
      double acc = 0.0;
      for (std::int64_t i = 0; i < n; ++i) {
        const double* row = dy.data() + (i * c_out + oc) * out_len;
        for (std::int64_t t = 0; t < out_len; ++t) acc += row[t];
      }
      (*db)[oc] += acc;
    }
  }
  if (dw) {
    for (std::int64_t oc = 0; oc < c_out; ++oc) {
      for (std::int64_t ic = 0; ic < c_in; ++ic) {
        double* wgrad = dw->data() + (oc * c_in + ic) * k;
        for (std::int64_t i = 0; i < n; ++i) {
          const double* dyrow = dy.data() + (i * c_out + oc) * out_len;
          const double* xrow = x.data() + (i * c_in + ic) * len;
          for (std::int64_t t = 0; t < out_len; ++t) {
            const double g = dyrow[t];
            for (std::int64_t j = 0; j < k; ++j) wgrad[j] += g * xrow[t + j];
          }
        }
      }
    }
  }
  if (dx) {
    for (std::int64_t i = 0; i < n; ++i) {
      for (std::int64_t ic = 0; ic < c_in; ++ic) {
        double* xgrad = dx->data() + (i * c_in + ic) * len;
        for (std::int64_t oc = 0; oc < c_out; ++oc) {
          const double* dyrow = dy.data() + (i * c_out + oc) * out_len;
          const double* wrow = w.data() + (oc * c_in + ic) * k;
          for (std::int64_t t = 0; t < out_len; ++t) {
            const double g = dyrow[t];
            for (std::int64_t j = 0; j < k; ++j) xgrad[t + j] += g * wrow[j];
          }
        }
      }
    }
  }
}

std::array<std::int64_t, 3> conv3d_output_dims(const std::array<std::int64_t, 3>& in,
                                               const std::array<std::int64_t, 3>& kernel,
                                               const Conv3dGeom& geom) {
  std::array<std::int64_t, 3> out{};
  for (int d = 0; d < 3; ++d) {
    const std::int64_t padded = in[static_cast<std::size_t>(d)] + 2 * geom.pad[static_cast<std::size_t>(d)];
    const std::int64_t span = padded - kernel[static_cast<std::size_t>(d)];
    if (span < 0) {
      throw ShapeError("conv3d: input " + std::to_string(in[static_cast<std::size_t>(d)]) +
                       " (+pad) smaller than kernel " +
                       std::to_string(kernel[static_cast<std::size_t>(d)]) + " on axis " +
                       std::to_string(d));
    }
    out[static_cast<std::size_t>(d)] = span / geom.stride[static_cast<std::size_t>(d)] + 1;
  }
  return out;
}

Tensor conv3d_forward(const Tensor& x, const Tensor& w, const Tensor* b, const Conv3dGeom& geom) {
  const std::int64_t n = x.dim(0), c_in = x.dim(1);
  const std::array<std::int64_t, 3> in{x.dim(2), x.dim(3), x.dim(4)};
  const std::int64_t c_out = w.dim(0);
  if (w.dim(1) != c_in) {
    throw ShapeError("conv3d: weight expects " + std::to_string(w.dim(1)) + " input channels, got " +
                     std::to_string(c_in));
  }
  const std::array<std::int64_t, 3> kernel{w.dim(2), w.dim(3), w.dim(4)};
  const auto out = conv3d_output_dims(in, kernel, geom);
  const std::int64_t ot = out[0], oh = out[1], ow = out[2];
  const std::int64_t it = in[0], ih = in[1], iw = in[2];
  const std::int64_t kt = kernel[0], kh = kernel[1], kw = kernel[2];
  const std::int64_t st = geom.stride[0], sh = geom.stride[1], sw = geom.stride[2];
  const std::int64_t pt = geom.pad[0], ph = geom.pad[1], pw = geom.pad[2];

  Tensor y({n, c_out, ot, oh, ow});
#ifdef _OPENMP
#pragma omp parallel for collapse(2) schedule(static)
#endif
  for (std::int64_t i = 0; i < n; ++i) {
    for (std::int64_t oc = 0; oc < c_out; ++oc) {
      const double bias = b ? (*b)[oc] : 0.0;
      double* ybase = y.data() + ((i * c_out + oc) * ot) * oh * ow;
      for (std::int64_t zt = 0; zt < ot; ++zt) {
        for (std::int64_t zy = 0; zy < oh; ++zy) {
          for (std::int64_t zx = 0; zx < ow; ++zx) {
            double acc = bias;
            const std::int64_t t0 = zt * st - pt, y0 = zy * sh - ph, x0 = zx * sw - pw;
            for (std::int64_t ic = 0; ic < c_in; ++ic) {
              const double* xc = x.data() + ((i * c_in + ic) * it) * ih * iw;
              const double* wc = w.data() + ((oc * c_in + ic) * kt) * kh * kw;
              for (std::int64_t jt = 0; jt < kt; ++jt) {
                const std::int64_t tt = t0 + jt;
                if (tt < 0 || tt >= it) continue;
                for (std::int64_t jy = 0; jy < kh; ++jy) {
                  const std::int64_t yy = y0 + jy;
                  if (yy < 0 || yy >= ih) continue;
                  const double* xrow = xc + (tt * ih + yy) * iw;
                  const double* wrow = wc + (jt * kh + jy) * kw;
                  for (std::int64_t jx = 0; jx < kw; ++jx) {
                    const std::int64_t xx = x0 + jx;
                    if (xx < 0 || xx >= iw) continue;
                    acc += wrow[jx] * xrow[xx];
                  }
                }
              }
            }
            ybase[(zt * oh + zy) * ow + zx] = acc;
          }
        }
      }
    }
  }
  return y;
}

void conv3d_backward(const Tensor& x, const Tensor& w, const Tensor& dy, const Conv3dGeom& geom,
                     Tensor* dx, Tensor* dw, Tensor* db) {
  const std::int64_t n = x.dim(0), c_in = x.dim(1);
  const std::int64_t it = x.dim(2), ih = x.dim(3), iw = x.dim(4);
  const std::int64_t c_out = w.dim(0);
  const std::int64_t kt = w.dim(2), kh = w.dim(3), kw = w.dim(4);
  const std::int64_t ot = dy.dim(2), oh = dy.dim(3), ow = dy.dim(4);
  const std::int64_t st = geom.stride[0], sh = geom.stride[1], sw = geom.stride[2];
  const std::int64_t pt = geom.pad[0], ph = geom.pad[1], pw = geom.pad[2];

  if (db) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (std::int64_t oc = 0; oc < c_out; ++oc) {
      double acc = 0.0;
      for (std::int64_t i = 0; i < n; ++i) {
        const double* row = dy.data() + ((i * c_out + oc) * ot) * oh * ow;
        for (std::int64_t z = 0; z < ot * oh * ow; ++z) acc += row[z];
      }
      (*db)[oc] += acc;
    }
  }

  if (dw) {
#ifdef _OPENMP
#pragma omp parallel for collapse(2) schedule(static)
#endif
    for (std::int64_t oc = 0; oc < c_out; ++oc) {
      for (std::int64_t ic = 0; ic < c_in; ++ic) {
        double* wg = dw->data() + ((oc * c_in + ic) * kt) * kh * kw;
        for (std::int64_t i = 0; i < n; ++i) {
          const double* dyc = dy.data() + ((i * c_out + oc) * ot) * oh * ow;
          const double* xc = x.data() + ((i * c_in + ic) * it) * ih * iw;
          for (std::int64_t zt = 0; zt < ot; ++zt) {
            const std::int64_t t0 = zt * st - pt;
            for (std::int64_t zy = 0; zy < oh; ++zy) {
              const std::int64_t y0 = zy * sh - ph;
              for (std::int64_t zx = 0; zx < ow; ++zx) {
                const double g = dyc[(zt * oh + zy) * ow + zx];
                if (g == 0.0) continue;
                const std::int64_t x0 = zx * sw - pw;
                for (std::int64_t jt = 0; jt < kt; ++jt) {
                  const std::int64_t tt = t0 + jt;
                  if (tt < 0 || tt >= it) continue;
                  for (std::int64_t jy = 0; jy < kh; ++jy) {
                    const std::int64_t yy = y0 + jy;
                    if (yy < 0 || yy >= ih) continue;
                    const double* xrow = xc + (tt * ih + yy) * iw;
                    double* wrow = wg + (jt * kh + jy) * kw;
                    for (std::int64_t jx = 0; jx < kw; ++jx) {
                      const std::int64_t xx = x0 + jx;
                      if (xx < 0 || xx >= iw) continue;
                      wrow[jx] += g * xrow[xx];
                    }
                  }
                }
              }
            }
          }
        }
      }
    }
  }

  if (dx) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (std::int64_t i = 0; i < n; ++i) {
      for (std::int64_t oc = 0; oc < c_out; ++oc) {
        const double* dyc = dy.data() + ((i * c_out + oc) * ot) * oh * ow;
        for (std::int64_t ic = 0; ic < c_in; ++ic) {
          double* xg = dx->data() + ((i * c_in + ic) * it) * ih * iw;
          const double* wc = w.data() + ((oc * c_in + ic) * kt) * kh * kw;
          for (std::int64_t zt = 0; zt < ot; ++zt) {
            const std::int64_t t0 = zt * st - pt;
            for (std::int64_t zy = 0; zy < oh; ++zy) {
              const std::int64_t y0 = zy * sh - ph;
              for (std::int64_t zx = 0; zx < ow; ++zx) {
                const double g = dyc[(zt * oh + zy) * ow + zx];
                if (g == 0.0) continue;
                const std::int64_t x0 = zx * sw - pw;
                for (std::int64_t jt = 0; jt < kt; ++jt) {
                  const std::int64_t tt = t0 + jt;
                  if (tt < 0 || tt >= it) continue;
                  for (std::int64_t jy = 0; jy < kh; ++jy) {
                    const std::int64_t yy = y0 + jy;
                    if (yy < 0 || yy >= ih) continue;
                    double* xrow = xg + (tt * ih + yy) * iw;
                    const double* wrow = wc + (jt * kh + jy) * kw;
                    for (std::int64_t jx = 0; jx < kw; ++jx) {
                      const std::int64_t xx = x0 + jx;
                      if (xx < 0 || xx >= iw) continue;
                      xrow[xx] += g * wrow[jx];
                    }
                  }
                }
              }
            }
          }
        }
      }
    }
  }
}

MaxPool3dResult maxpool3d_forward(const Tensor& x, const Pool3dGeom& geom) {
  const std::int64_t n = x.dim(0), c = x.dim(1);
  const std::array<std::int64_t, 3> in{x.dim(2), x.dim(3), x.dim(4)};
  Conv3dGeom as_conv;
  as_conv.stride = geom.stride;
  as_conv.pad = geom.pad;
  const auto out = conv3d_output_dims(
      in, {geom.kernel[0], geom.kernel[1], geom.kernel[2]}, as_conv);
  const std::int64_t ot = out[0], oh = out[1], ow = out[2];
  const std::int64_t it = in[0], ih = in[1], iw = in[2];

  MaxPool3dResult res;
  res.y = Tensor({n, c, ot, oh, ow});
  res.argmax.assign(static_cast<std::size_t>(res.y.numel()), -1);

  std::int64_t idx = 0;
  for (std::int64_t i = 0; i < n; ++i) {
    for (std::int64_t ch = 0; ch < c; ++ch) {
      const double* xc = x.data() + ((i * c + ch) * it) * ih * iw;
      const std::int64_t base = ((i * c + ch) * it) * ih * iw;
      for (std::int64_t zt = 0; zt < ot; ++zt) {
        for (std::int64_t zy = 0; zy < oh; ++zy) {
          for (std::int64_t zx = 0; zx < ow; ++zx, ++idx) {
            double best = -std::numeric_limits<double>::infinity();
            std::int64_t best_off = -1;
            for (std::int64_t jt = 0; jt < geom.kernel[0]; ++jt) {
              const std::int64_t tt = zt * geom.stride[0] - geom.pad[0] + jt;
              if (tt < 0 || tt >= it) continue;
              for (std::int64_t jy = 0; jy < geom.kernel[1]; ++jy) {
                const std::int64_t yy = zy * geom.stride[1] - geom.pad[1] + jy;
                if (yy < 0 || yy >= ih) continue;
                for (std::int64_t jx = 0; jx < geom.kernel[2]; ++jx) {
                  const std::int64_t xx = zx * geom.stride[2] - geom.pad[2] + jx;
                  if (xx < 0 || xx >= iw) continue;
                  const double v = xc[(tt * ih + yy) * iw + xx];
                  if (v > best) {
                    best = v;
                    best_off = base + (tt * ih + yy) * iw + xx;
                  }
                }
              }
            }
            if (best_off < 0) throw ShapeError("maxpool3d: window contains no valid element");
            res.y[idx] = best;
            res.argmax[static_cast<std::size_t>(idx)] = best_off;
          }
        }
      }
    }
  }
  return res;
}

Tensor maxpool3d_backward(const Tensor& x, const MaxPool3dResult& fwd, const Tensor& dy) {
  Tensor dx = Tensor::zeros(x.shape());
  for (std::int64_t i = 0; i < dy.numel(); ++i) {
    dx[fwd.argmax[static_cast<std::size_t>(i)]] += dy[i];
  }
  return dx;
}

Tensor relu(const Tensor& x) {
  Tensor y = x;
  for (double& v : y.values()) v = v > 0.0 ? v : 0.0;
  return y;
}

Tensor relu_backward(const Tensor& pre, const Tensor& dy) {
  Tensor dx = dy;
  const double* p = pre.data();
  for (std::int64_t i = 0; i < dx.numel(); ++i) {
    if (p[i] <= 0.0) dx[i] = 0.0;
  }
  return dx;
}

Tensor dropout_mask(const std::vector<std::int64_t>& shape, double rate, Rng& rng) {
  if (rate < 0.0 || rate >= 1.0) throw Error("dropout: rate must be in [0, 1)");
  Tensor mask(shape);
  const double keep = 1.0 - rate;
  const double scale = 1.0 / keep;
  for (double& v : mask.values()) v = rng.uniform() < keep ? scale : 0.0;
  return mask;
}

Tensor apply_mask(const Tensor& x, const Tensor& mask) {
  Tensor y = x;
  for (std::int64_t i = 0; i < y.numel(); ++i) y[i] *= mask[i];
  return y;
}

Tensor global_avg_pool1d(const Tensor& x) {
  const std::int64_t n = x.dim(0), c = x.dim(1), len = x.dim(2);
  Tensor y({n, c});
  for (std::int64_t i = 0; i < n; ++i) {
    for (std::int64_t ch = 0; ch < c; ++ch) {
      const double* row = x.data() + (i * c + ch) * len;
      double acc = 0.0;
      for (std::int64_t t = 0; t < len; ++t) acc += row[t];
      y.at(i, ch) = acc / static_cast<double>(len);
    }
  }
  return y;
}

Tensor global_avg_pool1d_backward(const Tensor& x, const Tensor& dfeat) {
  const std::int64_t n = x.dim(0), c = x.dim(1), len = x.dim(2);
  Tensor dx(x.shape());
  for (std::int64_t i = 0; i < n; ++i) {
    for (std::int64_t ch = 0; ch < c; ++ch) {
      const double g = dfeat.at(i, ch) / static_cast<double>(len);
      double* row = dx.data() + (i * c + ch) * len;
      for (std::int64_t t = 0; t < len; ++t) row[t] = g;
    }
  }
  return dx;
}

Tensor global_avg_pool3d(const Tensor& x) {
  const std::int64_t n = x.dim(0), c = x.dim(1);
  const std::int64_t spatial = x.dim(2) * x.dim(3) * x.dim(4);
  Tensor y({n, c});
  for (std::int64_t i = 0; i < n; ++i) {
    for (std::int64_t ch = 0; ch < c; ++ch) {
      const double* row = x.data() + (i * c + ch) * spatial;
      double acc = 0.0;
      for (std::int64_t z = 0; z < spatial; ++z) acc += row[z];
      y.at(i, ch) = acc / static_cast<double>(spatial);
    }
  }
  return y;
}

Tensor global_avg_pool3d_backward(const Tensor& x, const Tensor& dfeat) {
  const std::int64_t n = x.dim(0), c = x.dim(1);
  const std::int64_t spatial = x.dim(2) * x.dim(3) * x.dim(4);
  Tensor dx(x.shape());
  for (std::int64_t i = 0; i < n; ++i) {
    for (std::int64_t ch = 0; ch < c; ++ch) {
      const double g = dfeat.at(i, ch) / static_cast<double>(spatial);
      double* row = dx.data() + (i * c + ch) * spatial;
      for (std::int64_t z = 0; z < spatial; ++z) row[z] = g;
    }
  }
  return dx;
}

Tensor batchnorm_fixed_forward(const Tensor& x, const Tensor& gamma, const Tensor& beta,
                               const Tensor& mean, const Tensor& var, double eps) {
  const std::int64_t n = x.dim(0), c = x.dim(1);
  const std::int64_t spatial = x.numel() / (n * c);
  Tensor y(x.shape());
  for (std::int64_t ch = 0; ch < c; ++ch) {
    const double inv_std = 1.0 / std::sqrt(var[ch] + eps);
    const double scale = gamma[ch] * inv_std;
    const double shift = beta[ch] - mean[ch] * scale;
    for (std::int64_t i = 0; i < n; ++i) {
      const double* xr = x.data() + (i * c + ch) * spatial;
      double* yr = y.data() + (i * c + ch) * spatial;
      for (std::int64_t z = 0; z < spatial; ++z) yr[z] = xr[z] * scale + shift;
    }
  }
  return y;
}

void batchnorm_fixed_backward(const Tensor& x, const Tensor& gamma, const Tensor& mean,
                              const Tensor& var, double eps, const Tensor& dy, Tensor* dx,
                              Tensor* dgamma, Tensor* dbeta) {
  const std::int64_t n = x.dim(0), c = x.dim(1);
  const std::int64_t spatial = x.numel() / (n * c);
  for (std::int64_t ch = 0; ch < c; ++ch) {
    const double inv_std = 1.0 / std::sqrt(var[ch] + eps);
    const double scale = gamma[ch] * inv_std;
    double g_acc = 0.0, b_acc = 0.0;
    for (std::int64_t i = 0; i < n; ++i) {
      const double* xr = x.data() + (i * c + ch) * spatial;
      const double* dyr = dy.data() + (i * c + ch) * spatial;
      double* dxr = dx ? dx->data() + (i * c + ch) * spatial : nullptr;
      for (std::int64_t z = 0; z < spatial; ++z) {
        if (dxr) dxr[z] += dyr[z] * scale;
        g_acc += dyr[z] * (xr[z] - mean[ch]) * inv_std;
        b_acc += dyr[z];
      }
    }
    if (dgamma) (*dgamma)[ch] += g_acc;
    if (dbeta) (*dbeta)[ch] += b_acc;
  }
}

Tensor linear_forward(const Tensor& x, const Tensor& w, const Tensor& b) {
  const std::int64_t n = x.dim(0), in_dim = x.dim(1);
  const std::int64_t out_dim = w.dim(0);
  if (w.dim(1) != in_dim) {
    throw ShapeError("linear: weight expects " + std::to_string(w.dim(1)) + " inputs, got " +
                     std::to_string(in_dim));
  }
  Tensor y({n, out_dim});
  for (std::int64_t i = 0; i < n; ++i) {
    const double* xr = x.data() + i * in_dim;
    for (std::int64_t o = 0; o < out_dim; ++o) {
      const double* wr = w.data() + o * in_dim;
      double acc = b[o];
      for (std::int64_t j = 0; j < in_dim; ++j) acc += wr[j] * xr[j];
      y.at(i, o) = acc;
    }
  }
  return y;
}

void linear_backward(const Tensor& x, const Tensor& w, const Tensor& dy, Tensor* dx, Tensor* dw,
                     Tensor* db) {
  const std::int64_t n = x.dim(0), in_dim = x.dim(1);
  const std::int64_t out_dim = w.dim(0);
  if (db) {
    for (std::int64_t o = 0; o < out_dim; ++o) {
      double acc = 0.0;
      for (std::int64_t i = 0; i < n; ++i) acc += dy.at(i, o);
      (*db)[o] += acc;
    }
  }
  if (dw) {
    for (std::int64_t o = 0; o < out_dim; ++o) {
      double* wr = dw->data() + o * in_dim;
      for (std::int64_t i = 0; i < n; ++i) {
        const double g = dy.at(i, o);
        const double* xr = x.data() + i * in_dim;
        for (std::int64_t j = 0; j < in_dim; ++j) wr[j] += g * xr[j];
      }
    }
  }
  if (dx) {
    for (std::int64_t i = 0; i < n; ++i) {
      double* xr = dx->data() + i * in_dim;
      for (std::int64_t o = 0; o < out_dim; ++o) {
        const double g = dy.at(i, o);
        const double* wr = w.data() + o * in_dim;
        for (std::int64_t j = 0; j < in_dim; ++j) xr[j] += g * wr[j];
      }
    }
  }
}

Tensor softmax(const Tensor& logits) {
  const std::int64_t n = logits.dim(0), c = logits.dim(1);
  Tensor probs(logits.shape());
  for (std::int64_t i = 0; i < n; ++i) {
    const double* row = logits.data() + i * c;
    double mx = row[0];
    for (std::int64_t j = 1; j < c; ++j) mx = std::max(mx, row[j]);
    double z = 0.0;
    double* out = probs.data() + i * c;
    for (std::int64_t j = 0; j < c; ++j) {
      out[j] = std::exp(row[j] - mx);
      z += out[j];
    }
    for (std::int64_t j = 0; j < c; ++j) out[j] /= z;
  }
  return probs;
}

double softmax_cross_entropy(const Tensor& logits, const std::vector<int>& labels,
                             Tensor* dlogits) {
  const std::int64_t n = logits.dim(0), c = logits.dim(1);
  if (static_cast<std::int64_t>(labels.size()) != n) {
    throw ShapeError("cross_entropy: batch of " + std::to_string(n) + " logit rows vs " +
                     std::to_string(labels.size()) + " labels");
  }
  if (dlogits) *dlogits = Tensor::zeros(logits.shape());

  double total = 0.0;
  for (std::int64_t i = 0; i < n; ++i) {
    const int label = labels[static_cast<std::size_t>(i)];
    if (label < 0 || label >= c) {
      throw Error("cross_entropy: label " + std::to_string(label) + " outside [0, " +
                  std::to_string(c) + ")");
    }
    const double* row = logits.data() + i * c;
    double mx = row[0];
    for (std::int64_t j = 1; j < c; ++j) mx = std::max(mx, row[j]);
    double z = 0.0;
    for (std::int64_t j = 0; j < c; ++j) z += std::exp(row[j] - mx);
    const double log_z = std::log(z) + mx;
    total += log_z - row[label];

    if (dlogits) {
      double* drow = dlogits->data() + i * c;
      for (std::int64_t j = 0; j < c; ++j) {
        drow[j] = std::exp(row[j] - log_z) / static_cast<double>(n);
      }
      drow[label] -= 1.0 / static_cast<double>(n);
    }
  }
  return total / static_cast<double>(n);
}

Tensor uniform_fan_in_init(const std::vector<std::int64_t>& shape, std::int64_t fan_in, Rng& rng) {
  Tensor t(shape);
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  for (double& v : t.values()) v = rng.uniform(-bound, bound);
  return t;
}

}  // namespace mmhar
