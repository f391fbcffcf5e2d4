// Copyright 2026 The tclab Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "tcl/numerics/ops.h"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <string>

#include "tcl/error.h"
#include "tcl/numerics/kernels.h"

namespace tcl::ops {

namespace {

using Grad = const Tensor&;

void require_same_tape(Var a, Var b) {
  if (a.tape() != b.tape()) throw DomainError("ops on vars from different tapes");
}

void require_matrix(const Tensor& t, const char* op) {
  if (t.rank() != 2) {
    throw ShapeError(std::string(op) + ": expected a matrix, got " +
                     t.shape_string());
  }
}

[[noreturn]] void mismatch(const char* op, const Tensor& a, const Tensor& b) {
  throw ShapeError(std::string(op) + ": incompatible shapes " +
                   a.shape_string() + " and " + b.shape_string());
}

void accumulate(Tensor& dst, const Tensor& src) {
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
}

double normal_cdf(double v) {
  return 0.5 * (1.0 + std::erf(v / std::numbers::sqrt2));
}

}  // namespace

Var matmul(Var a, Var b) {
  require_same_tape(a, b);
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  require_matrix(av, "matmul");
  require_matrix(bv, "matmul");
  if (av.dim(1) != bv.dim(0)) mismatch("matmul", av, bv);
  const std::size_t m = av.dim(0), k = av.dim(1), n = bv.dim(1);
  Tensor out({m, n});
  kernels::gemm_nn(av.data(), bv.data(), out.data(), m, k, n, false);
  return a.tape()->record(std::move(out), {a, b},
                          [a, b, m, k, n](Tape& tape, Grad g, Grad) {
    if (tape.needs_grad(a)) {
      kernels::gemm_nt(g.data(), b.value().data(),
                       tape.grad_buffer(a).data(), m, n, k, true);
    }
    if (tape.needs_grad(b)) {
      kernels::gemm_tn(a.value().data(), g.data(),
                       tape.grad_buffer(b).data(), k, m, n, true);
    }
  });
}

Var add(Var a, Var b) {
  require_same_tape(a, b);
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  if (!av.same_shape(bv)) mismatch("add", av, bv);
  Tensor out = av;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += bv[i];
  return a.tape()->record(std::move(out), {a, b},
                          [a, b](Tape& tape, Grad g, Grad) {
    if (tape.needs_grad(a)) accumulate(tape.grad_buffer(a), g);
    if (tape.needs_grad(b)) accumulate(tape.grad_buffer(b), g);
  });
}

Var add_bias(Var x, Var bias) {
  require_same_tape(x, bias);
  const Tensor& xv = x.value();
  const Tensor& bv = bias.value();
  require_matrix(xv, "add_bias");
  if (bv.size() != xv.dim(1)) mismatch("add_bias", xv, bv);
  const std::size_t rows = xv.dim(0), cols = xv.dim(1);
  Tensor out = xv;
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) out[r * cols + c] += bv[c];
  }
  return x.tape()->record(std::move(out), {x, bias},
                          [x, bias, rows, cols](Tape& tape, Grad g, Grad) {
    if (tape.needs_grad(x)) accumulate(tape.grad_buffer(x), g);
    if (tape.needs_grad(bias)) {
      Tensor& gb = tape.grad_buffer(bias);
      for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) gb[c] += g[r * cols + c];
      }
    }
  });
}

Var multiply(Var a, Var b) {
  require_same_tape(a, b);
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  if (!av.same_shape(bv)) mismatch("multiply", av, bv);
  Tensor out = av;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= bv[i];
  return a.tape()->record(std::move(out), {a, b},
                          [a, b](Tape& tape, Grad g, Grad) {
    if (tape.needs_grad(a)) {
      Tensor& ga = tape.grad_buffer(a);
      const Tensor& bv = b.value();
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * bv[i];
    }
    if (tape.needs_grad(b)) {
      Tensor& gb = tape.grad_buffer(b);
      const Tensor& av = a.value();
      for (std::size_t i = 0; i < g.size(); ++i) gb[i] += g[i] * av[i];
    }
  });
}

Var scale(Var a, double factor) {
  Tensor out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= factor;
  return a.tape()->record(std::move(out), {a},
                          [a, factor](Tape& tape, Grad g, Grad) {
    Tensor& ga = tape.grad_buffer(a);
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * factor;
  });
}

Var linear(Var x, Var weight, Var bias) {
  return add_bias(matmul(x, weight), bias);
}

Var gelu(Var x) {
  Tensor out = x.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= normal_cdf(out[i]);
  return x.tape()->record(std::move(out), {x}, [x](Tape& tape, Grad g, Grad) {
    Tensor& gx = tape.grad_buffer(x);
    const Tensor& xv = x.value();
    const double inv_sqrt_2pi = 0.5 * std::numbers::inv_sqrtpi * std::numbers::sqrt2;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double v = xv[i];
      gx[i] += g[i] * (normal_cdf(v) + v * inv_sqrt_2pi * std::exp(-0.5 * v * v));
    }
  });
}

Var softmax(Var x) {
  const Tensor& xv = x.value();
  const std::size_t rows = xv.rows(), cols = xv.cols();
  Tensor out(xv.shape());
  for (std::size_t r = 0; r < rows; ++r) {
    const double* in = xv.data().data() + r * cols;
    double* o = out.data().data() + r * cols;
    const double mx = *std::max_element(in, in + cols);
    double z = 0.0;
    for (std::size_t c = 0; c < cols; ++c) {
      o[c] = std::exp(in[c] - mx);
      z += o[c];
    }
    for (std::size_t c = 0; c < cols; ++c) o[c] /= z;
  }
  return x.tape()->record(std::move(out), {x},
                          [x, rows, cols](Tape& tape, Grad g, Grad y) {
    Tensor& gx = tape.grad_buffer(x);
    for (std::size_t r = 0; r < rows; ++r) {
      const std::size_t off = r * cols;
      double dot = 0.0;
      for (std::size_t c = 0; c < cols; ++c) dot += g[off + c] * y[off + c];
      for (std::size_t c = 0; c < cols; ++c) {
        gx[off + c] += y[off + c] * (g[off + c] - dot);
      }
    }
  });
}

Var layer_norm(Var x, Var gamma, Var beta, double epsilon) {
  require_same_tape(x, gamma);
  require_same_tape(x, beta);
  const Tensor& xv = x.value();
  const std::size_t rows = xv.rows(), cols = xv.cols();
  if (gamma.value().size() != cols) mismatch("layer_norm", xv, gamma.value());
  if (beta.value().size() != cols) mismatch("layer_norm", xv, beta.value());
  auto normalized = std::make_shared<Tensor>(xv.shape());
  auto inv_std = std::make_shared<std::vector<double>>(rows);
  Tensor out(xv.shape());
  const Tensor& gv = gamma.value();
  const Tensor& bv = beta.value();
  for (std::size_t r = 0; r < rows; ++r) {
    const double* in = xv.data().data() + r * cols;
    double mean = 0.0;
    for (std::size_t c = 0; c < cols; ++c) mean += in[c];
    mean /= static_cast<double>(cols);
    double var = 0.0;
    for (std::size_t c = 0; c < cols; ++c) var += (in[c] - mean) * (in[c] - mean);
    var /= static_cast<double>(cols);
    const double is = 1.0 / std::sqrt(var + epsilon);
    (*inv_std)[r] = is;
    for (std::size_t c = 0; c < cols; ++c) {
      const double xh = (in[c] - mean) * is;
      (*normalized)[r * cols + c] = xh;
      out[r * cols + c] = gv[c] * xh + bv[c];
    }
  }
  return x.tape()->record(
      std::move(out), {x, gamma, beta},
      [x, gamma, beta, rows, cols, normalized, inv_std](Tape& tape, Grad g, Grad) {
        const Tensor& xh = *normalized;
        if (tape.needs_grad(gamma)) {
          Tensor& gg = tape.grad_buffer(gamma);
          for (std::size_t r = 0; r < rows; ++r) {
            for (std::size_t c = 0; c < cols; ++c) {
              gg[c] += g[r * cols + c] * xh[r * cols + c];
            }
          }
        }
        if (tape.needs_grad(beta)) {
          Tensor& gb = tape.grad_buffer(beta);
          for (std::size_t r = 0; r < rows; ++r) {
            for (std::size_t c = 0; c < cols; ++c) gb[c] += g[r * cols + c];
          }
        }
        if (tape.needs_grad(x)) {
          Tensor& gx = tape.grad_buffer(x);
          const Tensor& gv = gamma.value();
          const double inv_n = 1.0 / static_cast<double>(cols);
          for (std::size_t r = 0; r < rows; ++r) {
            const std::size_t off = r * cols;
            double mean_d = 0.0, mean_dx = 0.0;
            for (std::size_t c = 0; c < cols; ++c) {
              const double d = g[off + c] * gv[c];
              mean_d += d;
              mean_dx += d * xh[off + c];
            }
            mean_d *= inv_n;
            mean_dx *= inv_n;
            for (std::size_t c = 0; c < cols; ++c) {
              const double d = g[off + c] * gv[c];
              gx[off + c] += (*inv_std)[r] * (d - mean_d - xh[off + c] * mean_dx);
            }
          }
        }
      });
}

Var embedding(Var table, std::span<const int> indices) {
  const Tensor& tv = table.value();
  require_matrix(tv, "embedding");
  const std::size_t vocab = tv.dim(0), dim = tv.dim(1);
  Tensor out({indices.size(), dim});
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const int id = indices[i];
    if (id < 0 || static_cast<std::size_t>(id) >= vocab) {
      throw ShapeError("embedding: index " + std::to_string(id) +
                       " out of range for table " + tv.shape_string());
    }
    std::copy_n(tv.data().begin() + static_cast<std::size_t>(id) * dim, dim,
                out.data().begin() + i * dim);
  }
  std::vector<int> ids(indices.begin(), indices.end());
  return table.tape()->record(std::move(out), {table},
                              [table, ids = std::move(ids), dim](Tape& tape, Grad g, Grad) {
    Tensor& gt = tape.grad_buffer(table);
    for (std::size_t i = 0; i < ids.size(); ++i) {
      const std::size_t base = static_cast<std::size_t>(ids[i]) * dim;
      for (std::size_t c = 0; c < dim; ++c) gt[base + c] += g[i * dim + c];
    }
  });
}

Var concat(const std::vector<Var>& parts, std::size_t axis) {
  if (parts.empty()) throw ShapeError("concat: no inputs");
  if (axis > 1) throw ShapeError("concat: axis must be 0 or 1");
  const Tensor& first = parts.front().value();
  require_matrix(first, "concat");
  std::size_t rows = first.dim(0), cols = first.dim(1);
  std::vector<std::size_t> offsets{0};
  for (std::size_t p = 1; p < parts.size(); ++p) {
    require_same_tape(parts[0], parts[p]);
    const Tensor& t = parts[p].value();
    require_matrix(t, "concat");
    if (axis == 0) {
      if (t.dim(1) != cols) mismatch("concat", first, t);
    } else if (t.dim(0) != rows) {
      mismatch("concat", first, t);
    }
  }
  std::size_t total = 0;
  for (const Var& part : parts) {
    total += part.value().dim(axis);
    offsets.push_back(total);
  }
  if (axis == 0) rows = total; else cols = total;
  Tensor out({rows, cols});
  for (std::size_t p = 0; p < parts.size(); ++p) {
    const Tensor& t = parts[p].value();
    const std::size_t tr = t.dim(0), tc = t.dim(1);
    for (std::size_t r = 0; r < tr; ++r) {
      for (std::size_t c = 0; c < tc; ++c) {
        const std::size_t orow = axis == 0 ? offsets[p] + r : r;
        const std::size_t ocol = axis == 0 ? c : offsets[p] + c;
        out[orow * cols + ocol] = t[r * tc + c];
      }
    }
  }
  return parts[0].tape()->record(
      std::move(out), parts, [parts, offsets, axis, cols](Tape& tape, Grad g, Grad) {
        for (std::size_t p = 0; p < parts.size(); ++p) {
          if (!tape.needs_grad(parts[p])) continue;
          Tensor& gp = tape.grad_buffer(parts[p]);
          const std::size_t tr = gp.dim(0), tc = gp.dim(1);
          for (std::size_t r = 0; r < tr; ++r) {
            for (std::size_t c = 0; c < tc; ++c) {
              const std::size_t orow = axis == 0 ? offsets[p] + r : r;
              const std::size_t ocol = axis == 0 ? c : offsets[p] + c;
              gp[r * tc + c] += g[orow * cols + ocol];
            }
          }
        }
      });
}

Var slice(Var x, std::size_t axis, std::size_t begin, std::size_t end) {
  const Tensor& xv = x.value();
  require_matrix(xv, "slice");
  if (axis > 1 || begin >= end || end > xv.dim(axis)) {
    throw ShapeError("slice: range [" + std::to_string(begin) + "," +
                     std::to_string(end) + ") on axis " + std::to_string(axis) +
                     " invalid for " + xv.shape_string());
  }
  const std::size_t rows = xv.dim(0), cols = xv.dim(1);
  const std::size_t orows = axis == 0 ? end - begin : rows;
  const std::size_t ocols = axis == 0 ? cols : end - begin;
  const std::size_t r0 = axis == 0 ? begin : 0;
  const std::size_t c0 = axis == 0 ? 0 : begin;
  Tensor out({orows, ocols});
  for (std::size_t r = 0; r < orows; ++r) {
    for (std::size_t c = 0; c < ocols; ++c) {
      out[r * ocols + c] = xv[(r + r0) * cols + (c + c0)];
    }
  }
  return x.tape()->record(std::move(out), {x},
                          [x, orows, ocols, r0, c0, cols](Tape& tape, Grad g, Grad) {
    Tensor& gx = tape.grad_buffer(x);
    for (std::size_t r = 0; r < orows; ++r) {
      for (std::size_t c = 0; c < ocols; ++c) {
        gx[(r + r0) * cols + (c + c0)] += g[r * ocols + c];
      }
    }
  });
}

Var sum(Var x) {
  const double total = kernels::stable_sum(x.value().data());
  return x.tape()->record(Tensor::scalar(total), {x}, [x](Tape& tape, Grad g, Grad) {
    Tensor& gx = tape.grad_buffer(x);
    for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += g[0];
  });
}

Var dropout(Var x, double rate, Rng* rng) {
  if (rate <= 0.0 || rng == nullptr) return x;
  if (rate >= 1.0) throw DomainError("dropout rate must be below 1");
  const Tensor& xv = x.value();
  auto keep = std::make_shared<std::vector<double>>(xv.size());
  const double scale_kept = 1.0 / (1.0 - rate);
  Tensor out = xv;
  for (std::size_t i = 0; i < out.size(); ++i) {
    (*keep)[i] = rng->uniform() < rate ? 0.0 : scale_kept;
    out[i] *= (*keep)[i];
  }
  return x.tape()->record(std::move(out), {x}, [x, keep](Tape& tape, Grad g, Grad) {
    Tensor& gx = tape.grad_buffer(x);
    for (std::size_t i = 0; i < g.size(); ++i) gx[i] += g[i] * (*keep)[i];
  });
}

Var attention(Var q, Var k, Var v, std::size_t batch, std::size_t seq,
              std::size_t heads) {
  require_same_tape(q, k);
  require_same_tape(q, v);
  const Tensor& qv = q.value();
  const Tensor& kv = k.value();
  const Tensor& vv = v.value();
  require_matrix(qv, "attention");
  if (!qv.same_shape(kv)) mismatch("attention", qv, kv);
  if (!qv.same_shape(vv)) mismatch("attention", qv, vv);
  const std::size_t dim = qv.dim(1);
  if (qv.dim(0) != batch * seq || heads == 0 || dim % heads != 0) {
    throw ShapeError("attention: " + qv.shape_string() + " incompatible with batch " +
                     std::to_string(batch) + ", seq " + std::to_string(seq) +
                     ", heads " + std::to_string(heads));
  }
  const std::size_t hd = dim / heads;
  const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(hd));
  // probs layout: [batch][head][query][key]
  auto probs = std::make_shared<std::vector<double>>(batch * heads * seq * seq);
  Tensor out({batch * seq, dim});
  const long total = static_cast<long>(batch * heads);
#pragma omp parallel for schedule(static) if (batch * heads * seq * seq * hd > 65536)
  for (long bh = 0; bh < total; ++bh) {
    const std::size_t b = static_cast<std::size_t>(bh) / heads;
    const std::size_t h = static_cast<std::size_t>(bh) % heads;
    double* p = probs->data() + static_cast<std::size_t>(bh) * seq * seq;
    for (std::size_t i = 0; i < seq; ++i) {
      const double* qi = qv.data().data() + (b * seq + i) * dim + h * hd;
      double mx = -INFINITY;
      for (std::size_t j = 0; j < seq; ++j) {
        const double* kj = kv.data().data() + (b * seq + j) * dim + h * hd;
        double s = 0.0;
        for (std::size_t d = 0; d < hd; ++d) s += qi[d] * kj[d];
        p[i * seq + j] = s * inv_sqrt;
        mx = std::max(mx, p[i * seq + j]);
      }
      double z = 0.0;
      for (std::size_t j = 0; j < seq; ++j) {
        p[i * seq + j] = std::exp(p[i * seq + j] - mx);
        z += p[i * seq + j];
      }
      double* oi = out.data().data() + (b * seq + i) * dim + h * hd;
      for (std::size_t j = 0; j < seq; ++j) {
        p[i * seq + j] /= z;
        const double* vj = vv.data().data() + (b * seq + j) * dim + h * hd;
        for (std::size_t d = 0; d < hd; ++d) oi[d] += p[i * seq + j] * vj[d];
      }
    }
  }
  return q.tape()->record(
      std::move(out), {q, k, v},
      [q, k, v, batch, seq, heads, dim, hd, inv_sqrt, probs](Tape& tape, Grad g, Grad) {
        const bool need_q = tape.needs_grad(q);
        const bool need_k = tape.needs_grad(k);
        const bool need_v = tape.needs_grad(v);
        Tensor* gq = need_q ? &tape.grad_buffer(q) : nullptr;
        Tensor* gk = need_k ? &tape.grad_buffer(k) : nullptr;
        Tensor* gv = need_v ? &tape.grad_buffer(v) : nullptr;
        const Tensor& qv = q.value();
        const Tensor& kv = k.value();
        const Tensor& vv = v.value();
        std::vector<double> dp(seq * seq);
        // Each (batch, head) pair writes a disjoint block of rows/columns.
        for (std::size_t b = 0; b < batch; ++b) {
          for (std::size_t h = 0; h < heads; ++h) {
            const double* p = probs->data() + (b * heads + h) * seq * seq;
            auto row = [&](const Tensor& t, std::size_t i) {
              return t.data().data() + (b * seq + i) * dim + h * hd;
            };
            for (std::size_t i = 0; i < seq; ++i) {
              const double* gi = g.data().data() + (b * seq + i) * dim + h * hd;
              for (std::size_t j = 0; j < seq; ++j) {
                const double* vj = row(vv, j);
                double s = 0.0;
                for (std::size_t d = 0; d < hd; ++d) s += gi[d] * vj[d];
                dp[i * seq + j] = s;
                if (gv) {
                  double* gvj = gv->data().data() + (b * seq + j) * dim + h * hd;
                  for (std::size_t d = 0; d < hd; ++d) gvj[d] += p[i * seq + j] * gi[d];
                }
              }
              double dot = 0.0;
              for (std::size_t j = 0; j < seq; ++j) dot += dp[i * seq + j] * p[i * seq + j];
              for (std::size_t j = 0; j < seq; ++j) {
                dp[i * seq + j] = p[i * seq + j] * (dp[i * seq + j] - dot) * inv_sqrt;
              }
            }
            for (std::size_t i = 0; i < seq; ++i) {
              for (std::size_t j = 0; j < seq; ++j) {
                const double ds = dp[i * seq + j];
                if (gq) {
                  double* gqi = gq->data().data() + (b * seq + i) * dim + h * hd;
                  const double* kj = row(kv, j);
                  for (std::size_t d = 0; d < hd; ++d) gqi[d] += ds * kj[d];
                }
                if (gk) {
                  double* gkj = gk->data().data() + (b * seq + j) * dim + h * hd;
                  const double* qi = row(qv, i);
                  for (std::size_t d = 0; d < hd; ++d) gkj[d] += ds * qi[d];
                }
              }
            }
          }
        }
      });
}

Var cross_entropy(Var logits, std::span<const int> targets,
                  std::span<const double> weights) {
  const Tensor& lv = logits.value();
  require_matrix(lv, "cross_entropy");
  const std::size_t rows = lv.dim(0), classes = lv.dim(1);
  if (targets.size() != rows || weights.size() != rows) {
    throw ShapeError("cross_entropy: logits " + lv.shape_string() + " with " +
                     std::to_string(targets.size()) + " targets and " +
                     std::to_string(weights.size()) + " weights");
  }
  double total_weight = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    if (weights[r] < 0.0) throw DomainError("cross_entropy: negative weight");
    if (weights[r] == 0.0) continue;
    if (targets[r] < 0 || static_cast<std::size_t>(targets[r]) >= classes) {
      throw DomainError("cross_entropy: target " + std::to_string(targets[r]) +
                        " is not a valid class index below " +
                        std::to_string(classes));
    }
    total_weight += weights[r];
  }
  if (total_weight <= 0.0) throw DomainError("no supervised positions");
  auto probs = std::make_shared<Tensor>(lv.shape());
  double loss = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    const double* in = lv.data().data() + r * classes;
    double* p = probs->data().data() + r * classes;
    const double mx = *std::max_element(in, in + classes);
    double z = 0.0;
    for (std::size_t c = 0; c < classes; ++c) {
      p[c] = std::exp(in[c] - mx);
      z += p[c];
    }
    for (std::size_t c = 0; c < classes; ++c) p[c] /= z;
    if (weights[r] > 0.0) {
      loss += weights[r] * (std::log(z) + mx - in[targets[r]]);
    }
  }
  loss /= total_weight;
  std::vector<int> tgt(targets.begin(), targets.end());
  std::vector<double> w(weights.begin(), weights.end());
  return logits.tape()->record(
      Tensor::scalar(loss), {logits},
      [logits, probs, tgt = std::move(tgt), w = std::move(w), total_weight, classes](
          Tape& tape, Grad g, Grad) {
        Tensor& gl = tape.grad_buffer(logits);
        for (std::size_t r = 0; r < tgt.size(); ++r) {
          if (w[r] == 0.0) continue;
          const double s = g[0] * w[r] / total_weight;
          for (std::size_t c = 0; c < classes; ++c) {
            gl[r * classes + c] += s * (*probs)[r * classes + c];
          }
          gl[r * classes + static_cast<std::size_t>(tgt[r])] -= s;
        }
      });
}

Var bce_with_logits(Var logits, std::span<const double> targets) {
  const Tensor& lv = logits.value();
  if (lv.size() != targets.size() || lv.size() == 0) {
    throw ShapeError("bce_with_logits: logits " + lv.shape_string() + " with " +
                     std::to_string(targets.size()) + " targets");
  }
  for (double t : targets) {
    if (t != 0.0 && t != 1.0) throw DomainError("bce_with_logits: targets must be 0 or 1");
  }
  const double n = static_cast<double>(lv.size());
  kernels::CompensatedSum loss;
  for (std::size_t i = 0; i < lv.size(); ++i) {
    const double z = lv[i];
    loss.add(std::max(z, 0.0) - z * targets[i] + std::log1p(std::exp(-std::fabs(z))));
  }
  std::vector<double> tgt(targets.begin(), targets.end());
  return logits.tape()->record(
      Tensor::scalar(loss.value() / n), {logits},
      [logits, tgt = std::move(tgt), n](Tape& tape, Grad g, Grad) {
        Tensor& gl = tape.grad_buffer(logits);
        const Tensor& lv = logits.value();
        for (std::size_t i = 0; i < tgt.size(); ++i) {
          const double sig = 1.0 / (1.0 + std::exp(-lv[i]));
          gl[i] += g[0] * (sig - tgt[i]) / n;
        }
      });
}

}  // namespace tcl::ops
