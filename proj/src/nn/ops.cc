// SPDX-License-Identifier: Apache-2.0

#include "bcddi/nn/ops.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>

#include "bcddi/errors.h"

namespace bcddi::nn {
namespace {

Tape& TapeOf(const Var& a) {
  if (!a.valid()) throw ConfigError("op on an empty Var");
  return *a.tape();
}

Tape& TapeOf(const Var& a, const Var& b) {
  Tape& t = TapeOf(a);
  if (b.tape() != &t) throw ConfigError("operands live on different tapes");
  return t;
}

std::string Dims(const Var& a) {
  return "[" + std::to_string(a.rows()) + "," + std::to_string(a.cols()) + "]";
}

void RequireSameShape(const Var& a, const Var& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeError(std::string(op) + ": operand shapes " + Dims(a) +
                     " and " + Dims(b) + " differ");
  }
}

Tensor Mat(std::size_t r, std::size_t c) { return Tensor(Shape{r, c}); }

// Elementwise unary op given f(x) and f'(x, y) where y = f(x).
template <typename F, typename D>
Var Unary(const Var& a, const char* op, F f, D df) {
  const Tensor& x = a.value();
  Tensor y = Mat(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = f(x[i]);
  Node* an = a.node();
  return TapeOf(a).Record(std::move(y), {a}, op, [an, df](Node& out) {
    if (!an->needs_grad) return;
    const Tensor& xv = an->value();
    const Tensor& yv = out.value();
    const Tensor& g = out.grad();
    Tensor& ga = an->grad();
    for (std::size_t i = 0; i < xv.size(); ++i) ga[i] += g[i] * df(xv[i], yv[i]);
  });
}

}  // namespace

Var MatMul(const Var& a, const Var& b) {
  Tape& tape = TapeOf(a, b);
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  std::size_t m = av.rows(), k = av.cols(), n = bv.cols();
  if (bv.rows() != k) {
    throw ShapeError("matmul: " + Dims(a) + " x " + Dims(b));
  }
  Tensor y = Mat(m, n);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t p = 0; p < k; ++p) {
      double aip = av[i * k + p];
      for (std::size_t j = 0; j < n; ++j) y[i * n + j] += aip * bv[p * n + j];
    }
  }
  Node* an = a.node();
  Node* bn = b.node();
  return tape.Record(std::move(y), {a, b}, "matmul", [an, bn, m, k, n](Node& out) {
    const Tensor& g = out.grad();
    const Tensor& av = an->value();
    const Tensor& bv = bn->value();
    if (an->needs_grad) {
      Tensor& ga = an->grad();
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t p = 0; p < k; ++p) {
          double acc = 0.0;
          for (std::size_t j = 0; j < n; ++j) acc += g[i * n + j] * bv[p * n + j];
          ga[i * k + p] += acc;
        }
      }
    }
    if (bn->needs_grad) {
      Tensor& gb = bn->grad();
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t p = 0; p < k; ++p) {
          double aip = av[i * k + p];
          for (std::size_t j = 0; j < n; ++j) gb[p * n + j] += aip * g[i * n + j];
        }
      }
    }
  });
}

Var MatMulNT(const Var& a, const Var& b) {
  Tape& tape = TapeOf(a, b);
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  std::size_t m = av.rows(), k = av.cols(), n = bv.rows();
  if (bv.cols() != k) {
    throw ShapeError("matmul_nt: " + Dims(a) + " x " + Dims(b) + "^T");
  }
  Tensor y = Mat(m, n);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double acc = 0.0;
      for (std::size_t p = 0; p < k; ++p) acc += av[i * k + p] * bv[j * k + p];
      y[i * n + j] = acc;
    }
  }
  Node* an = a.node();
  Node* bn = b.node();
  return tape.Record(std::move(y), {a, b}, "matmul_nt", [an, bn, m, k, n](Node& out) {
    const Tensor& g = out.grad();
    const Tensor& av = an->value();
    const Tensor& bv = bn->value();
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        double gij = g[i * n + j];
        if (gij == 0.0) continue;
        if (an->needs_grad) {
          Tensor& ga = an->grad();
          for (std::size_t p = 0; p < k; ++p) ga[i * k + p] += gij * bv[j * k + p];
        }
        if (bn->needs_grad) {
          Tensor& gb = bn->grad();
          for (std::size_t p = 0; p < k; ++p) gb[j * k + p] += gij * av[i * k + p];
        }
      }
    }
  });
}

Var Affine(const Var& x, const Var& w, const Var& b) {
  Tape& tape = TapeOf(x, w);
  TapeOf(x, b);
  const Tensor& xv = x.value();
  const Tensor& wv = w.value();
  const Tensor& bv = b.value();
  std::size_t m = xv.rows(), in = xv.cols(), out_dim = wv.rows();
  if (wv.cols() != in || bv.size() != out_dim) {
    throw ShapeError("linear: input " + Dims(x) + ", weight " + Dims(w) +
                     ", bias " + bv.ShapeString());
  }
  Tensor y = Mat(m, out_dim);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t o = 0; o < out_dim; ++o) {
      double acc = 0.0;
      for (std::size_t p = 0; p < in; ++p) acc += xv[i * in + p] * wv[o * in + p];
      y[i * out_dim + o] = acc + bv[o];
    }
  }
  Node* xn = x.node();
  Node* wn = w.node();
  Node* bn = b.node();
  return tape.Record(std::move(y), {x, w, b}, "linear",
                     [xn, wn, bn, m, in, out_dim](Node& out) {
    const Tensor& g = out.grad();
    const Tensor& xv = xn->value();
    const Tensor& wv = wn->value();
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t o = 0; o < out_dim; ++o) {
        double gio = g[i * out_dim + o];
        if (gio == 0.0) continue;
        if (xn->needs_grad) {
          Tensor& gx = xn->grad();
          for (std::size_t p = 0; p < in; ++p) gx[i * in + p] += gio * wv[o * in + p];
        }
        if (wn->needs_grad) {
          Tensor& gw = wn->grad();
          for (std::size_t p = 0; p < in; ++p) gw[o * in + p] += gio * xv[i * in + p];
        }
        if (bn->needs_grad) bn->grad()[o] += gio;
      }
    }
  });
}

Var Linear(Tape& tape, ParamStore& store, const std::string& w_name,
           const std::string& b_name, const Var& x) {
  return Affine(x, tape.Param(store, w_name), tape.Param(store, b_name));
}

Var Add(const Var& a, const Var& b) {
  Tape& tape = TapeOf(a, b);
  RequireSameShape(a, b, "add");
  Tensor y = Mat(a.rows(), a.cols());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = a.value()[i] + b.value()[i];
  Node* an = a.node();
  Node* bn = b.node();
  return tape.Record(std::move(y), {a, b}, "add", [an, bn](Node& out) {
    if (an->needs_grad) an->grad() += out.grad();
    if (bn->needs_grad) bn->grad() += out.grad();
  });
}

Var Sub(const Var& a, const Var& b) {
  Tape& tape = TapeOf(a, b);
  RequireSameShape(a, b, "sub");
  Tensor y = Mat(a.rows(), a.cols());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = a.value()[i] - b.value()[i];
  Node* an = a.node();
  Node* bn = b.node();
  return tape.Record(std::move(y), {a, b}, "sub", [an, bn](Node& out) {
    const Tensor& g = out.grad();
    if (an->needs_grad) an->grad() += g;
    if (bn->needs_grad) {
      Tensor& gb = bn->grad();
      for (std::size_t i = 0; i < g.size(); ++i) gb[i] -= g[i];
    }
  });
}

Var Mul(const Var& a, const Var& b) {
  Tape& tape = TapeOf(a, b);
  RequireSameShape(a, b, "mul");
  Tensor y = Mat(a.rows(), a.cols());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = a.value()[i] * b.value()[i];
  Node* an = a.node();
  Node* bn = b.node();
  return tape.Record(std::move(y), {a, b}, "mul", [an, bn](Node& out) {
    const Tensor& g = out.grad();
    const Tensor& av = an->value();
    const Tensor& bv = bn->value();
    if (an->needs_grad) {
      Tensor& ga = an->grad();
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * bv[i];
    }
    if (bn->needs_grad) {
      Tensor& gb = bn->grad();
      for (std::size_t i = 0; i < g.size(); ++i) gb[i] += g[i] * av[i];
    }
  });
}

Var AddRow(const Var& x, const Var& row) {
  Tape& tape = TapeOf(x, row);
  std::size_t m = x.rows(), n = x.cols();
  if (row.value().size() != n) {
    throw ShapeError("add_row: " + Dims(x) + " + " + Dims(row));
  }
  Tensor y = Mat(m, n);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      y[i * n + j] = x.value()[i * n + j] + row.value()[j];
    }
  }
  Node* xn = x.node();
  Node* rn = row.node();
  return tape.Record(std::move(y), {x, row}, "add_row", [xn, rn, m, n](Node& out) {
    const Tensor& g = out.grad();
    if (xn->needs_grad) xn->grad() += g;
    if (rn->needs_grad) {
      Tensor& gr = rn->grad();
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) gr[j] += g[i * n + j];
      }
    }
  });
}

Var Scale(const Var& a, double s) {
  return Unary(
      a, "scale", [s](double x) { return s * x; },
      [s](double, double) { return s; });
}

Var AddScalar(const Var& a, double s) {
  return Unary(
      a, "add_scalar", [s](double x) { return x + s; },
      [](double, double) { return 1.0; });
}

Var Tanh(const Var& a) {
  return Unary(
      a, "tanh", [](double x) { return std::tanh(x); },
      [](double, double y) { return 1.0 - y * y; });
}

Var Sigmoid(const Var& a) {
  return Unary(
      a, "sigmoid",
      [](double x) {
        if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
        double e = std::exp(x);
        return e / (1.0 + e);
      },
      [](double, double y) { return y * (1.0 - y); });
}

Var Exp(const Var& a) {
  return Unary(
      a, "exp", [](double x) { return std::exp(x); },
      [](double, double y) { return y; });
}

Var Gelu(const Var& a) {
  static constexpr double kC = 0.7978845608028654;  // sqrt(2/pi)
  static constexpr double kA = 0.044715;
  return Unary(
      a, "gelu",
      [](double x) {
        return 0.5 * x * (1.0 + std::tanh(kC * (x + kA * x * x * x)));
      },
      [](double x, double) {
        double u = kC * (x + kA * x * x * x);
        double t = std::tanh(u);
        double du = kC * (1.0 + 3.0 * kA * x * x);
        return 0.5 * (1.0 + t) + 0.5 * x * (1.0 - t * t) * du;
      });
}

Var Clamp(const Var& a, double lo, double hi) {
  return Unary(
      a, "clamp", [lo, hi](double x) { return std::clamp(x, lo, hi); },
      [lo, hi](double x, double) { return (x < lo || x > hi) ? 0.0 : 1.0; });
}

Var ConcatCols(const std::vector<Var>& parts) {
  if (parts.empty()) throw ShapeError("concat of zero operands");
  Tape& tape = TapeOf(parts.front());
  std::size_t m = parts.front().rows();
  std::size_t n = 0;
  for (const Var& p : parts) {
    TapeOf(parts.front(), p);
    if (p.rows() != m) throw ShapeError("concat_cols: row counts differ");
    n += p.cols();
  }
  Tensor y = Mat(m, n);
  std::size_t off = 0;
  for (const Var& p : parts) {
    std::size_t pc = p.cols();
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < pc; ++j) y[i * n + off + j] = p.value()[i * pc + j];
    }
    off += pc;
  }
  std::vector<Node*> nodes;
  for (const Var& p : parts) nodes.push_back(p.node());
  return tape.Record(std::move(y), parts, "concat_cols", [nodes, m, n](Node& o) {
      const Tensor& g = o.grad();
      std::size_t off = 0;
      for (Node* pn : nodes) {
        std::size_t pc = pn->value().cols();
        if (pn->needs_grad) {
          Tensor& gp = pn->grad();
          for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < pc; ++j) gp[i * pc + j] += g[i * n + off + j];
          }
        }
        off += pc;
      }
  });
}

Var ConcatRows(const std::vector<Var>& parts) {
  if (parts.empty()) throw ShapeError("concat of zero operands");
  Tape& tape = TapeOf(parts.front());
  std::size_t n = parts.front().cols();
  std::size_t m = 0;
  for (const Var& p : parts) {
    TapeOf(parts.front(), p);
    if (p.cols() != n) throw ShapeError("concat_rows: column counts differ");
    m += p.rows();
  }
  Tensor y = Mat(m, n);
  std::size_t off = 0;
  for (const Var& p : parts) {
    std::copy(p.value().data().begin(), p.value().data().end(),
              y.data().begin() + static_cast<std::ptrdiff_t>(off));
    off += p.value().size();
  }
  std::vector<Node*> nodes;
  for (const Var& p : parts) nodes.push_back(p.node());
  return tape.Record(std::move(y), parts, "concat_rows", [nodes](Node& o) {
      const Tensor& g = o.grad();
      std::size_t off = 0;
      for (Node* pn : nodes) {
        std::size_t sz = pn->value().size();
        if (pn->needs_grad) {
          Tensor& gp = pn->grad();
          for (std::size_t i = 0; i < sz; ++i) gp[i] += g[off + i];
        }
        off += sz;
      }
  });
}

Var SliceCols(const Var& a, std::size_t start, std::size_t len) {
  std::size_t m = a.rows(), n = a.cols();
  if (start + len > n || len == 0) {
    throw ShapeError("slice_cols [" + std::to_string(start) + "," +
                     std::to_string(start + len) + ") of " + Dims(a));
  }
  Tensor y = Mat(m, len);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < len; ++j) y[i * len + j] = a.value()[i * n + start + j];
  }
  Node* an = a.node();
  return TapeOf(a).Record(std::move(y), {a}, "slice_cols",
                          [an, m, n, start, len](Node& out) {
    const Tensor& g = out.grad();
    Tensor& ga = an->grad();
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < len; ++j) ga[i * n + start + j] += g[i * len + j];
    }
  });
}

Var SliceRows(const Var& a, std::size_t start, std::size_t len) {
  std::size_t m = a.rows(), n = a.cols();
  if (start + len > m || len == 0) {
    throw ShapeError("slice_rows [" + std::to_string(start) + "," +
                     std::to_string(start + len) + ") of " + Dims(a));
  }
  Tensor y = Mat(len, n);
  auto src = a.value().data().subspan(start * n, len * n);
  std::copy(src.begin(), src.end(), y.data().begin());
  Node* an = a.node();
  return TapeOf(a).Record(std::move(y), {a}, "slice_rows", [an, n, start](Node& out) {
    const Tensor& g = out.grad();
    Tensor& ga = an->grad();
    for (std::size_t i = 0; i < g.size(); ++i) ga[start * n + i] += g[i];
  });
}

Var MeanRows(const Var& a) {
  std::size_t m = a.rows(), n = a.cols();
  Tensor y = Mat(1, n);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) y[j] += a.value()[i * n + j];
  }
  for (std::size_t j = 0; j < n; ++j) y[j] /= static_cast<double>(m);
  Node* an = a.node();
  return TapeOf(a).Record(std::move(y), {a}, "mean_rows", [an, m, n](Node& out) {
    const Tensor& g = out.grad();
    Tensor& ga = an->grad();
    double inv = 1.0 / static_cast<double>(m);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < n; ++j) ga[i * n + j] += g[j] * inv;
    }
  });
}

Var Flatten(const Var& a) {
  const Tensor& av = a.value();
  Tensor y = Mat(1, av.size());
  std::copy(av.data().begin(), av.data().end(), y.data().begin());
  Node* an = a.node();
  return TapeOf(a).Record(std::move(y), {a}, "flatten",
                          [an](Node& out) { an->grad() += out.grad(); });
}

Var Sum(const Var& a) {
  double s = 0.0;
  for (double v : a.value().data()) s += v;
  Node* an = a.node();
  return TapeOf(a).Record(Tensor(Shape{1, 1}, {s}), {a}, "sum", [an](Node& out) {
    double g = out.grad()[0];
    Tensor& ga = an->grad();
    for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += g;
  });
}

Var Softmax(const Var& a) {
  std::size_t m = a.rows(), n = a.cols();
  const Tensor& x = a.value();
  Tensor y = Mat(m, n);
  for (std::size_t i = 0; i < m; ++i) {
    double mx = x[i * n];
    for (std::size_t j = 1; j < n; ++j) mx = std::max(mx, x[i * n + j]);
    double z = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      y[i * n + j] = std::exp(x[i * n + j] - mx);
      z += y[i * n + j];
    }
    for (std::size_t j = 0; j < n; ++j) y[i * n + j] /= z;
  }
  Node* an = a.node();
  return TapeOf(a).Record(std::move(y), {a}, "softmax", [an, m, n](Node& out) {
    const Tensor& g = out.grad();
    const Tensor& y = out.value();
    Tensor& ga = an->grad();
    for (std::size_t i = 0; i < m; ++i) {
      double dot = 0.0;
      for (std::size_t j = 0; j < n; ++j) dot += g[i * n + j] * y[i * n + j];
      for (std::size_t j = 0; j < n; ++j) {
        ga[i * n + j] += y[i * n + j] * (g[i * n + j] - dot);
      }
    }
  });
}

Var LogSoftmax(const Var& a) {
  std::size_t m = a.rows(), n = a.cols();
  const Tensor& x = a.value();
  Tensor y = Mat(m, n);
  for (std::size_t i = 0; i < m; ++i) {
    double mx = x[i * n];
    for (std::size_t j = 1; j < n; ++j) mx = std::max(mx, x[i * n + j]);
    double z = 0.0;
    for (std::size_t j = 0; j < n; ++j) z += std::exp(x[i * n + j] - mx);
    double lz = mx + std::log(z);
    for (std::size_t j = 0; j < n; ++j) y[i * n + j] = x[i * n + j] - lz;
  }
  Node* an = a.node();
  return TapeOf(a).Record(std::move(y), {a}, "log_softmax", [an, m, n](Node& out) {
    const Tensor& g = out.grad();
    const Tensor& y = out.value();
    Tensor& ga = an->grad();
    for (std::size_t i = 0; i < m; ++i) {
      double gs = 0.0;
      for (std::size_t j = 0; j < n; ++j) gs += g[i * n + j];
      for (std::size_t j = 0; j < n; ++j) {
        ga[i * n + j] += g[i * n + j] - std::exp(y[i * n + j]) * gs;
      }
    }
  });
}

Var CrossEntropy(const Var& probs, std::span<const std::size_t> targets) {
  static constexpr double kFloor = 1e-12;
  std::size_t m = probs.rows(), k = probs.cols();
  if (targets.size() != m) {
    throw ShapeError("cross_entropy: " + std::to_string(targets.size()) +
                     " targets for " + std::to_string(m) + " rows");
  }
  for (std::size_t t : targets) {
    if (t >= k) {
      throw IndexError("cross_entropy: target " + std::to_string(t) +
                       " out of range for " + std::to_string(k) + " classes");
    }
  }
  const Tensor& p = probs.value();
  double loss = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    loss -= std::log(std::max(p[i * k + targets[i]], kFloor));
  }
  loss /= static_cast<double>(m);
  std::vector<std::size_t> tgt(targets.begin(), targets.end());
  Node* pn = probs.node();
  return TapeOf(probs).Record(Tensor(Shape{1, 1}, {loss}), {probs}, "cross_entropy",
                              [pn, tgt, m, k](Node& out) {
    double g = out.grad()[0] / static_cast<double>(m);
    const Tensor& p = pn->value();
    Tensor& gp = pn->grad();
    for (std::size_t i = 0; i < m; ++i) {
      double pi = p[i * k + tgt[i]];
      if (pi > kFloor) gp[i * k + tgt[i]] -= g / pi;
    }
  });
}

Var NllSum(const Var& log_probs, std::span<const std::size_t> targets) {
  std::size_t m = log_probs.rows(), k = log_probs.cols();
  if (targets.size() > m) {
    throw ShapeError("nll_sum: " + std::to_string(targets.size()) +
                     " targets for " + std::to_string(m) + " rows");
  }
  double loss = 0.0;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    if (targets[i] >= k) throw IndexError("nll_sum: target out of range");
    loss -= log_probs.value()[i * k + targets[i]];
  }
  std::vector<std::size_t> tgt(targets.begin(), targets.end());
  Node* ln = log_probs.node();
  return TapeOf(log_probs).Record(Tensor(Shape{1, 1}, {loss}), {log_probs}, "nll_sum",
                                  [ln, tgt, k](Node& out) {
    double g = out.grad()[0];
    Tensor& gl = ln->grad();
    for (std::size_t i = 0; i < tgt.size(); ++i) gl[i * k + tgt[i]] -= g;
  });
}

Var LayerNorm(const Var& x, const Var& gain, const Var& shift, double eps) {
  Tape& tape = TapeOf(x, gain);
  TapeOf(x, shift);
  std::size_t m = x.rows(), n = x.cols();
  if (gain.value().size() != n || shift.value().size() != n) {
    throw ShapeError("layer_norm: gain/shift do not match width " +
                     std::to_string(n));
  }
  const Tensor& xv = x.value();
  Tensor y = Mat(m, n);
  // Normalized activations and inverse std per row, kept for backward.
  Tensor xhat = Mat(m, n);
  std::vector<double> inv_std(m);
  for (std::size_t i = 0; i < m; ++i) {
    double mean = 0.0;
    for (std::size_t j = 0; j < n; ++j) mean += xv[i * n + j];
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      double d = xv[i * n + j] - mean;
      var += d * d;
    }
    var /= static_cast<double>(n);
    inv_std[i] = 1.0 / std::sqrt(var + eps);
    for (std::size_t j = 0; j < n; ++j) {
      xhat[i * n + j] = (xv[i * n + j] - mean) * inv_std[i];
      y[i * n + j] = xhat[i * n + j] * gain.value()[j] + shift.value()[j];
    }
  }
  Node* xn = x.node();
  Node* gn = gain.node();
  Node* sn = shift.node();
  return tape.Record(std::move(y), {x, gain, shift}, "layer_norm",
                     [xn, gn, sn, m, n, xhat = std::move(xhat),
                      inv_std = std::move(inv_std)](Node& out) {
    const Tensor& g = out.grad();
    const Tensor& gv = gn->value();
    for (std::size_t i = 0; i < m; ++i) {
      if (gn->needs_grad) {
        Tensor& gg = gn->grad();
        for (std::size_t j = 0; j < n; ++j) gg[j] += g[i * n + j] * xhat[i * n + j];
      }
      if (sn->needs_grad) {
        Tensor& gs = sn->grad();
        for (std::size_t j = 0; j < n; ++j) gs[j] += g[i * n + j];
      }
      if (xn->needs_grad) {
        double sum_d = 0.0, sum_dx = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
          double d = g[i * n + j] * gv[j];
          sum_d += d;
          sum_dx += d * xhat[i * n + j];
        }
        double inv_n = 1.0 / static_cast<double>(n);
        Tensor& gx = xn->grad();
        for (std::size_t j = 0; j < n; ++j) {
          double d = g[i * n + j] * gv[j];
          gx[i * n + j] += inv_std[i] * (d - inv_n * sum_d -
                                         xhat[i * n + j] * inv_n * sum_dx);
        }
      }
    }
  });
}

Var Conv1d(const Var& x, const Var& kernel, const Var& bias) {
  Tape& tape = TapeOf(x, kernel);
  TapeOf(x, bias);
  const Tensor& kv = kernel.value();
  if (kv.rank() != 3) {
    throw ShapeError("conv1d: kernel must be (width,in,out), got " +
                     kv.ShapeString());
  }
  std::size_t width = kv.shape()[0], in = kv.shape()[1], out_ch = kv.shape()[2];
  std::size_t len = x.rows();
  if (x.cols() != in) {
    throw ShapeError("conv1d: input " + Dims(x) + " vs kernel " + kv.ShapeString());
  }
  if (bias.value().size() != out_ch) {
    throw ShapeError("conv1d: bias " + bias.value().ShapeString() +
                     " vs kernel " + kv.ShapeString());
  }
  if (len < width) {
    throw ShapeError("conv1d: input length " + std::to_string(len) +
                     " shorter than kernel width " + std::to_string(width));
  }
  std::size_t out_len = len - width + 1;
  const Tensor& xv = x.value();
  Tensor y = Mat(out_len, out_ch);
  for (std::size_t t = 0; t < out_len; ++t) {
    double* yr = &y[t * out_ch];
    for (std::size_t w = 0; w < width; ++w) {
      for (std::size_t c = 0; c < in; ++c) {
        double xval = xv[(t + w) * in + c];
        if (xval == 0.0) continue;
        const double* kr = &kv[(w * in + c) * out_ch];
        for (std::size_t o = 0; o < out_ch; ++o) yr[o] += xval * kr[o];
      }
    }
    for (std::size_t o = 0; o < out_ch; ++o) yr[o] += bias.value()[o];
  }
  Node* xn = x.node();
  Node* kn = kernel.node();
  Node* bn = bias.node();
  return tape.Record(std::move(y), {x, kernel, bias}, "conv1d",
                     [xn, kn, bn, width, in, out_ch, out_len](Node& out) {
    const Tensor& g = out.grad();
    const Tensor& xv = xn->value();
    const Tensor& kv = kn->value();
    for (std::size_t t = 0; t < out_len; ++t) {
      const double* gr = &g[t * out_ch];
      if (bn->needs_grad) {
        Tensor& gb = bn->grad();
        for (std::size_t o = 0; o < out_ch; ++o) gb[o] += gr[o];
      }
      for (std::size_t w = 0; w < width; ++w) {
        for (std::size_t c = 0; c < in; ++c) {
          std::size_t xi = (t + w) * in + c;
          std::size_t ki = (w * in + c) * out_ch;
          if (kn->needs_grad) {
            double xval = xv[xi];
            if (xval != 0.0) {
              Tensor& gk = kn->grad();
              for (std::size_t o = 0; o < out_ch; ++o) gk[ki + o] += xval * gr[o];
            }
          }
          if (xn->needs_grad) {
            double acc = 0.0;
            for (std::size_t o = 0; o < out_ch; ++o) acc += kv[ki + o] * gr[o];
            xn->grad()[xi] += acc;
          }
        }
      }
    }
  });
}

Var Dropout(const Var& x, double p, Rng* rng, bool train) {
  if (!train || p <= 0.0) return x;
  if (p >= 1.0) throw ConfigError("dropout probability must be < 1");
  if (rng == nullptr) throw ConfigError("dropout in training needs a generator");
  const Tensor& xv = x.value();
  Tensor mask(Shape{x.rows(), x.cols()});
  double keep_scale = 1.0 / (1.0 - p);
  for (double& m : mask.data()) m = rng->Uniform() >= p ? keep_scale : 0.0;
  Tensor y = Mat(x.rows(), x.cols());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = xv[i] * mask[i];
  Node* xn = x.node();
  return TapeOf(x).Record(std::move(y), {x}, "dropout",
                          [xn, mask = std::move(mask)](Node& out) {
    const Tensor& g = out.grad();
    Tensor& gx = xn->grad();
    for (std::size_t i = 0; i < g.size(); ++i) gx[i] += g[i] * mask[i];
  });
}

namespace {

Tensor GatherValues(const Tensor& table, std::span<const std::size_t> ids,
                    const std::string& name) {
  std::size_t vocab = table.rows(), d = table.cols();
  Tensor y = Mat(ids.size(), d);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] >= vocab) {
      throw IndexError("id " + std::to_string(ids[i]) + " out of range for '" +
                       name + "' with " + std::to_string(vocab) + " rows");
    }
    auto src = table.row(ids[i]);
    std::copy(src.begin(), src.end(), y.data().begin() + static_cast<std::ptrdiff_t>(i * d));
  }
  return y;
}

}  // namespace

Var GatherRows(Tape& tape, ParamStore& store, const std::string& name,
               std::span<const std::size_t> ids) {
  if (!tape.grad_enabled()) return GatherRows(tape, std::as_const(store), name, ids);
  Param& p = store.Get(name);
  Tensor y = GatherValues(p.value, ids, name);
  std::size_t d = p.value.cols();
  std::vector<std::size_t> idv(ids.begin(), ids.end());
  Tensor* grad = &p.grad;
  // The table itself is not a tape node; a constant stands in as the input so
  // Record() marks the output as differentiable.
  Var src = tape.Alias(p.value, &p.grad, "embedding_table");
  return tape.Record(std::move(y), {src}, "gather_rows", [grad, idv, d](Node& out) {
    const Tensor& g = out.grad();
    for (std::size_t i = 0; i < idv.size(); ++i) {
      for (std::size_t j = 0; j < d; ++j) (*grad)[idv[i] * d + j] += g[i * d + j];
    }
  });
}

Var GatherRows(Tape& tape, const ParamStore& store, const std::string& name,
               std::span<const std::size_t> ids) {
  return tape.Constant(GatherValues(store.Get(name).value, ids, name));
}

}  // namespace bcddi::nn
