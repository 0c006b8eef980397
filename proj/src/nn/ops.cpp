// Copyright 2026 The Coref Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "coref/nn/ops.hpp"

#include <string>

#include "coref/error.hpp"

namespace coref::nn {
namespace {

void require_same_shape(Var a, Var b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError(std::string(op) + ": shape mismatch " + std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                         std::to_string(b.cols()));
  }
}

}  // namespace

Var matmul(Var a, Var b) {
  if (a.cols() != b.rows()) {
    throw DimensionError("matmul: inner dimensions " + std::to_string(a.cols()) + " and " +
                         std::to_string(b.rows()));
  }
  Graph& g = a.graph();
  return g.make(a.value() * b.value(), {a, b}, [a, b](Graph& g, const Matrix& d) {
    if (g.needs_grad(a)) g.add_grad(a, d * b.value().transpose());
    if (g.needs_grad(b)) g.add_grad(b, a.value().transpose() * d);
  });
}

Var transpose(Var a) {
  return a.graph().make(a.value().transpose(), {a},
                        [a](Graph& g, const Matrix& d) { g.add_grad(a, d.transpose()); });
}

Var add(Var a, Var b) {
  require_same_shape(a, b, "add");
  return a.graph().make(a.value() + b.value(), {a, b}, [a, b](Graph& g, const Matrix& d) {
    g.add_grad(a, d);
    g.add_grad(b, d);
  });
}

Var sub(Var a, Var b) {
  require_same_shape(a, b, "sub");
  return a.graph().make(a.value() - b.value(), {a, b}, [a, b](Graph& g, const Matrix& d) {
    g.add_grad(a, d);
    g.add_grad(b, -d);
  });
}

Var mul(Var a, Var b) {
  require_same_shape(a, b, "mul");
  return a.graph().make(a.value().cwiseProduct(b.value()), {a, b},
                        [a, b](Graph& g, const Matrix& d) {
                          if (g.needs_grad(a)) g.add_grad(a, d.cwiseProduct(b.value()));
                          if (g.needs_grad(b)) g.add_grad(b, d.cwiseProduct(a.value()));
                        });
}

Var scale(Var a, Real s) {
  return a.graph().make(a.value() * s, {a},
                        [a, s](Graph& g, const Matrix& d) { g.add_grad(a, d * s); });
}

Var add_row(Var a, Var row) {
  if (row.rows() != 1 || row.cols() != a.cols()) throw DimensionError("add_row: bad row shape");
  Matrix out = a.value().rowwise() + row.value().row(0);
  return a.graph().make(std::move(out), {a, row}, [a, row](Graph& g, const Matrix& d) {
    g.add_grad(a, d);
    if (g.needs_grad(row)) g.add_grad(row, d.colwise().sum());
  });
}

Var relu(Var a) {
  Matrix out = a.value().cwiseMax(0.0);
  return a.graph().make(std::move(out), {a}, [a](Graph& g, const Matrix& d) {
    g.add_grad(a, (a.value().array() > 0.0).cast<Real>().matrix().cwiseProduct(d));
  });
}

Var sigmoid(Var a) {
  Matrix out = a.value().unaryExpr([](Real x) { return nn::sigmoid(x); });
  Matrix s = out;
  return a.graph().make(std::move(out), {a}, [a, s = std::move(s)](Graph& g, const Matrix& d) {
    g.add_grad(a, d.cwiseProduct(s.cwiseProduct((1.0 - s.array()).matrix())));
  });
}

Var linear(Var x, Var w, Var b) { return add_row(matmul(x, w), b); }

Var gate_mix(Var f, Var g, Var a) {
  Matrix out = nn::gate_mix(f.value(), g.value(), a.value());
  return f.graph().make(std::move(out), {f, g, a}, [f, g, a](Graph& gr, const Matrix& d) {
    if (gr.needs_grad(f)) gr.add_grad(f, d.cwiseProduct(g.value() - a.value()));
    if (gr.needs_grad(g)) gr.add_grad(g, d.cwiseProduct(f.value()));
    if (gr.needs_grad(a)) {
      gr.add_grad(a, d.cwiseProduct((1.0 - f.value().array()).matrix()));
    }
  });
}

Var concat_cols(const std::vector<Var>& parts) {
  if (parts.empty()) throw DimensionError("concat_cols: no inputs");
  const Eigen::Index rows = parts.front().rows();
  Eigen::Index cols = 0;
  for (const Var& p : parts) {
    if (p.rows() != rows) throw DimensionError("concat_cols: row count mismatch");
    cols += p.cols();
  }
  Matrix out(rows, cols);
  Eigen::Index off = 0;
  for (const Var& p : parts) {
    out.middleCols(off, p.cols()) = p.value();
    off += p.cols();
  }
  return parts.front().graph().make(
      std::move(out), std::span<const Var>(parts), [parts](Graph& g, const Matrix& d) {
        Eigen::Index off = 0;
        for (const Var& p : parts) {
          if (g.needs_grad(p)) g.add_grad(p, d.middleCols(off, p.cols()));
          off += p.cols();
        }
      });
}

Var concat_rows(const std::vector<Var>& parts) {
  if (parts.empty()) throw DimensionError("concat_rows: no inputs");
  const Eigen::Index cols = parts.front().cols();
  Eigen::Index rows = 0;
  for (const Var& p : parts) {
    if (p.cols() != cols) throw DimensionError("concat_rows: column count mismatch");
    rows += p.rows();
  }
  Matrix out(rows, cols);
  Eigen::Index off = 0;
  for (const Var& p : parts) {
    out.middleRows(off, p.rows()) = p.value();
    off += p.rows();
  }
  return parts.front().graph().make(
      std::move(out), std::span<const Var>(parts), [parts](Graph& g, const Matrix& d) {
        Eigen::Index off = 0;
        for (const Var& p : parts) {
          if (g.needs_grad(p)) g.add_grad(p, d.middleRows(off, p.rows()));
          off += p.rows();
        }
      });
}

Var gather_rows(Var a, const IndexVector& rows) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), a.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] < 0 || rows[i] >= a.rows()) throw DimensionError("gather_rows: index out of range");
    out.row(static_cast<Eigen::Index>(i)) = a.value().row(rows[i]);
  }
  return a.graph().make(std::move(out), {a}, [a, rows](Graph& g, const Matrix& d) {
    Matrix& ga = g.grad_buffer(a);
    for (std::size_t i = 0; i < rows.size(); ++i) ga.row(rows[i]) += d.row(static_cast<Eigen::Index>(i));
  });
}

Var dropout(Var a, Real rate, Rng& rng) {
  if (rate <= 0.0) return a;
  if (rate >= 1.0) throw ArgumentError("dropout rate must be < 1");
  Matrix mask(a.rows(), a.cols());
  const Real keep_scale = 1.0 / (1.0 - rate);
  for (Eigen::Index j = 0; j < mask.cols(); ++j) {
    for (Eigen::Index i = 0; i < mask.rows(); ++i) {
      mask(i, j) = rng.uniform() < rate ? 0.0 : keep_scale;
    }
  }
  Matrix out = a.value().cwiseProduct(mask);
  return a.graph().make(std::move(out), {a}, [a, mask = std::move(mask)](Graph& g, const Matrix& d) {
    g.add_grad(a, d.cwiseProduct(mask));
  });
}

Var sum(Var a) {
  Matrix out(1, 1);
  out(0, 0) = a.value().sum();
  return a.graph().make(std::move(out), {a}, [a](Graph& g, const Matrix& d) {
    g.add_grad(a, Matrix::Constant(a.rows(), a.cols(), d(0, 0)));
  });
}

Var lower_triangle(Var a) {
  Matrix out = a.value().triangularView<Eigen::Lower>();
  return a.graph().make(std::move(out), {a}, [a](Graph& g, const Matrix& d) {
    Matrix lower = d.triangularView<Eigen::Lower>();
    g.add_grad(a, lower);
  });
}

Var scatter(Var values, const IndexVector& rows, const IndexVector& cols, Eigen::Index out_rows,
            Eigen::Index out_cols) {
  if (values.cols() != 1 || static_cast<std::size_t>(values.rows()) != rows.size() ||
      rows.size() != cols.size()) {
    throw DimensionError("scatter: values must be n x 1 with n row/col indices");
  }
  Matrix out = Matrix::Zero(out_rows, out_cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out(rows[i], cols[i]) += values.value()(static_cast<Eigen::Index>(i), 0);
  }
  return values.graph().make(std::move(out), {values}, [values, rows, cols](Graph& g, const Matrix& d) {
    Matrix gv(static_cast<Eigen::Index>(rows.size()), 1);
    for (std::size_t i = 0; i < rows.size(); ++i) gv(static_cast<Eigen::Index>(i), 0) = d(rows[i], cols[i]);
    g.add_grad(values, gv);
  });
}

Var row_log_sum_exp(Var scores, const Mask& mask) {
  const Matrix& s = scores.value();
  if (mask.rows() != s.rows() || mask.cols() != s.cols()) throw DimensionError("row_log_sum_exp: mask shape");
  Matrix out(s.rows(), 1);
  for (Eigen::Index i = 0; i < s.rows(); ++i) out(i, 0) = masked_log_sum_exp(s.row(i), mask.row(i));
  return scores.graph().make(std::move(out), {scores}, [scores, mask](Graph& g, const Matrix& d) {
    const Matrix& s = scores.value();
    Matrix gs = Matrix::Zero(s.rows(), s.cols());
    for (Eigen::Index i = 0; i < s.rows(); ++i) {
      gs.row(i) = masked_softmax(s.row(i), mask.row(i)) * d(i, 0);
    }
    g.add_grad(scores, gs);
  });
}

Var row_softmax(Var scores, const Mask& mask) {
  const Matrix& s = scores.value();
  if (mask.rows() != s.rows() || mask.cols() != s.cols()) throw DimensionError("row_softmax: mask shape");
  Matrix out(s.rows(), s.cols());
  for (Eigen::Index i = 0; i < s.rows(); ++i) out.row(i) = masked_softmax(s.row(i), mask.row(i));
  Matrix p = out;
  return scores.graph().make(std::move(out), {scores}, [scores, p = std::move(p)](Graph& g, const Matrix& d) {
    // dS_ij = P_ij (dP_ij - sum_k P_ik dP_ik); masked entries have P = 0.
    Vector inner = (p.cwiseProduct(d)).rowwise().sum();
    Matrix gs = p.cwiseProduct(d - inner.replicate(1, d.cols()));
    g.add_grad(scores, gs);
  });
}

}  // namespace coref::nn
