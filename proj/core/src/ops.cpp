#include "ccnrank/ops.hpp"

#include <cmath>
#include <string>

#include "ccnrank/errors.hpp"

namespace ccnrank::ops {
namespace {

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape() != b.shape()) {
    throw ShapeError(std::string(op) + ": shape mismatch " + a.shape_string() +
                     " vs " + b.shape_string());
  }
}

void require_rank(const Tensor& t, std::size_t rank, const char* op) {
  if (t.rank() != rank) {
    throw ShapeError(std::string(op) + ": expected rank " +
                     std::to_string(rank) + ", got " + t.shape_string());
  }
}

}  // namespace

double sigmoid(double x) noexcept {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

Var matmul(Graph& g, Var a, Var b) {
  const Tensor& A = g.value(a);
  const Tensor& B = g.value(b);
  require_rank(A, 2, "matmul");
  require_rank(B, 2, "matmul");
  const std::size_t m = A.dim(0), k = A.dim(1), n = B.dim(1);
  if (B.dim(0) != k) {
    throw ShapeError("matmul: inner dimensions disagree " + A.shape_string() +
                     " vs " + B.shape_string());
  }
  Tensor out(Shape{m, n});
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = A[i * k + p];
      if (aip == 0.0) continue;
      const double* brow = &B[p * n];
      double* orow = &out[i * n];
      for (std::size_t j = 0; j < n; ++j) orow[j] += aip * brow[j];
    }
  }
  const Tensor* pa = &A;
  const Tensor* pb = &B;
  return g.record(std::move(out), {a, b},
                  [pa, pb, m, k, n](const Tensor& dout,
                                    std::span<Tensor* const> in) {
                    const Tensor& A = *pa;
                    const Tensor& B = *pb;
                    if (Tensor* dA = in[0]) {
                      for (std::size_t i = 0; i < m; ++i)
                        for (std::size_t p = 0; p < k; ++p) {
                          double acc = 0.0;
                          for (std::size_t j = 0; j < n; ++j)
                            acc += dout[i * n + j] * B[p * n + j];
                          (*dA)[i * k + p] += acc;
                        }
                    }
                    if (Tensor* dB = in[1]) {
                      for (std::size_t i = 0; i < m; ++i)
                        for (std::size_t p = 0; p < k; ++p) {
                          const double aip = A[i * k + p];
                          if (aip == 0.0) continue;
                          for (std::size_t j = 0; j < n; ++j)
                            (*dB)[p * n + j] += aip * dout[i * n + j];
                        }
                    }
                  });
}

Var matvec(Graph& g, Var a, Var x) {
  const Tensor& A = g.value(a);
  const Tensor& X = g.value(x);
  require_rank(A, 2, "matvec");
  require_rank(X, 1, "matvec");
  const std::size_t m = A.dim(0), n = A.dim(1);
  if (X.dim(0) != n) {
    throw ShapeError("matvec: shape mismatch " + A.shape_string() + " vs " +
                     X.shape_string());
  }
  Tensor out(Shape{m});
  for (std::size_t i = 0; i < m; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) acc += A[i * n + j] * X[j];
    out[i] = acc;
  }
  const Tensor* pa = &A;
  const Tensor* px = &X;
  return g.record(std::move(out), {a, x},
                  [pa, px, m, n](const Tensor& dout,
                                 std::span<Tensor* const> in) {
                    if (Tensor* dA = in[0]) {
                      for (std::size_t i = 0; i < m; ++i)
                        for (std::size_t j = 0; j < n; ++j)
                          (*dA)[i * n + j] += dout[i] * (*px)[j];
                    }
                    if (Tensor* dX = in[1]) {
                      for (std::size_t i = 0; i < m; ++i)
                        for (std::size_t j = 0; j < n; ++j)
                          (*dX)[j] += dout[i] * (*pa)[i * n + j];
                    }
                  });
}

Var transpose(Graph& g, Var a) {
  const Tensor& A = g.value(a);
  require_rank(A, 2, "transpose");
  const std::size_t m = A.dim(0), n = A.dim(1);
  Tensor out(Shape{n, m});
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) out[j * m + i] = A[i * n + j];
  return g.record(std::move(out), {a},
                  [m, n](const Tensor& dout, std::span<Tensor* const> in) {
                    for (std::size_t i = 0; i < m; ++i)
                      for (std::size_t j = 0; j < n; ++j)
                        (*in[0])[i * n + j] += dout[j * m + i];
                  });
}

Var add(Graph& g, Var a, Var b) {
  const Tensor& A = g.value(a);
  const Tensor& B = g.value(b);
  require_same_shape(A, B, "add");
  Tensor out = A;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += B[i];
  return g.record(std::move(out), {a, b},
                  [](const Tensor& dout, std::span<Tensor* const> in) {
                    for (Tensor* d : in) {
                      if (!d) continue;
                      for (std::size_t i = 0; i < dout.size(); ++i)
                        (*d)[i] += dout[i];
                    }
                  });
}

Var sub(Graph& g, Var a, Var b) {
  const Tensor& A = g.value(a);
  const Tensor& B = g.value(b);
  require_same_shape(A, B, "sub");
  Tensor out = A;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= B[i];
  return g.record(std::move(out), {a, b},
                  [](const Tensor& dout, std::span<Tensor* const> in) {
                    for (std::size_t i = 0; i < dout.size(); ++i) {
                      if (in[0]) (*in[0])[i] += dout[i];
                      if (in[1]) (*in[1])[i] -= dout[i];
                    }
                  });
}

Var mul(Graph& g, Var a, Var b) {
  const Tensor& A = g.value(a);
  const Tensor& B = g.value(b);
  require_same_shape(A, B, "mul");
  Tensor out = A;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= B[i];
  const Tensor* pa = &A;
  const Tensor* pb = &B;
  return g.record(std::move(out), {a, b},
                  [pa, pb](const Tensor& dout, std::span<Tensor* const> in) {
                    for (std::size_t i = 0; i < dout.size(); ++i) {
                      if (in[0]) (*in[0])[i] += dout[i] * (*pb)[i];
                      if (in[1]) (*in[1])[i] += dout[i] * (*pa)[i];
                    }
                  });
}

Var scale(Graph& g, Var a, double factor) {
  Tensor out = g.value(a);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= factor;
  return g.record(std::move(out), {a},
                  [factor](const Tensor& dout, std::span<Tensor* const> in) {
                    for (std::size_t i = 0; i < dout.size(); ++i)
                      (*in[0])[i] += factor * dout[i];
                  });
}

Var sigmoid(Graph& g, Var a) {
  const Tensor& X = g.value(a);
  Tensor out = X;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = sigmoid(out[i]);
  const Tensor* px = &X;
  return g.record(std::move(out), {a},
                  [px](const Tensor& dout, std::span<Tensor* const> in) {
                    for (std::size_t i = 0; i < dout.size(); ++i) {
                      const double s = sigmoid((*px)[i]);
                      (*in[0])[i] += dout[i] * s * (1.0 - s);
                    }
                  });
}

Var tanh(Graph& g, Var a) {
  const Tensor& X = g.value(a);
  Tensor out = X;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::tanh(out[i]);
  const Tensor* px = &X;
  return g.record(std::move(out), {a},
                  [px](const Tensor& dout, std::span<Tensor* const> in) {
                    for (std::size_t i = 0; i < dout.size(); ++i) {
                      const double t = std::tanh((*px)[i]);
                      (*in[0])[i] += dout[i] * (1.0 - t * t);
                    }
                  });
}

Var pointwise(Graph& g, Pointwise kind, std::span<const Var> inputs,
              double factor) {
  const std::size_t arity =
      (kind == Pointwise::kAdd || kind == Pointwise::kMul) ? 2 : 1;
  if (inputs.size() != arity) {
    throw ContractError("pointwise: expected " + std::to_string(arity) +
                        " inputs, got " + std::to_string(inputs.size()));
  }
  switch (kind) {
    case Pointwise::kSigmoid: return sigmoid(g, inputs[0]);
    case Pointwise::kTanh: return tanh(g, inputs[0]);
    case Pointwise::kAdd: return add(g, inputs[0], inputs[1]);
    case Pointwise::kMul: return mul(g, inputs[0], inputs[1]);
    case Pointwise::kScale: return scale(g, inputs[0], factor);
  }
  throw ContractError("pointwise: unknown kind");
}

Var sum(Graph& g, Var a) {
  const Tensor& X = g.value(a);
  double acc = 0.0;
  for (double v : X.data()) acc += v;
  return g.record(Tensor::scalar(acc), {a},
                  [](const Tensor& dout, std::span<Tensor* const> in) {
                    const double d = dout[0];
                    for (double& v : in[0]->data()) v += d;
                  });
}

Var dot(Graph& g, Var a, Var b) {
  const Tensor& A = g.value(a);
  const Tensor& B = g.value(b);
  require_same_shape(A, B, "dot");
  double acc = 0.0;
  for (std::size_t i = 0; i < A.size(); ++i) acc += A[i] * B[i];
  const Tensor* pa = &A;
  const Tensor* pb = &B;
  return g.record(Tensor::scalar(acc), {a, b},
                  [pa, pb](const Tensor& dout, std::span<Tensor* const> in) {
                    const double d = dout[0];
                    for (std::size_t i = 0; i < pa->size(); ++i) {
                      if (in[0]) (*in[0])[i] += d * (*pb)[i];
                      if (in[1]) (*in[1])[i] += d * (*pa)[i];
                    }
                  });
}

Var stack(Graph& g, std::span<const Var> scalars) {
  std::vector<double> values;
  values.reserve(scalars.size());
  for (Var s : scalars) {
    const Tensor& t = g.value(s);
    if (t.size() != 1) {
      throw ShapeError("stack: expected one-element tensors, got " +
                       t.shape_string());
    }
    values.push_back(t[0]);
  }
  return g.record(Tensor::vector(std::move(values)),
                  std::vector<Var>(scalars.begin(), scalars.end()),
                  [](const Tensor& dout, std::span<Tensor* const> in) {
                    for (std::size_t i = 0; i < in.size(); ++i)
                      if (in[i]) (*in[i])[0] += dout[i];
                  });
}

}  // namespace ccnrank::ops
