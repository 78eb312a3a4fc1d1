#pragma once

#include <span>
#include <vector>

#include "ccnrank/autodiff.hpp"

// Differentiable primitives. Each records its forward value on the graph
// together with the exact backward rule; shape mismatches throw ShapeError
// naming both operands.
namespace ccnrank::ops {

enum class Pointwise { kSigmoid, kTanh, kAdd, kMul, kScale };

// [m x k] . [k x n] -> [m x n]; dA = dOut . B^T, dB = A^T . dOut
Var matmul(Graph& g, Var a, Var b);
// [m x n] . [n] -> [m]
Var matvec(Graph& g, Var a, Var x);
Var transpose(Graph& g, Var a);

Var add(Graph& g, Var a, Var b);
Var sub(Graph& g, Var a, Var b);
Var mul(Graph& g, Var a, Var b);
Var scale(Graph& g, Var a, double factor);
Var sigmoid(Graph& g, Var a);
Var tanh(Graph& g, Var a);

// Dispatches on kind; unary kinds take one input, kScale takes `factor`.
Var pointwise(Graph& g, Pointwise kind, std::span<const Var> inputs,
              double factor = 1.0);

Var sum(Graph& g, Var a);
Var dot(Graph& g, Var a, Var b);
// Packs one-element tensors into a vector, in argument order.
Var stack(Graph& g, std::span<const Var> scalars);

// Numerically safe scalar helpers shared by layers and oracles.
double sigmoid(double x) noexcept;

}  // namespace ccnrank::ops
