#include "ccnrank/layers.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <memory>
#include <numeric>
#include <sstream>

#include "ccnrank/errors.hpp"
#include "ccnrank/ops.hpp"

namespace ccnrank::layers {
namespace {

Tensor uniform_tensor(Shape shape, Rng& rng, double scale) {
  Tensor t(std::move(shape));
  for (double& v : t.data()) v = rng.uniform(-scale, scale);
  return t;
}

// Activations saved by the LSTM forward pass for backpropagation.
struct LstmTrace {
  std::size_t steps = 0;
  std::size_t hidden = 0;
  std::size_t input = 0;
  std::size_t cols = 0;
  std::vector<double> gates;   // steps x 4H, post-activation (i, f, g, o)
  std::vector<double> cells;   // (steps + 1) x H, row 0 is c_{-1} = 0
  std::vector<double> hiddens; // (steps + 1) x H, row 0 is h_{-1} = 0
  std::vector<double> tanh_cells;  // steps x H
};

}  // namespace

void add_embedding(ParameterSet& params, const std::string& name,
                   std::size_t vocab_size, std::size_t dim, Rng& rng,
                   double scale) {
  Tensor table = uniform_tensor(Shape{vocab_size, dim}, rng, scale);
  for (std::size_t j = 0; j < dim; ++j) table[j] = 0.0;
  params.add(name, std::move(table));
}

void add_lstm(ParameterSet& params, const std::string& prefix,
              std::size_t input_dim, std::size_t hidden, Rng& rng,
              double scale) {
  params.add(prefix + ".W", uniform_tensor(Shape{4 * hidden, input_dim}, rng, scale));
  params.add(prefix + ".U", uniform_tensor(Shape{4 * hidden, hidden}, rng, scale));
  Tensor bias(Shape{4 * hidden});
  for (std::size_t j = 0; j < hidden; ++j) bias[kForgetGate * hidden + j] = 1.0;
  params.add(prefix + ".b", std::move(bias));
}

LstmParams lstm_params(Graph& g, ParameterSet& params, const std::string& prefix) {
  return LstmParams{g.param(params, prefix + ".W"), g.param(params, prefix + ".U"),
                    g.param(params, prefix + ".b")};
}

std::size_t load_pretrained_embeddings(const std::filesystem::path& path,
                                       const Vocabulary& vocab, Tensor& table,
                                       const std::function<bool(TokenId)>& accept) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open embeddings file '" + path.string() + "'");
  const std::size_t dim = table.dim(1);
  std::vector<bool> filled(vocab.size(), false);
  std::size_t covered = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(line);
    std::string word;
    if (!(fields >> word)) continue;
    const auto id = vocab.find(word);
    if (!id || filled[*id] || (accept && !accept(*id))) continue;
    std::vector<double> values;
    values.reserve(dim);
    double v;
    while (fields >> v) values.push_back(v);
    if (!fields.eof()) {
      throw ParseError("embeddings line " + std::to_string(line_no) +
                       ": non-numeric component");
    }
    if (values.size() != dim) {
      throw ParseError("embeddings line " + std::to_string(line_no) + ": " +
                       std::to_string(values.size()) + " components, expected " +
                       std::to_string(dim));
    }
    std::copy(values.begin(), values.end(), &table[*id * dim]);
    filled[*id] = true;
    ++covered;
  }
  return covered;
}

Var embed_lookup(Graph& g, Var table, const EncodedSequence& ids) {
  const Tensor& E = g.value(table);
  if (E.rank() != 2) throw ShapeError("embed_lookup: table must be rank 2, got " + E.shape_string());
  const std::size_t vocab = E.dim(0), dim = E.dim(1), len = ids.ids.size();
  for (TokenId id : ids.ids) {
    if (id >= vocab) {
      throw ContractError("embed_lookup: id " + std::to_string(id) +
                          " out of range for vocabulary of " + std::to_string(vocab));
    }
  }
  Tensor out(Shape{dim, len});
  for (std::size_t i = 0; i < len; ++i) {
    const TokenId id = ids.ids[i];
    if (id == kPadId) continue;
    for (std::size_t n = 0; n < dim; ++n) out[n * len + i] = E[id * dim + n];
  }
  auto id_copy = std::make_shared<std::vector<TokenId>>(ids.ids);
  return g.record(std::move(out), {table},
                  [id_copy, dim, len](const Tensor& dout, std::span<Tensor* const> in) {
                    Tensor& dE = *in[0];
                    for (std::size_t i = 0; i < len; ++i) {
                      const TokenId id = (*id_copy)[i];
                      if (id == kPadId) continue;
                      for (std::size_t n = 0; n < dim; ++n)
                        dE[id * dim + n] += dout[n * len + i];
                    }
                  });
}

Var lstm_encode(Graph& g, Var x, std::size_t true_length, const LstmParams& p) {
  const Tensor& X = g.value(x);
  const Tensor& W = g.value(p.input_weights);
  const Tensor& U = g.value(p.recurrent_weights);
  const Tensor& B = g.value(p.bias);
  if (X.rank() != 2 || W.rank() != 2 || U.rank() != 2 || B.rank() != 1) {
    throw ShapeError("lstm_encode: bad ranks X" + X.shape_string() + " W" +
                     W.shape_string() + " U" + U.shape_string() + " b" + B.shape_string());
  }
  const std::size_t input = X.dim(0), cols = X.dim(1);
  const std::size_t hidden = U.dim(1);
  const std::size_t gates = 4 * hidden;
  if (W.dim(0) != gates || W.dim(1) != input || U.dim(0) != gates || B.dim(0) != gates) {
    throw ShapeError("lstm_encode: parameter shapes W" + W.shape_string() + " U" +
                     U.shape_string() + " b" + B.shape_string() +
                     " do not match input " + X.shape_string());
  }
  if (true_length > cols) {
    throw ContractError("lstm_encode: true_length " + std::to_string(true_length) +
                        " exceeds sequence length " + std::to_string(cols));
  }
  if (true_length == 0) return g.constant(Tensor(Shape{hidden}));

  auto tr = std::make_shared<LstmTrace>();
  tr->steps = true_length;
  tr->hidden = hidden;
  tr->input = input;
  tr->cols = cols;
  tr->gates.assign(true_length * gates, 0.0);
  tr->cells.assign((true_length + 1) * hidden, 0.0);
  tr->hiddens.assign((true_length + 1) * hidden, 0.0);
  tr->tanh_cells.assign(true_length * hidden, 0.0);

  std::vector<double> z(gates);
  for (std::size_t t = 0; t < true_length; ++t) {
    const double* h_prev = &tr->hiddens[t * hidden];
    const double* c_prev = &tr->cells[t * hidden];
    for (std::size_t r = 0; r < gates; ++r) {
      double acc = B[r];
      const double* wrow = &W[r * input];
      for (std::size_t n = 0; n < input; ++n) acc += wrow[n] * X[n * cols + t];
      const double* urow = &U[r * hidden];
      for (std::size_t j = 0; j < hidden; ++j) acc += urow[j] * h_prev[j];
      z[r] = acc;
    }
    double* gt = &tr->gates[t * gates];
    double* c = &tr->cells[(t + 1) * hidden];
    double* h = &tr->hiddens[(t + 1) * hidden];
    double* tc = &tr->tanh_cells[t * hidden];
    for (std::size_t j = 0; j < hidden; ++j) {
      const double ig = ops::sigmoid(z[kInputGate * hidden + j]);
      const double fg = ops::sigmoid(z[kForgetGate * hidden + j]);
      const double cg = std::tanh(z[kCellGate * hidden + j]);
      const double og = ops::sigmoid(z[kOutputGate * hidden + j]);
      gt[kInputGate * hidden + j] = ig;
      gt[kForgetGate * hidden + j] = fg;
      gt[kCellGate * hidden + j] = cg;
      gt[kOutputGate * hidden + j] = og;
      c[j] = fg * c_prev[j] + ig * cg;
      tc[j] = std::tanh(c[j]);
      h[j] = og * tc[j];
    }
  }
  Tensor out(Shape{hidden});
  std::copy_n(&tr->hiddens[true_length * hidden], hidden, out.data().begin());

  const Tensor* px = &X;
  const Tensor* pw = &W;
  const Tensor* pu = &U;
  return g.record(
      std::move(out), {x, p.input_weights, p.recurrent_weights, p.bias},
      [tr, px, pw, pu](const Tensor& dout, std::span<Tensor* const> in) {
        const std::size_t H = tr->hidden, G = 4 * H, N = tr->input, C = tr->cols;
        const Tensor& X = *px;
        const Tensor& W = *pw;
        const Tensor& U = *pu;
        Tensor* dX = in[0];
        Tensor* dW = in[1];
        Tensor* dU = in[2];
        Tensor* dB = in[3];
        std::vector<double> dh(dout.data().begin(), dout.data().end());
        std::vector<double> dc(H, 0.0);
        std::vector<double> dz(G);
        for (std::size_t t = tr->steps; t-- > 0;) {
          const double* gt = &tr->gates[t * G];
          const double* c_prev = &tr->cells[t * H];
          const double* h_prev = &tr->hiddens[t * H];
          const double* tc = &tr->tanh_cells[t * H];
          for (std::size_t j = 0; j < H; ++j) {
            const double ig = gt[kInputGate * H + j];
            const double fg = gt[kForgetGate * H + j];
            const double cg = gt[kCellGate * H + j];
            const double og = gt[kOutputGate * H + j];
            const double d_o = dh[j] * tc[j];
            dc[j] += dh[j] * og * (1.0 - tc[j] * tc[j]);
            dz[kInputGate * H + j] = dc[j] * cg * ig * (1.0 - ig);
            dz[kForgetGate * H + j] = dc[j] * c_prev[j] * fg * (1.0 - fg);
            dz[kCellGate * H + j] = dc[j] * ig * (1.0 - cg * cg);
            dz[kOutputGate * H + j] = d_o * og * (1.0 - og);
            dc[j] *= fg;  // carried to step t-1
          }
          if (dW) {
            for (std::size_t r = 0; r < G; ++r) {
              if (dz[r] == 0.0) continue;
              double* row = &(*dW)[r * N];
              for (std::size_t n = 0; n < N; ++n) row[n] += dz[r] * X[n * C + t];
            }
          }
          if (dU && t > 0) {
            for (std::size_t r = 0; r < G; ++r) {
              if (dz[r] == 0.0) continue;
              double* row = &(*dU)[r * H];
              for (std::size_t j = 0; j < H; ++j) row[j] += dz[r] * h_prev[j];
            }
          }
          if (dB) {
            for (std::size_t r = 0; r < G; ++r) (*dB)[r] += dz[r];
          }
          if (dX) {
            for (std::size_t r = 0; r < G; ++r) {
              if (dz[r] == 0.0) continue;
              const double* wrow = &W[r * N];
              for (std::size_t n = 0; n < N; ++n) (*dX)[n * C + t] += dz[r] * wrow[n];
            }
          }
          std::fill(dh.begin(), dh.end(), 0.0);
          if (t > 0) {
            for (std::size_t r = 0; r < G; ++r) {
              if (dz[r] == 0.0) continue;
              const double* urow = &U[r * H];
              for (std::size_t j = 0; j < H; ++j) dh[j] += dz[r] * urow[j];
            }
          }
        }
      });
}

Var bilinear_score(Graph& g, Var c, Var r, const BilinearParams& p) {
  const Tensor& M = g.value(p.m);
  const Tensor& cv = g.value(c);
  const Tensor& rv = g.value(r);
  if (M.rank() != 2 || M.dim(0) != M.dim(1) || cv.rank() != 1 || rv.rank() != 1 ||
      cv.dim(0) != M.dim(0) || rv.dim(0) != M.dim(1)) {
    throw ShapeError("bilinear_score: c" + cv.shape_string() + " M" + M.shape_string() +
                     " r" + rv.shape_string());
  }
  return ops::dot(g, c, ops::matvec(g, p.m, r));
}

Var dense_score(Graph& g, Var h, const DenseScorerParams& p) {
  const Tensor& d = g.value(p.d);
  const Tensor& hv = g.value(h);
  if (d.rank() != 1 || hv.rank() != 1 || d.dim(0) != hv.dim(0)) {
    throw ShapeError("dense_score: d" + d.shape_string() + " h" + hv.shape_string());
  }
  return ops::dot(g, p.d, h);
}

std::vector<std::size_t> kmax_positions(std::span<const double> values,
                                        std::size_t k) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const std::size_t take = std::min(k, values.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take),
                    order.end(), [&](std::size_t a, std::size_t b) {
                      if (values[a] != values[b]) return values[a] > values[b];
                      return a < b;
                    });
  order.resize(take);
  return order;
}

std::vector<double> kmax(std::span<const double> values, std::size_t k) {
  std::vector<double> out(k, 0.0);
  const auto pos = kmax_positions(values, k);
  for (std::size_t i = 0; i < pos.size(); ++i) out[i] = values[pos[i]];
  return out;
}

Var kmax_pool_rows(Graph& g, Var s, std::size_t valid_cols, std::size_t k) {
  const Tensor& S = g.value(s);
  if (S.rank() != 2) throw ShapeError("kmax_pool_rows: expected a matrix, got " + S.shape_string());
  if (k == 0) throw ConfigError("kmax_pool_rows: k must be >= 1");
  const std::size_t rows = S.dim(0), cols = S.dim(1);
  valid_cols = std::min(valid_cols, cols);
  Tensor out(Shape{rows * k});
  // selected[r * k + j] is the source column of slot j, or cols for empty.
  auto selected = std::make_shared<std::vector<std::size_t>>(rows * k, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    std::span<const double> row(&S[r * cols], valid_cols);
    const auto pos = kmax_positions(row, k);
    for (std::size_t j = 0; j < pos.size(); ++j) {
      out[r * k + j] = row[pos[j]];
      (*selected)[r * k + j] = pos[j];
    }
  }
  return g.record(std::move(out), {s},
                  [selected, cols, k](const Tensor& dout, std::span<Tensor* const> in) {
                    Tensor& dS = *in[0];
                    for (std::size_t slot = 0; slot < selected->size(); ++slot) {
                      const std::size_t col = (*selected)[slot];
                      if (col == cols) continue;
                      const std::size_t row = slot / k;
                      dS[row * cols + col] += dout[slot];
                    }
                  });
}

CcnOutput cross_convolution(Graph& g, Var context, std::size_t context_length,
                            Var response, const CcnParams& p) {
  const Tensor& C = g.value(context);
  const Tensor& R = g.value(response);
  if (C.rank() != 2 || R.rank() != 2 || C.dim(0) != R.dim(0)) {
    throw ShapeError("cross_convolution: context " + C.shape_string() +
                     " and response " + R.shape_string() + " disagree");
  }
  const std::size_t len = C.dim(1);
  if (p.k == 0 || p.k > len) {
    throw ConfigError("cross_convolution: k=" + std::to_string(p.k) +
                      " must lie in [1, L=" + std::to_string(len) + "]");
  }
  const Tensor& a = g.value(p.weights);
  if (a.rank() != 1 || a.dim(0) != p.k * R.dim(1)) {
    throw ShapeError("cross_convolution: dense weights " + a.shape_string() +
                     " need k*L = " + std::to_string(p.k * R.dim(1)) + " entries");
  }
  // S[i][j] = <response word i, context word j>
  Var sim = ops::matmul(g, ops::transpose(g, response), context);
  Var pooled = kmax_pool_rows(g, sim, context_length, p.k);
  Var score = ops::add(g, ops::dot(g, p.weights, pooled), p.bias);
  if (p.parallel_weights && p.parallel_bias) {
    Var side = ops::sigmoid(
        g, ops::add(g, ops::dot(g, *p.parallel_weights, pooled), *p.parallel_bias));
    Var centered = ops::sub(g, side, g.constant(Tensor::scalar(0.5)));
    score = ops::add(g, score, centered);
  }
  Var prob = p.activation == CcnActivation::kSigmoid ? ops::sigmoid(g, score) : score;
  return CcnOutput{score, prob};
}

}  // namespace ccnrank::layers
