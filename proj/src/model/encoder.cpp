#include "evicheck/model/encoder.hpp"

#include <algorithm>
#include <cmath>

#include "evicheck/error.hpp"
#include "evicheck/simd/kernels.hpp"

namespace evicheck::model {
namespace {

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

void softmax_inplace(std::span<double> v) {
  if (v.empty()) return;
  const double mx = *std::max_element(v.begin(), v.end());
  double sum = 0.0;
  for (double& x : v) {
    x = std::exp(x - mx);
    sum += x;
  }
  for (double& x : v) x /= sum;
}

}  // namespace

Vocabulary::Vocabulary()
    : Vocabulary(std::vector<std::string>{"<unk>", std::string(kClsMarker), std::string(kSepMarker)}) {}

Vocabulary::Vocabulary(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {
  if (tokens_.size() < 3 || tokens_[kUnk] != "<unk>" || tokens_[kCls] != kClsMarker ||
      tokens_[kSep] != kSepMarker) {
    throw Error(ErrorCode::kInvalidInput, "vocabulary must start with <unk>, [CLS], [SEP]");
  }
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    if (!index_.emplace(tokens_[i], static_cast<std::int32_t>(i)).second) {
      throw Error(ErrorCode::kInvalidInput, "duplicate vocabulary entry '" + tokens_[i] + "'");
    }
  }
}

std::int32_t Vocabulary::add(const std::string& token) {
  auto [it, inserted] = index_.emplace(token, static_cast<std::int32_t>(tokens_.size()));
  if (inserted) tokens_.push_back(token);
  return it->second;
}

std::int32_t Vocabulary::lookup(const std::string& token) const {
  auto it = index_.find(token);
  return it == index_.end() ? kUnk : it->second;
}

EncodedIds to_ids(const EncodedInput& input, const Vocabulary& vocab) {
  EncodedIds out;
  out.claim_span = input.claim_span;
  out.doc_span = input.doc_span;
  out.ids.reserve(input.tokens.size());
  out.segments.reserve(input.tokens.size());
  for (std::size_t i = 0; i < input.tokens.size(); ++i) {
    out.ids.push_back(vocab.lookup(input.tokens[i]));
    Segment seg = Segment::kSep;
    if (i == 0) {
      seg = Segment::kCls;
    } else if (i >= input.claim_span.begin && i < input.claim_span.end) {
      seg = Segment::kClaim;
    } else if (i >= input.doc_span.begin && i < input.doc_span.end) {
      seg = Segment::kDoc;
    }
    out.segments.push_back(seg);
  }
  return out;
}

ParamLayout::ParamLayout(EncoderShape s) : shape(s) {
  const std::size_t d = s.dim, d2 = 2 * s.dim, d3 = 3 * s.dim, h = s.hidden;
  std::size_t off = 0;
  auto take = [&off](std::size_t n) {
    const std::size_t at = off;
    off += n;
    return at;
  };
  embed = take(s.vocab * d);
  segment = take(kNumSegments * d);
  w0 = take(d * d);
  wl = take(d * d);
  wr = take(d * d);
  bh = take(d);
  w_ev = take(d2);
  b_ev = take(1);
  wq = take(d2 * d);
  bq = take(d2);
  v = take(h * d3);
  bv = take(h);
  u = take(kNumLabels * h);
  bu = take(kNumLabels);
  total = off;
}

namespace {

void fill_normal(std::span<double> out, double stddev, std::mt19937_64& rng) {
  std::normal_distribution<double> dist(0.0, stddev);
  for (double& x : out) x = dist(rng);
}

}  // namespace

Encoder::Encoder(EncoderShape shape, std::uint64_t seed)
    : layout_(shape), params_(layout_.total, 0.0) {
  std::mt19937_64 rng(seed);
  const auto d = static_cast<double>(shape.dim);
  const auto h = static_cast<double>(shape.hidden);
  auto block = [this](std::size_t off, std::size_t n) {
    return std::span<double>(params_).subspan(off, n);
  };
  const std::size_t dd = shape.dim * shape.dim;
  fill_normal(block(layout_.embed, shape.vocab * shape.dim), 0.3, rng);
  fill_normal(block(layout_.segment, kNumSegments * shape.dim), 0.3, rng);
  fill_normal(block(layout_.w0, dd), 1.0 / std::sqrt(3.0 * d), rng);
  fill_normal(block(layout_.wl, dd), 1.0 / std::sqrt(3.0 * d), rng);
  fill_normal(block(layout_.wr, dd), 1.0 / std::sqrt(3.0 * d), rng);
  fill_normal(block(layout_.w_ev, 2 * shape.dim), 1.0 / std::sqrt(2.0 * d), rng);
  fill_normal(block(layout_.wq, 2 * dd), 1.0 / std::sqrt(d), rng);
  fill_normal(block(layout_.v, shape.hidden * 3 * shape.dim), 1.0 / std::sqrt(3.0 * d), rng);
  fill_normal(block(layout_.u, kNumLabels * shape.hidden), 1.0 / std::sqrt(h), rng);
}

Encoder::Encoder(EncoderShape shape, std::vector<double> params)
    : layout_(shape), params_(std::move(params)) {
  if (params_.size() != layout_.total) {
    throw Error(ErrorCode::kInvalidInput, "parameter count " + std::to_string(params_.size()) +
                                              " does not match encoder shape (" +
                                              std::to_string(layout_.total) + ")");
  }
}

struct Encoder::Cache {
  std::size_t tokens = 0;
  std::vector<double> x, h, s, r, z, p, q, alpha, c_feat, m;
  std::array<double, kNumLabels> probs{};
};

void Encoder::run_forward(const EncodedIds& in, Cache& k) const {
  const EncoderShape& sh = layout_.shape;
  const std::size_t d = sh.dim, d2 = 2 * d, d3 = 3 * d, hd = sh.hidden;
  const std::size_t n = in.ids.size();
  const std::size_t nd = in.doc_span.size();
  const double* P = params_.data();
  using simd::ConstMatrixView;

  k.tokens = n;
  k.x.assign(n * d, 0.0);
  k.h.assign(n * d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto id = static_cast<std::size_t>(in.ids[i]);
    if (id >= sh.vocab) throw Error(ErrorCode::kInvalidInput, "token id outside vocabulary");
    std::span<double> xi(k.x.data() + i * d, d);
    std::copy_n(P + layout_.embed + id * d, d, xi.begin());
    simd::axpy(1.0, {P + layout_.segment + static_cast<std::size_t>(in.segments[i]) * d, d}, xi);
  }
  const ConstMatrixView w0(P + layout_.w0, d, d), wl(P + layout_.wl, d, d),
      wr(P + layout_.wr, d, d);
  for (std::size_t i = 0; i < n; ++i) {
    std::span<double> hi(k.h.data() + i * d, d);
    std::copy_n(P + layout_.bh, d, hi.begin());
    simd::gemv(w0, {k.x.data() + i * d, d}, hi);
    if (i > 0) simd::gemv(wl, {k.x.data() + (i - 1) * d, d}, hi);
    if (i + 1 < n) simd::gemv(wr, {k.x.data() + (i + 1) * d, d}, hi);
    for (double& v : hi) v = std::tanh(v);
  }

  k.s.assign(d, 0.0);
  if (!in.claim_span.empty()) {
    const double inv = 1.0 / static_cast<double>(in.claim_span.size());
    for (std::size_t i = in.claim_span.begin; i < in.claim_span.end; ++i) {
      simd::axpy(inv, {k.h.data() + i * d, d}, k.s);
    }
  }

  k.r.assign(nd * d2, 0.0);
  k.z.assign(nd, 0.0);
  k.p.assign(nd, 0.0);
  const std::span<const double> w_ev(P + layout_.w_ev, d2);
  for (std::size_t j = 0; j < nd; ++j) {
    const double* hi = k.h.data() + (in.doc_span.begin + j) * d;
    double* rj = k.r.data() + j * d2;
    std::copy_n(hi, d, rj);
    simd::hadamard({hi, d}, k.s, {rj + d, d});
    k.z[j] = simd::dot(w_ev, {rj, d2}) + P[layout_.b_ev];
    k.p[j] = sigmoid(k.z[j]);
  }

  k.q.assign(P + layout_.bq, P + layout_.bq + d2);
  simd::gemv(ConstMatrixView(P + layout_.wq, d2, d), {k.h.data(), d}, k.q);
  const double scale = 1.0 / std::sqrt(static_cast<double>(d2));
  k.alpha.assign(nd, 0.0);
  for (std::size_t j = 0; j < nd; ++j) k.alpha[j] = scale * simd::dot(k.q, {k.r.data() + j * d2, d2});
  softmax_inplace(k.alpha);

  k.c_feat.assign(d3, 0.0);
  for (std::size_t j = 0; j < nd; ++j) {
    simd::axpy(k.alpha[j], {k.r.data() + j * d2, d2}, {k.c_feat.data(), d2});
  }
  std::copy(k.s.begin(), k.s.end(), k.c_feat.begin() + static_cast<std::ptrdiff_t>(d2));

  k.m.assign(P + layout_.bv, P + layout_.bv + hd);
  simd::gemv(ConstMatrixView(P + layout_.v, hd, d3), k.c_feat, k.m);
  for (double& v : k.m) v = std::tanh(v);

  std::array<double, kNumLabels> logits{P[layout_.bu], P[layout_.bu + 1]};
  simd::gemv(ConstMatrixView(P + layout_.u, kNumLabels, hd), k.m, logits);
  softmax_inplace(logits);
  k.probs = logits;
}

ForwardResult Encoder::forward(const EncodedIds& input) const {
  Cache k;
  run_forward(input, k);
  ForwardResult out;
  out.prediction.label_probs = k.probs;
  out.prediction.evidence_probs = std::move(k.p);
  out.evidence_logits = std::move(k.z);
  return out;
}

LossBreakdown Encoder::loss_and_grad(const EncodedIds& in, const Supervision& sup,
                                     std::span<double> grad) const {
  if (grad.size() != params_.size()) {
    throw Error(ErrorCode::kInvalidInput, "gradient buffer does not match parameter count");
  }
  Cache k;
  run_forward(in, k);

  const EncoderShape& sh = layout_.shape;
  const std::size_t d = sh.dim, d2 = 2 * d, d3 = 3 * d, hd = sh.hidden;
  const std::size_t n = k.tokens;
  const std::size_t nd = in.doc_span.size();
  const double* P = params_.data();
  double* G = grad.data();
  using simd::ConstMatrixView;
  using simd::MatrixView;

  const double t_loss = task_loss(k.probs, sup.label);
  double e_loss = 0.0;
  std::vector<double> dz;
  if (sup.rationale != nullptr) {
    e_loss = explanation_loss(k.p, *sup.rationale);
    dz.assign(nd, 0.0);
    explanation_loss_logit_grad(k.p, *sup.rationale, dz);
    for (double& g : dz) g *= sup.lambda;
  }
  const LossBreakdown loss = total_loss(t_loss, e_loss, sup.rationale ? sup.lambda : 0.0);

  // Label head.
  std::array<double, kNumLabels> dlogits = k.probs;
  dlogits[static_cast<std::size_t>(sup.label)] -= 1.0;
  simd::ger(1.0, dlogits, k.m, MatrixView{G + layout_.u, kNumLabels, hd});
  simd::axpy(1.0, dlogits, {G + layout_.bu, kNumLabels});
  std::vector<double> dm(hd, 0.0);
  simd::gemv_t(ConstMatrixView(P + layout_.u, kNumLabels, hd), dlogits, dm);
  for (std::size_t i = 0; i < hd; ++i) dm[i] *= 1.0 - k.m[i] * k.m[i];
  simd::ger(1.0, dm, k.c_feat, MatrixView{G + layout_.v, hd, d3});
  simd::axpy(1.0, dm, {G + layout_.bv, hd});
  std::vector<double> dfeat(d3, 0.0);
  simd::gemv_t(ConstMatrixView(P + layout_.v, hd, d3), dm, dfeat);
  const std::span<const double> dc(dfeat.data(), d2);
  std::vector<double> ds(dfeat.begin() + static_cast<std::ptrdiff_t>(d2), dfeat.end());

  // Attention pooling.
  std::vector<double> dr(nd * d2, 0.0);
  std::vector<double> dalpha(nd, 0.0);
  double weighted = 0.0;
  for (std::size_t j = 0; j < nd; ++j) {
    simd::axpy(k.alpha[j], dc, {dr.data() + j * d2, d2});
    dalpha[j] = simd::dot(dc, {k.r.data() + j * d2, d2});
    weighted += k.alpha[j] * dalpha[j];
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(d2));
  std::vector<double> dq(d2, 0.0);
  for (std::size_t j = 0; j < nd; ++j) {
    const double de = k.alpha[j] * (dalpha[j] - weighted) * scale;
    simd::axpy(de, {k.r.data() + j * d2, d2}, dq);
    simd::axpy(de, k.q, {dr.data() + j * d2, d2});
  }
  std::vector<double> dh(n * d, 0.0);
  if (nd > 0) {
    simd::ger(1.0, dq, {k.h.data(), d}, MatrixView{G + layout_.wq, d2, d});
    simd::axpy(1.0, dq, {G + layout_.bq, d2});
    simd::gemv_t(ConstMatrixView(P + layout_.wq, d2, d), dq, {dh.data(), d});
  }

  // Evidence head.
  if (!dz.empty()) {
    const std::span<const double> w_ev(P + layout_.w_ev, d2);
    for (std::size_t j = 0; j < nd; ++j) {
      simd::axpy(dz[j], {k.r.data() + j * d2, d2}, {G + layout_.w_ev, d2});
      G[layout_.b_ev] += dz[j];
      simd::axpy(dz[j], w_ev, {dr.data() + j * d2, d2});
    }
  }

  // r_j = [h ; h * s]
  std::vector<double> tmp(d, 0.0);
  for (std::size_t j = 0; j < nd; ++j) {
    const std::size_t i = in.doc_span.begin + j;
    const double* drj = dr.data() + j * d2;
    std::span<double> dhi(dh.data() + i * d, d);
    simd::axpy(1.0, {drj, d}, dhi);
    simd::hadamard({drj + d, d}, k.s, tmp);
    simd::axpy(1.0, tmp, dhi);
    simd::hadamard({drj + d, d}, {k.h.data() + i * d, d}, tmp);
    simd::axpy(1.0, tmp, ds);
  }
  if (!in.claim_span.empty()) {
    const double inv = 1.0 / static_cast<double>(in.claim_span.size());
    for (std::size_t i = in.claim_span.begin; i < in.claim_span.end; ++i) {
      simd::axpy(inv, ds, {dh.data() + i * d, d});
    }
  }

  // Convolution + embeddings.
  for (std::size_t i = 0; i < n * d; ++i) dh[i] *= 1.0 - k.h[i] * k.h[i];
  std::vector<double> dx(n * d, 0.0);
  const ConstMatrixView w0(P + layout_.w0, d, d), wl(P + layout_.wl, d, d),
      wr(P + layout_.wr, d, d);
  for (std::size_t i = 0; i < n; ++i) {
    const std::span<const double> da(dh.data() + i * d, d);
    simd::ger(1.0, da, {k.x.data() + i * d, d}, MatrixView{G + layout_.w0, d, d});
    simd::gemv_t(w0, da, {dx.data() + i * d, d});
    simd::axpy(1.0, da, {G + layout_.bh, d});
    if (i > 0) {
      simd::ger(1.0, da, {k.x.data() + (i - 1) * d, d}, MatrixView{G + layout_.wl, d, d});
      simd::gemv_t(wl, da, {dx.data() + (i - 1) * d, d});
    }
    if (i + 1 < n) {
      simd::ger(1.0, da, {k.x.data() + (i + 1) * d, d}, MatrixView{G + layout_.wr, d, d});
      simd::gemv_t(wr, da, {dx.data() + (i + 1) * d, d});
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    const std::span<const double> dxi(dx.data() + i * d, d);
    simd::axpy(1.0, dxi, {G + layout_.embed + static_cast<std::size_t>(in.ids[i]) * d, d});
    simd::axpy(1.0, dxi,
               {G + layout_.segment + static_cast<std::size_t>(in.segments[i]) * d, d});
  }
  return loss;
}

void Encoder::grow_vocabulary(std::size_t count, std::mt19937_64& rng) {
  if (count == 0) return;
  EncoderShape grown = layout_.shape;
  grown.vocab += count;
  const ParamLayout next(grown);
  std::vector<double> params(next.total, 0.0);
  const std::size_t old_embed = layout_.shape.vocab * layout_.shape.dim;
  std::copy_n(params_.begin(), old_embed, params.begin());
  fill_normal(std::span<double>(params).subspan(old_embed, count * grown.dim), 0.3, rng);
  std::copy(params_.begin() + static_cast<std::ptrdiff_t>(old_embed), params_.end(),
            params.begin() + static_cast<std::ptrdiff_t>(next.segment));
  layout_ = next;
  params_ = std::move(params);
}

}  // namespace evicheck::model
