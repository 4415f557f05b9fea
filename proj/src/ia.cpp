#include "sdacd/ia.hpp"

#include <cmath>

namespace sdacd::ia {

using nn::Tape;
using nn::Tensor;

Generator::Generator(GeneratorRole role, int width, int res_blocks) : role_(role) {
  const int w = width;
  trunk_.add<nn::Conv2d>(3, w, 3, 1, 1).add<nn::InstanceNorm2d>(w).add<nn::ReLU>();
  trunk_.add<nn::Conv2d>(w, 2 * w, 3, 2, 1).add<nn::InstanceNorm2d>(2 * w).add<nn::ReLU>();
  trunk_.add<nn::Conv2d>(2 * w, 4 * w, 3, 2, 1).add<nn::InstanceNorm2d>(4 * w).add<nn::ReLU>();
  for (int i = 0; i < res_blocks; ++i) trunk_.add<nn::ResBlock>(4 * w);
  trunk_.add<nn::Upsample2x>();
  trunk_.add<nn::Conv2d>(4 * w, 2 * w, 3, 1, 1).add<nn::InstanceNorm2d>(2 * w).add<nn::ReLU>();
  trunk_.add<nn::Upsample2x>();
  trunk_.add<nn::Conv2d>(2 * w, w, 3, 1, 1).add<nn::InstanceNorm2d>(w).add<nn::ReLU>();
  trunk_.add<nn::Conv2d>(w, 3, 3, 1, 1);
  final_conv_index_ = trunk_.layer_count() - 1;
}

void Generator::init(nn::Rng& rng, bool identity_bias) {
  trunk_.init(rng);
  if (identity_bias) {
    auto& final_conv = dynamic_cast<nn::Conv2d&>(trunk_.layer(final_conv_index_));
    for (auto& w : final_conv.weight().v) w = rng.normal(0.0f, 1e-3f);
    final_conv.bias().fill(0.0f);
  }
}

Tensor Generator::forward(const Tensor& x, Tape& tape) const {
  Tensor d = trunk_.forward(x, tape);
  d += x;  // global residual
  return clamp_.forward(d, tape);
}

Tensor Generator::backward(const Tensor& gy, Tape& tape, bool train) {
  Tensor gs = clamp_.backward(gy, tape, train);
  Tensor gx = trunk_.backward(gs, tape, train);
  gx += gs;
  return gx;
}

PatchDiscriminator::PatchDiscriminator(DiscriminatorRole role, int width) : role_(role) {
  const int w = width;
  net_.add<nn::Conv2d>(3, w, 3, 2, 1).add<nn::LeakyReLU>(0.2f);
  net_.add<nn::Conv2d>(w, 2 * w, 3, 2, 1).add<nn::InstanceNorm2d>(2 * w).add<nn::LeakyReLU>(0.2f);
  net_.add<nn::Conv2d>(2 * w, 1, 3, 1, 1);
}

Tensor PatchDiscriminator::forward(const Tensor& x, Tape& tape) const {
  Tensor scores = net_.forward(x, tape);
  for (float s : scores.v)
    if (!std::isfinite(s))
      throw NumericError(std::string("discriminator ") +
                         (role_ == DiscriminatorRole::kPre ? "d_pre" : "d_post") +
                         ": non-finite score");
  return scores;
}

Image translate(const Generator& gen, const Image& img) {
  if (img.range != RangeTag::kSignedUnit) throw IngestionError("translate: image not normalized");
  const int f = gen.downsampling_factor();
  if (img.height() % f != 0 || img.width() % f != 0)
    throw ShapeError("translate: dimensions " + std::to_string(img.height()) + "x" +
                     std::to_string(img.width()) + " not divisible by downsampling factor " +
                     std::to_string(f));
  Tape tape;
  Image out(img.channels(), img.height(), img.width(), RangeTag::kSignedUnit);
  out.values = gen.forward(img.values, tape);
  return out;
}

namespace {

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }
// -log(sigmoid(s)) computed stably
inline double softplus_neg(double s) { return std::log1p(std::exp(-std::abs(s))) + std::max(-s, 0.0); }
// -log(1 - sigmoid(s))
inline double softplus_pos(double s) { return std::log1p(std::exp(-std::abs(s))) + std::max(s, 0.0); }

}  // namespace

ScoreLoss gan_loss_real(const Tensor& scores, GanForm form) {
  ScoreLoss r;
  r.grad = Tensor(scores.c, scores.h, scores.w);
  const double n = static_cast<double>(scores.size());
  double acc = 0.0;
  for (size_t i = 0; i < scores.size(); ++i) {
    const double s = scores.v[i];
    if (form == GanForm::kVanilla) {
      acc += softplus_neg(s);                                      // -log D
      r.grad.v[i] = static_cast<float>((sigmoid(s) - 1.0) / n);
    } else {
      acc += (s - 1.0) * (s - 1.0);
      r.grad.v[i] = static_cast<float>(2.0 * (s - 1.0) / n);
    }
  }
  r.value = acc / n;
  return r;
}

ScoreLoss gan_loss_fake(const Tensor& scores, GanForm form) {
  ScoreLoss r;
  r.grad = Tensor(scores.c, scores.h, scores.w);
  const double n = static_cast<double>(scores.size());
  double acc = 0.0;
  for (size_t i = 0; i < scores.size(); ++i) {
    const double s = scores.v[i];
    if (form == GanForm::kVanilla) {
      acc += softplus_pos(s);                                      // -log(1 - D)
      r.grad.v[i] = static_cast<float>(sigmoid(s) / n);
    } else {
      acc += s * s;
      r.grad.v[i] = static_cast<float>(2.0 * s / n);
    }
  }
  r.value = acc / n;
  return r;
}

double ia_adversarial_loss(const PatchDiscriminator& d, const Image& real, const Image& fake,
                           GanSide side, GanForm form) {
  if (!real.values.same_shape(fake.values)) throw ShapeError("ia_adversarial_loss: real/fake shape mismatch");
  Tape tf;
  const Tensor sf = d.forward(fake.values, tf);
  if (side == GanSide::kGenerator) {
    // non-saturating generator objective: make fakes read as real
    return gan_loss_real(sf, form).value;
  }
  Tape tr;
  const Tensor sr = d.forward(real.values, tr);
  return gan_loss_real(sr, form).value + gan_loss_fake(sf, form).value;
}

double cycle_loss_value(const Image& rec_pre, const Image& i_pre, const Image& rec_post,
                        const Image& i_post) {
  if (!rec_pre.values.same_shape(i_pre.values) || !rec_post.values.same_shape(i_post.values))
    throw ShapeError("cycle_loss: reconstruction shape mismatch");
  double t1 = 0.0, t2 = 0.0;
  for (size_t i = 0; i < i_pre.values.size(); ++i)
    t1 += std::abs(static_cast<double>(rec_pre.values.v[i]) - i_pre.values.v[i]);
  for (size_t i = 0; i < i_post.values.size(); ++i)
    t2 += std::abs(static_cast<double>(rec_post.values.v[i]) - i_post.values.v[i]);
  return t1 / static_cast<double>(i_pre.values.size()) + t2 / static_cast<double>(i_post.values.size());
}

double cycle_loss(const Generator& g_pre, const Generator& g_post, const Image& i_pre,
                  const Image& i_post) {
  const Image rec_pre = translate(g_pre, translate(g_post, i_pre));
  const Image rec_post = translate(g_post, translate(g_pre, i_post));
  return cycle_loss_value(rec_pre, i_pre, rec_post, i_post);
}

double full_ia_adversarial_loss(const Generator&, const Generator&, const PatchDiscriminator& d_pre,
                                const PatchDiscriminator& d_post, const Image& i_pre,
                                const Image& i_post, const TranslationCache& cache, GanForm form) {
  if (!cache.fake_pre || !cache.fake_post || !cache.rec_pre || !cache.rec_post)
    throw PipelineError("full_ia_adversarial_loss: translation cache incomplete; run the generators first");
  double total = 0.0;
  total += ia_adversarial_loss(d_pre, i_pre, *cache.fake_pre, GanSide::kDiscriminator, form);
  total += ia_adversarial_loss(d_post, i_post, *cache.fake_post, GanSide::kDiscriminator, form);
  total += ia_adversarial_loss(d_pre, i_pre, *cache.rec_pre, GanSide::kDiscriminator, form);
  total += ia_adversarial_loss(d_post, i_post, *cache.rec_post, GanSide::kDiscriminator, form);
  return total;
}

PairSet build_pair_set(const BiTemporalSample& sample, const Generator& g_pre,
                       const Generator& g_post, const std::vector<DomainTag>& tags) {
  PairSet ps;
  ps.gt = sample.gt;
  for (DomainTag tag : tags) {
    switch (tag) {
      case DomainTag::kOriginal:
        ps.pairs[tag] = {sample.pre, sample.post};
        break;
      case DomainTag::kPreDomain:
        ps.pairs[tag] = {sample.pre, translate(g_pre, sample.post)};
        break;
      case DomainTag::kPostDomain:
        ps.pairs[tag] = {translate(g_post, sample.pre), sample.post};
        break;
    }
  }
  return ps;
}

}  // namespace sdacd::ia
