#pragma once

#include <optional>
#include <utility>

#include "sdacd/core.hpp"
#include "sdacd/nn/net.hpp"

namespace sdacd::ia {

enum class GeneratorRole { kToPre, kToPost };
enum class DiscriminatorRole { kPre, kPost };
enum class GanSide { kGenerator, kDiscriminator };
enum class GanForm { kVanilla, kLeastSquares };

// Residual encoder-decoder translator. The trunk predicts a residual that is
// added to the input and clamped, so output dimensions equal input dimensions
// and values stay inside [-1, 1].
class Generator {
 public:
  Generator(GeneratorRole role, int width, int res_blocks);

  GeneratorRole role() const { return role_; }
  int downsampling_factor() const { return 4; }

  // identity_bias shrinks the trunk's final conv so a fresh generator is the
  // identity map.
  void init(nn::Rng& rng, bool identity_bias);

  nn::Tensor forward(const nn::Tensor& x, nn::Tape& tape) const;
  nn::Tensor backward(const nn::Tensor& gy, nn::Tape& tape, bool train);
  void collect(nn::ParamGroup& group) { group.absorb(trunk_); }

 private:
  GeneratorRole role_;
  nn::Net trunk_;
  nn::HardTanh clamp_;
  size_t final_conv_index_;
};

// Fully convolutional patch critic emitting a raw score map (no final
// activation; the loss decides how scores are read).
class PatchDiscriminator {
 public:
  PatchDiscriminator(DiscriminatorRole role, int width);

  DiscriminatorRole role() const { return role_; }
  void init(nn::Rng& rng) { net_.init(rng); }

  nn::Tensor forward(const nn::Tensor& x, nn::Tape& tape) const;
  nn::Tensor backward(const nn::Tensor& gy, nn::Tape& tape, bool train) { return net_.backward(gy, tape, train); }
  void collect(nn::ParamGroup& group) { group.absorb(net_); }

 private:
  DiscriminatorRole role_;
  nn::Net net_;
};

// Style transfer of one image; checks range and downsampling divisibility.
Image translate(const Generator& gen, const Image& img);

// Adversarial objective over a patch score map. For VANILLA the score map is
// read through a sigmoid and the standard log losses apply (negated so both
// sides minimize); for LEAST_SQUARES the raw scores are regressed to 1 (real)
// and 0 (fake). The generator side only involves the fake image.
double ia_adversarial_loss(const PatchDiscriminator& d, const Image& real, const Image& fake,
                           GanSide side, GanForm form);

// Loss value plus gradient w.r.t. the score map, for driving backward passes.
struct ScoreLoss {
  double value = 0.0;
  nn::Tensor grad;
};
ScoreLoss gan_loss_real(const nn::Tensor& scores, GanForm form);  // score should say "real"
ScoreLoss gan_loss_fake(const nn::Tensor& scores, GanForm form);  // score should say "fake"

// Cached first-hop translations and cycle reconstructions for one sample,
// produced once per training step after the generator updates.
struct TranslationCache {
  std::optional<Image> fake_pre;   // I_post->pre
  std::optional<Image> fake_post;  // I_pre->post
  std::optional<Image> rec_pre;    // I_pre->post->pre
  std::optional<Image> rec_post;   // I_post->pre->post
};

// Mean absolute reconstruction error of both cycle directions (each term
// averaged per pixel per channel).
double cycle_loss(const Generator& g_pre, const Generator& g_post, const Image& i_pre,
                  const Image& i_post);
double cycle_loss_value(const Image& rec_pre, const Image& i_pre, const Image& rec_post,
                        const Image& i_post);

// Sum of the four discriminator-side directional terms: forward adversarial
// losses on the first-hop translations plus reverse terms on the cycle
// reconstructions. Requires all four cached images.
double full_ia_adversarial_loss(const Generator& g_pre, const Generator& g_post,
                                const PatchDiscriminator& d_pre, const PatchDiscriminator& d_post,
                                const Image& i_pre, const Image& i_post,
                                const TranslationCache& cache, GanForm form);

// The three same-domain pairs: ORIGINAL bit-exact copies, PRE via g_pre on
// I_post, POST via g_post on I_pre. `tags` restricts to a subset for
// ablations.
PairSet build_pair_set(const BiTemporalSample& sample, const Generator& g_pre,
                       const Generator& g_post,
                       const std::vector<DomainTag>& tags = {DomainTag::kOriginal,
                                                             DomainTag::kPreDomain,
                                                             DomainTag::kPostDomain});

}  // namespace sdacd::ia
