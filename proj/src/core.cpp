#include "sdacd/core.hpp"

#include <cmath>

namespace sdacd {

ChangeMask binarize(const ChangeProbMap& prob, double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0))
    throw ConfigError("binarize: threshold must lie in (0,1), got " + std::to_string(threshold));
  ChangeMask out(prob.height, prob.width);
  for (size_t i = 0; i < prob.values.size(); ++i) out.values[i] = prob.values[i] >= threshold ? 1 : 0;
  return out;
}

Image normalize_image(const Image& raw) {
  if (raw.range != RangeTag::kRaw0To255) throw IngestionError("normalize_image: expected raw_0_255 input");
  for (float v : raw.values.v)
    if (!(v >= 0.0f && v <= 255.0f))
      throw IngestionError("normalize_image: value outside [0,255]: " + std::to_string(v));
  Image out(raw.channels(), raw.height(), raw.width(), RangeTag::kSignedUnit);
  for (size_t i = 0; i < raw.values.size(); ++i) out.values.v[i] = raw.values.v[i] / 127.5f - 1.0f;
  return out;
}

Image denormalize_image(const Image& img) {
  if (img.range != RangeTag::kSignedUnit) throw IngestionError("denormalize_image: expected signed_unit input");
  Image out(img.channels(), img.height(), img.width(), RangeTag::kRaw0To255);
  for (size_t i = 0; i < img.values.size(); ++i) out.values.v[i] = (img.values.v[i] + 1.0f) * 127.5f;
  return out;
}

void validate_image(const Image& img) {
  if (img.channels() <= 0 || img.height() <= 0 || img.width() <= 0)
    throw ShapeError("image: non-positive dimensions");
  float lo = 0.0f, hi = 255.0f;
  switch (img.range) {
    case RangeTag::kRaw0To255: lo = 0.0f; hi = 255.0f; break;
    case RangeTag::kUnit: lo = 0.0f; hi = 1.0f; break;
    case RangeTag::kSignedUnit: lo = -1.0f; hi = 1.0f; break;
  }
  for (float v : img.values.v) {
    if (!std::isfinite(v) || v < lo || v > hi)
      throw NumericError("image: value " + std::to_string(v) + " outside declared range");
  }
}

}  // namespace sdacd
