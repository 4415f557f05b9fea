#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sdacd/nn/tensor.hpp"

namespace sdacd {

// Error taxonomy: configuration problems, shape/precondition violations,
// ingestion failures, numerical blowups, pipeline-order misuse.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ShapeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IngestionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct PipelineError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class RangeTag { kRaw0To255, kUnit, kSignedUnit };

// H x W x C raster carried as a CHW float tensor plus its declared range.
struct Image {
  nn::Tensor values;  // (channels, height, width)
  RangeTag range = RangeTag::kSignedUnit;

  Image() = default;
  Image(int channels, int height, int width, RangeTag tag)
      : values(channels, height, width), range(tag) {}

  int height() const { return values.h; }
  int width() const { return values.w; }
  int channels() const { return values.c; }

  bool operator==(const Image& o) const { return range == o.range && values.c == o.values.c && values.h == o.values.h && values.w == o.values.w && values.v == o.values.v; }
};

enum class DomainTag { kOriginal = 0, kPreDomain = 1, kPostDomain = 2 };

inline const char* to_string(DomainTag t) {
  switch (t) {
    case DomainTag::kOriginal: return "original";
    case DomainTag::kPreDomain: return "pre";
    case DomainTag::kPostDomain: return "post";
  }
  return "?";
}

struct ChangeMask {
  int height = 0, width = 0;
  std::vector<uint8_t> values;  // each 0 or 1

  ChangeMask() = default;
  ChangeMask(int h, int w) : height(h), width(w), values(static_cast<size_t>(h) * w, 0) {}

  uint8_t& at(int y, int x) { return values[static_cast<size_t>(y) * width + x]; }
  uint8_t at(int y, int x) const { return values[static_cast<size_t>(y) * width + x]; }
  size_t size() const { return values.size(); }
  bool operator==(const ChangeMask& o) const { return height == o.height && width == o.width && values == o.values; }
};

struct ChangeProbMap {
  int height = 0, width = 0;
  std::vector<double> values;  // each in [0, 1]

  ChangeProbMap() = default;
  ChangeProbMap(int h, int w) : height(h), width(w), values(static_cast<size_t>(h) * w, 0.0) {}

  double& at(int y, int x) { return values[static_cast<size_t>(y) * width + x]; }
  double at(int y, int x) const { return values[static_cast<size_t>(y) * width + x]; }
  size_t size() const { return values.size(); }
};

struct BiTemporalSample {
  Image pre, post;
  ChangeMask gt;
  std::string id;
};

// The three same-domain bi-temporal pairs consumed by feature adaptation.
// ORIGINAL always carries bit-exact copies of the input images.
struct PairSet {
  std::map<DomainTag, std::pair<Image, Image>> pairs;
  ChangeMask gt;
};

ChangeMask binarize(const ChangeProbMap& prob, double threshold);
Image normalize_image(const Image& raw);
Image denormalize_image(const Image& img);
void validate_image(const Image& img);

}  // namespace sdacd
