#include "sarcam/cam.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sarcam/error.hpp"
#include "sarcam/grid_ops.hpp"

namespace sarcam {
namespace {

constexpr double kGradCamPPDenominatorGuard = 1e-8;

void require_same_shape(const Stack& a, const Stack& b, const char* what) {
  if (!a.same_shape(b)) {
    throw Error(ErrorKind::ShapeMismatch, std::string(what) + ": " + a.shape_string() + " vs " + b.shape_string());
  }
}

// Channel visiting order used by every cross-channel reduction: ascending
// weight, then lexicographic plane content. Channels that compare equal are
// identical terms, so the sum is invariant to any permutation of the input.
std::vector<int> canonical_order(const Stack& planes, const ChannelWeights& weights) {
  std::vector<int> order(static_cast<std::size_t>(planes.channels()));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (weights[a] != weights[b]) return weights[a] < weights[b];
    auto pa = planes.channel(a);
    auto pb = planes.channel(b);
    return std::lexicographical_compare(pa.begin(), pa.end(), pb.begin(), pb.end());
  });
  return order;
}

void check_weights(const Stack& planes, const ChannelWeights& weights) {
  if (weights.size() != static_cast<std::size_t>(planes.channels())) {
    throw Error(ErrorKind::ShapeMismatch, "channel weights length " + std::to_string(weights.size()) +
                                              " vs " + std::to_string(planes.channels()) + " channels");
  }
}

Stack select_channels(const Stack& stack, const std::vector<int>& subset) {
  Stack out(static_cast<int>(subset.size()), stack.side());
  for (std::size_t i = 0; i < subset.size(); ++i) {
    auto src = stack.channel(subset[i]);
    std::copy(src.begin(), src.end(), out.channel(static_cast<int>(i)).begin());
  }
  return out;
}

void check_subset(const std::vector<int>& subset, int channels) {
  if (subset.empty()) throw Error(ErrorKind::InvalidArgument, "channel_subset is empty");
  std::vector<bool> seen(static_cast<std::size_t>(channels), false);
  for (int k : subset) {
    if (k < 0 || k >= channels) {
      throw Error(ErrorKind::InvalidArgument,
                  "channel_subset index " + std::to_string(k) + " outside [0, " + std::to_string(channels) + ")");
    }
    if (seen[static_cast<std::size_t>(k)]) {
      throw Error(ErrorKind::InvalidArgument, "channel_subset repeats index " + std::to_string(k));
    }
    seen[static_cast<std::size_t>(k)] = true;
  }
}

ChannelWeights strategy_weights(const CamConfig& config, const FeatureStack& features, const GradientStack& grads) {
  if (config.custom_channel_weights) {
    ChannelWeights w = config.custom_channel_weights(features, grads);
    check_weights(features, w);
    for (float v : w) {
      if (!std::isfinite(v)) throw Error(ErrorKind::NonFiniteValue, "custom channel weights contain a non-finite value");
    }
    return w;
  }
  switch (config.channel_strategy.value_or(ChannelStrategy::GradCamGap)) {
    case ChannelStrategy::GradCamGap: return channel_weights_gradcam(grads);
    case ChannelStrategy::GradCamPP: return channel_weights_gradcampp(features, grads);
    case ChannelStrategy::Uniform: return channel_weights_uniform(features.channels());
  }
  return channel_weights_gradcam(grads);
}

// s(ReLU(sum_k w_k A^k)) at G, then upsampled to N.
SaliencyMap pooled_cam(const FeatureStack& features, const ChannelWeights& weights, int image_side) {
  const Grid map = normalize_minmax(relu_grid(weighted_channel_sum(features, weights)));
  return resize_bilinear(map, image_side);
}

SaliencyMap layer_cam(const FeatureStack& features, const GradientStack& grads, int image_side) {
  const Stack terms = apply_element_weights(features, element_weights(grads));
  const Grid summed = relu_grid(weighted_channel_sum(terms, channel_weights_uniform(terms.channels())));
  return normalize_minmax(resize_bilinear(summed, image_side));
}

}  // namespace

std::string_view to_string(CamMethod method) {
  switch (method) {
    case CamMethod::MsCam: return "ms-cam";
    case CamMethod::GradCam: return "grad-cam";
    case CamMethod::GradCamPP: return "grad-cam-pp";
    case CamMethod::LayerCam: return "layer-cam";
    case CamMethod::SelfMatchingCam: return "self-matching-cam";
  }
  return "unknown";
}

std::string_view to_string(ChannelStrategy strategy) {
  switch (strategy) {
    case ChannelStrategy::GradCamGap: return "gradcam";
    case ChannelStrategy::GradCamPP: return "gradcampp";
    case ChannelStrategy::Uniform: return "uniform";
  }
  return "unknown";
}

CamMethod parse_method(std::string_view name) {
  for (auto m : {CamMethod::MsCam, CamMethod::GradCam, CamMethod::GradCamPP, CamMethod::LayerCam,
                 CamMethod::SelfMatchingCam}) {
    if (name == to_string(m)) return m;
  }
  throw Error(ErrorKind::InvalidArgument, "unknown method '" + std::string(name) + "'");
}

ChannelStrategy parse_channel_strategy(std::string_view name) {
  for (auto s : {ChannelStrategy::GradCamGap, ChannelStrategy::GradCamPP, ChannelStrategy::Uniform}) {
    if (name == to_string(s)) return s;
  }
  throw Error(ErrorKind::InvalidArgument, "unknown channel strategy '" + std::string(name) + "'");
}

ElementWeights element_weights(const GradientStack& grads) {
  ElementWeights out(grads.channels(), grads.side());
  auto src = grads.values();
  auto dst = out.values();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[i] > 0.0f ? src[i] : 0.0f;
  return out;
}

FeatureStack apply_element_weights(const FeatureStack& features, const ElementWeights& weights) {
  require_same_shape(features, weights, "apply_element_weights");
  FeatureStack out(features.channels(), features.side());
  auto a = features.values();
  auto w = weights.values();
  auto dst = out.values();
  for (std::size_t i = 0; i < a.size(); ++i) dst[i] = w[i] * a[i];
  return out;
}

ChannelWeights channel_weights_gradcam(const GradientStack& grads) {
  ChannelWeights out(static_cast<std::size_t>(grads.channels()));
  const double area = static_cast<double>(grads.plane_size());
  for (int k = 0; k < grads.channels(); ++k) {
    double sum = 0.0;
    for (float g : grads.channel(k)) sum += g;
    out[static_cast<std::size_t>(k)] = static_cast<float>(sum / area);
  }
  return out;
}

ChannelWeights channel_weights_gradcampp(const FeatureStack& features, const GradientStack& grads) {
  require_same_shape(features, grads, "channel_weights_gradcampp");
  ChannelWeights out(static_cast<std::size_t>(grads.channels()));
  for (int k = 0; k < grads.channels(); ++k) {
    auto a = features.channel(k);
    auto g = grads.channel(k);
    double activation_sum = 0.0;
    for (float v : a) activation_sum += v;
    double weight = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double g1 = g[i];
      const double g2 = g1 * g1;
      const double denom = 2.0 * g2 + activation_sum * g2 * g1;
      const double alpha = std::abs(denom) < kGradCamPPDenominatorGuard ? 0.0 : g2 / denom;
      weight += alpha * (g1 > 0.0 ? g1 : 0.0);
    }
    out[static_cast<std::size_t>(k)] = static_cast<float>(weight);
  }
  return out;
}

ChannelWeights channel_weights_uniform(int channels) { return ChannelWeights(static_cast<std::size_t>(channels), 1.0f); }

int auto_intermediate_side(int grid_side, int image_side) {
  const auto m = static_cast<int>(std::lround(std::sqrt(static_cast<double>(grid_side) * image_side)));
  return std::clamp(m, grid_side, image_side);
}

int resolve_intermediate_side(const std::optional<int>& requested, int grid_side, int image_side) {
  if (!requested) return auto_intermediate_side(grid_side, image_side);
  if (*requested < grid_side || *requested > image_side) {
    throw Error(ErrorKind::BadIntermediateSize, "M=" + std::to_string(*requested) + " outside [G, N] = [" +
                                                    std::to_string(grid_side) + ", " + std::to_string(image_side) + "]");
  }
  return *requested;
}

Stack match_prepared_image(const ImageGrid& image_m, const FeatureStack& weighted) {
  if (!image_m.is_square() || image_m.height() < weighted.side()) {
    throw Error(ErrorKind::ShapeMismatch, "matching image " + image_m.shape_string() + " vs grid side " +
                                              std::to_string(weighted.side()));
  }
  const int m = image_m.height();
  Stack out(weighted.channels(), m);
  for (int k = 0; k < weighted.channels(); ++k) {
    const Grid feature_m = normalize_minmax(resize_bilinear(weighted.channel_grid(k), m));
    out.set_channel(k, hadamard(image_m, feature_m));
  }
  return out;
}

Stack self_match(const ImageGrid& image, const FeatureStack& weighted, int intermediate_side) {
  if (!image.is_square()) throw Error(ErrorKind::ShapeMismatch, "image must be square, got " + image.shape_string());
  resolve_intermediate_side(intermediate_side, weighted.side(), image.height());
  const Grid image_m = normalize_minmax(resize_bilinear(image, intermediate_side));
  return match_prepared_image(image_m, weighted);
}

Grid weighted_channel_sum(const Stack& planes, const ChannelWeights& weights) {
  check_weights(planes, weights);
  std::vector<double> acc(planes.plane_size(), 0.0);
  for (int k : canonical_order(planes, weights)) {
    const double w = weights[static_cast<std::size_t>(k)];
    auto plane = planes.channel(k);
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += w * plane[i];
  }
  Grid out = Grid::square(planes.side());
  for (std::size_t i = 0; i < acc.size(); ++i) out[i] = static_cast<float>(acc[i]);
  return out;
}

SaliencyMap fuse(const Stack& matched, const ChannelWeights& weights, int image_side) {
  check_weights(matched, weights);
  if (image_side < matched.side()) {
    throw Error(ErrorKind::ShapeMismatch, "fuse target side " + std::to_string(image_side) +
                                              " is smaller than matched side " + std::to_string(matched.side()));
  }
  const std::size_t n2 = static_cast<std::size_t>(image_side) * image_side;
  std::vector<double> acc(n2, 0.0);
  for (int k : canonical_order(matched, weights)) {
    const double w = weights[static_cast<std::size_t>(k)];
    const Grid up = resize_bilinear(matched.channel_grid(k), image_side);
    for (std::size_t i = 0; i < n2; ++i) acc[i] += w * up[i];
  }
  Grid summed = Grid::square(image_side);
  for (std::size_t i = 0; i < n2; ++i) summed[i] = static_cast<float>(acc[i]);
  return normalize_minmax(relu_grid(summed));
}

int effective_intermediate_side(const FeatureBundle& bundle, const CamConfig& config) {
  switch (config.method) {
    case CamMethod::MsCam:
    case CamMethod::SelfMatchingCam:
      return resolve_intermediate_side(config.intermediate_side, bundle.grid_side(), bundle.image_side());
    default:
      return bundle.grid_side();
  }
}

SaliencyMap compute_cam(const FeatureBundle& bundle, const CamConfig& config) {
  validate_bundle(bundle);
  const int n = bundle.image_side();

  FeatureStack features = bundle.features;
  GradientStack grads = bundle.grads;
  if (config.channel_subset) {
    check_subset(*config.channel_subset, bundle.channels());
    features = select_channels(features, *config.channel_subset);
    grads = select_channels(grads, *config.channel_subset);
  }

  switch (config.method) {
    case CamMethod::GradCam:
      return pooled_cam(features, channel_weights_gradcam(grads), n);
    case CamMethod::GradCamPP:
      return pooled_cam(features, channel_weights_gradcampp(features, grads), n);
    case CamMethod::LayerCam:
      return layer_cam(features, grads, n);
    case CamMethod::MsCam: {
      const int m = resolve_intermediate_side(config.intermediate_side, features.side(), n);
      const FeatureStack weighted = apply_element_weights(features, element_weights(grads));
      return fuse(self_match(bundle.image, weighted, m), strategy_weights(config, features, grads), n);
    }
    case CamMethod::SelfMatchingCam: {
      const int m = resolve_intermediate_side(config.intermediate_side, features.side(), n);
      return fuse(self_match(bundle.image, features, m), strategy_weights(config, features, grads), n);
    }
  }
  throw Error(ErrorKind::InvalidArgument, "unhandled method");
}

}  // namespace sarcam
