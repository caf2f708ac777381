#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sarcam/bundle.hpp"
#include "sarcam/grid.hpp"

namespace sarcam {

enum class CamMethod { MsCam, GradCam, GradCamPP, LayerCam, SelfMatchingCam };
enum class ChannelStrategy { GradCamGap, GradCamPP, Uniform };

/// ReLU of the gradients, one G x G weight grid per channel.
using ElementWeights = Stack;
/// One scalar importance per channel.
using ChannelWeights = std::vector<float>;

/// Extension point for channel importances that are not derived from the
/// stored gradients alone (e.g. score-based weights computed elsewhere).
using ChannelWeightFn = std::function<ChannelWeights(const FeatureStack&, const GradientStack&)>;

struct CamConfig {
  CamMethod method = CamMethod::MsCam;
  /// Matching resolution M; nullopt selects auto_intermediate_side().
  std::optional<int> intermediate_side;
  /// nullopt selects GradCamGap. Only the matching methods (MS-CAM and
  /// Self-Matching CAM) consult it.
  std::optional<ChannelStrategy> channel_strategy;
  /// Restricts every method to the listed channels, in the listed order.
  std::optional<std::vector<int>> channel_subset;
  /// Overrides channel_strategy for the matching methods when set.
  ChannelWeightFn custom_channel_weights;
};

std::string_view to_string(CamMethod method);
std::string_view to_string(ChannelStrategy strategy);
/// Accepts the CLI spellings: ms-cam, grad-cam, grad-cam-pp, layer-cam,
/// self-matching-cam. Throws InvalidArgument otherwise.
CamMethod parse_method(std::string_view name);
/// Accepts gradcam, gradcampp, uniform.
ChannelStrategy parse_channel_strategy(std::string_view name);

ElementWeights element_weights(const GradientStack& grads);

/// Hadamard product of each feature map with its element weights.
FeatureStack apply_element_weights(const FeatureStack& features, const ElementWeights& weights);

/// Global average pool of each gradient map.
ChannelWeights channel_weights_gradcam(const GradientStack& grads);

/// Grad-CAM++ closed form built from powers of the first-order gradient:
///   alpha_ij = g_ij^2 / (2 g_ij^2 + sum_ab(A_ab) * g_ij^3),  w = sum_ij alpha_ij * relu(g_ij)
/// alpha is 0 wherever the denominator magnitude is below 1e-8.
ChannelWeights channel_weights_gradcampp(const FeatureStack& features, const GradientStack& grads);

ChannelWeights channel_weights_uniform(int channels);

/// clamp(round(sqrt(G * N)), G, N).
int auto_intermediate_side(int grid_side, int image_side);

/// Returns the configured M, or the automatic choice. Throws
/// BadIntermediateSize when an explicit M lies outside [G, N].
int resolve_intermediate_side(const std::optional<int>& requested, int grid_side, int image_side);

/// Resamples the image and every weighted feature map to M x M, normalizes
/// each independently and multiplies each map by the image.
Stack self_match(const ImageGrid& image, const FeatureStack& weighted, int intermediate_side);

/// self_match with the image already resampled to M and normalized.
Stack match_prepared_image(const ImageGrid& image_m, const FeatureStack& weighted);

/// Upsamples every matched map to N, weights, sums, applies ReLU and
/// normalizes. The channel sum order depends only on channel content, so
/// permuting channels leaves the result bit-identical.
SaliencyMap fuse(const Stack& matched, const ChannelWeights& weights, int image_side);

/// sum_k w_k * planes_k with the same content-ordered reduction as fuse().
Grid weighted_channel_sum(const Stack& planes, const ChannelWeights& weights);

SaliencyMap compute_cam(const FeatureBundle& bundle, const CamConfig& config);

/// The M actually used by compute_cam for this bundle and config; for the
/// non-matching methods this is the grid side G.
int effective_intermediate_side(const FeatureBundle& bundle, const CamConfig& config);

}  // namespace sarcam
