#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fixtures.hpp"
#include "reference.hpp"
#include "sarcam/cam.hpp"
#include "sarcam/error.hpp"
#include "sarcam/grid_ops.hpp"
#include "test_util.hpp"

using namespace sarcam;
using sarcam::testing::FixturePattern;
using sarcam::testing::make_fixture;
using sarcam::testing::SplitMix64;

namespace {

Stack random_stack(SplitMix64& rng, int k, int g, double lo, double hi) {
  Stack s(k, g);
  for (auto& v : s.values()) v = static_cast<float>(rng.uniform(lo, hi));
  return s;
}

FeatureBundle permuted(const FeatureBundle& b, const std::vector<int>& perm) {
  FeatureBundle out = b;
  for (std::size_t i = 0; i < perm.size(); ++i) {
    out.features.set_channel(static_cast<int>(i), b.features.channel_grid(perm[i]));
    out.grads.set_channel(static_cast<int>(i), b.grads.channel_grid(perm[i]));
  }
  return out;
}

const CamMethod kAllMethods[] = {CamMethod::MsCam, CamMethod::GradCam, CamMethod::GradCamPP, CamMethod::LayerCam,
                                 CamMethod::SelfMatchingCam};

}  // namespace

TEST_SUITE("element weights") {
  TEST_CASE("relu of gradients") {
    const Stack g(1, 2, {-1, 2, 3, -4});
    CHECK(element_weights(g) == Stack(1, 2, {0, 2, 3, 0}));
    CHECK(element_weights(Stack(3, 4, 0.0f)) == Stack(3, 4, 0.0f));
  }

  TEST_CASE("random stack matches a scalar max(x, 0) loop") {
    SplitMix64 rng(10);
    const Stack g = random_stack(rng, 5, 6, -1, 1);
    const Stack w = element_weights(g);
    for (int k = 0; k < 5; ++k)
      for (int r = 0; r < 6; ++r)
        for (int c = 0; c < 6; ++c) REQUIRE(w.at(k, r, c) == std::max(g.at(k, r, c), 0.0f));
  }

  TEST_CASE("hadamard weighting") {
    SplitMix64 rng(11);
    const Stack a = random_stack(rng, 3, 5, 0, 2);
    CHECK(apply_element_weights(a, Stack(3, 5, 1.0f)) == a);
    CHECK(apply_element_weights(a, Stack(3, 5, 0.0f)) == Stack(3, 5, 0.0f));
    const Stack w = random_stack(rng, 3, 5, 0, 1);
    const Stack out = apply_element_weights(a, w);
    for (int k = 0; k < 3; ++k)
      for (int r = 0; r < 5; ++r)
        for (int c = 0; c < 5; ++c) REQUIRE(out.at(k, r, c) == a.at(k, r, c) * w.at(k, r, c));
    CHECK_THROWS_AS(apply_element_weights(a, Stack(3, 4)), Error);
  }
}

TEST_SUITE("channel weights") {
  TEST_CASE("global average pooling") {
    CHECK(channel_weights_gradcam(Stack(1, 2, {1, 2, 3, 4})) == ChannelWeights{2.5f});
    CHECK(channel_weights_gradcam(Stack(2, 3, 0.0f)) == ChannelWeights{0.0f, 0.0f});
    SplitMix64 rng(12);
    const Stack g = random_stack(rng, 1, 7, -1, 1);
    double sum = 0;
    for (int r = 0; r < 7; ++r)
      for (int c = 0; c < 7; ++c) sum += g.at(0, r, c);
    CHECK(std::abs(channel_weights_gradcam(g)[0] - sum / 49.0) <= 1e-6);
  }

  TEST_CASE("grad-cam++ closed form") {
    CHECK(channel_weights_gradcampp(Stack(2, 3, 0.5f), Stack(2, 3, 0.0f)) == ChannelWeights{0.0f, 0.0f});
    // g = 1, A = 0: alpha = 1 / 2 everywhere, weight = 4 * 1/2.
    CHECK(channel_weights_gradcampp(Stack(1, 2, 0.0f), Stack(1, 2, 1.0f))[0] == doctest::Approx(2.0));

    SplitMix64 rng(13);
    FeatureBundle b;
    b.image = ImageGrid::square(4, 0.5f);
    b.features = random_stack(rng, 3, 4, 0, 1);
    b.grads = random_stack(rng, 3, 4, -1, 1);
    const auto got = channel_weights_gradcampp(b.features, b.grads);
    const auto want = reference::gradcampp_weights(b);
    for (int k = 0; k < 3; ++k) CHECK(std::abs(got[static_cast<std::size_t>(k)] - want[static_cast<std::size_t>(k)]) <= 1e-5);
  }

  TEST_CASE("grad-cam++ guard zeroes alpha on vanishing denominators") {
    // sum(A) = -2/g makes 2g^2 + sum(A) g^3 vanish exactly.
    const Stack a(1, 1, {-4.0f});
    const Stack g(1, 1, {0.5f});
    CHECK(channel_weights_gradcampp(a, g)[0] == 0.0f);
  }
}

TEST_SUITE("intermediate size") {
  TEST_CASE("auto is the rounded geometric mean clamped to [G, N]") {
    CHECK(auto_intermediate_side(8, 32) == 16);
    CHECK(auto_intermediate_side(7, 512) == 60);
    CHECK(auto_intermediate_side(16, 512) == 91);
    CHECK(auto_intermediate_side(5, 5) == 5);
  }

  TEST_CASE("explicit sizes outside [G, N] are rejected") {
    CHECK(resolve_intermediate_side(8, 8, 32) == 8);
    CHECK(resolve_intermediate_side(32, 8, 32) == 32);
    CHECK(resolve_intermediate_side(std::nullopt, 8, 32) == 16);
    for (int bad : {7, 33, 0, -1}) {
      try {
        resolve_intermediate_side(bad, 8, 32);
        FAIL("expected BadIntermediateSize");
      } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::BadIntermediateSize);
      }
    }
  }
}

TEST_SUITE("self_match") {
  TEST_CASE("zero image region annihilates every channel") {
    auto fx = make_fixture(20, 16, 4, 3, FixturePattern::Random);
    for (int r = 0; r < 16; ++r)
      for (int c = 0; c < 6; ++c) fx.bundle.image(r, c) = 0.0f;
    const Stack matched = self_match(fx.bundle.image, fx.bundle.features, 16);
    for (int k = 0; k < 3; ++k)
      for (int r = 0; r < 16; ++r)
        for (int c = 0; c < 6; ++c) REQUIRE(matched.at(k, r, c) == 0.0f);
  }

  TEST_CASE("M = G = N is a plain normalized product") {
    auto fx = make_fixture(21, 6, 6, 2, FixturePattern::Random);
    const Stack matched = self_match(fx.bundle.image, fx.bundle.features, 6);
    const Grid img = normalize_minmax(fx.bundle.image);
    for (int k = 0; k < 2; ++k) {
      CHECK(matched.channel_grid(k) == hadamard(img, normalize_minmax(fx.bundle.features.channel_grid(k))));
    }
  }

  TEST_CASE("fixture N=32, G=8, M=16 matches the reference composition") {
    const auto fx = make_fixture(22, 32, 8, 4, FixturePattern::Blob);
    const Stack weighted = apply_element_weights(fx.bundle.features, element_weights(fx.bundle.grads));
    const Stack matched = self_match(fx.bundle.image, weighted, 16);
    const auto image_m = reference::normalize(reference::resize(testing::to_plane(fx.bundle.image), 32, 16));
    for (int k = 0; k < 4; ++k) {
      const auto feat_m = reference::normalize(reference::resize(testing::to_plane(weighted.channel_grid(k)), 8, 16));
      std::vector<double> want(feat_m.size());
      for (std::size_t i = 0; i < want.size(); ++i) want[i] = image_m[i] * feat_m[i];
      CHECK(testing::max_abs_diff(matched.channel_grid(k), want) <= 1e-5);
    }
  }

  TEST_CASE("bad intermediate size") {
    const auto fx = make_fixture(23, 32, 8, 2, FixturePattern::Random);
    CHECK_THROWS_AS(self_match(fx.bundle.image, fx.bundle.features, 4), Error);
    CHECK_THROWS_AS(self_match(fx.bundle.image, fx.bundle.features, 40), Error);
  }
}

TEST_SUITE("fuse") {
  TEST_CASE("all-zero channel weights give the zero map") {
    SplitMix64 rng(30);
    const Stack matched = random_stack(rng, 4, 8, 0, 1);
    const Grid out = fuse(matched, ChannelWeights(4, 0.0f), 16);
    CHECK(out == Grid::square(16, 0.0f));
  }

  TEST_CASE("single channel at M = N is s(relu(x))") {
    SplitMix64 rng(31);
    const Stack matched = random_stack(rng, 1, 9, -1, 1);
    CHECK(fuse(matched, {1.0f}, 9) == normalize_minmax(relu_grid(matched.channel_grid(0))));
  }

  TEST_CASE("random stack matches the reference fusion") {
    SplitMix64 rng(32);
    const Stack matched = random_stack(rng, 5, 12, 0, 1);
    ChannelWeights w;
    for (int k = 0; k < 5; ++k) w.push_back(static_cast<float>(rng.uniform(-0.5, 1)));
    std::vector<double> acc(40 * 40, 0.0);
    for (int k = 0; k < 5; ++k) {
      const auto up = reference::resize(testing::to_plane(matched.channel_grid(k)), 12, 40);
      for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += w[static_cast<std::size_t>(k)] * up[i];
    }
    CHECK(testing::max_abs_diff(fuse(matched, w, 40), reference::normalize(reference::relu(acc))) <= 1e-5);
  }

  TEST_CASE("shape errors") {
    const Stack matched(2, 8);
    CHECK_THROWS_AS(fuse(matched, {1.0f}, 8), Error);
    CHECK_THROWS_AS(fuse(matched, {1.0f, 1.0f}, 4), Error);
  }
}

TEST_SUITE("compute_cam") {
  TEST_CASE("MS-CAM matches the scalar reference on random bundles") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto fx = make_fixture(seed, 32, 8, 8, FixturePattern::Random);
      CamConfig cfg;
      if (seed % 2) cfg.intermediate_side = 8 + static_cast<int>(seed % 25);
      const int m = resolve_intermediate_side(cfg.intermediate_side, 8, 32);
      CAPTURE(seed);
      REQUIRE(testing::max_abs_diff(compute_cam(fx.bundle, cfg), reference::ms_cam(fx.bundle, m)) <= 1e-5);
    }
  }

  TEST_CASE("MS-CAM with grad-cam++ and uniform channel strategies") {
    const auto fx = make_fixture(40, 32, 8, 6, FixturePattern::Random);
    CamConfig cfg;
    cfg.channel_strategy = ChannelStrategy::GradCamPP;
    CHECK(testing::max_abs_diff(compute_cam(fx.bundle, cfg), reference::ms_cam(fx.bundle, 16, reference::Weights::GradCamPP)) <= 1e-5);
    cfg.channel_strategy = ChannelStrategy::Uniform;
    CHECK(testing::max_abs_diff(compute_cam(fx.bundle, cfg), reference::ms_cam(fx.bundle, 16, reference::Weights::Uniform)) <= 1e-5);
  }

  TEST_CASE("baselines match their references") {
    const auto fx = make_fixture(41, 32, 8, 6, FixturePattern::Random);
    CamConfig cfg;
    cfg.method = CamMethod::GradCam;
    CHECK(testing::max_abs_diff(compute_cam(fx.bundle, cfg), reference::grad_cam(fx.bundle)) <= 1e-6);
    cfg.method = CamMethod::LayerCam;
    CHECK(testing::max_abs_diff(compute_cam(fx.bundle, cfg), reference::layer_cam(fx.bundle)) <= 1e-6);
  }

  TEST_CASE("positive gradient scaling leaves the map unchanged") {
    const auto fx = make_fixture(42, 32, 8, 4, FixturePattern::Blob);
    FeatureBundle scaled = fx.bundle;
    for (auto& v : scaled.grads.values()) v *= 3.7f;
    for (CamMethod m : {CamMethod::MsCam, CamMethod::GradCam, CamMethod::LayerCam}) {
      CamConfig cfg;
      cfg.method = m;
      CAPTURE(to_string(m));
      CHECK(testing::max_abs_diff(compute_cam(fx.bundle, cfg), compute_cam(scaled, cfg)) <= 1e-6);
    }
  }

  TEST_CASE("white-box MS-CAM reduces to Grad-CAM") {
    // Feature channels already span exactly [0, 1], so the per-channel
    // normalization inside matching is the identity.
    auto fx = make_fixture(43, 8, 8, 5, FixturePattern::Random);
    for (int k = 0; k < 5; ++k) fx.bundle.features.set_channel(k, normalize_minmax(fx.bundle.features.channel_grid(k)));
    const Stack weighted = apply_element_weights(fx.bundle.features, Stack(5, 8, 1.0f));
    const Stack matched = match_prepared_image(Grid::square(8, 1.0f), weighted);
    const Grid ms = fuse(matched, channel_weights_gradcam(fx.bundle.grads), 8);
    CamConfig cfg;
    cfg.method = CamMethod::GradCam;
    CHECK(testing::max_abs_diff(ms, compute_cam(fx.bundle, cfg)) <= 1e-6);
  }

  TEST_CASE("channel permutation leaves every method bit-identical") {
    const auto fx = make_fixture(44, 24, 6, 7, FixturePattern::Random);
    std::vector<int> perm(7);
    std::iota(perm.begin(), perm.end(), 0);
    std::reverse(perm.begin(), perm.end());
    std::swap(perm[1], perm[4]);
    const FeatureBundle p = permuted(fx.bundle, perm);
    for (CamMethod m : kAllMethods) {
      CamConfig cfg;
      cfg.method = m;
      CAPTURE(to_string(m));
      CHECK(compute_cam(fx.bundle, cfg) == compute_cam(p, cfg));
    }
  }

  TEST_CASE("zero gradients give the zero map for every method") {
    const auto fx = make_fixture(45, 32, 8, 4, FixturePattern::ZeroGrads);
    for (CamMethod m : kAllMethods) {
      CamConfig cfg;
      cfg.method = m;
      CAPTURE(to_string(m));
      CHECK(compute_cam(fx.bundle, cfg) == Grid::square(32, 0.0f));
    }
  }

  TEST_CASE("range, shape and determinism for every method") {
    const auto fx = make_fixture(46, 20, 5, 3, FixturePattern::Random);
    for (CamMethod m : kAllMethods) {
      CamConfig cfg;
      cfg.method = m;
      const Grid a = compute_cam(fx.bundle, cfg);
      CHECK(a.height() == 20);
      CHECK(a.width() == 20);
      for (float v : a.values()) REQUIRE((std::isfinite(v) && v >= 0.0f && v <= 1.0f));
      CHECK(a == compute_cam(fx.bundle, cfg));
    }
  }

  TEST_CASE("zero image region stays zero at M = N") {
    auto fx = make_fixture(47, 16, 4, 4, FixturePattern::Random);
    for (int r = 4; r < 10; ++r)
      for (int c = 2; c < 12; ++c) fx.bundle.image(r, c) = 0.0f;
    CamConfig cfg;
    cfg.intermediate_side = 16;
    const Grid map = compute_cam(fx.bundle, cfg);
    for (int r = 4; r < 10; ++r)
      for (int c = 2; c < 12; ++c) REQUIRE(map(r, c) == 0.0f);
  }

  TEST_CASE("channel subset restricts the inputs") {
    const auto fx = make_fixture(48, 16, 4, 5, FixturePattern::Random);
    CamConfig cfg;
    cfg.method = CamMethod::SelfMatchingCam;
    cfg.channel_subset = std::vector<int>{3, 1};

    FeatureBundle manual = fx.bundle;
    manual.features = Stack(2, 4);
    manual.grads = Stack(2, 4);
    manual.features.set_channel(0, fx.bundle.features.channel_grid(3));
    manual.features.set_channel(1, fx.bundle.features.channel_grid(1));
    manual.grads.set_channel(0, fx.bundle.grads.channel_grid(3));
    manual.grads.set_channel(1, fx.bundle.grads.channel_grid(1));
    CamConfig plain;
    plain.method = CamMethod::SelfMatchingCam;
    CHECK(compute_cam(fx.bundle, cfg) == compute_cam(manual, plain));

    cfg.channel_subset = std::vector<int>{5};
    CHECK_THROWS_AS(compute_cam(fx.bundle, cfg), Error);
    cfg.channel_subset = std::vector<int>{1, 1};
    CHECK_THROWS_AS(compute_cam(fx.bundle, cfg), Error);
  }

  TEST_CASE("self-matching CAM skips element weights") {
    const auto fx = make_fixture(49, 32, 8, 4, FixturePattern::Random);
    CamConfig cfg;
    cfg.method = CamMethod::SelfMatchingCam;
    cfg.intermediate_side = 16;
    const Grid want = fuse(self_match(fx.bundle.image, fx.bundle.features, 16), channel_weights_gradcam(fx.bundle.grads), 32);
    CHECK(compute_cam(fx.bundle, cfg) == want);
  }

  TEST_CASE("custom channel weights plug into the matching methods") {
    const auto fx = make_fixture(50, 32, 8, 4, FixturePattern::Random);
    CamConfig cfg;
    cfg.custom_channel_weights = [](const FeatureStack& f, const GradientStack&) {
      return channel_weights_uniform(f.channels());
    };
    CamConfig uniform;
    uniform.channel_strategy = ChannelStrategy::Uniform;
    CHECK(compute_cam(fx.bundle, cfg) == compute_cam(fx.bundle, uniform));

    cfg.custom_channel_weights = [](const FeatureStack&, const GradientStack&) { return ChannelWeights{1.0f}; };
    CHECK_THROWS_AS(compute_cam(fx.bundle, cfg), Error);
  }

  TEST_CASE("method and strategy names") {
    for (CamMethod m : kAllMethods) CHECK(parse_method(to_string(m)) == m);
    CHECK(parse_channel_strategy("gradcampp") == ChannelStrategy::GradCamPP);
    CHECK_THROWS_AS(parse_method("bogus"), Error);
    CHECK_THROWS_AS(parse_channel_strategy("score"), Error);
  }
}
