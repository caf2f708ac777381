#include "sarcam/localizer.hpp"

#include <algorithm>
#include <numeric>

#include "sarcam/error.hpp"

namespace sarcam {
namespace {

void check_fraction(double fraction) {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw Error(ErrorKind::BadFraction, "threshold fraction " + std::to_string(fraction) + " outside (0, 1]");
  }
}

// Union-find over provisional labels; the root is always the smallest label.
class DisjointSet {
 public:
  int make() {
    parent_.push_back(static_cast<int>(parent_.size()));
    return parent_.back();
  }
  int find(int x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);
    parent_[b] = a;
  }

 private:
  std::vector<int> parent_;
};

}  // namespace

std::size_t BinaryMask::count() const {
  return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), std::uint8_t{1}));
}

bool BinaryMask::subset_of(const BinaryMask& other) const {
  if (height != other.height || width != other.width) return false;
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] && !other.bits[i]) return false;
  }
  return true;
}

BinaryMask binarize(const Grid& map, double fraction) {
  check_fraction(fraction);
  BinaryMask mask(map.height(), map.width());
  if (map.empty()) return mask;
  const double peak = *std::max_element(map.values().begin(), map.values().end());
  if (!(peak > 0.0)) return mask;
  const double threshold = fraction * peak;
  for (std::size_t i = 0; i < map.size(); ++i) mask.bits[i] = map[i] >= threshold ? 1 : 0;
  return mask;
}

std::vector<Component> connected_components(const BinaryMask& mask) {
  const int h = mask.height;
  const int w = mask.width;
  std::vector<int> labels(mask.bits.size(), -1);
  DisjointSet sets;

  // First pass: provisional labels from the already-visited 8-neighbours
  // (W, NW, N, NE).
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const std::size_t idx = static_cast<std::size_t>(r) * w + c;
      if (!mask.bits[idx]) continue;
      int label = -1;
      const int neighbours[4][2] = {{0, -1}, {-1, -1}, {-1, 0}, {-1, 1}};
      for (const auto& d : neighbours) {
        const int rr = r + d[0];
        const int cc = c + d[1];
        if (rr < 0 || cc < 0 || cc >= w) continue;
        const int other = labels[static_cast<std::size_t>(rr) * w + cc];
        if (other < 0) continue;
        if (label < 0) {
          label = other;
        } else {
          sets.unite(label, other);
        }
      }
      labels[idx] = label < 0 ? sets.make() : label;
    }
  }

  // Second pass: resolve roots; components are numbered by first raster pixel.
  std::vector<int> root_to_component;
  std::vector<Component> components;
  for (std::size_t idx = 0; idx < labels.size(); ++idx) {
    if (labels[idx] < 0) continue;
    const int root = sets.find(labels[idx]);
    if (static_cast<std::size_t>(root) >= root_to_component.size()) root_to_component.resize(root + 1, -1);
    int& comp = root_to_component[static_cast<std::size_t>(root)];
    const int r = static_cast<int>(idx) / w;
    const int c = static_cast<int>(idx) % w;
    if (comp < 0) {
      comp = static_cast<int>(components.size());
      components.push_back(Component{{}, BBox{r, c, r, c}});
    }
    Component& target = components[static_cast<std::size_t>(comp)];
    target.pixels.push_back(static_cast<int>(idx));
    target.box.row_min = std::min(target.box.row_min, r);
    target.box.row_max = std::max(target.box.row_max, r);
    target.box.col_min = std::min(target.box.col_min, c);
    target.box.col_max = std::max(target.box.col_max, c);
  }
  return components;
}

double iou(const BBox& a, const BBox& b) {
  const long inter_h = std::min(a.row_max, b.row_max) - std::max(a.row_min, b.row_min) + 1;
  const long inter_w = std::min(a.col_max, b.col_max) - std::max(a.col_min, b.col_min) + 1;
  const long inter = inter_h > 0 && inter_w > 0 ? inter_h * inter_w : 0;
  const long uni = a.area() + b.area() - inter;
  return uni > 0 ? static_cast<double>(inter) / static_cast<double>(uni) : 0.0;
}

LocalizationReport localize(const Grid& map, double fraction, const std::optional<BBox>& ground_truth) {
  LocalizationReport report;
  report.threshold_fraction = fraction;
  report.mask = binarize(map, fraction);
  const auto components = connected_components(report.mask);
  report.component_count = static_cast<int>(components.size());

  const Component* best = nullptr;
  for (const auto& comp : components) {
    if (!best || comp.area() > best->area() ||
        (comp.area() == best->area() &&
         std::pair(comp.box.row_min, comp.box.col_min) < std::pair(best->box.row_min, best->box.col_min))) {
      best = &comp;
    }
  }
  if (best) {
    report.largest_component_area = best->area();
    report.bbox = best->box;
  }
  if (ground_truth) report.iou = report.bbox ? iou(*report.bbox, *ground_truth) : 0.0;
  return report;
}

SweepResult sweep(const Grid& map, std::span<const double> fractions, const std::optional<BBox>& ground_truth) {
  if (fractions.empty()) throw Error(ErrorKind::BadFraction, "sweep needs at least one fraction");
  for (double f : fractions) check_fraction(f);

  SweepResult result;
  result.reports.reserve(fractions.size());
  for (double f : fractions) result.reports.push_back(localize(map, f, ground_truth));

  if (ground_truth) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < result.reports.size(); ++i) {
      const double cand = *result.reports[i].iou;
      const double incumbent = *result.reports[best].iou;
      if (cand > incumbent || (cand == incumbent && fractions[i] < fractions[best])) best = i;
    }
    result.best = best;
  }
  return result;
}

}  // namespace sarcam
