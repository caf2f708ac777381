// Python bindings for the sarcam core: bundle I/O, CAM computation,
// localization and colormaps. Arrays are float32, C order.

#include <pybind11/pybind11.h>
#include <pybind11/numpy.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "sarcam/bundle.hpp"
#include "sarcam/cam.hpp"
#include "sarcam/error.hpp"
#include "sarcam/grid_ops.hpp"
#include "sarcam/localizer.hpp"
#include "sarcam/render.hpp"

namespace py = pybind11;
using namespace sarcam;

namespace {

using FloatArray = py::array_t<float, py::array::c_style | py::array::forcecast>;

Grid to_grid(const FloatArray& a, const char* what) {
  if (a.ndim() != 2) throw Error(ErrorKind::ShapeMismatch, std::string(what) + " must be 2-D");
  const auto h = static_cast<int>(a.shape(0)), w = static_cast<int>(a.shape(1));
  return Grid(h, w, std::vector<float>(a.data(), a.data() + a.size()));
}

Stack to_stack(const FloatArray& a, const char* what) {
  if (a.ndim() != 3 || a.shape(1) != a.shape(2)) throw Error(ErrorKind::ShapeMismatch, std::string(what) + " must be (K,G,G)");
  return Stack(static_cast<int>(a.shape(0)), static_cast<int>(a.shape(1)),
               std::vector<float>(a.data(), a.data() + a.size()));
}

py::array_t<float> from_grid(const Grid& g) {
  py::array_t<float> out({g.height(), g.width()});
  std::copy(g.values().begin(), g.values().end(), out.mutable_data());
  return out;
}

py::array_t<float> from_stack(const Stack& s) {
  py::array_t<float> out({s.channels(), s.side(), s.side()});
  std::copy(s.values().begin(), s.values().end(), out.mutable_data());
  return out;
}

py::array_t<std::uint8_t> from_rgb(const RgbImage& img) {
  py::array_t<std::uint8_t> out({img.height, img.width, 3});
  std::copy(img.data.begin(), img.data.end(), out.mutable_data());
  return out;
}

std::optional<BBox> to_box(const std::optional<std::tuple<int, int, int, int>>& t) {
  if (!t) return std::nullopt;
  const auto [r0, c0, r1, c1] = *t;
  return BBox{r0, c0, r1, c1};
}

py::object box_or_none(const std::optional<BBox>& b) {
  if (!b) return py::none();
  return py::make_tuple(b->row_min, b->col_min, b->row_max, b->col_max);
}

py::dict report_dict(const LocalizationReport& r) {
  py::dict d;
  d["threshold_fraction"] = r.threshold_fraction;
  d["mask_area"] = r.mask.count();
  d["component_count"] = r.component_count;
  d["largest_component_area"] = r.largest_component_area;
  d["bbox"] = box_or_none(r.bbox);
  d["iou"] = r.iou ? py::cast(*r.iou) : py::none();
  return d;
}

FeatureBundle make_bundle(const FloatArray& image, const FloatArray& features, const FloatArray& grads, int class_id,
                          const std::string& layer, const std::string& model, std::optional<std::string> class_name,
                          std::optional<std::vector<double>> logits) {
  FeatureBundle b;
  b.image = to_grid(image, "image");
  b.features = to_stack(features, "features");
  b.grads = to_stack(grads, "grads");
  b.class_id = class_id;
  b.layer_name = layer;
  b.model_name = model;
  b.class_name = std::move(class_name);
  b.logits = std::move(logits);
  return b;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Multi-scale self-matching CAM for single-channel imagery";

  // The module attribute keeps the type alive; `kind` carries the ErrorKind name.
  static PyObject* error_type = py::exception<Error>(m, "SarcamError", PyExc_ValueError).ptr();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object err = py::handle(error_type)(e.what());
      err.attr("kind") = std::string(to_string(e.kind()));
      PyErr_SetObject(error_type, err.ptr());
    }
  });

  m.def(
      "save_bundle",
      [](const std::filesystem::path& dir, const FloatArray& image, const FloatArray& features, const FloatArray& grads,
         int class_id, const std::string& layer, const std::string& model, std::optional<std::string> class_name,
         std::optional<std::vector<double>> logits) {
        save_bundle(make_bundle(image, features, grads, class_id, layer, model, std::move(class_name), std::move(logits)),
                    dir);
      },
      py::arg("dir"), py::arg("image"), py::arg("features"), py::arg("grads"), py::kw_only(), py::arg("class_id"),
      py::arg("layer"), py::arg("model"), py::arg("class_name") = py::none(), py::arg("logits") = py::none(),
      "Validate and write a bundle directory.");

  m.def(
      "load_bundle",
      [](const std::filesystem::path& dir) {
        const FeatureBundle b = load_bundle(dir);
        py::dict d;
        d["image"] = from_grid(b.image);
        d["features"] = from_stack(b.features);
        d["grads"] = from_stack(b.grads);
        d["class_id"] = b.class_id;
        d["layer"] = b.layer_name;
        d["model"] = b.model_name;
        d["class_name"] = b.class_name ? py::cast(*b.class_name) : py::none();
        d["logits"] = b.logits ? py::cast(*b.logits) : py::none();
        return d;
      },
      py::arg("dir"));

  m.def(
      "validate_bundle", [](const std::filesystem::path& dir) { load_bundle(dir); }, py::arg("dir"),
      "Raise SarcamError if the directory is not a valid bundle.");

  m.def(
      "compute_cam",
      [](const FloatArray& image, const FloatArray& features, const FloatArray& grads, const std::string& method,
         std::optional<int> m_size, std::optional<std::string> channel_strategy,
         std::optional<std::vector<int>> channels) {
        const FeatureBundle b = make_bundle(image, features, grads, 0, "", "", std::nullopt, std::nullopt);
        validate_bundle(b);
        CamConfig config;
        config.method = parse_method(method);
        config.intermediate_side = m_size;
        if (channel_strategy) config.channel_strategy = parse_channel_strategy(*channel_strategy);
        config.channel_subset = std::move(channels);
        return from_grid(compute_cam(b, config));
      },
      py::arg("image"), py::arg("features"), py::arg("grads"), py::arg("method") = "ms-cam",
      py::arg("m_size") = py::none(), py::arg("channel_strategy") = py::none(), py::arg("channels") = py::none());

  m.def("auto_intermediate_side", &auto_intermediate_side, py::arg("grid_side"), py::arg("image_side"));

  m.def(
      "resize_bilinear", [](const FloatArray& a, int side) { return from_grid(resize_bilinear(to_grid(a, "grid"), side)); },
      py::arg("grid"), py::arg("side"));
  m.def(
      "normalize_minmax", [](const FloatArray& a) { return from_grid(normalize_minmax(to_grid(a, "grid"))); },
      py::arg("grid"));

  m.def(
      "localize",
      [](const FloatArray& map, double fraction, std::optional<std::tuple<int, int, int, int>> gt) {
        return report_dict(localize(to_grid(map, "map"), fraction, to_box(gt)));
      },
      py::arg("map"), py::arg("fraction") = kDefaultThreshold, py::arg("gt") = py::none(),
      "Boxes are (row_min, col_min, row_max, col_max), inclusive.");

  m.def(
      "sweep",
      [](const FloatArray& map, std::vector<double> fractions, std::optional<std::tuple<int, int, int, int>> gt) {
        const SweepResult res = sweep(to_grid(map, "map"), fractions, to_box(gt));
        py::list reports;
        for (const auto& r : res.reports) reports.append(report_dict(r));
        return py::make_tuple(reports, res.best ? py::cast(*res.best) : py::none());
      },
      py::arg("map"),
      py::arg("fractions") = std::vector<double>(std::begin(kDefaultSweepFractions), std::end(kDefaultSweepFractions)),
      py::arg("gt") = py::none(), "Returns (reports, best_index).");

  m.def(
      "iou",
      [](std::tuple<int, int, int, int> a, std::tuple<int, int, int, int> b) { return iou(*to_box(a), *to_box(b)); },
      py::arg("a"), py::arg("b"));

  m.def(
      "colorize", [](const FloatArray& map) { return from_rgb(colorize(to_grid(map, "map"))); }, py::arg("map"),
      "Jet colormap; returns uint8 (H, W, 3).");

  m.def(
      "overlay",
      [](const FloatArray& image, const FloatArray& map, double alpha) {
        return from_rgb(overlay(to_grid(image, "image"), colorize(to_grid(map, "map")), alpha));
      },
      py::arg("image"), py::arg("map"), py::arg("alpha") = 0.5);

  m.attr("METHODS") = py::make_tuple("ms-cam", "grad-cam", "grad-cam-pp", "layer-cam", "self-matching-cam");
  m.attr("SCHEMA_VERSION") = kBundleSchemaVersion;
}
