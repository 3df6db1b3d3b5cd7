#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "pairfeat/cli.hpp"
#include "pairfeat/corners.hpp"
#include "pairfeat/delaunay.hpp"
#include "pairfeat/error.hpp"
#include "pairfeat/feature_file.hpp"
#include "pairfeat/image.hpp"
#include "pairfeat/metrics.hpp"
#include "pairfeat/pairing.hpp"
#include "pairfeat/patches.hpp"
#include "pairfeat/synthetic.hpp"

namespace py = pybind11;
using namespace pairfeat;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

GrayImage to_image(const Array& a) {
  if (a.ndim() != 2) throw Error(ErrorCode::InvalidArgument, "image must be a 2-D array");
  const auto h = static_cast<int>(a.shape(0));
  const auto w = static_cast<int>(a.shape(1));
  return GrayImage(w, h, std::vector<double>(a.data(), a.data() + a.size()));
}

Array from_image(const GrayImage& img) {
  Array out({img.height(), img.width()});
  std::copy(img.data().begin(), img.data().end(), out.mutable_data());
  return out;
}

std::vector<Point2> to_points(const Array& a) {
  if (a.ndim() != 2 || a.shape(1) != 2) throw Error(ErrorCode::InvalidArgument, "points must have shape (n, 2)");
  std::vector<Point2> pts(static_cast<std::size_t>(a.shape(0)));
  const auto r = a.unchecked<2>();
  for (py::ssize_t i = 0; i < a.shape(0); ++i) pts[i] = {r(i, 0), r(i, 1)};
  return pts;
}

Array rows_to_array(const std::vector<FeatureRecord>& rows, std::size_t dim) {
  Array out({static_cast<py::ssize_t>(rows.size()), static_cast<py::ssize_t>(dim)});
  double* p = out.mutable_data();
  for (const auto& r : rows) p = std::copy(r.vector.begin(), r.vector.end(), p);
  return out;
}

std::vector<FeatureRecord> records_from(const Array& features, const Array& points, const std::string& image_id) {
  if (features.ndim() != 2) throw Error(ErrorCode::InvalidArgument, "features must be a 2-D array");
  const auto pts = to_points(points);
  if (static_cast<py::ssize_t>(pts.size()) != features.shape(0)) {
    throw Error(ErrorCode::CountMismatch, "features and points differ in length");
  }
  const auto dim = static_cast<std::size_t>(features.shape(1));
  std::vector<FeatureRecord> out;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double* row = features.data() + i * dim;
    out.push_back({image_id, static_cast<std::uint32_t>(i), pts[i], Origin::Original, {row, row + dim}});
  }
  return out;
}

CornerConfig corner_config(int max_points, int min_points_target, double quality_ratio, double min_distance,
                           int window_radius) {
  CornerConfig c{max_points, min_points_target, quality_ratio, min_distance, window_radius};
  c.validate();
  return c;
}

py::dict metric_dict(const MetricValues& v) {
  py::dict d;
  for (std::size_t i = 0; i < MetricValues::size(); ++i) d[py::str(std::string(MetricValues::kNames[i]))] = v[i];
  return d;
}

}  // namespace

PYBIND11_MODULE(_pairfeat, m) {
  m.doc() = "Bindings for the pairfeat C++ core";

  // Module-lifetime class object; `code` carries the library error name.
  static PyObject* error_type = PyErr_NewException("pairfeat._pairfeat.PairfeatError", PyExc_RuntimeError, nullptr);
  m.attr("PairfeatError") = py::handle(error_type);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = py::handle(error_type)(std::string(e.what()));
      exc.attr("code") = std::string(to_string(e.code()));
      PyErr_SetObject(error_type, exc.ptr());
    }
  });

  m.def("load_image", [](const std::filesystem::path& p) { return from_image(load_image(p)); }, py::arg("path"),
        "Grayscale image as a (height, width) float array in [0, 255].");
  m.def("write_pgm", [](const std::filesystem::path& p, const Array& img) { write_pgm(p, to_image(img)); },
        py::arg("path"), py::arg("image"));

  m.def(
      "score_field",
      [](const Array& img, int window_radius) {
        CornerConfig cfg;
        cfg.window_radius = window_radius;
        const auto f = score_field(to_image(img), cfg);
        Array out({f.height, f.width});
        std::copy(f.values.begin(), f.values.end(), out.mutable_data());
        return out;
      },
      py::arg("image"), py::arg("window_radius") = 1);

  m.def(
      "detect",
      [](const Array& img, int max_points, int min_points_target, double quality_ratio, double min_distance,
         int window_radius) {
        const auto pts = detect(
            to_image(img), corner_config(max_points, min_points_target, quality_ratio, min_distance, window_radius));
        std::vector<std::tuple<int, int, double>> out;
        for (const auto& p : pts) out.emplace_back(p.x, p.y, p.score);
        return out;
      },
      py::arg("image"), py::arg("max_points") = 15, py::arg("min_points_target") = 10,
      py::arg("quality_ratio") = 0.01, py::arg("min_distance") = 10.0, py::arg("window_radius") = 1,
      "Corner list of (x, y, score), strongest first.");

  m.def(
      "describe",
      [](const Array& img, const std::vector<std::pair<int, int>>& points, std::size_t dim) {
        std::vector<InterestPoint> pts;
        for (const auto& [x, y] : points) pts.push_back({x, y, 0.0});
        std::vector<FeatureRecord> rows;
        for (const auto& patch : mesh_patches(to_image(img), pts)) rows.push_back(builtin_descriptor(patch, dim));
        return rows_to_array(rows, dim);
      },
      py::arg("image"), py::arg("points"), py::arg("dim") = 128,
      "Builtin descriptors of the 40x40 patches centred on each (x, y).");

  m.def(
      "delaunay",
      [](const Array& points) {
        const auto t = delaunay(to_points(points));
        py::array_t<int> tris({static_cast<py::ssize_t>(t.triangles.size()), py::ssize_t{3}});
        py::array_t<int> edges({static_cast<py::ssize_t>(t.edges.size()), py::ssize_t{2}});
        auto tw = tris.mutable_unchecked<2>();
        for (std::size_t i = 0; i < t.triangles.size(); ++i)
          for (int k = 0; k < 3; ++k) tw(i, k) = t.triangles[i][k];
        auto ew = edges.mutable_unchecked<2>();
        for (std::size_t i = 0; i < t.edges.size(); ++i) {
          ew(i, 0) = t.edges[i].first;
          ew(i, 1) = t.edges[i].second;
        }
        return py::make_tuple(tris, edges);
      },
      py::arg("points"), "Returns (triangles, edges) as integer arrays.");

  m.def("midpoint", [](std::pair<double, double> a, std::pair<double, double> b) {
    const auto p = midpoint({a.first, a.second}, {b.first, b.second});
    return std::pair(p.x, p.y);
  });

  m.def(
      "joint_map",
      [](const Array& features, const Array& points, const std::string& mode, std::size_t horizontal_slots) {
        const auto parsed = parse_join_mode(mode);
        if (!parsed) throw Error(ErrorCode::InvalidArgument, "unknown mode " + mode);
        const auto records = records_from(features, points, "image");
        const auto graph = build_pair_graph(to_points(points));
        const auto map = build_joint_map(records, graph.edges, *parsed, horizontal_slots);
        return rows_to_array(map.rows, map.dim);
      },
      py::arg("features"), py::arg("points"), py::arg("mode") = "paired", py::arg("horizontal_slots") = 0,
      "Joint feature rows of one image: originals, then one mean row per pairing edge.");

  m.def(
      "metrics",
      [](const py::array_t<std::uint64_t, py::array::c_style | py::array::forcecast>& cm) {
        if (cm.ndim() != 2 || cm.shape(0) != cm.shape(1)) {
          throw Error(ErrorCode::InvalidArgument, "confusion matrix must be square");
        }
        const auto k = static_cast<std::size_t>(cm.shape(0));
        const auto r = metrics_from_confusion(ConfusionMatrix(k, {cm.data(), cm.data() + cm.size()}));
        py::dict out = metric_dict(r.macro);
        py::list per_class;
        for (const auto& c : r.per_class) per_class.append(metric_dict(c.values));
        out["per_class"] = per_class;
        out["degenerate"] = r.degenerate;
        return out;
      },
      py::arg("confusion"), "Macro metrics of a (true, predicted) count matrix.");

  m.def(
      "read_features",
      [](const std::filesystem::path& p) {
        const auto f = read_features(p);
        py::list ids, index, origin;
        Array points({static_cast<py::ssize_t>(f.records.size()), py::ssize_t{2}});
        auto pw = points.mutable_unchecked<2>();
        for (std::size_t i = 0; i < f.records.size(); ++i) {
          const auto& r = f.records[i];
          ids.append(r.image_id);
          index.append(r.point_index);
          origin.append(r.origin == Origin::Paired ? "paired" : "original");
          pw(i, 0) = r.point.x;
          pw(i, 1) = r.point.y;
        }
        py::dict out;
        out["format"] = f.format == FeatureFormat::Pfv1 ? "PFV1" : "PFV2";
        out["image_id"] = ids;
        out["point_index"] = index;
        out["point"] = points;
        out["origin"] = origin;
        out["vector"] = rows_to_array(f.records, f.dim);
        return out;
      },
      py::arg("path"));

  m.def(
      "write_features",
      [](const std::filesystem::path& p, const std::vector<std::string>& ids,
         const std::vector<std::uint32_t>& point_index, const Array& points, const Array& vectors) {
        if (ids.size() != point_index.size()) throw Error(ErrorCode::CountMismatch, "ids and indices differ");
        auto recs = records_from(vectors, points, "");
        if (recs.size() != ids.size()) throw Error(ErrorCode::CountMismatch, "ids and vectors differ");
        for (std::size_t i = 0; i < recs.size(); ++i) {
          recs[i].image_id = ids[i];
          recs[i].point_index = point_index[i];
        }
        write_features(p, recs, static_cast<std::uint32_t>(vectors.shape(1)));
      },
      py::arg("path"), py::arg("image_id"), py::arg("point_index"), py::arg("point"), py::arg("vector"));

  m.def(
      "synthetic_image",
      [](int label, int index, int classes, int width, int height, std::uint64_t seed) {
        SyntheticConfig cfg;
        cfg.classes = classes;
        cfg.width = width;
        cfg.height = height;
        cfg.seed = seed;
        return from_image(synthetic_image(cfg, label, index));
      },
      py::arg("label"), py::arg("index"), py::arg("classes") = 5, py::arg("width") = 480, py::arg("height") = 360,
      py::arg("seed") = 0);

  m.def(
      "white_square_image", [](int size, int side, int x0, int y0) { return from_image(white_square_image(size, side, x0, y0)); },
      py::arg("size"), py::arg("side"), py::arg("x0"), py::arg("y0"));

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        const int code = run_cli(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs a pairfeat subcommand; returns (exit_code, stdout, stderr).");
}
