#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "dmdroi/csv.hpp"
#include "dmdroi/dmd.hpp"
#include "dmdroi/error.hpp"
#include "dmdroi/phantom.hpp"
#include "dmdroi/quantify.hpp"
#include "dmdroi/segmentation.hpp"
#include "dmdroi/stack_io.hpp"

namespace py = pybind11;
using namespace dmdroi;

namespace {

using DoubleArray = py::array_t<double, py::array::c_style | py::array::forcecast>;
using BoolArray = py::array_t<bool, py::array::c_style | py::array::forcecast>;

// (frames, height, width) array -> ImageStack
ImageStack stack_from_array(const DoubleArray& a, double dt) {
  if (a.ndim() != 3) throw Error(ErrorCode::DimensionMismatch, "stack array must be (frames, height, width)");
  std::vector<double> px(a.data(), a.data() + a.size());
  return ImageStack(static_cast<int>(a.shape(1)), static_cast<int>(a.shape(2)), static_cast<int>(a.shape(0)), dt,
                    std::move(px));
}

DoubleArray stack_to_array(const ImageStack& s) {
  DoubleArray out({s.frame_count(), s.height(), s.width()});
  std::copy(s.pixels().begin(), s.pixels().end(), out.mutable_data());
  return out;
}

BinaryMask mask_from_array(const BoolArray& a) {
  if (a.ndim() != 2) throw Error(ErrorCode::DimensionMismatch, "mask array must be 2-D");
  std::vector<bool> bits(a.data(), a.data() + a.size());
  return BinaryMask(static_cast<int>(a.shape(0)), static_cast<int>(a.shape(1)), std::move(bits));
}

BoolArray mask_to_array(const BinaryMask& m) {
  BoolArray out({m.height(), m.width()});
  bool* dst = out.mutable_data();
  for (std::size_t i = 0; i < m.size(); ++i) dst[i] = m[i];
  return out;
}

MagnitudeImage image_from_array(const DoubleArray& a) {
  if (a.ndim() != 2) throw Error(ErrorCode::DimensionMismatch, "image array must be 2-D");
  return MagnitudeImage{static_cast<int>(a.shape(0)), static_cast<int>(a.shape(1)),
                        std::vector<double>(a.data(), a.data() + a.size())};
}

TimeIntensityCurve curve_from(const std::vector<double>& v, bool normalized) {
  return TimeIntensityCurve{v, normalized, CurveSource::Template};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Dynamic mode decomposition ROI delineation";

  // Raised as dmdroi.Error(code_name, message).
  static py::handle error_type = py::exception<Error>(m, "Error", PyExc_RuntimeError).release();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object instance = py::reinterpret_borrow<py::object>(error_type)(std::string(to_string(e.code())), e.what());
      PyErr_SetObject(error_type.ptr(), instance.ptr());
    }
  });

  py::class_<DmdResult>(m, "DmdResult")
      .def_readonly("modes", &DmdResult::modes)
      .def_readonly("eigenvalues", &DmdResult::eigenvalues)
      .def_readonly("phase_angles", &DmdResult::phase_angles)
      .def_readonly("order", &DmdResult::order)
      .def_readonly("retained_from", &DmdResult::retained_from)
      .def_property_readonly("mode_count", &DmdResult::mode_count);

  py::class_<CompanionResult>(m, "CompanionResult")
      .def_readonly("coefficients", &CompanionResult::coefficients)
      .def_readonly("H", &CompanionResult::H)
      .def_readonly("eigenvalues", &CompanionResult::eigenvalues);

  m.def(
      "run_dmd",
      [](const Eigen::MatrixXd& data, double svd_tol) { return run_dmd(data, svd_tol); }, py::arg("data"),
      py::arg("svd_tol") = kDefaultSvdTolerance, "DMD of a (pixels, frames) data matrix");
  m.def(
      "run_dmd_stack",
      [](const DoubleArray& stack, double svd_tol) { return run_dmd(stack_from_array(stack, 1.0), svd_tol); },
      py::arg("stack"), py::arg("svd_tol") = kDefaultSvdTolerance, "DMD of a (frames, height, width) stack");
  m.def(
      "companion_dmd", [](const Eigen::MatrixXd& data) { return companion_dmd(split_snapshots(data)); },
      py::arg("data"));
  m.def(
      "data_matrix", [](const DoubleArray& stack) { return Eigen::MatrixXd(build_data_matrix(stack_from_array(stack, 1.0))); },
      py::arg("stack"), "(pixels, frames) matrix with raster-order columns");

  m.def(
      "load_stack",
      [](const std::filesystem::path& path) {
        const ImageStack s = load_stack(path);
        return py::make_tuple(stack_to_array(s), s.frame_interval());
      },
      py::arg("path"), "returns (stack, frame_interval)");
  m.def(
      "save_stack",
      [](const std::filesystem::path& path, const DoubleArray& stack, double dt) {
        save_stack(stack_from_array(stack, dt), path);
      },
      py::arg("path"), py::arg("stack"), py::arg("frame_interval") = 1.0);

  m.def(
      "mode_magnitude",
      [](const DmdResult& r, int mode_index, int height, int width) {
        const MagnitudeImage img = mode_to_magnitude(r, mode_index, height, width);
        DoubleArray out({height, width});
        std::copy(img.values.begin(), img.values.end(), out.mutable_data());
        return out;
      },
      py::arg("result"), py::arg("mode_index"), py::arg("height"), py::arg("width"));
  m.def(
      "otsu_threshold", [](const DoubleArray& img, int bins) { return otsu_threshold(image_from_array(img), bins); },
      py::arg("image"), py::arg("bins") = kDefaultHistogramBins);
  m.def(
      "label_components",
      [](const BoolArray& mask) {
        py::list out;
        for (const Blob& b : label_components(mask_from_array(mask))) {
          py::list pixels;
          for (const Pixel& p : b.pixels) pixels.append(py::make_tuple(p.row, p.col));
          py::dict d;
          d["label"] = b.label;
          d["pixels"] = pixels;
          d["bbox"] = py::make_tuple(b.bbox.min_row, b.bbox.min_col, b.bbox.max_row, b.bbox.max_col);
          d["centroid"] = py::make_tuple(b.centroid_row, b.centroid_col);
          out.append(d);
        }
        return out;
      },
      py::arg("mask"), "8-connected blobs, largest first");
  m.def(
      "delineate",
      [](const DmdResult& r, int mode_index, int height, int width, const std::string& restriction) {
        return mask_to_array(delineate(r, mode_index, height, width, parse_restriction(restriction)));
      },
      py::arg("result"), py::arg("mode_index"), py::arg("height"), py::arg("width"),
      py::arg("restriction") = "left");

  m.def(
      "roi_mean_curve",
      [](const DoubleArray& stack, const BoolArray& mask) {
        return roi_mean_curve(stack_from_array(stack, 1.0), mask_from_array(mask)).values;
      },
      py::arg("stack"), py::arg("mask"));
  m.def(
      "normalize_curve", [](const std::vector<double>& v) { return normalize_curve(curve_from(v, false)).values; },
      py::arg("curve"));
  m.def(
      "rmse",
      [](const std::vector<double>& a, const std::vector<double>& b) {
        return rmse(curve_from(a, false), curve_from(b, false));
      },
      py::arg("a"), py::arg("b"));
  m.def(
      "bounding_box_baseline", [](const BoolArray& mask) { return mask_to_array(bounding_box_baseline(mask_from_array(mask))); },
      py::arg("reference_mask"));
  m.def(
      "dice_coefficient",
      [](const BoolArray& a, const BoolArray& b) { return dice_coefficient(mask_from_array(a), mask_from_array(b)); },
      py::arg("a"), py::arg("b"));
  m.def(
      "evaluate",
      [](const DoubleArray& stack, const BoolArray& roi, const BoolArray& reference, const std::vector<double>& truth) {
        const DatasetScore s = evaluate(stack_from_array(stack, 1.0), mask_from_array(roi), mask_from_array(reference),
                                        TimeIntensityCurve{truth, false, CurveSource::Truth});
        return py::make_tuple(s.rmse_framework, s.rmse_baseline);
      },
      py::arg("stack"), py::arg("roi"), py::arg("reference_mask"), py::arg("truth"),
      "returns (rmse_framework, rmse_baseline)");

  m.def("kidney_curve", [](int t, int n) { return kidney_curve(t, n); }, py::arg("t"), py::arg("frame_count"));
  m.def("liver_curve", [](int t, int n) { return liver_curve(t, n); }, py::arg("t"), py::arg("frame_count"));
  m.def("gaussian_kernel", &gaussian_kernel, py::arg("variance"), py::arg("size"));

  m.def(
      "default_phantom_spec", [] { return PhantomSpec{}.to_text(); }, "default phantom parameters as key=value text");
  m.def(
      "generate_phantom",
      [](const std::string& spec_text) {
        const PhantomOutput p = generate_phantom(PhantomSpec::from_text(spec_text));
        py::dict d;
        d["stack"] = stack_to_array(p.stack);
        d["clean_stack"] = stack_to_array(p.clean_stack);
        d["mask_kidney"] = mask_to_array(p.masks.kidney);
        d["mask_liver"] = mask_to_array(p.masks.liver);
        d["mask_background"] = mask_to_array(p.masks.background);
        d["kidney_truth"] = p.kidney_truth.values;
        d["liver_truth"] = p.liver_truth.values;
        d["background_truth"] = p.background_truth.values;
        return d;
      },
      py::arg("spec") = std::string(), "phantom from key=value overrides of the defaults");
}
