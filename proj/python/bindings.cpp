// SPDX-License-Identifier: Apache-2.0
//
// Python bindings for the mesh, media, assembly, eigensolver, analysis and
// oracle layers. Sparse matrices come back as scipy.sparse CSC matrices.

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "cli.hpp"
#include "tevlab/oracles.hpp"
#include "tevlab/spectral.hpp"

namespace py = pybind11;
using namespace tevlab;

namespace {

MediumPair make_pair(const SymMat2& A1, double Sigma1, const SymMat2& A2, double Sigma2, double Lambda) {
  MediumPair p;
  p.A1 = A1;
  p.Sigma1 = Sigma1;
  p.A2 = A2;
  p.Sigma2 = Sigma2;
  p.Lambda = Lambda;
  return p;
}

py::tuple cli_run(const std::vector<std::string>& args) {
  std::vector<std::string> full = {"tevlab"};
  full.insert(full.end(), args.begin(), args.end());
  std::ostringstream out, err;
  const int code = cli::run(full, out, err);
  return py::make_tuple(code, out.str(), err.str());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Transmission eigenvalue lab";

  py::register_exception<MeshError>(m, "MeshError", PyExc_ValueError);
  py::register_exception<AnalysisError>(m, "AnalysisError", PyExc_RuntimeError);
  py::register_exception<SingularShiftError>(m, "SingularShiftError", PyExc_ArithmeticError);

  // --- geometry
  py::class_<Point2>(m, "Point2")
      .def(py::init<double, double>(), py::arg("x"), py::arg("y"))
      .def_readwrite("x", &Point2::x)
      .def_readwrite("y", &Point2::y)
      .def("__repr__", [](const Point2& p) { return "Point2(" + std::to_string(p.x) + ", " + std::to_string(p.y) + ")"; });

  py::class_<TriMesh, std::shared_ptr<TriMesh>>(m, "TriMesh")
      .def_property_readonly("vertices",
                             [](const TriMesh& t) {
                               Eigen::MatrixX2d v(t.num_vertices(), 2);
                               for (std::size_t i = 0; i < t.num_vertices(); ++i) v.row(i) << t.vertices()[i].x, t.vertices()[i].y;
                               return v;
                             })
      .def_property_readonly("triangles",
                             [](const TriMesh& t) {
                               Eigen::Matrix<int, Eigen::Dynamic, 3, Eigen::RowMajor> tri(t.num_triangles(), 3);
                               for (std::size_t i = 0; i < t.num_triangles(); ++i)
                                 for (int k = 0; k < 3; ++k) tri(i, k) = t.triangles()[i][k];
                               return tri;
                             })
      .def_property_readonly("boundary_edges",
                             [](const TriMesh& t) {
                               Eigen::Matrix<int, Eigen::Dynamic, 3, Eigen::RowMajor> b(t.boundary_edges().size(), 3);
                               for (std::size_t i = 0; i < t.boundary_edges().size(); ++i) {
                                 const auto& e = t.boundary_edges()[i];
                                 b.row(i) << e.vertices[0], e.vertices[1], e.triangle;
                               }
                               return b;
                             })
      .def_property_readonly("num_vertices", &TriMesh::num_vertices)
      .def_property_readonly("num_triangles", &TriMesh::num_triangles)
      .def_property_readonly("num_edges", &TriMesh::num_edges)
      .def_property_readonly("h", &TriMesh::characteristic_h)
      .def_property_readonly("area", &TriMesh::area)
      .def("save",
           [](const TriMesh& t) {
             std::ostringstream out;
             save_mesh(t, out);
             return out.str();
           },
           "Mesh in the `tmesh 1` text format.");

  m.def("mesh_unit_disk", [](int level) { return std::make_shared<TriMesh>(mesh_unit_disk(level)); },
        py::arg("level"));
  m.def("mesh_rectangle",
        [](int nx, int ny, Point2 a, Point2 b) { return std::make_shared<TriMesh>(mesh_rectangle(nx, ny, a, b)); },
        py::arg("nx"), py::arg("ny"), py::arg("corner_a"), py::arg("corner_b"));
  m.def("load_mesh",
        [](const std::string& text) {
          std::istringstream in(text);
          return std::make_shared<TriMesh>(load_mesh(in));
        },
        py::arg("text"));

  py::class_<BoundaryFrame>(m, "BoundaryFrame")
      .def_readonly("midpoint", &BoundaryFrame::midpoint)
      .def_readonly("normal", &BoundaryFrame::normal)
      .def_readonly("tangent", &BoundaryFrame::tangent)
      .def_readonly("edge", &BoundaryFrame::edge);
  m.def("boundary_frames", &boundary_frames, py::arg("mesh"));

  // --- media
  py::class_<SymMat2>(m, "SymMat2")
      .def(py::init<double, double, double>(), py::arg("a11"), py::arg("a12"), py::arg("a22"))
      .def_static("identity", &SymMat2::identity)
      .def_static("diag", &SymMat2::diag)
      .def_readwrite("a11", &SymMat2::a11)
      .def_readwrite("a12", &SymMat2::a12)
      .def_readwrite("a22", &SymMat2::a22)
      .def("det", &SymMat2::det)
      .def("eigenvalues", &SymMat2::eigenvalues);

  py::class_<MediumPair>(m, "MediumPair", "Constant-coefficient media pair.")
      .def(py::init(&make_pair), py::arg("A1") = SymMat2::identity(), py::arg("Sigma1") = 1.0,
           py::arg("A2") = SymMat2::identity(), py::arg("Sigma2") = 1.0, py::arg("Lambda") = 1.0)
      .def_readwrite("Lambda", &MediumPair::Lambda);

  py::class_<ConditionReport>(m, "ConditionReport")
      .def_readonly("id", &ConditionReport::id)
      .def_readonly("margin", &ConditionReport::margin)
      .def_readonly("location", &ConditionReport::location)
      .def_readonly("passed", &ConditionReport::pass)
      .def_readonly("min_value", &ConditionReport::min_value)
      .def_readonly("max_value", &ConditionReport::max_value);
  m.def("check_ellipticity", &check_ellipticity, py::arg("pair"), py::arg("samples"));
  m.def("check_complementing", &check_complementing, py::arg("pair"), py::arg("frames"));
  m.def("check_jump", &check_jump, py::arg("pair"), py::arg("frames"));
  m.def("complementing_gap", &complementing_gap, py::arg("A1"), py::arg("A2"), py::arg("frame"));
  m.def("interior_samples", &interior_samples, py::arg("mesh"));

  // --- assembly
  m.def("element_stiffness", &element_stiffness, py::arg("triangle"), py::arg("A"));
  m.def("element_mass", &element_mass, py::arg("triangle"), py::arg("sigma"));

  py::class_<TransmissionPencil>(m, "TransmissionPencil")
      .def_readonly("K", &TransmissionPencil::K)
      .def_readonly("M", &TransmissionPencil::M)
      .def_readonly("warnings", &TransmissionPencil::warnings)
      .def_property_readonly("size", &TransmissionPencil::size)
      .def_property_readonly("num_vertices", &TransmissionPencil::num_vertices);
  m.def("assemble_pencil",
        [](std::shared_ptr<TriMesh> mesh, const MediumPair& pair) { return assemble_pencil(mesh, pair); },
        py::arg("mesh"), py::arg("pair"));

  // --- eigensolve
  py::class_<SpectrumEntry>(m, "SpectrumEntry")
      .def_readonly("value", &SpectrumEntry::lambda)
      .def_readonly("multiplicity", &SpectrumEntry::multiplicity)
      .def_readonly("residual", &SpectrumEntry::residual)
      .def_readonly("shift", &SpectrumEntry::shift);
  py::class_<Spectrum>(m, "Spectrum")
      .def_readonly("entries", &Spectrum::entries)
      .def_readonly("t_max", &Spectrum::t_max)
      .def_readonly("warnings", &Spectrum::warnings)
      .def("moduli", &Spectrum::moduli)
      .def("total_multiplicity", &Spectrum::total_multiplicity)
      .def("count", &counting_function, py::arg("t"))
      .def("eigenvalues", [](const Spectrum& s) {
        std::vector<cplx> v;
        for (const auto& e : s.entries) v.insert(v.end(), e.multiplicity, e.lambda);
        return v;
      });
  m.def(
      "spectrum_window",
      [](const TransmissionPencil& p, double t_max, int nev, double tol, double sector) {
        WindowOptions o;
        o.arnoldi.nev = nev;
        o.arnoldi.tol = tol;
        o.sector_half_angle = sector;
        py::gil_scoped_release release;
        return spectrum_window(p, t_max, o);
      },
      py::arg("pencil"), py::arg("t_max"), py::arg("nev") = 30, py::arg("tol") = 1e-10,
      py::arg("sector") = 0.7853981633974483);
  m.def("dense_spectrum", [](const TransmissionPencil& p) { return dense_spectrum(p.K, p.M); }, py::arg("pencil"));

  // --- spectral analysis
  m.def("sublevel_volume", py::overload_cast<const SymMat2&, double>(&sublevel_volume), py::arg("A"), py::arg("Sigma"));
  m.def("weyl_constant", &weyl_constant, py::arg("mesh"), py::arg("pair"));
  m.def("weyl_constant_monte_carlo", &weyl_constant_monte_carlo, py::arg("mesh"), py::arg("pair"),
        py::arg("samples"), py::arg("seed") = 0);

  py::class_<WeylEstimate>(m, "WeylEstimate")
      .def_readonly("c_analytic", &WeylEstimate::c_analytic)
      .def_readonly("c_fit", &WeylEstimate::c_fit)
      .def_readonly("intercept", &WeylEstimate::intercept)
      .def_readonly("c_fit_origin", &WeylEstimate::c_fit_origin)
      .def_readonly("relative_deviation", &WeylEstimate::relative_deviation)
      .def_readonly("eigenvalues_in_window", &WeylEstimate::eigenvalues_in_window);
  m.def(
      "fit_weyl",
      [](const std::vector<double>& moduli, double t_max, double c, double lo, double hi) {
        return fit_weyl(moduli, t_max, c, WeylWindow{lo, hi, 64});
      },
      py::arg("moduli"), py::arg("t_max"), py::arg("c_analytic"), py::arg("lo") = 0.2, py::arg("hi") = 0.9);

  m.def("tauberian_normalization", &tauberian_normalization, py::arg("a"));
  py::class_<TauberianReport>(m, "TauberianReport")
      .def_readonly("a", &TauberianReport::a)
      .def_readonly("S", &TauberianReport::S)
      .def_readonly("c_tauberian", &TauberianReport::c_tauberian)
      .def_readonly("free_slope", &TauberianReport::free_slope)
      .def_readonly("relative_deviation", &TauberianReport::relative_deviation)
      .def_readonly("warnings", &TauberianReport::warnings);
  m.def(
      "tauberian_check",
      [](const Spectrum& s, const std::vector<double>& T, cplx lambda0, double c_reference) {
        TauberianOptions o;
        o.lambda0 = lambda0;
        o.c_reference = c_reference;
        return tauberian_check(s.entries, T, o);
      },
      py::arg("spectrum"), py::arg("T"), py::arg("lambda0") = cplx(0.0, 10.0), py::arg("c_reference") = 0.0);

  py::class_<ResolventPoint>(m, "ResolventPoint")
      .def_readonly("t", &ResolventPoint::t)
      .def_readonly("l2", &ResolventPoint::l2)
      .def_readonly("gradient", &ResolventPoint::gradient)
      .def_readonly("max_norm", &ResolventPoint::max_norm)
      .def_readonly("ok", &ResolventPoint::ok);
  py::class_<ResolventScan>(m, "ResolventScan")
      .def_readonly("points", &ResolventScan::points)
      .def_readonly("slope_l2", &ResolventScan::slope_l2)
      .def_readonly("slope_gradient", &ResolventScan::slope_gradient)
      .def_readonly("slope_max", &ResolventScan::slope_max);
  m.def(
      "resolvent_norm_scan",
      [](const TransmissionPencil& p, double theta, const std::vector<double>& t, std::uint64_t seed) {
        ResolventOptions o;
        o.seed = seed;
        py::gil_scoped_release release;
        return resolvent_norm_scan(p, theta, t, o);
      },
      py::arg("pencil"), py::arg("theta"), py::arg("t"), py::arg("seed") = 0);

  m.def("hs_norm", py::overload_cast<const MatC&, const VecR&>(&hs_norm), py::arg("T"), py::arg("weights"));

  py::class_<TraceReport>(m, "TraceReport")
      .def_readonly("lhs", &TraceReport::lhs)
      .def_readonly("rhs", &TraceReport::rhs)
      .def_readonly("rel_gap", &TraceReport::rel_gap)
      .def_readonly("Lambda0", &TraceReport::Lambda0)
      .def_readonly("eigenvalues", &TraceReport::eigenvalues);
  m.def(
      "trace_identity_check",
      [](const TransmissionPencil& p, double t, double Lambda0, int k) {
        TraceOptions o;
        o.Lambda0 = Lambda0;
        o.k = k;
        return trace_identity_check(p.K, p.M, t, o);
      },
      py::arg("pencil"), py::arg("t"), py::arg("Lambda0") = 10.0, py::arg("k") = 1);

  m.def("kernel_leading_coefficient", &kernel_leading_coefficient, py::arg("A"), py::arg("Sigma"), py::arg("k") = 1);

  // --- oracles
  m.def("multiplier_mode_solve",
        [](const SymMat2& A, double Sigma, cplx lambda, Point2 xi, cplx amplitude) {
          return multiplier_mode_solve({A, Sigma, lambda, xi, amplitude});
        },
        py::arg("A"), py::arg("Sigma"), py::arg("lam"), py::arg("xi"), py::arg("amplitude") = cplx(1.0));
  m.def("bessel_J", py::overload_cast<int, double>(&bessel_J), py::arg("m"), py::arg("x"));
  m.def("bessel_J_prime", py::overload_cast<int, double>(&bessel_J_prime), py::arg("m"), py::arg("x"));
  m.def("bessel_J_complex", py::overload_cast<int, cplx>(&bessel_J), py::arg("m"), py::arg("z"));
  m.def("bessel_zero", &bessel_zero, py::arg("m"), py::arg("index"));
  py::class_<HalfSpaceSolution>(m, "HalfSpaceSolution")
      .def_readonly("phi_hat", &HalfSpaceSolution::phi_hat)
      .def_readonly("value", &HalfSpaceSolution::lambda)
      .def_property_readonly("eta", [](const HalfSpaceSolution& s) { return std::make_pair(s.medium[0].eta, s.medium[1].eta); })
      .def_property_readonly("alpha",
                             [](const HalfSpaceSolution& s) { return std::make_pair(s.medium[0].alpha, s.medium[1].alpha); });
  py::class_<HalfSpaceResiduals>(m, "HalfSpaceResiduals")
      .def_readonly("ode", &HalfSpaceResiduals::ode)
      .def_readonly("jump", &HalfSpaceResiduals::jump)
      .def_readonly("flux", &HalfSpaceResiduals::flux)
      .def_readonly("decaying", &HalfSpaceResiduals::decaying);
  m.def("halfspace_solve", &halfspace_solve, py::arg("A1"), py::arg("A2"), py::arg("Sigma1"), py::arg("Sigma2"),
        py::arg("lam"), py::arg("xi_tangential"), py::arg("phi_hat"));
  m.def("verify_halfspace", &verify_halfspace, py::arg("solution"), py::arg("depths"));
  m.def("disk_determinant", py::overload_cast<int, double, double>(&disk_determinant), py::arg("m"), py::arg("k"),
        py::arg("n"));

  py::class_<DiskEigenvalue>(m, "DiskEigenvalue")
      .def_readonly("mode", &DiskEigenvalue::mode)
      .def_readonly("k", &DiskEigenvalue::k)
      .def_readonly("value", &DiskEigenvalue::lambda)
      .def_readonly("multiplicity", &DiskEigenvalue::multiplicity);
  m.def(
      "disk_eigenvalues",
      [](double n, int max_mode, double k_max, bool complex_roots) {
        DiskOracleOptions o;
        o.max_mode = max_mode;
        o.k_max = k_max;
        o.complex_roots = complex_roots;
        return disk_eigenvalues(n, o);
      },
      py::arg("n"), py::arg("max_mode") = 30, py::arg("k_max") = 15.0, py::arg("complex_roots") = true);

  // --- front end
  m.def("run_cli", &cli_run, py::arg("args"),
        "Runs the command-line front end in-process; returns (exit_code, stdout, stderr).");
}
