#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "schlafli/battery.hpp"
#include "schlafli/error.hpp"
#include "schlafli/exprlang.hpp"
#include "schlafli/functionals.hpp"
#include "schlafli/integral_geom.hpp"
#include "schlafli/polyhedra.hpp"
#include "schlafli/scene.hpp"
#include "schlafli/spaceform.hpp"
#include "schlafli/surfaces.hpp"

namespace py = pybind11;
using namespace schlafli;

namespace {

py::dict row_dict(const ReportRow& r) {
  py::dict d;
  d["task"] = r.task;
  d["object"] = r.object;
  d["quantity"] = r.quantity;
  d["computed"] = r.computed;
  d["oracle"] = r.oracle;
  d["residual"] = r.residual;
  d["tolerance"] = r.tolerance;
  d["error_budget"] = r.error_budget;
  d["passed"] = r.pass;
  d["seed"] = r.seed ? py::object(py::int_(*r.seed)) : py::object(py::none());
  return d;
}

ChartMode chart_mode(const std::string& name) {
  if (name == "radial") return ChartMode::radial;
  if (name == "normal") return ChartMode::normal;
  if (name == "ambient") return ChartMode::ambient;
  throw Error(ErrorKind::OutOfRange, "mode must be radial, normal or ambient");
}

}  // namespace

PYBIND11_MODULE(_schlafli, m) {
  m.doc() = "Schlafli formula, curvature integrals and integral geometry in 3-D space forms";

  py::register_exception<Error>(m, "SchlafliError", PyExc_RuntimeError);

  py::class_<SpaceForm>(m, "SpaceForm")
      .def(py::init([](double K, bool lorentzian) {
             return SpaceForm(3, K, lorentzian ? Signature::lorentzian : Signature::riemannian);
           }),
           py::arg("curvature"), py::arg("lorentzian") = false)
      .def_static("euclidean", [] { return SpaceForm::euclidean(); })
      .def_static("sphere", [](double K) { return SpaceForm::sphere(3, K); }, py::arg("curvature") = 1.0)
      .def_static("hyperbolic", [](double K) { return SpaceForm::hyperbolic(3, K); }, py::arg("curvature") = -1.0)
      .def_static("de_sitter", [] { return SpaceForm::de_sitter(); })
      .def_property_readonly("curvature", &SpaceForm::curvature)
      .def_property_readonly("name", &SpaceForm::name)
      .def("__repr__", [](const SpaceForm& s) { return "SpaceForm(" + s.name() + ")"; });
  m.def("ball_volume", &ball_volume_closed, py::arg("space"), py::arg("r"));
  m.def("sphere_area", &sphere_area, py::arg("space"), py::arg("r"));

  // surfaces
  py::class_<SurfaceFamily>(m, "SurfaceFamily")
      .def_property_readonly("space", &SurfaceFamily::space)
      .def_property_readonly("name", &SurfaceFamily::name)
      .def("at", [](const SurfaceFamily& f, double t) { return at_time(f, t); }, py::arg("t") = 0.0);
  py::class_<ParamSurface>(m, "Surface")
      .def_property_readonly("space", &ParamSurface::space)
      .def_readonly("t", &ParamSurface::t);

  m.def("sphere_family", [](const SpaceForm& s, double r0, double rate) { return sphere_family(s, r0, rate); },
        py::arg("space"), py::arg("radius"), py::arg("rate") = 0.0);
  m.def("ellipsoid_radial", &ellipsoid_radial, py::arg("space"), py::arg("a"), py::arg("b"), py::arg("c"),
        py::arg("rate") = 0.0);
  m.def("perturbed_sphere", &perturbed_sphere, py::arg("space"), py::arg("radius"), py::arg("amplitude"),
        py::arg("shape") = 1);
  m.def("torus", &torus, py::arg("R"), py::arg("r"));
  m.def("plane_patch", &plane_patch);
  m.def("de_sitter_slice", &de_sitter_slice, py::arg("space"), py::arg("s0"), py::arg("rate") = 1.0,
        py::arg("amplitude") = 0.0);
  m.def(
      "expr_family",
      [](const SpaceForm& s, const std::string& program, const std::string& mode, const std::map<std::string, double>& p) {
        std::vector<std::string> names;
        ParamMap params;
        for (const auto& [k, v] : p) {
          names.push_back(k);
          params[k] = v;
        }
        return expr_family(s, ExprProgram::parse(program, names), chart_mode(mode), params);
      },
      py::arg("space"), py::arg("program"), py::arg("mode") = "radial",
      py::arg("params") = std::map<std::string, double>{});

  m.def(
      "fundamental_forms",
      [](const ParamSurface& s, double u, double v) {
        const FormsAt f = fundamental_forms(s, u, v);
        py::dict d;
        d["I"] = f.I;
        d["II"] = f.II;
        d["III"] = f.III;
        d["B"] = f.B;
        d["H"] = f.H;
        d["H2"] = f.H2;
        d["Ke"] = f.Ke;
        d["k1"] = f.k1;
        d["k2"] = f.k2;
        d["S_intrinsic"] = f.S_intrinsic;
        d["normal_speed"] = f.normal_speed;
        d["point"] = f.point.coords();
        d["normal"] = f.normal;
        return d;
      },
      py::arg("surface"), py::arg("u"), py::arg("v"));
  m.def(
      "enclosed_volume",
      [](const ParamSurface& s, const std::string& method, long samples, std::uint64_t seed) {
        VolumeOptions o;
        o.method = method == "mc" ? VolumeMethod::mc : method == "divergence" ? VolumeMethod::divergence : VolumeMethod::radial;
        o.samples = samples;
        o.seed = seed;
        const VolumeResult r = enclosed_volume(s, o);
        return py::make_tuple(r.value, r.error_bound);
      },
      py::arg("surface"), py::arg("method") = "radial", py::arg("samples") = 200000, py::arg("seed") = 1);
  m.def(
      "schlafli_smooth",
      [](const SurfaceFamily& f, double t, double h) {
        const SchlafliReport r = schlafli_residual_smooth(f, t, h);
        py::dict d;
        d["lhs"] = r.lhs;
        d["int_H_dot"] = r.int_H_dot;
        d["int_half_IdotII"] = r.int_half_IdotII;
        d["rhs"] = r.rhs;
        d["V_dot"] = r.V_dot;
        d["residual"] = r.residual;
        d["error_budget"] = r.error_budget;
        return d;
      },
      py::arg("family"), py::arg("t") = 0.0, py::arg("h") = 1e-3);

  // polyhedra
  py::class_<Polyhedron>(m, "Polyhedron")
      .def_property_readonly("space", &Polyhedron::space)
      .def_property_readonly("vertices",
                             [](const Polyhedron& p) {
                               std::vector<Eigen::VectorXd> out;
                               for (const AmbientPoint& v : p.vertices()) out.push_back(v.coords());
                               return out;
                             })
      .def_property_readonly("facets", &Polyhedron::facets)
      .def("dihedral_angles",
           [](const Polyhedron& p) {
             std::vector<double> out;
             for (int i = 0; i < static_cast<int>(p.ridges().size()); ++i) out.push_back(dihedral_angle(p, i));
             return out;
           })
      .def("ridge_measures", [](const Polyhedron& p) {
        std::vector<double> out;
        for (int i = 0; i < static_cast<int>(p.ridges().size()); ++i) out.push_back(ridge_measure(p, i));
        return out;
      });
  m.def("cube", &cube, py::arg("edge") = 1.0);
  m.def("regular_tetrahedron", &regular_tetrahedron, py::arg("edge") = 1.0);
  m.def("corner_tetrahedron", &corner_tetrahedron, py::arg("space"), py::arg("length") = 1.0);
  m.def("steffen", &steffen);
  m.def("polyhedron_from_json", &polyhedron_from_json, py::arg("text"));
  m.def(
      "poly_volume",
      [](const Polyhedron& p, const std::string& method, long samples, std::uint64_t seed) {
        PolyVolumeOptions o;
        o.method = method == "mc" ? PolyVolumeMethod::mc : PolyVolumeMethod::quadrature;
        o.samples = samples;
        o.seed = seed;
        const PolyVolume v = poly_volume(p, o);
        return py::make_tuple(v.value, v.error_bound);
      },
      py::arg("poly"), py::arg("method") = "quadrature", py::arg("samples") = 200000, py::arg("seed") = 1);
  m.def("total_mean_curvature", &total_mean_curvature_poly, py::arg("poly"));
  m.def(
      "schlafli_poly",
      [](const Polyhedron& p, const std::vector<Eigen::Vector3d>& velocity, double t, double h) {
        const PolySchlafli r = schlafli_residual_poly(vertex_velocity_path(p, velocity), t, h);
        py::dict d;
        d["lhs"] = r.lhs;
        d["rhs"] = r.rhs;
        d["residual"] = r.residual;
        d["error_budget"] = r.error_budget;
        return d;
      },
      py::arg("poly"), py::arg("velocity"), py::arg("t") = 0.5, py::arg("h") = 1e-4);
  m.def(
      "flex",
      [](const Polyhedron& p, int steps, double step) {
        const FlexPath f = flex_continuation(p, steps, step);
        return py::make_tuple(f.states, f.max_edge_drift);
      },
      py::arg("poly"), py::arg("steps") = 50, py::arg("step") = 0.01);

  // integral geometry
  py::class_<ConvexBody>(m, "ConvexBody")
      .def_readonly("area", &ConvexBody::area)
      .def_readonly("volume", &ConvexBody::volume)
      .def_readonly("mean_integral", &ConvexBody::mean_integral)
      .def_readonly("gauss_integral", &ConvexBody::gauss_integral);
  m.def("convex_body", [](const ParamSurface& s) { return make_convex_body(s); }, py::arg("surface"));
  m.def(
      "steiner_polynomial", [](const ConvexBody& b) { return steiner_from_curvature(b).coefficients; }, py::arg("body"));
  m.def(
      "eps_volume_mc",
      [](const ConvexBody& b, double eps, long samples, std::uint64_t seed) {
        const McEstimate e = eps_volume_direct(b, eps, samples, seed);
        return py::make_tuple(e.value, e.std_error);
      },
      py::arg("body"), py::arg("eps"), py::arg("samples"), py::arg("seed"));
  m.def(
      "crofton_lines",
      [](const ConvexBody& b, long samples, std::uint64_t seed) {
        const McEstimate e = crofton_lines_mc(b, samples, seed);
        return py::make_tuple(e.value, e.std_error);
      },
      py::arg("body"), py::arg("samples"), py::arg("seed"));
  m.def(
      "crofton_planes",
      [](const ConvexBody& b, long samples, std::uint64_t seed) {
        const McEstimate e = crofton_planes_mc(b, samples, seed);
        return py::make_tuple(e.value, e.std_error);
      },
      py::arg("body"), py::arg("samples"), py::arg("seed"));
  m.def("tube_growth_h3", &tube_growth_h3, py::arg("body"), py::arg("eps"));

  // functionals
  m.def(
      "p2",
      [](const ParamSurface& s) {
        const P2Value v = p2(s);
        py::dict d;
        d["P2"] = v.P2;
        d["int_H"] = v.int_H;
        d["area"] = v.area;
        d["volume"] = v.volume;
        d["epsilon"] = v.epsilon;
        return d;
      },
      py::arg("surface"));
  m.def(
      "alexandrov",
      [](const ParamSurface& s) {
        const AlexandrovReport r = alexandrov_compare(s);
        py::dict d;
        d["area"] = r.area;
        d["sphere_radius"] = r.sphere_radius;
        d["p2_surface"] = r.p2_surface;
        d["p2_sphere"] = r.p2_sphere;
        d["difference"] = r.difference;
        d["equality"] = r.equality;
        return d;
      },
      py::arg("surface"));
  m.def(
      "umbilic_inequality",
      [](const ParamSurface& s, double u, double v) {
        const UmbilicReport r = umbilic_inequality(s, u, v);
        py::dict d;
        d["lhs"] = r.lhs;
        d["rhs"] = r.rhs;
        d["residual"] = r.residual;
        d["equality"] = r.equality;
        d["h2_residual"] = r.h2_residual;
        return d;
      },
      py::arg("surface"), py::arg("u"), py::arg("v"));
  m.def(
      "ball_foliation",
      [](const SpaceForm& s, double R) {
        const FoliationReport r = foliation_identities(concentric_ball_foliation(s, R));
        py::dict d;
        d["volume"] = r.volume;
        d["boundary_H"] = r.boundary_H;
        d["residual_H2"] = r.residual_H2;
        d["residual_HSi"] = r.residual_HSi;
        d["residual_S"] = r.residual_S;
        d["lhs_S"] = r.lhs_S;
        d["rhs_S"] = r.rhs_S;
        return d;
      },
      py::arg("space"), py::arg("radius"));
  m.def(
      "warped_residuals",
      [](const std::string& name) {
        const WarpedResiduals r = warped_einstein_check(warp_catalog(name));
        return py::make_tuple(r.ode, r.first_integral);
      },
      py::arg("name"));

  // exprlang
  m.def(
      "eval_expr",
      [](const std::string& program, double u, double v, double t) {
        return ExprProgram::parse(program).eval(u, v, t);
      },
      py::arg("program"), py::arg("u") = 0.0, py::arg("v") = 0.0, py::arg("t") = 0.0);
  m.def(
      "eval_jet",
      [](const std::string& program, double u, double v, double t) {
        const JetValue j = eval_jet(ExprProgram::parse(program), u, v, t);
        py::dict d;
        d["value"] = j.value;
        d["du"] = j.du;
        d["dv"] = j.dv;
        d["dt"] = j.dt;
        d["duu"] = j.duu;
        d["duv"] = j.duv;
        d["dvv"] = j.dvv;
        return d;
      },
      py::arg("program"), py::arg("u") = 0.0, py::arg("v") = 0.0, py::arg("t") = 0.0);

  // scenes and the verification battery
  m.def(
      "run_scene",
      [](const std::string& text, std::optional<std::uint64_t> seed_override) {
        const Scene scene = Scene::parse(text);
        SceneOptions o;
        o.seed_override = seed_override;
        SceneResult r;
        {
          py::gil_scoped_release release;
          r = scene.run(o);
        }
        py::dict d;
        d["passed"] = r.report.passed();
        d["json"] = r.report.json();
        d["csv"] = r.report.csv();
        py::list rows;
        for (const ReportRow& row : r.report.rows) rows.append(row_dict(row));
        d["rows"] = rows;
        py::dict plots;
        for (const auto& [task, csv] : r.plots) plots[py::str(task)] = csv;
        d["plots"] = plots;
        return d;
      },
      py::arg("text"), py::arg("seed_override") = py::none());
  m.def("catalog", [](bool as_json) { return as_json ? catalog_json() : catalog_text(); }, py::arg("json") = false);
  m.def("criterion_count", &criterion_count);
  m.def("criterion_key", &criterion_key, py::arg("id"));
  m.def(
      "run_criterion",
      [](int id, std::uint64_t seed, double scale) {
        BatteryOptions o = BatteryOptions{}.scaled(scale);
        o.seed = seed;
        CriterionResult c;
        {
          py::gil_scoped_release release;
          c = run_criterion(id, o);
        }
        py::list rows;
        for (const ReportRow& row : c.rows) rows.append(row_dict(row));
        return rows;
      },
      py::arg("id"), py::arg("seed") = 20240917, py::arg("scale") = 1.0);
}
