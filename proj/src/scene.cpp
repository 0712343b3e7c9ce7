#include "schlafli/scene.hpp"

#include <algorithm>
#include <chrono>
#include <cctype>
#include <cmath>
#include <cstring>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "schlafli/error.hpp"
#include "schlafli/exprlang.hpp"
#include "schlafli/functionals.hpp"
#include "schlafli/integral_geom.hpp"
#include "schlafli/polyhedra.hpp"
#include "schlafli/rng.hpp"
#include "schlafli/surfaces.hpp"

namespace schlafli {

using nlohmann::json;
using Eigen::Vector3d;

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Pos {
  int line = 0, column = 0;
};

Pos position_of(std::string_view text, std::size_t offset) {
  Pos p{1, 1};
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++p.line;
      p.column = 1;
    } else {
      ++p.column;
    }
  }
  return p;
}

/// JSON pointer -> position of the value, for text that already parsed.
class Locator {
 public:
  explicit Locator(std::string_view text) : text_(text) {
    skip();
    value("");
  }
  Pos at(const std::string& pointer) const {
    auto it = map_.find(pointer);
    return it == map_.end() ? Pos{} : it->second;
  }

 private:
  void skip() {
    while (i_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[i_]))) ++i_;
  }
  std::string string() {
    std::string out;
    ++i_;
    while (i_ < text_.size() && text_[i_] != '"') {
      if (text_[i_] == '\\') ++i_;
      out += text_[i_++];
    }
    ++i_;
    return out;
  }
  static std::string escape(const std::string& key) {
    std::string out;
    for (char c : key) out += c == '~' ? "~0" : c == '/' ? "~1" : std::string(1, c);
    return out;
  }
  void value(const std::string& ptr) {
    map_[ptr] = position_of(text_, i_);
    if (i_ >= text_.size()) return;
    const char c = text_[i_];
    if (c == '{') {
      ++i_;
      skip();
      while (i_ < text_.size() && text_[i_] != '}') {
        const std::string key = string();
        skip();
        ++i_;  // ':'
        skip();
        value(ptr + "/" + escape(key));
        skip();
        if (text_[i_] == ',') ++i_;
        skip();
      }
      ++i_;
    } else if (c == '[') {
      ++i_;
      skip();
      for (int k = 0; i_ < text_.size() && text_[i_] != ']'; ++k) {
        value(ptr + "/" + std::to_string(k));
        skip();
        if (text_[i_] == ',') ++i_;
        skip();
      }
      ++i_;
    } else if (c == '"') {
      string();
    } else {
      while (i_ < text_.size() && !std::strchr(",]} \t\r\n", text_[i_])) ++i_;
    }
  }

  std::string_view text_;
  std::size_t i_ = 0;
  std::map<std::string, Pos> map_;
};

// --- catalog --------------------------------------------------------------------------

enum class Kind { surface, polyhedron, foliation, warp };

const char* kind_name(Kind k) {
  switch (k) {
    case Kind::surface: return "surface";
    case Kind::polyhedron: return "polyhedron";
    case Kind::foliation: return "foliation";
    case Kind::warp: return "warp";
  }
  return "?";
}

struct ParamSpec {
  const char* name;
  const char* type;  // number, integer, string, vector3, object, interval, points, index-lists
  const char* fallback;  // nullptr when required
  const char* doc;
};

struct ObjectSpec {
  const char* type;
  Kind kind;
  const char* spaces;
  const char* doc;
  std::vector<ParamSpec> params;
};

const std::vector<ObjectSpec>& object_catalog() {
  static const std::vector<ObjectSpec> catalog{
      {"sphere", Kind::surface, "E3 S3 H3", "geodesic sphere of radius radius + rate * t",
       {{"radius", "number", nullptr, "radius at t = 0"},
        {"rate", "number", "0", "dr/dt"},
        {"center", "vector3", "[0,0,0]", "center in normal coordinates"}}},
      {"ellipsoid-radial", Kind::surface, "E3 S3 H3",
       "radial graph rho = s(t) / sqrt(sum omega_i^2 / a_i^2), s(t) = 1 + rate * t",
       {{"a", "number", nullptr, "semi-axis"},
        {"b", "number", nullptr, "semi-axis"},
        {"c", "number", nullptr, "semi-axis"},
        {"rate", "number", "0", "scale rate"}}},
      {"perturbed-sphere", Kind::surface, "E3 S3 H3", "sphere with a smooth low-degree radial perturbation",
       {{"radius", "number", nullptr, "mean radius"},
        {"amplitude", "number", nullptr, "relative perturbation size"},
        {"shape", "integer", "1", "selects the perturbation"}}},
      {"expr", Kind::surface, "E3 S3 H3 dS3", "surface family given by an exprlang program in u, v, t",
       {{"program", "string", nullptr, "exprlang source"},
        {"mode", "string", "\"radial\"", "radial | normal | ambient"},
        {"params", "object", "{}", "named constants"},
        {"u", "interval", "[0,pi]", "u range (normal and ambient modes)"},
        {"v", "interval", "[0,2pi]", "v range (normal and ambient modes)"}}},
      {"torus", Kind::surface, "E3", "torus of revolution",
       {{"R", "number", nullptr, "center-line radius"}, {"r", "number", nullptr, "tube radius"}}},
      {"plane", Kind::surface, "E3", "flat square patch", {}},
      {"de-sitter-slice", Kind::surface, "dS3", "space-like slice x0 = s0 + rate * t (+ amplitude bump)",
       {{"s0", "number", nullptr, "height at t = 0"},
        {"rate", "number", "1", "ds/dt"},
        {"amplitude", "number", "0", "bump amplitude"}}},
      {"cube", Kind::polyhedron, "E3", "axis-aligned cube", {{"edge", "number", "1", "edge length"}}},
      {"regular-tetrahedron", Kind::polyhedron, "E3", "regular tetrahedron",
       {{"edge", "number", "1", "edge length"}}},
      {"corner-tetrahedron", Kind::polyhedron, "E3 S3 H3",
       "tetrahedron spanned by the origin and three orthogonal geodesics",
       {{"length", "number", "1", "leg length"}}},
      {"steffen", Kind::polyhedron, "E3", "Steffen's flexible polyhedron (9 vertices, 14 triangles)", {}},
      {"polyhedron", Kind::polyhedron, "E3 S3 H3", "explicit polyhedron, ambient vertex coordinates",
       {{"vertices", "points", nullptr, "ambient coordinates"},
        {"facets", "index-lists", nullptr, "vertex cycles"}}},
      {"ball-foliation", Kind::foliation, "E3 S3 H3", "ball swept by concentric spheres",
       {{"radius", "number", nullptr, "ball radius"}}},
      {"shell-foliation", Kind::foliation, "E3 S3 H3", "shell swept by concentric spheres",
       {{"inner", "number", nullptr, "inner radius"}, {"outer", "number", nullptr, "outer radius"}}},
      {"great-spheres", Kind::foliation, "S3", "rotating great spheres (minimal leaves)",
       {{"angle", "number", nullptr, "rotation angle"}}},
      {"warp", Kind::warp, "any", "warped product dt^2 + f(t)^2 g0 over a base of curvature k",
       {{"name", "string", "none", "sphere | cone | hyperbolic; otherwise give the fields below"},
        {"program", "string", "none", "f(t) in exprlang"},
        {"k", "number", "none", "base curvature"},
        {"k_prime", "number", "none", "Einstein constant"},
        {"t0", "number", "0", "interval start"},
        {"t1", "number", "1", "interval end"}}},
  };
  return catalog;
}

struct TaskSpec {
  const char* type;
  const char* kinds;
  bool stochastic;
  std::vector<ParamSpec> params;
};

const std::vector<TaskSpec>& task_catalog() {
  static const std::vector<TaskSpec> catalog{
      {"verify-schlafli", "surface polyhedron", false,
       {{"object", "string", nullptr, "object id"},
        {"t", "number", "0 (surface), 0.5 (polyhedron; path defined on [0, 1])", "time"},
        {"h", "number", "1e-3 (surface), 1e-4 (polyhedron)", "difference step"},
        {"velocities", "points", "none", "vertex velocities in normal coordinates (polyhedra)"},
        {"speed", "number", "0.1", "scale of random velocities (polyhedra without velocities)"},
        {"seed", "integer", "none", "required for random velocities"},
        {"tolerance", "number", "1e-5", "absolute"}}},
      {"volume", "surface polyhedron", false,
       {{"object", "string", nullptr, "object id"},
        {"method", "string", "\"quadrature\"", "quadrature | mc (quadrature: surfaces and tetrahedra)"},
        {"samples", "integer", "200000", "mc samples"},
        {"seed", "integer", "none", "required for mc"},
        {"expected", "number", "closed form for spheres", "oracle"},
        {"tolerance", "number", "1e-8 (quadrature), 4 (mc, in standard errors)", ""}}},
      {"steiner", "surface", true,
       {{"object", "string", nullptr, "convex surface in E3 or H3"},
        {"eps", "number-list", "[0.1,0.3,0.5]", "neighbourhood radii"},
        {"samples", "integer", "40000", "mc samples per radius"},
        {"seed", "integer", nullptr, ""},
        {"tolerance", "number", "4", "in standard errors"}}},
      {"crofton", "surface", true,
       {{"object", "string", nullptr, "convex surface in E3"},
        {"samples", "integer", "1000000", "mc samples"},
        {"seed", "integer", nullptr, ""},
        {"tolerance", "number", "4", "in standard errors"}}},
      {"alexandrov", "surface", false,
       {{"objects", "string-list", nullptr, "convex surface ids"},
        {"expect_equality", "boolean-list", "none", "expected equality flag per object"},
        {"tolerance", "number", "1e-8", "allowed negative gap"}}},
      {"foliation", "foliation", false,
       {{"object", "string", nullptr, "foliation id"}, {"tolerance", "number", "1e-5", "absolute"}}},
      {"flex", "polyhedron", false,
       {{"object", "string", nullptr, "flexible polyhedron id"},
        {"steps", "integer", "50", "continuation steps"},
        {"step", "number", "0.01", "step size"},
        {"drift_tolerance", "number", "1e-9", "edge-length drift"},
        {"tolerance", "number", "1e-6", "relative total mean curvature variation"}}},
      {"warped", "warp", false,
       {{"object", "string", nullptr, "warp id"},
        {"samples", "integer", "200", "interior grid points"},
        {"tolerance", "number", "1e-10", "absolute"}}},
      {"full-battery", "", true,
       {{"seed", "integer", nullptr, ""}, {"scale", "number", "1", "multiplies every sample count"}}},
  };
  return catalog;
}

// --- parsed scene ---------------------------------------------------------------------------

struct Object {
  std::string id, type;
  Kind kind;
  std::optional<SurfaceFamily> family;
  std::optional<Polyhedron> poly;
  std::optional<FoliationSpec> foliation;
  std::optional<WarpedProductSpec> warp;
  bool sphere = false;
  double radius = 0.0, rate = 0.0;
};

struct Task {
  std::string id, type;
  json spec;
  std::vector<const Object*> objects;
  std::optional<std::uint64_t> seed;
};

}  // namespace

struct Scene::Impl {
  std::string text;
  SpaceForm space{3, 0.0};
  std::vector<std::unique_ptr<Object>> objects;
  std::vector<Task> tasks;
};

namespace {

class Parser {
 public:
  Parser(std::string_view text, const json& root) : text_(text), root_(root), loc_(text) {}

  [[noreturn]] void fail(const std::string& pointer, const std::string& what) const {
    const Pos p = loc_.at(pointer);
    throw Error(ErrorKind::SceneError,
                std::to_string(p.line) + ":" + std::to_string(p.column) + ": " + what, p.line, p.column);
  }

  const json& need(const json& obj, const std::string& ptr, const char* key) const {
    if (!obj.is_object()) fail(ptr, "expected an object");
    if (!obj.contains(key)) fail(ptr, std::string("missing field '") + key + "'");
    return obj.at(key);
  }

  double number(const json& obj, const std::string& ptr, const char* key, std::optional<double> fallback) const {
    if (!obj.contains(key)) {
      if (!fallback) fail(ptr, std::string("missing field '") + key + "'");
      return *fallback;
    }
    const json& v = obj.at(key);
    if (!v.is_number()) fail(ptr + "/" + key, std::string("'") + key + "' must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(ptr + "/" + key, std::string("'") + key + "' must be finite");
    return x;
  }

  long integer(const json& obj, const std::string& ptr, const char* key, std::optional<long> fallback) const {
    if (!obj.contains(key)) {
      if (!fallback) fail(ptr, std::string("missing field '") + key + "'");
      return *fallback;
    }
    const json& v = obj.at(key);
    if (!v.is_number_integer()) fail(ptr + "/" + key, std::string("'") + key + "' must be an integer");
    return v.get<long>();
  }

  std::string string(const json& obj, const std::string& ptr, const char* key,
                     std::optional<std::string> fallback) const {
    if (!obj.contains(key)) {
      if (!fallback) fail(ptr, std::string("missing field '") + key + "'");
      return *fallback;
    }
    const json& v = obj.at(key);
    if (!v.is_string()) fail(ptr + "/" + key, std::string("'") + key + "' must be a string");
    return v.get<std::string>();
  }

  std::vector<std::vector<double>> points(const json& v, const std::string& ptr, int width) const {
    if (!v.is_array()) fail(ptr, "expected an array of coordinate lists");
    std::vector<std::vector<double>> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const std::string p = ptr + "/" + std::to_string(i);
      if (!v[i].is_array() || (width > 0 && static_cast<int>(v[i].size()) != width))
        fail(p, width > 0 ? "expected " + std::to_string(width) + " coordinates" : "expected a coordinate list");
      std::vector<double> row;
      for (std::size_t k = 0; k < v[i].size(); ++k) {
        if (!v[i][k].is_number()) fail(p + "/" + std::to_string(k), "expected a number");
        row.push_back(v[i][k].get<double>());
      }
      out.push_back(std::move(row));
    }
    return out;
  }

  void check_keys(const json& obj, const std::string& ptr, const std::vector<ParamSpec>& params,
                  std::initializer_list<const char*> extra) const {
    for (const auto& [key, value] : obj.items()) {
      const bool known = std::any_of(params.begin(), params.end(), [&](const ParamSpec& p) { return key == p.name; }) ||
                         std::any_of(extra.begin(), extra.end(), [&](const char* e) { return key == e; });
      if (!known) fail(ptr + "/" + key, "unknown field '" + key + "'");
    }
  }

  SpaceForm space() const {
    if (!root_.contains("space")) fail("", "missing field 'space'");
    const json& s = root_.at("space");
    if (s.is_string()) {
      const std::string name = s.get<std::string>();
      if (name == "E3") return SpaceForm::euclidean();
      if (name == "S3") return SpaceForm::sphere();
      if (name == "H3") return SpaceForm::hyperbolic();
      if (name == "dS3") return SpaceForm::de_sitter();
      fail("/space", "unknown space '" + name + "' (E3, S3, H3, dS3 or {\"K\": ..., \"signature\": ...})");
    }
    if (!s.is_object()) fail("/space", "space must be a name or an object");
    check_keys(s, "/space", {}, {"K", "dim", "signature"});
    const double K = number(s, "/space", "K", std::nullopt);
    const long dim = integer(s, "/space", "dim", 3);
    if (dim != 3) fail("/space/dim", "only dim = 3 is supported by scene files");
    const std::string sig = string(s, "/space", "signature", "riemannian");
    if (sig != "riemannian" && sig != "lorentzian") fail("/space/signature", "signature must be riemannian or lorentzian");
    try {
      return SpaceForm(3, K, sig == "lorentzian" ? Signature::lorentzian : Signature::riemannian);
    } catch (const Error& e) {
      fail("/space", e.what());
    }
  }

  std::unique_ptr<Object> object(const SpaceForm& sp, const json& j, const std::string& ptr) const {
    auto obj = std::make_unique<Object>();
    obj->id = string(j, ptr, "id", std::nullopt);
    obj->type = string(j, ptr, "type", std::nullopt);
    const auto& cat = object_catalog();
    auto it = std::find_if(cat.begin(), cat.end(), [&](const ObjectSpec& s) { return obj->type == s.type; });
    if (it == cat.end()) fail(ptr + "/type", "unknown object type '" + obj->type + "' (see `catalog`)");
    check_keys(j, ptr, it->params, {"id", "type"});
    obj->kind = it->kind;
    const std::string spaces = it->spaces;
    if (spaces != "any" && (" " + spaces + " ").find(" " + sp.name() + " ") == std::string::npos)
      fail(ptr + "/type", "'" + obj->type + "' is not available in " + sp.name() + " (available: " + spaces + ")");
    const std::string& t = obj->type;
    auto num = [&](const char* key, std::optional<double> fb = std::nullopt) { return number(j, ptr, key, fb); };
    auto positive = [&](const char* key, std::optional<double> fb = std::nullopt) {
      const double x = num(key, fb);
      if (!(x > 0)) fail(j.contains(key) ? ptr + "/" + key : ptr, std::string("'") + key + "' must be positive");
      return x;
    };
    try {
      if (t == "sphere") {
        obj->radius = positive("radius");
        obj->rate = num("rate", 0.0);
        Vector3d c = Vector3d::Zero();
        if (j.contains("center")) {
          const auto p = points(json::array({j.at("center")}), ptr + "/center", 3);
          c = Vector3d(p[0][0], p[0][1], p[0][2]);
        }
        obj->family = sphere_family(sp, obj->radius, obj->rate, c);
        obj->sphere = true;
      } else if (t == "ellipsoid-radial") {
        obj->family = ellipsoid_radial(sp, positive("a"), positive("b"), positive("c"), num("rate", 0.0));
      } else if (t == "perturbed-sphere") {
        obj->family = perturbed_sphere(sp, positive("radius"), num("amplitude"),
                                       static_cast<std::uint64_t>(integer(j, ptr, "shape", 1)));
      } else if (t == "expr") {
        const std::string mode = string(j, ptr, "mode", "radial");
        ChartMode cm;
        if (mode == "radial") cm = ChartMode::radial;
        else if (mode == "normal") cm = ChartMode::normal;
        else if (mode == "ambient") cm = ChartMode::ambient;
        else fail(ptr + "/mode", "mode must be radial, normal or ambient");
        ParamMap params;
        std::vector<std::string> names;
        if (j.contains("params")) {
          const json& pj = j.at("params");
          if (!pj.is_object()) fail(ptr + "/params", "params must be an object of numbers");
          for (const auto& [k, v] : pj.items()) {
            if (!v.is_number()) fail(ptr + "/params/" + k, "parameter values must be numbers");
            params[k] = v.get<double>();
            names.push_back(k);
          }
        }
        std::optional<ChartDomain> domain;
        if (j.contains("u") || j.contains("v")) {
          if (cm == ChartMode::radial) fail(ptr, "radial programs use the sphere chart; drop 'u' and 'v'");
          auto interval = [&](const char* key, double lo, double hi) {
            if (!j.contains(key)) return std::pair{lo, hi};
            const auto p = points(json::array({j.at(key)}), ptr + "/" + key, 2);
            if (!(p[0][1] > p[0][0])) fail(ptr + "/" + key, "interval must be increasing");
            return std::pair{p[0][0], p[0][1]};
          };
          ChartDomain d;
          std::tie(d.u0, d.u1) = interval("u", 0.0, kPi);
          std::tie(d.v0, d.v1) = interval("v", 0.0, 2 * kPi);
          domain = d;
        }
        ExprProgram prog;
        try {
          prog = ExprProgram::parse(string(j, ptr, "program", std::nullopt), names);
        } catch (const Error& e) {
          fail(ptr + "/program", std::string("program: ") + e.what());
        }
        obj->family = expr_family(sp, prog, cm, params, domain);
      } else if (t == "torus") {
        obj->family = torus(positive("R"), positive("r"));
      } else if (t == "plane") {
        obj->family = plane_patch();
        obj->sphere = true;
      } else if (t == "de-sitter-slice") {
        obj->family = de_sitter_slice(sp, num("s0"), num("rate", 1.0), num("amplitude", 0.0));
      } else if (t == "cube") {
        obj->poly = cube(positive("edge", 1.0));
      } else if (t == "regular-tetrahedron") {
        obj->poly = regular_tetrahedron(positive("edge", 1.0));
      } else if (t == "corner-tetrahedron") {
        obj->poly = corner_tetrahedron(sp, positive("length", 1.0));
      } else if (t == "steffen") {
        obj->poly = steffen();
      } else if (t == "polyhedron") {
        const auto v = points(need(j, ptr, "vertices"), ptr + "/vertices", sp.ambient_dim());
        std::vector<AmbientPoint> verts;
        for (const auto& row : v) verts.emplace_back(Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(row.data(), sp.ambient_dim())));
        const json& fj = need(j, ptr, "facets");
        std::vector<std::vector<int>> facets;
        if (!fj.is_array()) fail(ptr + "/facets", "expected an array of vertex index lists");
        for (std::size_t i = 0; i < fj.size(); ++i) {
          const std::string p = ptr + "/facets/" + std::to_string(i);
          if (!fj[i].is_array() || fj[i].size() < 3) fail(p, "a facet needs at least three vertex indices");
          std::vector<int> f;
          for (const json& x : fj[i]) {
            if (!x.is_number_integer() || x.get<long>() < 0 || x.get<long>() >= static_cast<long>(verts.size()))
              fail(p, "vertex index out of range");
            f.push_back(x.get<int>());
          }
          facets.push_back(std::move(f));
        }
        obj->poly = Polyhedron(sp, verts, facets);
      } else if (t == "ball-foliation") {
        obj->foliation = concentric_ball_foliation(sp, positive("radius"));
      } else if (t == "shell-foliation") {
        obj->foliation = concentric_shell_foliation(sp, positive("inner"), positive("outer"));
      } else if (t == "great-spheres") {
        obj->foliation = rotating_great_spheres(sp, positive("angle"));
      } else if (t == "warp") {
        WarpedProductSpec w;
        if (j.contains("name")) {
          if (j.contains("program") || j.contains("k") || j.contains("k_prime"))
            fail(ptr, "give either 'name' or 'program', 'k' and 'k_prime'");
          w = warp_catalog(string(j, ptr, "name", std::nullopt));
        } else {
          try {
            w.warp = ExprProgram::parse(string(j, ptr, "program", std::nullopt));
          } catch (const Error& e) {
            fail(ptr + "/program", std::string("program: ") + e.what());
          }
          w.k = num("k");
          w.k_prime = num("k_prime");
        }
        w.t0 = num("t0", w.t0);
        w.t1 = num("t1", w.t1);
        if (!(w.t1 > w.t0)) fail(ptr, "need t0 < t1");
        obj->warp = w;
      }
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::SceneError && e.line() > 0) throw;
      fail(ptr, obj->type + ": " + e.what());
    }
    return obj;
  }

  std::shared_ptr<Scene::Impl> scene() const {
    auto impl = std::make_shared<Scene::Impl>();
    impl->text = std::string(text_);
    if (!root_.is_object()) fail("", "scene must be a JSON object");
    check_keys(root_, "", {}, {"schema", "space", "objects", "tasks", "description"});
    if (!root_.contains("schema")) fail("", "missing field 'schema'");
    if (root_.at("schema") != 1) fail("/schema", "unsupported schema (expected 1)");
    impl->space = space();

    std::map<std::string, const Object*> ids;
    if (root_.contains("objects")) {
      const json& objs = root_.at("objects");
      if (!objs.is_array()) fail("/objects", "objects must be an array");
      for (std::size_t i = 0; i < objs.size(); ++i) {
        const std::string ptr = "/objects/" + std::to_string(i);
        auto obj = object(impl->space, objs[i], ptr);
        if (ids.count(obj->id)) fail(ptr + "/id", "duplicate id '" + obj->id + "'");
        ids[obj->id] = obj.get();
        impl->objects.push_back(std::move(obj));
      }
    }

    if (!root_.contains("tasks")) fail("", "missing field 'tasks'");
    const json& tasks = root_.at("tasks");
    if (!tasks.is_array()) fail("/tasks", "tasks must be an array");
    std::set<std::string> task_ids;
    for (std::size_t i = 0; i < tasks.size(); ++i) {
      const std::string ptr = "/tasks/" + std::to_string(i);
      const json& j = tasks[i];
      Task task;
      task.type = string(j, ptr, "type", std::nullopt);
      const auto& cat = task_catalog();
      auto it = std::find_if(cat.begin(), cat.end(), [&](const TaskSpec& s) { return task.type == s.type; });
      if (it == cat.end()) fail(ptr + "/type", "unknown task type '" + task.type + "'");
      check_keys(j, ptr, it->params, {"id", "type"});
      task.id = string(j, ptr, "id", task.type + "-" + std::to_string(i + 1));
      if (!task_ids.insert(task.id).second) fail(ptr, "duplicate task id '" + task.id + "'");
      task.spec = j;

      auto resolve = [&](const json& ref, const std::string& p) {
        if (!ref.is_string()) fail(p, "expected an object id");
        auto f = ids.find(ref.get<std::string>());
        if (f == ids.end()) fail(p, "unknown object id '" + ref.get<std::string>() + "'");
        const std::string kinds = std::string(" ") + it->kinds + " ";
        if (kinds.find(std::string(" ") + kind_name(f->second->kind) + " ") == std::string::npos)
          fail(p, "task '" + task.type + "' does not accept a " + kind_name(f->second->kind));
        task.objects.push_back(f->second);
      };
      if (task.type == "alexandrov") {
        const json& list = need(j, ptr, "objects");
        if (!list.is_array() || list.empty()) fail(ptr + "/objects", "expected a non-empty list of ids");
        for (std::size_t k = 0; k < list.size(); ++k) resolve(list[k], ptr + "/objects/" + std::to_string(k));
        if (j.contains("expect_equality")) {
          const json& e = j.at("expect_equality");
          if (!e.is_array() || e.size() != list.size() ||
              !std::all_of(e.begin(), e.end(), [](const json& x) { return x.is_boolean(); }))
            fail(ptr + "/expect_equality", "expected one boolean per object");
        }
      } else if (task.type != "full-battery") {
        resolve(need(j, ptr, "object"), ptr + "/object");
      }

      if (j.contains("seed")) {
        if (!j.at("seed").is_number_unsigned()) fail(ptr + "/seed", "seed must be a non-negative integer");
        task.seed = j.at("seed").get<std::uint64_t>();
      }
      const bool random_velocities =
          task.type == "verify-schlafli" && task.objects[0]->kind == Kind::polyhedron && !j.contains("velocities");
      const bool mc_volume = task.type == "volume" && string(j, ptr, "method", "quadrature") == "mc";
      if ((it->stochastic || random_velocities || mc_volume) && !task.seed)
        fail(ptr, "task '" + task.id + "' is stochastic and needs an explicit 'seed'");
      if (task.type == "volume") {
        const std::string m = string(j, ptr, "method", "quadrature");
        if (m != "quadrature" && m != "mc") fail(ptr + "/method", "method must be quadrature or mc");
        if (!j.contains("expected") && !task.objects[0]->sphere)
          fail(ptr, "volume task on '" + task.objects[0]->id + "' needs an 'expected' value");
        if (task.objects[0]->type == "plane") fail(ptr + "/object", "a plane bounds no volume");
        if (m == "quadrature" && task.objects[0]->poly && !task.objects[0]->poly->is_simplex())
          fail(ptr + "/method", "quadrature volume applies to tetrahedra; use \"mc\"");
      }
      if (task.type == "verify-schlafli" && j.contains("velocities")) {
        const Object* o = task.objects[0];
        if (o->kind != Kind::polyhedron) fail(ptr + "/velocities", "velocities apply to polyhedra only");
        if (points(j.at("velocities"), ptr + "/velocities", 3).size() != o->poly->vertices().size())
          fail(ptr + "/velocities", "need one velocity per vertex");
      }
      for (const char* key : {"tolerance", "drift_tolerance", "t", "h", "speed", "step", "scale", "expected"})
        if (j.contains(key)) number(j, ptr, key, std::nullopt);
      for (const char* key : {"samples", "steps"})
        if (j.contains(key) && integer(j, ptr, key, std::nullopt) <= 0) fail(ptr + "/" + key, "must be positive");
      if (j.contains("eps")) {
        const json& e = j.at("eps");
        if (!e.is_array() || e.empty() ||
            !std::all_of(e.begin(), e.end(), [](const json& x) { return x.is_number() && x.get<double>() > 0; }))
          fail(ptr + "/eps", "eps must be a non-empty list of positive numbers");
      }
      impl->tasks.push_back(std::move(task));
    }
    return impl;
  }

 private:
  std::string_view text_;
  const json& root_;
  Locator loc_;
};

// --- task execution ------------------------------------------------------------------------

class Runner {
 public:
  Runner(const SpaceForm& space, const SceneOptions& options) : space_(space), options_(options) {}

  void run(const Task& task, SceneResult& out) {
    std::vector<ReportRow> rows;
    std::string plot;
    const auto start = std::chrono::steady_clock::now();
    const std::string obj = task.objects.empty() ? task.id : task.objects[0]->id;
    try {
      if (task.type == "verify-schlafli") verify(task, rows);
      else if (task.type == "volume") volume(task, rows);
      else if (task.type == "steiner") steiner(task, rows, plot);
      else if (task.type == "crofton") crofton(task, rows);
      else if (task.type == "alexandrov") alexandrov(task, rows, plot);
      else if (task.type == "foliation") foliation(task, rows);
      else if (task.type == "flex") flex(task, rows, plot);
      else if (task.type == "warped") warped(task, rows);
      else if (task.type == "full-battery") battery(task, rows);
    } catch (const Error& e) {
      rows.push_back(error_row(obj, e.what()));
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    for (ReportRow& r : rows) {
      if (r.task.empty()) r.task = task.id;
      else r.task = task.id + ":" + r.task;
      r.wall_time = wall / static_cast<double>(rows.size());
    }
    out.report.rows.insert(out.report.rows.end(), rows.begin(), rows.end());
    if (!plot.empty()) out.plots.emplace_back(task.id, plot);
  }

 private:
  static double num(const Task& t, const char* key, double fallback) { return t.spec.value(key, fallback); }
  static long integer(const Task& t, const char* key, long fallback) { return t.spec.value(key, fallback); }

  std::uint64_t seed(const Task& t) const {
    if (options_.seed_override) return *options_.seed_override;
    return t.seed.value_or(0);
  }
  std::optional<std::uint64_t> seed_field(const Task& t) const {
    if (t.seed || options_.seed_override) return seed(t);
    return std::nullopt;
  }

  void verify(const Task& task, std::vector<ReportRow>& rows) const {
    const Object& o = *task.objects[0];
    const double t = num(task, "t", o.kind == Kind::polyhedron ? 0.5 : 0.0), tol = num(task, "tolerance", 1e-5);
    if (o.kind == Kind::surface) {
      const SchlafliReport r = schlafli_residual_smooth(*o.family, t, num(task, "h", 1e-3));
      rows.push_back(value_row(o.id, "eps m K V' vs int H' + 1/2 int <I', II>", r.lhs, r.rhs, tol, r.error_budget));
      return;
    }
    std::vector<Vector3d> vel;
    if (task.spec.contains("velocities")) {
      for (const json& v : task.spec.at("velocities")) vel.emplace_back(v[0].get<double>(), v[1].get<double>(), v[2].get<double>());
    } else {
      Rng rng(seed(task), 0);
      const double speed = num(task, "speed", 0.1);
      for (std::size_t i = 0; i < o.poly->vertices().size(); ++i)
        vel.emplace_back(speed * rng.normal(), speed * rng.normal(), speed * rng.normal());
    }
    const PolySchlafli r = schlafli_residual_poly(vertex_velocity_path(*o.poly, vel), t, num(task, "h", 1e-4));
    rows.push_back(value_row(o.id, "m K V' vs sum W dtheta", r.lhs, r.rhs, tol, r.error_budget, seed_field(task)));
  }

  void volume(const Task& task, std::vector<ReportRow>& rows) const {
    const Object& o = *task.objects[0];
    const bool mc = task.spec.value("method", std::string("quadrature")) == "mc";
    const double tol = num(task, "tolerance", mc ? 4.0 : 1e-8);
    const long samples = integer(task, "samples", 200000);
    double oracle = 0.0;
    if (task.spec.contains("expected")) {
      oracle = task.spec.at("expected").get<double>();
    } else if (o.type == "sphere") {
      oracle = ball_volume_closed(space_, o.radius);
    } else {
      oracle = 0.0;  // plane: rejected at parse time
    }
    double value = 0.0, sigma = 0.0;
    if (o.kind == Kind::polyhedron) {
      PolyVolumeOptions vo;
      vo.method = mc ? PolyVolumeMethod::mc : PolyVolumeMethod::quadrature;
      vo.samples = samples;
      vo.seed = seed(task);
      const PolyVolume v = poly_volume(*o.poly, vo);
      value = v.value;
      sigma = v.error_bound;
    } else {
      VolumeOptions vo;
      vo.method = mc ? VolumeMethod::mc : VolumeMethod::radial;
      vo.samples = samples;
      vo.seed = seed(task);
      const VolumeResult v = enclosed_volume(at_time(*o.family, 0.0), vo);
      value = v.value;
      sigma = v.error_bound;
    }
    if (mc) rows.push_back(value_row(o.id, "volume (mc)", value, oracle, tol * sigma, 0.0, seed_field(task)));
    else rows.push_back(value_row(o.id, "volume", value, oracle, tol));
  }

  void steiner(const Task& task, std::vector<ReportRow>& rows, std::string& plot) const {
    const Object& o = *task.objects[0];
    const ConvexBody body = make_convex_body(at_time(*o.family, 0.0));
    std::vector<double> eps{0.1, 0.3, 0.5};
    if (task.spec.contains("eps")) eps = task.spec.at("eps").get<std::vector<double>>();
    const double sigmas = num(task, "tolerance", 4.0);
    const long samples = integer(task, "samples", 40000);
    std::optional<SteinerData> poly;
    if (space_.model() == Model::euclidean) poly = steiner_from_curvature(body);
    else if (space_.model() != Model::hyperbolic || space_.curvature() != -1.0)
      throw Error(ErrorKind::EstimateUnavailable, "neighbourhood volumes are predicted in E3 and H3 (K = -1) only");
    std::ostringstream csv;
    csv << "eps,predicted,mc,std_error\n";
    for (std::size_t k = 0; k < eps.size(); ++k) {
      const std::uint64_t s = splitmix64(seed(task) + k);
      const double predicted = poly ? poly->eval(eps[k]) : tube_growth_h3(body, eps[k]);
      const McEstimate e = eps_volume_direct(body, eps[k], samples, s);
      char label[64];
      std::snprintf(label, sizeof label, "V_eps at %.17g", eps[k]);
      rows.push_back(value_row(o.id, label, e.value, predicted, sigmas * e.std_error, 0.0, s));
      char line[160];
      std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g,%.17g\n", eps[k], predicted, e.value, e.std_error);
      csv << line;
    }
    plot = csv.str();
  }

  void crofton(const Task& task, std::vector<ReportRow>& rows) const {
    const Object& o = *task.objects[0];
    if (space_.model() != Model::euclidean)
      throw Error(ErrorKind::EstimateUnavailable, "Crofton sampling is implemented in E3");
    const ConvexBody body = make_convex_body(at_time(*o.family, 0.0));
    const double sigmas = num(task, "tolerance", 4.0);
    const long samples = integer(task, "samples", 1000000);
    const std::uint64_t s = seed(task);
    const McEstimate p1 = crofton_lines_mc(body, samples, s);
    rows.push_back(value_row(o.id, "P1 (lines) vs pi/2 A", p1.value, 0.5 * kPi * body.area, sigmas * p1.std_error, 0.0, s));
    const McEstimate p2 = crofton_planes_mc(body, samples, splitmix64(s));
    rows.push_back(value_row(o.id, "P2 (planes) vs M/2", p2.value, 0.5 * body.mean_integral, sigmas * p2.std_error, 0.0,
                             splitmix64(s)));
  }

  void alexandrov(const Task& task, std::vector<ReportRow>& rows, std::string& plot) const {
    const double tol = num(task, "tolerance", 1e-8);
    std::ostringstream csv;
    csv << "object,area,sphere_radius,p2_surface,p2_sphere,difference,umbilic_gap\n";
    for (std::size_t k = 0; k < task.objects.size(); ++k) {
      const Object& o = *task.objects[k];
      try {
        const AlexandrovReport r = alexandrov_compare(at_time(*o.family, 0.0));
        rows.push_back(lower_bound_row(o.id, "P2(sphere) - P2(S)", r.difference, 0.0, tol));
        if (task.spec.contains("expect_equality")) {
          const bool expect = task.spec.at("expect_equality")[k].get<bool>();
          rows.push_back(value_row(o.id, "equality flag", r.equality, expect, 0.0));
        }
        char line[256];
        std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.area, r.sphere_radius,
                      r.p2_surface, r.p2_sphere, r.difference, r.max_umbilic_gap);
        csv << o.id << ',' << line;
      } catch (const Error& e) {
        rows.push_back(error_row(o.id, e.what()));
      }
    }
    plot = csv.str();
  }

  void foliation(const Task& task, std::vector<ReportRow>& rows) const {
    const Object& o = *task.objects[0];
    const double tol = num(task, "tolerance", 1e-5);
    const FoliationReport r = foliation_identities(*o.foliation);
    if (!r.injective) {
      rows.push_back(lower_bound_row(o.id, "obstruction margin (minimal leaves)", r.obstruction_margin, 0.0));
      return;
    }
    rows.push_back(value_row(o.id, "m K V vs 2 int H2 + int H", r.lhs_H2, r.rhs_H2, tol));
    rows.push_back(value_row(o.id, "m K V vs int (H^2 - tr III) + int H", r.lhs_HSi, r.rhs_HSi, tol));
    rows.push_back(value_row(o.id, "m^2 K V vs int S + int H", r.lhs_S, r.rhs_S, tol));
  }

  void flex(const Task& task, std::vector<ReportRow>& rows, std::string& plot) const {
    const Object& o = *task.objects[0];
    const FlexPath path =
        flex_continuation(*o.poly, static_cast<int>(integer(task, "steps", 50)), num(task, "step", 0.01));
    rows.push_back(upper_bound_row(o.id, "max edge-length drift", path.max_edge_drift, num(task, "drift_tolerance", 1e-9)));
    const double m0 = total_mean_curvature_poly(*o.poly);
    double drift = 0.0;
    std::ostringstream csv;
    csv << "step,total_mean_curvature,displacement\n";
    for (std::size_t k = 0; k < path.states.size(); ++k) {
      const Polyhedron& p = path.states[k];
      const double m = total_mean_curvature_poly(p);
      drift = std::max(drift, std::abs(m - m0));
      double moved = 0.0;
      for (std::size_t i = 0; i < p.vertices().size(); ++i)
        moved = std::max(moved, (p.vertices()[i].coords() - o.poly->vertices()[i].coords()).norm());
      char line[128];
      std::snprintf(line, sizeof line, "%zu,%.17g,%.17g\n", k, m, moved);
      csv << line;
    }
    rows.push_back(upper_bound_row(o.id, "relative total mean curvature variation", drift / std::abs(m0),
                                   num(task, "tolerance", 1e-6)));
    plot = csv.str();
  }

  void warped(const Task& task, std::vector<ReportRow>& rows) const {
    const Object& o = *task.objects[0];
    WarpedProductSpec spec = *o.warp;
    spec.samples = static_cast<int>(integer(task, "samples", spec.samples));
    const double tol = num(task, "tolerance", 1e-10);
    const WarpedResiduals r = warped_einstein_check(spec);
    rows.push_back(value_row(o.id, "max |f'' + k' f|", r.ode, 0.0, tol));
    rows.push_back(value_row(o.id, "max |k - k' f^2 - f'^2|", r.first_integral, 0.0, tol));
  }

  void battery(const Task& task, std::vector<ReportRow>& rows) const {
    BatteryOptions o = BatteryOptions{}.scaled(num(task, "scale", 1.0));
    o.seed = seed(task);
    for (int id = 1; id <= criterion_count(); ++id) {
      const CriterionResult c = run_criterion(id, o);
      rows.insert(rows.end(), c.rows.begin(), c.rows.end());
    }
  }

  const SpaceForm& space_;
  const SceneOptions& options_;
};

}  // namespace

Scene Scene::parse(std::string_view text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    const Pos p = position_of(text, e.byte > 0 ? e.byte - 1 : 0);
    std::string what = e.what();
    if (auto k = what.find("parse error"); k != std::string::npos) what = what.substr(k);
    throw Error(ErrorKind::SceneError, std::to_string(p.line) + ":" + std::to_string(p.column) + ": " + what, p.line,
                p.column);
  }
  Scene s;
  s.impl_ = Parser(text, root).scene();
  return s;
}

const SpaceForm& Scene::space() const { return impl_->space; }

std::vector<std::string> Scene::object_ids() const {
  std::vector<std::string> out;
  for (const auto& o : impl_->objects) out.push_back(o->id);
  return out;
}

std::vector<std::string> Scene::task_ids() const {
  std::vector<std::string> out;
  for (const Task& t : impl_->tasks) out.push_back(t.id);
  return out;
}

SceneResult Scene::run(const SceneOptions& options) const {
  SceneResult out;
  Runner runner(impl_->space, options);
  for (const Task& t : impl_->tasks) runner.run(t, out);
  return out;
}

std::string catalog_text() {
  std::ostringstream out;
  out << "objects:\n";
  for (const ObjectSpec& o : object_catalog()) {
    out << "  " << o.type << "  [" << kind_name(o.kind) << "; " << o.spaces << "]  " << o.doc << "\n";
    for (const ParamSpec& p : o.params)
      out << "      " << p.name << " : " << p.type << (p.fallback ? std::string(" = ") + p.fallback : " (required)")
          << "  " << p.doc << "\n";
  }
  out << "tasks:\n";
  for (const TaskSpec& t : task_catalog()) {
    out << "  " << t.type << (t.stochastic ? "  [stochastic: seed required]" : "") << "\n";
    for (const ParamSpec& p : t.params)
      out << "      " << p.name << " : " << p.type << (p.fallback ? std::string(" = ") + p.fallback : " (required)")
          << (*p.doc ? std::string("  ") + p.doc : "") << "\n";
  }
  return out.str();
}

std::string catalog_json() {
  auto params = [](const std::vector<ParamSpec>& ps) {
    json arr = json::array();
    for (const ParamSpec& p : ps) {
      json j{{"name", p.name}, {"type", p.type}, {"required", p.fallback == nullptr}, {"doc", p.doc}};
      if (p.fallback) j["default"] = p.fallback;
      arr.push_back(std::move(j));
    }
    return arr;
  };
  json out{{"schema", 1}, {"objects", json::array()}, {"tasks", json::array()}};
  for (const ObjectSpec& o : object_catalog()) {
    json spaces = json::array();
    std::istringstream in(o.spaces);
    for (std::string s; in >> s;) spaces.push_back(s);
    out["objects"].push_back(
        {{"type", o.type}, {"kind", kind_name(o.kind)}, {"spaces", spaces}, {"doc", o.doc}, {"params", params(o.params)}});
  }
  for (const TaskSpec& t : task_catalog())
    out["tasks"].push_back({{"type", t.type}, {"stochastic", t.stochastic}, {"params", params(t.params)}});
  return out.dump(2) + "\n";
}

}  // namespace schlafli
