#include "mrock/fem2d.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <unordered_map>

#include <Eigen/SparseCore>

namespace mrock {

namespace {

std::uint64_t edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (std::uint64_t(std::uint32_t(a)) << 32) | std::uint32_t(b);
}

double cross(const Point2& a, const Point2& b) { return a.x() * b.y() - a.y() * b.x(); }

// Newest-vertex bisection with a persistent midpoint table.
class Refiner {
 public:
  explicit Refiner(Mesh& mesh) : mesh_(mesh) {}

  // Bisects every flagged triangle once. Flags of the children are set to
  // `child_flag`; returns the new flag vector.
  std::vector<char> bisect(const std::vector<char>& flagged, bool child_flag) {
    std::vector<char> out;
    std::vector<std::array<int, 3>> tris;
    std::vector<int> lev;
    tris.reserve(mesh_.triangles.size() * 2);
    for (int t = 0; t < mesh_.num_triangles(); ++t) {
      const auto [v0, v1, v2] = mesh_.triangles[t];
      if (!flagged[t]) {
        tris.push_back(mesh_.triangles[t]);
        lev.push_back(mesh_.level[t]);
        out.push_back(0);
        continue;
      }
      const int p = midpoint(v1, v2);
      tris.push_back({p, v0, v1});
      tris.push_back({p, v2, v0});
      lev.push_back(mesh_.level[t] + 1);
      lev.push_back(mesh_.level[t] + 1);
      out.push_back(child_flag);
      out.push_back(child_flag);
    }
    mesh_.triangles = std::move(tris);
    mesh_.level = std::move(lev);
    return out;
  }

  // Bisects triangles with a split edge until none is left. Flags ride along
  // so callers can follow the descendants of a marked set.
  std::vector<char> close(std::vector<char> flags) {
    for (;;) {
      std::vector<char> hanging(mesh_.triangles.size(), 0);
      bool any = false;
      for (int t = 0; t < mesh_.num_triangles(); ++t) {
        const auto& v = mesh_.triangles[t];
        for (int e = 0; e < 3; ++e) {
          if (midpoints_.count(edge_key(v[e], v[(e + 1) % 3]))) {
            hanging[t] = 1;
            any = true;
            break;
          }
        }
      }
      if (!any) return flags;
      std::vector<char> next;
      std::vector<std::array<int, 3>> tris;
      std::vector<int> lev;
      for (int t = 0; t < mesh_.num_triangles(); ++t) {
        if (!hanging[t]) {
          tris.push_back(mesh_.triangles[t]);
          lev.push_back(mesh_.level[t]);
          next.push_back(flags[t]);
          continue;
        }
        const auto [v0, v1, v2] = mesh_.triangles[t];
        const int p = midpoint(v1, v2);
        tris.push_back({p, v0, v1});
        tris.push_back({p, v2, v0});
        lev.push_back(mesh_.level[t] + 1);
        lev.push_back(mesh_.level[t] + 1);
        next.push_back(flags[t]);
        next.push_back(flags[t]);
      }
      mesh_.triangles = std::move(tris);
      mesh_.level = std::move(lev);
      flags = std::move(next);
    }
  }

 private:
  int midpoint(int a, int b) {
    const auto key = edge_key(a, b);
    auto it = midpoints_.find(key);
    if (it != midpoints_.end()) return it->second;
    const int p = mesh_.num_vertices();
    mesh_.vertices.push_back(0.5 * (mesh_.vertices[a] + mesh_.vertices[b]));
    midpoints_.emplace(key, p);
    return p;
  }

  Mesh& mesh_;
  std::unordered_map<std::uint64_t, int> midpoints_;
};

void refine(Mesh& mesh, const std::vector<char>& marked) {
  Refiner r(mesh);
  r.close(r.bisect(marked, false));
}

// Two bisections of every marked triangle, i.e. a split into four.
void refine_quad(Mesh& mesh, const std::vector<char>& marked) {
  Refiner r(mesh);
  auto children = r.close(r.bisect(marked, true));
  r.close(r.bisect(children, false));
}

void mark_boundary(Mesh& mesh) {
  std::unordered_map<std::uint64_t, int> count;
  for (const auto& v : mesh.triangles) {
    for (int e = 0; e < 3; ++e) ++count[edge_key(v[e], v[(e + 1) % 3])];
  }
  mesh.boundary.assign(mesh.vertices.size(), 0);
  for (const auto& [key, c] : count) {
    if (c != 1) continue;
    mesh.boundary[int(key >> 32)] = 1;
    mesh.boundary[int(key & 0xffffffffu)] = 1;
  }
}

struct Box {
  double lo, hi;  // same bounds in x and y
};

// Separating-axis test between a triangle and an axis-aligned square. With
// `open` the interiors must overlap, otherwise the closures may just touch.
bool triangle_meets_box(const Mesh& mesh, int t, Box box, bool open) {
  const auto& v = mesh.triangles[t];
  const std::array<Point2, 3> p{mesh.vertices[v[0]], mesh.vertices[v[1]], mesh.vertices[v[2]]};
  const std::array<Point2, 4> q{Point2(box.lo, box.lo), Point2(box.hi, box.lo), Point2(box.hi, box.hi),
                                Point2(box.lo, box.hi)};
  const double tol = 1e-12;
  auto separated = [&](const Point2& axis) {
    double a0 = 1e300, a1 = -1e300, b0 = 1e300, b1 = -1e300;
    for (const auto& x : p) {
      a0 = std::min(a0, axis.dot(x));
      a1 = std::max(a1, axis.dot(x));
    }
    for (const auto& x : q) {
      b0 = std::min(b0, axis.dot(x));
      b1 = std::max(b1, axis.dot(x));
    }
    if (open) return a1 <= b0 + tol || b1 <= a0 + tol;
    return a1 < b0 - tol || b1 < a0 - tol;
  };
  if (separated(Point2(1, 0)) || separated(Point2(0, 1))) return false;
  for (int e = 0; e < 3; ++e) {
    const Point2 d = p[(e + 1) % 3] - p[e];
    if (separated(Point2(-d.y(), d.x()))) return false;
  }
  return true;
}

double point_segment_distance(const Point2& x, const Point2& a, const Point2& b) {
  const Point2 d = b - a;
  const double len2 = d.squaredNorm();
  const double s = len2 > 0.0 ? std::clamp((x - a).dot(d) / len2, 0.0, 1.0) : 0.0;
  return (x - (a + s * d)).norm();
}

double point_triangle_distance(const Mesh& mesh, int t, const Point2& x) {
  const auto& v = mesh.triangles[t];
  const Point2& a = mesh.vertices[v[0]];
  const Point2& b = mesh.vertices[v[1]];
  const Point2& c = mesh.vertices[v[2]];
  if (cross(b - a, x - a) >= 0 && cross(c - b, x - b) >= 0 && cross(a - c, x - c) >= 0) return 0.0;
  return std::min({point_segment_distance(x, a, b), point_segment_distance(x, b, c),
                   point_segment_distance(x, c, a)});
}

// Cells [i, i+1] x [k, k+1] of an n x n grid on the unit square, kept where
// `keep(i, k)` holds, two triangles each split along the (i,k)-(i+1,k+1)
// diagonal so that matching hypotenuses pair up.
template <typename Keep>
Mesh structured_mesh(int n, Keep keep) {
  Mesh mesh;
  std::vector<int> id((n + 1) * (n + 1), -1);
  auto vertex = [&](int i, int k) {
    int& slot = id[k * (n + 1) + i];
    if (slot < 0) {
      slot = mesh.num_vertices();
      mesh.vertices.emplace_back(double(i) / n, double(k) / n);
    }
    return slot;
  };
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i) {
      if (!keep(i, k)) continue;
      const int a = vertex(i, k), b = vertex(i + 1, k), c = vertex(i + 1, k + 1), d = vertex(i, k + 1);
      mesh.triangles.push_back({b, c, a});
      mesh.triangles.push_back({d, a, c});
    }
  }
  mesh.level.assign(mesh.triangles.size(), 0);
  return mesh;
}

}  // namespace

double triangle_area(const Mesh& mesh, int t) {
  const auto& v = mesh.triangles[t];
  const Point2& a = mesh.vertices[v[0]];
  return 0.5 * cross(mesh.vertices[v[1]] - a, mesh.vertices[v[2]] - a);
}

double triangle_diameter(const Mesh& mesh, int t) {
  const auto& v = mesh.triangles[t];
  const Point2& a = mesh.vertices[v[0]];
  const Point2& b = mesh.vertices[v[1]];
  const Point2& c = mesh.vertices[v[2]];
  return std::max({(a - b).norm(), (b - c).norm(), (c - a).norm()});
}

bool is_conforming(const Mesh& mesh, std::string* why) {
  auto fail = [&](const std::string& msg) {
    if (why) *why = msg;
    return false;
  };
  const int nv = mesh.num_vertices();
  std::unordered_map<std::uint64_t, int> count;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& v = mesh.triangles[t];
    for (int k = 0; k < 3; ++k) {
      if (v[k] < 0 || v[k] >= nv) return fail("triangle " + std::to_string(t) + " has an invalid vertex index");
    }
    const double d = triangle_diameter(mesh, t);
    if (!(triangle_area(mesh, t) > 1e-14 * d * d)) {
      return fail("triangle " + std::to_string(t) + " is degenerate or clockwise");
    }
    for (int e = 0; e < 3; ++e) {
      if (++count[edge_key(v[e], v[(e + 1) % 3])] > 2) {
        return fail("edge (" + std::to_string(v[e]) + ", " + std::to_string(v[(e + 1) % 3]) +
                    ") is shared by more than two triangles");
      }
    }
  }
  // Hanging nodes from bisection sit at edge midpoints.
  std::unordered_map<std::uint64_t, int> by_position;
  auto pos_key = [](const Point2& x) {
    const auto qx = std::llround(x.x() * (1ll << 30));
    const auto qy = std::llround(x.y() * (1ll << 30));
    return std::uint64_t(qx) * 0x9E3779B97F4A7C15ull ^ std::uint64_t(qy);
  };
  for (int i = 0; i < nv; ++i) by_position.emplace(pos_key(mesh.vertices[i]), i);
  for (const auto& [key, c] : count) {
    if (c != 1) continue;
    const int a = int(key >> 32), b = int(key & 0xffffffffu);
    const Point2 mid = 0.5 * (mesh.vertices[a] + mesh.vertices[b]);
    auto it = by_position.find(pos_key(mid));
    if (it != by_position.end() && (mesh.vertices[it->second] - mid).norm() < 1e-12) {
      return fail("hanging node " + std::to_string(it->second) + " on edge (" + std::to_string(a) + ", " +
                  std::to_string(b) + ")");
    }
  }
  return true;
}

Mesh unit_square_mesh(int j, int local_levels) {
  if (j < 1 || j > 12) throw std::invalid_argument("unit_square_mesh: j must lie in [1, 12]");
  if (local_levels < 0 || local_levels > 2) throw std::invalid_argument("unit_square_mesh: local_levels must be 0, 1 or 2");
  const int n = 1 << j;
  Mesh mesh = structured_mesh(n, [](int, int) { return true; });
  const Box omega_f{0.25, 0.75};
  for (int pass = 0; pass < local_levels; ++pass) {
    std::vector<char> marked(mesh.triangles.size());
    for (int t = 0; t < mesh.num_triangles(); ++t) marked[t] = triangle_meets_box(mesh, t, omega_f, true);
    refine_quad(mesh, marked);
  }
  mark_boundary(mesh);
  mesh.fast.assign(mesh.triangles.size(), 0);
  if (local_levels > 0) {
    for (int t = 0; t < mesh.num_triangles(); ++t) mesh.fast[t] = triangle_meets_box(mesh, t, omega_f, false);
  }
  return mesh;
}

Mesh lshape_mesh(double H, double h) {
  if (!(H > 0.0) || !(h > 0.0) || h > H) throw std::invalid_argument("lshape_mesh: need 0 < h <= H");
  int n = int(std::ceil(std::sqrt(2.0) / H - 1e-9));
  n += n % 2;
  if (n > 4096) throw std::invalid_argument("lshape_mesh: H too small");
  const int half = n / 2;
  Mesh mesh = structured_mesh(n, [half](int i, int k) { return !(i >= half && k < half); });
  const double h_base = std::sqrt(2.0) / n;
  const Point2 corner(0.5, 0.5);
  for (;;) {
    std::vector<char> marked(mesh.triangles.size());
    bool any = false;
    for (int t = 0; t < mesh.num_triangles(); ++t) {
      const double target = std::max(h, point_triangle_distance(mesh, t, corner));
      marked[t] = triangle_diameter(mesh, t) > target * (1.0 + 1e-9);
      any = any || marked[t];
    }
    if (!any) break;
    refine(mesh, marked);
  }
  mark_boundary(mesh);

  const double threshold = 0.5 * (h_base + std::min(h, h_base));
  std::vector<char> small_vertex(mesh.vertices.size(), 0);
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    if (triangle_diameter(mesh, t) < threshold * (1.0 - 1e-9)) {
      for (int v : mesh.triangles[t]) small_vertex[v] = 1;
    }
  }
  mesh.fast.assign(mesh.triangles.size(), 0);
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& v = mesh.triangles[t];
    mesh.fast[t] = small_vertex[v[0]] || small_vertex[v[1]] || small_vertex[v[2]];
  }
  return mesh;
}

void write_mesh(std::ostream& out, const Mesh& mesh) {
  const auto old = out.precision(17);
  out << "vertices " << mesh.vertices.size() << '\n';
  for (int i = 0; i < mesh.num_vertices(); ++i) {
    const bool b = i < int(mesh.boundary.size()) && mesh.boundary[i];
    out << mesh.vertices[i].x() << ' ' << mesh.vertices[i].y() << ' ' << (b ? 1 : 0) << '\n';
  }
  out << "triangles " << mesh.triangles.size() << '\n';
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& v = mesh.triangles[t];
    const bool f = t < int(mesh.fast.size()) && mesh.fast[t];
    out << v[0] << ' ' << v[1] << ' ' << v[2] << ' ' << mesh.level[t] << ' ' << (f ? 1 : 0) << '\n';
  }
  out.precision(old);
}

Eigen::Matrix3d p1_stiffness(const Point2& a, const Point2& b, const Point2& c) {
  const std::array<Point2, 3> p{a, b, c};
  const double area = 0.5 * cross(b - a, c - a);
  Eigen::Matrix<double, 3, 2> grad;  // rows: 2 area * grad(phi_i)
  for (int i = 0; i < 3; ++i) {
    const Point2& q = p[(i + 1) % 3];
    const Point2& r = p[(i + 2) % 3];
    grad(i, 0) = q.y() - r.y();
    grad(i, 1) = r.x() - q.x();
  }
  return grad * grad.transpose() / (4.0 * std::abs(area));
}

double manufactured_solution(const Point2& x, double t) {
  constexpr double pi = std::numbers::pi;
  const double sx = std::sin(pi * x.x()), sy = std::sin(pi * x.y()), st = std::sin(pi * t);
  return sx * sx * sy * sy * st * st;
}

double manufactured_source(const Point2& x, double t) {
  constexpr double pi = std::numbers::pi;
  const double sx = std::sin(pi * x.x()), sy = std::sin(pi * x.y()), st = std::sin(pi * t);
  const double u_t = sx * sx * sy * sy * pi * std::sin(2.0 * pi * t);
  const double lap = 2.0 * pi * pi * (std::cos(2.0 * pi * x.x()) * sy * sy + sx * sx * std::cos(2.0 * pi * x.y())) * st * st;
  return u_t - lap;
}

double gaussian_source(const Forcing& f, const Point2& x) {
  return f.amplitude * std::exp(-(x - f.center).squaredNorm() / (f.sigma * f.sigma));
}

double DiscreteHeatSystem::lumped_norm(const Vector& v) const { return std::sqrt((mass.array() * v.array().square()).sum()); }

DiscreteHeatSystem assemble_heat(const Mesh& mesh, const Forcing& forcing) {
  if (forcing.kind == ForcingKind::Gaussian && !(forcing.sigma > 0.0)) {
    throw std::invalid_argument("assemble_heat: Gaussian sigma must be > 0");
  }
  const int nv = mesh.num_vertices();
  std::vector<char> boundary = mesh.boundary;
  if (int(boundary.size()) != nv) {
    Mesh copy = mesh;
    mark_boundary(copy);
    boundary = copy.boundary;
  }

  DiscreteHeatSystem sys;
  std::vector<int> dof(nv, -1);
  for (int i = 0; i < nv; ++i) {
    if (!boundary[i]) {
      dof[i] = int(sys.dof_vertex.size());
      sys.dof_vertex.push_back(i);
    }
  }
  const int n = int(sys.dof_vertex.size());
  sys.n = n;

  Vector mass = Vector::Zero(n);
  Vector sel = Vector::Zero(n);
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(9 * mesh.triangles.size());
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& v = mesh.triangles[t];
    const double d = triangle_diameter(mesh, t);
    const double area = std::abs(triangle_area(mesh, t));
    if (!(area > 1e-14 * d * d)) throw MeshError("assemble_heat: triangle " + std::to_string(t) + " is degenerate");
    const Eigen::Matrix3d ke = p1_stiffness(mesh.vertices[v[0]], mesh.vertices[v[1]], mesh.vertices[v[2]]);
    const bool fast = t < int(mesh.fast.size()) && mesh.fast[t];
    for (int a = 0; a < 3; ++a) {
      const int i = dof[v[a]];
      if (i < 0) continue;
      mass[i] += area / 3.0;
      if (fast) sel[i] = 1.0;
      for (int b = 0; b < 3; ++b) {
        const int k = dof[v[b]];
        if (k >= 0) trip.emplace_back(i, k, ke(a, b));
      }
    }
  }
  SparseMatrix K(n, n);
  K.setFromTriplets(trip.begin(), trip.end());
  const Vector minv = mass.cwiseInverse();
  sys.a = -(minv.asDiagonal() * K);
  sys.a.makeCompressed();
  sys.a_fast = sel.asDiagonal() * sys.a;
  sys.a_slow = (Vector::Ones(n) - sel).asDiagonal() * sys.a;
  sys.a_fast.prune(0.0);
  sys.a_slow.prune(0.0);
  sys.mass = std::move(mass);
  sys.selector = std::move(sel);

  std::vector<Point2> pts(n);
  for (int i = 0; i < n; ++i) pts[i] = mesh.vertices[sys.dof_vertex[i]];
  // Nodal quadrature, consistent with the lumped mass.
  switch (forcing.kind) {
    case ForcingKind::Zero:
      sys.load = [n](double, Vector& out) { out.setZero(n); };
      sys.exact = [n](double) { return Vector(Vector::Zero(n)); };
      break;
    case ForcingKind::Manufactured:
      sys.load = [pts](double t, Vector& out) {
        out.resize(Eigen::Index(pts.size()));
        for (std::size_t i = 0; i < pts.size(); ++i) out[Eigen::Index(i)] = manufactured_source(pts[i], t);
      };
      sys.exact = [pts](double t) {
        Vector u(Eigen::Index(pts.size()));
        for (std::size_t i = 0; i < pts.size(); ++i) u[Eigen::Index(i)] = manufactured_solution(pts[i], t);
        return u;
      };
      break;
    case ForcingKind::Gaussian: {
      Vector g(n);
      for (int i = 0; i < n; ++i) g[i] = gaussian_source(forcing, pts[i]);
      sys.load = [g](double, Vector& out) { out = g; };
      break;
    }
  }
  return sys;
}

SplitSystem heat_split_system(const DiscreteHeatSystem& heat, const LinearRadiusOptions& opts) {
  SplitSystem sys = linear_system(heat.a_fast, heat.a_slow, heat.load, Vector::Zero(heat.n), opts);
  sys.name = "heat";
  sys.exact = heat.exact;
  return sys;
}

}  // namespace mrock
