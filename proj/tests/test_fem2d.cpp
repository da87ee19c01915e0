#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "mrock/fem2d.hpp"

using namespace mrock;
using doctest::Approx;

namespace {

double total_area(const Mesh& m) {
  double a = 0;
  for (int t = 0; t < m.num_triangles(); ++t) a += triangle_area(m, t);
  return a;
}

std::pair<double, double> diameter_range(const Mesh& m) {
  double lo = 1e300, hi = 0;
  for (int t = 0; t < m.num_triangles(); ++t) {
    lo = std::min(lo, triangle_diameter(m, t));
    hi = std::max(hi, triangle_diameter(m, t));
  }
  return {lo, hi};
}

}  // namespace

TEST_CASE("uniform unit square") {
  const auto m = unit_square_mesh(2, 0);
  CHECK(m.num_triangles() == 32);
  CHECK(m.num_vertices() == 25);
  CHECK(total_area(m) == Approx(1.0));
  CHECK(std::count(m.boundary.begin(), m.boundary.end(), 1) == 16);
  CHECK(std::count(m.fast.begin(), m.fast.end(), 1) == 0);
  std::string why;
  CHECK_MESSAGE(is_conforming(m, &why), why);
}

TEST_CASE("local refinement") {
  for (int j = 1; j <= 5; ++j) {
    for (int levels = 0; levels <= 2; ++levels) {
      const auto m = unit_square_mesh(j, levels);
      std::string why;
      CHECK_MESSAGE(is_conforming(m, &why), why);
      CHECK(total_area(m) == Approx(1.0));
      CHECK(m.level.size() == m.triangles.size());
      CHECK(m.fast.size() == m.triangles.size());
      const auto [lo, hi] = diameter_range(m);
      // coarser meshes are refined almost everywhere
      if (j >= 3) CHECK(hi / lo == Approx(std::pow(2.0, levels)));
      for (int t = 0; t < m.num_triangles(); ++t) CHECK(triangle_area(m, t) > 0.0);
    }
  }
  const auto m = unit_square_mesh(3, 2);
  const auto [lo, hi] = diameter_range(m);
  CHECK(hi / lo == Approx(4.0));
  // the fast set holds every smallest triangle and sits around the refined patch
  for (int t = 0; t < m.num_triangles(); ++t) {
    if (triangle_diameter(m, t) < 1.01 * lo) CHECK(m.fast[t] == 1);
    if (m.fast[t]) {
      for (int k : m.triangles[t]) {
        const auto& p = m.vertices[k];
        CHECK(std::max(std::abs(p.x() - 0.5), std::abs(p.y() - 0.5)) <= 0.25 + 0.5 * hi);
      }
    }
  }
  CHECK_THROWS_AS(unit_square_mesh(0, 0), std::invalid_argument);
  CHECK_THROWS_AS(unit_square_mesh(2, 3), std::invalid_argument);
}

TEST_CASE("L-shape") {
  const double H = 0.1, h = 0.01;
  const auto m = lshape_mesh(H, h);
  std::string why;
  CHECK_MESSAGE(is_conforming(m, &why), why);
  CHECK(total_area(m) == Approx(0.75));
  const auto [lo, hi] = diameter_range(m);
  CHECK(hi <= H + 1e-12);
  CHECK(lo <= h + 1e-12);
  CHECK(lo > h / 2 - 1e-12);
  int fast = 0;
  for (int t = 0; t < m.num_triangles(); ++t) {
    fast += m.fast[t];
    for (int k : m.triangles[t]) {
      const auto& p = m.vertices[k];
      CHECK_FALSE((p.x() > 0.5 + 1e-12 && p.y() < 0.5 - 1e-12));
    }
    if (triangle_diameter(m, t) <= h + 1e-12) CHECK(m.fast[t] == 1);
  }
  CHECK(fast > 0);
  CHECK(fast < m.num_triangles() / 2);
  CHECK_THROWS_AS(lshape_mesh(0.01, 0.1), std::invalid_argument);
}

TEST_CASE("hanging node is detected") {
  Mesh m;
  m.vertices = {{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0.5, 0.5}};
  m.triangles = {{{0, 1, 2}}, {{4, 2, 3}}, {{4, 3, 0}}};
  m.boundary.assign(5, 0);
  m.level.assign(3, 0);
  m.fast.assign(3, 0);
  std::string why;
  CHECK_FALSE(is_conforming(m, &why));
  CHECK_FALSE(why.empty());
  m.triangles[0] = {{0, 2, 1}};
  CHECK_FALSE(is_conforming(m));
}

TEST_CASE("element stiffness") {
  const Eigen::Matrix3d k = p1_stiffness({0, 0}, {1, 0}, {0, 1});
  Eigen::Matrix3d ref;
  ref << 1.0, -0.5, -0.5, -0.5, 0.5, 0.0, -0.5, 0.0, 0.5;
  CHECK((k - ref).norm() < 1e-14);

  // invariant under rigid motions, scale-free in 2D
  const double c = std::cos(0.7), s = std::sin(0.7);
  auto move = [&](Point2 p) { return Point2(3.0 * (c * p.x() - s * p.y()) + 2.0, 3.0 * (s * p.x() + c * p.y()) - 1.0); };
  const Point2 a(0.1, 0.2), b(0.9, 0.3), d(0.4, 0.8);
  const Eigen::Matrix3d k1 = p1_stiffness(a, b, d);
  CHECK((p1_stiffness(move(a), move(b), move(d)) - k1).norm() < 1e-12);
  CHECK((k1 - k1.transpose()).norm() < 1e-14);
  CHECK(k1.rowwise().sum().norm() < 1e-14);
  const Eigen::Vector3d lin(a.x() + 2 * a.y(), b.x() + 2 * b.y(), d.x() + 2 * d.y());
  // energy of u = x + 2y is |grad u|^2 * area = 5 * area
  const double area = 0.5 * std::abs((b - a).x() * (d - a).y() - (b - a).y() * (d - a).x());
  CHECK(lin.dot(k1 * lin) == Approx(5.0 * area));
}

TEST_CASE("assembled heat operator") {
  const auto mesh = unit_square_mesh(3, 1);
  const auto heat = assemble_heat(mesh, Forcing{});
  const int interior = int(std::count(mesh.boundary.begin(), mesh.boundary.end(), 0));
  CHECK(heat.n == interior);
  const SparseMatrix sum = heat.a_fast + heat.a_slow;
  CHECK((Eigen::MatrixXd(sum) - Eigen::MatrixXd(heat.a)).norm() < 1e-12);
  for (Eigen::Index i = 0; i < heat.n; ++i) {
    CHECK((heat.selector[i] == 0.0 || heat.selector[i] == 1.0));
    CHECK(heat.mass[i] > 0.0);
  }
  CHECK(heat.selector.sum() > 0.0);
  CHECK(heat.selector.sum() < double(heat.n));
  // M A = -K is symmetric negative definite
  const Eigen::MatrixXd ma = heat.mass.asDiagonal() * Eigen::MatrixXd(heat.a);
  CHECK((ma - ma.transpose()).norm() < 1e-10 * ma.norm());
  CHECK(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(ma).eigenvalues().maxCoeff() < 0.0);

  // lumped mass of the interior vertices: at most the domain area
  CHECK(heat.mass.sum() < 1.0);
  CHECK(heat.lumped_norm(Vector::Ones(heat.n)) == Approx(std::sqrt(heat.mass.sum())));

  const Vector u0 = heat.exact(0.0);
  CHECK(u0.norm() == 0.0);
  Vector g(heat.n);
  heat.load(0.25, g);
  CHECK(g.norm() > 0.0);

  const auto sys = heat_split_system(heat);
  Vector y = Vector::LinSpaced(heat.n, 0.0, 1.0), out(heat.n);
  sys.fast(0.0, y, out);
  CHECK((out - heat.a_fast * y).norm() < 1e-12);
  CHECK(sys.rho_fast(0.0, y) > sys.rho_slow(0.0, y));
  CHECK(sys.y0.norm() == 0.0);
}

TEST_CASE("manufactured solution and source are consistent") {
  const Point2 x(0.3, 0.6);
  const double t = 0.37, h = 1e-4;
  auto u = [](Point2 p, double s) { return manufactured_solution(p, s); };
  const double ut = (u(x, t + h) - u(x, t - h)) / (2 * h);
  const double lap = (u(x + Point2(h, 0), t) + u(x - Point2(h, 0), t) + u(x + Point2(0, h), t) +
                      u(x - Point2(0, h), t) - 4 * u(x, t)) / (h * h);
  CHECK(manufactured_source(x, t) == Approx(ut - lap).epsilon(1e-5));
  CHECK(manufactured_solution(Point2(0.0, 0.4), t) == 0.0);
}

TEST_CASE("Gaussian forcing") {
  Forcing f;
  f.kind = ForcingKind::Gaussian;
  CHECK(gaussian_source(f, f.center) == Approx(f.amplitude));
  CHECK(gaussian_source(f, f.center + Point2(f.sigma, 0)) == Approx(f.amplitude * std::exp(-1.0)));
  const auto heat = assemble_heat(lshape_mesh(0.2, 0.05), f);
  CHECK_FALSE(heat.exact);
  Vector g0(heat.n), g1(heat.n);
  heat.load(0.0, g0);
  heat.load(1.0, g1);
  CHECK((g0 - g1).norm() == 0.0);
  f.sigma = 0.0;
  CHECK_THROWS_AS(assemble_heat(lshape_mesh(0.2, 0.05), f), std::invalid_argument);
}

TEST_CASE("degenerate triangle is rejected") {
  auto m = unit_square_mesh(1, 0);
  for (double c : {0.1, 0.2, 0.3}) {
    m.vertices.push_back({c, c});
    m.boundary.push_back(0);
  }
  const int n = m.num_vertices();
  m.triangles.push_back({{n - 3, n - 2, n - 1}});
  m.level.push_back(0);
  m.fast.push_back(0);
  CHECK_THROWS_AS(assemble_heat(m, Forcing{}), MeshError);
}

TEST_CASE("mesh listing") {
  const auto m = unit_square_mesh(1, 0);
  std::ostringstream out;
  write_mesh(out, m);
  std::istringstream in(out.str());
  std::string word;
  int nv = 0, nt = 0;
  in >> word >> nv;
  CHECK(word == "vertices");
  CHECK(nv == m.num_vertices());
  double x, y;
  int b;
  for (int k = 0; k < nv; ++k) in >> x >> y >> b;
  in >> word >> nt;
  CHECK(word == "triangles");
  CHECK(nt == m.num_triangles());
}
